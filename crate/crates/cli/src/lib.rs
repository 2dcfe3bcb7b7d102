//! The `phuop` command line: mining, brute-force checking, sweeps, dataset
//! statistics and dataset generation.
//!
//! Exit codes: 0 success, 1 input or validation error, 2 bad flags or plan,
//! 3 oracle budget exceeded.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use phuop_core::oracle::DEFAULT_BUDGET;
use phuop_core::{
    augment, generate, mine, oracle_mine_with_budget, parse_database, total_order, write_database,
    BenchPlan, BenchRow, DatasetSpec, Error, GeneratorConfig, MiningStats, PhuopRecord,
    StrategySet, Thresholds, UncertainDatabase,
};
use serde::Serialize;

pub mod format;

use format::fixed4;

#[derive(Debug, Parser)]
#[command(
    name = "phuop",
    version,
    about = "Mine potential high utility-occupancy patterns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mine PHUOPs with the list-based search.
    Mine(MineArgs),
    /// Mine PHUOPs by exhaustive enumeration (small inputs only).
    Oracle(OracleArgs),
    /// Run a threshold/strategy sweep and print CSV.
    Bench(BenchArgs),
    /// Print dataset statistics.
    Stats(DataArgs),
    /// Write a synthetic uncertain database.
    Generate(GenerateArgs),
    /// Attach quantities, utilities and probabilities to a plain dataset.
    Augment(AugmentArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Transactions file (`item:quantity:probability` tokens).
    #[arg(long)]
    data: PathBuf,
    /// Unit utility file (`item utility` lines).
    #[arg(long)]
    utility: PathBuf,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Minimum support, as a fraction of the database size, in (0, 1].
    #[arg(long, value_parser = open_unit)]
    alpha: f64,
    /// Minimum average utility occupancy, in (0, 1].
    #[arg(long, value_parser = open_unit)]
    beta: f64,
    /// Minimum probability, as a fraction of the database size, in [0, 1].
    #[arg(long, value_parser = closed_unit)]
    gamma: f64,
}

impl ThresholdArgs {
    fn thresholds(&self) -> Thresholds {
        Thresholds {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write patterns here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct MineArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Pruning preset: full, s12, s13 or s1.
    #[arg(long, default_value = "full", value_parser = preset)]
    strategies: StrategySet,
    #[command(flatten)]
    output: OutputArgs,
    /// Write search counters as key=value lines.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Longest itemset to enumerate (default: number of items).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_len: Option<u64>,
    /// Maximum number of itemsets to examine.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Plan file; when absent the sweep comes from the flags below.
    #[arg(long, conflicts_with_all = ["data", "alpha", "beta", "gamma"])]
    plan: Option<PathBuf>,
    #[arg(long, requires = "utility")]
    data: Option<PathBuf>,
    #[arg(long)]
    utility: Option<PathBuf>,
    /// Dataset name for the CSV (default: transactions file stem).
    #[arg(long)]
    name: Option<String>,
    /// Comma-separated alpha values.
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    /// Comma-separated presets.
    #[arg(long, value_delimiter = ',', value_parser = preset, default_value = "full")]
    strategies: Vec<StrategySet>,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DistributionArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    max_quantity: u32,
    #[arg(long, default_value_t = 100)]
    max_utility: u32,
    #[arg(long, default_value_t = 0.1)]
    prob_min: f64,
    #[arg(long, default_value_t = 1.0)]
    prob_max: f64,
}

#[derive(Debug, Args)]
struct DestinationArgs {
    /// Where to write the transactions file.
    #[arg(long)]
    out_data: PathBuf,
    /// Where to write the utility file.
    #[arg(long)]
    out_utility: PathBuf,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 1000)]
    transactions: usize,
    #[arg(long, default_value_t = 100)]
    items: usize,
    #[arg(long, default_value_t = 8.0)]
    avg_length: f64,
    #[command(flatten)]
    dist: DistributionArgs,
    #[command(flatten)]
    dest: DestinationArgs,
}

#[derive(Debug, Args)]
struct AugmentArgs {
    /// Plain dataset: whitespace-separated item labels per line.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    dist: DistributionArgs,
    #[command(flatten)]
    dest: DestinationArgs,
}

fn unit_value(s: &str, open_low: bool) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    let low_ok = if open_low { v > 0.0 } else { v >= 0.0 };
    if low_ok && v <= 1.0 {
        Ok(v)
    } else if open_low {
        Err(format!("{v} is outside (0, 1]"))
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn open_unit(s: &str) -> Result<f64, String> {
    unit_value(s, true)
}

fn closed_unit(s: &str) -> Result<f64, String> {
    unit_value(s, false)
}

fn preset(s: &str) -> Result<StrategySet, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A command failure and the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match cli.command {
        Command::Mine(a) => cmd_mine(&a, stdout),
        Command::Oracle(a) => cmd_oracle(&a, stdout),
        Command::Bench(a) => cmd_bench(&a, stdout),
        Command::Stats(a) => cmd_stats(&a, stdout),
        Command::Generate(a) => cmd_generate(&a),
        Command::Augment(a) => cmd_augment(&a),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn load(data: &DataArgs) -> Result<UncertainDatabase, Failure> {
    let tx = open(&data.data)?;
    let ut = open(&data.utility)?;
    parse_database(tx, ut).map_err(|e| {
        Failure::input(format!(
            "{} / {}: {e}",
            data.data.display(),
            data.utility.display()
        ))
    })
}

fn create(path: &Path) -> Result<File, Failure> {
    File::create(path).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn write_to(path: Option<&Path>, stdout: &mut dyn Write, bytes: &[u8]) -> CmdResult {
    let res = match path {
        Some(p) => create(p)?.write_all(bytes),
        None => stdout.write_all(bytes),
    };
    res.map_err(|e| Failure::input(format!("write failed: {e}")))
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    items: Vec<&'a str>,
    support: usize,
    probability: f64,
    utility_occupancy: f64,
}

/// Renders records sorted by item ids, each pattern's items in mining order.
pub fn render_patterns(db: &UncertainDatabase, records: &[PhuopRecord], fmt: &str) -> String {
    let order = total_order(db, db.item_ids());
    let mut sorted: Vec<&PhuopRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.pattern.cmp(&b.pattern));
    let labels = |r: &PhuopRecord| -> Vec<&str> {
        order
            .sort_pattern(&r.pattern)
            .into_iter()
            .map(|i| db.item(i).as_str())
            .collect()
    };
    let mut out = String::new();
    match fmt {
        "csv" => {
            out.push_str("pattern,support,probability,utility_occupancy\n");
            for r in sorted {
                writeln!(
                    out,
                    "{},{},{},{}",
                    labels(r).join(" "),
                    r.support,
                    fixed4(r.probability),
                    fixed4(r.utility_occupancy)
                )
                .unwrap();
            }
        }
        "json" => {
            let recs: Vec<JsonRecord<'_>> = sorted
                .iter()
                .map(|r| JsonRecord {
                    items: labels(r),
                    support: r.support,
                    probability: r.probability,
                    utility_occupancy: r.utility_occupancy,
                })
                .collect();
            out = serde_json::to_string_pretty(&recs).expect("serializable");
            out.push('\n');
        }
        _ => {
            for r in sorted {
                writeln!(
                    out,
                    "{} #SUP: {} #PRO: {} #UO: {}",
                    labels(r).join(" "),
                    r.support,
                    fixed4(r.probability),
                    fixed4(r.utility_occupancy)
                )
                .unwrap();
            }
        }
    }
    out
}

fn format_name(f: OutputFormat) -> &'static str {
    match f {
        OutputFormat::Text => "text",
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

pub fn render_stats(stats: &MiningStats) -> String {
    format!(
        "visited_nodes={}\nconstructed_lists={}\ncandidate_joins={}\npatterns_found={}\nelapsed_ms={:.3}\n",
        stats.visited_nodes,
        stats.constructed_lists,
        stats.candidate_joins,
        stats.patterns_found,
        stats.elapsed.as_secs_f64() * 1e3
    )
}

fn cmd_mine(a: &MineArgs, stdout: &mut dyn Write) -> CmdResult {
    let db = load(&a.data)?;
    let outcome = mine(&db, &a.thresholds.thresholds(), a.strategies)?;
    let text = render_patterns(&db, &outcome.phuops, format_name(a.output.format));
    write_to(a.output.output.as_deref(), stdout, text.as_bytes())?;
    if let Some(path) = &a.stats {
        create(path)?
            .write_all(render_stats(&outcome.stats).as_bytes())
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_oracle(a: &OracleArgs, stdout: &mut dyn Write) -> CmdResult {
    let db = load(&a.data)?;
    let max_len = a
        .max_len
        .map_or(db.num_items().max(1), |k| k.min(usize::MAX as u64) as usize);
    let records = oracle_mine_with_budget(&db, &a.thresholds.thresholds(), max_len, a.budget)?;
    let text = render_patterns(&db, &records, format_name(a.output.format));
    write_to(a.output.output.as_deref(), stdout, text.as_bytes())
}

fn bench_plan(a: &BenchArgs) -> Result<BenchPlan, Failure> {
    if let Some(path) = &a.plan {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        return BenchPlan::parse(&text, base).map_err(|e| Failure::usage(e.to_string()));
    }
    let (Some(data), Some(utility)) = (&a.data, &a.utility) else {
        return Err(Failure::usage("bench needs --plan or --data and --utility"));
    };
    let name = a.name.clone().unwrap_or_else(|| {
        data.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    });
    Ok(BenchPlan {
        datasets: vec![DatasetSpec {
            name,
            transactions: data.clone(),
            utility: utility.clone(),
        }],
        alpha_values: a.alpha.clone(),
        beta_values: a.beta.clone(),
        gamma_values: a.gamma.clone(),
        strategy_presets: a.strategies.clone(),
        repetitions: a.repetitions,
    })
}

/// Serializes sweep rows as CSV with the standard header.
pub fn render_bench_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(phuop_core::sweep::CSV_HEADER).unwrap();
    for r in rows {
        w.write_record([
            r.dataset.clone(),
            r.thresholds.alpha.to_string(),
            r.thresholds.beta.to_string(),
            r.thresholds.gamma.to_string(),
            r.strategy.to_string(),
            r.rep.to_string(),
            format!("{:.3}", r.runtime_ms),
            r.visited_nodes.to_string(),
            r.constructed_lists.to_string(),
            r.patterns.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}

fn cmd_bench(a: &BenchArgs, stdout: &mut dyn Write) -> CmdResult {
    let plan = bench_plan(a)?;
    plan.check().map_err(|e| Failure::usage(e.to_string()))?;
    if plan.datasets.is_empty() {
        return Err(Failure::usage("plan names no dataset"));
    }
    let mut rows = Vec::new();
    for ds in &plan.datasets {
        let db = load(&DataArgs {
            data: ds.transactions.clone(),
            utility: ds.utility.clone(),
        })?;
        rows.extend(plan.sweep(&ds.name, &db)?);
    }
    write_to(
        a.output.as_deref(),
        stdout,
        render_bench_csv(&rows).as_bytes(),
    )
}

fn cmd_stats(a: &DataArgs, stdout: &mut dyn Write) -> CmdResult {
    let s = load(a)?.stats();
    let text = format!(
        "transactions={}\nitems={}\nmin_length={}\navg_length={}\nmax_length={}\ntotal_utility={}\ndensity={}\n",
        s.num_transactions,
        s.num_items,
        s.min_length,
        fixed4(s.avg_length),
        s.max_length,
        fixed4(s.total_utility),
        fixed4(s.density),
    );
    write_to(None, stdout, text.as_bytes())
}

fn save(db: &UncertainDatabase, dest: &DestinationArgs) -> CmdResult {
    let (tx, ut) = write_database(db);
    for (path, text) in [(&dest.out_data, tx), (&dest.out_utility, ut)] {
        create(path)?
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn config(dist: &DistributionArgs) -> GeneratorConfig {
    GeneratorConfig {
        seed: dist.seed,
        max_quantity: dist.max_quantity,
        max_unit_utility: dist.max_utility,
        prob_min: dist.prob_min,
        prob_max: dist.prob_max,
        ..GeneratorConfig::default()
    }
}

fn cmd_generate(a: &GenerateArgs) -> CmdResult {
    let cfg = GeneratorConfig {
        num_transactions: a.transactions,
        num_items: a.items,
        avg_transaction_length: a.avg_length,
        ..config(&a.dist)
    };
    let db = generate(&cfg).map_err(|e| Failure::usage(e.to_string()))?;
    save(&db, &a.dest)
}

fn cmd_augment(a: &AugmentArgs) -> CmdResult {
    let cfg = config(&a.dist);
    let db = augment(open(&a.input)?, &cfg).map_err(|e| match e {
        Error::InvalidArgument(m) => Failure::usage(m),
        other => Failure::input(format!("{}: {other}", a.input.display())),
    })?;
    save(&db, &a.dest)
}
