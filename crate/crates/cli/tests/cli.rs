use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

fn data(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("phuop").chain(args.iter().copied());
    let code = phuop_cli::run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn example_args(extra: &[&str]) -> Vec<String> {
    let mut v = vec![
        "--data".to_owned(),
        data("running_example/transactions.txt"),
        "--utility".to_owned(),
        data("running_example/utility.txt"),
    ];
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn run_with(cmd: &str, extra: &[&str]) -> Run {
    let mut args = vec![cmd.to_owned()];
    args.extend(example_args(extra));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    run(&refs)
}

const TH: [&str; 6] = ["--alpha", "0.3", "--beta", "0.3", "--gamma", "0.05"];

#[test]
fn mine_prints_sorted_text_lines() {
    let r = run_with("mine", &TH);
    assert_eq!(r.code, 0, "{}", r.err);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines.contains(&"c #SUP: 8 #PRO: 5.4000 #UO: 0.6468"));
    assert!(lines.contains(&"b c #SUP: 3 #PRO: 1.4500 #UO: 0.6554"));
    assert!(lines.contains(&"a d c #SUP: 4 #PRO: 1.2480 #UO: 0.8972"));
    assert!(!r.out.contains("\nb #SUP"));
}

#[test]
fn mine_agrees_with_oracle() {
    for th in [
        ["--alpha", "0.2", "--beta", "0.2", "--gamma", "0.01"],
        ["--alpha", "0.5", "--beta", "0.4", "--gamma", "0.2"],
        ["--alpha", "0.8", "--beta", "0.5", "--gamma", "0.3"],
    ] {
        let m = run_with("mine", &th);
        let o = run_with("oracle", &th);
        assert_eq!((m.code, o.code), (0, 0));
        assert_eq!(m.out, o.out);
    }
}

#[test]
fn presets_give_identical_output() {
    let full = run_with("mine", &TH).out;
    for s in ["s12", "s13", "s1"] {
        let mut args = TH.to_vec();
        args.extend(["--strategies", s]);
        assert_eq!(run_with("mine", &args).out, full, "preset {s}");
    }
}

#[test]
fn output_and_stats_files() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p.txt");
    let stats = dir.path().join("s.txt");
    let mut args = TH.to_vec();
    let (o, s) = (out.to_str().unwrap(), stats.to_str().unwrap());
    args.extend(["--output", o, "--stats", s]);
    let r = run_with("mine", &args);
    assert_eq!(r.code, 0);
    assert!(r.out.is_empty());
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        run_with("mine", &TH).out
    );
    let st = std::fs::read_to_string(&stats).unwrap();
    assert!(st.contains("patterns_found=11\n"));
    assert!(st.contains("visited_nodes="));
}

#[test]
fn csv_and_json_formats() {
    let mut args = TH.to_vec();
    args.extend(["--format", "csv"]);
    let csv = run_with("mine", &args).out;
    assert!(csv.starts_with("pattern,support,probability,utility_occupancy\n"));
    assert!(csv.contains("\nc,8,5.4000,0.6468\n"));

    let mut args = TH.to_vec();
    args.extend(["--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&run_with("mine", &args).out).unwrap();
    let arr = json.as_array().unwrap();
    assert_eq!(arr.len(), 11);
    let c = arr
        .iter()
        .find(|r| r["items"] == serde_json::json!(["c"]))
        .unwrap();
    assert_eq!(c["support"], 8);
}

#[test]
fn bad_thresholds_exit_2() {
    for th in [
        ["--alpha", "1.1", "--beta", "0.3", "--gamma", "0.1"],
        ["--alpha", "0", "--beta", "0.3", "--gamma", "0.1"],
        ["--alpha", "0.3", "--beta", "0.3", "--gamma", "-0.1"],
        ["--alpha", "0.3", "--beta", "abc", "--gamma", "0.1"],
    ] {
        let r = run_with("mine", &th);
        assert_eq!(r.code, 2, "{th:?}");
        assert!(!r.err.is_empty());
    }
    let mut args = TH.to_vec();
    args.extend(["--strategies", "turbo"]);
    assert_eq!(run_with("mine", &args).code, 2);
}

#[test]
fn unreadable_or_invalid_input_exits_1() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.txt");
    let r = run(&[
        "mine",
        "--data",
        missing.to_str().unwrap(),
        "--utility",
        &data("running_example/utility.txt"),
        "--alpha",
        "0.3",
        "--beta",
        "0.3",
        "--gamma",
        "0.1",
    ]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("missing.txt"));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "a:2:0.6 c:4:1.5\n").unwrap();
    let r = run(&[
        "mine",
        "--data",
        bad.to_str().unwrap(),
        "--utility",
        &data("running_example/utility.txt"),
        "--alpha",
        "0.3",
        "--beta",
        "0.3",
        "--gamma",
        "0.1",
    ]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("line 1"), "{}", r.err);
}

#[test]
fn oracle_budget_exits_3() {
    let mut args = TH.to_vec();
    args.extend(["--budget", "5"]);
    let r = run_with("oracle", &args);
    assert_eq!(r.code, 3);
    assert!(r.err.contains("budget"));
}

#[test]
fn oracle_max_len_limits_patterns() {
    let mut args = TH.to_vec();
    args.extend(["--max-len", "1"]);
    let r = run_with("oracle", &args);
    assert_eq!(r.code, 0);
    assert!(r
        .out
        .lines()
        .all(|l| l.split(" #SUP").next().unwrap().split(' ').count() == 1));
    assert_eq!(r.out.lines().count(), 2);
}

#[test]
fn stats_lines() {
    let r = run_with("stats", &[]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("transactions=10\n"));
    assert!(r.out.contains("items=5\n"));
    assert!(r.out.contains("total_utility=443.0000\n"));
}

fn write_plan(dir: &Path, body: &str) -> PathBuf {
    let ex = PathBuf::from(data("running_example"));
    let text = format!(
        "dataset = ex {} {}\n{body}",
        ex.join("transactions.txt").display(),
        ex.join("utility.txt").display()
    );
    let path = dir.join("plan.txt");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn bench_plan_writes_csv() {
    let dir = TempDir::new().unwrap();
    let plan = write_plan(
        dir.path(),
        "alpha = 0.2, 0.3\nbeta = 0.3\ngamma = 0.05\nstrategies = full, s1\n",
    );
    let r = run(&["bench", "--plan", plan.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.err);
    let mut rdr = csv::Reader::from_reader(r.out.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        phuop_core::sweep::CSV_HEADER
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[0][4], "full");
    assert_eq!(&rows[1][4], "s1");
    assert_eq!(rows[0][9], rows[1][9]);
    assert_eq!(&rows[2][1], "0.3");
    assert_eq!(&rows[2][9], "11");
}

#[test]
fn bench_with_two_varying_parameters_exits_2() {
    let dir = TempDir::new().unwrap();
    let plan = write_plan(
        dir.path(),
        "alpha = 0.2, 0.3\nbeta = 0.3, 0.4\ngamma = 0.05\n",
    );
    let r = run(&["bench", "--plan", plan.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("vary"));
}

#[test]
fn bench_inline_flags() {
    let r = run_with(
        "bench",
        &[
            "--alpha",
            "0.3",
            "--beta",
            "0.3",
            "--gamma",
            "0,0.05,0.1",
            "--strategies",
            "s12,s13",
        ],
    );
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out.lines().count(), 1 + 3 * 2);
    assert!(r
        .out
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("transactions,0.3,0.3,0,s12,1,"));
}

#[test]
fn generate_then_mine() {
    let dir = TempDir::new().unwrap();
    let tx = dir.path().join("tx.txt");
    let ut = dir.path().join("ut.txt");
    let (t, u) = (tx.to_str().unwrap(), ut.to_str().unwrap());
    let args = [
        "generate",
        "--seed",
        "42",
        "--transactions",
        "30",
        "--items",
        "10",
        "--avg-length",
        "4",
        "--max-quantity",
        "5",
        "--max-utility",
        "10",
        "--out-data",
        t,
        "--out-utility",
        u,
    ];
    assert_eq!(run(&args).code, 0);
    assert_eq!(
        std::fs::read_to_string(&tx).unwrap(),
        std::fs::read_to_string(data("generated_seed42/transactions.txt")).unwrap()
    );
    let r = run(&[
        "mine",
        "--data",
        t,
        "--utility",
        u,
        "--alpha",
        "0.2",
        "--beta",
        "0.2",
        "--gamma",
        "0.05",
    ]);
    assert_eq!(r.code, 0);

    let bad = run(&[
        "generate",
        "--prob-min",
        "0.9",
        "--prob-max",
        "0.5",
        "--out-data",
        t,
        "--out-utility",
        u,
    ]);
    assert_eq!(bad.code, 2);
}

#[test]
fn augment_plain_dataset() {
    let dir = TempDir::new().unwrap();
    let plain = dir.path().join("plain.txt");
    std::fs::write(&plain, "1 2 3\n2 3\n3 3 4\n").unwrap();
    let tx = dir.path().join("tx.txt");
    let ut = dir.path().join("ut.txt");
    let args = [
        "augment",
        "--input",
        plain.to_str().unwrap(),
        "--seed",
        "7",
        "--out-data",
        tx.to_str().unwrap(),
        "--out-utility",
        ut.to_str().unwrap(),
    ];
    assert_eq!(run(&args).code, 0);
    let text = std::fs::read_to_string(&tx).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert_eq!(text.lines().nth(2).unwrap().split(' ').count(), 2);
    let db = phuop_core::parse_database(
        std::fs::File::open(&tx).unwrap(),
        std::fs::File::open(&ut).unwrap(),
    )
    .unwrap();
    assert!(phuop_core::validate_database(&db).is_empty());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_phuop");
    let ok = Command::new(bin)
        .args(["stats"])
        .args(example_args(&[]))
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin)
        .args(["mine"])
        .args(example_args(&[
            "--alpha", "1.1", "--beta", "0.3", "--gamma", "0.1",
        ]))
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}
