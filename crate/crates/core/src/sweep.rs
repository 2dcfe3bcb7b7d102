//! Threshold sweeps: run the miner over a grid of thresholds and strategy
//! presets and collect one row of counters per run.
//!
//! Plan files are `key = value` lines (`#` starts a comment):
//!
//! ```text
//! dataset = retail data/retail.txt data/retail_utility.txt
//! alpha = 0.09, 0.10, 0.11
//! beta = 0.3
//! gamma = 0.05
//! strategies = full, s12, s13
//! repetitions = 3
//! ```
//!
//! `dataset` may repeat. Relative paths are resolved against the plan file's
//! directory. At most one of `alpha`, `beta`, `gamma` may list more than one
//! value.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::dataio::parse_database;
use crate::error::{Error, Result};
use crate::miner::{mine, StrategySet};
use crate::model::{Thresholds, UncertainDatabase};

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSpec {
    pub name: String,
    pub transactions: PathBuf,
    pub utility: PathBuf,
}

impl DatasetSpec {
    pub fn load(&self) -> Result<UncertainDatabase> {
        let open = |p: &Path| {
            File::open(p).map_err(|e| {
                Error::Io(std::io::Error::new(
                    e.kind(),
                    format!("{}: {e}", p.display()),
                ))
            })
        };
        parse_database(open(&self.transactions)?, open(&self.utility)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchPlan {
    pub datasets: Vec<DatasetSpec>,
    pub alpha_values: Vec<f64>,
    pub beta_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub strategy_presets: Vec<StrategySet>,
    pub repetitions: usize,
}

/// Counters of a single mining run.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub dataset: String,
    pub thresholds: Thresholds,
    pub strategy: StrategySet,
    pub rep: usize,
    pub runtime_ms: f64,
    pub visited_nodes: u64,
    pub constructed_lists: u64,
    pub patterns: u64,
}

pub const CSV_HEADER: [&str; 10] = [
    "dataset",
    "alpha",
    "beta",
    "gamma",
    "strategy",
    "rep",
    "runtime_ms",
    "visited_nodes",
    "constructed_lists",
    "patterns",
];

fn parse_list(key: &str, value: &str, line: usize) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| {
            let v = v.trim();
            v.parse::<f64>()
                .map_err(|_| Error::parse(line, 1, format!("invalid {key} value '{v}'")))
        })
        .collect()
}

impl BenchPlan {
    /// Parses plan text; relative dataset paths are joined onto `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut plan = BenchPlan {
            datasets: Vec::new(),
            alpha_values: Vec::new(),
            beta_values: Vec::new(),
            gamma_values: Vec::new(),
            strategy_presets: Vec::new(),
            repetitions: 1,
        };
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(line_no, 1, "expected 'key = value'"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "dataset" => {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    let [name, tx, ut] = parts[..] else {
                        return Err(Error::parse(
                            line_no,
                            1,
                            "dataset needs 'NAME TRANSACTIONS UTILITY'",
                        ));
                    };
                    plan.datasets.push(DatasetSpec {
                        name: name.to_owned(),
                        transactions: base_dir.join(tx),
                        utility: base_dir.join(ut),
                    });
                }
                "alpha" => plan.alpha_values = parse_list(key, value, line_no)?,
                "beta" => plan.beta_values = parse_list(key, value, line_no)?,
                "gamma" => plan.gamma_values = parse_list(key, value, line_no)?,
                "strategies" => {
                    plan.strategy_presets =
                        value.split(',').map(str::parse).collect::<Result<_>>()?;
                }
                "repetitions" => {
                    plan.repetitions = value.parse().map_err(|_| {
                        Error::parse(line_no, 1, format!("invalid repetitions '{value}'"))
                    })?;
                }
                other => {
                    return Err(Error::parse(line_no, 1, format!("unknown key '{other}'")));
                }
            }
        }
        if plan.strategy_presets.is_empty() {
            plan.strategy_presets.push(StrategySet::FULL);
        }
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Checks the one-varying-parameter rule and every threshold value.
    pub fn check(&self) -> Result<()> {
        let lists = [
            ("alpha", &self.alpha_values),
            ("beta", &self.beta_values),
            ("gamma", &self.gamma_values),
        ];
        for (name, values) in lists {
            if values.is_empty() {
                return Err(Error::InvalidArgument(format!("plan has no {name} value")));
            }
        }
        let varying: Vec<&str> = lists
            .iter()
            .filter(|(_, v)| v.len() > 1)
            .map(|(n, _)| *n)
            .collect();
        if varying.len() > 1 {
            return Err(Error::InvalidArgument(format!(
                "only one parameter may vary per sweep, but {} all list several values",
                varying.join(" and ")
            )));
        }
        if self.repetitions < 1 {
            return Err(Error::InvalidArgument(
                "repetitions must be at least 1".into(),
            ));
        }
        for th in self.points() {
            th.check()?;
        }
        Ok(())
    }

    /// Sweep points in plan order.
    pub fn points(&self) -> Vec<Thresholds> {
        let mut out = Vec::new();
        for &alpha in &self.alpha_values {
            for &beta in &self.beta_values {
                for &gamma in &self.gamma_values {
                    out.push(Thresholds { alpha, beta, gamma });
                }
            }
        }
        out
    }

    /// Loads each dataset in turn and sweeps it.
    pub fn run(&self) -> Result<Vec<BenchRow>> {
        self.check()?;
        let mut rows = Vec::new();
        for ds in &self.datasets {
            let db = ds.load()?;
            rows.extend(self.sweep(&ds.name, &db)?);
        }
        Ok(rows)
    }

    /// One row per (point, preset, repetition); only the mining call is timed.
    pub fn sweep(&self, name: &str, db: &UncertainDatabase) -> Result<Vec<BenchRow>> {
        self.check()?;
        let mut rows = Vec::new();
        for th in self.points() {
            for &strategy in &self.strategy_presets {
                for rep in 1..=self.repetitions {
                    let start = Instant::now();
                    let outcome = mine(db, &th, strategy)?;
                    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
                    rows.push(BenchRow {
                        dataset: name.to_owned(),
                        thresholds: th,
                        strategy,
                        rep,
                        runtime_ms,
                        visited_nodes: outcome.stats.visited_nodes,
                        constructed_lists: outcome.stats.constructed_lists,
                        patterns: outcome.stats.patterns_found,
                    });
                }
            }
        }
        Ok(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::running_example;

    fn plan(text: &str) -> Result<BenchPlan> {
        BenchPlan::parse(text, Path::new("/plans"))
    }

    #[test]
    fn parses_keys_and_resolves_paths() {
        let p = plan(
            "# sweep\ndataset = ex tx.txt /abs/ut.txt\nalpha = 0.1, 0.2\nbeta=0.3\ngamma = 0\nstrategies = full,s12\nrepetitions = 2\n",
        )
        .unwrap();
        assert_eq!(p.datasets[0].transactions, PathBuf::from("/plans/tx.txt"));
        assert_eq!(p.datasets[0].utility, PathBuf::from("/abs/ut.txt"));
        assert_eq!(p.alpha_values, [0.1, 0.2]);
        assert_eq!(p.strategy_presets, [StrategySet::FULL, StrategySet::S12]);
        assert_eq!(p.repetitions, 2);
        p.check().unwrap();
        assert_eq!(p.points().len(), 2);
    }

    #[test]
    fn two_varying_parameters_are_rejected() {
        let p = plan("alpha = 0.1, 0.2\nbeta = 0.3, 0.4\ngamma = 0\n").unwrap();
        assert!(matches!(p.check(), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn bad_lines() {
        assert!(plan("alpha 0.1").is_err());
        assert!(plan("alpha = x").is_err());
        assert!(plan("colour = red").is_err());
        assert!(plan("strategies = full, turbo").is_err());
        assert!(plan("dataset = only-a-name").is_err());
        let p = plan("alpha = 1.5\nbeta = 0.1\ngamma = 0").unwrap();
        assert!(p.check().is_err());
    }

    #[test]
    fn sweep_rows_follow_plan_order() {
        let p = plan("alpha = 0.2, 0.3, 0.4\nbeta = 0.3\ngamma = 0.05\nstrategies = full, s12, s13\nrepetitions = 2").unwrap();
        let rows = p.sweep("ex", &running_example()).unwrap();
        assert_eq!(rows.len(), 3 * 3 * 2);
        assert_eq!(rows[0].thresholds.alpha, 0.2);
        assert_eq!(rows[0].strategy, StrategySet::FULL);
        assert_eq!((rows[1].rep, rows[2].strategy), (2, StrategySet::S12));
        assert_eq!(rows[17].thresholds.alpha, 0.4);
        for point in rows.chunks(6) {
            assert!(point.iter().all(|r| r.patterns == point[0].patterns));
        }
    }
}
