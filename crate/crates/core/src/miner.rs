//! Depth-first search of the support-ordered set-enumeration tree.
//!
//! Items passing the 1-item filters are ranked by ascending support, their
//! PUO-lists are built in one pass, and every deeper node is produced by
//! joining two siblings. Four independent pruning switches control how much
//! of the tree is materialized; none of them changes the result set, because
//! a pattern is only emitted after passing all three thresholds.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::measures::{total_order, TotalOrder};
use crate::model::{
    at_least, validate_database, MiningStats, Pattern, PhuopRecord, Thresholds, UncertainDatabase,
    EPSILON,
};
use crate::puo::{build_single_lists, construct, PuoList, PuoNode};

/// Which pruning strategies the search applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StrategySet {
    /// Drop nodes (and their subtrees) below the minimum support count.
    pub support: bool,
    /// Skip a node's subtree when its utility-occupancy upper bound is below
    /// beta.
    pub uo_upper_bound: bool,
    /// Drop nodes (and their subtrees) below the minimum probability.
    pub probability: bool,
    /// Abandon a join once the remaining entries cannot reach the minimum
    /// support count.
    pub join_abort: bool,
}

impl StrategySet {
    pub const FULL: StrategySet = StrategySet {
        support: true,
        uo_upper_bound: true,
        probability: true,
        join_abort: true,
    };
    pub const S12: StrategySet = StrategySet {
        support: true,
        uo_upper_bound: true,
        probability: false,
        join_abort: false,
    };
    pub const S13: StrategySet = StrategySet {
        support: true,
        uo_upper_bound: false,
        probability: true,
        join_abort: false,
    };
    pub const S1: StrategySet = StrategySet {
        support: true,
        uo_upper_bound: false,
        probability: false,
        join_abort: false,
    };

    pub const PRESETS: [(&'static str, StrategySet); 4] = [
        ("full", Self::FULL),
        ("s12", Self::S12),
        ("s13", Self::S13),
        ("s1", Self::S1),
    ];

    pub fn preset_name(&self) -> Option<&'static str> {
        Self::PRESETS
            .iter()
            .find(|(_, s)| s == self)
            .map(|(n, _)| *n)
    }
}

impl Default for StrategySet {
    fn default() -> Self {
        Self::FULL
    }
}

impl FromStr for StrategySet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Self::PRESETS
            .iter()
            .find(|(n, _)| *n == key)
            .map(|(_, set)| *set)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown strategy preset '{s}' (expected full, s12, s13 or s1)"
                ))
            })
    }
}

impl fmt::Display for StrategySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = self.preset_name() {
            return f.write_str(name);
        }
        let flags = [
            (self.support, '1'),
            (self.uo_upper_bound, '2'),
            (self.probability, '3'),
            (self.join_abort, '4'),
        ];
        f.write_str("s")?;
        for (on, c) in flags {
            if on {
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MiningOutcome {
    /// Sorted by pattern.
    pub phuops: Vec<PhuopRecord>,
    pub stats: MiningStats,
}

/// Absolute thresholds for one database plus the active strategies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchParams {
    pub min_support: usize,
    pub min_probability: f64,
    pub beta: f64,
    pub strategies: StrategySet,
}

impl SearchParams {
    pub fn new(th: &Thresholds, num_transactions: usize, strategies: StrategySet) -> Self {
        SearchParams {
            min_support: th.min_support_count(num_transactions),
            min_probability: th.min_probability(num_transactions),
            beta: th.beta,
            strategies,
        }
    }
}

/// What the search did with one node.
#[derive(Debug)]
pub struct NodeVisit<'a> {
    pub node: &'a PuoNode,
    /// `None` when the node was cut by the support or probability gate before
    /// its bound was computed.
    pub upper_bound: Option<f64>,
    /// Whether the search tried to extend the node.
    pub expanded: bool,
}

/// Hook into the traversal, used by tests that inspect every node.
pub trait SearchObserver {
    fn visit(&mut self, visit: &NodeVisit<'_>);
}

impl SearchObserver for () {
    #[inline]
    fn visit(&mut self, _: &NodeVisit<'_>) {}
}

impl<F: FnMut(&NodeVisit<'_>)> SearchObserver for F {
    fn visit(&mut self, visit: &NodeVisit<'_>) {
        self(visit)
    }
}

/// Mean of the `min_support` largest `uo + ruo` values of the list; shorter
/// lists still divide by `min_support`.
///
/// No extension of the list's pattern that reaches `min_support` can have a
/// higher utility occupancy.
pub fn upper_bound(list: &PuoList, min_support: usize) -> f64 {
    let mut scratch = Vec::new();
    upper_bound_with(list, min_support, &mut scratch)
}

fn upper_bound_with(list: &PuoList, min_support: usize, scratch: &mut Vec<f64>) -> f64 {
    let k = min_support.max(1);
    if list.entries.is_empty() {
        return 0.0;
    }
    scratch.clear();
    scratch.extend(list.entries.iter().map(|e| e.uo + e.ruo));
    if k < scratch.len() {
        scratch.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
        scratch.truncate(k);
    }
    scratch.iter().sum::<f64>() / k as f64
}

/// Mines every potential high utility-occupancy pattern of `db`.
pub fn mine(
    db: &UncertainDatabase,
    th: &Thresholds,
    strategies: StrategySet,
) -> Result<MiningOutcome> {
    mine_observed(db, th, strategies, &mut ())
}

pub fn mine_observed<O: SearchObserver>(
    db: &UncertainDatabase,
    th: &Thresholds,
    strategies: StrategySet,
    observer: &mut O,
) -> Result<MiningOutcome> {
    th.check()?;
    let violations = validate_database(db);
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    let start = Instant::now();
    let params = SearchParams::new(th, db.len(), strategies);
    let order = promising_order(db, &params);
    let singles = build_single_lists(db, &order)?;

    let mut outcome = MiningOutcome::default();
    outcome.stats.constructed_lists = singles.len() as u64;
    let mut search = Search {
        params,
        outcome: &mut outcome,
        observer,
        scratch: Vec::new(),
    };
    search.run(None, &singles)?;

    outcome.phuops.sort_by(|a, b| a.pattern.cmp(&b.pattern));
    outcome.stats.patterns_found = outcome.phuops.len() as u64;
    outcome.stats.elapsed = start.elapsed();
    Ok(outcome)
}

/// Ranks the 1-items the search starts from. The support filter follows
/// strategy 1 and the probability filter strategy 3; filtered-out items keep
/// counting towards `tu` but never towards remaining occupancy.
pub fn promising_order(db: &UncertainDatabase, params: &SearchParams) -> TotalOrder {
    let mut support = vec![0usize; db.num_items()];
    let mut probability = vec![0.0f64; db.num_items()];
    for t in db.transactions() {
        for o in &t.occurrences {
            support[o.item.index()] += 1;
            probability[o.item.index()] += o.probability;
        }
    }
    let s = params.strategies;
    let promising = db.item_ids().filter(|i| {
        let sup = support[i.index()];
        sup > 0
            && (!s.support || sup >= params.min_support)
            && (!s.probability || at_least(probability[i.index()], params.min_probability))
    });
    total_order(db, promising)
}

/// Explores the subtrees of `extensions`, all children of `prefix`, adding
/// every pattern found and the work done to `acc`.
pub fn phuop_search(
    prefix: Option<&PuoList>,
    extensions: &[PuoNode],
    params: &SearchParams,
    acc: &mut MiningOutcome,
) -> Result<()> {
    Search {
        params: *params,
        outcome: acc,
        observer: &mut (),
        scratch: Vec::new(),
    }
    .run(prefix, extensions)
}

struct Search<'a, O> {
    params: SearchParams,
    outcome: &'a mut MiningOutcome,
    observer: &'a mut O,
    scratch: Vec<f64>,
}

impl<O: SearchObserver> Search<'_, O> {
    fn run(&mut self, prefix: Option<&PuoList>, extensions: &[PuoNode]) -> Result<()> {
        let p = self.params;
        let s = p.strategies;
        for (idx, xa) in extensions.iter().enumerate() {
            self.outcome.stats.visited_nodes += 1;
            let table = &xa.table;
            let support_ok = table.sup >= p.min_support;
            let probability_ok = at_least(table.pro, p.min_probability);
            if (s.support && !support_ok) || (s.probability && !probability_ok) {
                self.observer.visit(&NodeVisit {
                    node: xa,
                    upper_bound: None,
                    expanded: false,
                });
                continue;
            }

            if support_ok && probability_ok && at_least(table.uo, p.beta) {
                self.outcome.phuops.push(PhuopRecord {
                    pattern: Pattern::new(xa.items().iter().copied())?,
                    support: table.sup,
                    probability: table.pro,
                    utility_occupancy: table.uo,
                });
            }

            let bound = upper_bound_with(&xa.list, p.min_support, &mut self.scratch);
            let expand = !(s.uo_upper_bound && bound < p.beta - EPSILON);
            self.observer.visit(&NodeVisit {
                node: xa,
                upper_bound: Some(bound),
                expanded: expand,
            });
            if !expand {
                continue;
            }

            let mut children = Vec::new();
            for xb in &extensions[idx + 1..] {
                self.outcome.stats.candidate_joins += 1;
                let Some(child) = construct(prefix, xa, xb, p.min_support, s.join_abort)? else {
                    continue;
                };
                self.outcome.stats.constructed_lists += 1;
                let t = &child.table;
                if t.sup == 0
                    || (s.support && t.sup < p.min_support)
                    || (s.probability && !at_least(t.pro, p.min_probability))
                {
                    continue;
                }
                children.push(child);
            }
            if !children.is_empty() {
                self.run(Some(&xa.list), &children)?;
            }
        }
        Ok(())
    }
}
