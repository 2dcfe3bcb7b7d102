//! The uncertain quantitative database and the records shared by the miner,
//! the oracle and the I/O layer.
//!
//! Items are interned: the database keeps its item universe sorted by
//! [`Item`] order and every occurrence refers to an [`ItemId`] index into it,
//! so comparing ids is the same as comparing item labels.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use crate::error::{Error, Result};

/// Slack used for every floating-point threshold comparison.
pub const EPSILON: f64 = 1e-9;

/// `x >= threshold` up to [`EPSILON`].
#[inline]
pub fn at_least(x: f64, threshold: f64) -> bool {
    x >= threshold - EPSILON
}

/// An item label.
///
/// Labels made only of ASCII digits sort numerically and before every other
/// label; the rest sort lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Item(String);

impl Item {
    pub fn new(label: impl Into<String>) -> Self {
        Item(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn numeric_key(&self) -> Option<&str> {
        if !self.0.is_empty() && self.0.bytes().all(|b| b.is_ascii_digit()) {
            let trimmed = self.0.trim_start_matches('0');
            Some(if trimmed.is_empty() { "0" } else { trimmed })
        } else {
            None
        }
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.numeric_key(), other.numeric_key()) {
            (Some(a), Some(b)) => a
                .len()
                .cmp(&b.len())
                .then_with(|| a.cmp(b))
                .then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for Item {
    fn from(s: &str) -> Self {
        Item(s.to_owned())
    }
}

/// Index of an item in its database's sorted item universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl ItemId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Unit utility of every item.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UtilityTable {
    entries: BTreeMap<Item, f64>,
}

impl UtilityTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the previous value if the item was already present.
    pub fn insert(&mut self, item: impl Into<Item>, unit_utility: f64) -> Option<f64> {
        self.entries.insert(item.into(), unit_utility)
    }

    pub fn get(&self, item: &Item) -> Option<f64> {
        self.entries.get(item).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in item order.
    pub fn iter(&self) -> impl Iterator<Item = (&Item, f64)> {
        self.entries.iter().map(|(k, v)| (k, *v))
    }
}

impl<I: Into<Item>> FromIterator<(I, f64)> for UtilityTable {
    fn from_iter<T: IntoIterator<Item = (I, f64)>>(iter: T) -> Self {
        UtilityTable {
            entries: iter.into_iter().map(|(i, u)| (i.into(), u)).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ItemOccurrence {
    pub item: ItemId,
    pub quantity: u32,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transaction {
    /// 1-based position in the database.
    pub tid: u32,
    /// Sorted by item id.
    pub occurrences: Vec<ItemOccurrence>,
    /// Transaction utility over all occurrences.
    pub tu: f64,
}

impl Transaction {
    pub fn len(&self) -> usize {
        self.occurrences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occurrences.is_empty()
    }

    pub fn find(&self, item: ItemId) -> Option<&ItemOccurrence> {
        self.occurrences
            .binary_search_by_key(&item, |o| o.item)
            .ok()
            .map(|i| &self.occurrences[i])
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.find(item).is_some()
    }
}

/// An uncertain quantitative transaction database.
///
/// Nothing is checked on construction; call [`validate_database`] (parsers
/// and the miner do) before relying on the invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertainDatabase {
    items: Vec<Item>,
    unit_utilities: Vec<Option<f64>>,
    utility_table: UtilityTable,
    transactions: Vec<Transaction>,
}

impl UncertainDatabase {
    /// Assembles a database from already interned parts. `items` must be
    /// sorted and every occurrence must index into it.
    pub fn from_parts(
        items: Vec<Item>,
        utility_table: UtilityTable,
        transactions: Vec<Transaction>,
    ) -> Self {
        let unit_utilities = items.iter().map(|i| utility_table.get(i)).collect();
        UncertainDatabase {
            items,
            unit_utilities,
            utility_table,
            transactions,
        }
    }

    pub fn empty(utility_table: UtilityTable) -> Self {
        Self::from_parts(Vec::new(), utility_table, Vec::new())
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    /// Transaction by 1-based tid.
    pub fn transaction(&self, tid: u32) -> Option<&Transaction> {
        let idx = (tid as usize).checked_sub(1)?;
        self.transactions.get(idx).filter(|t| t.tid == tid)
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// Items that occur in at least one transaction, sorted.
    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn item(&self, id: ItemId) -> &Item {
        &self.items[id.index()]
    }

    pub fn item_ids(&self) -> impl Iterator<Item = ItemId> + '_ {
        (0..self.items.len() as u32).map(ItemId)
    }

    pub fn item_id(&self, label: &str) -> Option<ItemId> {
        let key = Item::new(label);
        self.items
            .binary_search(&key)
            .ok()
            .map(|i| ItemId(i as u32))
    }

    pub fn utility_table(&self) -> &UtilityTable {
        &self.utility_table
    }

    pub fn unit_utility(&self, id: ItemId) -> Result<f64> {
        self.unit_utilities[id.index()].ok_or_else(|| Error::MissingUtility {
            item: self.item(id).to_string(),
            line: None,
        })
    }

    /// Builds a pattern from item labels.
    pub fn pattern<S: AsRef<str>>(&self, labels: impl IntoIterator<Item = S>) -> Result<Pattern> {
        let ids = labels
            .into_iter()
            .map(|l| {
                let l = l.as_ref();
                self.item_id(l)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown item '{l}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Pattern::new(ids)
    }

    pub fn pattern_labels(&self, pattern: &Pattern) -> Vec<&str> {
        pattern
            .items()
            .iter()
            .map(|&i| self.item(i).as_str())
            .collect()
    }

    pub fn stats(&self) -> DatabaseStats {
        let lengths = self.transactions.iter().map(Transaction::len);
        let total_len: usize = lengths.clone().sum();
        let n = self.len();
        let avg = if n == 0 {
            0.0
        } else {
            total_len as f64 / n as f64
        };
        DatabaseStats {
            num_transactions: n,
            num_items: self.num_items(),
            min_length: lengths.clone().min().unwrap_or(0),
            avg_length: avg,
            max_length: lengths.max().unwrap_or(0),
            total_utility: self.transactions.iter().map(|t| t.tu).sum(),
            density: if self.num_items() == 0 {
                0.0
            } else {
                avg / self.num_items() as f64
            },
        }
    }
}

/// Incrementally collects labelled transactions and interns them into an
/// [`UncertainDatabase`].
#[derive(Debug, Default)]
pub struct DatabaseBuilder {
    utility_table: UtilityTable,
    rows: Vec<Vec<(Item, u32, f64)>>,
}

impl DatabaseBuilder {
    pub fn new(utility_table: UtilityTable) -> Self {
        DatabaseBuilder {
            utility_table,
            rows: Vec::new(),
        }
    }

    pub fn push<I: Into<Item>>(&mut self, occurrences: impl IntoIterator<Item = (I, u32, f64)>) {
        self.rows.push(
            occurrences
                .into_iter()
                .map(|(i, q, p)| (i.into(), q, p))
                .collect(),
        );
    }

    /// Interns items and computes every transaction utility. Items without a
    /// unit utility contribute nothing to `tu`; validation reports them.
    pub fn build(self) -> UncertainDatabase {
        let mut items: Vec<Item> = self
            .rows
            .iter()
            .flat_map(|r| r.iter().map(|(i, _, _)| i.clone()))
            .collect();
        items.sort();
        items.dedup();

        let lookup = |item: &Item| ItemId(items.binary_search(item).unwrap() as u32);
        let unit: Vec<f64> = items
            .iter()
            .map(|i| self.utility_table.get(i).unwrap_or(0.0))
            .collect();
        let transactions = self
            .rows
            .iter()
            .enumerate()
            .map(|(idx, row)| {
                let mut occurrences: Vec<ItemOccurrence> = row
                    .iter()
                    .map(|(item, quantity, probability)| ItemOccurrence {
                        item: lookup(item),
                        quantity: *quantity,
                        probability: *probability,
                    })
                    .collect();
                occurrences.sort_by_key(|o| o.item);
                let tu = occurrences
                    .iter()
                    .map(|o| unit[o.item.index()] * f64::from(o.quantity))
                    .sum();
                Transaction {
                    tid: idx as u32 + 1,
                    occurrences,
                    tu,
                }
            })
            .collect();
        UncertainDatabase::from_parts(items, self.utility_table, transactions)
    }
}

/// An invariant violation found by [`validate_database`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    ProbabilityOutOfRange {
        tid: u32,
        item: String,
        probability: f64,
    },
    ZeroQuantity {
        tid: u32,
        item: String,
    },
    MissingUtility {
        tid: u32,
        item: String,
    },
    NegativeUtility {
        item: String,
        unit_utility: f64,
    },
    DuplicateItem {
        tid: u32,
        item: String,
    },
    TuMismatch {
        tid: u32,
        stored: f64,
        recomputed: f64,
    },
    NonPositiveTu {
        tid: u32,
        tu: f64,
    },
    TidOutOfSequence {
        position: usize,
        tid: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ProbabilityOutOfRange {
                tid,
                item,
                probability,
            } => write!(
                f,
                "T{tid}: probability {probability} of item '{item}' outside (0, 1]"
            ),
            Violation::ZeroQuantity { tid, item } => {
                write!(f, "T{tid}: item '{item}' has quantity 0")
            }
            Violation::MissingUtility { tid, item } => {
                write!(f, "T{tid}: item '{item}' has no unit utility")
            }
            Violation::NegativeUtility { item, unit_utility } => {
                write!(f, "item '{item}' has negative unit utility {unit_utility}")
            }
            Violation::DuplicateItem { tid, item } => {
                write!(f, "T{tid}: item '{item}' occurs more than once")
            }
            Violation::TuMismatch {
                tid,
                stored,
                recomputed,
            } => write!(
                f,
                "T{tid}: stored tu {stored} but occurrences sum to {recomputed}"
            ),
            Violation::NonPositiveTu { tid, tu } => write!(f, "T{tid}: tu {tu} is not positive"),
            Violation::TidOutOfSequence { position, tid } => {
                write!(f, "transaction at position {position} has tid {tid}")
            }
        }
    }
}

/// Lists every invariant violation of `db`; an empty list means valid.
pub fn validate_database(db: &UncertainDatabase) -> Vec<Violation> {
    let mut out = Vec::new();
    for (item, unit_utility) in db.utility_table.iter() {
        if !(unit_utility >= 0.0 && unit_utility.is_finite()) {
            out.push(Violation::NegativeUtility {
                item: item.to_string(),
                unit_utility,
            });
        }
    }
    for (pos, t) in db.transactions.iter().enumerate() {
        let tid = t.tid;
        if tid as usize != pos + 1 {
            out.push(Violation::TidOutOfSequence {
                position: pos + 1,
                tid,
            });
        }
        let mut recomputed = 0.0;
        let mut previous: Option<ItemId> = None;
        for o in &t.occurrences {
            let item = || db.item(o.item).to_string();
            if previous == Some(o.item) {
                out.push(Violation::DuplicateItem { tid, item: item() });
            }
            previous = Some(o.item);
            if !(o.probability > 0.0 && o.probability <= 1.0) {
                out.push(Violation::ProbabilityOutOfRange {
                    tid,
                    item: item(),
                    probability: o.probability,
                });
            }
            if o.quantity == 0 {
                out.push(Violation::ZeroQuantity { tid, item: item() });
            }
            match db.unit_utilities[o.item.index()] {
                Some(u) => recomputed += u * f64::from(o.quantity),
                None => out.push(Violation::MissingUtility { tid, item: item() }),
            }
        }
        if (recomputed - t.tu).abs() > EPSILON {
            out.push(Violation::TuMismatch {
                tid,
                stored: t.tu,
                recomputed,
            });
        }
        if t.tu.is_nan() || t.tu <= 0.0 {
            out.push(Violation::NonPositiveTu { tid, tu: t.tu });
        }
    }
    out
}

/// Minimum support fraction, minimum average utility occupancy and minimum
/// probability fraction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Thresholds {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let th = Thresholds { alpha, beta, gamma };
        th.check()?;
        Ok(th)
    }

    pub fn check(&self) -> Result<()> {
        let in_range = |name: &str, v: f64, lo_open: bool| {
            let ok = if lo_open { v > 0.0 } else { v >= 0.0 } && v <= 1.0;
            if ok {
                Ok(())
            } else {
                let lo = if lo_open { "(0" } else { "[0" };
                Err(Error::InvalidArgument(format!(
                    "{name} = {v} is outside {lo}, 1]"
                )))
            }
        };
        in_range("alpha", self.alpha, true)?;
        in_range("beta", self.beta, true)?;
        in_range("gamma", self.gamma, false)
    }

    /// `ceil(alpha * n)`, at least 1.
    pub fn min_support_count(&self, n: usize) -> usize {
        let raw = (self.alpha * n as f64 - EPSILON).ceil();
        (raw.max(1.0)) as usize
    }

    /// `gamma * n`.
    pub fn min_probability(&self, n: usize) -> f64 {
        self.gamma * n as f64
    }
}

/// A non-empty itemset, stored sorted by item id so that equality and
/// hashing ignore insertion order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern(Vec<ItemId>);

impl Pattern {
    pub fn new(items: impl IntoIterator<Item = ItemId>) -> Result<Self> {
        let mut items: Vec<ItemId> = items.into_iter().collect();
        if items.is_empty() {
            return Err(Error::InvalidArgument("empty pattern".into()));
        }
        items.sort_unstable();
        if items.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate item in pattern".into()));
        }
        Ok(Pattern(items))
    }

    pub fn items(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub fn is_subset_of(&self, other: &Pattern) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }
}

/// One discovered potential high utility-occupancy pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct PhuopRecord {
    pub pattern: Pattern,
    pub support: usize,
    pub probability: f64,
    pub utility_occupancy: f64,
}

/// Search instrumentation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MiningStats {
    /// Nodes whose summary table was read by the search, 1-itemsets included.
    pub visited_nodes: u64,
    /// PUO-lists materialized, single-item lists included.
    pub constructed_lists: u64,
    /// Join attempts, including those abandoned early.
    pub candidate_joins: u64,
    pub patterns_found: u64,
    pub elapsed: Duration,
}

impl MiningStats {
    pub fn merge(&mut self, other: &MiningStats) {
        self.visited_nodes += other.visited_nodes;
        self.constructed_lists += other.constructed_lists;
        self.candidate_joins += other.candidate_joins;
        self.patterns_found += other.patterns_found;
        self.elapsed += other.elapsed;
    }
}

/// Shape summary of a database.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatabaseStats {
    pub num_transactions: usize,
    pub num_items: usize,
    pub min_length: usize,
    pub avg_length: f64,
    pub max_length: usize,
    pub total_utility: f64,
    pub density: f64,
}
