//! Pattern measures computed straight from the database.
//!
//! Everything here scans transactions directly and never touches PUO-lists,
//! which is what makes it usable as ground truth for the miner.

use crate::error::{Error, Result};
use crate::model::{ItemId, Pattern, Transaction, UncertainDatabase};

fn non_empty(x: &Pattern) -> Result<()> {
    if x.is_empty() {
        Err(Error::InvalidArgument("empty pattern".into()))
    } else {
        Ok(())
    }
}

fn contains_all(t: &Transaction, x: &Pattern) -> bool {
    x.items().iter().all(|&i| t.contains(i))
}

/// Transactions containing every item of `x`.
pub fn supporting_transactions<'a>(
    x: &'a Pattern,
    db: &'a UncertainDatabase,
) -> impl Iterator<Item = &'a Transaction> + 'a {
    db.transactions().iter().filter(move |t| contains_all(t, x))
}

/// `u(X, T)`; `None` when `t` does not contain `x`.
pub fn utility_in(x: &Pattern, t: &Transaction, db: &UncertainDatabase) -> Result<Option<f64>> {
    let mut total = 0.0;
    for &i in x.items() {
        match t.find(i) {
            Some(o) => total += db.unit_utility(i)? * f64::from(o.quantity),
            None => return Ok(None),
        }
    }
    Ok(Some(total))
}

/// `p(X, T)`, the product of member probabilities.
pub fn probability_in(x: &Pattern, t: &Transaction) -> Option<f64> {
    x.items()
        .iter()
        .try_fold(1.0, |acc, &i| t.find(i).map(|o| acc * o.probability))
}

pub fn support_count(x: &Pattern, db: &UncertainDatabase) -> Result<usize> {
    non_empty(x)?;
    Ok(supporting_transactions(x, db).count())
}

pub fn utility(x: &Pattern, db: &UncertainDatabase) -> Result<f64> {
    non_empty(x)?;
    let mut total = 0.0;
    for t in db.transactions() {
        if let Some(u) = utility_in(x, t, db)? {
            total += u;
        }
    }
    Ok(total)
}

/// Mean of `u(X,T)/tu(T)` over the supporting transactions.
pub fn utility_occupancy(x: &Pattern, db: &UncertainDatabase) -> Result<f64> {
    non_empty(x)?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for t in db.transactions() {
        if let Some(u) = utility_in(x, t, db)? {
            sum += u / t.tu;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::UndefinedMeasure(
            "utility occupancy of a pattern with no supporting transaction".into(),
        ));
    }
    Ok(sum / count as f64)
}

pub fn probability(x: &Pattern, db: &UncertainDatabase) -> Result<f64> {
    non_empty(x)?;
    Ok(db
        .transactions()
        .iter()
        .filter_map(|t| probability_in(x, t))
        .sum())
}

/// Rank of every mined item under the support-ascending order, ties broken
/// by ascending item id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalOrder {
    rank: Vec<Option<u32>>,
    ordered: Vec<ItemId>,
}

impl TotalOrder {
    pub fn rank(&self, item: ItemId) -> Option<u32> {
        self.rank.get(item.index()).copied().flatten()
    }

    /// Ranked items, lowest rank first.
    pub fn ordered_items(&self) -> &[ItemId] {
        &self.ordered
    }

    pub fn len(&self) -> usize {
        self.ordered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }

    /// Items of `x` sorted by rank; unranked items go last in id order.
    pub fn sort_pattern(&self, x: &Pattern) -> Vec<ItemId> {
        let mut v = x.items().to_vec();
        v.sort_by_key(|&i| (self.rank(i).unwrap_or(u32::MAX), i));
        v
    }
}

/// Ranks `promising` by ascending support count, ties by ascending item id.
pub fn total_order(
    db: &UncertainDatabase,
    promising: impl IntoIterator<Item = ItemId>,
) -> TotalOrder {
    let mut support = vec![0usize; db.num_items()];
    for t in db.transactions() {
        for o in &t.occurrences {
            support[o.item.index()] += 1;
        }
    }
    let mut ordered: Vec<ItemId> = promising.into_iter().collect();
    ordered.sort_unstable_by_key(|&i| (support[i.index()], i));
    ordered.dedup();
    let mut rank = vec![None; db.num_items()];
    for (r, &i) in ordered.iter().enumerate() {
        rank[i.index()] = Some(r as u32);
    }
    TotalOrder { rank, ordered }
}

/// Sum of `uo(i, T)` over the ranked items of transaction `tid` that come
/// after every item of `x`.
pub fn remaining_utility_occupancy(
    x: &Pattern,
    tid: u32,
    db: &UncertainDatabase,
    order: &TotalOrder,
) -> Result<f64> {
    non_empty(x)?;
    let t = db
        .transaction(tid)
        .ok_or_else(|| Error::InvalidArgument(format!("no transaction T{tid}")))?;
    if !contains_all(t, x) {
        return Err(Error::InvalidArgument(format!(
            "pattern is not contained in T{tid}"
        )));
    }
    let mut last = 0u32;
    for &i in x.items() {
        let r = order
            .rank(i)
            .ok_or_else(|| Error::InvalidArgument(format!("item '{}' has no rank", db.item(i))))?;
        last = last.max(r);
    }
    let mut ruo = 0.0;
    for o in &t.occurrences {
        if order.rank(o.item).is_some_and(|r| r > last) {
            ruo += db.unit_utility(o.item)? * f64::from(o.quantity) / t.tu;
        }
    }
    Ok(ruo)
}
