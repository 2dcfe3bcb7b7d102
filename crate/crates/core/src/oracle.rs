//! Brute-force miner: enumerate every itemset, measure it directly, keep the
//! ones that clear all three thresholds.

use crate::error::{Error, Result};
use crate::measures::{probability, support_count, utility_occupancy};
use crate::model::{at_least, ItemId, Pattern, PhuopRecord, Thresholds, UncertainDatabase};

/// Itemsets examined before [`oracle_mine`] gives up.
pub const DEFAULT_BUDGET: u64 = 1 << 22;

pub fn oracle_mine(
    db: &UncertainDatabase,
    th: &Thresholds,
    max_len: usize,
) -> Result<Vec<PhuopRecord>> {
    oracle_mine_with_budget(db, th, max_len, DEFAULT_BUDGET)
}

/// Records sorted by pattern. Fails with [`Error::BudgetExceeded`] as soon as
/// more than `budget` itemsets would have to be examined.
pub fn oracle_mine_with_budget(
    db: &UncertainDatabase,
    th: &Thresholds,
    max_len: usize,
    budget: u64,
) -> Result<Vec<PhuopRecord>> {
    th.check()?;
    if max_len == 0 {
        return Err(Error::InvalidArgument("max_len must be at least 1".into()));
    }
    let n = db.len();
    let min_sup = th.min_support_count(n);
    let min_pro = th.min_probability(n);
    let items: Vec<ItemId> = db.item_ids().collect();

    let mut examined = 0u64;
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::with_capacity(max_len);
    // Lexicographic walk over index combinations.
    let mut next = 0usize;
    loop {
        if next < items.len() && stack.len() < max_len {
            stack.push(next);
            next += 1;
            examined += 1;
            if examined > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            let x = Pattern::new(stack.iter().map(|&k| items[k]))?;
            let sup = support_count(&x, db)?;
            if sup >= min_sup && sup > 0 {
                let pro = probability(&x, db)?;
                let uo = utility_occupancy(&x, db)?;
                if at_least(pro, min_pro) && at_least(uo, th.beta) {
                    out.push(PhuopRecord {
                        pattern: x,
                        support: sup,
                        probability: pro,
                        utility_occupancy: uo,
                    });
                }
            }
        } else {
            match stack.pop() {
                Some(k) => next = k + 1,
                None => break,
            }
        }
    }
    out.sort_by(|a, b| a.pattern.cmp(&b.pattern));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::running_example;

    #[test]
    fn high_support_run_finds_only_c() {
        let db = running_example();
        let th = Thresholds::new(0.8, 0.6, 0.3).unwrap();
        let got = oracle_mine(&db, &th, 5).unwrap();
        assert_eq!(got.len(), 1);
        let r = &got[0];
        assert_eq!(db.pattern_labels(&r.pattern), ["c"]);
        assert_eq!(r.support, 8);
        assert!((r.probability - 5.4).abs() < 1e-9);
        assert!((r.utility_occupancy - 0.6468).abs() < 1e-4);
    }

    #[test]
    fn full_support_requirement_finds_nothing() {
        let db = running_example();
        for (beta, gamma) in [(0.1, 0.0), (0.5, 0.5), (1.0, 1.0)] {
            let th = Thresholds::new(1.0, beta, gamma).unwrap();
            assert!(oracle_mine(&db, &th, 5).unwrap().is_empty());
        }
    }

    #[test]
    fn b_is_not_a_phuop_at_low_thresholds() {
        let db = running_example();
        let th = Thresholds::new(0.3, 0.3, 0.05).unwrap();
        let got = oracle_mine(&db, &th, 5).unwrap();
        let b = db.pattern(["b"]).unwrap();
        assert!(!got.iter().any(|r| r.pattern == b));
        assert!(got
            .iter()
            .any(|r| r.pattern == db.pattern(["b", "c"]).unwrap()));
    }

    #[test]
    fn max_len_limits_pattern_size() {
        let db = running_example();
        let th = Thresholds::new(0.1, 0.1, 0.0).unwrap();
        let got = oracle_mine(&db, &th, 1).unwrap();
        assert!(!got.is_empty());
        assert!(got.iter().all(|r| r.pattern.len() == 1));
    }

    #[test]
    fn budget_is_enforced() {
        let db = running_example();
        let th = Thresholds::new(0.1, 0.1, 0.0).unwrap();
        // 31 non-empty itemsets over five items.
        assert!(oracle_mine_with_budget(&db, &th, 5, 31).is_ok());
        assert!(matches!(
            oracle_mine_with_budget(&db, &th, 5, 30),
            Err(Error::BudgetExceeded { budget: 30 })
        ));
    }
}
