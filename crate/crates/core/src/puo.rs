//! PUO-lists and PFU-tables.
//!
//! A PUO-list holds one `(tid, pro, uo, ruo)` entry per supporting
//! transaction, sorted by tid. Single-item lists come from one database pass;
//! longer patterns are produced by merging two sibling lists that share a
//! prefix, so the database is never scanned again.

use crate::error::{Error, Result};
use crate::measures::TotalOrder;
use crate::model::{ItemId, Pattern, UncertainDatabase};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PuoEntry {
    pub tid: u32,
    pub pro: f64,
    pub uo: f64,
    pub ruo: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PuoList {
    /// Pattern items in mining order.
    pub items: Vec<ItemId>,
    /// Strictly increasing tids.
    pub entries: Vec<PuoEntry>,
}

impl PuoList {
    pub fn pattern(&self) -> Pattern {
        Pattern::new(self.items.iter().copied()).expect("PUO-list of an empty pattern")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Summary of a PUO-list: support, summed probability, mean uo, mean ruo.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PfuTable {
    pub sup: usize,
    pub pro: f64,
    pub uo: f64,
    pub ruo: f64,
}

impl PfuTable {
    pub fn from_entries(entries: &[PuoEntry]) -> Self {
        let mut acc = Accumulator::default();
        for e in entries {
            acc.add(e);
        }
        acc.finish()
    }
}

#[derive(Default)]
struct Accumulator {
    sup: usize,
    pro: f64,
    uo: f64,
    ruo: f64,
}

impl Accumulator {
    #[inline]
    fn add(&mut self, e: &PuoEntry) {
        self.sup += 1;
        self.pro += e.pro;
        self.uo += e.uo;
        self.ruo += e.ruo;
    }

    fn finish(self) -> PfuTable {
        let n = self.sup.max(1) as f64;
        PfuTable {
            sup: self.sup,
            pro: self.pro,
            uo: self.uo / n,
            ruo: self.ruo / n,
        }
    }
}

/// A search-tree node: a PUO-list with its PFU-table.
#[derive(Clone, Debug, PartialEq)]
pub struct PuoNode {
    pub list: PuoList,
    pub table: PfuTable,
}

impl PuoNode {
    pub fn items(&self) -> &[ItemId] {
        &self.list.items
    }

    /// The item this node adds to its parent.
    pub fn last_item(&self) -> ItemId {
        *self.list.items.last().expect("node without items")
    }
}

/// Builds the single-item nodes for every item ranked by `order`, returned in
/// rank order.
///
/// `uo` is relative to the full transaction utility; `ruo` only counts ranked
/// items, so unranked items inflate `tu` but never the remaining occupancy.
pub fn build_single_lists(db: &UncertainDatabase, order: &TotalOrder) -> Result<Vec<PuoNode>> {
    let ranked = order.ordered_items();
    let mut lists: Vec<Vec<PuoEntry>> = vec![Vec::new(); ranked.len()];
    let mut row: Vec<(u32, f64, f64)> = Vec::new();
    for t in db.transactions() {
        row.clear();
        for o in &t.occurrences {
            if let Some(rank) = order.rank(o.item) {
                let uo = db.unit_utility(o.item)? * f64::from(o.quantity) / t.tu;
                row.push((rank, o.probability, uo));
            }
        }
        row.sort_unstable_by_key(|r| std::cmp::Reverse(r.0));
        let mut suffix = 0.0;
        for &(rank, pro, uo) in &row {
            lists[rank as usize].push(PuoEntry {
                tid: t.tid,
                pro,
                uo,
                ruo: suffix,
            });
            suffix += uo;
        }
    }
    Ok(ranked
        .iter()
        .zip(lists)
        .map(|(&item, entries)| PuoNode {
            table: PfuTable::from_entries(&entries),
            list: PuoList {
                items: vec![item],
                entries,
            },
        })
        .collect())
}

/// Joins two sibling extensions `Xa`, `Xb` of `prefix` into `Xab`.
///
/// With `early_abort`, gives up and returns `None` once too many entries of
/// `Xa` have failed to match for `Xab` to reach `min_support`.
pub fn construct(
    prefix: Option<&PuoList>,
    a: &PuoNode,
    b: &PuoNode,
    min_support: usize,
    early_abort: bool,
) -> Result<Option<PuoNode>> {
    let depth = a.items().len();
    let shared = depth - 1;
    if b.items().len() != depth
        || a.items()[..shared] != b.items()[..shared]
        || prefix.map_or(shared, |p| p.items.len()) != shared
        || prefix.is_some_and(|p| p.items[..] != a.items()[..shared])
    {
        return Err(Error::InvalidArgument(
            "construct needs two extensions of the same prefix".into(),
        ));
    }

    let mut sup_bound = a.table.sup;
    let mut entries = Vec::with_capacity(a.list.len().min(b.list.len()));
    let mut acc = Accumulator::default();
    let eb_all = &b.list.entries;
    let mut j = 0;
    let mut k = 0;
    for ea in &a.list.entries {
        while j < eb_all.len() && eb_all[j].tid < ea.tid {
            j += 1;
        }
        if j < eb_all.len() && eb_all[j].tid == ea.tid {
            let eb = &eb_all[j];
            let joined = match prefix {
                Some(p) => {
                    let pe = &p.entries;
                    while k < pe.len() && pe[k].tid < ea.tid {
                        k += 1;
                    }
                    let e = pe.get(k).filter(|e| e.tid == ea.tid).ok_or_else(|| {
                        Error::Internal(format!("prefix list has no entry for T{}", ea.tid))
                    })?;
                    PuoEntry {
                        tid: ea.tid,
                        pro: ea.pro * eb.pro / e.pro,
                        uo: ea.uo + eb.uo - e.uo,
                        ruo: eb.ruo,
                    }
                }
                None => PuoEntry {
                    tid: ea.tid,
                    pro: ea.pro * eb.pro,
                    uo: ea.uo + eb.uo,
                    ruo: eb.ruo,
                },
            };
            acc.add(&joined);
            entries.push(joined);
        } else {
            sup_bound -= 1;
            if early_abort && sup_bound < min_support {
                return Ok(None);
            }
        }
    }

    let mut items = a.items().to_vec();
    items.push(b.last_item());
    Ok(Some(PuoNode {
        table: acc.finish(),
        list: PuoList { items, entries },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::total_order;
    use crate::model::tests::running_example;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn singles() -> (UncertainDatabase, Vec<PuoNode>) {
        let db = running_example();
        let order = total_order(&db, db.item_ids());
        let nodes = build_single_lists(&db, &order).unwrap();
        (db, nodes)
    }

    fn node<'a>(db: &UncertainDatabase, nodes: &'a [PuoNode], label: &str) -> &'a PuoNode {
        let id = db.item_id(label).unwrap();
        nodes.iter().find(|n| n.items() == [id]).unwrap()
    }

    #[test]
    fn single_list_of_e() {
        let (db, nodes) = singles();
        let e = node(&db, &nodes, "e");
        let tids: Vec<u32> = e.list.entries.iter().map(|x| x.tid).collect();
        assert_eq!(tids, [5, 6, 8, 10]);
        let t5 = e.list.entries[0];
        assert_eq!(t5.pro, 0.8);
        assert!(close(t5.uo, 0.1837, 1e-4));
        assert!(close(t5.ruo, 0.8163, 1e-4));
    }

    #[test]
    fn summary_of_b() {
        let (db, nodes) = singles();
        let b = node(&db, &nodes, "b").table;
        assert_eq!(b.sup, 5);
        assert!(close(b.pro, 3.3, 1e-9));
        assert!(close(b.uo, 0.2192, 1e-4));
        assert!(close(b.ruo, 0.4181, 1e-4));
    }

    #[test]
    fn last_item_has_no_remaining_occupancy() {
        let (db, nodes) = singles();
        let c = node(&db, &nodes, "c");
        assert_eq!(c.list.len(), 8);
        assert!(c.list.entries.iter().all(|e| e.ruo == 0.0));
        assert_eq!(nodes.last().unwrap().items(), c.items());
    }

    #[test]
    fn join_e_with_a() {
        let (db, nodes) = singles();
        let ea = construct(
            None,
            node(&db, &nodes, "e"),
            node(&db, &nodes, "a"),
            1,
            true,
        )
        .unwrap()
        .unwrap();
        let tids: Vec<u32> = ea.list.entries.iter().map(|x| x.tid).collect();
        assert_eq!(tids, [5, 8]);
        let t5 = ea.list.entries[0];
        assert!(close(t5.pro, 0.72, 1e-12));
        assert!(close(t5.uo, 16.0 / 49.0, 1e-12));
        assert!(close(t5.ruo, 33.0 / 49.0, 1e-12));
        assert!(close(t5.uo, 0.3265, 1e-4));
        assert!(close(t5.ruo, 0.6735, 1e-4));
    }

    #[test]
    fn join_b_with_c() {
        let (db, nodes) = singles();
        let bc = construct(
            None,
            node(&db, &nodes, "b"),
            node(&db, &nodes, "c"),
            1,
            false,
        )
        .unwrap()
        .unwrap();
        assert_eq!(bc.table.sup, 3);
        assert!(close(bc.table.pro, 1.45, 1e-9));
    }

    #[test]
    fn early_abort_when_support_cannot_be_reached() {
        let (db, nodes) = singles();
        let e = node(&db, &nodes, "e");
        let d = node(&db, &nodes, "d");
        assert!(construct(None, e, d, 4, true).unwrap().is_none());
        let full = construct(None, e, d, 4, false).unwrap().unwrap();
        assert_eq!(full.table.sup, 2);
    }

    #[test]
    fn three_item_join_goes_through_prefix() {
        let (db, nodes) = singles();
        let a = node(&db, &nodes, "a");
        let ab = construct(None, a, node(&db, &nodes, "b"), 1, false)
            .unwrap()
            .unwrap();
        let ad = construct(None, a, node(&db, &nodes, "d"), 1, false)
            .unwrap()
            .unwrap();
        let abd = construct(Some(&a.list), &ab, &ad, 1, false)
            .unwrap()
            .unwrap();
        // a, b, d together in T3, T5 and T8.
        let tids: Vec<u32> = abd.list.entries.iter().map(|x| x.tid).collect();
        assert_eq!(tids, [3, 5, 8]);
        let t3 = abd.list.entries[0];
        assert!(close(t3.pro, 0.6 * 0.6 * 0.8, 1e-12));
        assert!(close(t3.uo, (21.0 + 4.0 + 2.0) / 38.0, 1e-12));
        assert!(close(t3.ruo, 11.0 / 38.0, 1e-12));
    }

    #[test]
    fn broken_prefix_chain_is_an_internal_error() {
        let (db, nodes) = singles();
        let a = node(&db, &nodes, "a");
        let ab = construct(None, a, node(&db, &nodes, "b"), 1, false)
            .unwrap()
            .unwrap();
        let ad = construct(None, a, node(&db, &nodes, "d"), 1, false)
            .unwrap()
            .unwrap();
        let mut bad_prefix = a.list.clone();
        bad_prefix.entries.retain(|e| e.tid != 5);
        assert!(matches!(
            construct(Some(&bad_prefix), &ab, &ad, 1, false),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn mismatched_operands_are_rejected() {
        let (db, nodes) = singles();
        let a = node(&db, &nodes, "a");
        let ab = construct(None, a, node(&db, &nodes, "b"), 1, false)
            .unwrap()
            .unwrap();
        assert!(matches!(
            construct(None, a, &ab, 1, false),
            Err(Error::InvalidArgument(_))
        ));
    }
}
