#![allow(dead_code)]

use phuop_core::{DatabaseBuilder, UncertainDatabase, UtilityTable};
use proptest::prelude::*;

pub const LABELS: [&str; 12] = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"];

/// Small databases: up to `max_items` items, up to `max_tx` transactions,
/// integer unit utilities 1..=10, probabilities in {0.1, 0.2, ..., 1.0}.
pub fn small_db(max_items: usize, max_tx: usize) -> impl Strategy<Value = UncertainDatabase> {
    (2..=max_items).prop_flat_map(move |n| {
        let utilities = prop::collection::vec(1u32..=10, n);
        let row = prop::collection::btree_map(0..n, (1u32..=5, 1u32..=10), 1..=n);
        let rows = prop::collection::vec(row, 1..=max_tx);
        (utilities, rows).prop_map(move |(utilities, rows)| {
            let table: UtilityTable = utilities
                .iter()
                .enumerate()
                .map(|(i, &u)| (LABELS[i], f64::from(u)))
                .collect();
            let mut b = DatabaseBuilder::new(table);
            for row in rows {
                b.push(
                    row.into_iter()
                        .map(|(i, (q, p))| (LABELS[i], q, f64::from(p) / 10.0)),
                );
            }
            b.build()
        })
    })
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
