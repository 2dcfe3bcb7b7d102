//! Fixtures shared by the criterion benches.

use phuop_core::{generate, GeneratorConfig, Thresholds, UncertainDatabase};

/// Seeded synthetic database of `transactions` rows over `items` items.
pub fn fixture(transactions: usize, items: usize) -> UncertainDatabase {
    generate(&GeneratorConfig {
        seed: 7,
        num_transactions: transactions,
        num_items: items,
        avg_transaction_length: 8.0,
        ..GeneratorConfig::default()
    })
    .expect("valid generator config")
}

/// Thresholds that keep every preset well under a second on [`fixture`].
pub fn thresholds() -> Thresholds {
    Thresholds::new(0.02, 0.1, 0.005).expect("valid thresholds")
}
