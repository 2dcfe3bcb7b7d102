//! Mining potential high utility-occupancy patterns (PHUOPs) from uncertain
//! quantitative transaction databases.
//!
//! A pattern is a PHUOP when its support count, its summed existential
//! probability and its average utility occupancy all clear user thresholds.
//! [`mine`] finds them with PUO-list joins over a support-ordered
//! set-enumeration tree; [`oracle_mine`] finds them by brute force.
//!
//! ```
//! use phuop_core::{mine, parse_database, StrategySet, Thresholds};
//!
//! let tx = "a:2:0.6 c:4:0.8\nb:1:0.9 c:1:0.5\nc:3:1\n";
//! let ut = "a 7\nb 2\nc 11\n";
//! let db = parse_database(tx.as_bytes(), ut.as_bytes()).unwrap();
//! let th = Thresholds::new(0.5, 0.5, 0.3).unwrap();
//! let out = mine(&db, &th, StrategySet::FULL).unwrap();
//! assert_eq!(db.pattern_labels(&out.phuops[0].pattern), ["c"]);
//! ```

pub mod dataio;
pub mod error;
pub mod measures;
pub mod miner;
pub mod model;
pub mod oracle;
pub mod puo;
pub mod sweep;

pub use dataio::{augment, generate, parse_database, write_database, GeneratorConfig};
pub use error::{Error, Result};
pub use measures::{
    probability, remaining_utility_occupancy, support_count, total_order, utility,
    utility_occupancy, TotalOrder,
};
pub use miner::{
    mine, mine_observed, phuop_search, upper_bound, MiningOutcome, NodeVisit, SearchObserver,
    SearchParams, StrategySet,
};
pub use model::{
    validate_database, DatabaseBuilder, DatabaseStats, Item, ItemId, ItemOccurrence, MiningStats,
    Pattern, PhuopRecord, Thresholds, Transaction, UncertainDatabase, UtilityTable, Violation,
    EPSILON,
};
pub use oracle::{oracle_mine, oracle_mine_with_budget};
pub use puo::{build_single_lists, construct, PfuTable, PuoEntry, PuoList, PuoNode};
pub use sweep::{BenchPlan, BenchRow, DatasetSpec};
