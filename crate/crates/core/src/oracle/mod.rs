//! Brute-force reference implementations for cross-checking the pipeline.
//! None of them reuse the production algorithms.

mod barcode;
mod brute;
mod checks;
mod condense;
mod sweep;

pub use barcode::{pruning_barcode, PruningMetricSpace};
pub use brute::{brute_core_distances, brute_knn, prim_mst};
pub use checks::{canonical_labels, check_barcode, check_condense, check_mst, check_neighbours, check_sweep};
pub use condense::{bfs_condense, compare_condensed};
pub use sweep::{leaf_lifetimes_by_sweep, leaves_of, stitch, Sweep, SweepInterval, SweepLeaf};
