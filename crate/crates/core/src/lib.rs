//! Density-based clustering that tracks HDBSCAN*-style leaf clusters over
//! every minimum cluster size at once and picks the most persistent cut.
//!
//! ```
//! use plscan::{fit, Measure};
//!
//! let mut data = Vec::new();
//! for i in 0..20 {
//!     let t = i as f64 * 0.01;
//!     data.extend([t, t]);
//!     data.extend([10.0 + t, 10.0 - t]);
//! }
//! let result = fit(&data, 2, 4, Measure::Size, None).unwrap();
//! assert_eq!(result.labels.len(), 40);
//! ```

#[cfg(feature = "oracle")]
pub mod cli;
pub mod condense;
pub mod error;
pub mod io;
pub mod leaf_tree;
pub mod linkage;
pub mod mst;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod persistence;
pub mod pipeline;
pub mod select;
pub mod spatial;
pub mod union_find;

pub use condense::{condense_tree, CondensedRow, CondensedTree};
pub use error::{PlscanError, Result};
pub use leaf_tree::{build_leaf_tree, LeafInterval, LeafTree, Segment};
pub use linkage::{single_linkage, LinkageRow, LinkageTree};
pub use mst::{build_mst, Edge, SpanningForest};
pub use persistence::{
    birth_distance, find_layers, lambda_of, persistence_trace, size_persistence, Layer, LayerSet, Measure,
    PersistenceTrace,
};
pub use pipeline::{fit, fit_forest, fit_points, Fit, FitParams, FitResult};
pub use select::{extract_layer, select_clusters, Clustering};
pub use spatial::{mutual_reachability, CoreDistances, Metric, Neighbour, PointSet, SpatialIndex, TreeKind};
