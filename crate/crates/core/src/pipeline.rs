//! End-to-end fitting from points or from a precomputed spanning forest.

use crate::condense::{condense_tree, CondensedTree};
use crate::error::{PlscanError, Result};
use crate::leaf_tree::{build_leaf_tree, LeafTree};
use crate::linkage::{resolve_weights, single_linkage, LinkageTree};
use crate::mst::{build_mst, SpanningForest};
use crate::persistence::{find_layers, persistence_trace, LayerSet, Measure, PersistenceTrace};
use crate::select::{select_clusters, Clustering};
use crate::spatial::{CoreDistances, PointSet, SpatialIndex, TreeKind};

pub const DEFAULT_LEAF_CAPACITY: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct FitParams {
    pub k: usize,
    /// Initial minimum cluster size; defaults to `max(k, 2)`.
    pub min_cluster_size: Option<f64>,
    pub measure: Measure,
    /// Defaults to the k-d tree for euclidean data, the ball tree otherwise.
    pub tree: Option<TreeKind>,
    pub leaf_capacity: usize,
    pub top_layers: usize,
}

impl Default for FitParams {
    fn default() -> Self {
        FitParams {
            k: 4,
            min_cluster_size: None,
            measure: Measure::Size,
            tree: None,
            leaf_capacity: DEFAULT_LEAF_CAPACITY,
            top_layers: 5,
        }
    }
}

impl FitParams {
    pub fn initial_min_cluster_size(&self) -> f64 {
        self.min_cluster_size.unwrap_or(self.k.max(2) as f64)
    }
}

/// Every intermediate artefact of one run.
#[derive(Debug, Clone)]
pub struct Fit {
    pub cores: Option<CoreDistances>,
    pub forest: SpanningForest,
    pub linkage: LinkageTree,
    pub condensed: CondensedTree,
    pub leaf_tree: LeafTree,
    pub trace: PersistenceTrace,
    pub layers: LayerSet,
    pub clustering: Clustering,
}

pub fn fit_points(points: &PointSet, sample_weights: Option<&[f64]>, params: &FitParams) -> Result<Fit> {
    let n = points.len();
    if params.k == 0 || params.k >= n {
        return Err(PlscanError::NeighbourCount { k: params.k, n });
    }
    resolve_weights(n, sample_weights)?;
    let kind = params.tree.unwrap_or_else(|| TreeKind::default_for(points.metric()));
    let index = SpatialIndex::build(points, kind, params.leaf_capacity)?;
    let cores = index.core_distances(params.k)?;
    let forest = build_mst(&index, &cores)?;
    let mut fit = fit_forest(forest, sample_weights, params)?;
    fit.cores = Some(cores);
    Ok(fit)
}

pub fn fit_forest(forest: SpanningForest, sample_weights: Option<&[f64]>, params: &FitParams) -> Result<Fit> {
    if params.k == 0 {
        return Err(PlscanError::NeighbourCount { k: 0, n: forest.n() });
    }
    let linkage = single_linkage(&forest, sample_weights)?;
    let condensed = condense_tree(&linkage, params.initial_min_cluster_size())?;
    let leaf_tree = build_leaf_tree(&condensed);
    let trace = persistence_trace(&leaf_tree, &condensed, params.measure);
    let layers = find_layers(&trace, params.top_layers);
    let clustering = select_clusters(&trace, &leaf_tree, &condensed);
    Ok(Fit { cores: None, forest, linkage, condensed, leaf_tree, trace, layers, clustering })
}

impl Fit {
    /// Forest components, as `(component, point count)`, that contain no point
    /// of any leaf cluster and so are noise at every cut.
    pub fn components_without_leaves(&self) -> Vec<(usize, usize)> {
        let components = self.forest.component_labels();
        let num = components.iter().max().map_or(0, |&c| c + 1);
        let members = self.leaf_tree.memberships(&self.condensed);
        let mut covered = vec![false; num];
        for (s, seg) in self.leaf_tree.segments().iter().enumerate().skip(1) {
            if seg.is_leaf() {
                for &p in &members[s] {
                    covered[components[p]] = true;
                }
            }
        }
        let mut counts = vec![0; num];
        for &c in &components {
            counts[c] += 1;
        }
        (0..num).filter(|&c| !covered[c]).map(|c| (c, counts[c])).collect()
    }
}

/// Flat column arrays of a fit, for foreign-language wrappers.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub labels: Vec<i64>,
    pub probabilities: Vec<f64>,
    pub cut: f64,
    pub trace_min_size: Vec<f64>,
    pub trace_total: Vec<f64>,
    pub layer_cut: Vec<f64>,
    pub layer_total: Vec<f64>,
    pub leaf_parent: Vec<usize>,
    pub leaf_d_min: Vec<f64>,
    pub leaf_d_max: Vec<f64>,
    pub leaf_s_min: Vec<f64>,
    pub leaf_s_max: Vec<f64>,
}

impl From<&Fit> for FitResult {
    fn from(fit: &Fit) -> Self {
        let segs = fit.leaf_tree.segments();
        FitResult {
            labels: fit.clustering.labels.clone(),
            probabilities: fit.clustering.probabilities.clone(),
            cut: fit.clustering.cut,
            trace_min_size: fit.trace.breakpoints.clone(),
            trace_total: fit.trace.totals.clone(),
            layer_cut: fit.layers.layers.iter().map(|l| l.cut).collect(),
            layer_total: fit.layers.layers.iter().map(|l| l.total).collect(),
            leaf_parent: segs.iter().map(|s| s.parent).collect(),
            leaf_d_min: segs.iter().map(|s| s.d_min).collect(),
            leaf_d_max: segs.iter().map(|s| s.d_max).collect(),
            leaf_s_min: segs.iter().map(|s| s.s_min).collect(),
            leaf_s_max: segs.iter().map(|s| s.s_max).collect(),
        }
    }
}

/// Fits row-major euclidean `data` with `dim` columns.
pub fn fit(
    data: &[f64],
    dim: usize,
    k: usize,
    measure: Measure,
    sample_weights: Option<&[f64]>,
) -> Result<FitResult> {
    let points = PointSet::new(data.to_vec(), dim, crate::spatial::Metric::Euclidean)?;
    let params = FitParams { k, measure, ..FitParams::default() };
    Ok(FitResult::from(&fit_points(&points, sample_weights, &params)?))
}
