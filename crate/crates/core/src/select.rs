use crate::condense::CondensedTree;
use crate::leaf_tree::LeafTree;
use crate::persistence::PersistenceTrace;

/// A flat clustering at one minimum-cluster-size cut.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    /// Cluster per point, `-1` for noise.
    pub labels: Vec<i64>,
    pub probabilities: Vec<f64>,
    pub cut: f64,
    /// Leaf-tree segment of each label.
    pub selected_segments: Vec<usize>,
}

impl Clustering {
    pub fn num_clusters(&self) -> usize {
        self.selected_segments.len()
    }

    pub fn noise_fraction(&self) -> f64 {
        let noise = self.labels.iter().filter(|&&l| l < 0).count();
        noise as f64 / self.labels.len().max(1) as f64
    }
}

/// Clusters at the breakpoint with the highest total persistence.
pub fn select_clusters(trace: &PersistenceTrace, tree: &LeafTree, condensed: &CondensedTree) -> Clustering {
    extract_layer(trace.best_cut(), tree, condensed)
}

/// Clusters formed by the leaves counted at trace breakpoint `cut`.
pub fn extract_layer(cut: f64, tree: &LeafTree, condensed: &CondensedTree) -> Clustering {
    let n = condensed.n();
    let selected = tree.leaves_above(cut);
    let segment_labels = segment_labels(tree, &selected);

    let mut labels = vec![-1i64; n];
    let mut probabilities = vec![0.0; n];
    for row in condensed.rows().iter().filter(|r| r.child < n) {
        let label = segment_labels[row.parent - n];
        labels[row.child] = label;
        if label >= 0 {
            let seg = tree.segments()[selected[label as usize]];
            let span = seg.d_max - seg.d_min;
            probabilities[row.child] =
                if span > 0.0 { ((seg.d_max - row.distance) / span).clamp(0.0, 1.0) } else { 1.0 };
        }
    }
    Clustering { labels, probabilities, cut, selected_segments: selected }
}

/// Label per segment: selected segments get consecutive labels, everything
/// else inherits from its parent. Parents precede their children.
fn segment_labels(tree: &LeafTree, selected: &[usize]) -> Vec<i64> {
    let mut labels = vec![-1i64; tree.len()];
    let mut next = 0;
    for idx in 1..tree.len() {
        if next < selected.len() && selected[next] == idx {
            labels[idx] = next as i64;
            next += 1;
        } else {
            labels[idx] = labels[tree.segments()[idx].parent];
        }
    }
    labels
}
