//! Single-pass condensation of a linkage tree.
//!
//! Linkage rows are visited from the highest distance down. Accepted nodes
//! write their direct point rows at the next free output row and reserve
//! space for every pruned branch below them; pruned branches later fill their
//! reserved rows using the distance at which they fell off their ancestor.
//! The output is therefore sorted by non-increasing distance.

use crate::error::{PlscanError, Result};
use crate::linkage::LinkageTree;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensedRow {
    pub parent: usize,
    pub child: usize,
    pub distance: f64,
    pub size: f64,
}

/// Condensed cluster tree. Cluster ids start at `n`, the phantom root.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedTree {
    n: usize,
    rows: Vec<CondensedRow>,
    /// Row index of the first row of each sibling pair, in row order.
    pairs: Vec<usize>,
    num_clusters: usize,
    min_cluster_size: f64,
    total_weight: f64,
}

impl CondensedTree {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[CondensedRow] {
        &self.rows
    }

    /// Sibling cluster-row pairs `(i, i + 1)` in decreasing distance order.
    pub fn cluster_pairs(&self) -> impl DoubleEndedIterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().map(|&i| (i, i + 1))
    }

    pub fn num_merges(&self) -> usize {
        self.pairs.len()
    }

    /// Number of cluster ids including the phantom root.
    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn min_cluster_size(&self) -> f64 {
        self.min_cluster_size
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn is_point(&self, id: usize) -> bool {
        id < self.n
    }
}

/// Condenses `linkage` with minimum cluster size `min_cluster_size`.
pub fn condense_tree(linkage: &LinkageTree, min_cluster_size: f64) -> Result<CondensedTree> {
    let n = linkage.n();
    let max_weight = linkage.max_weight();
    if !(min_cluster_size.is_finite() && min_cluster_size > max_weight) {
        return Err(PlscanError::MinClusterSize { min_size: min_cluster_size, max_weight });
    }
    let links = linkage.rows();
    let weights = linkage.weights();
    let m = links.len();
    let mc = min_cluster_size;

    let mut parent_of = vec![n; m];
    let mut pending_idx = vec![usize::MAX; m];
    let mut pending_distance = vec![f64::NAN; m];
    let empty = CondensedRow { parent: n, child: usize::MAX, distance: f64::NAN, size: 0.0 };
    let mut out = vec![empty; n + 2 * m];
    let mut pairs = Vec::new();
    let mut index = 0;
    let mut next_label = n;

    let pruned_points = |node: usize| -> usize {
        if node < n {
            1
        } else if links[node - n].size < mc {
            links[node - n].count
        } else {
            0
        }
    };

    for li in (0..m).rev() {
        let link = links[li];
        let (mut out_idx, distance) = if link.size < mc {
            if pending_idx[li] == usize::MAX {
                // A small top-level component: nothing above reserved its rows.
                pending_idx[li] = index;
                pending_distance[li] = link.distance;
                index += link.count;
            }
            (pending_idx[li], pending_distance[li])
        } else {
            let at = index;
            index += pruned_points(link.left) + pruned_points(link.right);
            (at, link.distance)
        };

        for child in [link.left, link.right] {
            if child < n {
                out[out_idx] = CondensedRow { parent: parent_of[li], child, distance, size: weights[child] };
                out_idx += 1;
            } else {
                let c = child - n;
                parent_of[c] = parent_of[li];
                if links[c].size < mc {
                    pending_idx[c] = out_idx;
                    pending_distance[c] = distance;
                    out_idx += links[c].count;
                }
            }
        }

        let splits = link.left >= n
            && link.right >= n
            && links[link.left - n].size >= mc
            && links[link.right - n].size >= mc;
        if splits {
            let mut parent = parent_of[li];
            if parent == n {
                next_label += 1;
                parent = next_label;
            }
            pairs.push(index);
            for child in [link.left, link.right] {
                next_label += 1;
                parent_of[child - n] = next_label;
                out[index] =
                    CondensedRow { parent, child: next_label, distance, size: links[child - n].size };
                index += 1;
            }
        }
    }

    for root in linkage.roots().into_iter().filter(|&r| r < n) {
        out[index] = CondensedRow { parent: n, child: root, distance: 0.0, size: weights[root] };
        index += 1;
    }
    out.truncate(index);
    debug_assert!(out.iter().all(|r| r.child != usize::MAX));

    Ok(CondensedTree {
        n,
        rows: out,
        pairs,
        num_clusters: next_label - n + 1,
        min_cluster_size: mc,
        total_weight: linkage.total_weight(),
    })
}
