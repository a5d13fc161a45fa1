use crate::error::{PlscanError, Result};
use crate::mst::SpanningForest;
use crate::union_find::UnionFind;

/// One merge of the single-linkage hierarchy. Row `i` creates node `n + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkageRow {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    /// Total sample weight of the merged node.
    pub size: f64,
    /// Number of points under the merged node.
    pub count: usize,
}

/// Single-linkage merge sequence. Node ids below `n` are points.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkageTree {
    n: usize,
    rows: Vec<LinkageRow>,
    weights: Vec<f64>,
}

impl LinkageTree {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[LinkageRow] {
        &self.rows
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Weight of a node: the sample weight of a point or a merge's size.
    pub fn node_size(&self, node: usize) -> f64 {
        if node < self.n {
            self.weights[node]
        } else {
            self.rows[node - self.n].size
        }
    }

    pub fn node_count(&self, node: usize) -> usize {
        if node < self.n {
            1
        } else {
            self.rows[node - self.n].count
        }
    }

    /// Nodes that are never merged further, in ascending id order.
    pub fn roots(&self) -> Vec<usize> {
        let mut has_parent = vec![false; self.n + self.rows.len()];
        for row in &self.rows {
            has_parent[row.left] = true;
            has_parent[row.right] = true;
        }
        (0..has_parent.len()).filter(|&i| !has_parent[i]).collect()
    }
}

/// Checks sample weights, defaulting to all ones.
pub fn resolve_weights(n: usize, sample_weights: Option<&[f64]>) -> Result<Vec<f64>> {
    match sample_weights {
        None => Ok(vec![1.0; n]),
        Some(w) => {
            if w.len() != n {
                return Err(PlscanError::InvalidInput(format!("{} sample weights for {n} points", w.len())));
            }
            if let Some(point) = w.iter().position(|&x| !(x.is_finite() && x > 0.0)) {
                return Err(PlscanError::SampleWeight { point, weight: w[point] });
            }
            Ok(w.to_vec())
        }
    }
}

/// Kruskal-order union-find over the forest's edges.
pub fn single_linkage(forest: &SpanningForest, sample_weights: Option<&[f64]>) -> Result<LinkageTree> {
    let n = forest.n();
    let weights = resolve_weights(n, sample_weights)?;
    let mut edges = forest.edges().to_vec();
    edges.sort_by(|a, b| a.weight.total_cmp(&b.weight));

    let mut uf = UnionFind::new(n);
    let mut node_of: Vec<usize> = (0..n).collect();
    let mut size = weights.clone();
    let mut count = vec![1usize; n];
    let mut rows = Vec::with_capacity(edges.len());
    for e in edges {
        let (ru, rv) = (uf.find(e.u), uf.find(e.v));
        if ru == rv {
            return Err(PlscanError::Cycle { u: e.u, v: e.v });
        }
        let row = LinkageRow {
            left: node_of[ru],
            right: node_of[rv],
            distance: e.weight,
            size: size[ru] + size[rv],
            count: count[ru] + count[rv],
        };
        let root = uf.union(ru, rv).expect("distinct roots");
        node_of[root] = n + rows.len();
        size[root] = row.size;
        count[root] = row.count;
        rows.push(row);
    }
    Ok(LinkageTree { n, rows, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mst::Edge;

    fn forest(edges: &[(usize, usize, f64)], n: usize) -> SpanningForest {
        let edges = edges.iter().map(|&(u, v, weight)| Edge { u, v, weight }).collect();
        SpanningForest::from_precomputed(edges, n).unwrap()
    }

    #[test]
    fn single_merge() {
        let t = single_linkage(&forest(&[(0, 1, 1.0)], 2), None).unwrap();
        assert_eq!(t.rows(), &[LinkageRow { left: 0, right: 1, distance: 1.0, size: 2.0, count: 2 }]);
    }

    #[test]
    fn chain_in_weight_order() {
        let t = single_linkage(&forest(&[(1, 2, 2.0), (0, 1, 1.0)], 3), None).unwrap();
        let d: Vec<(f64, f64)> = t.rows().iter().map(|r| (r.distance, r.size)).collect();
        assert_eq!(d, vec![(1.0, 2.0), (2.0, 3.0)]);
        assert_eq!(t.rows()[1].left, 3);
        assert_eq!(t.rows()[1].right, 2);
    }

    #[test]
    fn weighted_sizes() {
        let f = forest(&[(0, 1, 1.0), (1, 2, 2.0)], 3);
        let t = single_linkage(&f, Some(&[2.0, 1.0, 1.0])).unwrap();
        let s: Vec<(f64, usize)> = t.rows().iter().map(|r| (r.size, r.count)).collect();
        assert_eq!(s, vec![(3.0, 2), (4.0, 3)]);
    }

    #[test]
    fn rejects_non_positive_weights() {
        let f = forest(&[(0, 1, 1.0)], 2);
        assert_eq!(
            single_linkage(&f, Some(&[1.0, 0.0])),
            Err(PlscanError::SampleWeight { point: 1, weight: 0.0 })
        );
        assert!(single_linkage(&f, Some(&[1.0])).is_err());
    }

    #[test]
    fn forest_roots_stay_unmerged() {
        let t = single_linkage(&forest(&[(0, 1, 1.0), (2, 3, 2.0)], 5), None).unwrap();
        assert_eq!(t.roots(), vec![4, 5, 6]);
        let total: f64 = t.roots().iter().map(|&r| t.node_size(r)).sum();
        assert_eq!(total, 5.0);
    }
}
