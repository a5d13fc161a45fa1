//! Quadratic neighbour search and Prim's algorithm on the complete
//! mutual-reachability graph.

use crate::mst::{Edge, SpanningForest};
use crate::spatial::{Metric, PointSet};

fn distance(points: &PointSet, i: usize, j: usize) -> f64 {
    let (a, b) = (points.row(i), points.row(j));
    match points.metric() {
        Metric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
        Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        Metric::Cosine => {
            let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            let chord: f64 = a.iter().zip(b).map(|(x, y)| (x / na - y / nb) * (x / na - y / nb)).sum();
            chord * 0.5
        }
    }
}

/// All other points sorted by `(distance, index)`.
fn sorted_row(points: &PointSet, i: usize) -> Vec<(f64, usize)> {
    let mut row: Vec<(f64, usize)> =
        (0..points.len()).filter(|&j| j != i).map(|j| (distance(points, i, j), j)).collect();
    row.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    row
}

/// The `k` nearest other points of `i` as `(index, distance)`.
pub fn brute_knn(points: &PointSet, i: usize, k: usize) -> Vec<(usize, f64)> {
    sorted_row(points, i).into_iter().take(k).map(|(d, j)| (j, d)).collect()
}

/// Distance from each point to its k-th nearest other point.
pub fn brute_core_distances(points: &PointSet, k: usize) -> Vec<f64> {
    (0..points.len()).map(|i| sorted_row(points, i)[k - 1].0).collect()
}

/// Prim's algorithm over all pairs, weights `max(core_i, core_j, d_ij)`.
pub fn prim_mst(points: &PointSet, cores: &[f64]) -> SpanningForest {
    let n = points.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut from = vec![0usize; n];
    let mut edges = Vec::with_capacity(n - 1);
    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..n {
        for j in 0..n {
            if in_tree[j] {
                continue;
            }
            let w = distance(points, current, j).max(cores[current]).max(cores[j]);
            if w < best[j] {
                best[j] = w;
                from[j] = current;
            }
        }
        let next = (0..n)
            .filter(|&j| !in_tree[j])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .expect("a vertex remains");
        in_tree[next] = true;
        edges.push(Edge { u: from[next].min(next), v: from[next].max(next), weight: best[next] });
        current = next;
    }
    SpanningForest::from_parts_unchecked(n, edges)
}
