use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{normalized, CoreDistances, Metric, PointSet};
use crate::error::{PlscanError, Result};

pub(crate) const NO_CHILD: usize = usize::MAX;

/// Relative slack applied to ball-tree lower bounds so that rounding in the
/// centre distance can never prune a node holding an exact tie.
const BALL_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeKind {
    KdTree,
    BallTree,
}

impl TreeKind {
    pub fn name(self) -> &'static str {
        match self {
            TreeKind::KdTree => "kd",
            TreeKind::BallTree => "ball",
        }
    }

    /// The k-d tree for euclidean data, the ball tree for everything else.
    pub fn default_for(metric: Metric) -> TreeKind {
        match metric {
            Metric::Euclidean => TreeKind::KdTree,
            _ => TreeKind::BallTree,
        }
    }
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TreeKind {
    type Err = PlscanError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "kd" | "kdtree" | "kd-tree" => Ok(TreeKind::KdTree),
            "ball" | "balltree" | "ball-tree" => Ok(TreeKind::BallTree),
            other => Err(PlscanError::InvalidInput(format!("unknown tree kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub start: usize,
    pub end: usize,
    pub left: usize,
    pub right: usize,
}

impl Node {
    #[inline]
    pub fn is_leaf(&self) -> bool {
        self.left == NO_CHILD
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.end - self.start
    }
}

/// A neighbour returned by [`SpatialIndex::knn`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbour {
    pub index: usize,
    pub distance: f64,
}

/// Immutable space tree over a [`PointSet`].
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    metric: Metric,
    kind: TreeKind,
    dim: usize,
    /// Coordinates in tree order (unit-normalised for cosine).
    pub(crate) data: Vec<f64>,
    /// Tree position -> original point index.
    pub(crate) order: Vec<usize>,
    pub(crate) nodes: Vec<Node>,
    /// k-d tree: per node `dim` minima followed by `dim` maxima.
    rects: Vec<f64>,
    /// Ball tree: per node centre coordinates.
    centers: Vec<f64>,
    radii: Vec<f64>,
}

/// Heap entry ordered by (reduced distance, original index).
#[derive(Debug, Clone, Copy)]
struct Candidate {
    dist: f64,
    index: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist.total_cmp(&other.dist).then(self.index.cmp(&other.index))
    }
}

impl SpatialIndex {
    /// Builds a tree with at most `leaf_capacity` points per leaf.
    pub fn build(points: &PointSet, kind: TreeKind, leaf_capacity: usize) -> Result<Self> {
        if leaf_capacity == 0 {
            return Err(PlscanError::InvalidInput("leaf capacity must be at least 1".into()));
        }
        let metric = points.metric();
        if kind == TreeKind::KdTree && metric != Metric::Euclidean {
            return Err(PlscanError::UnsupportedTree { metric: metric.name(), tree: kind.name() });
        }
        let n = points.len();
        let dim = points.dim();
        let source: Vec<f64> = if metric.normalizes() {
            (0..n).flat_map(|i| normalized(points.row(i))).collect()
        } else {
            points.data().to_vec()
        };

        let mut order: Vec<usize> = (0..n).collect();
        let mut nodes = Vec::with_capacity(2 * n / leaf_capacity + 1);
        split(&source, dim, &mut order, 0, n, leaf_capacity, &mut nodes);

        let mut data = Vec::with_capacity(n * dim);
        for &i in &order {
            data.extend_from_slice(&source[i * dim..(i + 1) * dim]);
        }

        let mut index = SpatialIndex {
            metric,
            kind,
            dim,
            data,
            order,
            nodes,
            rects: Vec::new(),
            centers: Vec::new(),
            radii: Vec::new(),
        };
        index.compute_bounds();
        Ok(index)
    }

    fn compute_bounds(&mut self) {
        let dim = self.dim;
        match self.kind {
            TreeKind::KdTree => {
                let mut rects = vec![0.0; self.nodes.len() * 2 * dim];
                for (id, node) in self.nodes.iter().enumerate() {
                    let (lo, hi) = rects[id * 2 * dim..(id + 1) * 2 * dim].split_at_mut(dim);
                    lo.fill(f64::INFINITY);
                    hi.fill(f64::NEG_INFINITY);
                    for pos in node.start..node.end {
                        for (d, &v) in self.coords(pos).iter().enumerate() {
                            lo[d] = lo[d].min(v);
                            hi[d] = hi[d].max(v);
                        }
                    }
                }
                self.rects = rects;
            }
            TreeKind::BallTree => {
                let mut centers = vec![0.0; self.nodes.len() * dim];
                let mut radii = vec![0.0; self.nodes.len()];
                for (id, node) in self.nodes.iter().enumerate() {
                    let center = &mut centers[id * dim..(id + 1) * dim];
                    for pos in node.start..node.end {
                        for (c, &v) in center.iter_mut().zip(self.coords(pos)) {
                            *c += v;
                        }
                    }
                    let count = node.len() as f64;
                    center.iter_mut().for_each(|c| *c /= count);
                    let mut radius: f64 = 0.0;
                    for pos in node.start..node.end {
                        radius = radius.max(self.metric.geometric(center, self.coords(pos)));
                    }
                    radii[id] = radius;
                }
                self.centers = centers;
                self.radii = radii;
            }
        }
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub(crate) fn coords(&self, pos: usize) -> &[f64] {
        &self.data[pos * self.dim..(pos + 1) * self.dim]
    }

    /// Lower bound (reduced units) on the distance from `q` to any point of `node`.
    #[inline]
    pub(crate) fn point_node_bound(&self, q: &[f64], node: usize) -> f64 {
        let dim = self.dim;
        match self.kind {
            TreeKind::KdTree => {
                let rect = &self.rects[node * 2 * dim..(node + 1) * 2 * dim];
                let (lo, hi) = rect.split_at(dim);
                let mut acc = 0.0;
                for d in 0..dim {
                    let gap = if q[d] < lo[d] {
                        lo[d] - q[d]
                    } else if q[d] > hi[d] {
                        q[d] - hi[d]
                    } else {
                        0.0
                    };
                    acc += gap * gap;
                }
                acc
            }
            TreeKind::BallTree => {
                let center = &self.centers[node * dim..(node + 1) * dim];
                let g = self.metric.geometric(q, center);
                let r = self.radii[node];
                let gap = (g - r - BALL_SLACK * (g + r)).max(0.0);
                self.metric.geometric_to_reduced(gap)
            }
        }
    }

    /// Lower bound (reduced units) on the distance between points of two nodes.
    #[inline]
    pub(crate) fn node_node_bound(&self, a: usize, b: usize) -> f64 {
        let dim = self.dim;
        match self.kind {
            TreeKind::KdTree => {
                let ra = &self.rects[a * 2 * dim..(a + 1) * 2 * dim];
                let rb = &self.rects[b * 2 * dim..(b + 1) * 2 * dim];
                let mut acc = 0.0;
                for d in 0..dim {
                    let gap = if ra[dim + d] < rb[d] {
                        rb[d] - ra[dim + d]
                    } else if rb[dim + d] < ra[d] {
                        ra[d] - rb[dim + d]
                    } else {
                        0.0
                    };
                    acc += gap * gap;
                }
                acc
            }
            TreeKind::BallTree => {
                let ca = &self.centers[a * dim..(a + 1) * dim];
                let cb = &self.centers[b * dim..(b + 1) * dim];
                let g = self.metric.geometric(ca, cb);
                let r = self.radii[a] + self.radii[b];
                let gap = (g - r - BALL_SLACK * (g + r)).max(0.0);
                self.metric.geometric_to_reduced(gap)
            }
        }
    }

    /// The `k` nearest other points of point `i` (original index), sorted by
    /// distance then index.
    pub fn knn(&self, i: usize, k: usize) -> Result<Vec<Neighbour>> {
        let n = self.len();
        if i >= n {
            return Err(PlscanError::InvalidInput(format!("point {i} out of range for {n} points")));
        }
        if k == 0 || k >= n {
            return Err(PlscanError::NeighbourCount { k, n });
        }
        let pos = self.order.iter().position(|&o| o == i).expect("every point is indexed");
        Ok(self
            .knn_reduced(pos, k)
            .into_iter()
            .map(|c| Neighbour { index: c.index, distance: self.metric.from_reduced(c.dist) })
            .collect())
    }

    fn knn_reduced(&self, pos: usize, k: usize) -> Vec<Candidate> {
        let query = self.coords(pos);
        let self_index = self.order[pos];
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        let mut stack = vec![(0usize, 0.0f64)];
        while let Some((node_id, bound)) = stack.pop() {
            if heap.len() == k && bound > heap.peek().unwrap().dist {
                continue;
            }
            let node = &self.nodes[node_id];
            if node.is_leaf() {
                for p in node.start..node.end {
                    let index = self.order[p];
                    if index == self_index {
                        continue;
                    }
                    let cand = Candidate { dist: self.metric.reduced(query, self.coords(p)), index };
                    if heap.len() < k {
                        heap.push(cand);
                    } else if cand < *heap.peek().unwrap() {
                        heap.pop();
                        heap.push(cand);
                    }
                }
            } else {
                let bl = self.point_node_bound(query, node.left);
                let br = self.point_node_bound(query, node.right);
                // Push the farther child first so the nearer one is explored first.
                if bl <= br {
                    stack.push((node.right, br));
                    stack.push((node.left, bl));
                } else {
                    stack.push((node.left, bl));
                    stack.push((node.right, br));
                }
            }
        }
        heap.into_sorted_vec()
    }

    /// Core distances for every point: distance to the k-th nearest other point.
    pub fn core_distances(&self, k: usize) -> Result<CoreDistances> {
        let n = self.len();
        if k == 0 || k >= n {
            return Err(PlscanError::NeighbourCount { k, n });
        }
        let by_position: Vec<f64> =
            (0..n).into_par_iter().map(|pos| self.knn_reduced(pos, k)[k - 1].dist).collect();
        let mut reduced = vec![0.0; n];
        for (pos, r) in by_position.into_iter().enumerate() {
            reduced[self.order[pos]] = r;
        }
        Ok(CoreDistances::from_reduced(reduced, self.metric, k))
    }
}

fn split(
    source: &[f64],
    dim: usize,
    order: &mut [usize],
    start: usize,
    end: usize,
    leaf_capacity: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let id = nodes.len();
    nodes.push(Node { start, end, left: NO_CHILD, right: NO_CHILD });
    if end - start <= leaf_capacity {
        return id;
    }

    let coord = |i: usize, d: usize| source[i * dim + d];
    let slice = &mut order[start..end];
    let mut best_dim = 0;
    let mut best_spread = f64::NEG_INFINITY;
    for d in 0..dim {
        let (lo, hi) = slice.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            let v = coord(i, d);
            (lo.min(v), hi.max(v))
        });
        if hi - lo > best_spread {
            best_spread = hi - lo;
            best_dim = d;
        }
    }
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        coord(a, best_dim).total_cmp(&coord(b, best_dim)).then(a.cmp(&b))
    });

    let left = split(source, dim, order, start, start + mid, leaf_capacity, nodes);
    let right = split(source, dim, order, start + mid, end, leaf_capacity, nodes);
    nodes[id].left = left;
    nodes[id].right = right;
    id
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> PointSet {
        PointSet::new(xs.to_vec(), 1, Metric::Euclidean).unwrap()
    }

    #[test]
    fn two_point_neighbour() {
        let pts = PointSet::new(vec![0.0, 0.0, 1.0, 0.0], 2, Metric::Euclidean).unwrap();
        let index = SpatialIndex::build(&pts, TreeKind::KdTree, 1).unwrap();
        let nn = index.knn(0, 1).unwrap();
        assert_eq!(nn, vec![Neighbour { index: 1, distance: 1.0 }]);
    }

    #[test]
    fn empty_query_rejected() {
        let pts = line(&[0.0, 1.0, 3.0]);
        let index = SpatialIndex::build(&pts, TreeKind::KdTree, 2).unwrap();
        assert_eq!(index.knn(0, 0), Err(PlscanError::NeighbourCount { k: 0, n: 3 }));
        assert!(index.core_distances(3).is_err());
    }

    #[test]
    fn zero_leaf_capacity_rejected() {
        let pts = line(&[0.0, 1.0]);
        assert!(SpatialIndex::build(&pts, TreeKind::BallTree, 0).is_err());
    }

    #[test]
    fn kd_tree_requires_euclidean() {
        let pts = PointSet::new(vec![0.0, 1.0, 2.0, 3.0], 2, Metric::Manhattan).unwrap();
        assert!(matches!(
            SpatialIndex::build(&pts, TreeKind::KdTree, 4),
            Err(PlscanError::UnsupportedTree { .. })
        ));
    }

    #[test]
    fn collinear_core_distances() {
        let pts = line(&[0.0, 1.0, 3.0]);
        for kind in [TreeKind::KdTree, TreeKind::BallTree] {
            let index = SpatialIndex::build(&pts, kind, 1).unwrap();
            assert_eq!(index.core_distances(1).unwrap().values(), &[1.0, 1.0, 2.0]);
            assert_eq!(index.core_distances(2).unwrap().values(), &[3.0, 2.0, 3.0]);
        }
    }

    #[test]
    fn ties_resolve_by_index() {
        // Points 1, 2 and 3 are all at distance 1 from point 0.
        let pts = line(&[0.0, 1.0, -1.0, 1.0]);
        let index = SpatialIndex::build(&pts, TreeKind::BallTree, 1).unwrap();
        let nn: Vec<usize> = index.knn(0, 2).unwrap().iter().map(|n| n.index).collect();
        assert_eq!(nn, vec![1, 2]);
    }
}
