//! Leaf lifetimes by re-condensing at every integer minimum cluster size.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::condense::bfs_condense;
use crate::linkage::LinkageTree;

/// One leaf cluster of a fresh condensation.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepLeaf {
    /// Member points, ascending.
    pub points: Vec<usize>,
    /// Lowest point-row distance inside the leaf.
    pub birth_distance: f64,
}

/// A stitched leaf lifetime `(birth, death]` over integer thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepInterval {
    pub points: Vec<usize>,
    pub birth: f64,
    pub death: f64,
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub lower: usize,
    pub upper: usize,
    pub n: usize,
    /// Leaves per threshold `lower..=upper`, each list sorted by first point.
    pub leaves: Vec<Vec<SweepLeaf>>,
    pub intervals: Vec<SweepInterval>,
}

impl Sweep {
    pub fn leaves_at(&self, m: usize) -> &[SweepLeaf] {
        &self.leaves[m - self.lower]
    }

    fn interval_of(&self, points: &[usize], m: usize) -> &SweepInterval {
        self.intervals
            .iter()
            .find(|iv| iv.points == points && iv.birth < m as f64 && m as f64 <= iv.death)
            .expect("every leaf above the lower bound lies in a stitched interval")
    }

    /// Total size persistence of the leaves at threshold `m > lower`.
    pub fn total_at(&self, m: usize) -> f64 {
        self.leaves_at(m)
            .iter()
            .map(|leaf| {
                let iv = self.interval_of(&leaf.points, m);
                iv.death - iv.birth
            })
            .sum()
    }

    /// Threshold in `(lower, n]` with the highest total; ties to the smallest.
    pub fn best_threshold(&self) -> usize {
        let mut best = self.lower + 1;
        for m in self.lower + 1..=self.n.min(self.upper) {
            if self.total_at(m) > self.total_at(best) {
                best = m;
            }
        }
        best
    }

    /// Cluster labels at threshold `m`, numbered by each leaf's first point.
    pub fn labels_at(&self, m: usize) -> Vec<i64> {
        let mut labels = vec![-1; self.n];
        for (label, leaf) in self.leaves_at(m).iter().enumerate() {
            for &p in &leaf.points {
                labels[p] = label as i64;
            }
        }
        labels
    }
}

/// Leaves of a fresh condensation at `min_cluster_size`.
pub fn leaves_of(linkage: &LinkageTree, min_cluster_size: f64) -> Vec<SweepLeaf> {
    let n = linkage.n();
    let rows = bfs_condense(linkage, min_cluster_size);
    let parents: HashSet<usize> = rows.iter().filter(|r| r.child >= n).map(|r| r.parent).collect();
    let mut by_label: BTreeMap<usize, SweepLeaf> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.child < n && r.parent != n && !parents.contains(&r.parent)) {
        let leaf = by_label
            .entry(r.parent)
            .or_insert(SweepLeaf { points: Vec::new(), birth_distance: f64::INFINITY });
        leaf.points.push(r.child);
        leaf.birth_distance = leaf.birth_distance.min(r.distance);
    }
    let mut leaves: Vec<SweepLeaf> = by_label.into_values().collect();
    for leaf in &mut leaves {
        leaf.points.sort_unstable();
    }
    leaves.sort_by_key(|l| l.points[0]);
    leaves
}

/// Stitches per-threshold leaf point sets into `(birth, death]` intervals.
/// A set seen for thresholds `a..=b` becomes `(max(a - 1, lower), b]`;
/// empty intervals are dropped.
pub fn stitch(lower: usize, sets_per_threshold: &[Vec<Vec<usize>>]) -> Vec<SweepInterval> {
    let mut open: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut out = Vec::new();
    let close = |points: Vec<usize>, first: usize, last: usize, out: &mut Vec<SweepInterval>| {
        let birth = (first.saturating_sub(1)).max(lower);
        if last > birth {
            out.push(SweepInterval { points, birth: birth as f64, death: last as f64 });
        }
    };
    for (offset, sets) in sets_per_threshold.iter().enumerate() {
        let m = lower + offset;
        let current: HashSet<&Vec<usize>> = sets.iter().collect();
        let ended: Vec<Vec<usize>> = open.keys().filter(|k| !current.contains(k)).cloned().collect();
        for points in ended {
            let first = open.remove(&points).expect("open interval");
            close(points, first, m - 1, &mut out);
        }
        for s in sets {
            open.entry(s.clone()).or_insert(m);
        }
    }
    let last = lower + sets_per_threshold.len() - 1;
    let mut remaining: Vec<(Vec<usize>, usize)> = open.into_iter().collect();
    remaining.sort();
    for (points, first) in remaining {
        close(points, first, last, &mut out);
    }
    out.sort_by(|a, b| {
        a.points.cmp(&b.points).then(a.birth.total_cmp(&b.birth)).then(a.death.total_cmp(&b.death))
    });
    out
}

/// Condenses at every integer threshold in `lower..=upper` (unit weights).
pub fn leaf_lifetimes_by_sweep(linkage: &LinkageTree, lower: usize, upper: usize) -> Sweep {
    let n = linkage.n();
    let leaves: Vec<Vec<SweepLeaf>> = (lower..=upper).map(|m| leaves_of(linkage, m as f64)).collect();
    let sets: Vec<Vec<Vec<usize>>> =
        leaves.iter().map(|ls| ls.iter().map(|l| l.points.clone()).collect()).collect();
    let intervals = stitch(lower, &sets);
    Sweep { lower, upper, n, leaves, intervals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stitching_rules() {
        let a = vec![0, 1];
        let b = vec![2, 3];
        let sets = vec![vec![a.clone(), b.clone()], vec![a.clone()], vec![a.clone()], vec![]];
        let iv = stitch(4, &sets);
        assert_eq!(iv.len(), 1);
        assert_eq!((iv[0].points.clone(), iv[0].birth, iv[0].death), (a, 4.0, 6.0));
    }

    #[test]
    fn late_births_keep_their_lower_edge() {
        let a = vec![0, 1, 2];
        let sets = vec![vec![], vec![], vec![a.clone()], vec![a.clone()]];
        let iv = stitch(2, &sets);
        assert_eq!((iv[0].birth, iv[0].death), (3.0, 5.0));
    }
}
