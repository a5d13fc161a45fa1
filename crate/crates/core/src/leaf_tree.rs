//! Leaf tree: for every condensed-tree segment, the minimum cluster sizes
//! `(s_min, s_max]` at which it is a leaf cluster.

use crate::condense::CondensedTree;

/// Per-segment record. Segment `i` is condensed cluster `n + i`; segment 0 is
/// the phantom root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub parent: usize,
    pub d_min: f64,
    pub d_max: f64,
    pub s_min: f64,
    pub s_max: f64,
}

impl Segment {
    /// Whether the segment is a leaf for at least one threshold.
    pub fn is_leaf(&self) -> bool {
        self.s_min < self.s_max
    }
}

/// A leaf lifetime `(birth, death]` on the minimum-cluster-size axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafInterval {
    pub segment: usize,
    pub birth: f64,
    pub death: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafTree {
    segments: Vec<Segment>,
    /// Weight of each segment's cluster row (total weight for the root).
    sizes: Vec<f64>,
    children: Vec<Vec<usize>>,
}

impl LeafTree {
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn size(&self, segment: usize) -> f64 {
        self.sizes[segment]
    }

    pub fn children(&self, segment: usize) -> &[usize] {
        &self.children[segment]
    }

    /// Segments that are leaves at threshold `m`: `s_min < m <= s_max`.
    pub fn leaves_at(&self, m: f64) -> Vec<usize> {
        (1..self.len())
            .filter(|&i| {
                let s = &self.segments[i];
                s.s_min < m && m <= s.s_max
            })
            .collect()
    }

    /// Segments counted at trace breakpoint `b`: `s_min <= b < s_max`. These
    /// are the leaves for every threshold just above `b`.
    pub fn leaves_above(&self, b: f64) -> Vec<usize> {
        (1..self.len())
            .filter(|&i| {
                let s = &self.segments[i];
                s.s_min <= b && b < s.s_max
            })
            .collect()
    }

    /// Lifetimes of all segments that are ever a leaf, in segment order.
    pub fn intervals(&self) -> Vec<LeafInterval> {
        (1..self.len())
            .filter(|&i| self.segments[i].is_leaf())
            .map(|i| LeafInterval {
                segment: i,
                birth: self.segments[i].s_min,
                death: self.segments[i].s_max,
            })
            .collect()
    }

    /// Whether `ancestor` lies on the root path of `segment` (inclusive).
    pub fn is_ancestor(&self, ancestor: usize, mut segment: usize) -> bool {
        loop {
            if segment == ancestor {
                return true;
            }
            if segment == 0 {
                return false;
            }
            segment = self.segments[segment].parent;
        }
    }

    /// Points of every segment's subtree, each list ascending.
    pub fn memberships(&self, condensed: &CondensedTree) -> Vec<Vec<usize>> {
        let n = condensed.n();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for row in condensed.rows().iter().filter(|r| r.child < n) {
            members[row.parent - n].push(row.child);
        }
        // Children have larger ids than their parents.
        for s in (1..self.len()).rev() {
            let p = self.segments[s].parent;
            let moved = members[s].clone();
            members[p].extend(moved);
        }
        for m in &mut members {
            m.sort_unstable();
        }
        members
    }
}

/// Builds the leaf tree from a condensed tree.
pub fn build_leaf_tree(condensed: &CondensedTree) -> LeafTree {
    let n = condensed.n();
    let rows = condensed.rows();
    let count = condensed.num_clusters();
    let top = rows.first().map_or(0.0, |r| r.distance);
    let mut segments = vec![
        Segment {
            parent: 0,
            d_min: 0.0,
            d_max: top,
            s_min: condensed.min_cluster_size(),
            s_max: condensed.min_cluster_size(),
        };
        count
    ];
    segments[0].s_max = condensed.total_weight();
    let mut d_min = vec![f64::INFINITY; count];
    let mut direct = vec![0.0; count];
    for row in rows {
        let p = row.parent - n;
        d_min[p] = d_min[p].min(row.distance);
        if row.child < n {
            direct[p] += row.size;
        }
    }
    for (seg, d) in segments.iter_mut().zip(d_min) {
        if d.is_finite() {
            seg.d_min = d;
        }
    }

    let mut sizes = vec![0.0; count];
    sizes[0] = condensed.total_weight();
    let mut children = vec![Vec::new(); count];
    for (left, right) in condensed.cluster_pairs().rev() {
        let (a, b) = (rows[left], rows[right]);
        let (ca, cb) = (a.child - n, b.child - n);
        debug_assert_eq!(ca + 1, cb, "sibling segments must be adjacent");
        let parent = a.parent - n;
        let size = a.size.min(b.size);
        for (c, s) in [(ca, a.size), (cb, b.size)] {
            segments[c].parent = parent;
            segments[c].d_max = a.distance;
            segments[c].s_max = size;
            sizes[c] = s;
        }
        children[parent].extend([ca, cb]);
        let s_min = size.max(segments[ca].s_min).max(segments[cb].s_min);
        segments[parent].s_min = s_min;
        if segments[parent].parent == 0 {
            segments[0].s_min = segments[0].s_min.max(s_min);
        }
    }
    // Segments directly under the phantom root are whole components; a
    // component cannot stay a leaf past its own weight.
    let root_bound = segments[0].s_min;
    for c in 1..count {
        if segments[c].parent == 0 {
            sizes[c] = children[c].iter().map(|&k| sizes[k]).sum::<f64>() + direct[c];
            segments[c].s_max = root_bound.min(sizes[c]);
        }
    }
    for list in &mut children {
        list.sort_unstable();
    }
    LeafTree { segments, sizes, children }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condense::condense_tree;
    use crate::linkage::single_linkage;
    use crate::mst::{Edge, SpanningForest};

    fn tree(edges: &[(usize, usize, f64)], n: usize, mc: f64) -> (CondensedTree, LeafTree) {
        let edges = edges.iter().map(|&(u, v, weight)| Edge { u, v, weight }).collect();
        let l = single_linkage(&SpanningForest::from_precomputed(edges, n).unwrap(), None).unwrap();
        let c = condense_tree(&l, mc).unwrap();
        let t = build_leaf_tree(&c);
        (c, t)
    }

    #[test]
    fn no_merges_gives_root_only() {
        let (_, t) = tree(&[(0, 1, 1.0), (1, 2, 2.0)], 3, 2.0);
        assert_eq!(t.len(), 1);
        assert!(t.intervals().is_empty());
        assert!(t.leaves_at(2.5).is_empty());
    }

    #[test]
    fn one_split_intervals() {
        // Pairs {0,1,2} and {3,4} joined at distance 4.
        let (_, t) = tree(&[(0, 1, 1.0), (1, 2, 1.0), (3, 4, 2.0), (2, 3, 4.0)], 5, 2.0);
        let s = t.segments();
        assert_eq!(t.len(), 4);
        assert_eq!((s[1].s_min, s[1].s_max), (2.0, 2.0));
        assert_eq!((s[2].parent, s[2].s_min, s[2].s_max), (1, 2.0, 2.0));
        assert_eq!((s[3].parent, s[3].s_min, s[3].s_max), (1, 2.0, 2.0));
        assert_eq!((s[0].s_min, s[0].s_max), (2.0, 5.0));
        assert!(t.intervals().is_empty());
    }

    #[test]
    fn memberships_cover_subtrees() {
        let (c, t) = tree(&[(0, 1, 1.0), (1, 2, 1.0), (3, 4, 2.0), (4, 5, 2.0), (2, 3, 4.0)], 6, 3.0);
        let m = t.memberships(&c);
        assert_eq!(m[0], vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(m[2], vec![0, 1, 2]);
        assert_eq!(m[3], vec![3, 4, 5]);
        assert_eq!(t.size(2), 3.0);
        assert_eq!(t.size(1), 6.0);
    }
}
