//! Breadth-first reference condensation and order-free tree comparison.

use std::collections::{HashMap, VecDeque};

use crate::condense::CondensedRow;
use crate::linkage::LinkageTree;

struct Hierarchy {
    n: usize,
    children: Vec<(usize, usize)>,
    distance: Vec<f64>,
    size: Vec<f64>,
    roots: Vec<usize>,
    weights: Vec<f64>,
}

impl Hierarchy {
    fn new(linkage: &LinkageTree) -> Self {
        let n = linkage.n();
        let weights = linkage.weights().to_vec();
        let rows = linkage.rows();
        let total = n + rows.len();
        let mut children = vec![(usize::MAX, usize::MAX); total];
        let mut distance = vec![0.0; total];
        let mut size = vec![0.0; total];
        let mut has_parent = vec![false; total];
        size[..n].copy_from_slice(&weights);
        for (i, r) in rows.iter().enumerate() {
            children[n + i] = (r.left, r.right);
            distance[n + i] = r.distance;
            size[n + i] = size[r.left] + size[r.right];
            has_parent[r.left] = true;
            has_parent[r.right] = true;
        }
        let roots = (0..total).filter(|&i| !has_parent[i]).collect();
        Hierarchy { n, children, distance, size, roots, weights }
    }

    fn leaves(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(x) = stack.pop() {
            if x < self.n {
                out.push(x);
            } else {
                stack.push(self.children[x].0);
                stack.push(self.children[x].1);
            }
        }
        out
    }
}

/// Reference condensation: walks each component top-down and collects the
/// points of every pruned branch explicitly.
pub fn bfs_condense(linkage: &LinkageTree, min_cluster_size: f64) -> Vec<CondensedRow> {
    let h = Hierarchy::new(linkage);
    let n = h.n;
    let mc = min_cluster_size;
    let mut rows = Vec::new();
    let mut next_label = n;

    for &root in &h.roots {
        if root < n {
            rows.push(CondensedRow { parent: n, child: root, distance: 0.0, size: h.weights[root] });
            continue;
        }
        if h.size[root] < mc {
            for p in h.leaves(root) {
                rows.push(CondensedRow {
                    parent: n,
                    child: p,
                    distance: h.distance[root],
                    size: h.weights[p],
                });
            }
            continue;
        }
        let mut queue = VecDeque::from([(root, n)]);
        while let Some((node, label)) = queue.pop_front() {
            let (l, r) = h.children[node];
            let d = h.distance[node];
            let (big_l, big_r) = (h.size[l] >= mc, h.size[r] >= mc);
            if big_l && big_r {
                let parent = if label == n {
                    next_label += 1;
                    next_label
                } else {
                    label
                };
                for c in [l, r] {
                    next_label += 1;
                    rows.push(CondensedRow { parent, child: next_label, distance: d, size: h.size[c] });
                    queue.push_back((c, next_label));
                }
                continue;
            }
            for (c, big) in [(l, big_l), (r, big_r)] {
                if big {
                    queue.push_back((c, label));
                } else {
                    for p in h.leaves(c) {
                        rows.push(CondensedRow { parent: label, child: p, distance: d, size: h.weights[p] });
                    }
                }
            }
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, PartialOrd)]
enum Key {
    Phantom,
    Cluster(Vec<usize>),
    Point(usize),
}

/// Order-free form of a condensed tree: clusters are named by the points in
/// their subtree, the phantom root by a fixed marker.
fn canonical(rows: &[CondensedRow], n: usize) -> Vec<(Key, Key, f64, f64)> {
    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut parent_of: HashMap<usize, usize> = HashMap::new();
    for r in rows {
        if r.child < n {
            members.entry(r.parent).or_default().push(r.child);
        } else {
            parent_of.insert(r.child, r.parent);
        }
    }
    // Push point sets up to every ancestor.
    let direct: Vec<(usize, Vec<usize>)> = members.iter().map(|(k, v)| (*k, v.clone())).collect();
    let mut full: HashMap<usize, Vec<usize>> = HashMap::new();
    for (label, pts) in direct {
        let mut at = Some(label);
        while let Some(l) = at {
            full.entry(l).or_default().extend(&pts);
            at = parent_of.get(&l).copied();
        }
    }
    for v in full.values_mut() {
        v.sort_unstable();
    }
    let key = |label: usize| {
        if label == n {
            Key::Phantom
        } else {
            Key::Cluster(full.get(&label).cloned().unwrap_or_default())
        }
    };
    let mut out: Vec<(Key, Key, f64, f64)> = rows
        .iter()
        .map(|r| {
            let child = if r.child < n { Key::Point(r.child) } else { key(r.child) };
            (key(r.parent), child, r.distance, r.size)
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    out
}

/// Compares two condensed trees as multisets of rows. Sizes may differ by
/// summation order only.
pub fn compare_condensed(a: &[CondensedRow], b: &[CondensedRow], n: usize) -> Result<(), String> {
    if a.len() != b.len() {
        return Err(format!("row counts differ: {} vs {}", a.len(), b.len()));
    }
    let (ca, cb) = (canonical(a, n), canonical(b, n));
    for (i, (x, y)) in ca.iter().zip(&cb).enumerate() {
        let size_ok = (x.3 - y.3).abs() <= 1e-9 * x.3.abs().max(1.0);
        if x.0 != y.0 || x.1 != y.1 || x.2 != y.2 || !size_ok {
            return Err(format!("canonical row {i} differs: {:?} vs {:?}", describe(x), describe(y)));
        }
    }
    Ok(())
}

fn describe(row: &(Key, Key, f64, f64)) -> String {
    let name = |k: &Key| match k {
        Key::Phantom => "root".to_string(),
        Key::Point(p) => format!("point {p}"),
        Key::Cluster(pts) => format!("cluster of {} points starting at {:?}", pts.len(), pts.first()),
    };
    format!("{} -> {} at {} size {}", name(&row.0), name(&row.1), row.2, row.3)
}
