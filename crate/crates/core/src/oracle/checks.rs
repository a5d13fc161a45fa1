//! Cross-checks of pipeline stages against the reference implementations.
//! Each check returns a list of human-readable differences; empty means pass.

use super::barcode::{pruning_barcode, PruningMetricSpace};
use super::brute::{brute_core_distances, brute_knn, prim_mst};
use super::condense::{bfs_condense, compare_condensed};
use super::sweep::{leaf_lifetimes_by_sweep, SweepInterval};
use crate::condense::CondensedTree;
use crate::leaf_tree::{LeafTree, Segment};
use crate::linkage::LinkageTree;
use crate::mst::build_mst;
use crate::persistence::{birth_distance, persistence_trace, Measure};
use crate::select::extract_layer;
use crate::spatial::{PointSet, SpatialIndex};

const MAX_DIFFS: usize = 20;

fn push(diffs: &mut Vec<String>, msg: String) {
    if diffs.len() < MAX_DIFFS {
        diffs.push(msg);
    }
}

/// k-NN lists and core distances against a full scan.
pub fn check_neighbours(points: &PointSet, index: &SpatialIndex, k: usize) -> Vec<String> {
    let mut diffs = Vec::new();
    for i in 0..points.len() {
        let got: Vec<(usize, f64)> =
            index.knn(i, k).expect("valid k").iter().map(|nb| (nb.index, nb.distance)).collect();
        let want = brute_knn(points, i, k);
        if got != want {
            push(&mut diffs, format!("point {i}: neighbours {got:?}, expected {want:?}"));
        }
    }
    let cores = index.core_distances(k).expect("valid k");
    let want = brute_core_distances(points, k);
    for (i, (g, w)) in cores.values().iter().zip(&want).enumerate() {
        if g != w {
            push(&mut diffs, format!("point {i}: core distance {g}, expected {w}"));
        }
    }
    diffs
}

/// Borůvka MST weights against Prim's algorithm on the complete graph.
pub fn check_mst(points: &PointSet, index: &SpatialIndex, k: usize) -> Vec<String> {
    let cores = index.core_distances(k).expect("valid k");
    let fast = build_mst(index, &cores).expect("mst");
    let slow = prim_mst(points, &brute_core_distances(points, k));
    let (a, b) = (fast.sorted_weights(), slow.sorted_weights());
    let mut diffs = Vec::new();
    if a.len() != b.len() {
        diffs.push(format!("edge counts differ: {} vs {}", a.len(), b.len()));
    } else if let Some(i) = (0..a.len()).find(|&i| a[i] != b[i]) {
        diffs.push(format!("sorted weight {i} differs: {} vs Prim {}", a[i], b[i]));
    }
    if fast.total_weight() != slow.total_weight() {
        diffs.push(format!("total weight {} vs Prim {}", fast.total_weight(), slow.total_weight()));
    }
    diffs
}

/// Single-pass condensation against the breadth-first reference.
pub fn check_condense(linkage: &LinkageTree, condensed: &CondensedTree) -> Vec<String> {
    let reference = bfs_condense(linkage, condensed.min_cluster_size());
    match compare_condensed(condensed.rows(), &reference, linkage.n()) {
        Ok(()) => Vec::new(),
        Err(msg) => vec![msg],
    }
}

type Bar = (Vec<usize>, f64, f64);

fn bars_from_segments(segments: &[Segment], memberships: &[Vec<usize>]) -> Vec<Bar> {
    let mut bars: Vec<Bar> = (1..segments.len())
        .filter(|&i| segments[i].is_leaf())
        .map(|i| (memberships[i].clone(), segments[i].s_min, segments[i].s_max))
        .collect();
    bars.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    bars
}

fn bars_from_intervals(intervals: &[SweepInterval]) -> Vec<Bar> {
    intervals.iter().map(|iv| (iv.points.clone(), iv.birth, iv.death)).collect()
}

fn describe_bar(bar: &Bar, segments: Option<(&[Vec<usize>], &[Segment])>) -> String {
    let seg = segments
        .and_then(|(members, _)| members.iter().position(|m| *m == bar.0))
        .map(|s| format!("segment {s}, "))
        .unwrap_or_default();
    let first: Vec<usize> = bar.0.iter().copied().take(4).collect();
    format!("{seg}{} points {first:?}.., ({}, {}]", bar.0.len(), bar.1, bar.2)
}

fn diff_bars(ours: &[Bar], theirs: &[Bar], label: &str, ctx: (&[Vec<usize>], &[Segment])) -> Vec<String> {
    let mut diffs = Vec::new();
    for b in ours {
        if !theirs.contains(b) {
            push(&mut diffs, format!("leaf tree has {} not found in {label}", describe_bar(b, Some(ctx))));
        }
    }
    for b in theirs {
        if !ours.contains(b) {
            push(&mut diffs, format!("{label} has {} not found in leaf tree", describe_bar(b, Some(ctx))));
        }
    }
    if diffs.is_empty() && ours.len() != theirs.len() {
        diffs.push(format!("{} leaf intervals vs {} in {label}", ours.len(), theirs.len()));
    }
    diffs
}

/// Leaf intervals, alive sets, size trace, birth distances and the best cut
/// against per-threshold re-condensation. Assumes unit weights.
pub fn check_sweep(
    linkage: &LinkageTree,
    condensed: &CondensedTree,
    tree: &LeafTree,
    segments: &[Segment],
) -> Vec<String> {
    let n = linkage.n();
    let lower = condensed.min_cluster_size() as usize;
    let sweep = leaf_lifetimes_by_sweep(linkage, lower, n);
    let members = tree.memberships(condensed);
    let ctx = (members.as_slice(), segments);

    let mut diffs = diff_bars(
        &bars_from_segments(segments, &members),
        &bars_from_intervals(&sweep.intervals),
        "sweep",
        ctx,
    );

    let trace = persistence_trace(tree, condensed, Measure::Size);
    for m in lower + 1..=n {
        let mut ours: Vec<&Vec<usize>> = tree.leaves_at(m as f64).iter().map(|&s| &members[s]).collect();
        ours.sort();
        let theirs: Vec<&Vec<usize>> = sweep.leaves_at(m).iter().map(|l| &l.points).collect();
        if ours != theirs {
            push(
                &mut diffs,
                format!("threshold {m}: {} alive leaves vs {} in sweep", ours.len(), theirs.len()),
            );
            continue;
        }
        let (t, want) = (trace.total_for_threshold(m as f64), sweep.total_at(m));
        if t != want {
            push(&mut diffs, format!("threshold {m}: trace total {t}, sweep total {want}"));
        }
        for &s in &tree.leaves_at(m as f64) {
            let got = birth_distance(s, m as f64, condensed, tree).expect("alive leaf");
            let want =
                sweep.leaves_at(m).iter().find(|l| l.points == members[s]).expect("matched").birth_distance;
            if got != want {
                push(&mut diffs, format!("threshold {m}, segment {s}: birth distance {got}, sweep {want}"));
            }
        }
    }

    let best = sweep.best_threshold();
    let cut = trace.best_cut();
    if cut + 1.0 != best as f64 {
        push(&mut diffs, format!("best cut {cut} does not precede the sweep's best threshold {best}"));
    }
    let ours = canonical_labels(&extract_layer(cut, tree, condensed).labels);
    let theirs = canonical_labels(&sweep.labels_at(best));
    if ours != theirs {
        push(&mut diffs, format!("labels at the best cut differ from the sweep at threshold {best}"));
    }
    diffs
}

/// Leaf intervals against the pruning-metric barcode. Assumes unit weights
/// and small inputs.
pub fn check_barcode(
    linkage: &LinkageTree,
    condensed: &CondensedTree,
    tree: &LeafTree,
    segments: &[Segment],
) -> Vec<String> {
    let n = linkage.n();
    let lower = condensed.min_cluster_size() as usize;
    let sweep = leaf_lifetimes_by_sweep(linkage, lower, n + 1);
    let bars = match PruningMetricSpace::from_sweep(&sweep).and_then(|s| pruning_barcode(&s)) {
        Ok(b) => b,
        Err(e) => return vec![e.to_string()],
    };
    let members = tree.memberships(condensed);
    diff_bars(
        &bars_from_segments(segments, &members),
        &bars_from_intervals(&bars),
        "barcode",
        (members.as_slice(), segments),
    )
}

/// Relabels clusters by order of first appearance; noise stays -1.
pub fn canonical_labels(labels: &[i64]) -> Vec<i64> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            if l < 0 {
                -1
            } else {
                let next = map.len() as i64;
                *map.entry(l).or_insert(next)
            }
        })
        .collect()
}
