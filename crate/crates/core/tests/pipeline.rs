mod common;

use common::{ari, blobs, fixture, points, uniform};
use plscan::oracle::{canonical_labels, leaf_lifetimes_by_sweep};
use plscan::{
    birth_distance, extract_layer, fit, fit_forest, fit_points, io, Edge, FitParams, FitResult, Measure,
    Metric, PlscanError, PointSet, SpanningForest, TreeKind,
};

fn nested_stars() -> plscan::Fit {
    let file = std::fs::File::open(fixture("nested_stars.csv")).unwrap();
    let forest = io::read_forest("nested_stars", file, None).unwrap();
    fit_forest(forest, None, &FitParams { k: 5, ..FitParams::default() }).unwrap()
}

#[test]
fn nested_stars_leaves_at_selected_thresholds() {
    let f = nested_stars();
    assert_eq!(f.leaf_tree.leaves_at(10.0), vec![2, 4, 5]);
    assert_eq!(f.leaf_tree.leaves_at(22.0), vec![2, 3]);
    assert!(f.leaf_tree.leaves_at(26.0).is_empty());
    assert_eq!(f.trace.breakpoints, vec![5.0, 19.0, 25.0, 150.0]);
    assert_eq!(f.trace.totals, vec![48.0, 26.0, 0.0, 0.0]);
    assert_eq!(f.clustering.cut, 5.0);
    assert_eq!(f.clustering.num_clusters(), 3);
}

#[test]
fn nested_stars_labels_follow_the_three_stars() {
    let f = nested_stars();
    let l = &f.clustering.labels;
    assert!(l[..25].iter().all(|&x| x == l[0]));
    assert!(l[25..44].iter().all(|&x| x == l[25]));
    assert!(l[44..94].iter().all(|&x| x == l[44]));
    // Points hung off the dense star at distance 4 join seg 3, which is not selected.
    assert!(l[94..].iter().all(|&x| x == -1));
    let distinct: std::collections::BTreeSet<_> = [l[0], l[25], l[44]].into();
    assert_eq!(distinct.len(), 3);

    let upper = extract_layer(19.0, &f.leaf_tree, &f.condensed);
    assert_eq!(upper.num_clusters(), 2);
    assert_eq!(upper.labels[25], upper.labels[44]);
    assert_eq!(upper.labels[94], upper.labels[44]);
}

#[test]
fn nested_stars_birth_distances() {
    let f = nested_stars();
    let t = &f.leaf_tree;
    assert_eq!(birth_distance(2, 10.0, &f.condensed, t).unwrap(), 0.92);
    assert_eq!(birth_distance(5, 10.0, &f.condensed, t).unwrap(), 0.48);
    // Segment 5 survives inside segment 3 at this size, so its core sets the birth.
    assert_eq!(birth_distance(3, 22.0, &f.condensed, t).unwrap(), 0.48);
    assert!(birth_distance(3, 10.0, &f.condensed, t).is_err());
}

#[test]
fn two_blobs_give_two_clusters() {
    let (data, truth) = blobs(7, 100, 2, 2, 0.5);
    let f = fit_points(&points(data, 2), None, &FitParams::default()).unwrap();
    assert_eq!(f.clustering.num_clusters(), 2);
    assert!(f.clustering.noise_fraction() < 0.5);
    assert!(ari(&f.clustering.labels, &truth) > 0.9);
    let top = f.trace.totals.iter().copied().fold(0.0, f64::max);
    assert_eq!(f.trace.totals.iter().filter(|&&t| t == top).count(), 1);
}

#[test]
fn k_must_be_below_n() {
    let pts = points(vec![0.0, 0.0, 1.0, 0.0, 2.0, 0.0], 2);
    let err = fit_points(&pts, None, &FitParams::default()).unwrap_err();
    assert_eq!(err, PlscanError::NeighbourCount { k: 4, n: 3 });
}

#[test]
fn min_cluster_size_must_exceed_weights() {
    let pts = points(uniform(1, 20, 2), 2);
    let w = vec![4.0; 20];
    let err = fit_points(&pts, Some(&w), &FitParams::default()).unwrap_err();
    assert!(matches!(err, PlscanError::MinClusterSize { .. }));
    let bad = [vec![1.0; 19], vec![-1.0]].concat();
    let err = fit_points(&pts, Some(&bad), &FitParams::default()).unwrap_err();
    assert!(matches!(err, PlscanError::SampleWeight { point: 19, .. }));
}

#[test]
fn unit_weights_match_unweighted() {
    let pts = points(blobs(3, 200, 2, 3, 1.0).0, 2);
    let a = fit_points(&pts, None, &FitParams::default()).unwrap();
    let b = fit_points(&pts, Some(&vec![1.0; 200]), &FitParams::default()).unwrap();
    assert_eq!(FitResult::from(&a), FitResult::from(&b));
}

#[test]
fn heavier_points_shift_the_trace() {
    let pts = points(blobs(3, 200, 2, 3, 1.0).0, 2);
    let a = fit_points(&pts, None, &FitParams::default()).unwrap();
    let b = fit_points(&pts, Some(&vec![2.0; 200]), &FitParams::default()).unwrap();
    // Doubling every weight doubles every size bound.
    let doubled: Vec<f64> = a.leaf_tree.segments().iter().map(|s| 2.0 * s.s_max).collect();
    let got: Vec<f64> = b.leaf_tree.segments().iter().map(|s| s.s_max).collect();
    assert_eq!(doubled[0], got[0]);
    assert_eq!(b.condensed.total_weight(), 400.0);
}

#[test]
fn trees_and_metrics_agree_on_labels() {
    let (data, _) = blobs(11, 300, 3, 4, 0.8);
    let pts = points(data.clone(), 3);
    let kd =
        fit_points(&pts, None, &FitParams { tree: Some(TreeKind::KdTree), ..FitParams::default() }).unwrap();
    let ball = fit_points(&pts, None, &FitParams { tree: Some(TreeKind::BallTree), ..FitParams::default() })
        .unwrap();
    assert_eq!(kd.clustering.labels, ball.clustering.labels);
    assert_eq!(kd.forest.total_weight(), ball.forest.total_weight());

    for metric in [Metric::Manhattan, Metric::Cosine] {
        let pts = PointSet::new(data.clone(), 3, metric).unwrap();
        let f = fit_points(&pts, None, &FitParams::default()).unwrap();
        assert!(f.clustering.num_clusters() >= 1, "{metric}");
        assert!(fit_points(&pts, None, &FitParams { tree: Some(TreeKind::KdTree), ..FitParams::default() })
            .is_err());
    }
}

#[test]
fn every_measure_yields_a_nonnegative_trace() {
    let pts = points(blobs(5, 250, 2, 5, 1.0).0, 2);
    for measure in Measure::ALL {
        let f = fit_points(&pts, None, &FitParams { measure, ..FitParams::default() }).unwrap();
        assert!(f.trace.totals.iter().all(|&t| t >= 0.0 && t.is_finite()), "{measure:?}");
        assert_eq!(f.trace.breakpoints.len(), f.trace.totals.len());
        assert!(f.layers.layers.len() <= 5);
        assert!(f.clustering.probabilities.iter().all(|p| (0.0..=1.0).contains(p)));
    }
}

#[test]
fn size_trace_matches_sweep_totals() {
    let (data, _) = blobs(21, 180, 2, 4, 1.3);
    let f = fit_points(&points(data, 2), None, &FitParams::default()).unwrap();
    let n = f.linkage.n();
    let sweep = leaf_lifetimes_by_sweep(&f.linkage, 4, n);
    for m in 5..=n {
        assert_eq!(f.trace.total_for_threshold(m as f64), sweep.total_at(m), "threshold {m}");
    }
    let best = sweep.best_threshold();
    assert_eq!(f.trace.best_cut() + 1.0, best as f64);
    assert_eq!(canonical_labels(&f.clustering.labels), canonical_labels(&sweep.labels_at(best)));
}

#[test]
fn flat_result_columns_line_up() {
    let (data, _) = blobs(2, 120, 2, 3, 0.7);
    let r = fit(&data, 2, 4, Measure::Size, None).unwrap();
    assert_eq!(r.labels.len(), 120);
    assert_eq!(r.probabilities.len(), 120);
    assert_eq!(r.trace_min_size.len(), r.trace_total.len());
    assert_eq!(r.layer_cut.len(), r.layer_total.len());
    let segs = r.leaf_parent.len();
    for col in [&r.leaf_d_min, &r.leaf_d_max, &r.leaf_s_min, &r.leaf_s_max] {
        assert_eq!(col.len(), segs);
    }
    assert!(r.leaf_parent.iter().enumerate().skip(1).all(|(i, &p)| p < i));
    assert!(r.layer_cut.contains(&r.cut));
}

#[test]
fn components_without_a_split_are_noise() {
    // A 30-point star plus an isolated 12-point star that never splits.
    let mut edges: Vec<Edge> = (1..15).map(|v| Edge { u: 0, v, weight: 1.0 }).collect();
    edges.extend((16..30).map(|v| Edge { u: 15, v, weight: 1.5 }));
    edges.push(Edge { u: 0, v: 15, weight: 6.0 });
    edges.extend((31..42).map(|v| Edge { u: 30, v, weight: 0.5 }));
    let forest = SpanningForest::from_precomputed(edges, 43).unwrap();
    assert_eq!(forest.num_components(), 3);
    let f = fit_forest(forest, None, &FitParams::default()).unwrap();
    assert_eq!(f.clustering.num_clusters(), 2);
    assert!(f.clustering.labels[30..].iter().all(|&l| l == -1));
    assert_eq!(f.components_without_leaves(), vec![(1, 12), (2, 1)]);
}

#[test]
fn distance_and_density_traces_match_sweep_births() {
    let (data, _) = blobs(33, 220, 2, 5, 1.1);
    let pts = points(data, 2);
    for measure in [Measure::Distance, Measure::Density] {
        let f = fit_points(&pts, None, &FitParams { measure, ..FitParams::default() }).unwrap();
        let n = f.linkage.n();
        let sweep = leaf_lifetimes_by_sweep(&f.linkage, 4, n);
        let members = f.leaf_tree.memberships(&f.condensed);
        // Each breakpoint's value describes the thresholds just above it.
        for (&b, &got) in f.trace.breakpoints.iter().zip(&f.trace.totals) {
            let m = b as usize + 1;
            if m > n {
                continue;
            }
            let want: f64 = f
                .leaf_tree
                .leaves_at(m as f64)
                .into_iter()
                .map(|s| {
                    let d_max = f.leaf_tree.segments()[s].d_max;
                    let leaf = sweep.leaves_at(m).iter().find(|l| l.points == members[s]).unwrap();
                    match measure {
                        Measure::Distance => d_max - leaf.birth_distance,
                        _ => (-leaf.birth_distance).exp() - (-d_max).exp(),
                    }
                })
                .sum();
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{measure:?} m={m}: {got} vs {want}");
        }
    }
}
