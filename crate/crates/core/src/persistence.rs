//! Leaf persistence and the persistence trace over minimum cluster sizes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::condense::CondensedTree;
use crate::error::{PlscanError, Result};
use crate::leaf_tree::{LeafInterval, LeafTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Measure {
    /// `s_max - s_min`.
    #[default]
    Size,
    /// `d_max - birth distance`.
    Distance,
    /// `lambda(birth distance) - lambda(d_max)`.
    Density,
    /// Distance persistence integrated over the size lifetime.
    SizeDistance,
    /// Density persistence integrated over the size lifetime.
    SizeDensity,
}

impl Measure {
    pub const ALL: [Measure; 5] =
        [Measure::Size, Measure::Distance, Measure::Density, Measure::SizeDistance, Measure::SizeDensity];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Size => "size",
            Measure::Distance => "d",
            Measure::Density => "lambda",
            Measure::SizeDistance => "size_d",
            Measure::SizeDensity => "size_lambda",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = PlscanError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Measure::ALL.into_iter().find(|m| m.name() == s.to_ascii_lowercase()).ok_or_else(|| {
            PlscanError::InvalidInput(format!(
                "unknown measure '{s}'; expected one of size, d, lambda, size_d, size_lambda"
            ))
        })
    }
}

pub fn size_persistence(interval: &LeafInterval) -> f64 {
    interval.death - interval.birth
}

pub fn lambda_of(d: f64) -> f64 {
    (-d).exp()
}

/// Total persistence of the alive leaves at each breakpoint. The value at
/// `breakpoints[i]` holds for every threshold in
/// `(breakpoints[i], breakpoints[i + 1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceTrace {
    pub breakpoints: Vec<f64>,
    pub totals: Vec<f64>,
    pub measure: Measure,
}

impl PersistenceTrace {
    /// Breakpoint with the highest total; ties go to the smallest breakpoint.
    pub fn best_cut(&self) -> f64 {
        let mut best = 0;
        for (i, &t) in self.totals.iter().enumerate() {
            if t > self.totals[best] {
                best = i;
            }
        }
        self.breakpoints[best]
    }

    /// Total at the largest breakpoint strictly below `m`, i.e. the value
    /// for threshold `m`.
    pub fn total_for_threshold(&self, m: f64) -> f64 {
        match self.breakpoints.iter().rposition(|&b| b < m) {
            Some(i) => self.totals[i],
            None => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub cut: f64,
    pub total: f64,
}

/// Local maxima of a trace, best first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LayerSet {
    pub layers: Vec<Layer>,
}

/// Per-segment point rows `(distance, weight)`.
pub(crate) fn segment_points(condensed: &CondensedTree, segments: usize) -> Vec<Vec<(f64, f64)>> {
    let n = condensed.n();
    let mut points = vec![Vec::new(); segments];
    for row in condensed.rows().iter().filter(|r| r.child < n) {
        points[row.parent - n].push((row.distance, row.size));
    }
    points
}

/// Join events `(distance, weight)` of the cluster that `leaf` forms when
/// exactly the descendants accepted by `survives` are folded into it.
/// Sorted by distance.
fn member_events(
    leaf: usize,
    tree: &LeafTree,
    points: &[Vec<(f64, f64)>],
    survives: impl Fn(f64) -> bool,
) -> Vec<(f64, f64)> {
    let mut events = Vec::new();
    let mut stack = vec![leaf];
    while let Some(s) = stack.pop() {
        events.extend_from_slice(&points[s]);
        for &c in tree.children(s) {
            if survives(tree.size(c)) {
                stack.push(c);
            } else {
                events.push((tree.segments()[c].d_max, tree.size(c)));
            }
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    events
}

/// Lowest distance at which the members of `leaf` at threshold `m` reach a
/// total weight of `m`.
pub fn birth_distance(leaf: usize, m: f64, condensed: &CondensedTree, tree: &LeafTree) -> Result<f64> {
    if leaf == 0 || leaf >= tree.len() || !tree.leaves_at(m).contains(&leaf) {
        return Err(PlscanError::InvalidInput(format!("segment {leaf} is not a leaf at threshold {m}")));
    }
    let points = segment_points(condensed, tree.len());
    let events = member_events(leaf, tree, &points, |w| w >= m);
    let mut cum = 0.0;
    for (d, w) in events {
        cum += w;
        if cum >= m {
            return Ok(d);
        }
    }
    Err(PlscanError::InvalidInput(format!("segment {leaf} never reaches weight {m}")))
}

/// Per-leaf values of a distance-based measure, evaluated piecewise over the
/// leaf's size lifetime.
struct LeafProfile {
    /// Persistence just above each breakpoint in `[s_min, s_max)`.
    at_breakpoints: Vec<f64>,
    /// Integral of the persistence over `(s_min, s_max]`.
    area: f64,
}

fn leaf_profile(
    leaf: usize,
    tree: &LeafTree,
    points: &[Vec<(f64, f64)>],
    breakpoints: &[f64],
    value: impl Fn(f64) -> f64,
) -> LeafProfile {
    let seg = tree.segments()[leaf];
    // Structure changes only where the threshold crosses a descendant's weight.
    let mut cuts = vec![seg.s_min, seg.s_max];
    let mut stack = vec![leaf];
    while let Some(s) = stack.pop() {
        for &c in tree.children(s) {
            let w = tree.size(c);
            if w > seg.s_min && w < seg.s_max {
                cuts.push(w);
            }
            stack.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let lo = breakpoints.partition_point(|&b| b < seg.s_min);
    let hi = breakpoints.partition_point(|&b| b < seg.s_max);
    let mut at_breakpoints = Vec::with_capacity(hi - lo);
    let mut area = 0.0;
    let mut next_bp = lo;
    for piece in cuts.windows(2) {
        let (a, c) = (piece[0], piece[1]);
        let events = member_events(leaf, tree, points, |w| w >= c);
        let mut cum = Vec::with_capacity(events.len());
        let mut total = 0.0;
        for &(_, w) in &events {
            total += w;
            cum.push(total);
        }
        // Birth for thresholds in (prev, cum[j]] is events[j].0.
        let mut prev = 0.0_f64;
        for (j, &(d, _)) in events.iter().enumerate() {
            let left = prev.max(a);
            let right = cum[j].min(c);
            if right > left {
                area += (right - left) * value(d);
            }
            prev = cum[j];
            if prev >= c {
                break;
            }
        }
        while next_bp < hi && breakpoints[next_bp] < c {
            let b = breakpoints[next_bp];
            let j = cum.partition_point(|&x| x <= b).min(events.len() - 1);
            at_breakpoints.push(value(events[j].0));
            next_bp += 1;
        }
    }
    LeafProfile { at_breakpoints, area }
}

/// Computes the persistence trace for `measure`.
pub fn persistence_trace(tree: &LeafTree, condensed: &CondensedTree, measure: Measure) -> PersistenceTrace {
    let mut breakpoints: Vec<f64> = tree.segments().iter().flat_map(|s| [s.s_min, s.s_max]).collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();
    let mut totals = vec![0.0; breakpoints.len()];
    let leaves = tree.intervals();

    let range = |iv: &LeafInterval| {
        let lo = breakpoints.partition_point(|&b| b < iv.birth);
        let hi = breakpoints.partition_point(|&b| b < iv.death);
        lo..hi
    };

    if measure == Measure::Size {
        for iv in &leaves {
            let p = size_persistence(iv);
            for t in &mut totals[range(iv)] {
                *t += p;
            }
        }
        return PersistenceTrace { breakpoints, totals, measure };
    }

    let points = segment_points(condensed, tree.len());
    let segments = tree.segments();
    let contributions: Vec<Vec<f64>> = leaves
        .par_iter()
        .map(|iv| {
            let d_max = segments[iv.segment].d_max;
            let profile = match measure {
                Measure::Distance | Measure::SizeDistance => {
                    leaf_profile(iv.segment, tree, &points, &breakpoints, |d| d_max - d)
                }
                _ => {
                    leaf_profile(iv.segment, tree, &points, &breakpoints, |d| lambda_of(d) - lambda_of(d_max))
                }
            };
            match measure {
                Measure::Distance | Measure::Density => profile.at_breakpoints,
                _ => vec![profile.area; profile.at_breakpoints.len()],
            }
        })
        .collect();
    for (iv, values) in leaves.iter().zip(contributions) {
        for (t, v) in totals[range(iv)].iter_mut().zip(values) {
            *t += v;
        }
    }
    PersistenceTrace { breakpoints, totals, measure }
}

/// Local maxima of the trace, with plateaus reported at their first
/// breakpoint, ranked by total (ties to the smaller cut).
pub fn find_layers(trace: &PersistenceTrace, top_n: usize) -> LayerSet {
    let mut runs: Vec<(usize, f64)> = Vec::new();
    for (i, &t) in trace.totals.iter().enumerate() {
        if runs.last().is_none_or(|r| r.1 != t) {
            runs.push((i, t));
        }
    }
    let mut layers: Vec<Layer> = (0..runs.len())
        .filter(|&r| {
            let t = runs[r].1;
            (r == 0 || runs[r - 1].1 <= t) && (r + 1 == runs.len() || runs[r + 1].1 <= t)
        })
        .map(|r| Layer { cut: trace.breakpoints[runs[r].0], total: runs[r].1 })
        .collect();
    layers.sort_by(|a, b| b.total.total_cmp(&a.total).then(a.cut.total_cmp(&b.cut)));
    layers.truncate(top_n.max(1));
    LayerSet { layers }
}
