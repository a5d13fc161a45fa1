//! Pruning ultrametric over points and their noise markers, and the
//! zero-dimensional barcode of its Vietoris–Rips filtration.

use super::sweep::{stitch, Sweep, SweepInterval};
use crate::error::{PlscanError, Result};

/// Elements `0..n` are points `x_i`; `n..2n` are their markers `pi_i`.
#[derive(Debug, Clone)]
pub struct PruningMetricSpace {
    n: usize,
    lower: usize,
    upper: usize,
    dist: Vec<f64>,
}

impl PruningMetricSpace {
    /// Builds the space from a sweep covering thresholds up to `n + 1`, where
    /// no leaf remains.
    pub fn from_sweep(sweep: &Sweep) -> Result<Self> {
        let n = sweep.n;
        if sweep.upper <= n {
            return Err(PlscanError::InvalidInput("the sweep must extend past n".into()));
        }
        let size = 2 * n;
        let mut dist = vec![f64::INFINITY; size * size];
        for i in 0..size {
            dist[i * size + i] = 0.0;
        }

        // Threshold at which each point is first outside every leaf.
        let mut noise_at = vec![f64::NAN; n];
        for m in sweep.lower..=sweep.upper {
            let mut in_leaf = vec![false; n];
            for leaf in sweep.leaves_at(m) {
                for &p in &leaf.points {
                    in_leaf[p] = true;
                }
                for (a, &i) in leaf.points.iter().enumerate() {
                    for &j in &leaf.points[a + 1..] {
                        let d = &mut dist[i * size + j];
                        if d.is_infinite() {
                            *d = m as f64;
                            dist[j * size + i] = m as f64;
                        }
                    }
                }
            }
            for p in 0..n {
                if !in_leaf[p] && noise_at[p].is_nan() {
                    noise_at[p] = m as f64;
                }
            }
        }
        for i in 0..n {
            dist[i * size + n + i] = noise_at[i];
            dist[(n + i) * size + i] = noise_at[i];
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let xx = dist[i * size + j];
                let pp = noise_at[i].max(xx).max(noise_at[j]);
                dist[(n + i) * size + n + j] = pp;
                // Marker of j reached from x_i through x_j.
                let xp = xx.max(noise_at[j]);
                dist[i * size + n + j] = xp;
                dist[(n + j) * size + i] = xp;
            }
        }
        Ok(PruningMetricSpace { n, lower: sweep.lower, upper: sweep.upper, dist })
    }

    pub fn len(&self) -> usize {
        2 * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.dist[a * 2 * self.n + b]
    }

    /// Checks `d(a, b) <= max(d(a, c), d(c, b))` on every triple.
    pub fn check_ultrametric(&self) -> Result<()> {
        let size = self.len();
        for a in 0..size {
            for b in 0..size {
                let ab = self.get(a, b);
                for c in 0..size {
                    if ab > self.get(a, c).max(self.get(c, b)) {
                        return Err(PlscanError::NotUltrametric(a, b, c));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Zero-dimensional barcode of the leaf components: at each threshold `s`,
/// components holding some `x_i` whose marker is elsewhere are leaves. Bars
/// are the stitched lifetimes of their point sets.
pub fn pruning_barcode(space: &PruningMetricSpace) -> Result<Vec<SweepInterval>> {
    space.check_ultrametric()?;
    let n = space.n;
    let size = space.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for a in 0..size {
        for b in a + 1..size {
            let d = space.get(a, b);
            if d.is_finite() {
                pairs.push((d, a, b));
            }
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));

    let mut uf = Components::new(size);
    let mut next = 0;
    let mut sets_per_threshold = Vec::new();
    for s in space.lower..=space.upper {
        while next < pairs.len() && pairs[next].0 <= s as f64 {
            uf.union(pairs[next].1, pairs[next].2);
            next += 1;
        }
        let mut groups: std::collections::BTreeMap<usize, (Vec<usize>, bool)> = Default::default();
        for i in 0..n {
            let root = uf.find(i);
            let marker_apart = uf.find(n + i) != root;
            let entry = groups.entry(root).or_default();
            entry.0.push(i);
            entry.1 |= marker_apart;
        }
        let leaves: Vec<Vec<usize>> =
            groups.into_values().filter(|(_, leaf)| *leaf).map(|(points, _)| points).collect();
        sets_per_threshold.push(leaves);
    }
    Ok(stitch(space.lower, &sets_per_threshold))
}

/// Minimal union-find kept separate from the production structure.
struct Components {
    parent: Vec<usize>,
}

impl Components {
    fn new(n: usize) -> Self {
        Components { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
