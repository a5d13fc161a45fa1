#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use plscan::{Metric, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Isotropic gaussian blobs with uniformly placed centres in `[-10, 10]^dim`.
/// Returns row-major data and the generating blob of each point.
pub fn blobs(seed: u64, n: usize, dim: usize, centers: usize, sigma: f64) -> (Vec<f64>, Vec<i64>) {
    let mut rng = rng(seed);
    let centres: Vec<Vec<f64>> =
        (0..centers).map(|_| (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect()).collect();
    let noise = Normal::new(0.0, sigma).unwrap();
    let mut data = Vec::with_capacity(n * dim);
    let mut truth = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % centers;
        for x in &centres[c] {
            data.push(x + noise.sample(&mut rng));
        }
        truth.push(c as i64);
    }
    (data, truth)
}

/// Five blobs of 200 points on a circle of radius 10, σ = 1, plus 5%
/// uniform background noise labelled -1.
pub fn five_blobs_with_noise(seed: u64) -> (Vec<f64>, Vec<i64>) {
    let mut rng = rng(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut data = Vec::new();
    let mut truth = Vec::new();
    for c in 0..5 {
        let angle = c as f64 * std::f64::consts::TAU / 5.0;
        let (cx, cy) = (10.0 * angle.cos(), 10.0 * angle.sin());
        for _ in 0..200 {
            data.push(cx + noise.sample(&mut rng));
            data.push(cy + noise.sample(&mut rng));
            truth.push(c);
        }
    }
    // 5% of the final total.
    let background = 1000 * 5 / 95;
    for _ in 0..background {
        data.push(rng.random_range(-15.0..15.0));
        data.push(rng.random_range(-15.0..15.0));
        truth.push(-1);
    }
    (data, truth)
}

pub fn uniform(seed: u64, n: usize, dim: usize) -> Vec<f64> {
    let mut rng = rng(seed);
    (0..n * dim).map(|_| rng.random_range(0.0..1.0)).collect()
}

pub fn points(data: Vec<f64>, dim: usize) -> PointSet {
    PointSet::new(data, dim, Metric::Euclidean).unwrap()
}

/// Adjusted Rand index; every label, noise included, is its own class.
pub fn ari(a: &[i64], b: &[i64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let mut table: HashMap<(i64, i64), f64> = HashMap::new();
    let mut rows: HashMap<i64, f64> = HashMap::new();
    let mut cols: HashMap<i64, f64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1.0;
        *rows.entry(x).or_default() += 1.0;
        *cols.entry(y).or_default() += 1.0;
    }
    let pairs = |v: f64| v * (v - 1.0) / 2.0;
    let index: f64 = table.values().copied().map(pairs).sum();
    let sa: f64 = rows.values().copied().map(pairs).sum();
    let sb: f64 = cols.values().copied().map(pairs).sum();
    let expected = sa * sb / pairs(n);
    let max = 0.5 * (sa + sb);
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}
