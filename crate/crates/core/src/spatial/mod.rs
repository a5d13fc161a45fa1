//! Point storage, space trees and core distances.
//!
//! Both tree flavours share one node layout: a contiguous range of points in
//! tree order plus either an axis-aligned box (k-d tree) or a bounding ball
//! (ball tree). Queries are exact; ties in distance resolve by ascending
//! point index.

mod metric;
mod tree;

pub use metric::Metric;
pub use tree::{Neighbour, SpatialIndex, TreeKind};

use crate::error::{PlscanError, Result};

/// Dense row-major matrix of `n` points in `dim` dimensions.
#[derive(Debug, Clone)]
pub struct PointSet {
    data: Vec<f64>,
    n: usize,
    dim: usize,
    metric: Metric,
}

impl PointSet {
    pub fn new(data: Vec<f64>, dim: usize, metric: Metric) -> Result<Self> {
        if dim == 0 {
            return Err(PlscanError::InvalidInput("points need at least one dimension".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(PlscanError::InvalidInput(format!(
                "{} values do not form rows of {dim} columns",
                data.len()
            )));
        }
        let n = data.len() / dim;
        if n < 2 {
            return Err(PlscanError::InvalidInput(format!("need at least 2 points, got {n}")));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(PlscanError::NonFinite { point: pos / dim, dim: pos % dim });
        }
        if metric.normalizes() {
            for (i, row) in data.chunks_exact(dim).enumerate() {
                if row.iter().all(|&v| v == 0.0) {
                    return Err(PlscanError::InvalidInput(format!(
                        "point {i} is the zero vector, cosine distance is undefined"
                    )));
                }
            }
        }
        Ok(PointSet { data, n, dim, metric })
    }

    pub fn from_rows(rows: &[Vec<f64>], metric: Metric) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != dim) {
            return Err(PlscanError::InvalidInput(format!(
                "row {i} has {} columns, expected {dim}",
                rows[i].len()
            )));
        }
        Self::new(rows.concat(), dim, metric)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Reported distance between points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        if self.metric.normalizes() {
            let a = normalized(self.row(i));
            let b = normalized(self.row(j));
            self.metric.from_reduced(self.metric.reduced(&a, &b))
        } else {
            self.metric.from_reduced(self.metric.reduced(self.row(i), self.row(j)))
        }
    }
}

pub(crate) fn normalized(row: &[f64]) -> Vec<f64> {
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    row.iter().map(|v| v / norm).collect()
}

/// Distance from every point to its k-th nearest *other* point.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreDistances {
    values: Vec<f64>,
    reduced: Vec<f64>,
    k: usize,
}

impl CoreDistances {
    pub(crate) fn from_reduced(reduced: Vec<f64>, metric: Metric, k: usize) -> Self {
        let values = reduced.iter().map(|&r| metric.from_reduced(r)).collect();
        CoreDistances { values, reduced, k }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn reduced(&self) -> &[f64] {
        &self.reduced
    }
}

/// Mutual reachability distance between two points at metric distance `dist`.
pub fn mutual_reachability(i: usize, j: usize, dist: f64, cores: &CoreDistances) -> f64 {
    debug_assert_ne!(i, j);
    let c = cores.values();
    c[i].max(c[j]).max(dist)
}
