use std::fmt;
use std::str::FromStr;

use crate::error::PlscanError;

/// Distance metric over feature vectors.
///
/// Internally every metric works on a *reduced* distance that is cheaper to
/// evaluate and orders pairs identically to the reported distance:
/// squared euclidean for `Euclidean`, squared chord length between unit
/// vectors for `Cosine`, and the plain L1 sum for `Manhattan`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Euclidean,
    Manhattan,
    Cosine,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Manhattan => "manhattan",
            Metric::Cosine => "cosine",
        }
    }

    /// Whether coordinates are normalised to unit length before indexing.
    pub(crate) fn normalizes(self) -> bool {
        matches!(self, Metric::Cosine)
    }

    /// Whether the reduced distance is the square of the tree geometry's
    /// distance (euclidean in either raw or normalised coordinates).
    pub(crate) fn squared_geometry(self) -> bool {
        !matches!(self, Metric::Manhattan)
    }

    #[inline]
    pub(crate) fn reduced(self, a: &[f64], b: &[f64]) -> f64 {
        if self.squared_geometry() {
            let mut acc = 0.0;
            for (x, y) in a.iter().zip(b) {
                let d = x - y;
                acc += d * d;
            }
            acc
        } else {
            let mut acc = 0.0;
            for (x, y) in a.iter().zip(b) {
                acc += (x - y).abs();
            }
            acc
        }
    }

    /// Converts a reduced distance to the reported distance. Monotone.
    #[inline]
    pub fn from_reduced(self, r: f64) -> f64 {
        match self {
            Metric::Euclidean => r.sqrt(),
            Metric::Manhattan => r,
            // |a - b|^2 = 2 - 2 cos for unit vectors.
            Metric::Cosine => r * 0.5,
        }
    }

    /// Geometric (triangle-inequality respecting) distance of the tree space.
    #[inline]
    pub(crate) fn geometric(self, a: &[f64], b: &[f64]) -> f64 {
        let r = self.reduced(a, b);
        if self.squared_geometry() {
            r.sqrt()
        } else {
            r
        }
    }

    /// Converts a geometric distance (>= 0) into reduced units.
    #[inline]
    pub(crate) fn geometric_to_reduced(self, g: f64) -> f64 {
        if self.squared_geometry() {
            g * g
        } else {
            g
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = PlscanError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(Metric::Euclidean),
            "manhattan" | "l1" | "cityblock" => Ok(Metric::Manhattan),
            "cosine" => Ok(Metric::Cosine),
            other => Err(PlscanError::InvalidInput(format!("unknown metric '{other}'"))),
        }
    }
}
