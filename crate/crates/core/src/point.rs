use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An outcome vector `y ∈ R^ℓ` with `ℓ ≥ 2` finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidPoint(format!(
                "dimension {} < 2",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(format!(
                "coordinate {} is not finite ({})",
                i + 1,
                coords[i]
            )));
        }
        Ok(Point(coords))
    }

    pub fn zeros(ell: usize) -> Result<Self> {
        Point::new(vec![0.0; ell])
    }

    pub fn ones(ell: usize) -> Result<Self> {
        Point::new(vec![1.0; ell])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `self - other`, coordinate-wise.
    pub fn sub(&self, other: &Point) -> Vec<f64> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.0.iter().all(|&c| c > 0.0)
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Slack threshold separating strict from non-strict inequalities.
///
/// A slack `s` counts as strictly positive when `s > tau` and as
/// nonnegative when `s >= -tau`; the band `(-tau, tau]` is closed but not
/// open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT_TAU: f64 = 1e-9;

    pub fn new(tau: f64) -> Result<Self> {
        if tau.is_finite() && tau > 0.0 {
            Ok(Tolerance(tau))
        } else {
            Err(Error::param("tol", format!("must be finite and > 0, got {tau}")))
        }
    }

    pub fn tau(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn strictly_positive(self, slack: f64) -> bool {
        slack > self.0
    }

    #[inline]
    pub fn nonnegative(self, slack: f64) -> bool {
        slack >= -self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(Self::DEFAULT_TAU)
    }
}

impl TryFrom<f64> for Tolerance {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Tolerance::new(v)
    }
}

impl From<Tolerance> for f64 {
    fn from(t: Tolerance) -> Self {
        t.0
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
