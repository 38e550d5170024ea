//! Deterministic point clouds: sampled versions of classical examples of
//! sets without (uniformly) properly efficient points, and random families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cones::unit_vector;
use crate::efficiency::PointCloud;
use crate::error::{Error, Result};
use crate::point::{Point, Tolerance};

/// Samples of the hyperbola branch `y_2 = 1/y_1`, `y_1 < 0`, at
/// `t_k = −T^{1 − 2k/(n−1)}`. Odd `n` includes `t = −1`.
pub fn gen_hyperbola(t_range: f64, n: usize) -> Result<PointCloud> {
    if !(t_range > 1.0 && t_range.is_finite()) {
        return Err(Error::param("T", "must be a finite number > 1"));
    }
    if n < 3 {
        return Err(Error::param("n", "must be >= 3"));
    }
    let rows = (0..n)
        .map(|k| {
            let t = -t_range.powf(1.0 - 2.0 * k as f64 / (n - 1) as f64);
            vec![t, 1.0 / t]
        })
        .collect();
    PointCloud::from_rows(rows, Tolerance::default())
}

fn grid_steps(h: f64) -> Result<i64> {
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::param("h", "grid step must lie in (0, 0.1]"));
    }
    Ok((1.0 / h + 1e-9).floor() as i64)
}

/// Grid of step `h` over `{−1 ≤ y_1 ≤ 0, −y_1 ≤ y_2 ≤ 1} ∪ [0,1]×[−1,1]`.
/// Contains the diagonal points `(−ih, ih)` and always `(0,−1)` and
/// `(−1,1)`.
pub fn gen_boxes_e521(h: f64) -> Result<PointCloud> {
    let n = grid_steps(h)?;
    let mut rows = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            let inside = if i <= 0 { j >= -i } else { true };
            if inside {
                rows.push(vec![i as f64 * h, j as f64 * h]);
            }
        }
    }
    rows.push(vec![0.0, -1.0]);
    rows.push(vec![-1.0, 1.0]);
    PointCloud::from_rows(rows, Tolerance::default())
}

/// Grid of step `h` over `{−1 ≤ y_1 ≤ 0, −y_1 ≤ y_2 ≤ 1} ∪
/// {0 ≤ y_1 ≤ 1, −√y_1/2 ≤ y_2 ≤ 1}`, plus the points `(y_1, −√y_1/2)` on
/// the curved lower edge.
pub fn gen_sqrt_boxes_e523(h: f64) -> Result<PointCloud> {
    let n = grid_steps(h)?;
    let mut rows = Vec::new();
    for i in -n..=n {
        let y1 = i as f64 * h;
        let lower = if i <= 0 { -y1 } else { -0.5 * y1.sqrt() };
        if i > 0 {
            rows.push(vec![y1, lower]);
        }
        for j in -n..=n {
            let y2 = j as f64 * h;
            let inside = if i <= 0 { j >= -i } else { y2 >= lower };
            if inside {
                rows.push(vec![y1, y2]);
            }
        }
    }
    PointCloud::from_rows(rows, Tolerance::default())
}

/// The diagonal segment `y_1 + y_2 = 0, y_1 ∈ [−1,1]` at step `h`, plus
/// the vertical ray `y_1 = 1, y_2 ≤ −1` sampled down to `y_2 = −1 − tail`.
pub fn gen_staircase_e522(h: f64, tail: f64) -> Result<PointCloud> {
    let n = grid_steps(h)?;
    if !(tail >= 0.0 && tail.is_finite()) {
        return Err(Error::param("tail", "must be a finite number >= 0"));
    }
    let mut rows: Vec<Vec<f64>> = (-n..=n).map(|i| vec![i as f64 * h, -(i as f64) * h]).collect();
    rows.push(vec![-1.0, 1.0]);
    rows.push(vec![1.0, -1.0]);
    let m = (tail / h + 1e-9).floor() as i64;
    rows.extend((1..=m).map(|j| vec![1.0, -1.0 - j as f64 * h]));
    PointCloud::from_rows(rows, Tolerance::default())
}

/// `g(x) = eˣ − 1` for `x < 0`, `x² + 2x` otherwise.
pub fn staircase_g(x: f64) -> f64 {
    if x < 0.0 {
        x.exp_m1()
    } else {
        x * x + 2.0 * x
    }
}

/// `φ(y) = g(y_1) + g(y_2)`; strictly convex and strictly monotone, with
/// unique minimizer `(0,0)` on the staircase set.
pub fn staircase_phi(y: &[f64]) -> f64 {
    y.iter().copied().map(staircase_g).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    /// Uniform directions with radius in `[0.9, 1.1]`.
    SphereShell,
    Gaussian,
    /// `−|g|/‖g‖` for Gaussian `g`: the negative orthant part of the unit
    /// sphere, so every point is Pareto minimal.
    ConvexFrontier,
}

pub fn gen_random(n: usize, ell: usize, seed: u64, dist: Distribution) -> Result<PointCloud> {
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    if ell < 2 {
        return Err(Error::param("ell", "must be >= 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let coords: Vec<f64> = match dist {
            Distribution::SphereShell => {
                let r = rng.random_range(0.9..=1.1);
                unit_vector(&mut rng, ell).into_iter().map(|v| r * v).collect()
            }
            Distribution::Gaussian => (0..ell).map(|_| rng.sample(StandardNormal)).collect(),
            Distribution::ConvexFrontier => unit_vector(&mut rng, ell).into_iter().map(|v| -v.abs()).collect(),
        };
        points.push(Point::new(coords)?);
    }
    PointCloud::new(points, None, Tolerance::default())
}

/// A reproducible corpus instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSpec {
    Hyperbola {
        #[serde(rename = "T")]
        t_range: f64,
        n: usize,
    },
    BoxesE521 {
        h: f64,
    },
    StaircaseE522 {
        h: f64,
        tail: f64,
    },
    SqrtBoxesE523 {
        h: f64,
    },
    Random {
        n: usize,
        ell: usize,
        seed: u64,
        distribution: Distribution,
    },
}

impl InstanceSpec {
    pub fn generate(&self) -> Result<PointCloud> {
        match *self {
            InstanceSpec::Hyperbola { t_range, n } => gen_hyperbola(t_range, n),
            InstanceSpec::BoxesE521 { h } => gen_boxes_e521(h),
            InstanceSpec::StaircaseE522 { h, tail } => gen_staircase_e522(h, tail),
            InstanceSpec::SqrtBoxesE523 { h } => gen_sqrt_boxes_e523(h),
            InstanceSpec::Random {
                n,
                ell,
                seed,
                distribution,
            } => gen_random(n, ell, seed, distribution),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efficiency::{geoffrion_minimal_k, gmin_set, min_set, DominationOracle, TradeOff};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn all_min(c: &PointCloud) -> Vec<usize> {
        min_set(c, &DominationOracle::OrthantClosed, tol()).unwrap()
    }

    #[test]
    fn hyperbola_contains_minus_one_and_is_efficient() {
        let c = gen_hyperbola(10.0, 3).unwrap();
        let i = c.find(&[-1.0, -1.0], tol()).unwrap();
        assert_eq!(all_min(&c), vec![0, 1, 2]);
        // (9)/(0.9)
        let k = geoffrion_minimal_k(&c, i, tol()).unwrap().finite().unwrap();
        assert!((k - 10.0).abs() < 1e-9);
        let c = gen_hyperbola(10.0, 21).unwrap();
        assert_eq!(all_min(&c).len(), 21);
        assert!(gen_hyperbola(1.0, 5).is_err());
        assert!(gen_hyperbola(5.0, 2).is_err());
    }

    #[test]
    fn boxes_pareto_set() {
        let h = 0.05;
        let c = gen_boxes_e521(h).unwrap();
        assert!(c.find(&[0.0, -1.0], tol()).is_some());
        let mut expected: Vec<usize> = (1..=20)
            .map(|i| c.find(&[-(i as f64) * h, i as f64 * h], tol()).unwrap())
            .collect();
        expected.push(c.find(&[0.0, -1.0], tol()).unwrap());
        expected.sort();
        assert_eq!(all_min(&c), expected);
        assert!(gen_boxes_e521(0.2).is_err());
    }

    #[test]
    fn boxes_trade_off_at_segment() {
        for (eps, h) in [(0.1, 0.05), (0.01, 0.01)] {
            let c = gen_boxes_e521(h).unwrap();
            let i = c.find(&[-eps, eps], tol()).unwrap();
            let k = geoffrion_minimal_k(&c, i, tol()).unwrap().finite().unwrap();
            let expected = (1.0 + eps) / eps;
            assert!(((k - expected) / expected).abs() < 0.01, "{k} vs {expected}");
        }
    }

    #[test]
    fn staircase_fixture() {
        let c = gen_staircase_e522(0.1, 5.0).unwrap();
        let origin = c.find(&[0.0, 0.0], tol()).unwrap();
        for (i, y) in c.points().iter().enumerate() {
            if i != origin {
                assert!(staircase_phi(y.coords()) > 0.0);
            }
        }
        assert_eq!(staircase_phi(&[0.0, 0.0]), 0.0);
        // the bottom of the ray has the largest trade-off against (1, -1)
        let k = geoffrion_minimal_k(&c, origin, tol()).unwrap();
        assert!(matches!(k, TradeOff::Bounded(v) if v >= 1.0));
    }

    #[test]
    fn sqrt_boxes_fixture() {
        let c = gen_sqrt_boxes_e523(0.05).unwrap();
        for y in c.points() {
            let (a, b) = (y.coords()[0], y.coords()[1]);
            let ok = if a <= 0.0 { b >= -a - 1e-12 } else { b >= -0.5 * a.sqrt() - 1e-12 };
            assert!(ok && b <= 1.0 + 1e-12 && (-1.0..=1.0).contains(&a));
        }
        assert!(!gmin_set(&c, tol()).unwrap().is_empty());
    }

    #[test]
    fn random_families() {
        assert_eq!(gen_random(1, 3, 0, Distribution::Gaussian).unwrap().len(), 1);
        let c = gen_random(50, 2, 7, Distribution::ConvexFrontier).unwrap();
        assert_eq!(all_min(&c).len(), c.len());
        for d in [Distribution::SphereShell, Distribution::Gaussian, Distribution::ConvexFrontier] {
            assert_eq!(gen_random(20, 4, 11, d).unwrap(), gen_random(20, 4, 11, d).unwrap());
        }
        assert!(gen_random(0, 2, 0, Distribution::Gaussian).is_err());
    }

    #[test]
    fn instance_spec_json() {
        let spec = InstanceSpec::Random {
            n: 5,
            ell: 3,
            seed: 9,
            distribution: Distribution::SphereShell,
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"kind\":\"random\""));
        let back: InstanceSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.generate().unwrap(), spec.generate().unwrap());
        let h: InstanceSpec = serde_json::from_str(r#"{"kind":"hyperbola","T":10.0,"n":3}"#).unwrap();
        assert_eq!(h.generate().unwrap().len(), 3);
    }
}
