//! Scalarizing functionals whose minimizers over a cloud are properly
//! efficient points, built and checked on construction.

use crate::cones::{make_cp, HalfspaceCone};
use crate::efficiency::{
    certificate_k, gmin_set, require_bounded, Certificate, ConeParam, Functional, PointCloud, TradeOff,
};
use crate::error::{check_dim, Error, Result};
use crate::gerstewitz::{GerstewitzForm, Scalarizer, SumForm};
use crate::point::{dot, Point, Tolerance};

/// Absolute tolerance on the zero minimum of a certificate functional.
pub const ZERO_MIN_TOL: f64 = 1e-9;

impl Functional {
    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        match self {
            Functional::Sum(s) => s.eval(y),
            Functional::Gerstewitz(g) => g.eval(y),
        }
    }

    fn as_scalarizer(&self) -> &dyn Scalarizer {
        match self {
            Functional::Sum(s) => s,
            Functional::Gerstewitz(g) => g,
        }
    }
}

/// Indices whose value lies within `tau` of the minimum over the cloud.
pub fn argmin_scan(cloud: &PointCloud, f: &dyn Scalarizer, tol: Tolerance) -> Result<Vec<usize>> {
    check_dim(cloud.ell(), f.ell())?;
    let values: Vec<f64> = cloud.points().iter().map(|p| f.value(p.coords())).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v - min <= tol.tau())
        .map(|(i, _)| i)
        .collect())
}

fn tripwire(op: &'static str, detail: String) -> Error {
    Error::Verification { op, detail }
}

// φ(y⁰) = 0 and φ(y) > tau for every other y; returns the minimum value.
fn verify_unique_zero_min(
    op: &'static str,
    cloud: &PointCloud,
    index: usize,
    f: &dyn Scalarizer,
    tol: Tolerance,
) -> Result<f64> {
    let mut min = f64::INFINITY;
    for (i, y) in cloud.points().iter().enumerate() {
        let v = f.value(y.coords());
        min = min.min(v);
        if i == index {
            if v.abs() > ZERO_MIN_TOL {
                return Err(tripwire(op, format!("value {v:e} at the certified point {index} is not 0")));
            }
        } else if !tol.strictly_positive(v) {
            return Err(tripwire(op, format!("value {v:e} at point {i} is not positive")));
        }
    }
    Ok(min)
}

/// Sum-of-Gerstewitz certificate: `φ = Σ_i φ_{−cl D^{i,K},k}` anchored at
/// `y⁰`, with `K = K*(1+δ)`; `φ(y − y⁰) > 0` for all other points.
pub fn build_proper_functional(cloud: &PointCloud, index: usize, k: &Point, tol: Tolerance) -> Result<Certificate> {
    check_dim(cloud.ell(), k.dim())?;
    let k_star = require_bounded(cloud, index, tol)?;
    let y0 = cloud.point(index)?.coords().to_vec();
    let form = SumForm::new(certificate_k(k_star), k)?.anchored_at(&y0)?;
    let min = verify_unique_zero_min("build_proper_functional", cloud, index, &form, tol)?;
    Ok(Certificate {
        index,
        k_star: TradeOff::Bounded(k_star),
        cone: None,
        functional: Some(Functional::Sum(form)),
        verified_min: Some(min),
    })
}

/// `argmin_F φ_{a−H,k}`, checked to lie in `GMin(F)`.
pub fn cone_scalarization_argmin(
    cloud: &PointCloud,
    a: &Point,
    h: &HalfspaceCone,
    k: &Point,
    tol: Tolerance,
) -> Result<Vec<usize>> {
    let ell = cloud.ell();
    check_dim(ell, a.dim())?;
    check_dim(ell, h.ell())?;
    check_dim(ell, k.dim())?;
    if !h.strictly_contains_orthant(tol) {
        return Err(Error::OrthantNotInterior);
    }
    let form = GerstewitzForm::for_cone(h, a, k, tol)?;
    let argmin = argmin_scan(cloud, &form, tol)?;
    let gmin: Vec<usize> = gmin_set(cloud, tol)?.into_iter().map(|(i, _)| i).collect();
    if let Some(bad) = argmin.iter().find(|i| !gmin.contains(i)) {
        return Err(tripwire(
            "cone_scalarization_argmin",
            format!("minimizer {bad} is not properly efficient"),
        ));
    }
    Ok(argmin)
}

/// `φ_{y⁰−C^p,k}` with `p = ℓ·K*(1+δ)`: `y⁰` is its unique minimizer on the
/// cloud, with value 0.
pub fn unique_minimizer_certificate(
    cloud: &PointCloud,
    index: usize,
    k: &Point,
    tol: Tolerance,
) -> Result<Certificate> {
    check_dim(cloud.ell(), k.dim())?;
    let k_star = require_bounded(cloud, index, tol)?;
    let p = cloud.ell() as f64 * certificate_k(k_star);
    let h = make_cp(p, cloud.ell())?;
    let form = GerstewitzForm::for_cone(&h, cloud.point(index)?, k, tol)?;
    let argmin = argmin_scan(cloud, &form, tol)?;
    if argmin != [index] {
        return Err(tripwire(
            "unique_minimizer_certificate",
            format!("argmin is {argmin:?}, expected [{index}]"),
        ));
    }
    let min = form.value(cloud.point(index)?.coords());
    if min.abs() > ZERO_MIN_TOL {
        return Err(tripwire("unique_minimizer_certificate", format!("minimum {min:e} is not 0")));
    }
    Ok(Certificate {
        index,
        k_star: TradeOff::Bounded(k_star),
        cone: Some(ConeParam::Cp { p }),
        functional: Some(Functional::Gerstewitz(form)),
        verified_min: Some(min),
    })
}

/// Minimizers of `w·y` for strictly positive weights; always properly
/// efficient.
pub fn linear_scalarization(cloud: &PointCloud, weights: &Point, tol: Tolerance) -> Result<Vec<usize>> {
    check_dim(cloud.ell(), weights.dim())?;
    if !weights.is_strictly_positive() {
        return Err(Error::param("weights", "must be strictly positive"));
    }
    let values: Vec<f64> = cloud.points().iter().map(|p| dot(weights.coords(), p.coords())).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let argmin: Vec<usize> = (0..values.len()).filter(|&i| values[i] - min <= tol.tau()).collect();
    let gmin: Vec<usize> = gmin_set(cloud, tol)?.into_iter().map(|(i, _)| i).collect();
    if let Some(bad) = argmin.iter().find(|i| !gmin.contains(i)) {
        return Err(tripwire("linear_scalarization", format!("minimizer {bad} is not properly efficient")));
    }
    Ok(argmin)
}

impl Certificate {
    /// Re-checks the certificate against `cloud`: the trade-off constant,
    /// efficiency with respect to the cone, and the unique zero minimum of
    /// the functional. Returns the recomputed minimum (0 without a
    /// functional).
    pub fn verify(&self, cloud: &PointCloud, tol: Tolerance) -> Result<f64> {
        const OP: &str = "certificate_verify";
        let k_star = crate::efficiency::geoffrion_minimal_k(cloud, self.index, tol)?;
        if k_star != self.k_star {
            return Err(tripwire(OP, format!("K* is {k_star}, certificate says {}", self.k_star)));
        }
        if let Some(param) = &self.cone {
            let h = param.cone(cloud.ell())?;
            if !crate::efficiency::gmin_via_cone(cloud, &h, tol)?.contains(&self.index) {
                return Err(tripwire(OP, format!("point {} is not efficient for {param:?}", self.index)));
            }
        }
        match &self.functional {
            None => Ok(0.0),
            Some(f) => {
                let s = f.as_scalarizer();
                let argmin = argmin_scan(cloud, s, tol)?;
                if argmin != [self.index] {
                    return Err(tripwire(OP, format!("argmin is {argmin:?}")));
                }
                let min = s.value(cloud.point(self.index)?.coords());
                if min.abs() > ZERO_MIN_TOL {
                    return Err(tripwire(OP, format!("minimum {min:e} is not 0")));
                }
                Ok(min)
            }
        }
    }
}
