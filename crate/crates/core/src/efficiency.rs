//! Efficient, weakly efficient and properly efficient subsets of finite
//! point clouds.
//!
//! `Min(F, D)` keeps `y⁰ ∈ F` when no other `y ∈ F` has `y⁰ − y ∈ D`.
//! Geoffrion proper efficiency is decided through the minimal trade-off
//! constant `K*` ([`geoffrion_minimal_k`]); everything else (the `D^K`
//! and polyhedral-cone characterisations, Benson's cone condition, the
//! existence conditions) is implemented independently so the routes can be
//! cross-checked against each other.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{
    make_cp, make_csm, make_cw_eps, unit_vector, HalfspaceCone, Mode, UnionConeDK,
};
use crate::error::{check_dim, Error, Result};
use crate::gerstewitz::{GerstewitzForm, SumForm};
use crate::lp::{self, Constraint};
use crate::point::{Point, Tolerance};
use crate::SAFETY_MARGIN;

/// Benson's check enumerates per-point LPs only up to these sizes.
pub const BENSON_MAX_ELL: usize = 6;
pub const BENSON_MAX_POINTS: usize = 64;

/// A finite, deduplicated set `F ⊆ R^ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    ell: usize,
    points: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    #[serde(skip)]
    merged: usize,
}

impl PointCloud {
    /// Builds a cloud, merging points that agree coordinate-wise within
    /// `tau`. The first occurrence (and its label) is kept; input order is
    /// otherwise preserved.
    pub fn new(points: Vec<Point>, labels: Option<Vec<String>>, tol: Tolerance) -> Result<Self> {
        let ell = match points.first() {
            Some(p) => p.dim(),
            None => return Err(Error::param("points", "a cloud needs at least one point")),
        };
        for p in &points {
            check_dim(ell, p.dim())?;
        }
        if let Some(l) = &labels {
            check_dim(points.len(), l.len())?;
        }
        let keep = dedup_mask(&points, tol);
        let merged = keep.iter().filter(|&&k| !k).count();
        let labels = labels.map(|l| {
            l.into_iter()
                .zip(&keep)
                .filter_map(|(s, &k)| k.then_some(s))
                .collect()
        });
        let points = points
            .into_iter()
            .zip(&keep)
            .filter_map(|(p, &k)| k.then_some(p))
            .collect();
        Ok(PointCloud {
            ell,
            points,
            labels,
            merged,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, tol: Tolerance) -> Result<Self> {
        let points = rows.into_iter().map(Point::new).collect::<Result<Vec<_>>>()?;
        PointCloud::new(points, None, tol)
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Result<&Point> {
        self.points.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.points.len(),
        })
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Number of input points merged away as duplicates.
    pub fn merged(&self) -> usize {
        self.merged
    }

    /// Index of the point equal to `y` within `tau`, if any.
    pub fn find(&self, y: &[f64], tol: Tolerance) -> Option<usize> {
        self.points.iter().position(|p| approx_eq(p.coords(), y, tol))
    }
}

fn approx_eq(a: &[f64], b: &[f64], tol: Tolerance) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol.tau())
}

// Sweep over points sorted by their first coordinate; only points within
// tau in that coordinate can be duplicates.
fn dedup_mask(points: &[Point], tol: Tolerance) -> Vec<bool> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a].coords()[0]
            .partial_cmp(&points[b].coords()[0])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut keep = vec![true; points.len()];
    for pos in 0..order.len() {
        let p = order[pos];
        let x0 = points[p].coords()[0];
        let mut q_pos = pos;
        while q_pos > 0 {
            q_pos -= 1;
            let q = order[q_pos];
            if x0 - points[q].coords()[0] > tol.tau() {
                break;
            }
            if keep[q] && approx_eq(points[p].coords(), points[q].coords(), tol) {
                // keep whichever came first in the input
                if q < p {
                    keep[p] = false;
                } else {
                    keep[q] = false;
                }
                break;
            }
        }
    }
    keep
}

/// The domination set `D` used in `Min(F, D)`.
#[derive(Debug, Clone, PartialEq)]
pub enum DominationOracle {
    /// `R^ℓ_+`; `Min(F)` are the Pareto minima.
    OrthantClosed,
    /// `int R^ℓ_+`; `Min(F, int R^ℓ_+) = WMin(F)`.
    OrthantOpen,
    Cone(HalfspaceCone, Mode),
    Dk(UnionConeDK, Mode),
}

impl DominationOracle {
    pub fn contains(&self, d: &[f64], tol: Tolerance) -> Result<bool> {
        match self {
            DominationOracle::OrthantClosed => Ok(d.iter().all(|&v| tol.nonnegative(v))),
            DominationOracle::OrthantOpen => Ok(d.iter().all(|&v| tol.strictly_positive(v))),
            DominationOracle::Cone(h, Mode::Closure) => h.contains_closed(d, tol),
            DominationOracle::Cone(h, Mode::Open) => h.contains_interior(d, tol),
            DominationOracle::Dk(dk, mode) => dk.contains(d, *mode, tol),
        }
    }
}

/// Indices `i` with no `j ≠ i` such that `y^i − y^j ∈ D`.
pub fn min_set(cloud: &PointCloud, d: &DominationOracle, tol: Tolerance) -> Result<Vec<usize>> {
    let pts = cloud.points();
    let mut out = Vec::new();
    let mut diff = vec![0.0; cloud.ell()];
    'outer: for (i, yi) in pts.iter().enumerate() {
        for (j, yj) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            for (c, (a, b)) in diff.iter_mut().zip(yi.coords().iter().zip(yj.coords())) {
                *c = a - b;
            }
            if d.contains(&diff, tol)? {
                continue 'outer;
            }
        }
        out.push(i);
    }
    Ok(out)
}

/// Minimal Geoffrion trade-off constant of a point; `Unbounded` when no
/// finite constant exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TradeOff {
    Bounded(f64),
    Unbounded,
}

impl TradeOff {
    pub fn finite(self) -> Option<f64> {
        match self {
            TradeOff::Bounded(k) => Some(k),
            TradeOff::Unbounded => None,
        }
    }

    pub fn is_bounded(self) -> bool {
        matches!(self, TradeOff::Bounded(_))
    }
}

impl fmt::Display for TradeOff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TradeOff::Bounded(k) => write!(f, "{k}"),
            TradeOff::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Sentinel {
    Unbounded,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TradeOffRepr {
    Bounded(f64),
    Sentinel(Sentinel),
}

impl Serialize for TradeOff {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            TradeOff::Bounded(k) => TradeOffRepr::Bounded(k),
            TradeOff::Unbounded => TradeOffRepr::Sentinel(Sentinel::Unbounded),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TradeOff {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match TradeOffRepr::deserialize(d)? {
            TradeOffRepr::Bounded(k) => TradeOff::Bounded(k),
            TradeOffRepr::Sentinel(Sentinel::Unbounded) => TradeOff::Unbounded,
        })
    }
}

/// `K*(y⁰)`: the max over competitors `y` and coordinates `i` with
/// `y_i < y⁰_i − tau` of the best compensating ratio
/// `min_{j ≠ i, y_j > y⁰_j + tau} (y⁰_i − y_i)/(y_j − y⁰_j)`.
///
/// A pair without any compensating `j` makes the constant unbounded; no
/// pairs at all give 0.
pub fn geoffrion_minimal_k(cloud: &PointCloud, index: usize, tol: Tolerance) -> Result<TradeOff> {
    let y0 = cloud.point(index)?.coords();
    let tau = tol.tau();
    let mut worst: f64 = 0.0;
    for (idx, y) in cloud.points().iter().enumerate() {
        if idx == index {
            continue;
        }
        let y = y.coords();
        for i in 0..y0.len() {
            let loss = y0[i] - y[i];
            if loss <= tau {
                continue;
            }
            let best = (0..y0.len())
                .filter(|&j| j != i && y[j] - y0[j] > tau)
                .map(|j| loss / (y[j] - y0[j]))
                .fold(f64::INFINITY, f64::min);
            if best.is_infinite() {
                return Ok(TradeOff::Unbounded);
            }
            worst = worst.max(best);
        }
    }
    Ok(TradeOff::Bounded(worst))
}

/// `GMin(F)` as `(index, K*)` pairs.
pub fn gmin_set(cloud: &PointCloud, tol: Tolerance) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for i in 0..cloud.len() {
        if let TradeOff::Bounded(k) = geoffrion_minimal_k(cloud, i, tol)? {
            out.push((i, k));
        }
    }
    Ok(out)
}

/// `Min(F, D^K)` with open `D^K`.
pub fn gmin_via_dk(cloud: &PointCloud, k: f64, tol: Tolerance) -> Result<Vec<usize>> {
    let dk = UnionConeDK::new(k, cloud.ell())?;
    min_set(cloud, &DominationOracle::Dk(dk, Mode::Open), tol)
}

/// `Min(F, H)` for a closed polyhedral cone `H`.
pub fn gmin_via_cone(cloud: &PointCloud, h: &HalfspaceCone, tol: Tolerance) -> Result<Vec<usize>> {
    check_dim(cloud.ell(), h.ell())?;
    min_set(cloud, &DominationOracle::Cone(h.clone(), Mode::Closure), tol)
}

/// The constant used to build certificates from `K*`: `K*·(1+δ)`, or 1 when
/// `K* = 0` (no trade-offs at all, every `K > 0` works).
pub fn certificate_k(k_star: f64) -> f64 {
    if k_star > 0.0 {
        k_star * (1.0 + SAFETY_MARGIN)
    } else {
        1.0
    }
}

/// Parameters of a polyhedral cone from one of the orthant-enclosing
/// families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ConeParam {
    Cp { p: f64 },
    Csm { s: Vec<f64>, m: f64 },
    Cw { w: Vec<f64>, eps: f64 },
}

impl ConeParam {
    pub fn cone(&self, ell: usize) -> Result<HalfspaceCone> {
        match self {
            ConeParam::Cp { p } => make_cp(*p, ell),
            ConeParam::Csm { s, m } => make_csm(&Point::new(s.clone())?, *m),
            ConeParam::Cw { w, eps } => make_cw_eps(&Point::new(w.clone())?, *eps),
        }
    }
}

/// A scalarizing functional carried by a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Functional {
    Sum(SumForm),
    Gerstewitz(GerstewitzForm),
}

/// Witness that a point of a cloud is properly efficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub index: usize,
    pub k_star: TradeOff,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeParam>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<Functional>,
    /// Minimum of the functional over the cloud; 0 for a valid certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified_min: Option<f64>,
}

pub(crate) fn require_bounded(cloud: &PointCloud, index: usize, tol: Tolerance) -> Result<f64> {
    geoffrion_minimal_k(cloud, index, tol)?
        .finite()
        .ok_or(Error::NotProperlyEfficient { index })
}

/// Polyhedral-cone certificate: `p = ℓ·K*·(1+δ)` and a check that the
/// point is efficient with respect to `C^p`.
pub fn henig_certificate(cloud: &PointCloud, index: usize, tol: Tolerance) -> Result<Certificate> {
    let k_star = require_bounded(cloud, index, tol)?;
    let p = cloud.ell() as f64 * certificate_k(k_star);
    let cone = make_cp(p, cloud.ell())?;
    if !gmin_via_cone(cloud, &cone, tol)?.contains(&index) {
        return Err(Error::Verification {
            op: "henig_certificate",
            detail: format!("point {index} is not in Min(F, C^p) for p = {p}"),
        });
    }
    Ok(Certificate {
        index,
        k_star: TradeOff::Bounded(k_star),
        cone: Some(ConeParam::Cp { p }),
        functional: None,
        verified_min: None,
    })
}

/// Whether the closed conic hull of `generators` meets `−R^ℓ_+` only at the
/// origin.
///
/// Solves `∃ α ≥ 0 : Σ α_g g ≤ tau·1, 1ᵀ(Σ α_g g) = −1`; the normalisation
/// on the target side keeps the tolerance independent of generator scale.
pub fn cone_meets_negative_orthant_only_at_origin(generators: &[Vec<f64>], tol: Tolerance) -> bool {
    let ell = generators[0].len();
    let ineqs: Vec<Constraint> = (0..ell)
        .map(|c| Constraint {
            coeffs: generators.iter().map(|g| g[c]).collect(),
            rhs: tol.tau(),
        })
        .collect();
    let eq = Constraint {
        coeffs: generators.iter().map(|g| g.iter().sum()).collect(),
        rhs: -1.0,
    };
    !lp::feasible(generators.len(), &ineqs, &[eq], 1e-12)
}

/// Benson proper efficiency with `D = R^ℓ_+`:
/// `cl cone(F + D − y⁰) ∩ (−D) = {0}`.
///
/// For finite `F` the closed cone is the union over `y ∈ F` of the convex
/// cones generated by `y − y⁰` and the unit vectors; each piece is decided
/// by a small LP.
pub fn benson_check(cloud: &PointCloud, index: usize, tol: Tolerance) -> Result<bool> {
    let ell = cloud.ell();
    if ell > BENSON_MAX_ELL || cloud.len() > BENSON_MAX_POINTS {
        return Err(Error::Unsupported(format!(
            "benson_check is limited to ℓ ≤ {BENSON_MAX_ELL} and |F| ≤ {BENSON_MAX_POINTS} \
             (got ℓ = {ell}, |F| = {}); use the Geoffrion trade-off oracle instead",
            cloud.len()
        )));
    }
    let y0 = cloud.point(index)?;
    let units: Vec<Vec<f64>> = (0..ell)
        .map(|i| (0..ell).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for (idx, y) in cloud.points().iter().enumerate() {
        if idx == index {
            continue;
        }
        let mut gens = Vec::with_capacity(ell + 1);
        gens.push(y.sub(y0));
        gens.extend(units.iter().cloned());
        if !cone_meets_negative_orthant_only_at_origin(&gens, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One member of a cone family used in the existence conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ExistenceFamily {
    Dk { k: f64 },
    Cp { p: f64 },
    Csm { s: Vec<f64>, m: f64 },
    Cw { w: Vec<f64>, eps: f64 },
}

/// `(F − u) ∩ (−D^K) = ∅` for the `D^K` member, and
/// `(F − u) ∩ (−C) ⊆ {0}` for the polyhedral members.
pub fn existence_check(cloud: &PointCloud, u: &Point, family: &ExistenceFamily, tol: Tolerance) -> Result<bool> {
    let ell = cloud.ell();
    check_dim(ell, u.dim())?;
    let oracle = match family {
        ExistenceFamily::Dk { k } => DominationOracle::Dk(UnionConeDK::new(*k, ell)?, Mode::Open),
        ExistenceFamily::Cp { p } => DominationOracle::Cone(make_cp(*p, ell)?, Mode::Closure),
        ExistenceFamily::Csm { s, m } => {
            DominationOracle::Cone(make_csm(&Point::new(s.clone())?, *m)?, Mode::Closure)
        }
        ExistenceFamily::Cw { w, eps } => {
            DominationOracle::Cone(make_cw_eps(&Point::new(w.clone())?, *eps)?, Mode::Closure)
        }
    };
    for y in cloud.points() {
        let d = u.sub(y);
        if matches!(oracle, DominationOracle::Cone(..)) && d.iter().all(|v| v.abs() <= tol.tau()) {
            continue;
        }
        if oracle.contains(&d, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which family parameter to search, and its lower (or upper, for `ε`)
/// bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySearch {
    /// `K ≥ K_0`.
    Dk { k0: f64 },
    /// `p ≥ p̄`.
    Cp { p_bar: f64 },
    /// `m > 0`.
    Csm { s: Vec<f64> },
    /// `ε ∈ (0, ε_0]`.
    Cw { w: Vec<f64>, eps0: f64 },
}

impl FamilySearch {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySearch::Dk { .. } => "dk",
            FamilySearch::Cp { .. } => "cp",
            FamilySearch::Csm { .. } => "csm",
            FamilySearch::Cw { .. } => "cw",
        }
    }
}

const SEARCH_DOUBLINGS: i32 = 80;

/// Geometric sweep of the family parameter towards the orthant; returns
/// the first member for which [`existence_check`] holds.
pub fn existence_search(
    cloud: &PointCloud,
    u: &Point,
    search: &FamilySearch,
    tol: Tolerance,
) -> Result<Option<ExistenceFamily>> {
    for t in 0..=SEARCH_DOUBLINGS {
        let scale = 2f64.powi(t);
        let member = match search {
            FamilySearch::Dk { k0 } => ExistenceFamily::Dk { k: k0 * scale },
            FamilySearch::Cp { p_bar } => ExistenceFamily::Cp { p: p_bar * scale },
            FamilySearch::Csm { s } => ExistenceFamily::Csm {
                s: s.clone(),
                m: scale / 1024.0,
            },
            FamilySearch::Cw { w, eps0 } => ExistenceFamily::Cw {
                w: w.clone(),
                eps: eps0 / scale,
            },
        };
        if existence_check(cloud, u, &member, tol)? {
            return Ok(Some(member));
        }
    }
    Ok(None)
}

/// Nehse–Iwanow properly efficient points of a finite (hence closed)
/// cloud, each with its convex certificate functional. For closed sets
/// this set is empty or equal to `GMin(F)`.
pub fn ni_pmin(cloud: &PointCloud, k: &Point, tol: Tolerance) -> Result<Vec<Certificate>> {
    gmin_set(cloud, tol)?
        .into_iter()
        .map(|(i, _)| crate::scalarize::build_proper_functional(cloud, i, k, tol))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub added: usize,
    pub violations: usize,
}

/// Adds `n_extra` points `y + d` (`y ∈ F`, `d ∈ R^ℓ_+ \ {0}`) and checks
/// that `GMin` of the enlarged cloud is exactly `GMin(F)`.
pub fn plus_orthant_invariance(
    cloud: &PointCloud,
    n_extra: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<InvarianceReport> {
    if n_extra == 0 {
        return Err(Error::param("n_extra", "must be >= 1"));
    }
    let ell = cloud.ell();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all: Vec<Point> = cloud.points().to_vec();
    for _ in 0..n_extra {
        let base = &cloud.points()[rng.random_range(0..cloud.len())];
        let dir: Vec<f64> = unit_vector(&mut rng, ell).into_iter().map(f64::abs).collect();
        let len = rng.random_range(0.05..2.0);
        let coords: Vec<f64> = base.coords().iter().zip(&dir).map(|(b, d)| b + len * d).collect();
        all.push(Point::new(coords)?);
    }
    let n = cloud.len();
    let union = PointCloud::new(all, None, tol)?;
    let before: Vec<usize> = gmin_set(cloud, tol)?.into_iter().map(|(i, _)| i).collect();
    let after: Vec<usize> = gmin_set(&union, tol)?.into_iter().map(|(i, _)| i).collect();
    let after_original: Vec<usize> = after.iter().copied().filter(|&i| i < n).collect();
    let entered = after.iter().filter(|&&i| i >= n).count();
    let changed = before
        .iter()
        .filter(|i| !after_original.contains(i))
        .chain(after_original.iter().filter(|i| !before.contains(i)))
        .count();
    Ok(InvarianceReport {
        added: union.len() - n,
        violations: changed + entered,
    })
}
