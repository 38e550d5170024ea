//! Polyhedral cones `{y : By ≥ 0}`, the open union cones `D^K`, and the
//! parametric families that strictly enclose the nonnegative orthant.
//!
//! Membership follows one tolerance convention everywhere: a non-strict
//! inequality holds when its slack is `>= -tau`, a strict one when its slack
//! is `> tau`.
//!
//! The families, all with `ℓ` rows indexed by `i`:
//!
//! | constructor            | row `i`                                   |
//! |------------------------|-------------------------------------------|
//! | [`make_cp`]            | `p·y_i + Σ_{j≠i} y_j`                     |
//! | [`make_csm`]           | `y_i + (s/m)·y`                           |
//! | [`make_cw_eps`]        | `w_i·y_i + ε·Σ_j w_j y_j`                 |
//! | [`make_cw_comma_eps`]  | `w_i·y_i + ε·Σ_j y_j`                     |
//! | [`make_lambda`]        | `(1-(ℓ-1)ε)·y_i + ε·Σ_{j≠i} y_j`          |
//!
//! [`make_cl_diK`] gives the closure of one piece `D^{i,K}` of `D^K`: rows
//! `e_i` and `e_i + K·e_j` for `j ≠ i`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::point::{dot, Point, Tolerance};
use crate::SAFETY_MARGIN;

/// Maximum number of candidate draws per [`sample_cone`] call.
pub const REJECTION_BUDGET: usize = 1_000_000;

/// The closed polyhedral cone `{y : B_j·y ≥ 0 for all rows j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceCone {
    rows: Vec<Vec<f64>>,
}

impl HalfspaceCone {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let ell = match rows.first() {
            Some(r) => r.len(),
            None => return Err(Error::param("rows", "a cone needs at least one row")),
        };
        if ell < 2 {
            return Err(Error::param("rows", format!("dimension {ell} < 2")));
        }
        for (j, row) in rows.iter().enumerate() {
            check_dim(ell, row.len())?;
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::param("rows", format!("row {j} has a non-finite entry")));
            }
            if row.iter().all(|&v| v == 0.0) {
                return Err(Error::param("rows", format!("row {j} is all zero")));
            }
        }
        Ok(HalfspaceCone { rows })
    }

    /// The nonnegative orthant, rows `e_1, …, e_ℓ`.
    pub fn orthant(ell: usize) -> Result<Self> {
        check_ell(ell)?;
        HalfspaceCone::new(
            (0..ell)
                .map(|i| (0..ell).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn ell(&self) -> usize {
        self.rows[0].len()
    }

    pub fn slacks<'a>(&'a self, y: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        self.rows.iter().map(move |r| dot(r, y))
    }

    pub fn contains_closed(&self, y: &[f64], tol: Tolerance) -> Result<bool> {
        check_dim(self.ell(), y.len())?;
        Ok(self.slacks(y).all(|s| tol.nonnegative(s)))
    }

    /// All-rows-strict membership. Exact for the full-dimensional cones the
    /// family constructors produce; a redundant caller-supplied row that is
    /// tight on the whole cone would make the interior look empty.
    pub fn contains_interior(&self, y: &[f64], tol: Tolerance) -> Result<bool> {
        check_dim(self.ell(), y.len())?;
        Ok(self.slacks(y).all(|s| tol.strictly_positive(s)))
    }

    /// Every entry `B_{j,i} > tau`, i.e. `R^ℓ_+ \ {0} ⊆ int H`.
    pub fn strictly_contains_orthant(&self, tol: Tolerance) -> bool {
        self.rows
            .iter()
            .all(|r| r.iter().all(|&v| tol.strictly_positive(v)))
    }

    /// Every entry `B_{j,i} >= 0`, i.e. `R^ℓ_+ ⊆ H`.
    pub fn contains_orthant(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&v| v >= 0.0))
    }
}

/// Open or closed variant of a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Open,
    Closure,
}

/// The open, generally non-convex cone `D^K = ∪_i D^{i,K}` with
/// `D^{i,K} = {y : y_i > 0, y_i + K·y_j > 0 for all j ≠ i}`.
///
/// Never materialised as halfspaces; membership is evaluated piecewise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnionConeDK {
    k: f64,
    ell: usize,
}

impl UnionConeDK {
    pub fn new(k: f64, ell: usize) -> Result<Self> {
        check_positive("K", k)?;
        check_ell(ell)?;
        Ok(UnionConeDK { k, ell })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Whether `D^K ∪ {0}` is convex: exactly when `ℓ = 2` and `K ≥ 1`.
    pub fn is_convex(&self) -> bool {
        self.ell == 2 && self.k >= 1.0
    }

    /// Membership in the piece `D^{i,K}` (or its closure).
    pub fn piece_contains(&self, i: usize, y: &[f64], mode: Mode, tol: Tolerance) -> bool {
        let pass = |s: f64| match mode {
            Mode::Open => tol.strictly_positive(s),
            Mode::Closure => tol.nonnegative(s),
        };
        let yi = y[i];
        pass(yi)
            && y
                .iter()
                .enumerate()
                .all(|(j, &yj)| j == i || pass(yi + self.k * yj))
    }

    pub fn contains(&self, y: &[f64], mode: Mode, tol: Tolerance) -> Result<bool> {
        check_dim(self.ell, y.len())?;
        Ok((0..self.ell).any(|i| self.piece_contains(i, y, mode, tol)))
    }
}

pub fn dk_contains(d: &UnionConeDK, y: &[f64], mode: Mode, tol: Tolerance) -> Result<bool> {
    d.contains(y, mode, tol)
}

fn check_ell(ell: usize) -> Result<()> {
    if ell < 2 {
        Err(Error::param("ell", format!("must be >= 2, got {ell}")))
    } else {
        Ok(())
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {v}")))
    }
}

fn check_strictly_positive_vector(name: &'static str, v: &Point) -> Result<()> {
    match v.coords().iter().position(|&c| c <= 0.0) {
        Some(i) => Err(Error::param(
            name,
            format!("must lie in int R^ℓ_+, coordinate {} is {}", i + 1, v.coords()[i]),
        )),
        None => Ok(()),
    }
}

/// `C^p = {y : p·y_i + Σ_{j≠i} y_j ≥ 0 ∀ i}`.
pub fn make_cp(p: f64, ell: usize) -> Result<HalfspaceCone> {
    check_positive("p", p)?;
    check_ell(ell)?;
    HalfspaceCone::new(
        (0..ell)
            .map(|i| (0..ell).map(|j| if i == j { p } else { 1.0 }).collect())
            .collect(),
    )
}

/// `C(s/m) = {y : y_i + (s/m)ᵀy ≥ 0 ∀ i}`.
pub fn make_csm(s: &Point, m: f64) -> Result<HalfspaceCone> {
    check_strictly_positive_vector("s", s)?;
    check_positive("m", m)?;
    let ell = s.dim();
    HalfspaceCone::new(
        (0..ell)
            .map(|i| {
                s.coords()
                    .iter()
                    .enumerate()
                    .map(|(j, &sj)| sj / m + if i == j { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect(),
    )
}

/// `C_w(ε) = {y : w_i·y_i + ε·Σ_j w_j·y_j ≥ 0 ∀ i}`.
pub fn make_cw_eps(w: &Point, eps: f64) -> Result<HalfspaceCone> {
    check_strictly_positive_vector("w", w)?;
    check_positive("eps", eps)?;
    let w = w.coords();
    HalfspaceCone::new(
        (0..w.len())
            .map(|i| {
                w.iter()
                    .enumerate()
                    .map(|(j, &wj)| eps * wj + if i == j { w[i] } else { 0.0 })
                    .collect()
            })
            .collect(),
    )
}

/// `C_{w,ε} = {y : w_i·y_i + ε·Σ_j y_j ≥ 0 ∀ i}`.
pub fn make_cw_comma_eps(w: &Point, eps: f64) -> Result<HalfspaceCone> {
    check_strictly_positive_vector("w", w)?;
    check_positive("eps", eps)?;
    let w = w.coords();
    HalfspaceCone::new(
        (0..w.len())
            .map(|i| {
                (0..w.len())
                    .map(|j| eps + if i == j { w[i] } else { 0.0 })
                    .collect()
            })
            .collect(),
    )
}

/// `Λ_ε = {y : (1-(ℓ-1)ε)·y_i + ε·Σ_{j≠i} y_j ≥ 0 ∀ i}` for `ε ∈ (0, 1/ℓ)`.
pub fn make_lambda(eps: f64, ell: usize) -> Result<HalfspaceCone> {
    check_ell(ell)?;
    let upper = 1.0 / ell as f64;
    if !(eps > 0.0 && eps < upper) {
        return Err(Error::param(
            "eps",
            format!("must lie in (0, 1/ℓ) = (0, {upper}), got {eps}"),
        ));
    }
    let diag = 1.0 - (ell as f64 - 1.0) * eps;
    HalfspaceCone::new(
        (0..ell)
            .map(|i| (0..ell).map(|j| if i == j { diag } else { eps }).collect())
            .collect(),
    )
}

/// The `p` with `Λ_ε = C^p`: `p = (1-(ℓ-1)ε)/ε`.
pub fn lambda_to_p(eps: f64, ell: usize) -> f64 {
    (1.0 - (ell as f64 - 1.0) * eps) / eps
}

/// `cl D^{i,K}` with rows `e_i` and `e_i + K·e_j` for every `j ≠ i`.
/// `i` is zero-based.
#[allow(non_snake_case)]
pub fn make_cl_diK(i: usize, k: f64, ell: usize) -> Result<HalfspaceCone> {
    check_ell(ell)?;
    check_positive("K", k)?;
    if i >= ell {
        return Err(Error::param("i", format!("must be < ℓ = {ell}, got {i}")));
    }
    let unit = |n: usize| -> Vec<f64> { (0..ell).map(|r| if r == n { 1.0 } else { 0.0 }).collect() };
    let mut rows = vec![unit(i)];
    for j in (0..ell).filter(|&j| j != i) {
        let mut row = unit(i);
        row[j] = k;
        rows.push(row);
    }
    HalfspaceCone::new(rows)
}

/// A `K` with `D^{K'} ⊆ C^p` for every `K' ≥ K`:
/// `(1+δ)·max((ℓ-1)/p, p+ℓ-2)`.
pub fn k_enclosing_cp(p: f64, ell: usize) -> Result<f64> {
    check_positive("p", p)?;
    check_ell(ell)?;
    let l = ell as f64;
    Ok((1.0 + SAFETY_MARGIN) * f64::max((l - 1.0) / p, p + l - 2.0))
}

/// `p = ℓK`, for which `C^p \ {0} ⊆ D^K`.
pub fn p_enclosed_in_dk(k: f64, ell: usize) -> Result<f64> {
    check_positive("K", k)?;
    check_ell(ell)?;
    Ok(ell as f64 * k)
}

/// `K = (m-1)/Σ s_i`, for which `C(s/m) \ {0} ⊆ D^K`; requires `m > 1`.
pub fn k_for_csm(s: &Point, m: f64) -> Result<f64> {
    check_strictly_positive_vector("s", s)?;
    if !(m.is_finite() && m > 1.0) {
        return Err(Error::param("m", format!("must be > 1, got {m}")));
    }
    Ok((m - 1.0) / s.coords().iter().sum::<f64>())
}

/// `K = min_i w_i / (2ε·Σ_j w_j)`, for which `C_w(ε) \ {0} ⊆ D^K`.
pub fn k_for_cw(w: &Point, eps: f64) -> Result<f64> {
    check_strictly_positive_vector("w", w)?;
    check_positive("eps", eps)?;
    let w = w.coords();
    Ok(min_of(w) / (2.0 * eps * w.iter().sum::<f64>()))
}

/// `K = min_i w_i / (2ℓε)`, for which `C_{w,ε} \ {0} ⊆ D^K`.
pub fn k_for_cw_comma(w: &Point, eps: f64) -> Result<f64> {
    check_strictly_positive_vector("w", w)?;
    check_positive("eps", eps)?;
    let w = w.coords();
    Ok(min_of(w) / (2.0 * w.len() as f64 * eps))
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// A `K` with `D^K ⊆ int H`, for a cone whose interior contains
/// `R^ℓ_+ \ {0}`.
///
/// For each `i` the largest `t_i` keeping `e_i - t_i·Σ_{r≠i} e_r` in `H`
/// is `min_j B_{j,i} / Σ_{r≠i} B_{j,r}`; the result is
/// `(1+δ)·max_i 1/t_i`.
pub fn enclose_dk_in_cone(h: &HalfspaceCone, tol: Tolerance) -> Result<f64> {
    if !h.strictly_contains_orthant(tol) {
        return Err(Error::OrthantNotInterior);
    }
    let ell = h.ell();
    let mut worst: f64 = 0.0;
    for i in 0..ell {
        let t_i = h
            .rows()
            .iter()
            .filter_map(|row| {
                let rest: f64 = row.iter().enumerate().filter(|&(r, _)| r != i).map(|(_, v)| v).sum();
                (rest > 0.0).then(|| row[i] / rest)
            })
            .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))))
            .unwrap_or(1.0);
        worst = worst.max(1.0 / t_i);
    }
    Ok((1.0 + SAFETY_MARGIN) * worst)
}

/// Region to draw unit-norm samples from.
#[derive(Debug, Clone, Copy)]
pub enum Region<'a> {
    /// Interior of a halfspace cone.
    ConeInterior(&'a HalfspaceCone),
    /// Closure of a halfspace cone.
    ConeClosed(&'a HalfspaceCone),
    DkOpen(&'a UnionConeDK),
    DkClosure(&'a UnionConeDK),
    /// The nonnegative orthant including its proper faces: each coordinate
    /// is zeroed with probability 1/2.
    OrthantFaces { ell: usize },
    Sphere { ell: usize },
}

impl Region<'_> {
    pub fn ell(&self) -> usize {
        match self {
            Region::ConeInterior(h) | Region::ConeClosed(h) => h.ell(),
            Region::DkOpen(d) | Region::DkClosure(d) => d.ell(),
            Region::OrthantFaces { ell } | Region::Sphere { ell } => *ell,
        }
    }

    pub fn contains(&self, y: &[f64], tol: Tolerance) -> Result<bool> {
        match self {
            Region::ConeInterior(h) => h.contains_interior(y, tol),
            Region::ConeClosed(h) => h.contains_closed(y, tol),
            Region::DkOpen(d) => d.contains(y, Mode::Open, tol),
            Region::DkClosure(d) => d.contains(y, Mode::Closure, tol),
            Region::OrthantFaces { ell } => {
                check_dim(*ell, y.len())?;
                Ok(y.iter().all(|&c| c >= 0.0))
            }
            Region::Sphere { ell } => {
                check_dim(*ell, y.len())?;
                Ok(true)
            }
        }
    }
}

/// A uniformly random unit vector in `R^ℓ`.
pub fn unit_vector<R: rand::Rng + ?Sized>(rng: &mut R, ell: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..ell).map(|_| StandardNormal.sample(rng)).collect();
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

fn orthant_face_vector<R: rand::Rng + ?Sized>(rng: &mut R, ell: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = unit_vector(rng, ell)
            .into_iter()
            .map(|c| if rng.random_bool(0.5) { 0.0 } else { c.abs() })
            .collect();
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Rejection-samples `n` unit vectors of `region`, deterministically in
/// `seed`. Fails once more than [`REJECTION_BUDGET`] candidates were drawn.
pub fn sample_cone(region: Region<'_>, n: usize, seed: u64, tol: Tolerance) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    let ell = region.ell();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut draws = 0;
    while out.len() < n {
        if draws >= REJECTION_BUDGET {
            return Err(Error::SamplingBudget {
                draws,
                accepted: out.len(),
            });
        }
        draws += 1;
        let v = match region {
            Region::OrthantFaces { .. } => orthant_face_vector(&mut rng, ell),
            _ => unit_vector(&mut rng, ell),
        };
        if region.contains(&v, tol)? {
            out.push(Point::new(v)?);
        }
    }
    Ok(out)
}

/// [`sample_cone`] in chunks of 10⁴ with derived seeds, so that narrow
/// regions stay within the per-call rejection budget.
pub fn sample_cone_chunked(region: Region<'_>, n: usize, seed: u64, tol: Tolerance) -> Result<Vec<Point>> {
    const CHUNK: usize = 10_000;
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    let mut out = Vec::with_capacity(n);
    let mut chunk_seed = seed;
    while out.len() < n {
        let take = CHUNK.min(n - out.len());
        out.extend(sample_cone(region, take, chunk_seed, tol)?);
        chunk_seed = chunk_seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    }
    Ok(out)
}
