//! Gerstewitz functionals `φ_{A,k}(y) = inf{t : y ∈ A + t·k}` for
//! polyhedral `A = a − H`, `H = {z : Bz ≥ b}`.
//!
//! For such sets the infimum is a finite maximum of affine ratios,
//!
//! ```text
//! φ(y) = max_j (B_j·(y − a) + b_j) / (B_j·k)
//! ```
//!
//! provided every denominator `B_j·k` is positive. Forms violating that are
//! rejected at construction, so every form here is finite-valued.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cones::{make_cl_diK, sample_cone_chunked, HalfspaceCone, Region};
use crate::error::{check_dim, Error, Result};
use crate::point::{dot, Point, Tolerance};

/// A real-valued functional on `R^ℓ`.
pub trait Scalarizer {
    fn ell(&self) -> usize;

    /// Value at `y`; `y` must have length [`Scalarizer::ell`].
    fn value(&self, y: &[f64]) -> f64;

    /// Whether the functional is positively homogeneous (anchored at the
    /// origin with a conic set), the precondition of the sublinearity check.
    fn is_conic(&self) -> bool;
}

/// `φ_{a−H,k}` for `H = {z : Bz ≥ b}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormRepr", into = "FormRepr")]
pub struct GerstewitzForm {
    rows: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    anchor: Vec<f64>,
    direction: Vec<f64>,
    denominators: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    #[serde(rename = "B")]
    rows: Vec<Vec<f64>>,
    #[serde(default)]
    b: Vec<f64>,
    a: Vec<f64>,
    k: Vec<f64>,
}

impl TryFrom<FormRepr> for GerstewitzForm {
    type Error = Error;

    fn try_from(r: FormRepr) -> Result<Self> {
        let offsets = r.offsets_or_default();
        build_form(r.rows, offsets, r.a, r.k, 0.0)
    }
}

impl FormRepr {
    fn offsets_or_default(&self) -> Vec<f64> {
        if self.b.is_empty() {
            vec![0.0; self.rows.len()]
        } else {
            self.b.clone()
        }
    }
}

impl From<GerstewitzForm> for FormRepr {
    fn from(f: GerstewitzForm) -> Self {
        FormRepr {
            rows: f.rows,
            b: f.offsets,
            a: f.anchor,
            k: f.direction,
        }
    }
}

fn build_form(
    rows: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    anchor: Vec<f64>,
    direction: Vec<f64>,
    threshold: f64,
) -> Result<GerstewitzForm> {
    let ell = direction.len();
    if rows.is_empty() {
        return Err(Error::param("B", "needs at least one row"));
    }
    check_dim(rows.len(), offsets.len())?;
    check_dim(ell, anchor.len())?;
    let all = rows
        .iter()
        .flatten()
        .chain(&offsets)
        .chain(&anchor)
        .chain(&direction);
    if all.into_iter().any(|v| !v.is_finite()) {
        return Err(Error::param("form", "all entries must be finite"));
    }
    let mut denominators = Vec::with_capacity(rows.len());
    for (row_idx, row) in rows.iter().enumerate() {
        check_dim(ell, row.len())?;
        let d = dot(row, &direction);
        if d <= threshold {
            return Err(Error::DirectionNotInterior {
                row: row_idx,
                value: d,
            });
        }
        denominators.push(d);
    }
    Ok(GerstewitzForm {
        rows,
        offsets,
        anchor,
        direction,
        denominators,
    })
}

impl GerstewitzForm {
    /// General polyhedral form; every `B_j·k` must exceed `tau`.
    pub fn new(
        rows: Vec<Vec<f64>>,
        offsets: Vec<f64>,
        anchor: &Point,
        k: &Point,
        tol: Tolerance,
    ) -> Result<Self> {
        build_form(
            rows,
            offsets,
            anchor.coords().to_vec(),
            k.coords().to_vec(),
            tol.tau(),
        )
    }

    /// `φ_{a−H,k}` for a cone `H`.
    pub fn for_cone(h: &HalfspaceCone, anchor: &Point, k: &Point, tol: Tolerance) -> Result<Self> {
        check_dim(h.ell(), k.dim())?;
        GerstewitzForm::new(h.rows().to_vec(), vec![0.0; h.rows().len()], anchor, k, tol)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.ell(), y.len())?;
        Ok(self.value(y))
    }

    /// Same form with a different anchor.
    pub fn anchored_at(&self, anchor: &[f64]) -> Result<Self> {
        check_dim(self.ell(), anchor.len())?;
        Ok(GerstewitzForm {
            anchor: anchor.to_vec(),
            ..self.clone()
        })
    }

    /// `y ∈ int H` decided by the sign of `φ(a − y)`.
    pub fn interior_by_sign(&self, y: &[f64], tol: Tolerance) -> Result<bool> {
        check_dim(self.ell(), y.len())?;
        let shifted: Vec<f64> = self.anchor.iter().zip(y).map(|(a, v)| a - v).collect();
        Ok(self.value(&shifted) < -tol.tau())
    }
}

impl Scalarizer for GerstewitzForm {
    fn ell(&self) -> usize {
        self.direction.len()
    }

    fn value(&self, y: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.offsets)
            .zip(&self.denominators)
            .map(|((row, b), d)| {
                let lin: f64 = row
                    .iter()
                    .zip(y.iter().zip(&self.anchor))
                    .map(|(r, (v, a))| r * (v - a))
                    .sum();
                (lin + b) / d
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn is_conic(&self) -> bool {
        self.anchor.iter().all(|&a| a == 0.0) && self.offsets.iter().all(|&b| b == 0.0)
    }
}

pub fn make_form(
    rows: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    anchor: &Point,
    k: &Point,
    tol: Tolerance,
) -> Result<GerstewitzForm> {
    GerstewitzForm::new(rows, offsets, anchor, k, tol)
}

/// `Σ_i φ_{a − cl D^{i,K}, k}`: finite-valued, sublinear (for `a = 0`) and
/// strictly orthant-monotone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SumRepr", into = "SumRepr")]
pub struct SumForm {
    terms: Vec<GerstewitzForm>,
    k_const: f64,
    direction: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SumRepr {
    #[serde(rename = "K")]
    k_const: f64,
    k: Vec<f64>,
    a: Vec<f64>,
}

impl TryFrom<SumRepr> for SumForm {
    type Error = Error;

    fn try_from(r: SumRepr) -> Result<Self> {
        let k = Point::new(r.k)?;
        SumForm::new(r.k_const, &k)?.anchored_at(&r.a)
    }
}

impl From<SumForm> for SumRepr {
    fn from(s: SumForm) -> Self {
        SumRepr {
            k_const: s.k_const,
            a: s.terms[0].anchor.clone(),
            k: s.direction,
        }
    }
}

impl SumForm {
    /// Requires `K > 0` and `k ∈ int R^ℓ_+`.
    pub fn new(k_const: f64, k: &Point) -> Result<Self> {
        if !k.is_strictly_positive() {
            return Err(Error::param("k", "must be strictly positive"));
        }
        let ell = k.dim();
        let origin = Point::zeros(ell)?;
        let terms = (0..ell)
            .map(|i| {
                let h = make_cl_diK(i, k_const, ell)?;
                GerstewitzForm::for_cone(&h, &origin, k, Tolerance::default())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SumForm {
            terms,
            k_const,
            direction: k.coords().to_vec(),
        })
    }

    pub fn k_const(&self) -> f64 {
        self.k_const
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn anchor(&self) -> &[f64] {
        self.terms[0].anchor()
    }

    pub fn terms(&self) -> &[GerstewitzForm] {
        &self.terms
    }

    /// The same sum evaluated at `y − anchor`.
    pub fn anchored_at(&self, anchor: &[f64]) -> Result<Self> {
        Ok(SumForm {
            terms: self
                .terms
                .iter()
                .map(|t| t.anchored_at(anchor))
                .collect::<Result<_>>()?,
            ..self.clone()
        })
    }

    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.ell(), y.len())?;
        Ok(self.value(y))
    }
}

impl Scalarizer for SumForm {
    fn ell(&self) -> usize {
        self.direction.len()
    }

    fn value(&self, y: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.value(y)).sum()
    }

    fn is_conic(&self) -> bool {
        self.terms[0].is_conic()
    }
}

pub fn make_sum_form(k_const: f64, k: &Point) -> Result<SumForm> {
    SumForm::new(k_const, k)
}

pub fn eval_sum(sf: &SumForm, y: &[f64]) -> Result<f64> {
    sf.eval(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    Plain,
    Strict,
}

/// Outcome of a sampled property check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub samples: usize,
    pub violations: usize,
    /// Smallest observed margin; negative (or zero, for strict checks)
    /// values are violations.
    pub worst_margin: f64,
    pub seed: u64,
}

impl HarnessReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Samples pairs `y¹`, `y² = y¹ + d` with `d` drawn from `domination` and
/// counts violations of `φ(y¹) ≤ φ(y²)` (plain) or `φ(y¹) < φ(y²)` (strict).
///
/// Base points are Gaussian with scale 3; step lengths are uniform in
/// `[0.01, 2]`.
pub fn check_monotone(
    f: &dyn Scalarizer,
    strictness: Strictness,
    domination: Region<'_>,
    n: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<HarnessReport> {
    let ell = f.ell();
    check_dim(ell, domination.ell())?;
    let steps = sample_cone_chunked(domination, n, seed, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d6f_6e6f);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for d in &steps {
        let y1: Vec<f64> = (0..ell)
            .map(|_| 3.0 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let len = rng.random_range(0.01..=2.0);
        let y2: Vec<f64> = y1.iter().zip(d.coords()).map(|(a, b)| a + len * b).collect();
        let margin = f.value(&y2) - f.value(&y1);
        worst = worst.min(margin);
        let ok = match strictness {
            Strictness::Plain => margin >= -tol.tau(),
            Strictness::Strict => margin > 0.0,
        };
        if !ok {
            violations += 1;
        }
    }
    Ok(HarnessReport {
        samples: steps.len(),
        violations,
        worst_margin: worst,
        seed,
    })
}

/// Checks `φ(λy) = λφ(y)` (relative error ≤ 1e-9) and
/// `φ(y+z) ≤ φ(y) + φ(z) + 1e-9` on `n` sampled triples.
pub fn check_sublinear(f: &dyn Scalarizer, n: usize, seed: u64) -> Result<HarnessReport> {
    if !f.is_conic() {
        return Err(Error::param(
            "form",
            "sublinearity needs a conic form (anchor 0, offsets 0)",
        ));
    }
    let ell = f.ell();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    let gauss = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..ell)
            .map(|_| 3.0 * rng.sample::<f64, _>(StandardNormal))
            .collect()
    };
    for _ in 0..n {
        let y = gauss(&mut rng);
        let z = gauss(&mut rng);
        let lambda: f64 = rng.random_range(0.0..10.0);

        let fy = f.value(&y);
        let scaled: Vec<f64> = y.iter().map(|v| lambda * v).collect();
        let homog_err = (f.value(&scaled) - lambda * fy).abs();
        let homog_margin = 1e-9 * f64::max(1.0, (lambda * fy).abs()) - homog_err;

        let sum: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a + b).collect();
        let sub_margin = fy + f.value(&z) + 1e-9 - f.value(&sum);

        let margin = homog_margin.min(sub_margin);
        worst = worst.min(margin);
        if margin < 0.0 {
            violations += 1;
        }
    }
    Ok(HarnessReport {
        samples: n,
        violations,
        worst_margin: worst,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{make_cp, UnionConeDK};

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn c2_form() -> GerstewitzForm {
        let h = make_cp(2.0, 2).unwrap();
        GerstewitzForm::for_cone(&h, &pt(&[0.0, 0.0]), &pt(&[1.0, 1.0]), tol()).unwrap()
    }

    #[test]
    fn max_ratio_examples() {
        let f = c2_form();
        assert_eq!(f.eval(&[3.0, 0.0]).unwrap(), 2.0);
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(f.eval(&[-3.0, -3.0]).unwrap(), -3.0);

        let orth = HalfspaceCone::orthant(2).unwrap();
        let g = GerstewitzForm::for_cone(&orth, &pt(&[0.0, 0.0]), &pt(&[1.0, 1.0]), tol()).unwrap();
        assert_eq!(g.eval(&[2.0, -1.0]).unwrap(), 2.0);
    }

    #[test]
    fn value_at_anchor_is_max_offset_ratio() {
        let f = GerstewitzForm::new(
            vec![vec![1.0, 0.0], vec![0.0, 2.0]],
            vec![1.0, -4.0],
            &pt(&[5.0, -1.0]),
            &pt(&[1.0, 1.0]),
            tol(),
        )
        .unwrap();
        assert_eq!(f.eval(&[5.0, -1.0]).unwrap(), 1.0);
    }

    #[test]
    fn translation_along_direction() {
        let f = c2_form();
        let y = [0.7, -2.3];
        let moved = [0.7 + 3.0, -2.3 + 3.0];
        assert!((f.eval(&moved).unwrap() - f.eval(&y).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_interior_direction() {
        let orth = HalfspaceCone::orthant(2).unwrap();
        let err = GerstewitzForm::for_cone(&orth, &pt(&[0.0, 0.0]), &pt(&[1.0, 0.0]), tol());
        assert!(matches!(err, Err(Error::DirectionNotInterior { row: 1, .. })));
        assert!(SumForm::new(1.0, &pt(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn sum_form_examples() {
        let sf = SumForm::new(1.0, &pt(&[1.0, 1.0])).unwrap();
        assert_eq!(sf.eval(&[2.0, 0.0]).unwrap(), 3.0);
        assert_eq!(sf.eval(&[0.0, 0.0]).unwrap(), 0.0);
        let e1 = sf.eval(&[1.0, 0.0]).unwrap();
        let e2 = sf.eval(&[0.0, 1.0]).unwrap();
        assert!(e1 + e2 >= sf.eval(&[1.0, 1.0]).unwrap());
    }

    #[test]
    fn sum_form_matches_closed_form() {
        let k = pt(&[1.0, 2.0, 0.5]);
        let kc = 1.7;
        let sf = SumForm::new(kc, &k).unwrap();
        let y = [0.3, -1.2, 2.5];
        let kv = k.coords();
        let mut expected = 0.0;
        for i in 0..3 {
            let mut best = y[i] / kv[i];
            for j in (0..3).filter(|&j| j != i) {
                best = best.max((y[i] + kc * y[j]) / (kv[i] + kc * kv[j]));
            }
            expected += best;
        }
        assert!((sf.eval(&y).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn interior_by_sign_examples() {
        let f = c2_form();
        assert!(f.interior_by_sign(&[1.0, 1.0], tol()).unwrap());
        assert!(!f.interior_by_sign(&[0.0, 0.0], tol()).unwrap());
        assert!(!f.interior_by_sign(&[1.0, -0.5], tol()).unwrap());
    }

    #[test]
    fn monotone_harness_examples() {
        let sf = SumForm::new(1.0, &pt(&[1.0, 1.0])).unwrap();
        let r = check_monotone(&sf, Strictness::Strict, Region::OrthantFaces { ell: 2 }, 2000, 5, tol()).unwrap();
        assert!(r.passed(), "{r:?}");

        // C^2 contains D^5, so its form is cl D^5-monotone
        let d5 = UnionConeDK::new(5.0, 2).unwrap();
        let r = check_monotone(&c2_form(), Strictness::Plain, Region::DkClosure(&d5), 2000, 6, tol()).unwrap();
        assert!(r.passed(), "{r:?}");

        // the orthant form is not: D^5 leaves the orthant
        let orth = HalfspaceCone::orthant(2).unwrap();
        let g = GerstewitzForm::for_cone(&orth, &pt(&[0.0, 0.0]), &pt(&[1.0, 1.0]), tol()).unwrap();
        let r = check_monotone(&g, Strictness::Plain, Region::DkClosure(&d5), 2000, 6, tol()).unwrap();
        assert!(r.violations > 0);
    }

    #[test]
    fn sublinear_harness() {
        let r = check_sublinear(&c2_form(), 2000, 9).unwrap();
        assert!(r.passed(), "{r:?}");
        let sf = SumForm::new(0.3, &pt(&[1.0, 2.0, 3.0])).unwrap();
        assert!(check_sublinear(&sf, 2000, 9).unwrap().passed());
        let anchored = c2_form().anchored_at(&[1.0, 0.0]).unwrap();
        assert!(check_sublinear(&anchored, 10, 0).is_err());
        let f = c2_form();
        assert_eq!(f.value(&[0.0, 0.0]), 0.0);
        let y = [0.37, -1.1];
        assert_eq!(f.value(&[2.0 * y[0], 2.0 * y[1]]), 2.0 * f.value(&y));
    }

    #[test]
    fn serde_round_trip() {
        let f = c2_form().anchored_at(&[1.5, -2.0]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"B\""));
        let back: GerstewitzForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);

        let sf = SumForm::new(0.75, &pt(&[1.0, 2.0])).unwrap().anchored_at(&[3.0, 4.0]).unwrap();
        let s = serde_json::to_string(&sf).unwrap();
        let back: SumForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, sf);
    }
}
