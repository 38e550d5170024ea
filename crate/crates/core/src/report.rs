//! Analysis orchestration and the versioned JSON report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cones::{make_cp, Region};
use crate::efficiency::{
    benson_check, certificate_k, existence_search, gmin_set, gmin_via_cone, gmin_via_dk, henig_certificate,
    min_set, Certificate, DominationOracle, ExistenceFamily, FamilySearch, PointCloud, TradeOff,
};
use crate::error::{check_dim, Error, Result};
use crate::gerstewitz::{check_monotone, check_sublinear, Strictness, SumForm};
use crate::point::{Point, Tolerance};
use crate::scalarize::build_proper_functional;

pub const SCHEMA: &str = "report_v1";

/// Samples per certificate for the monotonicity and sublinearity checks
/// embedded in `certify` reports.
pub const REPORT_HARNESS_SAMPLES: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalysisMode {
    Min,
    Wmin,
    Gmin,
    Certify,
    Benson,
    Existence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    pub mode: AnalysisMode,
    pub tol: Tolerance,
    pub seed: u64,
    /// Direction for certificate functionals; all ones when absent.
    pub k: Option<Vec<f64>>,
    /// Cone parameter for the `C^p` cross-check in `certify` and the lower
    /// bound `p̄` in `existence`.
    pub p: Option<f64>,
    /// Reference point for `existence`.
    pub u: Option<Vec<f64>>,
}

impl AnalyzeOptions {
    pub fn new(mode: AnalysisMode) -> Self {
        AnalyzeOptions {
            mode,
            tol: Tolerance::default(),
            seed: 0,
            k: None,
            p: None,
            u: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub status: CheckStatus,
    pub details: String,
}

impl CrossCheck {
    fn from(ok: bool, details: impl Into<String>) -> Self {
        CrossCheck {
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            details: details.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExistenceResult {
    pub family: String,
    pub witness: Option<ExistenceFamily>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: String,
    pub mode: AnalysisMode,
    pub tol: f64,
    pub seed: u64,
    pub options: AnalyzeOptions,
    pub n_points: usize,
    pub ell: usize,
    pub indices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k_star: Vec<TradeOff>,
    pub certificates: Vec<Certificate>,
    pub cross_checks: BTreeMap<String, CrossCheck>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub existence: Vec<ExistenceResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.cross_checks.values().all(|c| c.status == CheckStatus::Pass)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

fn direction(options: &AnalyzeOptions, ell: usize) -> Result<Point> {
    match &options.k {
        Some(k) => {
            check_dim(ell, k.len())?;
            Point::new(k.clone())
        }
        None => Point::ones(ell),
    }
}

fn fmt_indices(v: &[usize]) -> String {
    format!("{v:?}")
}

pub fn analyze(cloud: &PointCloud, options: &AnalyzeOptions) -> Result<Report> {
    let tol = options.tol;
    let ell = cloud.ell();
    let mut report = Report {
        schema: SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        mode: options.mode,
        tol: tol.tau(),
        seed: options.seed,
        options: options.clone(),
        n_points: cloud.len(),
        ell,
        indices: Vec::new(),
        k_star: Vec::new(),
        certificates: Vec::new(),
        cross_checks: BTreeMap::new(),
        existence: Vec::new(),
    };
    let checks = &mut report.cross_checks;

    match options.mode {
        AnalysisMode::Min | AnalysisMode::Wmin => {
            let min = min_set(cloud, &DominationOracle::OrthantClosed, tol).map_err(|e| e.in_op("min_set"))?;
            let wmin = min_set(cloud, &DominationOracle::OrthantOpen, tol).map_err(|e| e.in_op("min_set"))?;
            let ok = min.iter().all(|i| wmin.contains(i));
            checks.insert(
                "wmin_contains_min".into(),
                CrossCheck::from(ok, format!("|Min| = {}, |WMin| = {}", min.len(), wmin.len())),
            );
            report.indices = if options.mode == AnalysisMode::Min { min } else { wmin };
        }
        AnalysisMode::Gmin => {
            let gmin = gmin_set(cloud, tol).map_err(|e| e.in_op("gmin_set"))?;
            let min = min_set(cloud, &DominationOracle::OrthantClosed, tol).map_err(|e| e.in_op("min_set"))?;
            report.indices = gmin.iter().map(|g| g.0).collect();
            report.k_star = gmin.iter().map(|g| TradeOff::Bounded(g.1)).collect();
            checks.insert(
                "gmin_equals_min".into(),
                CrossCheck::from(
                    report.indices == min,
                    format!("GMin = {}, Min = {}", fmt_indices(&report.indices), fmt_indices(&min)),
                ),
            );
            let mut bad = Vec::new();
            for &(i, k) in &gmin {
                let members = gmin_via_dk(cloud, certificate_k(k), tol).map_err(|e| e.in_op("gmin_via_dk"))?;
                if !members.contains(&i) {
                    bad.push(i);
                }
            }
            checks.insert(
                "dk_membership".into(),
                CrossCheck::from(bad.is_empty(), format!("points outside Min(F, D^K) at K = K*(1+δ): {bad:?}")),
            );
        }
        AnalysisMode::Certify => {
            let k = direction(options, ell)?;
            let gmin = gmin_set(cloud, tol).map_err(|e| e.in_op("gmin_set"))?;
            let mut verify_fail = Vec::new();
            let mut mono_viol = 0;
            let mut sub_viol = 0;
            for (n, &(i, _)) in gmin.iter().enumerate() {
                let mut cert = build_proper_functional(cloud, i, &k, tol).map_err(|e| e.in_op("build_proper_functional"))?;
                cert.cone = henig_certificate(cloud, i, tol).map_err(|e| e.in_op("henig_certificate"))?.cone;
                if cert.verify(cloud, tol).is_err() {
                    verify_fail.push(i);
                }
                if let Some(crate::efficiency::Functional::Sum(f)) = &cert.functional {
                    let seed = options.seed.wrapping_add(n as u64);
                    let m = check_monotone(
                        f,
                        Strictness::Strict,
                        Region::OrthantFaces { ell },
                        REPORT_HARNESS_SAMPLES,
                        seed,
                        tol,
                    )
                    .map_err(|e| e.in_op("check_monotone"))?;
                    mono_viol += m.violations;
                    // the certificate is a translate of this conic sum
                    let conic = SumForm::new(f.k_const(), &k)?;
                    let s = check_sublinear(&conic, REPORT_HARNESS_SAMPLES, seed)
                        .map_err(|e| e.in_op("check_sublinear"))?;
                    sub_viol += s.violations;
                }
                report.certificates.push(cert);
            }
            report.indices = gmin.iter().map(|g| g.0).collect();
            report.k_star = gmin.iter().map(|g| TradeOff::Bounded(g.1)).collect();
            let all_zero = report.certificates.iter().all(|c| c.verified_min == Some(0.0));
            checks.insert(
                "certificates_verify".into(),
                CrossCheck::from(
                    verify_fail.is_empty() && all_zero,
                    format!("{} certificates, failed re-verification: {verify_fail:?}", report.certificates.len()),
                ),
            );
            checks.insert(
                "strict_monotone".into(),
                CrossCheck::from(
                    mono_viol == 0,
                    format!("{mono_viol} violations, {REPORT_HARNESS_SAMPLES} samples per certificate"),
                ),
            );
            checks.insert(
                "sublinear".into(),
                CrossCheck::from(
                    sub_viol == 0,
                    format!("{sub_viol} violations, {REPORT_HARNESS_SAMPLES} samples per certificate"),
                ),
            );
            if let Some(p) = options.p {
                let h = make_cp(p, ell)?;
                let cp_min = gmin_via_cone(cloud, &h, tol).map_err(|e| e.in_op("gmin_via_cone"))?;
                let ok = cp_min.iter().all(|i| report.indices.contains(i));
                checks.insert(
                    "cp_min_in_gmin".into(),
                    CrossCheck::from(ok, format!("Min(F, C^{p}) = {}", fmt_indices(&cp_min))),
                );
            }
        }
        AnalysisMode::Benson => {
            let gmin: Vec<usize> = gmin_set(cloud, tol)
                .map_err(|e| e.in_op("gmin_set"))?
                .into_iter()
                .map(|g| g.0)
                .collect();
            for i in 0..cloud.len() {
                if benson_check(cloud, i, tol).map_err(|e| e.in_op("benson_check"))? {
                    report.indices.push(i);
                }
            }
            checks.insert(
                "benson_equals_gmin".into(),
                CrossCheck::from(
                    report.indices == gmin,
                    format!("Benson = {}, GMin = {}", fmt_indices(&report.indices), fmt_indices(&gmin)),
                ),
            );
        }
        AnalysisMode::Existence => {
            let u = options
                .u
                .clone()
                .ok_or_else(|| Error::param("u", "existence mode needs a reference point --u"))?;
            check_dim(ell, u.len())?;
            let u = Point::new(u)?;
            let ones = vec![1.0; ell];
            let searches = [
                FamilySearch::Dk { k0: 1.0 },
                FamilySearch::Cp {
                    p_bar: options.p.unwrap_or(1.0),
                },
                FamilySearch::Csm { s: ones.clone() },
                FamilySearch::Cw { w: ones, eps0: 1.0 },
            ];
            for s in &searches {
                let witness = existence_search(cloud, &u, s, tol).map_err(|e| e.in_op("existence_search"))?;
                report.existence.push(ExistenceResult {
                    family: s.name().into(),
                    witness,
                });
            }
            // points y ≤ u with y ≠ u block every family member
            report.indices = cloud
                .points()
                .iter()
                .enumerate()
                .filter(|(_, y)| {
                    let d = u.sub(y);
                    d.iter().all(|&v| tol.nonnegative(v)) && d.iter().any(|&v| tol.strictly_positive(v))
                })
                .map(|(i, _)| i)
                .collect();
            let answers: Vec<bool> = report.existence.iter().map(|e| e.witness.is_some()).collect();
            let agree = answers.windows(2).all(|w| w[0] == w[1]);
            let consistent = agree && answers[0] == report.indices.is_empty();
            checks.insert(
                "families_agree".into(),
                CrossCheck::from(consistent, format!("answers {answers:?}, blocking points {:?}", report.indices)),
            );
        }
    }
    Ok(report)
}

/// Plot table for a planar cloud: `y1,y2,class` with class `dominated`,
/// `min` or `gmin`, and for `gmin` points the cone parameter `p` of the
/// certificate `C^p` with the unit directions of its two boundary rays.
pub fn plot_data(cloud: &PointCloud, tol: Tolerance) -> Result<String> {
    if cloud.ell() != 2 {
        return Err(Error::Unsupported(format!("plot data needs ℓ = 2, got {}", cloud.ell())));
    }
    let min = min_set(cloud, &DominationOracle::OrthantClosed, tol)?;
    let gmin = gmin_set(cloud, tol)?;
    let mut out = String::from("y1,y2,class,p,ray1_y1,ray1_y2,ray2_y1,ray2_y2\n");
    for (i, y) in cloud.points().iter().enumerate() {
        let c = y.coords();
        match gmin.iter().find(|g| g.0 == i) {
            Some(&(_, k)) => {
                let p = 2.0 * certificate_k(k);
                let [r1, r2] = cp_boundary_rays(p);
                writeln!(out, "{},{},gmin,{p},{},{},{},{}", c[0], c[1], r1[0], r1[1], r2[0], r2[1])
                    .expect("writing to a String");
            }
            None => {
                let class = if min.contains(&i) { "min" } else { "dominated" };
                writeln!(out, "{},{},{class},,,,,", c[0], c[1]).expect("writing to a String");
            }
        }
    }
    Ok(out)
}

/// Unit directions spanning the boundary of `C^p ⊆ R²`: the kernels of
/// its rows `(p,1)` and `(1,p)`.
pub fn cp_boundary_rays(p: f64) -> [[f64; 2]; 2] {
    let n = (1.0 + p * p).sqrt();
    [[1.0 / n, -p / n], [-p / n, 1.0 / n]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(rows: &[&[f64]]) -> PointCloud {
        PointCloud::from_rows(rows.iter().map(|r| r.to_vec()).collect(), Tolerance::default()).unwrap()
    }

    #[test]
    fn gmin_mode() {
        let c = cloud(&[&[0.0, 0.0], &[-1.0, 3.0]]);
        let r = analyze(&c, &AnalyzeOptions::new(AnalysisMode::Gmin)).unwrap();
        assert_eq!(r.indices, vec![0, 1]);
        let ks: Vec<f64> = r.k_star.iter().map(|k| k.finite().unwrap()).collect();
        assert!((ks[0] - 1.0 / 3.0).abs() < 1e-15 && ks[1] == 3.0);
        assert_eq!(r.cross_checks["gmin_equals_min"].status, CheckStatus::Pass);
        assert!(r.all_passed());
    }

    #[test]
    fn min_mode_singleton() {
        let c = cloud(&[&[1.0, 1.0]]);
        let r = analyze(&c, &AnalyzeOptions::new(AnalysisMode::Min)).unwrap();
        assert_eq!(r.indices, vec![0]);
    }

    #[test]
    fn certify_mode() {
        let c = cloud(&[&[0.0, 0.0], &[-1.0, 3.0], &[2.0, -1.0], &[3.0, 3.0]]);
        let mut o = AnalyzeOptions::new(AnalysisMode::Certify);
        o.p = Some(4.0);
        let r = analyze(&c, &o).unwrap();
        assert_eq!(r.certificates.len(), 3);
        assert!(r.certificates.iter().all(|c| c.verified_min == Some(0.0)));
        assert!(r.all_passed(), "{:?}", r.cross_checks);
    }

    #[test]
    fn benson_and_existence_modes() {
        let c = cloud(&[&[0.0, 0.0], &[-1.0, 3.0], &[1.0, 1.0]]);
        let r = analyze(&c, &AnalyzeOptions::new(AnalysisMode::Benson)).unwrap();
        assert_eq!(r.indices, vec![0, 1]);
        assert!(r.all_passed());

        let mut o = AnalyzeOptions::new(AnalysisMode::Existence);
        o.u = Some(vec![0.5, 0.5]);
        let r = analyze(&c, &o).unwrap();
        assert_eq!(r.indices, vec![0]);
        assert!(r.existence.iter().all(|e| e.witness.is_none()));
        assert!(r.all_passed());
        o.u = Some(vec![-2.0, 0.0]);
        let r = analyze(&c, &o).unwrap();
        assert!(r.existence.iter().all(|e| e.witness.is_some()));
        o.u = None;
        assert!(analyze(&c, &o).is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let c = cloud(&[&[0.0, 0.0], &[-1.0, 3.0], &[2.0, -1.0]]);
        let o = AnalyzeOptions::new(AnalysisMode::Certify);
        let a = analyze(&c, &o).unwrap().to_json().unwrap();
        let b = analyze(&c, &o).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": \"report_v1\""));
        let back: Report = serde_json::from_str(&a).unwrap();
        assert_eq!(back.to_json().unwrap(), a);
    }

    #[test]
    fn rays_of_c2() {
        let [r1, r2] = cp_boundary_rays(2.0);
        let s = 5f64.sqrt();
        assert!((r1[0] - 1.0 / s).abs() < 1e-15 && (r1[1] + 2.0 / s).abs() < 1e-15);
        assert!((r2[0] + 2.0 / s).abs() < 1e-15 && (r2[1] - 1.0 / s).abs() < 1e-15);
    }

    #[test]
    fn plot_rows() {
        let c = cloud(&[&[0.0, 0.0], &[1.0, 1.0]]);
        let text = plot_data(&c, Tolerance::default()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,0,gmin,2,"));
        assert_eq!(lines[2], "1,1,dominated,,,,,");
        let single = cloud(&[&[5.0, 5.0]]);
        assert_eq!(plot_data(&single, Tolerance::default()).unwrap().lines().count(), 2);
        let c3 = cloud(&[&[0.0, 0.0, 0.0]]);
        assert!(plot_data(&c3, Tolerance::default()).is_err());
    }
}
