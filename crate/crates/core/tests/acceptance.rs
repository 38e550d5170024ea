//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs under `cargo test` (harness = false).

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use propeff::cones::{
    enclose_dk_in_cone, k_enclosing_cp, k_for_csm, k_for_cw, lambda_to_p, make_cl_diK, make_cp, make_csm,
    make_cw_eps, make_lambda, p_enclosed_in_dk, sample_cone_chunked, HalfspaceCone, Mode, Region, UnionConeDK,
};
use propeff::corpus::{gen_boxes_e521, gen_hyperbola, gen_random, Distribution};
use propeff::efficiency::{
    benson_check, certificate_k, existence_search, geoffrion_minimal_k, gmin_set, gmin_via_dk, min_set,
    DominationOracle, FamilySearch, PointCloud,
};
use propeff::gerstewitz::{check_monotone, check_sublinear, GerstewitzForm, Scalarizer, Strictness, SumForm};
use propeff::io::{emit_writer, ingest, Format};
use propeff::scalarize::{
    argmin_scan, build_proper_functional, cone_scalarization_argmin, unique_minimizer_certificate,
};
use propeff::{Point, Tolerance};

type Outcome = Result<String, String>;
/// Name, check, optional runtime budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn tol() -> Tolerance {
    Tolerance::default()
}

const DISTS: [Distribution; 3] = [
    Distribution::SphereShell,
    Distribution::Gaussian,
    Distribution::ConvexFrontier,
];

/// Random cloud; every fourth one has small-integer coordinates so that
/// ties and weak domination occur.
fn random_cloud(rng: &mut ChaCha8Rng, max_n: usize, ells: &[usize]) -> PointCloud {
    let n = rng.random_range(1..=max_n);
    let ell = ells[rng.random_range(0..ells.len())];
    let kind = rng.random_range(0..4);
    if kind == 3 {
        let rows = (0..n)
            .map(|_| (0..ell).map(|_| rng.random_range(-3..=3) as f64).collect())
            .collect();
        PointCloud::from_rows(rows, tol()).unwrap()
    } else {
        gen_random(n, ell, rng.random(), DISTS[kind]).unwrap()
    }
}

fn positive_vec(rng: &mut ChaCha8Rng, ell: usize, lo: f64, hi: f64) -> Point {
    Point::new((0..ell).map(|_| rng.random_range(lo..hi)).collect()).unwrap()
}

fn gauss_vec(rng: &mut ChaCha8Rng, ell: usize, scale: f64) -> Vec<f64> {
    (0..ell)
        .map(|_| scale * rng.sample::<f64, _>(rand_distr::StandardNormal))
        .collect()
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut points = 0;
    for run in 0..1000 {
        let c = random_cloud(&mut rng, 50, &[2, 3, 4, 5]);
        points += c.len();
        let g: Vec<usize> = gmin_set(&c, tol()).unwrap().into_iter().map(|x| x.0).collect();
        let m = min_set(&c, &DominationOracle::OrthantClosed, tol()).unwrap();
        if g != m {
            return Err(format!("cloud {run}: GMin {g:?} != Min {m:?}"));
        }
    }
    Ok(format!("1000 clouds, {points} points, GMin = Min on all"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut certified = 0;
    let mut nest_checks = 0;
    for run in 0..300 {
        let c = random_cloud(&mut rng, 30, &[2, 3, 4, 5]);
        for (i, k) in gmin_set(&c, tol()).unwrap() {
            let base = certificate_k(k);
            for factor in [1.0, 2.0, 10.0, 1000.0] {
                let members = gmin_via_dk(&c, base * factor, tol()).unwrap();
                if !members.contains(&i) {
                    return Err(format!("cloud {run}, point {i}: not in Min(F, D^K) at K = {}", base * factor));
                }
            }
            certified += 1;
        }
        let ladder = [0.05, 0.3, 1.0, 3.0, 20.0, 500.0];
        let sets: Vec<Vec<usize>> = ladder.iter().map(|&k| gmin_via_dk(&c, k, tol()).unwrap()).collect();
        for w in sets.windows(2) {
            nest_checks += 1;
            if !w[0].iter().all(|i| w[1].contains(i)) {
                return Err(format!("cloud {run}: nesting fails, {:?} not within {:?}", w[0], w[1]));
            }
        }
    }
    Ok(format!("{certified} certified points at 4 K values each, {nest_checks} nesting checks"))
}

const CLAIM_SAMPLES: usize = 100_000;

type Predicate<'a> = Box<dyn Fn(&[f64]) -> bool + 'a>;

struct Claim<'a> {
    name: String,
    sample_from: Region<'a>,
    target: Predicate<'a>,
}

fn run_claim(claim: &Claim<'_>, seed: u64) -> Result<(), String> {
    let pts = sample_cone_chunked(claim.sample_from, CLAIM_SAMPLES, seed, tol()).map_err(|e| e.to_string())?;
    let bad = pts.iter().filter(|p| !(claim.target)(p.coords())).count();
    if bad == 0 {
        Ok(())
    } else {
        Err(format!("{}: {bad} violations", claim.name))
    }
}

fn criterion_3() -> Outcome {
    let t = tol();
    let mut n_claims = 0;
    for ell in [2usize, 3, 5] {
        let l = ell as f64;
        let ones = Point::ones(ell).unwrap();
        let w = Point::new((0..ell).map(|i| 1.0 + 0.5 * i as f64).collect()).unwrap();

        // nested C^p for 1 <= p < p̄
        let cp2 = make_cp(2.0, ell).unwrap();
        let cp3 = make_cp(3.0, ell).unwrap();
        // 0 < p < 1 and p̃ = (ℓ-1-(ℓ-2)p)/p
        let p_small = 0.5;
        let cp_small = make_cp(p_small, ell).unwrap();
        let cp_tilde = make_cp((l - 1.0 - (l - 2.0) * p_small) / p_small, ell).unwrap();
        // D^K ⊆ C^p
        let k_d = k_enclosing_cp(2.0, ell).unwrap();
        let dk_d = UnionConeDK::new(k_d, ell).unwrap();
        // C^{ℓK} \ {0} ⊆ D^K
        let dk_e = UnionConeDK::new(0.7, ell).unwrap();
        let cp_e = make_cp(p_enclosed_in_dk(0.7, ell).unwrap(), ell).unwrap();
        // C(s/m) \ {0} ⊆ D^K
        let csm = make_csm(&ones, 3.0).unwrap();
        let dk_csm = UnionConeDK::new(k_for_csm(&ones, 3.0).unwrap(), ell).unwrap();
        // C_w(ε) \ {0} ⊆ D^K
        let cw = make_cw_eps(&w, 0.1).unwrap();
        let dk_cw = UnionConeDK::new(k_for_cw(&w, 0.1).unwrap(), ell).unwrap();
        // Λ_ε = C^{p(ε)}
        let eps = 0.5 / l;
        let lam = make_lambda(eps, ell).unwrap();
        let cp_lam = make_cp(lambda_to_p(eps, ell), ell).unwrap();
        // D^K ⊆ int H for a general orthant-enclosing H
        let k_h = enclose_dk_in_cone(&cw, t).unwrap();
        let dk_h = UnionConeDK::new(k_h, ell).unwrap();

        let claims = [
            Claim {
                name: format!("ℓ={ell}: C^3 \\ {{0}} ⊆ int C^2"),
                sample_from: Region::ConeClosed(&cp3),
                target: Box::new(|y| cp2.contains_interior(y, t).unwrap()),
            },
            Claim {
                name: format!("ℓ={ell}: C^p̃ ⊆ C^0.5"),
                sample_from: Region::ConeClosed(&cp_tilde),
                target: Box::new(|y| cp_small.contains_closed(y, t).unwrap()),
            },
            Claim {
                name: format!("ℓ={ell}: D^K ⊆ C^2, K = {k_d}"),
                sample_from: Region::DkOpen(&dk_d),
                target: Box::new(|y| cp2.contains_closed(y, t).unwrap()),
            },
            Claim {
                name: format!("ℓ={ell}: C^(ℓK) \\ {{0}} ⊆ D^K"),
                sample_from: Region::ConeClosed(&cp_e),
                target: Box::new(|y| dk_e.contains(y, Mode::Open, t).unwrap()),
            },
            Claim {
                name: format!("ℓ={ell}: C(s/m) \\ {{0}} ⊆ D^K"),
                sample_from: Region::ConeClosed(&csm),
                target: Box::new(|y| dk_csm.contains(y, Mode::Open, t).unwrap()),
            },
            Claim {
                name: format!("ℓ={ell}: C_w(ε) \\ {{0}} ⊆ D^K"),
                sample_from: Region::ConeClosed(&cw),
                target: Box::new(|y| dk_cw.contains(y, Mode::Open, t).unwrap()),
            },
            Claim {
                name: format!("ℓ={ell}: Λ_ε = C^p(ε)"),
                sample_from: Region::Sphere { ell },
                target: Box::new(|y| lam.contains_closed(y, t).unwrap() == cp_lam.contains_closed(y, t).unwrap()),
            },
            Claim {
                name: format!("ℓ={ell}: D^K ⊆ int C_w(ε), K = {k_h}"),
                sample_from: Region::DkOpen(&dk_h),
                target: Box::new(|y| cw.contains_interior(y, t).unwrap()),
            },
        ];
        for (j, claim) in claims.iter().enumerate() {
            run_claim(claim, 1000 * ell as u64 + j as u64)?;
            n_claims += 1;
        }
    }
    Ok(format!("{n_claims} claims × {CLAIM_SAMPLES} samples, 0 violations"))
}

// Independent oracle: inf{t : a + t·k − y ∈ H} by bisection on closed
// membership.
fn bisection_value(h: &HalfspaceCone, a: &[f64], k: &[f64], y: &[f64]) -> f64 {
    let fine = Tolerance::new(1e-14).unwrap();
    let member = |t: f64| {
        let z: Vec<f64> = a.iter().zip(k).zip(y).map(|((a, k), y)| a + t * k - y).collect();
        h.contains_closed(&z, fine).unwrap()
    };
    let (mut lo, mut hi) = (-1.0, 1.0);
    while !member(hi) {
        hi *= 2.0;
    }
    while member(lo) {
        lo *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if member(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn random_cone(rng: &mut ChaCha8Rng, ell: usize) -> HalfspaceCone {
    match rng.random_range(0..4) {
        0 => make_cp(rng.random_range(1.5..5.0), ell).unwrap(),
        1 => make_csm(&positive_vec(rng, ell, 0.2, 2.0), rng.random_range(1.5..6.0)).unwrap(),
        2 => make_cw_eps(&positive_vec(rng, ell, 0.2, 2.0), rng.random_range(0.05..1.0)).unwrap(),
        _ => make_cl_diK(rng.random_range(0..ell), rng.random_range(0.2..5.0), ell).unwrap(),
    }
}

fn criterion_4() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_bis: f64 = 0.0;
    let mut worst_tr: f64 = 0.0;
    for pair in 0..1000 {
        let ell = rng.random_range(2..=5);
        let h = random_cone(&mut rng, ell);
        let a = gauss_vec(&mut rng, ell, 2.0);
        let k = positive_vec(&mut rng, ell, 0.2, 2.0);
        let form = GerstewitzForm::for_cone(&h, &Point::new(a.clone()).unwrap(), &k, t).unwrap();
        let y = gauss_vec(&mut rng, ell, 3.0);
        let v = form.eval(&y).unwrap();
        let b = bisection_value(&h, &a, k.coords(), &y);
        worst_bis = worst_bis.max((v - b).abs());
        if (v - b).abs() > 1e-7 {
            return Err(format!("pair {pair}: closed form {v} vs bisection {b}"));
        }
        for _ in 0..10 {
            let s: f64 = rng.random_range(-10.0..10.0);
            let shifted: Vec<f64> = y.iter().zip(k.coords()).map(|(y, k)| y + s * k).collect();
            let lhs = form.eval(&shifted).unwrap();
            let rel = (lhs - (v + s)).abs() / f64::max(1.0, lhs.abs().max((v + s).abs()));
            worst_tr = worst_tr.max(rel);
            if rel > 1e-12 {
                return Err(format!("pair {pair}: translation error {rel:e}"));
            }
        }
    }

    let mut forms = 0;
    for ell in [2usize, 3, 5] {
        let k = positive_vec(&mut rng, ell, 0.5, 2.0);
        let sum = SumForm::new(rng.random_range(0.2..5.0), &k).unwrap();
        let cp = make_cp(rng.random_range(1.5..5.0), ell).unwrap();
        let g = GerstewitzForm::for_cone(&cp, &Point::zeros(ell).unwrap(), &k, t).unwrap();
        let list: [&dyn Scalarizer; 2] = [&sum, &g];
        for f in list {
            let seed = rng.random();
            let s = check_sublinear(f, 10_000, seed).unwrap();
            let m = check_monotone(f, Strictness::Strict, Region::OrthantFaces { ell }, 10_000, seed, t).unwrap();
            if !s.passed() || !m.passed() {
                return Err(format!(
                    "ℓ={ell}: sublinear {} / monotone {} violations",
                    s.violations, m.violations
                ));
            }
            forms += 1;
        }

        for _ in 0..4 {
            let h = random_cone(&mut rng, ell);
            let a = Point::new(gauss_vec(&mut rng, ell, 1.0)).unwrap();
            let form = GerstewitzForm::for_cone(&h, &a, &k, t).unwrap();
            let pts = sample_cone_chunked(Region::Sphere { ell }, 2500, rng.random(), t).unwrap();
            for p in &pts {
                let y = p.coords();
                if form.interior_by_sign(y, t).unwrap() != h.contains_interior(y, t).unwrap() {
                    return Err(format!("interior_by_sign disagrees at {y:?}"));
                }
            }
        }
    }
    Ok(format!(
        "bisection max err {worst_bis:.1e}, translation max rel err {worst_tr:.1e}, \
         {forms} forms × 10⁴ harness samples, 3×10⁴ interior checks"
    ))
}

fn criterion_5() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut certs = 0;
    for run in 0..500 {
        let c = random_cloud(&mut rng, 30, &[2, 3, 4, 5]);
        let k = if rng.random_bool(0.5) {
            Point::ones(c.ell()).unwrap()
        } else {
            positive_vec(&mut rng, c.ell(), 0.3, 3.0)
        };
        for (i, _) in gmin_set(&c, t).unwrap() {
            let cert = build_proper_functional(&c, i, &k, t).map_err(|e| format!("cloud {run}: {e}"))?;
            let Some(propeff::efficiency::Functional::Sum(f)) = &cert.functional else {
                return Err("certificate without a sum functional".into());
            };
            let min = cert.verified_min.unwrap_or(f64::NAN);
            if min.is_nan() || min.abs() > 1e-9 {
                return Err(format!("cloud {run}, point {i}: verified_min {min}"));
            }
            if argmin_scan(&c, f, t).unwrap() != [i] {
                return Err(format!("cloud {run}, point {i}: argmin not unique"));
            }
            for (j, y) in c.points().iter().enumerate() {
                if j != i && !t.strictly_positive(f.eval(y.coords()).unwrap()) {
                    return Err(format!("cloud {run}, point {i}: value at {j} not positive"));
                }
            }
            unique_minimizer_certificate(&c, i, &k, t).map_err(|e| format!("cloud {run}: {e}"))?;
            certs += 1;
        }
    }
    let mut configs = 0;
    for run in 0..300 {
        let c = random_cloud(&mut rng, 30, &[2, 3, 4, 5]);
        let ell = c.ell();
        let h = make_cp(rng.random_range(1.5..5.0), ell).unwrap();
        let a = Point::new(gauss_vec(&mut rng, ell, 3.0)).unwrap();
        let k = positive_vec(&mut rng, ell, 0.2, 2.0);
        cone_scalarization_argmin(&c, &a, &h, &k, t).map_err(|e| format!("config {run}: {e}"))?;
        configs += 1;
    }
    Ok(format!("{certs} certificates verified, {configs} cone scalarizations, 0 tripwires"))
}

fn criterion_6() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut agree, mut bounded) = (0, 0);
    for run in 0..200 {
        let c = random_cloud(&mut rng, 20, &[2, 3, 4]);
        for i in 0..c.len() {
            let b = benson_check(&c, i, t).unwrap();
            let g = geoffrion_minimal_k(&c, i, t).unwrap().is_bounded();
            if b != g {
                return Err(format!("cloud {run}, point {i}: Benson {b}, K* bounded {g}"));
            }
            agree += 1;
            bounded += usize::from(g);
        }
    }
    Ok(format!("{agree} points agree ({bounded} properly efficient)"))
}

fn criterion_7() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut trues = 0;
    for run in 0..200 {
        let c = random_cloud(&mut rng, 15, &[2, 3, 4]);
        let ell = c.ell();
        let u = match rng.random_range(0..3) {
            0 => c.points()[rng.random_range(0..c.len())].clone(),
            _ => Point::new(gauss_vec(&mut rng, ell, 1.5)).unwrap(),
        };
        let ones = vec![1.0; ell];
        let searches = [
            FamilySearch::Dk { k0: 1.0 },
            FamilySearch::Cp { p_bar: 1.0 },
            FamilySearch::Csm { s: ones.clone() },
            FamilySearch::Cw { w: ones, eps0: 1.0 },
        ];
        let answers: Vec<bool> = searches
            .iter()
            .map(|s| existence_search(&c, &u, s, t).unwrap().is_some())
            .collect();
        if answers.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("instance {run}: answers {answers:?}"));
        }
        trues += usize::from(answers[0]);
    }
    Ok(format!("200 instances, one common answer each ({trues} true, {} false)", 200 - trues))
}

fn criterion_8() -> Outcome {
    let t = tol();
    let mut prev = 0.0;
    let mut notes = Vec::new();
    for big_t in [10.0f64, 100.0, 1000.0] {
        let c = gen_hyperbola(big_t, 21).unwrap();
        let i = c.find(&[-1.0, -1.0], t).ok_or("(-1,-1) missing")?;
        let k = geoffrion_minimal_k(&c, i, t).unwrap().finite().ok_or("K* unbounded")?;
        let reference = (big_t - 1.0) / (1.0 - 1.0 / big_t);
        let rel = (k - reference).abs() / reference;
        let rel_tm1 = (k - (big_t - 1.0)).abs() / (big_t - 1.0);
        notes.push(format!(
            "T={big_t}: K*={k:.6} (rel {rel:.1e} vs (T-1)/(1-1/T), {:.1}% vs T-1)",
            100.0 * rel_tm1
        ));
        if rel > 0.10 {
            return Err(format!("T={big_t}: K* = {k}, reference {reference}"));
        }
        if k <= prev {
            return Err(format!("K* not increasing at T={big_t}"));
        }
        prev = k;
    }
    for (eps, h) in [(0.1, 0.05), (0.01, 0.01)] {
        let c = gen_boxes_e521(h).unwrap();
        let i = c.find(&[-eps, eps], t).ok_or("segment point missing")?;
        let k = geoffrion_minimal_k(&c, i, t).unwrap().finite().ok_or("K* unbounded")?;
        let expected = (1.0 + eps) / eps;
        if ((k - expected) / expected).abs() > 0.01 {
            return Err(format!("boxes ε={eps}: K* = {k}, expected {expected}"));
        }
    }
    let h = 0.05;
    let c = gen_boxes_e521(h).unwrap();
    let g: Vec<usize> = gmin_set(&c, t).unwrap().into_iter().map(|x| x.0).collect();
    let mut expected: Vec<usize> = (1..=20)
        .map(|i| c.find(&[-(i as f64) * h, i as f64 * h], t).unwrap())
        .collect();
    expected.push(c.find(&[0.0, -1.0], t).unwrap());
    expected.sort();
    if g != expected {
        return Err(format!("boxes GMin {g:?} != segment ∪ (0,-1) {expected:?}"));
    }
    notes.push(format!("boxes GMin = 20 segment points ∪ (0,-1) among {} grid points", c.len()));
    Ok(notes.join("; "))
}

fn criterion_9() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_propeff");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cloud = dir.path().join("cloud.csv");
    let run = |args: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(exe).args(args).output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
        }
        Ok(out.stdout)
    };
    let cloud_s = cloud.to_str().unwrap();
    run(&["corpus", "gen", "random", "--n", "25", "--ell", "3", "--seed", "9", "--out", cloud_s])?;
    for mode in ["gmin", "certify", "benson"] {
        let a = run(&["analyze", cloud_s, "--mode", mode, "--seed", "3"])?;
        let b = run(&["analyze", cloud_s, "--mode", mode, "--seed", "3"])?;
        if a != b {
            return Err(format!("mode {mode}: reports differ"));
        }
    }
    let t = tol();
    for (name, fmt) in [("rt.csv", Format::Csv), ("rt.json", Format::Json)] {
        let original = ingest(&cloud, Format::Csv, t).map_err(|e| e.to_string())?;
        let path = dir.path().join(name);
        let mut first = Vec::new();
        emit_writer(&original, &mut first, fmt).map_err(|e| e.to_string())?;
        std::fs::write(&path, &first).map_err(|e| e.to_string())?;
        let back = ingest(&path, fmt, t).map_err(|e| e.to_string())?;
        let mut second = Vec::new();
        emit_writer(&back, &mut second, fmt).map_err(|e| e.to_string())?;
        if back != original || first != second {
            return Err(format!("{name}: round trip changed the cloud"));
        }
    }
    Ok("byte-identical reports for gmin/certify/benson; CSV and JSON round trips exact".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("finite-set collapse GMin = Min", criterion_1, Some(30)),
        ("D^K membership and nesting", criterion_2, None),
        ("cone-family inclusion constants", criterion_3, Some(60)),
        ("Gerstewitz functional correctness", criterion_4, None),
        ("certificate suite", criterion_5, None),
        ("Benson equivalence", criterion_6, None),
        ("existence equivalence", criterion_7, None),
        ("corpus trends", criterion_8, Some(10)),
        ("CLI determinism and round trips", criterion_9, None),
    ];
    let mut failed = 0;
    for (n, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = f();
        let elapsed = start.elapsed();
        if let (Ok(msg), Some(secs)) = (&outcome, budget) {
            if elapsed > Duration::from_secs(*secs) {
                outcome = Err(format!("{msg}; runtime {elapsed:.2?} exceeds {secs} s"));
            }
        }
        match outcome {
            Ok(msg) => println!("PASS [{}] {name}: {msg} ({elapsed:.2?})", n + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{}] {name}: {msg} ({elapsed:.2?})", n + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
