//! Acceptance run: one line per criterion, nonzero exit if any fails.
//! Sizes and tolerances below are pinned; change them only on purpose.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use ncc_core::atlas::{self, bindings};
use ncc_core::cones::{build_cone, build_gl2_cone};
use ncc_core::desitter::{
    complex_boost, crown_member, kms_member, observer_member, so12_representative, so1d_point,
    tau_fixed_crown_member, wedge_member, wedge_verdict,
};
use ncc_core::flows::{wedge_factor_witness, CosetPoint};
use ncc_core::grading::{
    check_euler, euler_element, grading_projectors, symmetric_structure, Subspace, SymmetricStructure,
};
use ncc_core::jts::{BallStatus, TripleSystem};
use ncc_core::lie::{adjoint_action, build_algebra_with, AlgebraElement, Family, GroupElement};
use ncc_core::numerics::{Matrix, Tolerances, Vector};
use ncc_core::par::{map_indexed, ExecMode};
use ncc_core::verify::{
    bisect, compressing_element, random_ball_element, random_tau_fixed, random_wedge_point,
    rejected_element, run_suite, Suite, VerifyConfig, ATLAS_REALIZATIONS, GL2_CASES,
};
use ncc_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

const SEED: u64 = 20;
const BAND: f64 = 1e-6;
const GRID: usize = 100;
const T_MAX: f64 = 20.0;
const GRID_SECONDS: f64 = 30.0;
const LOCATE_TOL: f64 = 1e-6;
const BERGMAN_TOL: f64 = 1e-10;
const STRUCTURE_TOL: f64 = 1e-8;
const TUBE_TOL: f64 = 1e-10;
const COMPRESSION_AGREEMENT: f64 = 0.99;

struct Line {
    pass: bool,
    detail: String,
}

fn line(pass: bool, detail: String) -> Result<Line> {
    Ok(Line { pass, detail })
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn structure(spec: &str, label: &str) -> Result<Arc<SymmetricStructure>> {
    let s: ncc_core::lie::AlgebraSpec = spec.parse()?;
    let alg = build_algebra_with(s.family, &s.params, tol())?;
    symmetric_structure(&euler_element(&alg, label)?)
}

fn sl2_matrix(alg: &ncc_core::lie::Algebra, e: [f64; 4]) -> Result<AlgebraElement> {
    AlgebraElement::from_matrix(alg, &Matrix::from_row_slice(2, 2, &e))
}

fn random_in(sub: &Subspace, rng: &mut ChaCha8Rng, r: f64) -> Result<AlgebraElement> {
    let c: Vec<f64> = (0..sub.dim()).map(|_| rng.gen_range(-r..=r)).collect();
    sub.element(&c)
}

fn triple_equality() -> Result<Line> {
    let start = Instant::now();
    let s = structure("so:1,2", "boost")?;
    let cone = build_cone(&s, 64, SEED)?;
    let t = tol();
    let verdicts = map_indexed(GRID * GRID, ExecMode::Parallel, |k| -> Result<Option<bool>> {
        let sv = -3.0 + 6.0 * (k / GRID) as f64 / (GRID - 1) as f64;
        let phi = 2.0 * PI * (k % GRID) as f64 / GRID as f64;
        let g = so12_representative(s.algebra(), sv, phi)?;
        let x = so1d_point(&g)?;
        if wedge_verdict(&x, BAND).decided().is_none() {
            return Ok(None);
        }
        let w = wedge_member(&x);
        let pos = cone.positivity_member(&g)?;
        let obs = observer_member(&x, T_MAX, 400, &t)?;
        let kms = kms_member(&x, 64, &t)?;
        Ok(Some(pos == w && obs == w && kms == w))
    });
    let (mut agree, mut bad, mut skipped) = (0, 0, 0);
    for v in verdicts {
        match v? {
            Some(true) => agree += 1,
            Some(false) => bad += 1,
            None => skipped += 1,
        }
    }
    let secs = start.elapsed().as_secs_f64();
    line(
        bad == 0 && agree > 0 && secs < GRID_SECONDS,
        format!("{agree} agree, {bad} disagree, {skipped} in band {BAND:e}; {secs:.1}s (limit {GRID_SECONDS}s)"),
    )
}

fn omega_interval() -> Result<Line> {
    let s = structure("sl:2", "h1")?;
    let cone = build_cone(&s, 64, SEED)?;
    let z = sl2_matrix(s.algebra(), [0.0, -0.5, 0.5, 0.0])?;
    let mut worst = 0.0_f64;
    for sign in [1.0, -1.0] {
        let t = bisect(1.0, 2.0, 1e-9, |t| cone.positivity_member(&GroupElement::exp(&z.scale(sign * t))?))?;
        worst = worst.max((t - FRAC_PI_2).abs());
    }
    line(worst < LOCATE_TOL, format!("|t - pi/2| = {worst:.2e} (tol {LOCATE_TOL:e})"))
}

fn gl2_family() -> Result<Line> {
    let alg = build_algebra_with(Family::Gl, &[2], tol())?;
    let z = sl2_matrix(&alg, [0.0, -0.5, 0.5, 0.0])?;
    let mut worst = 0.0_f64;
    for (m, l) in GL2_CASES {
        let mu = l - 1.0;
        let s = symmetric_structure(&euler_element(&alg, &format!("diag:{l},{mu}"))?)?;
        let cone = build_gl2_cone(&s, m, 16, SEED)?;
        let t = bisect(0.0, FRAC_PI_2, 1e-9, |t| cone.positivity_member(&GroupElement::exp(&z.scale(t))?))?;
        worst = worst.max((t - (m.sqrt() * (l + mu).abs()).acos()).abs());
    }
    let s = symmetric_structure(&euler_element(&alg, "diag:0.5,-0.5")?)?;
    let cone = build_gl2_cone(&s, 1.0, 16, SEED)?;
    let i11 = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, -1.0]));
    let mut r = rng(3);
    let (mut tested, mut bad) = (0, 0);
    for _ in 0..1000 {
        let x = random_in(&s.q, &mut r, 1.0)?;
        let p = &x.matrix * &i11 + &i11 * x.matrix.transpose();
        let lo = p.symmetric_eigen().eigenvalues.min();
        if lo.abs() <= BAND * x.matrix.norm() {
            continue;
        }
        tested += 1;
        if cone.in_max_cone(&x, false)? != (lo >= 0.0) {
            bad += 1;
        }
    }
    line(
        worst < LOCATE_TOL && bad == 0,
        format!("worst transition error {worst:.2e} (tol {LOCATE_TOL:e}); PSD match {}/{tested}", tested - bad),
    )
}

fn bergman() -> Result<Line> {
    let s = structure("sl:2", "h1")?;
    let ts = TripleSystem::new(&s)?;
    let e = sl2_matrix(s.algebra(), [0.0, 1.0, 0.0, 0.0])?;
    let f = sl2_matrix(s.algebra(), [0.0, 0.0, 1.0, 0.0])?;
    let mut r = rng(4);
    let (mut worst, mut bad, mut skipped) = (0.0_f64, 0, 0);
    for _ in 0..1000 {
        let (x, y): (f64, f64) = (r.gen_range(-2.0..=2.0), r.gen_range(-2.0..=2.0));
        let (xe, yf) = (e.scale(x), f.scale(y));
        let b = ts.bergman_plus(&xe, &yf)?;
        worst = worst.max((b - Matrix::identity(1, 1) * (1.0 + x * y).powi(2)).norm());
        if (x * y + 1.0).abs() <= BAND {
            skipped += 1;
            continue;
        }
        let g = GroupElement::from_word(s.algebra(), &[yf.clone(), xe.clone()])?;
        if ts.bruhat_factor(&g)?.is_some() != ts.bergman_invertible(&xe, &yf)? {
            bad += 1;
        }
    }
    line(
        worst < BERGMAN_TOL && bad == 0,
        format!("closed-form residual {worst:.2e} (tol {BERGMAN_TOL:e}); {bad} Bruhat disagreements, {skipped} in band"),
    )
}

fn convexity() -> Result<Line> {
    let mut bad = 0;
    let mut tested = 0;
    for (k, (spec, label)) in [("sl:2", "h1"), ("sl:3", "h1")].into_iter().enumerate() {
        let ts = TripleSystem::new(&structure(spec, label)?)?;
        let mut r = rng(50 + k as u64);
        let mut found = 0;
        while found < 100 {
            let g = random_ball_element(&ts, &mut r)?;
            if ts.ball_status(&g)? == BallStatus::Outside {
                continue;
            }
            found += 1;
            tested += 1;
            if !ts.convexity_check(&g, 200, SEED + found)? {
                bad += 1;
            }
        }
    }
    line(bad == 0, format!("{tested} elements x 200 midpoint pairs, {bad} failures"))
}

fn compression() -> Result<Line> {
    let s = structure("sl:2", "h1")?;
    let ts = TripleSystem::new(&s)?;
    let z = sl2_matrix(s.algebra(), [0.0, -0.5, 0.5, 0.0])?;
    let mut r = rng(6);
    let (mut agree, mut total) = (0, 0);
    for i in 0..500 {
        let g = compressing_element(&s, &z, &mut r)?;
        total += 1;
        agree += usize::from(ts.compression_member(&g, 64, SEED + i)?);
    }
    let mut rejects = 0;
    while rejects < 500 {
        let Some(g) = rejected_element(&s, &z, &mut r)? else { continue };
        rejects += 1;
        total += 1;
        agree += usize::from(!ts.compression_member(&g, 64, SEED + rejects)?);
    }
    let frac = agree as f64 / total as f64;
    // every sample sits outside the band, so any disagreement is a failure
    line(
        frac >= COMPRESSION_AGREEMENT && agree == total,
        format!("{agree}/{total} agree (need {COMPRESSION_AGREEMENT}, none outside band)"),
    )
}

fn structure_invariants() -> Result<Line> {
    let cfg = VerifyConfig { seed: SEED, samples: 1000, ..Default::default() };
    let report = run_suite(Suite::Grading, &cfg)?;
    let ids = [
        "grading.projectors",
        "grading.closure",
        "grading.symmetric_pair",
        "grading.jacobi",
        "grading.killing_invariance",
    ];
    let mut worst = 0.0_f64;
    let mut pass = true;
    for c in report.checks.iter().filter(|c| ids.contains(&c.id.as_str())) {
        worst = worst.max(c.max_residual);
        pass &= c.pass && c.max_residual < STRUCTURE_TOL;
    }
    line(pass, format!("8 algebras, worst residual {worst:.2e} (tol {STRUCTURE_TOL:e})"))
}

fn tube_identity() -> Result<Line> {
    let mut worst = 0.0_f64;
    let mut bad_tube = 0;
    let mut tube_tested = 0;
    for (k, (spec, label)) in [("sl:2", "h1"), ("sl:3", "h1"), ("sl:4", "h2")].into_iter().enumerate() {
        let s = structure(spec, label)?;
        let ts = TripleSystem::new(&s)?;
        let cone = build_cone(&s, 64, SEED)?;
        let mut r = rng(80 + k as u64);
        for i in 0..1000 {
            let z = random_in(&s.grading.plus, &mut r, 2.0)?;
            let lhs = adjoint_action(&GroupElement::exp(&z.scale(-1.0))?, s.h())?;
            worst = worst.max((&lhs.matrix - &(s.h() + &z).matrix).norm());
            if i % 10 != 0 || k == 2 {
                continue;
            }
            let nz = ts.spectral_norm(&z)?;
            let x = s.h() + &z;
            let expect = if nz < 1.0 - BAND {
                Some(true)
            } else if nz > 1.0 + BAND && k == 0 {
                Some(false)
            } else {
                None
            };
            if let Some(e) = expect {
                tube_tested += 1;
                bad_tube += usize::from(cone.in_tube(&x)? != e);
            }
        }
    }
    line(
        worst < TUBE_TOL && bad_tube == 0,
        format!("identity residual {worst:.2e} (tol {TUBE_TOL:e}); tube {}/{tube_tested}", tube_tested - bad_tube),
    )
}

fn crown() -> Result<Line> {
    let t = tol();
    let mut r = rng(9);
    let (mut bad, mut saturated) = (0, 0);
    for i in 0..200 {
        let d = 2 + i % 2;
        let sat = i % 4 == 0;
        let z = random_tau_fixed(&mut r, d, sat)?;
        let inside = tau_fixed_crown_member(&z, &t)
            && (0..=100).all(|k| {
                let s = (FRAC_PI_2 - 1e-3) * (-1.0 + 2.0 * k as f64 / 100.0);
                crown_member(&complex_boost(s, &z), &t)
            });
        let im = z.components();
        let q = im[0].im * im[0].im - im[1].im * im[1].im;
        let leaves = if q >= 1.0 - 1e-6 {
            saturated += 1;
            !crown_member(&complex_boost(FRAC_PI_2 + 1e-2, &z), &t)
        } else {
            true
        };
        bad += usize::from(!(inside && leaves));
    }
    line(bad == 0, format!("200 points ({saturated} saturated), {bad} failures"))
}

fn atlas_rows() -> Result<Line> {
    let rows = atlas::load_atlas()?;
    let mut bad = 0;
    for row in &rows {
        for b in row.sample_bindings()? {
            let v = row.values(&b)?;
            bad += usize::from(v.r != row.type_tag.rank_ratio() * v.s);
        }
    }
    let mut realized = 0;
    for (id, b) in ATLAS_REALIZATIONS {
        let row = atlas::lookup(&rows, id)[0];
        let b = bindings(b);
        let Some((spec, label)) = atlas::realizable(row, &b)? else {
            bad += 1;
            continue;
        };
        let alg = build_algebra_with(spec.family, &spec.params, tol())?;
        let h = euler_element(&alg, &label)?;
        let g1 = grading_projectors(&h)?.plus.dim() as i64;
        bad += usize::from(!check_euler(&h, &tol()) || g1 != row.values(&b)?.g1_dim);
        realized += 1;
    }
    line(rows.len() == 20 && bad == 0, format!("{} rows, {realized} realizations, {bad} failures", rows.len()))
}

fn witnesses() -> Result<Line> {
    let s = structure("so:1,2", "boost")?;
    let cone = build_cone(&s, 64, SEED)?;
    let results = map_indexed(200, ExecMode::Parallel, |i| -> Result<Option<f64>> {
        let mut r = rng(1100 + i as u64);
        let (sv, phi) = random_wedge_point(&mut r, BAND);
        let p = CosetPoint::new(&s, so12_representative(s.algebra(), sv, phi)?);
        Ok(wedge_factor_witness(&p, &cone, SEED + i as u64)?.map(|w| w.rho))
    });
    let (mut ok, mut worst) = (0, 0.0_f64);
    for r in results {
        if let Some(rho) = r? {
            worst = worst.max(rho);
            ok += usize::from(rho < FRAC_PI_2 - BAND);
        }
    }
    line(ok == 200, format!("{ok}/200 witnesses, max rho {worst:.4} (< pi/2 - {BAND:e})"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Line>); 11] = [
        ("dS2 wedge triple equality", triple_equality),
        ("Omega interval for sl2", omega_interval),
        ("gl2 cone family", gl2_family),
        ("Bergman closed form and Bruhat cell", bergman),
        ("convexity", convexity),
        ("compression semigroup", compression),
        ("grading and structure invariants", structure_invariants),
        ("tube identity", tube_identity),
        ("crown boundary", crown),
        ("atlas", atlas_rows),
        ("wedge factorization witness", witnesses),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = match f() {
            Ok(l) => (l.pass, l.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= pass;
        println!("criterion {:>2} {}: {name}: {detail}", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
