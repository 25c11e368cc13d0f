//! Property suites behind `ncc verify`. Each check samples its own inputs
//! from `(seed, check id, sample index)`, so reports are identical in
//! sequential and parallel mode and across runs.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atlas::{self, bindings};
use crate::cones::{build_cone, build_gl2_cone, check_causal_euler, gl2_coordinates};
use crate::desitter::{
    causal_leq, complex_boost, crown_member, ds_geodesic, kms_member, lorentz_form, observer_member,
    scan_grid, sl2_point, so12_representative, so1d_point, tau_fixed_crown_member, wedge_verdict,
    boost_flow, ComplexPoint, DSPoint, MinkowskiVector,
};
use crate::error::{NccError, Result};
use crate::flows::{
    geodesic_check, geodesic_orbit_test, modular_flow, transport_witness, wedge_factor_witness, Chart,
    CosetPoint, OrbitKind,
};
use crate::grading::{check_euler, euler_element, symmetric_structure, SymmetricStructure};
use crate::jts::{BallStatus, TripleSystem};
use crate::lie::{
    adjoint_action, ad_matrix, bracket, build_algebra_with, killing, Algebra, AlgebraElement,
    AlgebraSpec, Family, GroupElement,
};
use crate::numerics::{eigenvalues, expm, Matrix, Tolerances, Vector};
use crate::par::{map_indexed, ExecMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Grading,
    Cones,
    Jts,
    Flows,
    Desitter,
    Atlas,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = ["grading", "cones", "jts", "flows", "desitter", "atlas", "all"];

    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Grading,
                Suite::Cones,
                Suite::Jts,
                Suite::Flows,
                Suite::Desitter,
                Suite::Atlas,
            ],
            s => vec![s],
        }
    }
}

impl FromStr for Suite {
    type Err = NccError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "grading" => Suite::Grading,
            "cones" => Suite::Cones,
            "jts" => Suite::Jts,
            "flows" => Suite::Flows,
            "desitter" => Suite::Desitter,
            "atlas" => Suite::Atlas,
            "all" => Suite::All,
            _ => return Err(NccError::Parse(format!("unknown suite `{s}`"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Suite::NAMES[i])
    }
}

/// Effective configuration, echoed into every report. The execution mode
/// is left out on purpose: it does not change results.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    /// Restricts the grading and cones suites to one algebra.
    pub algebra: Option<String>,
    pub euler: Option<String>,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub samples: usize,
    pub grid: usize,
    pub t_max: f64,
    #[serde(skip)]
    pub mode: ExecMode,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            algebra: None,
            euler: None,
            tolerances: Tolerances::default(),
            seed: 0,
            samples: 1000,
            grid: 100,
            t_max: 20.0,
            mode: ExecMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub pass: bool,
    pub count: usize,
    pub failures: usize,
    /// Samples skipped for lying inside the boundary band.
    pub boundary: usize,
    pub max_residual: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: VerifyConfig,
    pub pass: bool,
    pub total: usize,
    pub agree: usize,
    pub disagree: usize,
    pub boundary: usize,
    pub checks: Vec<CheckResult>,
}

/// One sample: `Skip` for boundary cases, otherwise pass flag and residual.
#[derive(Debug, Clone)]
enum Outcome {
    Skip,
    Done(bool, f64),
    Error(String),
}

impl From<Result<Outcome>> for Outcome {
    fn from(r: Result<Outcome>) -> Self {
        r.unwrap_or_else(|e| Outcome::Error(e.to_string()))
    }
}

fn residual_outcome(residual: f64, threshold: f64) -> Outcome {
    Outcome::Done(residual.is_finite() && residual < threshold, residual)
}

fn tally(id: &str, threshold: f64, outcomes: Vec<Outcome>) -> CheckResult {
    let mut r = CheckResult {
        id: id.to_string(),
        pass: false,
        count: 0,
        failures: 0,
        boundary: 0,
        max_residual: 0.0,
        threshold,
        note: None,
    };
    for o in outcomes {
        match o {
            Outcome::Skip => r.boundary += 1,
            Outcome::Done(ok, res) => {
                r.count += 1;
                if !ok {
                    r.failures += 1;
                }
                if res.is_nan() || res > r.max_residual {
                    r.max_residual = res;
                }
            }
            Outcome::Error(msg) => {
                r.count += 1;
                r.failures += 1;
                r.note.get_or_insert(msg);
            }
        }
    }
    r.pass = r.failures == 0 && r.count > 0;
    if r.count == 0 && r.note.is_none() {
        r.note = Some("no applicable samples".into());
    }
    r
}

fn stream_id(id: &str) -> u64 {
    id.bytes().fold(0xcbf29ce484222325_u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

fn sample_rng(seed: u64, id: &str, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stream_id(id));
    rng.set_stream(i as u64);
    rng
}

struct Ctx<'a> {
    cfg: &'a VerifyConfig,
}

impl Ctx<'_> {
    fn tol(&self) -> Tolerances {
        self.cfg.tolerances
    }

    fn band(&self) -> f64 {
        self.cfg.tolerances.boundary_band
    }

    fn run<F>(&self, id: &str, threshold: f64, n: usize, f: F) -> CheckResult
    where
        F: Fn(&mut ChaCha8Rng, usize) -> Result<Outcome> + Sync + Send,
    {
        let seed = self.cfg.seed;
        let outcomes = map_indexed(n, self.cfg.mode, |i| {
            let mut rng = sample_rng(seed, id, i);
            Outcome::from(f(&mut rng, i))
        });
        tally(id, threshold, outcomes)
    }

    fn structure(&self, spec: &str, label: &str) -> Result<Arc<SymmetricStructure>> {
        let s: AlgebraSpec = spec.parse()?;
        let alg = build_algebra_with(s.family, &s.params, self.tol())?;
        symmetric_structure(&euler_element(&alg, label)?)
    }

    fn algebra_list(&self) -> Vec<(String, String)> {
        if let Some(a) = &self.cfg.algebra {
            let e = self.cfg.euler.clone().unwrap_or_else(|| "h1".into());
            return vec![(a.clone(), e)];
        }
        STANDARD_ALGEBRAS.iter().map(|(a, e)| (a.to_string(), e.to_string())).collect()
    }
}

/// The algebras exercised by default, with their Euler labels.
pub const STANDARD_ALGEBRAS: [(&str, &str); 8] = [
    ("sl:2", "h1"),
    ("sl:3", "h1"),
    ("sl:4", "h2"),
    ("so:1,2", "boost"),
    ("so:1,3", "boost"),
    ("so:2,2", "h2"),
    ("so:2,3", "boost"),
    ("sp:4", "h2"),
];

/// Runs `suite` and assembles the report with checks sorted by id.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    cfg.tolerances.validate()?;
    if cfg.samples == 0 || cfg.grid < 2 || !(cfg.t_max > 0.0) {
        return Err(NccError::Precondition("samples > 0, grid >= 2 and t_max > 0 are required".into()));
    }
    let ctx = Ctx { cfg };
    let mut checks = Vec::new();
    for part in suite.parts() {
        checks.extend(match part {
            Suite::Grading => grading_suite(&ctx)?,
            Suite::Cones => cones_suite(&ctx)?,
            Suite::Jts => jts_suite(&ctx)?,
            Suite::Flows => flows_suite(&ctx)?,
            Suite::Desitter => desitter_suite(&ctx)?,
            Suite::Atlas => atlas_suite(&ctx)?,
            Suite::All => unreachable!(),
        });
    }
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    let total = checks.iter().map(|c| c.count).sum::<usize>();
    let failures = checks.iter().map(|c| c.failures).sum::<usize>();
    Ok(SuiteReport {
        suite: suite.to_string(),
        config: cfg.clone(),
        pass: checks.iter().all(|c| c.pass),
        total,
        agree: total - failures,
        disagree: failures,
        boundary: checks.iter().map(|c| c.boundary).sum(),
        checks,
    })
}

fn merge(id: &str, threshold: f64, parts: Vec<CheckResult>) -> CheckResult {
    let mut r = CheckResult {
        id: id.to_string(),
        pass: true,
        count: 0,
        failures: 0,
        boundary: 0,
        max_residual: 0.0,
        threshold,
        note: None,
    };
    for p in parts {
        r.count += p.count;
        r.failures += p.failures;
        r.boundary += p.boundary;
        r.pass &= p.pass;
        if p.max_residual.is_nan() || p.max_residual > r.max_residual {
            r.max_residual = p.max_residual;
        }
        if r.note.is_none() {
            r.note = p.note;
        }
    }
    // a part with no applicable samples is not a failure of the merged check
    r.pass = r.failures == 0 && r.count > 0;
    r
}

fn random_in(sub: &crate::grading::Subspace, rng: &mut ChaCha8Rng, r: f64) -> Result<AlgebraElement> {
    let c: Vec<f64> = (0..sub.dim()).map(|_| rng.gen_range(-r..=r)).collect();
    sub.element(&c)
}

fn random_element(alg: &Algebra, rng: &mut ChaCha8Rng, r: f64) -> Result<AlgebraElement> {
    let c = Vector::from_fn(alg.dim(), |_, _| rng.gen_range(-r..=r));
    AlgebraElement::from_coords(alg, c)
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng, r: f64) -> Matrix {
    Matrix::from_fn(n, n, |_, _| rng.gen_range(-r..=r))
}

fn sl2_parts(alg: &Algebra) -> Result<(AlgebraElement, AlgebraElement)> {
    let m = |e: [f64; 4]| AlgebraElement::from_matrix(alg, &Matrix::from_row_slice(2, 2, &e));
    Ok((m([0.0, -0.5, 0.5, 0.0])?, m([0.0, 0.5, 0.5, 0.0])?))
}

fn grading_suite(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let structures = ctx
        .algebra_list()
        .iter()
        .map(|(a, e)| Ok((format!("{a}/{e}"), ctx.structure(a, e)?)))
        .collect::<Result<Vec<_>>>()?;
    let n_rand = (ctx.cfg.samples / 20).clamp(5, 100);
    let mut euler = Vec::new();
    let mut proj = Vec::new();
    let mut closure = Vec::new();
    let mut pair = Vec::new();
    let mut jacobi = Vec::new();
    let mut kill = Vec::new();
    let mut adh = Vec::new();
    let mut tau = Vec::new();
    let mut expid = Vec::new();
    for (name, s) in &structures {
        let alg = s.algebra().clone();
        let tol = s.tol();
        euler.push(ctx.run(&format!("grading.euler:{name}"), 1e-8, 1, |_, _| {
            let a = ad_matrix(s.h());
            let res = (&a * &a * &a - &a).norm();
            Ok(Outcome::Done(check_euler(s.h(), &tol) && res < 1e-8, res))
        }));
        proj.push(ctx.run(&format!("grading.projectors:{name}"), 1e-8, 1, |_, _| {
            let g = &s.grading;
            let d = alg.dim();
            let mut res = (&g.p_minus + &g.p_zero + &g.p_plus - Matrix::identity(d, d)).norm();
            for p in [&g.p_minus, &g.p_zero, &g.p_plus] {
                res = res.max((p * p - p).norm());
            }
            Ok(residual_outcome(res, 1e-8))
        }));
        let graded = [(-1i32, &s.grading.minus), (0, &s.grading.zero), (1, &s.grading.plus)];
        closure.push(ctx.run(&format!("grading.closure:{name}"), 1e-8, 1, |_, _| {
            let mut res = 0.0_f64;
            for (i, a) in &graded {
                for (j, b) in &graded {
                    let target = graded.iter().find(|(k, _)| *k == i + j).map(|(_, s)| *s);
                    for x in &a.basis {
                        for y in &b.basis {
                            let c = bracket(x, y)?;
                            res = res.max(match target {
                                Some(t) => t.residual(&c),
                                None => c.norm(),
                            });
                        }
                    }
                }
            }
            Ok(residual_outcome(res, 1e-8))
        }));
        pair.push(ctx.run(&format!("grading.symmetric_pair:{name}"), 1e-8, 1, |_, _| {
            let mut res = 0.0_f64;
            for (a, b, target) in [(&s.q, &s.q, &s.h_alg), (&s.h_alg, &s.q, &s.q), (&s.h_alg, &s.h_alg, &s.h_alg)] {
                for x in &a.basis {
                    for y in &b.basis {
                        res = res.max(target.residual(&bracket(x, y)?));
                    }
                }
            }
            Ok(residual_outcome(res, 1e-8))
        }));
        jacobi.push(ctx.run(&format!("grading.jacobi:{name}"), 1e-8, n_rand, |rng, _| {
            let (x, y, z) = (
                random_element(&alg, rng, 1.0)?,
                random_element(&alg, rng, 1.0)?,
                random_element(&alg, rng, 1.0)?,
            );
            let a = bracket(&x, &bracket(&y, &z)?)?;
            let b = bracket(&y, &bracket(&z, &x)?)?;
            let c = bracket(&z, &bracket(&x, &y)?)?;
            Ok(residual_outcome((&(&a + &b) + &c).norm(), 1e-8))
        }));
        kill.push(ctx.run(&format!("grading.killing_invariance:{name}"), 1e-8, n_rand, |rng, _| {
            let (x, y, z) = (
                random_element(&alg, rng, 1.0)?,
                random_element(&alg, rng, 1.0)?,
                random_element(&alg, rng, 1.0)?,
            );
            let inv = killing(&bracket(&z, &x)?, &y)? + killing(&x, &bracket(&z, &y)?)?;
            let sym = killing(&x, &y)? - killing(&y, &x)?;
            let scale = killing(&x, &x)?.abs().max(1.0);
            Ok(residual_outcome((inv.abs() + sym.abs()) / scale, 1e-8))
        }));
        adh.push(ctx.run(&format!("grading.adjoint_homomorphism:{name}"), 1e-8, n_rand, |rng, _| {
            let g = GroupElement::exp(&random_element(&alg, rng, 0.5)?)?;
            let (x, y) = (random_element(&alg, rng, 1.0)?, random_element(&alg, rng, 1.0)?);
            let lhs = adjoint_action(&g, &bracket(&x, &y)?)?;
            let (gx, gy) = (adjoint_action(&g, &x)?, adjoint_action(&g, &y)?);
            let rhs = bracket(&gx, &gy)?;
            let scale = lhs.norm().max(1.0);
            let dk = (killing(&gx, &gy)? - killing(&x, &y)?).abs() / killing(&x, &x)?.abs().max(1.0);
            Ok(residual_outcome((&lhs - &rhs).norm() / scale + dk, 1e-8))
        }));
        tau.push(ctx.run(&format!("grading.tau_involution:{name}"), 1e-8, 1, |_, _| {
            let d = alg.dim();
            let mut res = (&s.tau_h * &s.tau_h - Matrix::identity(d, d)).norm();
            res = res.max((&s.tau * &s.tau - Matrix::identity(d, d)).norm());
            for x in &s.grading.zero.basis {
                res = res.max((&s.apply(&s.tau_h, x) - x).norm());
            }
            let basis: Vec<_> = (0..d).map(|i| AlgebraElement::basis(&alg, i)).collect();
            for a in &basis {
                for b in &basis {
                    let l = s.tau_of(&bracket(a, b)?);
                    let r = bracket(&s.tau_of(a), &s.tau_of(b))?;
                    res = res.max((&l - &r).norm());
                }
            }
            Ok(residual_outcome(res, 1e-8))
        }));
        if matches!(alg.family, Family::Sl) {
            expid.push(ctx.run(&format!("grading.exp_identity:{name}"), 1e-10, ctx.cfg.samples, |rng, _| {
                let z = random_in(&s.grading.plus, rng, 1.0)?;
                let lhs = adjoint_action(&GroupElement::exp(&z.scale(-1.0))?, s.h())?;
                Ok(residual_outcome((&lhs - &(s.h() + &z)).norm(), 1e-10))
            }));
        }
    }
    let mut out = vec![
        merge("grading.euler", 1e-8, euler),
        merge("grading.projectors", 1e-8, proj),
        merge("grading.closure", 1e-8, closure),
        merge("grading.symmetric_pair", 1e-8, pair),
        merge("grading.jacobi", 1e-8, jacobi),
        merge("grading.killing_invariance", 1e-8, kill),
        merge("grading.adjoint_homomorphism", 1e-8, adh),
        merge("grading.tau_involution", 1e-8, tau),
    ];
    if !expid.is_empty() {
        out.push(merge("grading.exp_identity", 1e-10, expid));
    }
    out.extend(numerics_checks(ctx));
    Ok(out)
}

fn numerics_checks(ctx: &Ctx) -> Vec<CheckResult> {
    let n = (ctx.cfg.samples / 10).clamp(5, 100);
    let spec_tol = ctx.tol().spec_tol;
    vec![
        ctx.run("numerics.expm_inverse", 1e-10, n, |rng, _| {
            let size = rng.gen_range(2..=6);
            let mut a = random_matrix(size, rng, 1.0);
            let s = a.clone().svd(false, false).singular_values.max();
            if s > 2.0 {
                a *= 2.0 / s;
            }
            let p = expm(&a)? * expm(&(-&a))?;
            Ok(residual_outcome((p - Matrix::identity(size, size)).norm(), 1e-10))
        }),
        ctx.run("numerics.similarity_spectrum", spec_tol, n, |rng, _| {
            let size = rng.gen_range(2..=6);
            let a = random_matrix(size, rng, 1.0);
            let s = random_matrix(size, rng, 1.0) + Matrix::identity(size, size) * 3.0;
            let Some(si) = s.clone().try_inverse() else {
                return Ok(Outcome::Skip);
            };
            let mut e1 = eigenvalues(&a)?;
            let mut e2 = eigenvalues(&(&s * &a * si))?;
            let key = |z: &crate::numerics::C64| (z.re, z.im);
            e1.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
            e2.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
            // sorted pairing can cross for near-equal real parts; match greedily
            let mut res = 0.0_f64;
            let mut used = vec![false; e2.len()];
            for z in &e1 {
                let (j, d) = e2
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| !used[*j])
                    .map(|(j, w)| (j, (z - w).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("same size");
                used[j] = true;
                res = res.max(d);
            }
            Ok(residual_outcome(res, spec_tol))
        }),
        ctx.run("numerics.trace", 1e-8, n, |rng, _| {
            let size = rng.gen_range(1..=8);
            let a = random_matrix(size, rng, 2.0);
            let sum: f64 = eigenvalues(&a)?.iter().map(|z| z.re).sum();
            Ok(residual_outcome((sum - a.trace()).abs(), 1e-8))
        }),
    ]
}

fn cones_suite(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let seed = ctx.cfg.seed;
    let n = (ctx.cfg.samples / 5).max(10);
    let mut inv = Vec::new();
    let mut dual = Vec::new();
    let mut causal = Vec::new();
    let mut wedge = Vec::new();
    for (a, e) in ctx.algebra_list() {
        let s = ctx.structure(&a, &e)?;
        if s.q.dim() == 0 || s.h_alg.dim() == 0 {
            continue;
        }
        let cone = build_cone(&s, 128, seed)?;
        let name = format!("{a}/{e}");
        let band = ctx.band();
        inv.push(ctx.run(&format!("cones.h_invariance:{name}"), 0.0, n, |rng, _| {
            // x: a positive combination of orbit samples lies in C_min ⊆ C_max
            let k = rng.gen_range(1..=3);
            let mut x = AlgebraElement::zero(s.algebra());
            for _ in 0..k {
                let i = rng.gen_range(0..cone.orbit_samples.len());
                x = &x + &cone.orbit_samples[i].scale(rng.gen_range(0.1..1.0));
            }
            let y = random_in(&s.h_alg, rng, 1.0)?;
            let moved = adjoint_action(&GroupElement::exp(&y)?, &x)?;
            let moved = s.q.project(&moved);
            Ok(Outcome::Done(cone.in_max_cone(&moved, false)?, 0.0))
        }));
        dual.push(ctx.run(&format!("cones.duality:{name}"), 1e-8, 1, |_, _| {
            let mut worst = 0.0_f64;
            let fro = |x: &AlgebraElement| x.matrix.norm();
            for u in &cone.orbit_samples {
                for v in &cone.orbit_samples {
                    let k = cone.killing(u, v) / (fro(u) * fro(v));
                    worst = worst.max(-k);
                }
            }
            Ok(residual_outcome(worst, 1e-8))
        }));
        causal.push(ctx.run(&format!("cones.causal_euler:{name}"), 0.0, 1, |_, _| {
            let r = check_causal_euler(&cone, s.h())?;
            Ok(Outcome::Done(r.all_pass(), r.tau_automorphism.residual))
        }));
        let resolution = if cone.exact.is_some() { band } else { SAMPLED_RESOLUTION };
        wedge.push(ctx.run(&format!("cones.wedge_invariance:{name}"), 0.0, n, |rng, _| {
            let mut word = vec![random_in(&s.q, rng, 1.0)?];
            word.push(random_in(&s.h_alg, rng, 1.0)?);
            let g = GroupElement::from_word(s.algebra(), &word)?;
            let x = s.q.project(&adjoint_action(&g.inverse(), s.h())?);
            if !cone.in_max_cone(&x, true)? {
                return Ok(Outcome::Skip);
            }
            // stay clear of the cone boundary
            let shrunk = &x - &s.h().scale(resolution * x.norm());
            if !cone.in_max_cone(&shrunk, true)? {
                return Ok(Outcome::Skip);
            }
            let t = rng.gen_range(-2.0..2.0);
            let k = GroupElement::exp(&random_in(&s.h_alg, rng, 1.0)?)?;
            let moved = GroupElement::exp(&s.h().scale(t))?.compose(&g)?.compose(&k)?;
            let member = cone.positivity_member(&moved)?;
            // a sampled cone is only H-invariant up to its resolution
            let y = s.q.project(&adjoint_action(&moved.inverse(), s.h())?);
            let d = s.h().scale(resolution * y.norm());
            if cone.in_max_cone(&(&y - &d), true)? != cone.in_max_cone(&(&y + &d), true)? {
                return Ok(Outcome::Skip);
            }
            Ok(Outcome::Done(member, 0.0))
        }));
    }
    let mut out = vec![
        merge("cones.h_invariance", 0.0, inv),
        merge("cones.duality", 1e-8, dual),
        merge("cones.causal_euler", 0.0, causal),
        merge("cones.wedge_invariance", 0.0, wedge),
    ];
    out.push(sl2_exact_check(ctx)?);
    out.push(omega_interval_check(ctx)?);
    out.push(gl2_family_check(ctx)?);
    out.push(gl2_psd_check(ctx)?);
    Ok(out)
}

fn sl2_exact_check(ctx: &Ctx) -> Result<CheckResult> {
    let s = ctx.structure("sl:2", "h1")?;
    let cone = build_cone(&s, 512, ctx.cfg.seed)?;
    let (z, _) = sl2_parts(s.algebra())?;
    let n = ctx.cfg.grid;
    let band = ctx.band();
    Ok(ctx.run("cones.sl2_exact", 0.0, n * n, |_, k| {
        let c = -2.0 + 4.0 * (k / n) as f64 / (n - 1) as f64;
        let d = -2.0 + 4.0 * (k % n) as f64 / (n - 1) as f64;
        let expect = c - d.abs();
        if expect.abs() <= band * (c.abs() + d.abs()).max(1.0) {
            return Ok(Outcome::Skip);
        }
        let x = &s.h().scale(c) + &z.scale(d);
        Ok(Outcome::Done(cone.in_sampled_cone(&x, false)? == (expect > 0.0), 0.0))
    }))
}

/// Bisects the switch of `member(t)` from true to false on `[lo, hi]`.
pub fn bisect<F>(mut lo: f64, mut hi: f64, tol: f64, member: F) -> Result<f64>
where
    F: Fn(f64) -> Result<bool>,
{
    if !member(lo)? || member(hi)? {
        return Err(NccError::Precondition("bisection needs member(lo) && !member(hi)".into()));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if member(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn omega_interval_check(ctx: &Ctx) -> Result<CheckResult> {
    let s = ctx.structure("sl:2", "h1")?;
    let cone = build_cone(&s, 64, ctx.cfg.seed)?;
    let (z, _) = sl2_parts(s.algebra())?;
    Ok(ctx.run("cones.omega_interval", 1e-6, 2, |_, i| {
        let sign = if i == 0 { 1.0 } else { -1.0 };
        let t = bisect(1.0, 2.0, 1e-9, |t| cone.positivity_member(&GroupElement::exp(&z.scale(sign * t))?))?;
        Ok(residual_outcome((t - FRAC_PI_2).abs(), 1e-6))
    }))
}

/// Relative margin inside which a sampled cone's verdict is treated as boundary.
const SAMPLED_RESOLUTION: f64 = 0.05;

pub const GL2_CASES: [(f64, f64); 3] = [(0.25, 0.75), (1.0, 0.6), (1.0, 0.9)];

fn gl2_family_check(ctx: &Ctx) -> Result<CheckResult> {
    Ok(ctx.run("cones.gl2_family", 1e-6, GL2_CASES.len(), |_, i| {
        let (m, l) = GL2_CASES[i];
        let mu = l - 1.0;
        let alg = build_algebra_with(Family::Gl, &[2], ctx.tol())?;
        let s = symmetric_structure(&euler_element(&alg, &format!("diag:{l},{mu}"))?)?;
        let cone = build_gl2_cone(&s, m, 16, ctx.cfg.seed)?;
        let z = AlgebraElement::from_matrix(&alg, &Matrix::from_row_slice(2, 2, &[0.0, -0.5, 0.5, 0.0]))?;
        let t = bisect(0.0, FRAC_PI_2, 1e-9, |t| cone.positivity_member(&GroupElement::exp(&z.scale(t))?))?;
        let expect = (m.sqrt() * (l + mu).abs()).acos();
        Ok(residual_outcome((t - expect).abs(), 1e-6))
    }))
}

fn gl2_psd_check(ctx: &Ctx) -> Result<CheckResult> {
    let alg = build_algebra_with(Family::Gl, &[2], ctx.tol())?;
    let s = symmetric_structure(&euler_element(&alg, "diag:0.5,-0.5")?)?;
    let cone = build_gl2_cone(&s, 1.0, 16, ctx.cfg.seed)?;
    let band = ctx.band();
    let i11 = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, -1.0]));
    Ok(ctx.run("cones.gl2_psd", 0.0, ctx.cfg.samples, |rng, _| {
        let x = random_in(&s.q, rng, 1.0)?;
        let p = &x.matrix * &i11 + &i11 * x.matrix.transpose();
        let ev = p.symmetric_eigen().eigenvalues;
        let lo = ev.min();
        let (x0, x1, xm) = gl2_coordinates(&x.matrix);
        let scale = x.matrix.norm().max(1e-300);
        let margin = (x1 * xm - x0 * x0).abs().min(x1.abs() * scale).min(xm.abs() * scale);
        if lo.abs() <= band * scale || margin <= band * scale * scale {
            return Ok(Outcome::Skip);
        }
        Ok(Outcome::Done(cone.in_max_cone(&x, false)? == (lo >= 0.0), 0.0))
    }))
}

fn jts_suite(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let band = ctx.band();
    let n = ctx.cfg.samples;
    let sl2 = ctx.structure("sl:2", "h1")?;
    let sl3 = ctx.structure("sl:3", "h1")?;
    let ts2 = TripleSystem::new(&sl2)?;
    let ts3 = TripleSystem::new(&sl3)?;
    let alg2 = sl2.algebra().clone();
    let e = AlgebraElement::from_matrix(&alg2, &Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]))?;
    let f = AlgebraElement::from_matrix(&alg2, &Matrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]))?;
    let mut out = vec![ctx.run("jts.bergman_closed_form", 1e-10, n, |rng, _| {
        let (x, y) = (rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0));
        let b = ts2.bergman_plus(&e.scale(x), &f.scale(y))?;
        let expect = (1.0 + x * y).powi(2);
        Ok(residual_outcome((b - Matrix::identity(1, 1) * expect).norm(), 1e-10))
    })];

    let mut bb = Vec::new();
    for (name, ts) in [("sl:2", &ts2), ("sl:3", &ts3)] {
        bb.push(ctx.run(&format!("jts.bergman_bruhat:{name}"), 0.0, n / 2, |rng, _| {
            let s = &ts.structure;
            let x = random_in(&s.grading.plus, rng, 2.0)?;
            let y = random_in(&s.grading.minus, rng, 2.0)?;
            let bp = ts.bergman_plus(&x, &y)?;
            let bm = ts.bergman_minus(&y, &x)?;
            let smin = |m: &Matrix| {
                let sv = m.clone().svd(false, false).singular_values;
                sv.min() / sv.max().max(1.0)
            };
            if smin(&bp).min(smin(&bm)) <= band {
                return Ok(Outcome::Skip);
            }
            let g = GroupElement::from_word(s.algebra(), &[y.clone(), x.clone()])?;
            let present = ts.bruhat_factor(&g)?.is_some();
            Ok(Outcome::Done(present == ts.bergman_invertible(&x, &y)?, 0.0))
        }));
    }
    out.push(merge("jts.bergman_bruhat", 0.0, bb));

    let mut flip = Vec::new();
    let mut conv = Vec::new();
    for (name, ts) in [("sl:2", &ts2), ("sl:3", &ts3)] {
        let s = &ts.structure;
        flip.push(ctx.run(&format!("jts.norm_flip:{name}"), band + 1e-6, 8, |rng, _| {
            let c = random_in(&s.grading.plus, rng, 1.0)?;
            let c = c.scale(1.0 / ts.spectral_norm(&c)?);
            let tc = c.theta();
            let t = bisect(0.5, 1.5, 1e-9, |t| {
                Ok(ts.ball_status(&GroupElement::exp(&tc.scale(t))?)? != BallStatus::Outside)
            })?;
            Ok(residual_outcome((t - 1.0).abs(), band + 1e-6))
        }));
        let n_g = (ctx.cfg.samples / 50).clamp(4, 40);
        let seed = ctx.cfg.seed;
        conv.push(ctx.run(&format!("jts.convexity:{name}"), 0.0, n_g, |rng, i| {
            let g = random_ball_element(ts, rng)?;
            let r = ts.convexity_report(&g, 50, seed.wrapping_add(i as u64))?;
            Ok(Outcome::Done(r.failures == 0, r.worst_norm))
        }));
    }
    out.push(merge("jts.norm_flip", band + 1e-6, flip));
    out.push(merge("jts.convexity", 0.0, conv));

    let (z, _) = sl2_parts(&alg2)?;
    let seed = ctx.cfg.seed;
    let n_c = (ctx.cfg.samples / 5).max(10);
    out.push(ctx.run("jts.compression_semigroup", 0.0, n_c, |rng, i| {
        let g1 = compressing_element(&sl2, &z, rng)?;
        let g2 = compressing_element(&sl2, &z, rng)?;
        let s = seed.wrapping_add(i as u64);
        if !(ts2.compression_member(&g1, 64, s)? && ts2.compression_member(&g2, 64, s)?) {
            return Ok(Outcome::Done(false, f64::INFINITY));
        }
        Ok(Outcome::Done(ts2.compression_member(&g1.compose(&g2)?, 64, s)?, 0.0))
    }));
    out.push(ctx.run("jts.compression_oracle", 0.0, n_c, |rng, i| {
        let s = seed.wrapping_add(i as u64);
        let (g, expect) = if i % 2 == 0 {
            (compressing_element(&sl2, &z, rng)?, true)
        } else {
            let Some(g) = rejected_element(&sl2, &z, rng)? else {
                return Ok(Outcome::Skip);
            };
            (g, false)
        };
        Ok(Outcome::Done(ts2.compression_member(&g, 64, s)? == expect, 0.0))
    }));
    out.push(ctx.run("jts.tube_bridge", 0.0, n, |rng, i| {
        let (s, ts) = if i % 2 == 0 { (&sl2, &ts2) } else { (&sl3, &ts3) };
        let cone = build_cone(s, 64, 0)?;
        let z = random_in(&s.grading.plus, rng, 1.5)?;
        let nz = ts.spectral_norm(&z)?;
        let x = s.h() + &z;
        if nz < 1.0 - band {
            Ok(Outcome::Done(cone.in_tube(&x)?, nz))
        } else if nz > 1.0 + band && s.algebra().defining_dim == 2 {
            Ok(Outcome::Done(!cone.in_tube(&x)?, nz))
        } else {
            Ok(Outcome::Skip)
        }
    }));
    Ok(out)
}

/// `exp(u) exp(a) exp(theta c)` with `|c| < 1`: its ball status is never
/// `Outside`.
pub fn random_ball_element(ts: &TripleSystem, rng: &mut ChaCha8Rng) -> Result<GroupElement> {
    let s = &ts.structure;
    let c = ts.sample_domain(rng, 1)?.remove(0);
    let c = ts.plus_element(&c)?;
    let u = random_in(&s.grading.plus, rng, 1.0)?;
    let a = random_in(&s.grading.zero, rng, 0.5)?;
    GroupElement::from_word(s.algebra(), &[u, a, c.theta()])
}

/// `exp(y_h) exp(-c)` with `c = a h + b z`, `a > |b|` by a margin.
pub fn compressing_element(s: &SymmetricStructure, z: &AlgebraElement, rng: &mut ChaCha8Rng) -> Result<GroupElement> {
    let a: f64 = rng.gen_range(0.05..1.5);
    let b = rng.gen_range(-0.9..0.9) * a;
    let c = &s.h().scale(a) + &z.scale(b);
    let y = random_in(&s.h_alg, rng, 1.0)?;
    GroupElement::from_word(s.algebra(), &[y, c.scale(-1.0)])
}

/// `exp(y_h) exp(x)` with `-x` outside `C` by more than `0.01`, or `None`
/// for a draw that fails that margin.
pub fn rejected_element(
    s: &SymmetricStructure,
    z: &AlgebraElement,
    rng: &mut ChaCha8Rng,
) -> Result<Option<GroupElement>> {
    let a: f64 = rng.gen_range(-1.5..1.5);
    let b: f64 = rng.gen_range(-1.5..1.5);
    if a + b.abs() <= 0.01 {
        return Ok(None);
    }
    let x = &s.h().scale(a) + &z.scale(b);
    let y = random_in(&s.h_alg, rng, 1.0)?;
    Ok(Some(GroupElement::from_word(s.algebra(), &[y, x])?))
}

fn flows_suite(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let n = (ctx.cfg.samples / 5).max(10);
    let sl2 = ctx.structure("sl:2", "h1")?;
    let so12 = ctx.structure("so:1,2", "boost")?;
    let mut inv = Vec::new();
    let mut geo = Vec::new();
    for (name, s) in [("sl:2", &sl2), ("so:1,2", &so12)] {
        let cone = build_cone(s, 64, ctx.cfg.seed)?;
        inv.push(ctx.run(&format!("flows.flow_invariance:{name}"), 0.0, n, |rng, _| {
            let g = GroupElement::from_word(
                s.algebra(),
                &[random_in(&s.q, rng, 1.5)?, random_in(&s.h_alg, rng, 1.0)?],
            )?;
            let p = CosetPoint::new(s, g);
            if !cone.positivity_member(&p.representative)? {
                return Ok(Outcome::Skip);
            }
            for t in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0] {
                if !cone.positivity_member(&modular_flow(t, &p)?.representative)? {
                    return Ok(Outcome::Done(false, t));
                }
            }
            Ok(Outcome::Done(true, 0.0))
        }));
        geo.push(ctx.run(&format!("flows.geodesic_consistency:{name}"), 0.0, n, |rng, i| {
            // half the draws sit on the base geodesic, up to H
            let mut word = vec![s.h().scale(rng.gen_range(-2.0..2.0))];
            if i % 2 == 1 {
                word.push(random_in(&s.q, rng, 1.5)?);
            }
            word.push(random_in(&s.h_alg, rng, 1.0)?);
            let p = CosetPoint::new(s, GroupElement::from_word(s.algebra(), &word)?);
            match geodesic_orbit_test(&p, &cone)? {
                OrbitKind::CausalGeodesic => {
                    Ok(Outcome::Done(geodesic_check(s, &p.pull_back(s.h())?)?, 0.0))
                }
                _ => Ok(Outcome::Skip),
            }
        }));
    }
    let mut out = vec![
        merge("flows.flow_invariance", 0.0, inv),
        merge("flows.geodesic_consistency", 0.0, geo),
    ];
    let (_, h0) = sl2_parts(sl2.algebra())?;
    let chart = Chart::for_structure(&sl2)?;
    let seed = ctx.cfg.seed;
    out.push(ctx.run("flows.transitivity", 1e-6, (n / 4).max(5), |rng, i| {
        let point = |rng: &mut ChaCha8Rng| -> Result<CosetPoint> {
            let w = [sl2.h().scale(rng.gen_range(-2.0..2.0)), h0.scale(rng.gen_range(-1.5..1.5))];
            Ok(CosetPoint::new(&sl2, GroupElement::from_word(sl2.algebra(), &w)?))
        };
        let (p, q) = (point(rng)?, point(rng)?);
        let Some(a) = transport_witness(&p, &q, seed.wrapping_add(i as u64))? else {
            return Ok(Outcome::Done(false, f64::INFINITY));
        };
        let moved = CosetPoint::new(&sl2, GroupElement::exp(&a)?.compose(&p.representative)?);
        let (x, y) = (moved.chart(&chart), q.chart(&chart));
        let res = (&x - &y).norm() / y.norm().max(1.0) + sl2.grading.zero.residual(&a);
        Ok(residual_outcome(res, 1e-6))
    }));
    out.push(witness_check(ctx, "flows.wedge_witness", (n / 4).max(5))?);
    Ok(out)
}

/// Random `(s, φ)` with `x = g e_1` inside the dS² wedge by more than the
/// band.
pub fn random_wedge_point(rng: &mut ChaCha8Rng, band: f64) -> (f64, f64) {
    loop {
        let s: f64 = rng.gen_range(-2.0..2.0);
        let phi: f64 = rng.gen_range(-FRAC_PI_2..FRAC_PI_2);
        if s.cosh() * phi.cos() - s.sinh().abs() > band {
            return (s, phi);
        }
    }
}

fn witness_check(ctx: &Ctx, id: &str, n: usize) -> Result<CheckResult> {
    let s = ctx.structure("so:1,2", "boost")?;
    let cone = build_cone(&s, 64, ctx.cfg.seed)?;
    let band = ctx.band();
    let seed = ctx.cfg.seed;
    Ok(ctx.run(id, FRAC_PI_2 - 1e-6, n, |rng, i| {
        let (sv, phi) = random_wedge_point(rng, band);
        let g = so12_representative(s.algebra(), sv, phi)?;
        let p = CosetPoint::new(&s, g);
        let Some(w) = wedge_factor_witness(&p, &cone, seed.wrapping_add(i as u64))? else {
            return Ok(Outcome::Done(false, f64::INFINITY));
        };
        let rebuilt = GroupElement::from_word(s.algebra(), &[w.a.clone(), w.x.clone()])?;
        let x = so1d_point(&p.representative)?;
        let y = so1d_point(&rebuilt)?;
        let dist: f64 = x.components().iter().zip(y.components()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let ok = w.rho < FRAC_PI_2 - 1e-6 && dist < 1e-7 * x.components()[1].abs().max(1.0);
        Ok(Outcome::Done(ok, w.rho))
    }))
}

/// Uniformly random direction times the radius fixing `x_0`.
pub fn random_ds_point(rng: &mut ChaCha8Rng, d: usize, tol: &Tolerances) -> Result<DSPoint> {
    let x0: f64 = rng.gen_range(-2.5..2.5);
    let dir: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
    let n = dir.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-300);
    let r = (1.0 + x0 * x0).sqrt();
    let mut c = vec![x0];
    c.extend(dir.iter().map(|a| r * a / n));
    DSPoint::from_components(c, tol)
}

fn desitter_suite(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let tol = ctx.tol();
    let band = ctx.band();
    let n = ctx.cfg.samples;
    let t_max = ctx.cfg.t_max;
    let mut out = Vec::new();
    out.push(ctx.run("desitter.wedge_kms", 0.0, n, |rng, i| {
        let x = random_ds_point(rng, 2 + i % 3, &tol)?;
        let Some(w) = wedge_verdict(&x, band).decided() else {
            return Ok(Outcome::Skip);
        };
        Ok(Outcome::Done(w == kms_member(&x, 64, &tol)?, 0.0))
    }));
    out.push(ctx.run("desitter.wedge_observer", 0.0, n, |rng, i| {
        let x = random_ds_point(rng, 2 + i % 3, &tol)?;
        let Some(w) = wedge_verdict(&x, band).decided() else {
            return Ok(Outcome::Skip);
        };
        Ok(Outcome::Done(w == observer_member(&x, t_max, 400, &tol)?, 0.0))
    }));
    out.push(ctx.run("desitter.order_invariance", 0.0, n, |rng, i| {
        let d = 2 + i % 3;
        let x = random_ds_point(rng, d, &tol)?;
        let v = unit_timelike_tangent(&x, rng)?;
        let y = ds_geodesic(&x, &v, rng.gen_range(0.2..2.0), &tol)?;
        let (x, y) = if causal_leq(&x, &y, &tol) { (x, y) } else { (y, x) };
        if !causal_leq(&x, &y, &tol) {
            return Ok(Outcome::Skip);
        }
        let t = rng.gen_range(-3.0..3.0);
        Ok(Outcome::Done(causal_leq(&boost_flow(t, &x), &boost_flow(t, &y), &tol), 0.0))
    }));
    out.push(ctx.run("desitter.crown_tau_fixed", 0.0, n.min(400), |rng, i| {
        let d = 2 + i % 2;
        let saturated = i % 4 == 0;
        let z = random_tau_fixed(rng, d, saturated)?;
        if !tau_fixed_crown_member(&z, &tol) {
            return Ok(Outcome::Done(false, f64::INFINITY));
        }
        let inside = (0..=40).all(|k| {
            let t = (FRAC_PI_2 - 1e-3) * (-1.0 + 2.0 * k as f64 / 40.0);
            crown_member(&complex_boost(t, &z), &tol)
        });
        let leaves = !saturated || !crown_member(&complex_boost(FRAC_PI_2 + 1e-3, &z), &tol);
        Ok(Outcome::Done(inside && leaves, 0.0))
    }));
    out.push(ctx.run("desitter.geodesic_quadric", 1e-9, n, |rng, i| {
        let x = random_ds_point(rng, 2 + i % 3, &tol)?;
        let v = unit_timelike_tangent(&x, rng)?;
        let mut res = 0.0_f64;
        for k in 0..=20 {
            let t = -5.0 + 0.5 * k as f64;
            let y = ds_geodesic(&x, &v, t, &tol)?;
            let q = lorentz_form(y.vector(), y.vector())?;
            let scale = y.components().iter().map(|a| a * a).sum::<f64>().max(1.0);
            res = res.max((q + 1.0).abs() / scale);
        }
        Ok(residual_outcome(res, 1e-9))
    }));
    out.push(cross_model_check(ctx)?);
    out.push(triple_equality_check(ctx)?);
    Ok(out)
}

/// A future unit timelike vector `v` with `β(x, v) = 0`.
pub fn unit_timelike_tangent(x: &DSPoint, rng: &mut ChaCha8Rng) -> Result<MinkowskiVector> {
    let d = x.d();
    loop {
        let mut w: Vec<f64> = (0..=d).map(|_| rng.gen_range(-0.5..0.5)).collect();
        w[0] += 2.0 + x.components()[0].abs() * 2.0;
        let wv = MinkowskiVector::new(w.clone())?;
        let bxw = lorentz_form(x.vector(), &wv)?;
        let p: Vec<f64> = w.iter().zip(x.components()).map(|(a, b)| a + bxw * b).collect();
        let pv = MinkowskiVector::new(p.clone())?;
        let q = lorentz_form(&pv, &pv)?;
        if q > 1e-3 {
            let s = if p[0] < 0.0 { -1.0 } else { 1.0 } / q.sqrt();
            return MinkowskiVector::new(p.iter().map(|a| a * s).collect());
        }
    }
}

/// A point `(i a_0, i a_1, a_2, ...)` of the `τ̄_h`-fixed crown; with
/// `saturated`, `a_0² - a_1² = 1` and the real part vanishes.
pub fn random_tau_fixed(rng: &mut ChaCha8Rng, d: usize, saturated: bool) -> Result<ComplexPoint> {
    let q: f64 = if saturated { 1.0 } else { rng.gen_range(0.01..1.0) };
    let a: f64 = rng.gen_range(-2.0..2.0);
    let mut c = vec![q.sqrt() * a.cosh(), q.sqrt() * a.sinh()];
    let rest: Vec<f64> = (2..=d).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
    let rn = rest.iter().map(|v| v * v).sum::<f64>().sqrt();
    let r = (1.0 - q).max(0.0).sqrt();
    c.extend(rest.iter().map(|v| if rn > 0.0 { r * v / rn } else { 0.0 }));
    ComplexPoint::tau_fixed(&c)
}

fn cross_model_check(ctx: &Ctx) -> Result<CheckResult> {
    let s = ctx.structure("sl:2", "h1")?;
    let cone = build_cone(&s, 64, ctx.cfg.seed)?;
    let (z, _) = sl2_parts(s.algebra())?;
    let band = ctx.band();
    let report = scan_grid(ctx.cfg.grid, 3.0, ctx.cfg.mode, |a, phi| {
        // exp(φ z) runs over half a turn of PSL_2 as φ covers [0, 2π)
        let g = GroupElement::from_word(s.algebra(), &[z.scale(phi), s.h().scale(a)]).ok()?;
        let x = sl2_point(&g).ok()?;
        let w = wedge_verdict(&x, band).decided()?;
        Some(cone.positivity_member(&g).ok()? == w)
    });
    Ok(grid_result("desitter.cross_model", report))
}

fn triple_equality_check(ctx: &Ctx) -> Result<CheckResult> {
    let s = ctx.structure("so:1,2", "boost")?;
    let cone = build_cone(&s, 64, ctx.cfg.seed)?;
    let tol = ctx.tol();
    let band = ctx.band();
    let t_max = ctx.cfg.t_max;
    let report = scan_grid(ctx.cfg.grid, 3.0, ctx.cfg.mode, |sv, phi| {
        let g = so12_representative(s.algebra(), sv, phi).ok()?;
        let x = so1d_point(&g).ok()?;
        let w = wedge_verdict(&x, band).decided()?;
        let pos = cone.positivity_member(&g).ok()?;
        let obs = observer_member(&x, t_max, 400, &tol).ok()?;
        let kms = kms_member(&x, 64, &tol).ok()?;
        Some(pos == w && obs == w && kms == w)
    });
    Ok(grid_result("desitter.triple_equality", report))
}

fn grid_result(id: &str, r: crate::desitter::GridReport) -> CheckResult {
    CheckResult {
        id: id.to_string(),
        pass: r.disagree == 0 && r.agree > 0,
        count: r.agree + r.disagree,
        failures: r.disagree,
        boundary: r.boundary,
        max_residual: 0.0,
        threshold: 0.0,
        note: None,
    }
}

/// Small realizations checked against the table: `(row id, bindings)`.
pub const ATLAS_REALIZATIONS: [(&str, &[(&str, i64)]); 8] = [
    ("split-sl", &[("n", 2), ("j", 1)]),
    ("split-sl", &[("n", 3), ("j", 1)]),
    ("split-sl", &[("n", 4), ("j", 2)]),
    ("nonsplit-so", &[("d", 1)]),
    ("nonsplit-so", &[("d", 2)]),
    ("split-so-pq", &[("p", 1), ("q", 1)]),
    ("split-so-nn", &[("n", 2)]),
    ("cayley-sp", &[("r", 2)]),
];

fn atlas_suite(ctx: &Ctx) -> Result<Vec<CheckResult>> {
    let rows = match atlas::load_atlas() {
        Ok(r) => r,
        Err(e) => {
            return Ok(vec![tally("atlas.load", 0.0, vec![Outcome::Error(e.to_string())])]);
        }
    };
    let mut out = vec![tally("atlas.load", 0.0, vec![Outcome::Done(rows.len() == 20, rows.len() as f64)])];
    out.push(ctx.run("atlas.rank_relation", 0.0, rows.len(), |_, i| {
        let row = &rows[i];
        let mut ok = true;
        for b in row.sample_bindings()? {
            let v = row.values(&b)?;
            ok &= v.r == row.type_tag.rank_ratio() * v.s;
        }
        Ok(Outcome::Done(ok, 0.0))
    }));
    let tol = ctx.tol();
    out.push(ctx.run("atlas.realizations", 0.0, ATLAS_REALIZATIONS.len(), |_, i| {
        let (id, b) = ATLAS_REALIZATIONS[i];
        let row = atlas::lookup(&rows, id)
            .first()
            .copied()
            .ok_or_else(|| NccError::Load(format!("row {id} missing")))?;
        let b = bindings(b);
        let Some((alg, label)) = atlas::realizable(row, &b)? else {
            return Ok(Outcome::Done(false, 0.0));
        };
        let alg = build_algebra_with(alg.family, &alg.params, tol)?;
        let h = euler_element(&alg, &label)?;
        let dims = crate::grading::grading_projectors(&h)?;
        let ok = check_euler(&h, &tol) && dims.plus.dim() as i64 == row.values(&b)?.g1_dim;
        Ok(Outcome::Done(ok, 0.0))
    }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig { samples: 40, grid: 12, ..Default::default() }
    }

    #[test]
    fn suite_names_round_trip() {
        for n in Suite::NAMES {
            assert_eq!(n.parse::<Suite>().unwrap().to_string(), n);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn atlas_suite_passes() {
        let r = run_suite(Suite::Atlas, &small()).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_eq!(r.checks[0].id, "atlas.load");
    }

    #[test]
    fn desitter_suite_passes() {
        let r = run_suite(Suite::Desitter, &small()).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_eq!(r.agree, r.total);
    }

    #[test]
    fn reports_are_sorted_and_mode_independent() {
        let mut cfg = small();
        let a = run_suite(Suite::Flows, &cfg).unwrap();
        cfg.mode = ExecMode::Sequential;
        let b = run_suite(Suite::Flows, &cfg).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        assert_eq!(ja, serde_json::to_string(&b).unwrap());
        let ids: Vec<_> = a.checks.iter().map(|c| c.id.clone()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn bisect_needs_a_bracket() {
        assert!(bisect(0.0, 1.0, 1e-6, |_| Ok(true)).is_err());
        let t = bisect(0.0, 1.0, 1e-9, |t| Ok(t < 0.3)).unwrap();
        assert!((t - 0.3).abs() < 1e-8);
    }
}
