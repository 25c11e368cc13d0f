//! Invariant cones in `q`, the tube `h + C°`, and the positivity test.
//!
//! The maximal cone is the Killing dual of the orbit `Ad(H_e) h`, so
//! membership is tested against finitely many orbit samples. Two families
//! carry exact models instead: Lorentzian `q` (sl2 and so(1,d), where the
//! invariant cone is a light cone) and the gl2 family `C_m`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{NccError, Result};
use crate::grading::{check_euler, SymmetricStructure};
use crate::lie::{adjoint_action, ad_matrix, bracket, AlgebraElement, Family, GroupElement};
use crate::numerics::{expm, spectral_radius, Matrix};
use crate::par::{map_indexed, ExecMode};

pub const DEFAULT_SAMPLES: usize = 512;
pub const SAMPLE_RADIUS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExactCone {
    /// `q` carries a Killing form of signature (1, n-1); the cone is the
    /// closed light cone on the side of `h`.
    Lorentz,
    /// gl2 with `x_1 x_{-1} - m x_0^2 >= 0` and `x_{+-1} >= 0`.
    Gl2 { m: f64 },
}

#[derive(Debug, Clone)]
pub struct ConeModel {
    pub structure: Arc<SymmetricStructure>,
    pub orbit_samples: Vec<AlgebraElement>,
    pub exact_generators: Option<Vec<AlgebraElement>>,
    pub exact: Option<ExactCone>,
    pub sample_count: usize,
    pub seed: u64,
    pub margin: f64,
    killing_gram: Matrix,
    trace_gram: Matrix,
}

fn killing_gram(structure: &SymmetricStructure) -> Matrix {
    let alg = structure.algebra();
    let d = alg.dim();
    let ads: Vec<Matrix> = (0..d).map(|i| ad_matrix(&AlgebraElement::basis(alg, i))).collect();
    Matrix::from_fn(d, d, |i, j| (&ads[i] * &ads[j]).trace())
}

/// Samples `e^{ad y} h` for `y` uniform in the `[-R, R]` box of the
/// orthonormal `h_alg` coordinates. Sample 0 is `h` itself.
pub fn build_cone(
    structure: &Arc<SymmetricStructure>,
    sample_count: usize,
    seed: u64,
) -> Result<ConeModel> {
    build_cone_with(structure, sample_count, seed, ExecMode::default())
}

pub fn build_cone_with(
    structure: &Arc<SymmetricStructure>,
    sample_count: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<ConeModel> {
    if sample_count == 0 {
        return Err(NccError::Domain("sample_count must be positive".into()));
    }
    let alg = structure.algebra().clone();
    let tol = alg.tol;
    let h = structure.h().clone();
    let k = structure.h_alg.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ys: Vec<Vec<f64>> = (0..sample_count)
        .map(|i| {
            if i == 0 || k == 0 {
                vec![0.0; k]
            } else {
                (0..k).map(|_| rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS)).collect()
            }
        })
        .collect();
    let samples = map_indexed(sample_count, mode, |i| -> Result<AlgebraElement> {
        if k == 0 || ys[i].iter().all(|c| *c == 0.0) {
            return Ok(h.clone());
        }
        let y = structure.h_alg.element(&ys[i])?;
        let coords = expm(&ad_matrix(&y))? * &h.coords;
        let s = AlgebraElement::from_coords(&alg, coords)?;
        if !structure.q.contains(&s, &tol) {
            return Err(NccError::Consistency(format!(
                "orbit sample {i} left q (residual {:.3e})",
                structure.q.residual(&s)
            )));
        }
        Ok(s)
    });
    let orbit_samples = samples.into_iter().collect::<Result<Vec<_>>>()?;

    let mut model = ConeModel {
        structure: structure.clone(),
        orbit_samples,
        exact_generators: None,
        exact: None,
        sample_count,
        seed,
        margin: tol.eq_tol,
        killing_gram: killing_gram(structure),
        trace_gram: alg.trace_gram().clone(),
    };
    if lorentzian_candidate(structure) && model.q_is_lorentzian() {
        model.exact = Some(ExactCone::Lorentz);
        if structure.q.dim() == 2 {
            model.exact_generators = Some(model.null_generators()?);
        }
    }
    Ok(model)
}

/// The exact gl2 family `C_m` for `h = diag(l, m')`; `m > 0`.
pub fn build_gl2_cone(
    structure: &Arc<SymmetricStructure>,
    m: f64,
    sample_count: usize,
    seed: u64,
) -> Result<ConeModel> {
    let alg = structure.algebra();
    if alg.family != Family::Gl || alg.defining_dim != 2 {
        return Err(NccError::Domain("the C_m family lives on gl2".into()));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(NccError::Domain(format!("C_m needs m > 0, got {m}")));
    }
    let mut model = build_cone(structure, sample_count, seed)?;
    model.exact = Some(ExactCone::Gl2 { m });
    model.exact_generators = None;
    Ok(model)
}

fn lorentzian_candidate(structure: &SymmetricStructure) -> bool {
    let alg = structure.algebra();
    match alg.family {
        Family::Sl => alg.params == [2],
        Family::SoPq => alg.params[0] == 1,
        _ => false,
    }
}

/// gl2 coordinates `(x_0, x_1, x_{-1})` of a matrix in `q`.
pub fn gl2_coordinates(x: &Matrix) -> (f64, f64, f64) {
    let x0 = 0.5 * (x[(0, 0)] + x[(1, 1)]);
    let sum = x[(0, 0)] - x[(1, 1)];
    let diff = x[(1, 0)] - x[(0, 1)];
    (x0, 0.5 * (sum + diff), 0.5 * (sum - diff))
}

impl ConeModel {
    pub fn h(&self) -> &AlgebraElement {
        self.structure.h()
    }

    pub fn killing(&self, x: &AlgebraElement, y: &AlgebraElement) -> f64 {
        (x.coords.transpose() * &self.killing_gram * &y.coords)[(0, 0)]
    }

    fn fro(&self, x: &AlgebraElement) -> f64 {
        (x.coords.transpose() * &self.trace_gram * &x.coords)[(0, 0)].max(0.0).sqrt()
    }

    fn q_is_lorentzian(&self) -> bool {
        let basis = &self.structure.q.basis;
        let n = basis.len();
        if n < 2 {
            return false;
        }
        let g = Matrix::from_fn(n, n, |i, j| self.killing(&basis[i], &basis[j]));
        let eig = g.symmetric_eigen().eigenvalues;
        let scale = eig.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let pos = eig.iter().filter(|v| **v > 1e-9 * scale).count();
        let neg = eig.iter().filter(|v| **v < -1e-9 * scale).count();
        pos == 1 && neg == n - 1 && self.killing(self.h(), self.h()) > 0.0
    }

    /// `h +- w` with `w` Killing-orthogonal to `h` in the 2-dimensional `q`
    /// and `kappa(w, w) = -kappa(h, h)`.
    fn null_generators(&self) -> Result<Vec<AlgebraElement>> {
        let h = self.h();
        let khh = self.killing(h, h);
        let b = self
            .structure
            .q
            .basis
            .iter()
            .max_by(|a, b| {
                let ra = (self.killing(a, h) / (khh.sqrt() * self.fro(a))).abs();
                let rb = (self.killing(b, h) / (khh.sqrt() * self.fro(b))).abs();
                rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or_else(|| NccError::Consistency("empty q".into()))?;
        let w = b - &h.scale(self.killing(b, h) / khh);
        let kww = self.killing(&w, &w);
        if kww >= 0.0 {
            return Err(NccError::Consistency("complement of h in q is not timelike".into()));
        }
        let w = w.scale((khh / -kww).sqrt());
        Ok(vec![h + &w, h - &w])
    }

    /// Membership of `x in q` in `C_q^max`, or in its interior when
    /// `interior` is set. Exact models take precedence over the samples.
    pub fn in_max_cone(&self, x: &AlgebraElement, interior: bool) -> Result<bool> {
        self.ensure_in_q(x)?;
        Ok(match self.exact {
            Some(ExactCone::Lorentz) => self.lorentz_test(x, interior),
            Some(ExactCone::Gl2 { m }) => self.gl2_test(x, m, interior),
            None => self.dual_test(x, interior),
        })
    }

    /// Dual test against the orbit samples and any exact generators, even
    /// when an exact model is attached.
    pub fn in_sampled_cone(&self, x: &AlgebraElement, interior: bool) -> Result<bool> {
        self.ensure_in_q(x)?;
        Ok(self.dual_test(x, interior))
    }

    fn ensure_in_q(&self, x: &AlgebraElement) -> Result<()> {
        let tol = self.structure.tol();
        if !self.structure.q.contains(x, &tol) {
            return Err(NccError::Domain(format!(
                "element is not in q (residual {:.3e})",
                self.structure.q.residual(x)
            )));
        }
        Ok(())
    }

    fn dual_test(&self, x: &AlgebraElement, interior: bool) -> bool {
        let xn = self.fro(x);
        if interior && xn == 0.0 {
            return false;
        }
        let gens = self.exact_generators.iter().flatten();
        self.orbit_samples.iter().chain(gens).all(|s| {
            let k = self.killing(s, x);
            if interior {
                k >= self.margin * self.fro(s) * xn
            } else {
                k >= -self.margin * self.fro(s) * xn
            }
        })
    }

    fn lorentz_test(&self, x: &AlgebraElement, interior: bool) -> bool {
        let h = self.h();
        let (xn, hn) = (self.fro(x), self.fro(h));
        let khx = self.killing(h, x);
        let kxx = self.killing(x, x);
        if interior {
            xn > 0.0 && khx > self.margin * hn * xn && kxx > self.margin * xn * xn
        } else {
            khx >= -self.margin * hn * xn && kxx >= -self.margin * xn * xn
        }
    }

    fn gl2_test(&self, x: &AlgebraElement, m: f64, interior: bool) -> bool {
        let (x0, xp, xm) = gl2_coordinates(&x.matrix);
        let n = self.fro(x);
        let quad = xp * xm - m * x0 * x0;
        let eps = self.margin * n;
        if interior {
            n > 0.0 && quad > eps * n && xp > eps && xm > eps
        } else {
            quad >= -eps * n && xp >= -eps && xm >= -eps
        }
    }

    /// Tube domain `h_alg + C°`: the `q`-part of `x` must be interior.
    pub fn in_tube(&self, x: &AlgebraElement) -> Result<bool> {
        let xq = self.structure.q.project(x);
        self.in_max_cone(&xq, true)
    }

    /// Positivity domain at `gH`: `Ad(g)^{-1} h` lies in the tube.
    pub fn positivity_member(&self, g: &GroupElement) -> Result<bool> {
        if !(g.det().abs() > 0.0) {
            return Err(NccError::Domain("singular group element".into()));
        }
        let x = adjoint_action(&g.inverse(), self.h())?;
        self.in_tube(&x)
    }
}

/// `x in q_k` with `rho(ad x) < pi/2 - boundary_band`.
pub fn omega_member(structure: &SymmetricStructure, x: &AlgebraElement) -> Result<bool> {
    let tol = structure.tol();
    if !structure.q_k.contains(x, &tol) {
        return Ok(false);
    }
    Ok(spectral_radius(&ad_matrix(x))? < std::f64::consts::FRAC_PI_2 - tol.boundary_band)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Condition {
    pub pass: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CausalEulerReport {
    pub euler: Condition,
    pub h_interior: Condition,
    pub theta_antifixed: Condition,
    pub tau_automorphism: Condition,
}

impl CausalEulerReport {
    pub fn all_pass(&self) -> bool {
        self.euler.pass && self.h_interior.pass && self.theta_antifixed.pass && self.tau_automorphism.pass
    }
}

/// Checks that `candidate` is a causal Euler element for the cone: Euler,
/// interior to `C`, anti-fixed by `theta`, and that `tau = tau_h theta` is an
/// involutive automorphism. The interior residual is the worst normalized
/// dual pairing (negative means outside).
pub fn check_causal_euler(cone: &ConeModel, candidate: &AlgebraElement) -> Result<CausalEulerReport> {
    let s = &cone.structure;
    let tol = s.tol();
    let euler = check_euler(candidate, &tol);

    let interior_pass = s.q.contains(candidate, &tol) && cone.in_max_cone(candidate, true)?;
    let cn = cone.fro(candidate).max(f64::MIN_POSITIVE);
    let pairing = cone
        .orbit_samples
        .iter()
        .chain(cone.exact_generators.iter().flatten())
        .map(|g| cone.killing(g, candidate) / (cone.fro(g) * cn))
        .fold(f64::INFINITY, f64::min);

    let theta_res = (&candidate.theta() + candidate).norm() / cn.max(1.0);

    let alg = s.algebra();
    let d = alg.dim();
    let id = Matrix::identity(d, d);
    let mut tau_res = (&s.tau * &s.tau - &id).norm();
    let basis: Vec<AlgebraElement> = (0..d).map(|i| AlgebraElement::basis(alg, i)).collect();
    for a in &basis {
        for b in &basis {
            let lhs = s.tau_of(&bracket(a, b)?);
            let rhs = bracket(&s.tau_of(a), &s.tau_of(b))?;
            tau_res = tau_res.max((&lhs.coords - &rhs.coords).norm());
        }
    }

    Ok(CausalEulerReport {
        euler: Condition {
            pass: euler,
            residual: {
                let a = ad_matrix(candidate);
                (&a * &a * &a - &a).norm()
            },
        },
        h_interior: Condition { pass: interior_pass, residual: pairing },
        theta_antifixed: Condition { pass: theta_res < tol.eq_tol, residual: theta_res },
        tau_automorphism: Condition { pass: tau_res < 1e-8, residual: tau_res },
    })
}

/// Coordinates `(c, d)` of `x = c h + d w` for the 2-dimensional Lorentzian
/// `q`, `w` being the unit timelike direction used for the exact generators.
pub fn lorentz_plane_coords(cone: &ConeModel, x: &AlgebraElement) -> Option<(f64, f64)> {
    let gens = cone.exact_generators.as_ref()?;
    let h = cone.h();
    let w = &gens[0] - h;
    let khh = cone.killing(h, h);
    let kww = cone.killing(&w, &w);
    Some((cone.killing(h, x) / khh, cone.killing(&w, x) / kww))
}
