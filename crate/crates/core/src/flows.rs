//! Modular flow on `M = G/H`, geodesic criteria, and the factorization
//! witness `gH = g_0 exp(x) H` with `g_0 in G^h_e`, `x in Omega_{q_k}`.
//!
//! Points are compared through a quotient chart. When the matrices of
//! `h_alg` share a one-dimensional kernel `v_0` (the de Sitter models) the
//! chart is `g v_0`; otherwise it is the Cartan embedding `g J g^T` with
//! `J = exp(pi i h)` made real. The latter only sees `G / G^tau`.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cones::ConeModel;
use crate::error::{NccError, Result};
use crate::grading::SymmetricStructure;
use crate::lie::{ad_matrix, adjoint_action, bracket, AlgebraElement, GroupElement};
use crate::numerics::{pseudo_inverse, spectral_radius, Matrix, Vector};

#[derive(Debug, Clone, PartialEq)]
pub enum Chart {
    Vector(Vector),
    Cartan(Matrix),
}

impl Chart {
    pub fn for_structure(structure: &SymmetricStructure) -> Result<Chart> {
        let n = structure.algebra().defining_dim;
        if structure.h_alg.dim() > 0 {
            let mut stacked = Matrix::zeros(n * structure.h_alg.dim(), n);
            for (i, b) in structure.h_alg.basis.iter().enumerate() {
                stacked.view_mut((i * n, 0), (n, n)).copy_from(&b.matrix);
            }
            let svd = stacked.svd(false, true);
            let vt = svd.v_t.expect("requested V^T");
            let sv = &svd.singular_values;
            let smax = sv.max();
            let null: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= 1e-10 * smax).collect();
            let missing = n.saturating_sub(sv.len());
            if null.len() + missing == 1 && missing == 0 {
                return Ok(Chart::Vector(vt.row(null[0]).transpose()));
            }
        }
        let h = &structure.h().matrix;
        let eig = h.clone().symmetric_eigen();
        let top = eig.eigenvalues.max();
        let mut signs = Vector::zeros(n);
        for i in 0..n {
            let gap = top - eig.eigenvalues[i];
            if (gap - gap.round()).abs() > 1e-9 {
                return Err(NccError::Precondition(
                    "eigenvalue gaps of h are not integral; no real Cartan chart".into(),
                ));
            }
            signs[i] = if (gap.round() as i64) % 2 == 0 { 1.0 } else { -1.0 };
        }
        let j = &eig.eigenvectors * Matrix::from_diagonal(&signs) * eig.eigenvectors.transpose();
        Ok(Chart::Cartan(j))
    }

    pub fn coordinates(&self, g: &Matrix) -> Vector {
        match self {
            Chart::Vector(v) => g * v,
            Chart::Cartan(j) => {
                let m = g * j * g.transpose();
                Vector::from_iterator(m.len(), m.iter().copied())
            }
        }
    }
}

/// The point `gH`.
#[derive(Debug, Clone)]
pub struct CosetPoint {
    pub representative: GroupElement,
    pub structure: Arc<SymmetricStructure>,
}

impl CosetPoint {
    pub fn base(structure: &Arc<SymmetricStructure>) -> Self {
        CosetPoint {
            representative: GroupElement::identity(structure.algebra()),
            structure: structure.clone(),
        }
    }

    pub fn new(structure: &Arc<SymmetricStructure>, g: GroupElement) -> Self {
        CosetPoint { representative: g, structure: structure.clone() }
    }

    pub fn chart(&self, chart: &Chart) -> Vector {
        chart.coordinates(&self.representative.matrix)
    }

    /// `Ad(g)^{-1} x`.
    pub fn pull_back(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        adjoint_action(&self.representative.inverse(), x)
    }
}

/// Same point in the quotient chart, to `tol` relative.
pub fn same_point(chart: &Chart, p: &CosetPoint, q: &CosetPoint, tol: f64) -> bool {
    let a = p.chart(chart);
    let b = q.chart(chart);
    (&a - &b).norm() <= tol * a.norm().max(1.0)
}

/// `exp(t h) g H`.
pub fn modular_flow(t: f64, p: &CosetPoint) -> Result<CosetPoint> {
    let flow = GroupElement::exp(&p.structure.h().scale(t))?;
    Ok(CosetPoint::new(&p.structure, flow.compose(&p.representative)?))
}

/// `Exp_{eH}(x) = exp(x) H` for `x in q`.
pub fn exp_map(structure: &Arc<SymmetricStructure>, x: &AlgebraElement) -> Result<CosetPoint> {
    if !structure.q.contains(x, &structure.tol()) {
        return Err(NccError::Domain("Exp_{eH} takes arguments in q".into()));
    }
    Ok(CosetPoint::new(structure, GroupElement::exp(x)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitKind {
    CausalGeodesic,
    FixedPoint,
    NonGeodesicOrbit,
}

/// Classifies the flow orbit through `p` by `x = Ad(g)^{-1} h`: interior of
/// the cone in `q` gives a causal geodesic, `x in h_alg` a fixed point.
/// Elements of `q` outside `C°` count as non-geodesic orbits here.
pub fn geodesic_orbit_test(p: &CosetPoint, cone: &ConeModel) -> Result<OrbitKind> {
    let s = &p.structure;
    let tol = s.tol();
    let x = p.pull_back(s.h())?;
    if s.q.contains(&x, &tol) && cone.in_max_cone(&x, true)? {
        return Ok(OrbitKind::CausalGeodesic);
    }
    if s.h_alg.contains(&x, &tol) {
        return Ok(OrbitKind::FixedPoint);
    }
    Ok(OrbitKind::NonGeodesicOrbit)
}

/// `gH in M^x`, i.e. `Ad(g)^{-1} x in q`.
pub fn in_m_x(p: &CosetPoint, x: &AlgebraElement) -> Result<bool> {
    let s = &p.structure;
    Ok(s.q.contains(&p.pull_back(x)?, &s.tol()))
}

/// `t -> exp(t x) H` is a geodesic iff `[x, tau x] = 0`.
pub fn geodesic_check(structure: &SymmetricStructure, x: &AlgebraElement) -> Result<bool> {
    let c = bracket(x, &structure.tau_of(x))?;
    Ok(c.norm() < structure.tol().eq_tol * x.norm().powi(2).max(1.0))
}

#[derive(Debug, Clone)]
pub struct Witness {
    /// `g_0 = exp(a)` with `a in g_0(h)`.
    pub a: AlgebraElement,
    pub x: AlgebraElement,
    pub rho: f64,
    pub residual: f64,
    pub starts: usize,
}

pub const MAX_ITER: usize = 100;
pub const STEP_TOL: f64 = 1e-12;
const SOLVE_TOL: f64 = 1e-10;
const MAX_STARTS: usize = 24;

/// Damped Gauss-Newton with a central-difference Jacobian. Returns the best
/// point and its residual norm.
pub fn gauss_newton<F>(f: F, x0: Vector) -> Result<(Vector, f64)>
where
    F: Fn(&Vector) -> Result<Vector>,
{
    let mut x = x0;
    let mut r = f(&x)?;
    let mut rn = r.norm();
    for _ in 0..MAX_ITER {
        if rn < 1e-15 {
            break;
        }
        let n = x.len();
        let mut jac = Matrix::zeros(r.len(), n);
        for j in 0..n {
            let h = 1e-7 * x[j].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let col = (f(&xp)? - f(&xm)?) / (2.0 * h);
            jac.set_column(j, &col);
        }
        let step = -(pseudo_inverse(&jac)? * &r);
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let cand = &x + &step * lambda;
            if let Ok(rc) = f(&cand) {
                let rcn = rc.norm();
                if rcn < rn {
                    x = cand;
                    r = rc;
                    rn = rcn;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved || step.norm() * lambda < STEP_TOL {
            break;
        }
    }
    Ok((x, rn))
}

/// Solves `gH = exp(a) exp(x) H` with `a in g_0(h)`, `x in q_k` and
/// `rho(ad x) < pi/2`. Multi-start; `None` when no start converges into
/// `Omega_{q_k}`.
pub fn wedge_factor_witness(p: &CosetPoint, cone: &ConeModel, seed: u64) -> Result<Option<Witness>> {
    if !cone.positivity_member(&p.representative)? {
        return Err(NccError::Precondition("point is outside the positivity domain".into()));
    }
    let s = p.structure.clone();
    let chart = Chart::for_structure(&s)?;
    let target = p.chart(&chart);
    let scale = target.norm().max(1.0);
    let g0 = &s.grading.zero;
    let qk = &s.q_k;
    let (na, nx) = (g0.dim(), qk.dim());
    let split = |v: &Vector| -> Result<(AlgebraElement, AlgebraElement)> {
        let a = g0.element(&v.as_slice()[..na])?;
        let x = if nx == 0 {
            AlgebraElement::zero(s.algebra())
        } else {
            qk.element(&v.as_slice()[na..])?
        };
        Ok((a, x))
    };
    let residual = |v: &Vector| -> Result<Vector> {
        let (a, x) = split(v)?;
        let g = GroupElement::from_word(s.algebra(), &[a, x])?;
        Ok((chart.coordinates(&g.matrix) - &target) / scale)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for start in 0..MAX_STARTS {
        let v0 = if start == 0 {
            Vector::zeros(na + nx)
        } else {
            Vector::from_fn(na + nx, |i, _| {
                if i < na {
                    rng.gen_range(-2.0..2.0)
                } else {
                    rng.gen_range(-1.5..1.5)
                }
            })
        };
        let (v, res) = gauss_newton(residual, v0)?;
        if res > SOLVE_TOL {
            continue;
        }
        let (a, x) = split(&v)?;
        let rho = spectral_radius(&ad_matrix(&x))?;
        if rho < FRAC_PI_2 {
            return Ok(Some(Witness { a, x, rho, residual: res, starts: start + 1 }));
        }
    }
    Ok(None)
}

/// Finds `a in g_0(h)` with `exp(a) p = q` in the chart.
pub fn transport_witness(p: &CosetPoint, q: &CosetPoint, seed: u64) -> Result<Option<AlgebraElement>> {
    let s = p.structure.clone();
    let chart = Chart::for_structure(&s)?;
    let target = q.chart(&chart);
    let scale = target.norm().max(1.0);
    let g0 = &s.grading.zero;
    let residual = |v: &Vector| -> Result<Vector> {
        let k = GroupElement::exp(&g0.element(v.as_slice())?)?;
        let moved = k.compose(&p.representative)?;
        Ok((chart.coordinates(&moved.matrix) - &target) / scale)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for start in 0..MAX_STARTS {
        let v0 = if start == 0 {
            Vector::zeros(g0.dim())
        } else {
            Vector::from_fn(g0.dim(), |_, _| rng.gen_range(-3.0..3.0))
        };
        let (v, res) = gauss_newton(residual, v0)?;
        if res <= SOLVE_TOL {
            return Ok(Some(g0.element(v.as_slice())?));
        }
    }
    Ok(None)
}
