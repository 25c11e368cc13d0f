//! The Jordan triple `{x,y,z} = -1/2 [[x, theta y], z]` on `g_1(h)`, the
//! Bergman operators, and the open Bruhat cell `exp(g_1) P^-` in its affine
//! chart.
//!
//! Bruhat coordinates come from a block UDL factorization of the defining
//! matrix in an eigenframe of `h`, blocks ordered by decreasing eigenvalue so
//! that `g_1` is strictly block-upper.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{NccError, Result};
use crate::grading::SymmetricStructure;
use crate::lie::{ad_matrix, bracket, AlgebraElement, GroupElement};
use crate::numerics::{eigenvalues, is_invertible_scaled, log_unipotent, Matrix, Vector};

/// A point `exp(x) P^-` of the open cell, by its `g_1` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPoint {
    pub coords: Vector,
}

impl CellPoint {
    pub fn new(coords: Vector) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(NccError::Numeric("non-finite cell coordinates".into()));
        }
        Ok(CellPoint { coords })
    }
}

#[derive(Debug, Clone)]
pub struct BruhatFactors {
    pub u: AlgebraElement,
    pub m: GroupElement,
    pub v: AlgebraElement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BallStatus {
    Outside,
    Contained,
    Bounded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub tested: usize,
    pub failures: usize,
    /// Largest norm seen where the test wants norms below one.
    pub worst_norm: f64,
}

#[derive(Debug, Clone)]
pub struct TripleSystem {
    pub structure: Arc<SymmetricStructure>,
    pub basis_plus: Vec<AlgebraElement>,
    pub basis_minus: Vec<AlgebraElement>,
    /// `theta` restricted to `g_1`, from plus- to minus-coordinates.
    pub theta: Matrix,
    frame: Matrix,
    blocks: Vec<usize>,
    envelope: f64,
}

impl TripleSystem {
    pub fn new(structure: &Arc<SymmetricStructure>) -> Result<Self> {
        let tol = structure.tol();
        let grading = &structure.grading;
        let basis_plus = grading.plus.basis.clone();
        let basis_minus = grading.minus.basis.clone();
        let k = basis_plus.len();
        if k == 0 {
            return Err(NccError::Domain("g_1 is trivial".into()));
        }
        let mut theta = Matrix::zeros(basis_minus.len(), k);
        for (j, b) in basis_plus.iter().enumerate() {
            let t = b.theta();
            if !grading.minus.contains(&t, &tol) {
                return Err(NccError::Consistency("theta does not map g_1 onto g_-1".into()));
            }
            theta.set_column(j, &grading.minus.basis_coords(&t));
        }

        let h = &structure.h().matrix;
        if (h - h.transpose()).norm() > tol.eq_tol * h.norm().max(1.0) {
            return Err(NccError::Precondition("h must be a symmetric matrix".into()));
        }
        let eig = h.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..h.nrows()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut frame = Matrix::zeros(h.nrows(), h.nrows());
        for (new, &old) in order.iter().enumerate() {
            frame.set_column(new, &eig.eigenvectors.column(old));
        }
        let mut blocks = Vec::new();
        let mut last = f64::NAN;
        for &i in &order {
            let l = eig.eigenvalues[i];
            if blocks.is_empty() || (last - l).abs() > 1e-6 {
                blocks.push(1);
            } else {
                *blocks.last_mut().unwrap() += 1;
            }
            last = l;
        }

        let mut ts = TripleSystem {
            structure: structure.clone(),
            basis_plus,
            basis_minus,
            theta,
            frame,
            blocks,
            envelope: 0.0,
        };
        ts.envelope = ts.compute_envelope()?;
        Ok(ts)
    }

    pub fn rank(&self) -> usize {
        self.basis_plus.len()
    }

    /// Radius of a Euclidean coordinate ball containing `D`. From
    /// `tr(x□x) <= k |x|^2` and `tr(x□x) >= lambda_min |c|^2`.
    fn compute_envelope(&self) -> Result<f64> {
        let k = self.rank();
        let mut q = Matrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                q[(i, j)] = self.box_operator(&self.basis_plus[i], &self.basis_plus[j])?.trace();
            }
        }
        let q = (&q + q.transpose()) * 0.5;
        let lmin = q.symmetric_eigen().eigenvalues.min();
        if lmin <= 0.0 {
            return Err(NccError::Numeric("trace form of the triple is not positive".into()));
        }
        Ok((k as f64 / lmin).sqrt())
    }

    pub fn plus_coords(&self, x: &AlgebraElement) -> Result<Vector> {
        let g = &self.structure.grading;
        if !g.plus.contains(x, &self.structure.tol()) {
            return Err(NccError::Domain(format!(
                "element is not in g_1 (residual {:.3e})",
                g.plus.residual(x)
            )));
        }
        Ok(g.plus.basis_coords(x))
    }

    pub fn minus_coords(&self, y: &AlgebraElement) -> Result<Vector> {
        let g = &self.structure.grading;
        if !g.minus.contains(y, &self.structure.tol()) {
            return Err(NccError::Domain(format!(
                "element is not in g_-1 (residual {:.3e})",
                g.minus.residual(y)
            )));
        }
        Ok(g.minus.basis_coords(y))
    }

    pub fn plus_element(&self, coords: &Vector) -> Result<AlgebraElement> {
        self.structure.grading.plus.element(coords.as_slice())
    }

    pub fn minus_element(&self, coords: &Vector) -> Result<AlgebraElement> {
        self.structure.grading.minus.element(coords.as_slice())
    }

    /// `{x, y, z}` for `x, y, z in g_1`.
    pub fn triple(
        &self,
        x: &AlgebraElement,
        y: &AlgebraElement,
        z: &AlgebraElement,
    ) -> Result<AlgebraElement> {
        self.plus_coords(x)?;
        self.plus_coords(y)?;
        self.plus_coords(z)?;
        let out = bracket(&bracket(x, &y.theta())?, z)?.scale(-0.5);
        self.plus_coords(&out)?;
        Ok(out)
    }

    /// Matrix of `z -> {x, y, z}` on plus-coordinates.
    pub fn box_operator(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<Matrix> {
        let k = self.rank();
        let xy = bracket(x, &y.theta())?;
        let mut m = Matrix::zeros(k, k);
        for (j, b) in self.basis_plus.iter().enumerate() {
            let col = bracket(&xy, b)?.scale(-0.5);
            m.set_column(j, &self.structure.grading.plus.basis_coords(&col));
        }
        Ok(m)
    }

    /// `B_+(x, y) = 1 + ad x ad y + 1/4 (ad x)^2 (ad y)^2` on `g_1`.
    pub fn bergman_plus(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<Matrix> {
        self.plus_coords(x)?;
        self.minus_coords(y)?;
        Ok(self.restricted_bergman(x, y, true))
    }

    /// `B_-(y, x) = 1 + ad y ad x + 1/4 (ad y)^2 (ad x)^2` on `g_-1`.
    pub fn bergman_minus(&self, y: &AlgebraElement, x: &AlgebraElement) -> Result<Matrix> {
        self.plus_coords(x)?;
        self.minus_coords(y)?;
        Ok(self.restricted_bergman(y, x, false))
    }

    /// Joint invertibility of `B_+(x, y)` and `B_-(y, x)`, measured against
    /// `max(1, |B|)` so that the 1x1 case is not vacuous.
    pub fn bergman_invertible(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<bool> {
        let tol = self.structure.tol();
        let bp = self.bergman_plus(x, y)?;
        let bm = self.bergman_minus(y, x)?;
        Ok(is_invertible_scaled(&bp, bp.norm().max(1.0), &tol)?
            && is_invertible_scaled(&bm, bm.norm().max(1.0), &tol)?)
    }

    fn restricted_bergman(&self, a: &AlgebraElement, b: &AlgebraElement, plus: bool) -> Matrix {
        let (aa, ab) = (ad_matrix(a), ad_matrix(b));
        let d = aa.nrows();
        let op = Matrix::identity(d, d) + &aa * &ab + (&aa * &aa * &ab * &ab) * 0.25;
        let sub = if plus {
            &self.structure.grading.plus
        } else {
            &self.structure.grading.minus
        };
        let n = sub.dim();
        let mut m = Matrix::zeros(n, n);
        for (j, e) in sub.basis.iter().enumerate() {
            let img = AlgebraElement::from_coords(&e.algebra, &op * &e.coords)
                .expect("linear image of a basis vector");
            m.set_column(j, &sub.basis_coords(&img));
        }
        m
    }

    /// `sqrt(rho(x□x))`.
    pub fn spectral_norm(&self, x: &AlgebraElement) -> Result<f64> {
        self.plus_coords(x)?;
        let op = self.box_operator(x, x)?;
        let eigs = eigenvalues(&op)?;
        let scale = op.norm().max(1.0);
        let tol = self.structure.tol().eq_tol * scale;
        let mut top = 0.0_f64;
        for z in eigs {
            if z.re < -tol {
                return Err(NccError::Numeric(format!(
                    "x□x has negative eigenvalue {:.3e}; the triple is not positive",
                    z.re
                )));
            }
            top = top.max(z.re);
        }
        Ok(top.max(0.0).sqrt())
    }

    pub fn norm_of_coords(&self, c: &Vector) -> Result<f64> {
        self.spectral_norm(&self.plus_element(c)?)
    }

    /// `g = exp(u) m exp(v)` with `u in g_1`, `m in G^h`, `v in g_-1`, or
    /// `None` when a pivot block is singular (`g P^-` leaves the cell).
    pub fn bruhat_factor(&self, g: &GroupElement) -> Result<Option<BruhatFactors>> {
        let tol = self.structure.tol();
        let a = self.frame.transpose() * &g.matrix * &self.frame;
        let scale = g.matrix.norm();
        let Some((u, _, v)) = block_udl(&a, &self.blocks, scale, &tol)? else {
            return Ok(None);
        };
        let u = &self.frame * u * self.frame.transpose();
        let v = &self.frame * v * self.frame.transpose();
        let alg = &g.algebra;
        let u = AlgebraElement::from_matrix(alg, &log_unipotent(&u)?)?;
        let v = AlgebraElement::from_matrix(alg, &log_unipotent(&v)?)?;
        let grading = &self.structure.grading;
        if !grading.plus.contains(&u, &tol) || !grading.minus.contains(&v, &tol) {
            return Err(NccError::Consistency("Bruhat factors left g_1 / g_-1".into()));
        }
        let m = GroupElement::exp(&u.scale(-1.0))?
            .compose(g)?
            .compose(&GroupElement::exp(&v.scale(-1.0))?)?;
        Ok(Some(BruhatFactors { u, m, v }))
    }

    /// `g . exp(p) P^-` in cell coordinates, `None` once it leaves the cell.
    pub fn conformal_action(&self, g: &GroupElement, p: &CellPoint) -> Result<Option<CellPoint>> {
        let x = self.plus_element(&p.coords)?;
        let moved = g.compose(&GroupElement::exp(&x)?)?;
        match self.bruhat_factor(&moved)? {
            Some(f) => Ok(Some(CellPoint::new(self.plus_coords(&f.u)?)?)),
            None => Ok(None),
        }
    }

    /// Classifies `g = p exp(y)`, `p in P^+`, `y in g_-1`, by `|theta y|`.
    pub fn ball_status(&self, g: &GroupElement) -> Result<BallStatus> {
        let band = self.structure.tol().boundary_band;
        let Some(f) = self.bruhat_factor(g)? else {
            return Ok(BallStatus::Outside);
        };
        let n = self.spectral_norm(&f.v.theta())?;
        Ok(if n < 1.0 - band {
            BallStatus::Bounded
        } else if n <= 1.0 + band {
            BallStatus::Contained
        } else {
            BallStatus::Outside
        })
    }

    /// `n` points uniform in `D = {|x| < 1}` by rejection from a Euclidean
    /// coordinate ball that contains it.
    pub fn sample_domain(&self, rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Vector>> {
        let k = self.rank();
        let mut out = Vec::with_capacity(n);
        let max_attempts = 10_000 * n.max(1);
        let mut attempts = 0;
        while out.len() < n {
            attempts += 1;
            if attempts > max_attempts {
                return Err(NccError::Numeric("rejection sampling of D stalled".into()));
            }
            let dir = random_direction(rng, k);
            let r = self.envelope * rng.gen::<f64>().powf(1.0 / k as f64);
            let c = dir * r;
            if self.norm_of_coords(&c)? < 1.0 {
                out.push(c);
            }
        }
        Ok(out)
    }

    /// `n` points at norm `1 - boundary_band` in random directions.
    pub fn sample_shell(&self, rng: &mut ChaCha8Rng, n: usize) -> Result<Vec<Vector>> {
        let k = self.rank();
        let band = self.structure.tol().boundary_band;
        (0..n)
            .map(|_| {
                let dir = random_direction(rng, k);
                let nd = self.norm_of_coords(&dir)?;
                Ok(dir * ((1.0 - band) / nd))
            })
            .collect()
    }

    /// Midpoint test on `g.D`: push `n_pairs` pairs forward, pull each
    /// midpoint back and require norm `< 1 + band`.
    pub fn convexity_report(&self, g: &GroupElement, n_pairs: usize, seed: u64) -> Result<SampleReport> {
        if self.ball_status(g)? == BallStatus::Outside {
            return Err(NccError::Precondition("g.D is not contained in the cell".into()));
        }
        let band = self.structure.tol().boundary_band;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = self.sample_domain(&mut rng, 2 * n_pairs)?;
        let g_inv = g.inverse();
        let mut failures = 0;
        let mut worst = 0.0_f64;
        for pair in pts.chunks(2) {
            let a = self.conformal_action(g, &CellPoint::new(pair[0].clone())?)?;
            let b = self.conformal_action(g, &CellPoint::new(pair[1].clone())?)?;
            let (Some(a), Some(b)) = (a, b) else {
                failures += 1;
                continue;
            };
            let mid = CellPoint::new((&a.coords + &b.coords) * 0.5)?;
            match self.conformal_action(&g_inv, &mid)? {
                Some(back) => {
                    let n = self.norm_of_coords(&back.coords)?;
                    worst = worst.max(n);
                    if n >= 1.0 + band {
                        failures += 1;
                    }
                }
                None => failures += 1,
            }
        }
        Ok(SampleReport { tested: n_pairs, failures, worst_norm: worst })
    }

    pub fn convexity_check(&self, g: &GroupElement, n_pairs: usize, seed: u64) -> Result<bool> {
        Ok(self.convexity_report(g, n_pairs, seed)?.failures == 0)
    }

    /// Pushes points of `D` forward by `g`; half are uniform, half sit on
    /// the shell at norm `1 - band` where expansion shows first.
    pub fn compression_report(&self, g: &GroupElement, n_samples: usize, seed: u64) -> Result<SampleReport> {
        let band = self.structure.tol().boundary_band;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shell = n_samples / 2;
        let mut pts = self.sample_domain(&mut rng, n_samples - shell)?;
        pts.extend(self.sample_shell(&mut rng, shell)?);
        let mut failures = 0;
        let mut worst = 0.0_f64;
        for p in pts {
            match self.conformal_action(g, &CellPoint::new(p)?)? {
                Some(q) => {
                    let n = self.norm_of_coords(&q.coords)?;
                    worst = worst.max(n);
                    if n >= 1.0 + band {
                        failures += 1;
                    }
                }
                None => {
                    failures += 1;
                    worst = f64::INFINITY;
                }
            }
        }
        Ok(SampleReport { tested: n_samples, failures, worst_norm: worst })
    }

    pub fn compression_member(&self, g: &GroupElement, n_samples: usize, seed: u64) -> Result<bool> {
        Ok(self.compression_report(g, n_samples, seed)?.failures == 0)
    }
}

fn random_direction(rng: &mut ChaCha8Rng, k: usize) -> Vector {
    loop {
        let v = Vector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// `a = U M V` with `U` block-upper unipotent, `M` block-diagonal and `V`
/// block-lower unipotent, pivoting on the trailing block.
fn block_udl(
    a: &Matrix,
    blocks: &[usize],
    scale: f64,
    tol: &crate::numerics::Tolerances,
) -> Result<Option<(Matrix, Matrix, Matrix)>> {
    let n = a.nrows();
    if blocks.len() <= 1 {
        return Ok(Some((Matrix::identity(n, n), a.clone(), Matrix::identity(n, n))));
    }
    let last = *blocks.last().unwrap();
    let n1 = n - last;
    let d = a.view((n1, n1), (last, last)).into_owned();
    if !is_invertible_scaled(&d, scale, tol)? {
        return Ok(None);
    }
    let d_inv = d
        .clone()
        .try_inverse()
        .ok_or_else(|| NccError::Numeric("pivot inversion failed".into()))?;
    let b = a.view((0, n1), (n1, last)).into_owned();
    let c = a.view((n1, 0), (last, n1)).into_owned();
    let s = a.view((0, 0), (n1, n1)) - &b * &d_inv * &c;
    let Some((us, ms, vs)) = block_udl(&s, &blocks[..blocks.len() - 1], scale, tol)? else {
        return Ok(None);
    };
    let mut u = Matrix::identity(n, n);
    u.view_mut((0, 0), (n1, n1)).copy_from(&us);
    u.view_mut((0, n1), (n1, last)).copy_from(&(&b * &d_inv));
    let mut m = Matrix::zeros(n, n);
    m.view_mut((0, 0), (n1, n1)).copy_from(&ms);
    m.view_mut((n1, n1), (last, last)).copy_from(&d);
    let mut v = Matrix::identity(n, n);
    v.view_mut((0, 0), (n1, n1)).copy_from(&vs);
    v.view_mut((n1, 0), (last, n1)).copy_from(&(&d_inv * &c));
    Ok(Some((u, m, v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::{euler_element, symmetric_structure};
    use crate::lie::{build_algebra, Algebra, Family};
    use crate::numerics::matrix_from_rows;
    use approx::assert_relative_eq;

    fn setup(family: Family, params: &[usize], label: &str) -> (Algebra, TripleSystem) {
        let alg = build_algebra(family, params).unwrap();
        let s = symmetric_structure(&euler_element(&alg, label).unwrap()).unwrap();
        let ts = TripleSystem::new(&s).unwrap();
        (alg, ts)
    }

    fn el(alg: &Algebra, rows: &[f64]) -> AlgebraElement {
        let n = alg.defining_dim;
        AlgebraElement::from_matrix(alg, &matrix_from_rows(n, n, rows).unwrap()).unwrap()
    }

    fn ef(alg: &Algebra) -> (AlgebraElement, AlgebraElement) {
        (el(alg, &[0.0, 1.0, 0.0, 0.0]), el(alg, &[0.0, 0.0, 1.0, 0.0]))
    }

    #[test]
    fn sl2_triple() {
        let (alg, ts) = setup(Family::Sl, &[2], "h");
        let (e, _) = ef(&alg);
        assert_relative_eq!(ts.triple(&e, &e, &e).unwrap().coords, e.coords, epsilon = 1e-14);
        let zero = AlgebraElement::zero(&alg);
        assert_eq!(ts.triple(&e, &zero, &e).unwrap().coords.norm(), 0.0);
        let t = ts.triple(&e.scale(2.0), &e.scale(-0.5), &e.scale(3.0)).unwrap();
        assert_relative_eq!(t.coords, e.scale(-3.0).coords, epsilon = 1e-13);
        assert!(matches!(ts.triple(ts.structure.h(), &e, &e), Err(NccError::Domain(_))));
    }

    #[test]
    fn sl2_bergman() {
        let (alg, ts) = setup(Family::Sl, &[2], "h");
        let (e, f) = ef(&alg);
        let zero = AlgebraElement::zero(&alg);
        assert_relative_eq!(ts.bergman_plus(&zero, &zero).unwrap(), Matrix::identity(1, 1));
        for (x, y) in [(0.3, -1.2), (1.5, 0.7), (-2.0, 0.5)] {
            let b = ts.bergman_plus(&e.scale(x), &f.scale(y)).unwrap();
            assert_relative_eq!(b[(0, 0)], (1.0 + x * y).powi(2), epsilon = 1e-12);
            let bm = ts.bergman_minus(&f.scale(y), &e.scale(x)).unwrap();
            assert_relative_eq!(bm[(0, 0)], (1.0 + x * y).powi(2), epsilon = 1e-12);
        }
        assert!(!ts.bergman_invertible(&e.scale(2.0), &f.scale(-0.5)).unwrap());
        assert!(ts.bergman_invertible(&e.scale(2.0), &f.scale(-0.4)).unwrap());
    }

    #[test]
    fn spectral_norms() {
        let (alg, ts) = setup(Family::Sl, &[2], "h");
        let (e, _) = ef(&alg);
        assert_eq!(ts.spectral_norm(&AlgebraElement::zero(&alg)).unwrap(), 0.0);
        assert_relative_eq!(ts.spectral_norm(&e.scale(-1.7)).unwrap(), 1.7, epsilon = 1e-12);

        let (alg3, ts3) = setup(Family::Sl, &[3], "h1");
        let x = el(&alg3, &[0.0, 0.6, -0.8, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).scale(1.3);
        assert_relative_eq!(ts3.spectral_norm(&x).unwrap(), 1.3, epsilon = 1e-12);

        let (alg4, ts4) = setup(Family::Sp, &[4], "h");
        let mut m = Matrix::zeros(4, 4);
        let sym = matrix_from_rows(2, 2, &[1.0, 2.0, 2.0, -0.5]).unwrap();
        m.view_mut((0, 2), (2, 2)).copy_from(&sym);
        let x = AlgebraElement::from_matrix(&alg4, &m).unwrap();
        let op_norm = sym.svd(false, false).singular_values.max();
        assert_relative_eq!(ts4.spectral_norm(&x).unwrap(), op_norm, epsilon = 1e-12);
    }

    #[test]
    fn sl2_bruhat_and_action() {
        let (alg, ts) = setup(Family::Sl, &[2], "h");
        let (e, f) = ef(&alg);
        let id = GroupElement::identity(&alg);
        let fac = ts.bruhat_factor(&id).unwrap().unwrap();
        assert!(fac.u.coords.norm() < 1e-15 && fac.v.coords.norm() < 1e-15);
        let (x, y) = (0.8, 0.5);
        let g = GroupElement::from_word(&alg, &[f.scale(y), e.scale(x)]).unwrap();
        let fac = ts.bruhat_factor(&g).unwrap().unwrap();
        assert_relative_eq!(fac.u.coords, e.scale(x / (1.0 + x * y)).coords, epsilon = 1e-12);
        let g = GroupElement::from_word(&alg, &[f.scale(-0.5), e.scale(2.0)]).unwrap();
        assert!(ts.bruhat_factor(&g).unwrap().is_none());

        let p = CellPoint::new(Vector::from_vec(vec![0.4])).unwrap();
        let scale = ts.plus_coords(&e).unwrap()[0];
        let act = |g: &GroupElement| ts.conformal_action(g, &p).unwrap().unwrap().coords[0];
        assert_relative_eq!(act(&id), 0.4);
        let x = 0.4 * scale;
        let yf = GroupElement::exp(&f.scale(0.7)).unwrap();
        assert_relative_eq!(act(&yf) / scale, x / (1.0 + x * 0.7), epsilon = 1e-12);
        let th = GroupElement::exp(&ts.structure.h().scale(0.3)).unwrap();
        assert_relative_eq!(act(&th), 0.4 * 0.3_f64.exp(), epsilon = 1e-12);
    }

    #[test]
    fn sl2_ball_status() {
        let (alg, ts) = setup(Family::Sl, &[2], "h");
        let (_, f) = ef(&alg);
        assert_eq!(ts.ball_status(&GroupElement::identity(&alg)).unwrap(), BallStatus::Bounded);
        assert_eq!(ts.ball_status(&GroupElement::exp(&f).unwrap()).unwrap(), BallStatus::Contained);
        assert_eq!(ts.ball_status(&GroupElement::exp(&f.scale(2.0)).unwrap()).unwrap(), BallStatus::Outside);
    }

    #[test]
    fn convexity_and_compression() {
        let (alg, ts) = setup(Family::Sl, &[2], "h");
        let (_, f) = ef(&alg);
        assert!(ts.convexity_check(&GroupElement::identity(&alg), 50, 1).unwrap());
        assert!(ts.convexity_check(&GroupElement::exp(&f.scale(0.9)).unwrap(), 50, 2).unwrap());
        let h = ts.structure.h().clone();
        assert!(ts.compression_member(&GroupElement::exp(&h.scale(-1.0)).unwrap(), 64, 3).unwrap());
        assert!(!ts.compression_member(&GroupElement::exp(&h).unwrap(), 64, 3).unwrap());
        let h0 = el(&alg, &[0.0, 0.5, 0.5, 0.0]);
        assert!(ts.compression_member(&GroupElement::exp(&h0.scale(1.3)).unwrap(), 64, 4).unwrap());
    }

    #[test]
    fn domain_samples_respect_norm() {
        let (_, ts) = setup(Family::Sl, &[3], "h1");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for c in ts.sample_domain(&mut rng, 100).unwrap() {
            assert!(ts.norm_of_coords(&c).unwrap() < 1.0);
        }
        for c in ts.sample_shell(&mut rng, 10).unwrap() {
            assert_relative_eq!(ts.norm_of_coords(&c).unwrap(), 1.0 - 1e-6, epsilon = 1e-12);
        }
    }

    #[test]
    fn so_bruhat_three_blocks() {
        let (alg, ts) = setup(Family::SoPq, &[1, 3], "boost");
        let x = ts.plus_element(&Vector::from_vec(vec![0.3, -0.2])).unwrap();
        let y = ts.minus_element(&Vector::from_vec(vec![0.1, 0.4])).unwrap();
        let g = GroupElement::from_word(&alg, &[x.clone(), y.clone()]).unwrap();
        let fac = ts.bruhat_factor(&g).unwrap().unwrap();
        assert_relative_eq!(fac.u.coords, x.coords, epsilon = 1e-12);
        assert_relative_eq!(fac.v.coords, y.coords, epsilon = 1e-12);
    }
}
