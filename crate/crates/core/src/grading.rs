//! Euler elements, the 3-grading they induce, and the involutions
//! `theta`, `tau_h`, `tau = tau_h theta` with the splittings they cut out.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{NccError, Result};
use crate::lie::{ad_matrix, Algebra, AlgebraElement, Family};
use crate::numerics::{classify_spectrum, eigenvalues, Matrix, Tolerances, Vector};

/// True iff `ad x` is diagonalizable with spectrum in {-1, 0, 1} and not zero.
///
/// Diagonalizability is certified by `A^3 = A` for `A = ad x`; the minimal
/// polynomial then divides `l(l-1)(l+1)`, which has simple roots.
pub fn check_euler(x: &AlgebraElement, tol: &Tolerances) -> bool {
    let a = ad_matrix(x);
    let Ok(eigs) = eigenvalues(&a) else {
        return false;
    };
    let Ok(classes) = classify_spectrum(&eigs, &[-1.0, 0.0, 1.0], tol.spec_tol) else {
        return false;
    };
    if classes.iter().all(|&c| c == 1) {
        return false;
    }
    let cubic = &a * &a * &a - &a;
    cubic.norm() <= tol.eq_tol * a.norm().max(1.0)
}

/// Canonical Euler elements by label.
///
/// * `sl:n`, `gl:n`: `h1` .. `h{n-1}` with `h_j = diag((n-j)/n 1_j, -j/n 1_{n-j})`,
///   `h` as a synonym of `h1`, and `diag:a,b,..` for an explicit diagonal.
/// * `so:p,q`: `boost` (also `h1`, and `h2` when p = 2), the boost between
///   coordinates 0 and p; for p = q the label `h{p}` is half the sum of the
///   p commuting boosts.
/// * `sp:2n`: `h{n}` or `h`, i.e. `diag(1_n, -1_n)/2`.
pub fn euler_element(alg: &Algebra, label: &str) -> Result<AlgebraElement> {
    let n = alg.defining_dim;
    let unknown = || {
        NccError::Parse(format!("unknown Euler label `{label}` for {}", alg.name))
    };
    let from_diag = |d: Vec<f64>| {
        AlgebraElement::from_matrix(alg, &Matrix::from_diagonal(&Vector::from_vec(d)))
    };
    if let Some(rest) = label.strip_prefix("diag:") {
        if !matches!(alg.family, Family::Sl | Family::Gl) {
            return Err(unknown());
        }
        let vals = rest
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| unknown()))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != n {
            return Err(NccError::Parse(format!("`{label}` needs {n} entries")));
        }
        return from_diag(vals);
    }
    let index = |s: &str| s.strip_prefix('h').and_then(|k| k.parse::<usize>().ok());
    match alg.family {
        Family::Sl | Family::Gl => {
            let j = if label == "h" { Some(1) } else { index(label) };
            match j {
                Some(j) if j >= 1 && j < n => {
                    let top = (n - j) as f64 / n as f64;
                    let bottom = -(j as f64) / n as f64;
                    from_diag((0..n).map(|i| if i < j { top } else { bottom }).collect())
                }
                _ => Err(unknown()),
            }
        }
        Family::SoPq => {
            let (p, q) = (alg.params[0], alg.params[1]);
            let boost = |i: usize, j: usize| {
                let mut m = Matrix::zeros(n, n);
                m[(i, j)] = 1.0;
                m[(j, i)] = 1.0;
                m
            };
            match (label, index(label)) {
                (_, Some(k)) if p == q && k == p && p >= 2 => {
                    let mut m = Matrix::zeros(n, n);
                    for i in 0..p {
                        m += boost(i, p + i) * 0.5;
                    }
                    AlgebraElement::from_matrix(alg, &m)
                }
                ("boost", _) | (_, Some(1)) => AlgebraElement::from_matrix(alg, &boost(0, p)),
                (_, Some(2)) if p == 2 => AlgebraElement::from_matrix(alg, &boost(0, p)),
                _ => Err(unknown()),
            }
        }
        Family::Sp => {
            let half = n / 2;
            let ok = label == "h" || index(label) == Some(half);
            if !ok {
                return Err(unknown());
            }
            from_diag((0..n).map(|i| if i < half { 0.5 } else { -0.5 }).collect())
        }
    }
}

/// A linear subspace of coordinate space: projector plus a basis that is
/// orthonormal under the trace form `tr(x y^T)`.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub projector: Matrix,
    pub basis: Vec<AlgebraElement>,
}

impl Subspace {
    fn from_projector(alg: &Algebra, projector: Matrix) -> Result<Self> {
        let gram = alg.trace_gram();
        let inner = |a: &Vector, b: &Vector| (a.transpose() * gram * b)[(0, 0)];
        let expected = projector.trace();
        let rank = expected.round();
        if (expected - rank).abs() > 1e-6 {
            return Err(NccError::Numeric(format!(
                "projector trace {expected} is not an integer"
            )));
        }
        let mut vecs: Vec<Vector> = Vec::new();
        for j in 0..projector.ncols() {
            let mut v: Vector = projector.column(j).into_owned();
            for _ in 0..2 {
                for b in &vecs {
                    let c = inner(b, &v);
                    v -= b * c;
                }
            }
            let nrm = inner(&v, &v).max(0.0).sqrt();
            if nrm > 1e-8 {
                vecs.push(v / nrm);
            }
        }
        if vecs.len() != rank as usize {
            return Err(NccError::Numeric(format!(
                "projector range has {} basis vectors, trace says {}",
                vecs.len(),
                rank
            )));
        }
        let basis = vecs
            .into_iter()
            .map(|v| AlgebraElement::from_coords(alg, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Subspace { projector, basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn project(&self, x: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_coords(&x.algebra, &self.projector * &x.coords)
            .expect("projection keeps dimensions")
    }

    /// Distance of `x` from the subspace, relative to `max(1, |x|)`.
    pub fn residual(&self, x: &AlgebraElement) -> f64 {
        let r = &x.coords - &self.projector * &x.coords;
        r.norm() / x.coords.norm().max(1.0)
    }

    pub fn contains(&self, x: &AlgebraElement, tol: &Tolerances) -> bool {
        self.residual(x) < tol.eq_tol
    }

    /// Coordinates of `x` against the orthonormal basis.
    pub fn basis_coords(&self, x: &AlgebraElement) -> Vector {
        let gram = x.algebra.trace_gram();
        Vector::from_iterator(
            self.dim(),
            self.basis.iter().map(|b| (b.coords.transpose() * gram * &x.coords)[(0, 0)]),
        )
    }

    pub fn element(&self, coeffs: &[f64]) -> Result<AlgebraElement> {
        if coeffs.len() != self.dim() {
            return Err(NccError::Dimension(format!(
                "subspace of dimension {} given {} coefficients",
                self.dim(),
                coeffs.len()
            )));
        }
        let alg = match self.basis.first() {
            Some(b) => b.algebra.clone(),
            None => return Err(NccError::Domain("empty subspace".into())),
        };
        let mut c = Vector::zeros(alg.dim());
        for (b, s) in self.basis.iter().zip(coeffs) {
            c += &b.coords * *s;
        }
        AlgebraElement::from_coords(&alg, c)
    }
}

/// Spectral projectors of `ad h` onto `g_{-1}`, `g_0`, `g_{+1}`.
#[derive(Debug, Clone)]
pub struct GradingData {
    pub h: AlgebraElement,
    pub p_minus: Matrix,
    pub p_zero: Matrix,
    pub p_plus: Matrix,
    pub dims: [usize; 3],
    pub minus: Subspace,
    pub zero: Subspace,
    pub plus: Subspace,
}

pub fn grading_projectors(h: &AlgebraElement) -> Result<GradingData> {
    let tol = h.algebra.tol;
    if !check_euler(h, &tol) {
        return Err(NccError::Domain(format!("{:?} is not an Euler element", h.coords.as_slice())));
    }
    let alg = &h.algebra;
    let d = alg.dim();
    let a = ad_matrix(h);
    let id = Matrix::identity(d, d);
    let p_plus = (&a * (&a + &id)) * 0.5;
    let p_minus = (&a * (&a - &id)) * 0.5;
    let p_zero = &id - &a * &a;
    let minus = Subspace::from_projector(alg, p_minus.clone())?;
    let zero = Subspace::from_projector(alg, p_zero.clone())?;
    let plus = Subspace::from_projector(alg, p_plus.clone())?;
    let dims = [minus.dim(), zero.dim(), plus.dim()];
    Ok(GradingData {
        h: h.clone(),
        p_minus,
        p_zero,
        p_plus,
        dims,
        minus,
        zero,
        plus,
    })
}

/// The symmetric pair attached to an Euler element `h` with `theta(h) = -h`.
#[derive(Debug, Clone)]
pub struct SymmetricStructure {
    pub grading: GradingData,
    pub theta: Matrix,
    pub tau_h: Matrix,
    pub tau: Matrix,
    pub h_alg: Subspace,
    pub q: Subspace,
    pub k: Subspace,
    pub p: Subspace,
    pub h_k: Subspace,
    pub h_p: Subspace,
    pub q_k: Subspace,
    pub q_p: Subspace,
}

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
pub struct SubspaceDims {
    pub g: usize,
    pub g_minus: usize,
    pub g_zero: usize,
    pub g_plus: usize,
    pub h: usize,
    pub q: usize,
    pub k: usize,
    pub p: usize,
    pub h_k: usize,
    pub h_p: usize,
    pub q_k: usize,
    pub q_p: usize,
}

impl SymmetricStructure {
    pub fn h(&self) -> &AlgebraElement {
        &self.grading.h
    }

    pub fn algebra(&self) -> &Algebra {
        &self.grading.h.algebra
    }

    pub fn tol(&self) -> Tolerances {
        self.algebra().tol
    }

    pub fn apply(&self, map: &Matrix, x: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_coords(&x.algebra, map * &x.coords).expect("linear map on coords")
    }

    pub fn tau_of(&self, x: &AlgebraElement) -> AlgebraElement {
        self.apply(&self.tau, x)
    }

    pub fn dims(&self) -> SubspaceDims {
        let [m, z, p] = self.grading.dims;
        SubspaceDims {
            g: self.algebra().dim(),
            g_minus: m,
            g_zero: z,
            g_plus: p,
            h: self.h_alg.dim(),
            q: self.q.dim(),
            k: self.k.dim(),
            p: self.p.dim(),
            h_k: self.h_k.dim(),
            h_p: self.h_p.dim(),
            q_k: self.q_k.dim(),
            q_p: self.q_p.dim(),
        }
    }
}

/// Builds `theta`, `tau_h = I - 2 (ad h)^2` and `tau = tau_h theta` on
/// coordinates together with the eight subspaces they cut out.
pub fn symmetric_structure(h: &AlgebraElement) -> Result<Arc<SymmetricStructure>> {
    let alg = h.algebra.clone();
    let tol = alg.tol;
    let grading = grading_projectors(h)?;
    let theta_h = h.theta();
    if (&theta_h + h).coords.norm() > tol.eq_tol * h.coords.norm().max(1.0) {
        return Err(NccError::Precondition(
            "theta(h) != -h; move h into p (a symmetric matrix) first".into(),
        ));
    }
    let d = alg.dim();
    let id = Matrix::identity(d, d);
    let theta = alg.theta_matrix()?;
    let a = ad_matrix(h);
    let tau_h = &id - (&a * &a) * 2.0;
    let tau = &tau_h * &theta;

    for (name, m) in [("theta", &theta), ("tau_h", &tau_h), ("tau", &tau)] {
        let res = (m * m - &id).norm();
        if res > tol.eq_tol * (d as f64) {
            return Err(NccError::Consistency(format!("{name} is not an involution ({res:.3e})")));
        }
    }
    // tau_h acts as (-1)^j on g_j.
    let sign_check = (&tau_h * &grading.p_plus + &grading.p_plus).norm()
        + (&tau_h * &grading.p_minus + &grading.p_minus).norm()
        + (&tau_h * &grading.p_zero - &grading.p_zero).norm();
    if sign_check > tol.eq_tol * (d as f64) {
        return Err(NccError::Consistency("tau_h is not (-1)^j on g_j".into()));
    }

    let half = |m: Matrix| m * 0.5;
    let p_h = half(&id + &tau);
    let p_q = half(&id - &tau);
    let p_k = half(&id + &theta);
    let p_p = half(&id - &theta);
    let sub = |m: Matrix| Subspace::from_projector(&alg, m);
    let s = SymmetricStructure {
        h_k: sub(&p_h * &p_k)?,
        h_p: sub(&p_h * &p_p)?,
        q_k: sub(&p_q * &p_k)?,
        q_p: sub(&p_q * &p_p)?,
        h_alg: sub(p_h)?,
        q: sub(p_q)?,
        k: sub(p_k)?,
        p: sub(p_p)?,
        grading,
        theta,
        tau_h,
        tau,
    };
    if s.h_alg.dim() + s.q.dim() != d
        || s.q_k.dim() + s.q_p.dim() != s.q.dim()
        || s.h_k.dim() + s.h_p.dim() != s.h_alg.dim()
    {
        return Err(NccError::Consistency("splitting dimensions do not add up".into()));
    }
    if !s.q_p.contains(h, &tol) {
        return Err(NccError::Consistency("h is not in q_p".into()));
    }
    Ok(Arc::new(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{adjoint_action, bracket, build_algebra, GroupElement};
    use crate::numerics::matrix_from_rows;
    use approx::assert_relative_eq;

    fn el(alg: &Algebra, rows: &[f64]) -> AlgebraElement {
        let n = alg.defining_dim;
        AlgebraElement::from_matrix(alg, &matrix_from_rows(n, n, rows).unwrap()).unwrap()
    }

    #[test]
    fn euler_checks() {
        let tol = Tolerances::default();
        let sl2 = build_algebra(Family::Sl, &[2]).unwrap();
        let h = euler_element(&sl2, "h1").unwrap();
        assert_relative_eq!(h.matrix, matrix_from_rows(2, 2, &[0.5, 0.0, 0.0, -0.5]).unwrap());
        assert!(check_euler(&h, &tol));
        let e = el(&sl2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(!check_euler(&e, &tol));
        assert!(!check_euler(&AlgebraElement::zero(&sl2), &tol));
        assert!(!check_euler(&h.scale(2.0), &tol));

        let sl3 = build_algebra(Family::Sl, &[3]).unwrap();
        let h1 = euler_element(&sl3, "h1").unwrap();
        assert_relative_eq!(h1.matrix[(0, 0)], 2.0 / 3.0, epsilon = 1e-15);
        assert!(check_euler(&h1, &tol));
        assert_eq!(grading_projectors(&h1).unwrap().dims, [2, 4, 2]);
    }

    #[test]
    fn sl2_grading_ranges() {
        let sl2 = build_algebra(Family::Sl, &[2]).unwrap();
        let h = euler_element(&sl2, "h").unwrap();
        let g = grading_projectors(&h).unwrap();
        assert_eq!(g.dims, [1, 1, 1]);
        let e = el(&sl2, &[0.0, 1.0, 0.0, 0.0]);
        let f = el(&sl2, &[0.0, 0.0, 1.0, 0.0]);
        assert!(g.plus.contains(&e, &sl2.tol));
        assert!(g.minus.contains(&f, &sl2.tol));
        assert!(g.zero.contains(&h, &sl2.tol));
        assert!(crate::numerics::max_abs(&(&g.p_plus * &g.p_minus)) < 1e-14);
    }

    #[test]
    fn sl4_h2_dims() {
        let sl4 = build_algebra(Family::Sl, &[4]).unwrap();
        let h2 = euler_element(&sl4, "h2").unwrap();
        assert_relative_eq!(h2.matrix[(1, 1)], 0.5);
        assert_eq!(grading_projectors(&h2).unwrap().dims, [4, 7, 4]);
    }

    #[test]
    fn non_euler_projectors_fail() {
        let sl2 = build_algebra(Family::Sl, &[2]).unwrap();
        let e = el(&sl2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(grading_projectors(&e), Err(NccError::Domain(_))));
    }

    #[test]
    fn sl2_symmetric_structure() {
        let sl2 = build_algebra(Family::Sl, &[2]).unwrap();
        let h = euler_element(&sl2, "h").unwrap();
        let s = symmetric_structure(&h).unwrap();
        let dims = s.dims();
        assert_eq!((dims.h, dims.q, dims.q_k, dims.q_p, dims.h_p, dims.h_k), (1, 2, 1, 1, 1, 0));
        let h0 = el(&sl2, &[0.0, 0.5, 0.5, 0.0]);
        let z = el(&sl2, &[0.0, -0.5, 0.5, 0.0]);
        assert!(s.h_alg.contains(&h0, &sl2.tol));
        assert!(s.q_k.contains(&z, &sl2.tol));
        assert!(s.q_p.contains(&h, &sl2.tol));
        let e = el(&sl2, &[0.0, 1.0, 0.0, 0.0]);
        assert_relative_eq!(s.apply(&s.tau_h, &h).coords, h.coords, epsilon = 1e-14);
        assert_relative_eq!(s.apply(&s.tau_h, &e).coords, (-&e).coords, epsilon = 1e-14);
        // The matrix formula for tau on sl2: (a b; c -a) -> (-a c; b a).
        let x = el(&sl2, &[0.3, 1.2, -0.7, -0.3]);
        let tx = s.tau_of(&x);
        assert_relative_eq!(tx.matrix, matrix_from_rows(2, 2, &[-0.3, -0.7, 1.2, 0.3]).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn non_symmetric_h_is_precondition_error() {
        let sl2 = build_algebra(Family::Sl, &[2]).unwrap();
        let h = euler_element(&sl2, "h").unwrap();
        let z = el(&sl2, &[0.0, -0.5, 0.5, 0.0]);
        let g = GroupElement::exp(&z.scale(0.4)).unwrap();
        let h_rot = adjoint_action(&g, &h).unwrap();
        assert!(check_euler(&h_rot, &sl2.tol));
        let e = el(&sl2, &[0.0, 1.0, 0.0, 0.0]);
        let g2 = GroupElement::exp(&e.scale(0.4)).unwrap();
        let h_shear = adjoint_action(&g2, &h).unwrap();
        assert!(matches!(symmetric_structure(&h_shear), Err(NccError::Precondition(_))));
    }

    #[test]
    fn labels() {
        let so13 = build_algebra(Family::SoPq, &[1, 3]).unwrap();
        let b = euler_element(&so13, "boost").unwrap();
        assert_eq!(b.matrix[(0, 1)], 1.0);
        assert_eq!(grading_projectors(&b).unwrap().dims, [2, 2, 2]);
        let so22 = build_algebra(Family::SoPq, &[2, 2]).unwrap();
        let h2 = euler_element(&so22, "h2").unwrap();
        assert!(check_euler(&h2, &so22.tol));
        assert_eq!(grading_projectors(&h2).unwrap().dims[2], 1);
        let sp4 = build_algebra(Family::Sp, &[4]).unwrap();
        let hs = euler_element(&sp4, "h2").unwrap();
        assert_eq!(grading_projectors(&hs).unwrap().dims, [3, 4, 3]);
        assert!(euler_element(&sp4, "h1").is_err());
        assert!(euler_element(&so13, "h7").is_err());
        let gl2 = build_algebra(Family::Gl, &[2]).unwrap();
        let hd = euler_element(&gl2, "diag:0.75,-0.25").unwrap();
        assert!(check_euler(&hd, &gl2.tol));
        assert!(euler_element(&gl2, "diag:1").is_err());
    }

    #[test]
    fn q_brackets_into_h() {
        let sl3 = build_algebra(Family::Sl, &[3]).unwrap();
        let s = symmetric_structure(&euler_element(&sl3, "h1").unwrap()).unwrap();
        for a in &s.q.basis {
            for b in &s.q.basis {
                let c = bracket(a, b).unwrap();
                assert!(s.h_alg.residual(&c) < 1e-10);
            }
            for b in &s.h_alg.basis {
                let c = bracket(a, b).unwrap();
                assert!(s.q.residual(&c) < 1e-10);
            }
        }
    }
}
