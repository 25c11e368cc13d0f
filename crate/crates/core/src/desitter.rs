//! de Sitter space `dS^d` inside `R^{1,d}`: ambient causal order, boost
//! flow, the wedge `x_1 > |x_0|`, the observer domain of the boost orbit
//! through `e_1`, and the crown tube with the KMS test.
//!
//! Geodesics use `β(x,x) = -1` for the base point and `β(v,v) = +1` for a
//! timelike tangent.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{NccError, Result};
use crate::lie::{adjoint_action, Algebra, AlgebraElement, Family, GroupElement};
use crate::numerics::{Matrix, Tolerances, C64};
use crate::par::{map_indexed, ExecMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MinkowskiVector(Vec<f64>);

impl MinkowskiVector {
    /// Components `x_0, ..., x_d` with `d >= 2`.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.len() < 3 {
            return Err(NccError::Dimension(format!(
                "Minkowski vectors need d >= 2, got {} components",
                components.len()
            )));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(NccError::Numeric("non-finite Minkowski component".into()));
        }
        Ok(MinkowskiVector(components))
    }

    pub fn unit(d: usize, i: usize) -> Result<Self> {
        let mut c = vec![0.0; d + 1];
        if i > d {
            return Err(NccError::Dimension(format!("e_{i} does not exist for d = {d}")));
        }
        c[i] = 1.0;
        MinkowskiVector::new(c)
    }

    pub fn d(&self) -> usize {
        self.0.len() - 1
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    fn combine(&self, a: f64, other: &MinkowskiVector, b: f64) -> MinkowskiVector {
        MinkowskiVector(self.0.iter().zip(&other.0).map(|(x, y)| a * x + b * y).collect())
    }

    fn sq_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }
}

pub fn lorentz_form(x: &MinkowskiVector, y: &MinkowskiVector) -> Result<f64> {
    if x.d() != y.d() {
        return Err(NccError::Dimension(format!("β on d = {} and d = {}", x.d(), y.d())));
    }
    Ok(x.0[0] * y.0[0] - x.0[1..].iter().zip(&y.0[1..]).map(|(a, b)| a * b).sum::<f64>())
}

fn beta(x: &[f64], y: &[f64]) -> f64 {
    x[0] * y[0] - x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DSPoint(MinkowskiVector);

impl DSPoint {
    pub fn new(v: MinkowskiVector, tol: &Tolerances) -> Result<Self> {
        let q = lorentz_form(&v, &v)?;
        if (q + 1.0).abs() > tol.eq_tol * v.sq_norm().max(1.0) {
            return Err(NccError::Domain(format!("β(x,x) = {q}, expected -1")));
        }
        Ok(DSPoint(v))
    }

    pub fn from_components(c: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        DSPoint::new(MinkowskiVector::new(c)?, tol)
    }

    /// The base point `e_1`.
    pub fn base(d: usize) -> Result<Self> {
        Ok(DSPoint(MinkowskiVector::unit(d, 1)?))
    }

    /// Point with prescribed `x_0, x_1` and the remaining spatial part along
    /// `direction`, scaled onto the quadric.
    pub fn lift(x0: f64, x1: f64, direction: &[f64], tol: &Tolerances) -> Result<Self> {
        let r2 = 1.0 + x0 * x0 - x1 * x1;
        if r2 < -tol.eq_tol {
            return Err(NccError::Domain("no dS point with these x_0, x_1".into()));
        }
        let r = r2.max(0.0).sqrt();
        let n = direction.iter().map(|a| a * a).sum::<f64>().sqrt();
        let mut c = vec![x0, x1];
        if n == 0.0 {
            if r > tol.eq_tol {
                return Err(NccError::Domain("zero direction for the transverse part".into()));
            }
            c.extend(direction.iter().map(|_| 0.0));
        } else {
            c.extend(direction.iter().map(|a| r * a / n));
        }
        DSPoint::from_components(c, tol)
    }

    pub fn vector(&self) -> &MinkowskiVector {
        &self.0
    }

    pub fn components(&self) -> &[f64] {
        &self.0 .0
    }

    pub fn d(&self) -> usize {
        self.0.d()
    }

    pub fn negate(&self) -> DSPoint {
        DSPoint(MinkowskiVector(self.0 .0.iter().map(|x| -x).collect()))
    }
}

/// `x <= y` in the closed forward cone of `R^{1,d}`. On the quadric
/// `β(y-x, y-x) = -2(1 + β(x,y))`, which keeps the test well conditioned
/// far out along the flow; tolerances scale with `|x| |y|`.
pub fn causal_leq(x: &DSPoint, y: &DSPoint, tol: &Tolerances) -> bool {
    if x.d() != y.d() {
        return false;
    }
    let (a, b) = (x.components(), y.components());
    let scale = (x.0.sq_norm() * y.0.sq_norm()).sqrt().max(1.0);
    let v0 = b[0] - a[0];
    let vv = -2.0 * (1.0 + beta(a, b));
    v0 >= -tol.eq_tol * a[0].abs().max(b[0].abs()).max(1.0) && vv >= -tol.eq_tol * scale
}

pub fn boost_flow(t: f64, x: &DSPoint) -> DSPoint {
    let (c, s) = (t.cosh(), t.sinh());
    let mut y = x.components().to_vec();
    y[0] = c * x.components()[0] + s * x.components()[1];
    y[1] = c * x.components()[1] + s * x.components()[0];
    DSPoint(MinkowskiVector(y))
}

/// The modular geodesic `γ(t) = boost_flow(t, e_1)`.
pub fn gamma(d: usize, t: f64) -> DSPoint {
    let mut c = vec![0.0; d + 1];
    c[0] = t.sinh();
    c[1] = t.cosh();
    DSPoint(MinkowskiVector(c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Inside,
    Outside,
    Boundary,
}

impl Verdict {
    pub fn decided(self) -> Option<bool> {
        match self {
            Verdict::Inside => Some(true),
            Verdict::Outside => Some(false),
            Verdict::Boundary => None,
        }
    }
}

/// `x_1 - |x_0|` against the band.
pub fn wedge_verdict(x: &DSPoint, band: f64) -> Verdict {
    let gap = x.components()[1] - x.components()[0].abs();
    if gap > band {
        Verdict::Inside
    } else if gap < -band {
        Verdict::Outside
    } else {
        Verdict::Boundary
    }
}

pub fn wedge_member(x: &DSPoint) -> bool {
    x.components()[1] > x.components()[0].abs()
}

/// Whether some grid pair `t <= s` has `γ(t) <= x <= γ(s)`. Along the boost
/// orbit `{t : γ(t) <= x}` is a down-set and `{s : x <= γ(s)}` an up-set,
/// so comparing the extreme indices suffices.
pub fn observer_member(x: &DSPoint, t_max: f64, n_grid: usize, tol: &Tolerances) -> Result<bool> {
    if !(t_max > 0.0) || n_grid < 2 {
        return Err(NccError::Precondition("observer grid needs t_max > 0 and n_grid >= 2".into()));
    }
    let d = x.d();
    let t = |i: usize| -t_max + 2.0 * t_max * i as f64 / (n_grid - 1) as f64;
    let below = (0..n_grid).find(|&i| causal_leq(&gamma(d, t(i)), x, tol));
    let above = (0..n_grid).rev().find(|&j| causal_leq(x, &gamma(d, t(j)), tol));
    Ok(matches!((below, above), (Some(i), Some(j)) if i <= j))
}

fn check_tangent(x: &DSPoint, v: &MinkowskiVector, norm: f64, tol: &Tolerances) -> Result<()> {
    let vv = lorentz_form(v, v)?;
    let xv = lorentz_form(x.vector(), v)?;
    let scale = v.sq_norm().max(x.0.sq_norm()).max(1.0);
    if (vv - norm).abs() > tol.eq_tol * scale || xv.abs() > tol.eq_tol * scale {
        return Err(NccError::Domain(format!(
            "tangent needs β(v,v) = {norm} and β(x,v) = 0, got {vv} and {xv}"
        )));
    }
    Ok(())
}

/// Timelike geodesic `cosh(t) x + sinh(t) v`.
pub fn ds_geodesic(x: &DSPoint, v: &MinkowskiVector, t: f64, tol: &Tolerances) -> Result<DSPoint> {
    check_tangent(x, v, 1.0, tol)?;
    DSPoint::new(x.0.combine(t.cosh(), v, t.sinh()), tol)
}

/// Spacelike geodesic `cos(t) x + sin(t) v`, for `β(v,v) = -1`.
pub fn ds_spacelike_geodesic(x: &DSPoint, v: &MinkowskiVector, t: f64, tol: &Tolerances) -> Result<DSPoint> {
    check_tangent(x, v, -1.0, tol)?;
    DSPoint::new(x.0.combine(t.cos(), v, t.sin()), tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoint(Vec<C64>);

impl ComplexPoint {
    pub fn new(components: Vec<C64>) -> Result<Self> {
        if components.len() < 3 {
            return Err(NccError::Dimension("complex points need d >= 2".into()));
        }
        if components.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(NccError::Numeric("non-finite complex component".into()));
        }
        Ok(ComplexPoint(components))
    }

    pub fn from_real(x: &DSPoint) -> Self {
        ComplexPoint(x.components().iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// `(i a_0, i a_1, a_2, ..., a_d)`.
    pub fn tau_fixed(a: &[f64]) -> Result<Self> {
        ComplexPoint::new(
            a.iter()
                .enumerate()
                .map(|(k, &v)| if k < 2 { C64::new(0.0, v) } else { C64::new(v, 0.0) })
                .collect(),
        )
    }

    pub fn components(&self) -> &[C64] {
        &self.0
    }

    pub fn d(&self) -> usize {
        self.0.len() - 1
    }
}

/// `Im z` in the open forward light cone.
pub fn crown_member(z: &ComplexPoint, tol: &Tolerances) -> bool {
    let y0 = z.0[0].im;
    let ys = z.0[1..].iter().map(|c| c.im * c.im).sum::<f64>().sqrt();
    y0 > tol.eq_tol && y0 - ys > tol.eq_tol * y0
}

/// The boost continued to imaginary time `it`.
pub fn complex_boost(t: f64, z: &ComplexPoint) -> ComplexPoint {
    let (c, s) = (C64::new(t.cos(), 0.0), C64::new(0.0, t.sin()));
    let mut w = z.0.clone();
    w[0] = c * z.0[0] + s * z.0[1];
    w[1] = s * z.0[0] + c * z.0[1];
    ComplexPoint(w)
}

/// Whether the continued orbit stays in the crown for every grid point of
/// `(band, π - band)`.
pub fn kms_member(x: &DSPoint, n_grid: usize, tol: &Tolerances) -> Result<bool> {
    if n_grid < 8 {
        return Err(NccError::Precondition("kms grid needs at least 8 points".into()));
    }
    let band = tol.boundary_band;
    let z = ComplexPoint::from_real(x);
    Ok((0..n_grid).all(|i| {
        let t = band + (PI - 2.0 * band) * i as f64 / (n_grid - 1) as f64;
        crown_member(&complex_boost(t, &z), tol)
    }))
}

/// Membership in the `τ̄_h`-fixed part of the crown:
/// `z = (i x_0, i x_1, x_2, ..., x_d)`, `x_0 > |x_1|`, on the complex quadric.
pub fn tau_fixed_crown_member(z: &ComplexPoint, tol: &Tolerances) -> bool {
    let c = &z.0;
    let eq = tol.eq_tol;
    let shape = c[..2].iter().all(|w| w.re.abs() < eq) && c[2..].iter().all(|w| w.im.abs() < eq);
    if !shape {
        return false;
    }
    let (x0, x1) = (c[0].im, c[1].im);
    let rest: f64 = c[2..].iter().map(|w| w.re * w.re).sum();
    let quadric = -x0 * x0 + x1 * x1 - rest;
    let scale = (x0 * x0 + x1 * x1 + rest).max(1.0);
    x0 > x1.abs() && (quadric + 1.0).abs() <= eq * scale
}

/// `g e_1` for `g` in a realization of `so(1,d)`.
pub fn so1d_point(g: &GroupElement) -> Result<DSPoint> {
    let alg = &g.algebra;
    if alg.family != Family::SoPq || alg.params[0] != 1 {
        return Err(NccError::Precondition(format!("{} is not so(1,d)", alg.name)));
    }
    let v = g.matrix.column(1).iter().copied().collect();
    DSPoint::from_components(v, &alg.tol)
}

/// `exp(φ R_12) exp(s B_01)`, which sends `e_1` to
/// `(sinh s, cosh s cos φ, cosh s sin φ)`.
pub fn so12_representative(alg: &Algebra, s: f64, phi: f64) -> Result<GroupElement> {
    let named = |n: &str| {
        alg.basis_index(n)
            .map(|i| AlgebraElement::basis(alg, i))
            .ok_or_else(|| NccError::Precondition(format!("{} has no {n}", alg.name)))
    };
    GroupElement::from_word(alg, &[named("R12")?.scale(phi), named("B01")?.scale(s)])
}

/// The point of dS² attached to `g ∈ SL_2(R)`: with
/// `Ad(g) h_0 = a z + b h_0 + c h`, returns `(-a, b, c)`.
pub fn sl2_point(g: &GroupElement) -> Result<DSPoint> {
    let alg = &g.algebra;
    if alg.family != Family::Sl || alg.defining_dim != 2 {
        return Err(NccError::Precondition(format!("{} is not sl(2)", alg.name)));
    }
    let h0 = AlgebraElement::from_matrix(alg, &Matrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]))?;
    let m = adjoint_action(g, &h0)?.matrix;
    let z_coef = m[(1, 0)] - m[(0, 1)];
    let h0_coef = m[(1, 0)] + m[(0, 1)];
    let h_coef = m[(0, 0)] - m[(1, 1)];
    DSPoint::from_components(vec![-z_coef, h0_coef, h_coef], &alg.tol)
}

/// Pairwise agreement counts of a grid scan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GridReport {
    pub total: usize,
    pub agree: usize,
    pub disagree: usize,
    pub boundary: usize,
}

impl GridReport {
    pub fn from_verdicts(items: &[Option<bool>]) -> Self {
        let mut r = GridReport { total: items.len(), ..Default::default() };
        for v in items {
            match v {
                None => r.boundary += 1,
                Some(true) => r.agree += 1,
                Some(false) => r.disagree += 1,
            }
        }
        r
    }
}

/// Scans the `(s, φ)` grid with `s ∈ [-s_max, s_max]`, `φ ∈ [0, 2π)`;
/// `f` returns `None` for boundary points.
pub fn scan_grid<F>(n: usize, s_max: f64, mode: ExecMode, f: F) -> GridReport
where
    F: Fn(f64, f64) -> Option<bool> + Sync + Send,
{
    let verdicts = map_indexed(n * n, mode, |k| {
        let (i, j) = (k / n, k % n);
        let s = -s_max + 2.0 * s_max * i as f64 / (n.max(2) - 1) as f64;
        let phi = 2.0 * PI * j as f64 / n as f64;
        f(s, phi)
    });
    GridReport::from_verdicts(&verdicts)
}
