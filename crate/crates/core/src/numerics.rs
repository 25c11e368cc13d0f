//! Dense matrix substrate: eigenvalues, matrix exponential and invertibility
//! tests, plus the tolerance bundle shared by every membership test.
//!
//! Hessenberg reduction, Padé scaling and squaring and the SVD come from
//! `nalgebra`; the QR eigenvalue iteration is local.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{NccError, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;
pub type C64 = Complex<f64>;

/// Tolerance bundle. `eq_tol` decides "equals zero", `spec_tol` snaps
/// eigenvalues onto target values, `boundary_band` is the shell excluded
/// around cone, ball and wedge boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eq_tol: f64,
    pub spec_tol: f64,
    pub boundary_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eq_tol: 1e-9,
            spec_tol: 1e-7,
            boundary_band: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn new(eq_tol: f64, spec_tol: f64, boundary_band: f64) -> Result<Self> {
        let t = Tolerances {
            eq_tol,
            spec_tol,
            boundary_band,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.eq_tol > 0.0
            && self.eq_tol <= self.spec_tol
            && self.spec_tol <= self.boundary_band
            && self.boundary_band < 1.0;
        if ok {
            Ok(())
        } else {
            Err(NccError::Construction(format!(
                "tolerances must satisfy 0 < eq_tol <= spec_tol <= boundary_band < 1, got {:?}",
                self
            )))
        }
    }
}

/// Builds a matrix from row-major entries, rejecting empty shapes and
/// non-finite entries.
pub fn matrix_from_rows(rows: usize, cols: usize, entries: &[f64]) -> Result<Matrix> {
    if rows == 0 || cols == 0 {
        return Err(NccError::Dimension("matrix must have at least one row and column".into()));
    }
    if entries.len() != rows * cols {
        return Err(NccError::Dimension(format!(
            "expected {} entries for a {}x{} matrix, got {}",
            rows * cols,
            rows,
            cols,
            entries.len()
        )));
    }
    let m = Matrix::from_row_slice(rows, cols, entries);
    ensure_finite(&m)?;
    Ok(m)
}

pub fn ensure_finite(a: &Matrix) -> Result<()> {
    if a.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(NccError::Numeric("matrix has non-finite entries".into()))
    }
}

fn ensure_square(a: &Matrix, what: &str) -> Result<()> {
    if a.nrows() == a.ncols() && a.nrows() > 0 {
        Ok(())
    } else {
        Err(NccError::Dimension(format!(
            "{what} needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )))
    }
}

/// Eigenvalues with multiplicity: balancing, Householder reduction to
/// Hessenberg form, then Francis double-shift QR with exceptional shifts.
/// Ordering is unspecified.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<C64>> {
    ensure_square(a, "eigenvalues")?;
    ensure_finite(a)?;
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut b = a.clone();
    balance(&mut b);
    let mut h = b.hessenberg().h();
    hqr(&mut h)
}

fn balance(a: &mut Matrix) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / RADIX;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Double-shift QR on an upper Hessenberg matrix; `a` is overwritten.
fn hqr(a: &mut Matrix) -> Result<Vec<C64>> {
    let n = a.nrows();
    let eps = f64::EPSILON;
    let mut out = vec![C64::new(0.0, 0.0); n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let top = nn as usize;
            let mut l = top;
            while l > 0 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= eps * s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(top, top)];
            if l == top {
                out[top] = C64::new(x + t, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[(top - 1, top - 1)];
            let mut w = a[(top, top - 1)] * a[(top - 1, top)];
            if l == top - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    out[top - 1] = C64::new(x + z, 0.0);
                    out[top] = C64::new(if z != 0.0 { x - w / z } else { x + z }, 0.0);
                } else {
                    out[top] = C64::new(x + p, -z);
                    out[top - 1] = C64::new(x + p, z);
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return Err(NccError::Numeric("QR iteration did not converge".into()));
            }
            if its > 0 && its % 10 == 0 {
                t += x;
                for i in 0..=top {
                    a[(i, i)] -= x;
                }
                let s = a[(top, top - 1)].abs() + a[(top - 1, top - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let (mut p, mut q, mut r);
            let mut m = top - 2;
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..top - 1 {
                a[(i + 2, i)] = 0.0;
                if i != m {
                    a[(i + 2, i - 1)] = 0.0;
                }
            }
            for k in m..top {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k + 1 != top { a[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[(k, k - 1)] = -a[(k, k - 1)];
                    }
                } else {
                    a[(k, k - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=top {
                    let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                    if k + 1 != top {
                        pp += r * a[(k + 2, j)];
                        a[(k + 2, j)] -= pp * z;
                    }
                    a[(k + 1, j)] -= pp * y;
                    a[(k, j)] -= pp * x;
                }
                let mmin = top.min(k + 3);
                for i in l..=mmin {
                    let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                    if k + 1 != top {
                        pp += z * a[(i, k + 2)];
                        a[(i, k + 2)] -= pp * r;
                    }
                    a[(i, k + 1)] -= pp * q;
                    a[(i, k)] -= pp;
                }
            }
            if l + 1 >= top {
                break;
            }
        }
    }
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(NccError::Numeric("QR iteration produced non-finite values".into()));
    }
    Ok(out)
}

pub fn spectral_radius(a: &Matrix) -> Result<f64> {
    Ok(eigenvalues(a)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Matrix exponential (Padé approximant with scaling and squaring).
pub fn expm(a: &Matrix) -> Result<Matrix> {
    ensure_square(a, "expm")?;
    ensure_finite(a)?;
    let e = a.exp();
    ensure_finite(&e)?;
    Ok(e)
}

/// True iff the smallest singular value exceeds `eq_tol` times the largest.
/// The zero matrix is never invertible.
pub fn is_invertible(a: &Matrix, tol: &Tolerances) -> Result<bool> {
    is_invertible_scaled(a, 0.0, tol)
}

/// Like [`is_invertible`] but measured against `max(sigma_max, scale)`, for
/// pivot blocks whose own size says nothing about the conditioning of the
/// matrix they were cut from (a 1x1 block is always "well conditioned").
pub fn is_invertible_scaled(a: &Matrix, scale: f64, tol: &Tolerances) -> Result<bool> {
    ensure_square(a, "is_invertible")?;
    ensure_finite(a)?;
    let sv = a.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let reference = smax.max(scale);
    Ok(reference > 0.0 && smin > tol.eq_tol * reference)
}

/// Snaps each eigenvalue to the index of the target it lies within `tol` of.
/// Any eigenvalue that matches no target is an error: near-misses are never
/// silently accepted.
pub fn classify_spectrum(eigs: &[C64], targets: &[f64], tol: f64) -> Result<Vec<usize>> {
    eigs.iter()
        .map(|z| {
            targets
                .iter()
                .position(|&t| (z - C64::new(t, 0.0)).norm() < tol)
                .ok_or_else(|| {
                    NccError::Numeric(format!(
                        "eigenvalue {:.3e}{:+.3e}i matches none of {:?}",
                        z.re, z.im, targets
                    ))
                })
        })
        .collect()
}

/// Logarithm of a unipotent matrix `I + N` via the terminating series
/// `N - N^2/2 + N^3/3 - ...`.
pub fn log_unipotent(u: &Matrix) -> Result<Matrix> {
    ensure_square(u, "log_unipotent")?;
    let n = u.nrows();
    let nil = u - Matrix::identity(n, n);
    let mut out = Matrix::zeros(n, n);
    let mut power = nil.clone();
    for k in 1..=n {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        out += &power * (sign / k as f64);
        power = &power * &nil;
    }
    if power.norm() > 1e-8 * (1.0 + nil.norm()).powi(n as i32 + 1) {
        return Err(NccError::Numeric("matrix is not unipotent".into()));
    }
    Ok(out)
}

/// Moore-Penrose pseudo-inverse through the SVD.
pub fn pseudo_inverse(a: &Matrix) -> Result<Matrix> {
    ensure_finite(a)?;
    let svd = a.clone().svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1.0);
    svd.pseudo_inverse(eps)
        .map_err(|e| NccError::Numeric(e.to_string()))
}

pub fn max_abs(a: &Matrix) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
