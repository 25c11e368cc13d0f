//! Matrix realizations of the classical real Lie algebras, their brackets,
//! adjoint representation and Cartan-Killing form, plus group elements built
//! as ordered products of exponentials.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{NccError, Result};
use crate::numerics::{expm, pseudo_inverse, Matrix, Tolerances, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Sl,
    Gl,
    SoPq,
    Sp,
}

/// Parsed algebra name: `sl:2`, `gl:2`, `so:1,2`, `sp:4`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub family: Family,
    pub params: Vec<usize>,
}

impl FromStr for AlgebraSpec {
    type Err = NccError;

    fn from_str(s: &str) -> Result<Self> {
        let (fam, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| NccError::Parse(format!("algebra spec `{s}` must look like `sl:2`")))?;
        let family = match fam.trim().to_ascii_lowercase().as_str() {
            "sl" => Family::Sl,
            "gl" => Family::Gl,
            "so" => Family::SoPq,
            "sp" => Family::Sp,
            other => return Err(NccError::Parse(format!("unknown algebra family `{other}`"))),
        };
        let params = rest
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| NccError::Parse(format!("bad parameter `{p}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AlgebraSpec { family, params })
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::Sl => "sl",
            Family::Gl => "gl",
            Family::SoPq => "so",
            Family::Sp => "sp",
        };
        let params: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
        write!(f, "{}:{}", fam, params.join(","))
    }
}

/// A real matrix Lie algebra with a fixed ordered basis.
///
/// Coordinates are extracted through a precomputed pseudo-inverse of the
/// basis-flattening matrix; a residual above `eq_tol` means the matrix has
/// left the algebra and is reported as a consistency error.
#[derive(Debug)]
pub struct AlgebraDescriptor {
    pub family: Family,
    pub params: Vec<usize>,
    pub defining_dim: usize,
    pub basis: Vec<Matrix>,
    pub basis_names: Vec<String>,
    pub name: String,
    pub tol: Tolerances,
    flatten: Matrix,
    flatten_pinv: Matrix,
    ad_basis: Vec<Matrix>,
    gram: Matrix,
}

pub type Algebra = Arc<AlgebraDescriptor>;

fn unit(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

fn sl_basis(n: usize) -> (Vec<Matrix>, Vec<String>) {
    let mut basis = Vec::new();
    let mut names = Vec::new();
    for i in 0..n - 1 {
        basis.push(unit(n, i, i) - unit(n, i + 1, i + 1));
        names.push(format!("H{}", i + 1));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                basis.push(unit(n, i, j));
                names.push(format!("E{}{}", i + 1, j + 1));
            }
        }
    }
    (basis, names)
}

fn gl_basis(n: usize) -> (Vec<Matrix>, Vec<String>) {
    let mut basis = Vec::new();
    let mut names = Vec::new();
    for i in 0..n {
        for j in 0..n {
            basis.push(unit(n, i, j));
            names.push(format!("E{}{}", i + 1, j + 1));
        }
    }
    (basis, names)
}

/// so(p,q) for the metric diag(1_p, -1_q): rotations inside each signature
/// block, symmetric boosts across the blocks.
fn so_basis(p: usize, q: usize) -> (Vec<Matrix>, Vec<String>) {
    let n = p + q;
    let mut basis = Vec::new();
    let mut names = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if (i < p) == (j < p) {
                basis.push(unit(n, j, i) - unit(n, i, j));
                names.push(format!("R{}{}", i, j));
            } else {
                basis.push(unit(n, i, j) + unit(n, j, i));
                names.push(format!("B{}{}", i, j));
            }
        }
    }
    (basis, names)
}

/// sp_{2n}: [[A, B], [C, -A^T]] with B, C symmetric.
fn sp_basis(two_n: usize) -> (Vec<Matrix>, Vec<String>) {
    let n = two_n / 2;
    let mut basis = Vec::new();
    let mut names = Vec::new();
    for i in 0..n {
        for j in 0..n {
            basis.push(unit(two_n, i, j) - unit(two_n, n + j, n + i));
            names.push(format!("A{}{}", i + 1, j + 1));
        }
    }
    for i in 0..n {
        for j in i..n {
            let mut b = unit(two_n, i, n + j);
            if i != j {
                b += unit(two_n, j, n + i);
            }
            basis.push(b);
            names.push(format!("B{}{}", i + 1, j + 1));
        }
    }
    for i in 0..n {
        for j in i..n {
            let mut c = unit(two_n, n + i, j);
            if i != j {
                c += unit(two_n, n + j, i);
            }
            basis.push(c);
            names.push(format!("C{}{}", i + 1, j + 1));
        }
    }
    (basis, names)
}

fn flatten_matrix(m: &Matrix) -> Vector {
    Vector::from_iterator(m.len(), m.iter().copied())
}

/// Builds a descriptor for one of the classical families with default
/// tolerances.
pub fn build_algebra(family: Family, params: &[usize]) -> Result<Algebra> {
    build_algebra_with(family, params, Tolerances::default())
}

pub fn build_algebra_from_spec(spec: &AlgebraSpec, tol: Tolerances) -> Result<Algebra> {
    build_algebra_with(spec.family, &spec.params, tol)
}

pub fn build_algebra_with(family: Family, params: &[usize], tol: Tolerances) -> Result<Algebra> {
    tol.validate()?;
    let bad = |msg: &str| Err(NccError::Construction(format!("{family:?}{params:?}: {msg}")));
    let (defining_dim, (basis, basis_names), name) = match (family, params) {
        (Family::Sl, [n]) if *n >= 2 => (*n, sl_basis(*n), format!("sl:{n}")),
        (Family::Gl, [n]) if *n >= 2 => (*n, gl_basis(*n), format!("gl:{n}")),
        (Family::SoPq, [p, q]) if *p >= 1 && *q >= 1 => {
            (p + q, so_basis(*p, *q), format!("so:{p},{q}"))
        }
        (Family::Sp, [m]) if *m >= 2 && m % 2 == 0 => (*m, sp_basis(*m), format!("sp:{m}")),
        (Family::Sl, _) | (Family::Gl, _) => return bad("expected a single n >= 2"),
        (Family::SoPq, _) => return bad("expected p, q >= 1"),
        (Family::Sp, _) => return bad("expected an even size 2n >= 2"),
    };
    let dim = basis.len();
    let expected = match family {
        Family::Sl => defining_dim * defining_dim - 1,
        Family::Gl => defining_dim * defining_dim,
        Family::SoPq => defining_dim * (defining_dim - 1) / 2,
        Family::Sp => {
            let n = defining_dim / 2;
            n * (2 * n + 1)
        }
    };
    if dim != expected {
        return Err(NccError::Construction(format!(
            "{name}: basis has {dim} elements, expected {expected}"
        )));
    }
    let mut flatten = Matrix::zeros(defining_dim * defining_dim, dim);
    for (j, b) in basis.iter().enumerate() {
        flatten.set_column(j, &flatten_matrix(b));
    }
    let rank = flatten.clone().svd(false, false).rank(1e-10);
    if rank != dim {
        return Err(NccError::Construction(format!("{name}: basis is linearly dependent")));
    }
    let flatten_pinv = pseudo_inverse(&flatten)?;
    let gram = flatten.transpose() * &flatten;
    let mut alg = AlgebraDescriptor {
        family,
        params: params.to_vec(),
        defining_dim,
        basis,
        basis_names,
        name,
        tol,
        flatten,
        flatten_pinv,
        ad_basis: Vec::new(),
        gram,
    };
    // Structure constants; a bracket leaving the span fails here.
    let mut ad_basis = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut ad = Matrix::zeros(dim, dim);
        for j in 0..dim {
            let br = &alg.basis[i] * &alg.basis[j] - &alg.basis[j] * &alg.basis[i];
            ad.set_column(j, &alg.coords_of(&br)?);
        }
        ad_basis.push(ad);
    }
    alg.ad_basis = ad_basis;
    Ok(Arc::new(alg))
}

impl AlgebraDescriptor {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn spec(&self) -> AlgebraSpec {
        AlgebraSpec {
            family: self.family,
            params: self.params.clone(),
        }
    }

    /// Coordinates of a defining-representation matrix in the basis.
    pub fn coords_of(&self, m: &Matrix) -> Result<Vector> {
        if m.nrows() != self.defining_dim || m.ncols() != self.defining_dim {
            return Err(NccError::Dimension(format!(
                "{}: expected a {}x{} matrix",
                self.name, self.defining_dim, self.defining_dim
            )));
        }
        let flat = flatten_matrix(m);
        let coords = &self.flatten_pinv * &flat;
        let residual = (&self.flatten * &coords - &flat).norm();
        if residual > self.tol.eq_tol * flat.norm().max(1.0) {
            return Err(NccError::Consistency(format!(
                "{}: matrix is off the algebra (residual {residual:.3e})",
                self.name
            )));
        }
        Ok(coords)
    }

    pub fn matrix_of(&self, coords: &Vector) -> Matrix {
        let n = self.defining_dim;
        let flat = &self.flatten * coords;
        Matrix::from_iterator(n, n, flat.iter().copied())
    }

    /// Matrix of `ad(x)` for the coordinate vector `x`.
    pub fn ad_coords(&self, x: &Vector) -> Matrix {
        let d = self.dim();
        let mut out = Matrix::zeros(d, d);
        for (i, c) in x.iter().enumerate() {
            if *c != 0.0 {
                out += &self.ad_basis[i] * *c;
            }
        }
        out
    }

    /// Trace form `tr(x y^T)` on coordinates (the Frobenius Gram matrix of the
    /// basis); positive definite on every family.
    pub fn trace_gram(&self) -> &Matrix {
        &self.gram
    }

    /// Cartan involution `x -> -x^T` as a matrix on coordinates.
    pub fn theta_matrix(&self) -> Result<Matrix> {
        let d = self.dim();
        let mut out = Matrix::zeros(d, d);
        for (j, b) in self.basis.iter().enumerate() {
            out.set_column(j, &self.coords_of(&(-b.transpose()))?);
        }
        Ok(out)
    }

    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.basis_names.iter().position(|n| n == name)
    }
}

/// An element of a given algebra: coordinates plus the cached matrix.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    pub algebra: Algebra,
    pub coords: Vector,
    pub matrix: Matrix,
}

fn same_algebra(a: &Algebra, b: &Algebra) -> Result<()> {
    if Arc::ptr_eq(a, b) || a.name == b.name {
        Ok(())
    } else {
        Err(NccError::Domain(format!(
            "elements live in different algebras ({} vs {})",
            a.name, b.name
        )))
    }
}

impl AlgebraElement {
    pub fn from_coords(algebra: &Algebra, coords: Vector) -> Result<Self> {
        if coords.len() != algebra.dim() {
            return Err(NccError::Dimension(format!(
                "{}: expected {} coordinates, got {}",
                algebra.name,
                algebra.dim(),
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(NccError::Numeric("non-finite coordinates".into()));
        }
        let matrix = algebra.matrix_of(&coords);
        Ok(AlgebraElement {
            algebra: algebra.clone(),
            coords,
            matrix,
        })
    }

    pub fn from_matrix(algebra: &Algebra, m: &Matrix) -> Result<Self> {
        let coords = algebra.coords_of(m)?;
        Self::from_coords(algebra, coords)
    }

    pub fn zero(algebra: &Algebra) -> Self {
        Self::from_coords(algebra, Vector::zeros(algebra.dim())).expect("zero is always valid")
    }

    pub fn basis(algebra: &Algebra, i: usize) -> Self {
        let mut c = Vector::zeros(algebra.dim());
        c[i] = 1.0;
        Self::from_coords(algebra, c).expect("basis index in range")
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_coords(&self.algebra, &self.coords * s).expect("finite scaling")
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn theta(&self) -> Self {
        Self::from_matrix(&self.algebra, &(-self.matrix.transpose()))
            .expect("every family is closed under x -> -x^T")
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_coords(&self.algebra, &self.coords + &rhs.coords)
            .expect("same-dimension sum")
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement::from_coords(&self.algebra, &self.coords - &rhs.coords)
            .expect("same-dimension difference")
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(-1.0)
    }
}

impl Mul<&AlgebraElement> for f64 {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        rhs.scale(self)
    }
}

/// `[x, y] = xy - yx`, returned in basis coordinates.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    same_algebra(&x.algebra, &y.algebra)?;
    let m = &x.matrix * &y.matrix - &y.matrix * &x.matrix;
    AlgebraElement::from_matrix(&x.algebra, &m)
}

/// Matrix of `y -> [x, y]` in the fixed basis.
pub fn ad_matrix(x: &AlgebraElement) -> Matrix {
    x.algebra.ad_coords(&x.coords)
}

/// Cartan-Killing form `tr(ad x ad y)`.
pub fn killing(x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
    same_algebra(&x.algebra, &y.algebra)?;
    Ok((ad_matrix(x) * ad_matrix(y)).trace())
}

/// Element of the identity component, kept together with the exponents
/// whose ordered exponentials produce it. There is deliberately no
/// constructor from an arbitrary matrix.
#[derive(Debug, Clone)]
pub struct GroupElement {
    pub algebra: Algebra,
    pub matrix: Matrix,
    pub inverse: Matrix,
    pub log_factors: Vec<AlgebraElement>,
}

impl GroupElement {
    pub fn identity(algebra: &Algebra) -> Self {
        let n = algebra.defining_dim;
        GroupElement {
            algebra: algebra.clone(),
            matrix: Matrix::identity(n, n),
            inverse: Matrix::identity(n, n),
            log_factors: Vec::new(),
        }
    }

    pub fn exp(x: &AlgebraElement) -> Result<Self> {
        let matrix = expm(&x.matrix)?;
        let inverse = expm(&(-&x.matrix))?;
        Ok(GroupElement {
            algebra: x.algebra.clone(),
            matrix,
            inverse,
            log_factors: vec![x.clone()],
        })
    }

    /// `exp(x_1) exp(x_2) ... exp(x_k)`.
    pub fn from_word(algebra: &Algebra, word: &[AlgebraElement]) -> Result<Self> {
        word.iter().try_fold(Self::identity(algebra), |acc, x| {
            acc.compose(&GroupElement::exp(x)?)
        })
    }

    pub fn compose(&self, other: &GroupElement) -> Result<Self> {
        same_algebra(&self.algebra, &other.algebra)?;
        let mut log_factors = self.log_factors.clone();
        log_factors.extend(other.log_factors.iter().cloned());
        Ok(GroupElement {
            algebra: self.algebra.clone(),
            matrix: &self.matrix * &other.matrix,
            inverse: &other.inverse * &self.inverse,
            log_factors,
        })
    }

    pub fn inverse(&self) -> Self {
        GroupElement {
            algebra: self.algebra.clone(),
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
            log_factors: self.log_factors.iter().rev().map(|x| -x).collect(),
        }
    }

    pub fn det(&self) -> f64 {
        self.matrix.determinant()
    }
}

/// `Ad(g) x = g x g^{-1}` in coordinates. A result off the algebra signals a
/// matrix that is not an automorphism and is a consistency error.
pub fn adjoint_action(g: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    same_algebra(&g.algebra, &x.algebra)?;
    let m = &g.matrix * &x.matrix * &g.inverse;
    AlgebraElement::from_matrix(&x.algebra, &m)
}
