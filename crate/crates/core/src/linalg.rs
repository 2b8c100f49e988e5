//! Dense complex matrices and the handful of numerical kernels the engine
//! needs: spectral norms, Hilbert-Schmidt geometry, Hermitian null spaces
//! and seeded Haar-like unitaries.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix acting on `C^dim`.
#[derive(Clone, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix({}x{})", self.dim(), self.dim())?;
        if self.dim() <= 4 {
            for r in 0..self.dim() {
                write!(f, "\n  ")?;
                for c in 0..self.dim() {
                    let z = self.0[(r, c)];
                    write!(f, "{:>8.4}{:+.4}i ", z.re, z.im)?;
                }
            }
        }
        Ok(())
    }
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        CMatrix(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMatrix(DMatrix::from_fn(dim, dim, f))
    }

    /// Builds a matrix from real row-major data.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let d = rows.len();
        assert!(rows.iter().all(|r| r.len() == d), "rows must form a square matrix");
        Self::from_fn(d, |r, c| C64::new(rows[r][c], 0.0))
    }

    /// Matrix unit `|row><col|`.
    pub fn unit(dim: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.0[(row, col)] = ONE;
        m
    }

    pub fn from_inner(m: DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "CMatrix must be square");
        CMatrix(m)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.0[(row, col)] = value;
    }

    /// Column-major entries.
    pub fn as_slice(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        self.0.as_mut_slice()
    }

    pub fn adjoint(&self) -> Self {
        CMatrix(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        CMatrix(self.0.transpose())
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: C64, other: &CMatrix) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.as_mut_slice().iter_mut().zip(other.as_slice()) {
            *a += s * b;
        }
    }

    pub fn commutator(&self, other: &CMatrix) -> CMatrix {
        &(self * other) - &(other * self)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Hilbert-Schmidt inner product `tr(self^* other)`.
    pub fn hs_inner(&self, other: &CMatrix) -> C64 {
        hs_inner_slices(self.as_slice(), other.as_slice())
    }

    pub fn hs_norm(&self) -> f64 {
        self.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> Result<f64> {
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(self.norm_unchecked())
    }

    pub(crate) fn norm_unchecked(&self) -> f64 {
        match self.dim() {
            0 => 0.0,
            1 => self.0[(0, 0)].norm(),
            _ => {
                let sv = self.0.clone().singular_values();
                sv.iter().cloned().fold(0.0, f64::max)
            }
        }
    }

    /// Standard Kronecker product, `self` acting on the leading factor.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        CMatrix(self.0.kronecker(&other.0))
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &CMatrix) -> CMatrix {
        let (a, b) = (self.dim(), other.dim());
        let mut out = CMatrix::zeros(a + b);
        out.0.view_mut((0, 0), (a, a)).copy_from(&self.0);
        out.0.view_mut((a, a), (b, b)).copy_from(&other.0);
        out
    }

    pub fn approx_eq(&self, other: &CMatrix, tol: f64) -> bool {
        self.dim() == other.dim() && (self - other).max_abs() <= tol
    }
}

pub(crate) fn hs_inner_slices(a: &[C64], b: &[C64]) -> C64 {
    let mut acc = ZERO;
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

/// Wire format: `{"dim": d, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for CMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let rows = |f: fn(C64) -> f64| -> Vec<Vec<f64>> {
            (0..d).map(|r| (0..d).map(|c| f(self.0[(r, c)])).collect()).collect()
        };
        MatrixJson { dim: d, re: rows(|z| z.re), im: rows(|z| z.im) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(d)?;
        let n = raw.dim;
        let well_formed = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !well_formed(&raw.re) || !well_formed(&raw.im) {
            return Err(D::Error::custom(format!("matrix rows do not match dim {n}")));
        }
        let m = CMatrix::from_fn(n, |r, c| C64::new(raw.re[r][c], raw.im[r][c]));
        if !m.is_finite() {
            return Err(D::Error::custom("matrix has non-finite entries"));
        }
        Ok(m)
    }
}

/// Incrementally built Hilbert-Schmidt orthonormal family of matrices.
#[derive(Clone, Debug)]
pub struct OrthoBasis {
    dim: usize,
    vectors: Vec<CMatrix>,
}

impl OrthoBasis {
    pub fn new(dim: usize) -> Self {
        OrthoBasis { dim, vectors: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[CMatrix] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<CMatrix> {
        self.vectors
    }

    /// Coefficients of the orthogonal projection of `m` onto the span.
    pub fn coords(&self, m: &CMatrix) -> Vec<C64> {
        self.vectors.iter().map(|v| v.hs_inner(m)).collect()
    }

    /// Component of `m` orthogonal to the span (two passes of Gram-Schmidt).
    pub fn residual(&self, m: &CMatrix) -> CMatrix {
        let mut r = m.clone();
        for _ in 0..2 {
            for v in &self.vectors {
                let c = v.hs_inner(&r);
                if c != ZERO {
                    r.axpy(-c, v);
                }
            }
        }
        r
    }

    /// Adds `m` if its normalized residual exceeds `tol`; reports whether it
    /// was added.
    pub fn try_add(&mut self, m: &CMatrix, tol: f64) -> bool {
        self.try_add_tracked(m, tol).is_some()
    }

    /// Like [`try_add`](Self::try_add) but reports how the new vector is
    /// expressed: `new = (m - sum_k c_k v_k) / norm`. Returns `(c, norm)`.
    pub(crate) fn try_add_tracked(&mut self, m: &CMatrix, tol: f64) -> Option<(Vec<C64>, f64)> {
        assert_eq!(m.dim(), self.dim, "matrix dimension does not match basis");
        let scale = m.hs_norm();
        if scale == 0.0 {
            return None;
        }
        let mut r = m.clone();
        let mut coeffs = vec![ZERO; self.vectors.len()];
        for _ in 0..2 {
            for (k, v) in self.vectors.iter().enumerate() {
                let c = v.hs_inner(&r);
                if c != ZERO {
                    r.axpy(-c, v);
                    coeffs[k] += c;
                }
            }
        }
        let norm = r.hs_norm();
        if norm <= tol * scale {
            return None;
        }
        self.vectors.push(r.scale_real(1.0 / norm));
        Some((coeffs, norm))
    }
}

/// Orthonormal null space of a Hermitian positive semidefinite matrix,
/// keeping eigenvectors whose eigenvalue is at most `tol`.
pub(crate) fn psd_null_space(k: DMatrix<C64>, tol: f64) -> Vec<nalgebra::DVector<C64>> {
    let n = k.nrows();
    if n == 0 {
        return Vec::new();
    }
    let eig = k.symmetric_eigen();
    (0..n)
        .filter(|&i| eig.eigenvalues[i] <= tol)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect()
}

/// Numerical rank of a Gram matrix: number of eigenvalues above
/// `rel_tol * max(1, largest)`.
pub(crate) fn gram_rank(gram: DMatrix<C64>, rel_tol: f64) -> usize {
    if gram.nrows() == 0 {
        return 0;
    }
    let ev = gram.symmetric_eigenvalues();
    let top = ev.iter().cloned().fold(0.0, f64::max).max(1.0);
    ev.iter().filter(|&&v| v > rel_tol * top).count()
}

pub(crate) fn gram_matrix(vectors: &[CMatrix]) -> DMatrix<C64> {
    let n = vectors.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = vectors[i].hs_inner(&vectors[j]);
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    g
}

pub fn random_gaussian_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Unitary from the QR factorization of a complex Gaussian matrix, with the
/// phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = random_gaussian_matrix(dim, rng);
    let qr = g.0.qr();
    let (mut q, r) = qr.unpack();
    for c in 0..dim {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for row in 0..dim {
            q[(row, c)] *= phase;
        }
    }
    CMatrix(q)
}
