use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{BUILD_TOL, GENERIC_MAX_DIM};
use crate::error::{Error, Result};
use crate::linalg::{self, gram_matrix, random_complex, CMatrix, OrthoBasis, C64, ONE, ZERO};

/// Concrete unital *-subalgebra of `M_d(C)`, stored as a Hilbert-Schmidt
/// orthonormal basis of its linear span plus a generating set.
#[derive(Clone, Debug)]
pub struct StarAlgebra {
    ambient: usize,
    basis: Vec<CMatrix>,
    generators: Vec<CMatrix>,
}

impl StarAlgebra {
    /// `C·1` inside `M_d`.
    pub fn scalars(ambient: usize) -> Self {
        let basis = vec![CMatrix::identity(ambient).scale_real(1.0 / (ambient as f64).sqrt())];
        StarAlgebra { ambient, basis, generators: Vec::new() }
    }

    /// All of `M_d`, with the matrix-unit basis.
    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .flat_map(|c| (0..ambient).map(move |r| (r, c)))
            .map(|(r, c)| CMatrix::unit(ambient, r, c))
            .collect();
        let generators = (0..ambient.saturating_sub(1)).map(|i| CMatrix::unit(ambient, i, i + 1)).collect();
        StarAlgebra { ambient, basis, generators }
    }

    /// Trusted constructor: `basis` must already be orthonormal and span a
    /// unital *-algebra generated by `generators`.
    pub(crate) fn from_orthonormal(ambient: usize, basis: Vec<CMatrix>, generators: Vec<CMatrix>) -> Self {
        StarAlgebra { ambient, basis, generators }
    }

    /// Orthonormalizes `elements`, which must span a unital *-algebra.
    pub(crate) fn from_spanning(ambient: usize, elements: &[CMatrix], generators: Vec<CMatrix>) -> Self {
        let mut ob = OrthoBasis::new(ambient);
        for e in elements {
            ob.try_add(e, BUILD_TOL);
        }
        StarAlgebra { ambient, basis: ob.into_vectors(), generators }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Linear dimension.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient * self.ambient
    }

    /// Generators closed under adjoint, each scaled to unit HS norm. Falls
    /// back to the basis when no generators were recorded.
    pub(crate) fn star_generators(&self) -> Vec<CMatrix> {
        let src: &[CMatrix] = if self.generators.is_empty() && self.dim() > 1 { &self.basis } else { &self.generators };
        let mut out = Vec::with_capacity(2 * src.len());
        for g in src {
            let n = g.hs_norm();
            if n == 0.0 {
                continue;
            }
            let g = g.scale_real(1.0 / n);
            let ga = g.adjoint();
            let self_adjoint = (&g - &ga).max_abs() <= 1e-14;
            out.push(g);
            if !self_adjoint {
                out.push(ga);
            }
        }
        out
    }

    /// Coefficients of the orthogonal projection onto the span.
    pub fn coords(&self, x: &CMatrix) -> Vec<C64> {
        self.basis.iter().map(|e| e.hs_inner(x)).collect()
    }

    pub fn combine(&self, coeffs: &[C64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.ambient);
        for (c, e) in coeffs.iter().zip(&self.basis) {
            if *c != ZERO {
                out.axpy(*c, e);
            }
        }
        out
    }

    pub fn project(&self, x: &CMatrix) -> CMatrix {
        self.combine(&self.coords(x))
    }

    /// `‖x - P x‖ / ‖x‖` in Hilbert-Schmidt norm (0 for `x = 0`).
    pub fn residual(&self, x: &CMatrix) -> f64 {
        if x.dim() != self.ambient {
            return f64::INFINITY;
        }
        let n = x.hs_norm();
        if n == 0.0 || self.is_full() {
            return 0.0;
        }
        (x - &self.project(x)).hs_norm() / n
    }

    pub fn contains(&self, x: &CMatrix, tol: f64) -> bool {
        self.residual(x) <= tol
    }

    /// Largest residual of `other`'s basis inside `self`: zero iff
    /// `span(other) ⊆ span(self)`.
    pub fn containment_residual(&self, other: &StarAlgebra) -> f64 {
        if other.ambient != self.ambient {
            return f64::INFINITY;
        }
        other.basis.iter().map(|b| self.residual(b)).fold(0.0, f64::max)
    }

    /// Mutual-projection residual of the two spans.
    pub fn span_distance(&self, other: &StarAlgebra) -> f64 {
        self.containment_residual(other).max(other.containment_residual(self))
    }

    /// Gaussian coefficients over the orthonormal basis.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> CMatrix {
        let coeffs: Vec<C64> = (0..self.dim()).map(|_| random_complex(rng)).collect();
        self.combine(&coeffs)
    }

    /// Numerical audit of the *-algebra invariants.
    pub fn validate(&self) -> AlgebraCheck {
        let d = self.ambient;
        let identity_residual = self.residual(&CMatrix::identity(d));
        let adjoint_residual = self.basis.iter().map(|b| self.residual(&b.adjoint())).fold(0.0, f64::max);
        let n = self.dim();
        let pairs: Vec<(usize, usize)> = if n * n <= 4096 {
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..4096).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect()
        };
        let product_residual =
            pairs.iter().map(|&(i, j)| self.residual(&(&self.basis[i] * &self.basis[j]))).fold(0.0, f64::max);
        let g = gram_matrix(&self.basis);
        let orthonormality = (g - DMatrix::identity(n, n)).iter().fold(0.0, |m: f64, z| m.max(z.norm()));
        AlgebraCheck { identity_residual, adjoint_residual, product_residual, orthonormality }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraCheck {
    pub identity_residual: f64,
    pub adjoint_residual: f64,
    pub product_residual: f64,
    pub orthonormality: f64,
}

impl AlgebraCheck {
    pub fn max_deviation(&self) -> f64 {
        self.identity_residual.max(self.adjoint_residual).max(self.product_residual).max(self.orthonormality)
    }
}

pub(crate) fn check_cap(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        Err(Error::MaxDimExceeded { dim, cap })
    } else {
        Ok(())
    }
}

/// Smallest unital *-algebra in `M_d` containing `gens`.
pub fn generate_algebra(dim: usize, gens: &[CMatrix]) -> Result<StarAlgebra> {
    generate_algebra_capped(dim, gens, GENERIC_MAX_DIM)
}

pub fn generate_algebra_capped(dim: usize, gens: &[CMatrix], cap: usize) -> Result<StarAlgebra> {
    check_cap(dim, cap)?;
    for g in gens {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
        }
        if !g.is_finite() {
            return Err(Error::NonFinite);
        }
    }
    let proto = StarAlgebra::from_orthonormal(dim, Vec::new(), gens.to_vec());
    let letters = proto.star_generators();
    let mut ob = OrthoBasis::new(dim);
    ob.try_add(&CMatrix::identity(dim), BUILD_TOL);
    // Words in the generators, built by left multiplication, span the algebra.
    let mut next = 0;
    while next < ob.len() {
        let word = ob.vectors()[next].clone();
        for g in &letters {
            ob.try_add(&(g * &word), BUILD_TOL);
        }
        next += 1;
    }
    Ok(StarAlgebra::from_orthonormal(dim, ob.into_vectors(), gens.to_vec()))
}

/// Adds `s · (a ⊗ b)` into `k` (Kronecker index convention of nalgebra).
fn add_kron(k: &mut DMatrix<C64>, s: C64, a: &CMatrix, b: &CMatrix) {
    let (da, db) = (a.dim(), b.dim());
    for i in 0..da {
        for j in 0..da {
            let aij = a.get(i, j) * s;
            if aij == ZERO {
                continue;
            }
            for p in 0..db {
                for q in 0..db {
                    let bpq = b.get(p, q);
                    if bpq != ZERO {
                        k[(i * db + p, j * db + q)] += aij * bpq;
                    }
                }
            }
        }
    }
}

/// Null-space threshold on eigenvalues of the (unit-normalized) commutator
/// Gram operator, i.e. singular values below ~3e-6.
const NULL_EIG_TOL: f64 = 1e-11;

/// `{X : XB = BX for all B in A}`.
pub fn commutant(a: &StarAlgebra) -> Result<StarAlgebra> {
    let d = a.ambient_dim();
    check_cap(d, GENERIC_MAX_DIM)?;
    let gens = a.star_generators();
    if gens.is_empty() {
        return Ok(StarAlgebra::full(d));
    }
    // With L_g vec(X) = vec(Xg - gX) = (gᵀ⊗1 - 1⊗g) vec(X), accumulate
    // K = Σ L_g* L_g = S1⊗1 + 1⊗S2 - Σ (ḡ⊗g + gᵀ⊗g*).
    let id = CMatrix::identity(d);
    let mut s1 = CMatrix::zeros(d);
    let mut s2 = CMatrix::zeros(d);
    let mut k = DMatrix::zeros(d * d, d * d);
    for g in &gens {
        let gt = g.transpose();
        let gbar = gt.adjoint();
        s1 = &s1 + &(&gbar * &gt);
        s2 = &s2 + &(&g.adjoint() * g);
        add_kron(&mut k, -ONE, &gbar, g);
        add_kron(&mut k, -ONE, &gt, &g.adjoint());
    }
    add_kron(&mut k, ONE, &s1, &id);
    add_kron(&mut k, ONE, &id, &s2);
    let null = linalg::psd_null_space(k, NULL_EIG_TOL);
    let mut ob = OrthoBasis::new(d);
    for v in &null {
        ob.try_add(&CMatrix::from_inner(DMatrix::from_column_slice(d, d, v.as_slice())), BUILD_TOL);
    }
    let basis = ob.into_vectors();
    Ok(StarAlgebra::from_orthonormal(d, basis, Vec::new()))
}

/// Coordinates (in `a`'s basis) spanning the center `A ∩ A'`.
pub(crate) fn center_coords(a: &StarAlgebra) -> Vec<Vec<C64>> {
    let n = a.dim();
    let gens = a.star_generators();
    let mut k = DMatrix::<C64>::zeros(n, n);
    for g in &gens {
        let cols: Vec<CMatrix> = a.basis().iter().map(|e| e.commutator(g)).collect();
        for i in 0..n {
            for j in i..n {
                let v = cols[i].hs_inner(&cols[j]);
                k[(i, j)] += v;
                if i != j {
                    k[(j, i)] += v.conj();
                }
            }
        }
    }
    linalg::psd_null_space(k, NULL_EIG_TOL).into_iter().map(|v| v.iter().cloned().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> CMatrix {
        CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    fn e12() -> CMatrix {
        CMatrix::unit(2, 0, 1)
    }

    #[test]
    fn generate_examples() {
        assert_eq!(generate_algebra(2, &[]).unwrap().dim(), 1);
        let ax = generate_algebra(2, &[x()]).unwrap();
        assert_eq!(ax.dim(), 2);
        assert!(ax.contains(&CMatrix::identity(2), 1e-12));
        assert!(ax.contains(&x(), 1e-12));
        assert!(!ax.contains(&e12(), 1e-3));
        assert_eq!(generate_algebra(2, &[e12()]).unwrap().dim(), 4);
    }

    #[test]
    fn generate_errors() {
        assert!(matches!(generate_algebra(2, &[CMatrix::identity(3)]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(generate_algebra(65, &[]), Err(Error::MaxDimExceeded { .. })));
    }

    #[test]
    fn generated_algebras_validate() {
        let a = generate_algebra(3, &[CMatrix::unit(3, 0, 1), CMatrix::unit(3, 2, 2)]).unwrap();
        assert!(a.validate().max_deviation() <= 1e-10);
        assert_eq!(a.dim(), 5);
    }

    /// Independent null-space oracle: Gaussian elimination (complete
    /// pivoting) on the stacked commutator system, counting free variables.
    fn nullity_oracle(gens: &[CMatrix]) -> usize {
        let d = gens[0].dim();
        let n = d * d;
        let mut rows: Vec<Vec<C64>> = Vec::new();
        for g in gens {
            for r in 0..d {
                for c in 0..d {
                    // entry (r,c) of Xg - gX as a linear form in X[a,b]
                    let mut row = vec![ZERO; n];
                    for k in 0..d {
                        row[r * d + k] += g.get(k, c);
                        row[k * d + c] -= g.get(r, k);
                    }
                    rows.push(row);
                }
            }
        }
        let mut rank = 0;
        let mut col = 0;
        while col < n && rank < rows.len() {
            let piv = (rank..rows.len()).max_by(|&a, &b| rows[a][col].norm().total_cmp(&rows[b][col].norm())).unwrap();
            if rows[piv][col].norm() < 1e-9 {
                col += 1;
                continue;
            }
            rows.swap(rank, piv);
            let p = rows[rank][col];
            let pivot = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                let f = row[col] / p;
                if i != rank && f != ZERO {
                    for (x, v) in row.iter_mut().zip(&pivot).take(n) {
                        *x -= f * v;
                    }
                }
            }
            rank += 1;
            col += 1;
        }
        n - rank
    }

    #[test]
    fn commutant_examples() {
        let m2 = StarAlgebra::full(2);
        assert_eq!(commutant(&m2).unwrap().dim(), 1);

        let ax = generate_algebra(2, &[x()]).unwrap();
        let c = commutant(&ax).unwrap();
        assert_eq!(c.dim(), nullity_oracle(&[x()]));
        assert_eq!(c.dim(), 2);
        assert!(c.span_distance(&ax) <= 1e-10);

        let e = CMatrix::unit(2, 0, 1);
        let gens = vec![e.kron(&CMatrix::identity(2)), e.adjoint().kron(&CMatrix::identity(2))];
        let amp = generate_algebra(4, &gens).unwrap();
        let c = commutant(&amp).unwrap();
        assert_eq!(c.dim(), nullity_oracle(&gens));
        assert_eq!(c.dim(), 4);
        let expected = generate_algebra(4, &[CMatrix::identity(2).kron(&e)]).unwrap();
        assert!(c.span_distance(&expected) <= 1e-10);
    }

    #[test]
    fn scalars_commutant_is_everything() {
        assert_eq!(commutant(&StarAlgebra::scalars(3)).unwrap().dim(), 9);
    }
}
