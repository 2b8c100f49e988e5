use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::algebra::StarAlgebra;
use super::{BUILD_TOL, VERIFY_TOL};
use crate::error::{Error, Result};
use crate::linalg::{gram_matrix, random_complex, CMatrix, OrthoBasis, C64, ZERO};
use crate::par::{self, Exec};

/// Linear map out of a concrete *-algebra, given by the images of its
/// orthonormal basis. Only the target's ambient dimension is recorded.
#[derive(Clone, Debug)]
pub struct StarHom {
    source: Arc<StarAlgebra>,
    target_dim: usize,
    images: Vec<CMatrix>,
}

impl StarHom {
    pub fn new(source: Arc<StarAlgebra>, target_dim: usize, images: Vec<CMatrix>) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(Error::InvalidHom(format!(
                "{} images for a source of dimension {}",
                images.len(),
                source.dim()
            )));
        }
        if let Some(bad) = images.iter().find(|m| m.dim() != target_dim) {
            return Err(Error::DimensionMismatch { expected: target_dim, found: bad.dim() });
        }
        if images.iter().any(|m| !m.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(StarHom { source, target_dim, images })
    }

    /// Map determined by a matrix function on the source ambient space
    /// (`f` must be linear on the algebra).
    pub fn from_fn(source: Arc<StarAlgebra>, target_dim: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Result<Self> {
        let images = source.basis().iter().map(f).collect();
        StarHom::new(source, target_dim, images)
    }

    pub fn identity(source: Arc<StarAlgebra>) -> Self {
        let d = source.ambient_dim();
        let images = source.basis().to_vec();
        StarHom { source, target_dim: d, images }
    }

    /// Builds a map from prescribed values `x_i ↦ y_i` on a spanning family
    /// of the algebra it generates. Values on linearly dependent inputs are
    /// ignored, so the caller is responsible for consistency.
    pub fn from_pairs(
        ambient: usize,
        generators: Vec<CMatrix>,
        inputs: &[CMatrix],
        outputs: &[CMatrix],
        target_dim: usize,
    ) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(Error::InvalidHom("inputs and outputs differ in length".into()));
        }
        let mut ob = OrthoBasis::new(ambient);
        let mut images: Vec<CMatrix> = Vec::new();
        for (x, y) in inputs.iter().zip(outputs) {
            if y.dim() != target_dim {
                return Err(Error::DimensionMismatch { expected: target_dim, found: y.dim() });
            }
            if let Some((coeffs, norm)) = ob.try_add_tracked(x, BUILD_TOL) {
                let mut z = y.clone();
                for (c, img) in coeffs.iter().zip(&images) {
                    if *c != ZERO {
                        z.axpy(-c, img);
                    }
                }
                images.push(z.scale_real(1.0 / norm));
            }
        }
        let source = Arc::new(StarAlgebra::from_orthonormal(ambient, ob.into_vectors(), generators));
        StarHom::new(source, target_dim, images)
    }

    pub fn source(&self) -> &Arc<StarAlgebra> {
        &self.source
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn images(&self) -> &[CMatrix] {
        &self.images
    }

    /// `Σ_k <e_k, x> α(e_k)`; the component of `x` outside the source span is
    /// discarded.
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let coeffs = self.source.coords(x);
        self.apply_coords(&coeffs)
    }

    pub fn apply_coords(&self, coeffs: &[C64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.target_dim);
        for (c, img) in coeffs.iter().zip(&self.images) {
            if *c != ZERO {
                out.axpy(*c, img);
            }
        }
        out
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &StarHom) -> Result<StarHom> {
        if next.source.ambient_dim() != self.target_dim {
            return Err(Error::DimensionMismatch { expected: self.target_dim, found: next.source.ambient_dim() });
        }
        let images = self.images.iter().map(|y| next.apply(y)).collect();
        Ok(StarHom { source: self.source.clone(), target_dim: next.target_dim, images })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HomReport {
    pub linearity: f64,
    pub unit: f64,
    pub adjoint: f64,
    pub multiplicativity: f64,
    pub kernel_dim: usize,
    /// Number of basis pairs evaluated for multiplicativity.
    pub pairs_checked: usize,
    pub exhaustive: bool,
    pub passed: bool,
    /// Basis indices of the worst multiplicativity pair.
    pub worst_pair: Option<(usize, usize)>,
}

impl HomReport {
    pub fn max_deviation(&self) -> f64 {
        self.linearity.max(self.unit).max(self.adjoint).max(self.multiplicativity)
    }
}

/// Above this many basis pairs multiplicativity is checked on a seeded sample.
pub const EXHAUSTIVE_PAIRS: usize = 4096;

pub fn check_star_hom(h: &StarHom) -> HomReport {
    check_star_hom_with(h, Exec::default())
}

/// Deviations are measured in operator norm and divided by the operator
/// norms of the basis elements involved, so they are scale invariant.
pub fn check_star_hom_with(h: &StarHom, exec: Exec) -> HomReport {
    let src = &h.source;
    let n = src.dim();
    let basis = src.basis();
    let norms: Vec<f64> = par::map_indexed(exec, n, |k| basis[k].norm_unchecked().max(f64::MIN_POSITIVE));

    let mut rng = ChaCha8Rng::seed_from_u64(0x4f3a);
    let mut linearity: f64 = 0.0;
    if n > 0 {
        for _ in 0..8 {
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            let (a, b) = (random_complex(&mut rng), random_complex(&mut rng));
            let mut x = basis[i].scale(a);
            x.axpy(b, &basis[j]);
            let mut expect = h.images[i].scale(a);
            expect.axpy(b, &h.images[j]);
            let scale = x.norm_unchecked().max(1e-300);
            linearity = linearity.max((&h.apply(&x) - &expect).norm_unchecked() / scale);
        }
    }

    let id_src = CMatrix::identity(src.ambient_dim());
    let unit = if src.residual(&id_src) > VERIFY_TOL {
        f64::INFINITY
    } else {
        (&h.apply(&id_src) - &CMatrix::identity(h.target_dim)).norm_unchecked()
    };

    let adjoint = par::map_indexed(exec, n, |k| {
        (&h.apply(&basis[k].adjoint()) - &h.images[k].adjoint()).norm_unchecked() / norms[k]
    })
    .into_iter()
    .fold(0.0, f64::max);

    let exhaustive = n * n <= EXHAUSTIVE_PAIRS;
    let pairs: Vec<(usize, usize)> = if exhaustive {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    } else {
        (0..EXHAUSTIVE_PAIRS).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect()
    };
    let devs = par::map_indexed(exec, pairs.len(), |p| {
        let (i, j) = pairs[p];
        let lhs = h.apply(&(&basis[i] * &basis[j]));
        let rhs = &h.images[i] * &h.images[j];
        (&lhs - &rhs).norm_unchecked() / (norms[i] * norms[j])
    });
    let (mut multiplicativity, mut worst_pair) = (0.0, None);
    for (p, d) in devs.into_iter().enumerate() {
        if d > multiplicativity || d.is_nan() {
            multiplicativity = d;
            worst_pair = Some(pairs[p]);
        }
    }

    let kernel_dim = kernel_dim(&h.images);
    let passed = kernel_dim == 0 && [linearity, unit, adjoint, multiplicativity].iter().all(|d| *d <= VERIFY_TOL);
    HomReport { linearity, unit, adjoint, multiplicativity, kernel_dim, pairs_checked: pairs.len(), exhaustive, passed, worst_pair }
}

/// Dimension of the kernel: the images of an orthonormal basis are compared
/// through their Gram matrix.
pub(crate) fn kernel_dim(images: &[CMatrix]) -> usize {
    if images.is_empty() {
        return 0;
    }
    let ev = gram_matrix(images).symmetric_eigenvalues();
    ev.iter().filter(|&&v| v.max(0.0).sqrt() <= 1e-8).count()
}
