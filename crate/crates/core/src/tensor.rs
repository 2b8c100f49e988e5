//! Minimal tensor norm: Kronecker realizations, min-norm evaluation and
//! tensor products of homomorphisms.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::cstar::{check_cap, Representation, StarAlgebra, StarHom, VERIFY_TOL};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::par::{self, Exec};

/// Default cap on Kronecker-product dimensions.
pub const KRON_MAX_DIM: usize = 4096;

pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    kron_capped(a, b, KRON_MAX_DIM)
}

pub fn kron_capped(a: &CMatrix, b: &CMatrix, cap: usize) -> Result<CMatrix> {
    check_cap(a.dim() * b.dim(), cap)?;
    Ok(a.kron(b))
}

/// Finite sum `Σ A_n ⊗ B_n` of elementary tensors over two concrete algebras.
#[derive(Clone, Debug)]
pub struct TensorElement {
    left: Arc<StarAlgebra>,
    right: Arc<StarAlgebra>,
    terms: Vec<(CMatrix, CMatrix)>,
}

impl TensorElement {
    pub fn new(left: Arc<StarAlgebra>, right: Arc<StarAlgebra>, terms: Vec<(CMatrix, CMatrix)>) -> Result<Self> {
        for (a, b) in &terms {
            for (x, alg) in [(a, &left), (b, &right)] {
                if x.dim() != alg.ambient_dim() {
                    return Err(Error::DimensionMismatch { expected: alg.ambient_dim(), found: x.dim() });
                }
                if !x.is_finite() {
                    return Err(Error::NonFinite);
                }
                let residual = alg.residual(x);
                if residual > VERIFY_TOL {
                    return Err(Error::NotInAlgebra { residual });
                }
            }
        }
        Ok(TensorElement { left, right, terms })
    }

    /// `N` terms with Gaussian coefficients over each algebra's basis.
    pub fn random<R: Rng + ?Sized>(left: Arc<StarAlgebra>, right: Arc<StarAlgebra>, n_terms: usize, rng: &mut R) -> Self {
        let terms = (0..n_terms).map(|_| (left.random_element(rng), right.random_element(rng))).collect();
        TensorElement { left, right, terms }
    }

    pub fn left(&self) -> &Arc<StarAlgebra> {
        &self.left
    }

    pub fn right(&self) -> &Arc<StarAlgebra> {
        &self.right
    }

    pub fn terms(&self) -> &[(CMatrix, CMatrix)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn adjoint(&self) -> Self {
        let terms = self.terms.iter().map(|(a, b)| (a.adjoint(), b.adjoint())).collect();
        TensorElement { left: self.left.clone(), right: self.right.clone(), terms }
    }

    pub fn mul(&self, other: &TensorElement) -> Self {
        let terms = self
            .terms
            .iter()
            .flat_map(|(a, b)| other.terms.iter().map(move |(c, d)| (a * c, b * d)))
            .collect();
        TensorElement { left: self.left.clone(), right: self.right.clone(), terms }
    }

    pub fn add(&self, other: &TensorElement) -> Self {
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        TensorElement { left: self.left.clone(), right: self.right.clone(), terms }
    }

    pub fn scale(&self, s: crate::linalg::C64) -> Self {
        let terms = self.terms.iter().map(|(a, b)| (a.scale(s), b.clone())).collect();
        TensorElement { left: self.left.clone(), right: self.right.clone(), terms }
    }

    /// `Σ π₁(A_n) ⊗ π₂(B_n)`.
    pub fn realize(&self, pi1: &Representation, pi2: &Representation, cap: usize) -> Result<CMatrix> {
        let dim = pi1.rep_dim() * pi2.rep_dim();
        check_cap(dim, cap)?;
        let mut out = CMatrix::zeros(dim);
        for (a, b) in &self.terms {
            out = &out + &pi1.apply(a).kron(&pi2.apply(b));
        }
        Ok(out)
    }

    /// `Σ A_n ⊗ B_n` in the defining representations.
    pub fn realize_identity(&self) -> Result<CMatrix> {
        let (p1, p2) = (Representation::identity(self.left.clone()), Representation::identity(self.right.clone()));
        self.realize(&p1, &p2, KRON_MAX_DIM)
    }
}

/// `‖(π₁ ⊗ π₂)(t)‖` for faithful `π₁`, `π₂`.
pub fn min_norm(t: &TensorElement, pi1: &Representation, pi2: &Representation) -> Result<f64> {
    min_norm_capped(t, pi1, pi2, KRON_MAX_DIM)
}

pub fn min_norm_capped(t: &TensorElement, pi1: &Representation, pi2: &Representation, cap: usize) -> Result<f64> {
    for pi in [pi1, pi2] {
        if !pi.is_faithful() {
            let kernel_dim = crate::cstar::kernel_dim(pi.to_hom().images());
            return Err(Error::NotFaithful { kernel_dim });
        }
    }
    if pi1.algebra().ambient_dim() != t.left.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: t.left.ambient_dim(), found: pi1.algebra().ambient_dim() });
    }
    if pi2.algebra().ambient_dim() != t.right.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: t.right.ambient_dim(), found: pi2.algebra().ambient_dim() });
    }
    if t.is_empty() {
        return Ok(0.0);
    }
    t.realize(pi1, pi2, cap)?.operator_norm()
}

/// Min norm computed in the defining representations.
pub fn min_norm_default(t: &TensorElement) -> Result<f64> {
    if t.is_empty() {
        return Ok(0.0);
    }
    t.realize_identity()?.operator_norm()
}

/// Product basis `{e_i ⊗ f_j}` (left index major) of the Kronecker-realized
/// tensor product.
pub fn tensor_algebra(a: &StarAlgebra, b: &StarAlgebra) -> Result<StarAlgebra> {
    let dim = a.ambient_dim() * b.ambient_dim();
    check_cap(dim, KRON_MAX_DIM)?;
    let basis = a.basis().iter().flat_map(|e| b.basis().iter().map(move |f| e.kron(f))).collect();
    let (ia, ib) = (CMatrix::identity(a.ambient_dim()), CMatrix::identity(b.ambient_dim()));
    let generators = a
        .generators()
        .iter()
        .map(|g| g.kron(&ib))
        .chain(b.generators().iter().map(|h| ia.kron(h)))
        .collect();
    Ok(StarAlgebra::from_orthonormal(dim, basis, generators))
}

/// `α₁ ⊗ α₂` on the product basis.
pub fn tensor_hom(h1: &StarHom, h2: &StarHom) -> Result<StarHom> {
    let source = Arc::new(tensor_algebra(h1.source(), h2.source())?);
    let target_dim = h1.target_dim() * h2.target_dim();
    check_cap(target_dim, KRON_MAX_DIM)?;
    let images = h1.images().iter().flat_map(|y| h2.images().iter().map(move |z| y.kron(z))).collect();
    StarHom::new(source, target_dim, images)
}

#[derive(Clone, Debug, Serialize)]
pub struct IsometrySample {
    pub index: usize,
    pub terms: usize,
    pub source_norm: f64,
    pub image_norm: f64,
    pub deviation: f64,
}

/// Max over seeded random elements `t` (0 to 4 terms) of
/// `|‖(α₁⊗α₂)(t)‖ - ‖t‖| / max(1, ‖t‖)`, both norms minimal. The image norm
/// uses the inclusion of the image algebras in the target ambient spaces.
pub fn verify_hom_isometry(h1: &StarHom, h2: &StarHom, samples: usize, seed: u64) -> Result<f64> {
    Ok(hom_isometry_samples(h1, h2, samples, seed, Exec::default())?
        .iter()
        .map(|s| s.deviation)
        .fold(0.0, f64::max))
}

pub fn hom_isometry_samples(h1: &StarHom, h2: &StarHom, samples: usize, seed: u64, exec: Exec) -> Result<Vec<IsometrySample>> {
    check_cap(h1.source().ambient_dim() * h2.source().ambient_dim(), KRON_MAX_DIM)?;
    check_cap(h1.target_dim() * h2.target_dim(), KRON_MAX_DIM)?;
    par::try_map_indexed(exec, samples, |i| {
        let mut rng = par::sample_rng(seed, i as u64);
        let n = rng.random_range(0..=4);
        let t = TensorElement::random(h1.source().clone(), h2.source().clone(), n, &mut rng);
        let source_norm = min_norm_default(&t)?;
        let image_norm = if t.is_empty() {
            0.0
        } else {
            let mut m = CMatrix::zeros(h1.target_dim() * h2.target_dim());
            for (a, b) in t.terms() {
                m = &m + &h1.apply(a).kron(&h2.apply(b));
            }
            m.operator_norm()?
        };
        let deviation = (image_norm - source_norm).abs() / source_norm.max(1.0);
        Ok(IsometrySample { index: i, terms: n, source_norm, image_norm, deviation })
    })
}
