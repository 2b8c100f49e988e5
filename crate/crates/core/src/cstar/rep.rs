use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::algebra::StarAlgebra;
use super::hom::{kernel_dim, StarHom};
use crate::linalg::{random_unitary, CMatrix};

#[derive(Clone, Debug)]
pub enum RepAction {
    /// The defining representation on the ambient space.
    Identity,
    /// `X ↦ U (X ⊕ X) U*`.
    DoubledConjugated { unitary: CMatrix },
    Hom(StarHom),
}

/// Representation of a concrete algebra on `C^rep_dim`.
#[derive(Clone, Debug)]
pub struct Representation {
    algebra: Arc<StarAlgebra>,
    rep_dim: usize,
    action: RepAction,
    faithful: bool,
}

impl Representation {
    pub fn identity(algebra: Arc<StarAlgebra>) -> Self {
        let rep_dim = algebra.ambient_dim();
        Representation { algebra, rep_dim, action: RepAction::Identity, faithful: true }
    }

    /// Wraps a homomorphism; faithfulness is decided by the kernel test.
    pub fn from_hom(h: StarHom) -> Self {
        let faithful = kernel_dim(h.images()) == 0;
        Representation { algebra: h.source().clone(), rep_dim: h.target_dim(), action: RepAction::Hom(h), faithful }
    }

    pub fn algebra(&self) -> &Arc<StarAlgebra> {
        &self.algebra
    }

    pub fn rep_dim(&self) -> usize {
        self.rep_dim
    }

    pub fn action(&self) -> &RepAction {
        &self.action
    }

    pub fn is_faithful(&self) -> bool {
        self.faithful
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        match &self.action {
            RepAction::Identity => x.clone(),
            RepAction::DoubledConjugated { unitary } => &(unitary * &x.direct_sum(x)) * &unitary.adjoint(),
            RepAction::Hom(h) => h.apply(x),
        }
    }

    /// The representation as a homomorphism on the algebra's basis.
    pub fn to_hom(&self) -> StarHom {
        match &self.action {
            RepAction::Hom(h) => h.clone(),
            _ => StarHom::from_fn(self.algebra.clone(), self.rep_dim, |x| self.apply(x))
                .expect("representation images have the declared dimension"),
        }
    }
}

/// `π(X) = U (X ⊕ X) U*` with `U` a seeded pseudorandom unitary.
pub fn faithful_variant(a: Arc<StarAlgebra>, seed: u64) -> Representation {
    let d = a.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unitary = random_unitary(2 * d, &mut rng);
    let action = RepAction::DoubledConjugated { unitary };
    let mut rep = Representation { algebra: a, rep_dim: 2 * d, action, faithful: false };
    rep.faithful = kernel_dim(rep.to_hom().images()) == 0;
    rep
}
