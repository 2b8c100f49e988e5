//! Finite-dimensional concrete *-algebras.

mod algebra;
mod classify;
mod hom;
mod rep;

pub use algebra::{commutant, generate_algebra, generate_algebra_capped, AlgebraCheck, StarAlgebra};
pub(crate) use algebra::check_cap;
pub use classify::{classify, Block, Classification};
pub use hom::{check_star_hom, check_star_hom_with, HomReport, StarHom, EXHAUSTIVE_PAIRS};
pub(crate) use hom::kernel_dim;
pub use rep::{faithful_variant, RepAction, Representation};

/// Ambient-dimension cap for generic algebra operations.
pub const GENERIC_MAX_DIM: usize = 64;
/// Residual threshold used while building spans.
pub const BUILD_TOL: f64 = 1e-10;
/// Pass threshold for verification reports.
pub const VERIFY_TOL: f64 = 1e-9;
