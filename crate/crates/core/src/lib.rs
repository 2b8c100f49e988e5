//! Locally covariant quantum field theory on finite causal sets.
//!
//! Causal sets stand in for spacetimes, finite-dimensional matrix algebras
//! for the observable algebras, and the local-covariance axioms together
//! with their tensor-functor reformulation are checked numerically.

pub mod axioms;
pub mod causet;
pub mod cstar;
pub mod error;
pub mod fixtures;
pub mod functor_ext;
pub mod linalg;
pub mod nets;
pub mod par;
pub mod tensor;

pub use error::{Error, Result};
