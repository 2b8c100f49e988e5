use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::algebra::{center_coords, check_cap, StarAlgebra};
use super::GENERIC_MAX_DIM;
use crate::error::{Error, Result};
use crate::linalg::{gram_matrix, gram_rank, random_complex, CMatrix, C64};

/// One simple summand `M_k ⊗ 1_m` of a finite-dimensional *-algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Block {
    pub block_dim: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub center_dim: usize,
    pub is_factor: bool,
    /// Sorted by `(block_dim, multiplicity)`.
    pub blocks: Vec<Block>,
}

impl Classification {
    /// `Σ k²` over blocks, which must equal the linear dimension.
    pub fn wedderburn_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.block_dim * b.block_dim).sum()
    }
}

/// Center, factor test and Wedderburn block structure.
pub fn classify(a: &StarAlgebra) -> Result<Classification> {
    let d = a.ambient_dim();
    check_cap(d, GENERIC_MAX_DIM)?;
    let center: Vec<CMatrix> = center_coords(a).iter().map(|c| a.combine(c)).collect();
    let center_dim = center.len();
    if center_dim == 0 {
        return Err(Error::Numerical("empty center".into()));
    }
    let projections = if center_dim == 1 { vec![CMatrix::identity(d)] } else { minimal_projections(&center)? };
    let mut blocks = Vec::with_capacity(projections.len());
    for p in &projections {
        let rank = p.trace().re.round() as usize;
        let cut: Vec<CMatrix> = a.basis().iter().map(|e| e * p).collect();
        let cut_dim = gram_rank(gram_matrix(&cut), 1e-10);
        let k = (cut_dim as f64).sqrt().round() as usize;
        if k == 0 || k * k != cut_dim || !rank.is_multiple_of(k) {
            return Err(Error::Numerical(format!("inconsistent block: rank {rank}, summand dimension {cut_dim}")));
        }
        blocks.push(Block { block_dim: k, multiplicity: rank / k });
    }
    blocks.sort();
    Ok(Classification { center_dim, is_factor: center_dim == 1, blocks })
}

/// Spectral projections of a generic self-adjoint central element. Its
/// eigenvalues separate the minimal central projections almost surely.
fn minimal_projections(center: &[CMatrix]) -> Result<Vec<CMatrix>> {
    let d = center[0].dim();
    for attempt in 0..16u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xc3a7 + attempt);
        let mut h = CMatrix::zeros(d);
        for z in center {
            let c = random_complex(&mut rng);
            h.axpy(c, z);
        }
        let h = (&h + &h.adjoint()).scale_real(0.5);
        let eig = h.inner().clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let spread = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut last = f64::NEG_INFINITY;
        for &i in &order {
            let v = eig.eigenvalues[i];
            if v - last > 1e-6 * spread || clusters.is_empty() {
                clusters.push(Vec::new());
            }
            clusters.last_mut().unwrap().push(i);
            last = v;
        }
        if clusters.len() != center.len() {
            continue;
        }
        let projections = clusters
            .iter()
            .map(|cl| {
                let mut p = DMatrix::<C64>::zeros(d, d);
                for &i in cl {
                    let v = eig.eigenvectors.column(i);
                    p += v * v.adjoint();
                }
                CMatrix::from_inner(p)
            })
            .collect();
        return Ok(projections);
    }
    Err(Error::Numerical("could not separate minimal central projections".into()))
}

#[cfg(test)]
fn commutes_with(p: &CMatrix, xs: &[CMatrix], tol: f64) -> bool {
    xs.iter().all(|x| p.commutator(x).max_abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstar::generate_algebra;

    #[test]
    fn full_algebra_is_a_factor() {
        let c = classify(&StarAlgebra::full(4)).unwrap();
        assert_eq!(c.center_dim, 1);
        assert!(c.is_factor);
        assert_eq!(c.blocks, vec![Block { block_dim: 4, multiplicity: 1 }]);
    }

    #[test]
    fn diagonal_algebra() {
        let a = generate_algebra(2, &[CMatrix::unit(2, 0, 0)]).unwrap();
        let c = classify(&a).unwrap();
        assert_eq!(c.center_dim, 2);
        assert!(!c.is_factor);
        assert_eq!(c.blocks, vec![Block { block_dim: 1, multiplicity: 1 }; 2]);
    }

    #[test]
    fn block_diagonal_m2_m3() {
        let gens = [CMatrix::unit(5, 0, 1), CMatrix::unit(5, 2, 3), CMatrix::unit(5, 3, 4)];
        let a = generate_algebra(5, &gens).unwrap();
        assert_eq!(a.dim(), 13);
        let c = classify(&a).unwrap();
        assert_eq!(c.center_dim, 2);
        assert_eq!(c.blocks, vec![Block { block_dim: 2, multiplicity: 1 }, Block { block_dim: 3, multiplicity: 1 }]);
        assert_eq!(c.wedderburn_dim(), a.dim());
        // Oracle: the block projections diag(1,1,0,0,0) and diag(0,0,1,1,1)
        // are central and sum to the identity.
        let p1 = &CMatrix::unit(5, 0, 0) + &CMatrix::unit(5, 1, 1);
        let p2 = &CMatrix::identity(5) - &p1;
        for p in [&p1, &p2] {
            assert!(a.contains(p, 1e-12));
            assert!(commutes_with(p, a.basis(), 1e-12));
        }
    }

    #[test]
    fn amplified_factor_has_multiplicity() {
        let e = CMatrix::unit(2, 0, 1);
        let a = generate_algebra(6, &[e.kron(&CMatrix::identity(3))]).unwrap();
        let c = classify(&a).unwrap();
        assert!(c.is_factor);
        assert_eq!(c.blocks, vec![Block { block_dim: 2, multiplicity: 3 }]);
    }
}
