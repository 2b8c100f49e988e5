use std::sync::Arc;

use loccov_core::causet::{admissible_maps, domain_of_dependence, is_admissible, CausalSet, Embedding, Region};
use loccov_core::cstar::{commutant, generate_algebra, StarAlgebra};
use loccov_core::linalg::{random_gaussian_matrix, CMatrix, C64};
use loccov_core::nets::{morphism_of, restrict_net, LocalOperator, NetModel};
use loccov_core::par::sample_rng;
use loccov_core::tensor::{min_norm_default, TensorElement};
use proptest::prelude::*;

/// Random causal set on up to `max` points: each pair `i < j` is a cover
/// with the given odds, so the order is acyclic by construction.
fn causet(max: usize) -> impl Strategy<Value = CausalSet> {
    (1..=max).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        proptest::collection::vec(proptest::bool::weighted(0.4), pairs.len()).prop_map(move |keep| {
            let covers = pairs.iter().zip(&keep).filter(|(_, k)| **k).map(|(p, _)| *p).collect();
            let points = (0..n).map(|i| format!("x{i}")).collect();
            CausalSet::from_indices("random", points, covers).unwrap()
        })
    })
}

fn matrix(dim: usize) -> impl Strategy<Value = CMatrix> {
    any::<u64>().prop_map(move |seed| random_gaussian_matrix(dim, &mut sample_rng(seed, 0)))
}

fn op_norm(m: &CMatrix) -> f64 {
    m.operator_norm().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn admissible_maps_compose(m in causet(4), k in causet(5)) {
        let (m, k) = (Arc::new(m), Arc::new(k.renamed("other")));
        let chain = Arc::new(loccov_core::fixtures::chain2());
        for f in admissible_maps(&chain, &m).into_iter().take(4) {
            let f = Embedding::new(chain.clone(), m.clone(), f).unwrap();
            for g in admissible_maps(&m, &k).into_iter().take(4) {
                let g = Embedding::new(m.clone(), k.clone(), g).unwrap();
                let gf = f.then(&g).unwrap();
                prop_assert!(is_admissible(gf.map(), &chain, &k).admissible);
            }
        }
    }

    #[test]
    fn dependence_domain_is_extensive_and_monotone(m in causet(6), a in any::<u64>(), b in any::<u64>()) {
        let all = m.all_mask();
        let small = Region::from_mask(&m, a & b & all).unwrap();
        let large = Region::from_mask(&m, (a | b) & all).unwrap();
        let (ds, dl) = (domain_of_dependence(&m, &small), domain_of_dependence(&m, &large));
        prop_assert!(small.is_subset(&ds));
        prop_assert!(large.is_subset(&dl));
        prop_assert!(ds.is_subset(&dl));
    }

    #[test]
    fn spacelike_regions_have_disjoint_domains(m in causet(6), a in any::<u64>(), b in any::<u64>()) {
        let all = m.all_mask();
        let (ra, rb) = (a & all, b & all & !a);
        prop_assume!(ra != 0 && rb != 0 && m.masks_spacelike(ra, rb));
        let da = domain_of_dependence(&m, &Region::from_mask(&m, ra).unwrap());
        let db = domain_of_dependence(&m, &Region::from_mask(&m, rb).unwrap());
        prop_assert_eq!(da.mask() & db.mask(), 0);
    }

    #[test]
    fn operator_norm_is_submultiplicative_and_cstar(a in matrix(4), b in matrix(4)) {
        let ab = &a * &b;
        prop_assert!(op_norm(&ab) <= op_norm(&a) * op_norm(&b) * (1.0 + 1e-12));
        let na = op_norm(&a);
        prop_assert!((op_norm(&(&a.adjoint() * &a)) - na * na).abs() <= 1e-10 * na * na);
    }

    #[test]
    fn commutant_reverses_inclusion(x in matrix(4), y in matrix(4)) {
        let small = generate_algebra(4, &[&x + &x.adjoint()]).unwrap();
        let large = generate_algebra(4, &[x, y]).unwrap();
        prop_assert!(large.containment_residual(&small) <= 1e-9);
        let (cs, cl) = (commutant(&small).unwrap(), commutant(&large).unwrap());
        prop_assert!(cs.containment_residual(&cl) <= 1e-9);
    }

    #[test]
    fn min_norm_is_a_cstar_cross_norm(seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let (l, r) = (Arc::new(StarAlgebra::full(2)), Arc::new(StarAlgebra::full(3)));
        let mut rng = sample_rng(seed, 0);
        let s = TensorElement::random(l.clone(), r.clone(), 2, &mut rng);
        let t = TensorElement::random(l.clone(), r.clone(), 3, &mut rng);
        let (ns, nt) = (min_norm_default(&s).unwrap(), min_norm_default(&t).unwrap());
        let scale = 1e-10 * (1.0 + ns + nt);
        prop_assert!(min_norm_default(&s.add(&t)).unwrap() <= ns + nt + scale);
        let lambda = C64::new(re, im);
        prop_assert!((min_norm_default(&s.scale(lambda)).unwrap() - lambda.norm() * ns).abs() <= scale * (1.0 + lambda.norm()));
        prop_assert!((min_norm_default(&s.adjoint().mul(&s)).unwrap() - ns * ns).abs() <= 1e-10 * (1.0 + ns * ns));
        let (a, b) = (random_gaussian_matrix(2, &mut rng), random_gaussian_matrix(3, &mut rng));
        let simple = TensorElement::new(l, r, vec![(a.clone(), b.clone())]).unwrap();
        let cross = op_norm(&a) * op_norm(&b);
        prop_assert!((min_norm_default(&simple).unwrap() - cross).abs() <= 1e-10 * (1.0 + cross));
    }

    #[test]
    fn net_morphisms_compose(m in causet(3), kind in 0usize..2) {
        let model = [NetModel::qubit(), NetModel::fermion()][kind].clone();
        let m = Arc::new(m);
        let k = Arc::new(m.renamed("copy"));
        let pt = Arc::new(loccov_core::fixtures::point("x"));
        for f in admissible_maps(&pt, &m) {
            let f = Embedding::new(pt.clone(), m.clone(), f).unwrap();
            for g in admissible_maps(&m, &k).into_iter().take(3) {
                let g = Embedding::new(m.clone(), k.clone(), g).unwrap();
                let composed = morphism_of(&model, &f.then(&g).unwrap()).unwrap();
                let stepwise = morphism_of(&model, &f).unwrap().then(&morphism_of(&model, &g).unwrap()).unwrap();
                for e in composed.source().basis() {
                    prop_assert!((&composed.apply(e) - &stepwise.apply(e)).max_abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn region_algebras_are_isotonous(m in causet(4), a in any::<u64>(), b in any::<u64>(), kind in 0usize..3) {
        let model = [NetModel::trivial(), NetModel::qubit(), NetModel::fermion()][kind].clone();
        let all = m.all_mask();
        let small = Region::from_mask(&m, a & b & all).unwrap();
        let large = Region::from_mask(&m, (a | b) & all).unwrap();
        let (s, l) = (restrict_net(&model, &m, &small).unwrap(), restrict_net(&model, &m, &large).unwrap());
        prop_assert!(l.containment_residual(&s) <= 1e-9);
    }

    #[test]
    fn local_operators_agree_with_dense(seed in any::<u64>(), sa in 1u64..32, sb in 1u64..32) {
        let sites = |mask: u64| -> Vec<usize> { (0..5).filter(|i| mask >> i & 1 == 1).collect() };
        let (ia, ib) = (sites(sa), sites(sb));
        let mut rng = sample_rng(seed, 0);
        let a = LocalOperator::new(2, ia.clone(), random_gaussian_matrix(1 << ia.len(), &mut rng)).unwrap();
        let b = LocalOperator::new(2, ib.clone(), random_gaussian_matrix(1 << ib.len(), &mut rng)).unwrap();
        let dense = &a.to_dense(5).unwrap() * &b.to_dense(5).unwrap();
        prop_assert!((&a.mul(&b).unwrap().to_dense(5).unwrap() - &dense).max_abs() <= 1e-10);
        let sum = &a.to_dense(5).unwrap() + &b.to_dense(5).unwrap();
        prop_assert!((&a.add(&b).unwrap().to_dense(5).unwrap() - &sum).max_abs() <= 1e-12);
    }
}
