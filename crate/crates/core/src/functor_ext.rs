//! Extension of a net to disjoint spacetimes and the numerical checks of
//! the causality/tensor-functor equivalence and the min-norm isometry.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::axioms::{check_einstein_causality, check_split, linear_cover, spacelike_pairs, Tolerances};
use crate::causet::{
    check_tensor_admissible, disjoint_union, tensor_admissible_maps, CausalSet, DisjointSpacetime, Embedding, Region,
    TensorMap,
};
use crate::cstar::{check_star_hom, HomReport, StarAlgebra, StarHom};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::linalg::{random_gaussian_matrix, CMatrix};
use crate::nets::{algebra_of, morphism_of, restrict_net, region_sites, HKNet, LocalOperator, ModelKind, NetModel};
use crate::par::{self, Exec};
use crate::tensor::{min_norm_default, tensor_algebra, tensor_hom, TensorElement, KRON_MAX_DIM};

/// `𝔄⊗(D)`: left-associated Kronecker product of the component algebras;
/// the empty spacetime gives `C`.
pub fn extend_object(model: &NetModel, d: &DisjointSpacetime) -> Result<StarAlgebra> {
    let total = d.components().iter().try_fold(1usize, |acc, c| model.ambient_dim(c.len()).map(|k| acc * k))?;
    if total > model.max_dim().max(1) {
        return Err(Error::MaxDimExceeded { dim: total, cap: model.max_dim() });
    }
    let mut iter = d.components().iter();
    let Some(first) = iter.next() else {
        return Ok(StarAlgebra::scalars(1));
    };
    let mut acc = algebra_of(model, first)?;
    for c in iter {
        acc = tensor_algebra(&acc, &algebra_of(model, c)?)?;
    }
    Ok(acc)
}

/// Candidate extension of a tensor-admissible map together with its
/// homomorphism audit.
#[derive(Clone, Debug)]
pub struct ExtendedMorphism {
    pub hom: StarHom,
    pub report: HomReport,
    pub kappa: Vec<usize>,
}

/// `⊗_k A_k ↦ ⊗_l ∏_{k ∈ κ⁻¹(l)} α_k(A_k)`, products in ascending `k`.
pub fn extend_morphism(model: &NetModel, f: &TensorMap, kappa: &[usize]) -> Result<ExtendedMorphism> {
    let source = Arc::new(extend_object(model, &f.source)?);
    let tgt_dims: Vec<usize> =
        f.target.components().iter().map(|c| model.ambient_dim(c.len())).collect::<Result<_>>()?;
    let target_dim: usize = tgt_dims.iter().product();
    if target_dim > KRON_MAX_DIM {
        return Err(Error::MaxDimExceeded { dim: target_dim, cap: KRON_MAX_DIM });
    }
    // Images of each component's basis under its own morphism.
    let mut comp_sizes = Vec::new();
    let mut comp_images: Vec<Vec<CMatrix>> = Vec::new();
    for (k, &l) in kappa.iter().enumerate() {
        let alg = algebra_of(model, &f.source.components()[k])?;
        let h = morphism_of(model, &f.component_embedding(k, l)?)?;
        comp_sizes.push(alg.dim());
        comp_images.push(alg.basis().iter().map(|e| h.apply(e)).collect());
    }
    let count: usize = comp_sizes.iter().product();
    let images = (0..count)
        .map(|mut idx| {
            let mut digits = vec![0; comp_sizes.len()];
            for (slot, &n) in digits.iter_mut().zip(&comp_sizes).rev() {
                *slot = idx % n;
                idx /= n;
            }
            let mut out = CMatrix::identity(1);
            for (l, &dl) in tgt_dims.iter().enumerate() {
                let mut prod = CMatrix::identity(dl);
                for (k, _) in kappa.iter().enumerate().filter(|(_, &kl)| kl == l) {
                    prod = &prod * &comp_images[k][digits[k]];
                }
                out = out.kron(&prod);
            }
            out
        })
        .collect();
    let hom = StarHom::new(source, target_dim, images)?;
    let report = check_star_hom(&hom);
    Ok(ExtendedMorphism { hom, report, kappa: kappa.to_vec() })
}

/// Extension of a map after checking tensor admissibility.
pub fn extend(model: &NetModel, f: &TensorMap) -> Result<ExtendedMorphism> {
    let kappa = check_tensor_admissible(f)?;
    extend_morphism(model, f, &kappa)
}

#[derive(Clone, Debug, Serialize)]
pub struct LawResult {
    pub law: String,
    pub passed: bool,
    /// False when the law could not be evaluated because extended maps are
    /// not homomorphisms.
    pub reachable: bool,
    pub max_deviation: f64,
    pub checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl LawResult {
    fn new(law: &str) -> Self {
        LawResult { law: law.into(), passed: true, reachable: true, max_deviation: 0.0, checked: 0, witness: None }
    }

    fn record(&mut self, deviation: f64, tol: f64, label: impl FnOnce() -> Value) {
        self.checked += 1;
        if deviation > self.max_deviation || deviation.is_nan() {
            self.max_deviation = deviation;
            if deviation > tol || deviation.is_nan() {
                self.witness = Some(label());
            }
        }
        if deviation > tol || deviation.is_nan() {
            self.passed = false;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctorReport {
    pub model: String,
    pub passed: bool,
    pub laws: Vec<LawResult>,
    pub maps_checked: usize,
    pub composable_pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_cause: Option<String>,
}

impl FunctorReport {
    pub fn law(&self, name: &str) -> Option<&LawResult> {
        self.laws.iter().find(|l| l.law == name)
    }
}

fn single(m: CausalSet) -> DisjointSpacetime {
    DisjointSpacetime::single(Arc::new(m))
}

fn pts(names: &[&str]) -> DisjointSpacetime {
    disjoint_union(names.iter().map(|n| Arc::new(fixtures::point(n))).collect()).expect("distinct names")
}

/// Source, middle and target spacetimes whose map pairs are composed.
pub fn composable_triples() -> Vec<(DisjointSpacetime, DisjointSpacetime, DisjointSpacetime)> {
    let (p, p2) = (pts(&["pt"]), pts(&["pt_a", "pt_b"]));
    let (c2, a2, d) = (single(fixtures::chain2()), single(fixtures::antichain2()), single(fixtures::diamond()));
    vec![
        (DisjointSpacetime::unit(), p.clone(), a2.clone()),
        (p.clone(), c2.clone(), d.clone()),
        (p.clone(), a2.clone(), d.clone()),
        (p2.clone(), a2.clone(), d.clone()),
        (p2.clone(), p2.clone(), a2.clone()),
        (p, d.clone(), d),
    ]
}

/// Pairs of maps whose tensor product is checked against the tensor of
/// their extensions.
pub fn monoidal_pairs() -> Vec<(TensorMap, TensorMap)> {
    let (p, pb) = (pts(&["pt"]), pts(&["pt_b"]));
    let p2 = pts(&["pt_a", "pt_c"]);
    let a2 = single(fixtures::antichain2());
    let c2 = single(fixtures::chain2());
    let mut out = Vec::new();
    for f in tensor_admissible_maps(&p, &a2) {
        for g in tensor_admissible_maps(&pb, &c2) {
            out.push((f.clone(), g));
        }
    }
    for f in tensor_admissible_maps(&p2, &a2) {
        out.push((f, TensorMap::identity(pb.clone())));
    }
    for g in tensor_admissible_maps(&p, &c2) {
        out.push((TensorMap::identity(DisjointSpacetime::unit()), g));
    }
    out
}

/// Largest number of composable pairs checked per run.
pub const MAX_COMPOSABLE_PAIRS: usize = 40;

fn law_max(reports: &[(String, &HomReport)]) -> LawResult {
    let mut law = LawResult::new("hom_contract");
    for (label, r) in reports {
        let dev = if r.kernel_dim > 0 { f64::INFINITY } else { r.max_deviation() };
        law.record(dev, crate::cstar::VERIFY_TOL, || {
            json!({"map": label, "multiplicativity": r.multiplicativity, "worst_pair": r.worst_pair, "kernel_dim": r.kernel_dim})
        });
    }
    law
}

fn basis_deviation(a: &StarHom, b: &StarHom) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for e in a.source().basis() {
        let d = (&a.apply(e) - &b.apply(e)).operator_norm()? / e.operator_norm()?;
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Unit, object, monoidal-morphism and covariance laws of the extension on
/// the built-in fixture families.
pub fn verify_tensor_functor(model: &NetModel, tol: &Tolerances, exec: Exec) -> Result<FunctorReport> {
    // unit law
    let mut unit = LawResult::new("unit");
    let e = extend_object(model, &DisjointSpacetime::unit())?;
    unit.record((e.dim() as f64 - 1.0).abs() + (e.ambient_dim() as f64 - 1.0).abs(), tol.functor, || json!("extension of the empty spacetime is not C"));
    let id_unit = extend(model, &TensorMap::identity(DisjointSpacetime::unit()))?;
    unit.record((&id_unit.hom.images()[0] - &CMatrix::identity(1)).max_abs(), tol.functor, || json!("identity of the empty spacetime"));
    for (_, mid, _) in composable_triples() {
        let with_unit = mid.concat(&DisjointSpacetime::unit())?;
        let dev = extend_object(model, &with_unit)?.span_distance(&extend_object(model, &mid)?);
        unit.record(dev, tol.functor, || json!({"spacetime": mid.label()}));
    }

    // object law
    let mut object = LawResult::new("object");
    let parts = [pts(&["pt_a", "pt_b"]), single(fixtures::chain2()), single(fixtures::antichain2())];
    for m in [fixtures::chain2(), fixtures::antichain2(), fixtures::diamond()] {
        let dev = extend_object(model, &single(m.clone()))?.span_distance(&algebra_of(model, &m)?);
        object.record(dev, tol.functor, || json!({"spacetime": m.name()}));
    }
    for i in 0..parts.len() {
        for j in 0..parts.len() {
            let Ok(joint) = parts[i].concat(&parts[j]) else { continue };
            let lhs = extend_object(model, &joint)?;
            let rhs = tensor_algebra(&extend_object(model, &parts[i])?, &extend_object(model, &parts[j])?)?;
            let dev = if lhs.dim() != rhs.dim() {
                f64::INFINITY
            } else {
                lhs.basis().iter().zip(rhs.basis()).map(|(a, b)| (a - b).max_abs()).fold(0.0, f64::max)
            };
            object.record(dev, tol.functor, || json!({"left": parts[i].label(), "right": parts[j].label()}));
        }
    }

    // composable pairs
    let mut pairs: Vec<(TensorMap, TensorMap)> = Vec::new();
    for (a, b, c) in composable_triples() {
        for f in tensor_admissible_maps(&a, &b) {
            for g in tensor_admissible_maps(&b, &c) {
                pairs.push((f.clone(), g));
            }
        }
    }
    pairs.truncate(MAX_COMPOSABLE_PAIRS);
    let monoidal_inputs = monoidal_pairs();

    // Each distinct map is extended and audited once.
    let mut maps: Vec<TensorMap> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut intern = |f: TensorMap| -> usize {
        *index.entry(f.label()).or_insert_with(|| {
            maps.push(f);
            maps.len() - 1
        })
    };
    let mut pair_ids = Vec::with_capacity(pairs.len());
    for (f, g) in &pairs {
        let gf = f.then(g)?;
        pair_ids.push((intern(f.clone()), intern(g.clone()), intern(gf)));
    }
    let mut mono_ids = Vec::with_capacity(monoidal_inputs.len());
    for (f, g) in &monoidal_inputs {
        let fg = f.tensor(g)?;
        mono_ids.push((intern(f.clone()), intern(g.clone()), intern(fg)));
    }
    let ext = par::try_map_indexed(exec, maps.len(), |i| extend(model, &maps[i]))?;
    let labels: Vec<String> = maps.iter().map(TensorMap::label).collect();
    let all_reports: Vec<(String, &HomReport)> = labels.iter().cloned().zip(ext.iter().map(|e| &e.report)).collect();
    let maps_checked = all_reports.len();
    let hom_contract = law_max(&all_reports);

    let mut monoidal = LawResult::new("monoidal");
    let mut covariance = LawResult::new("covariance");
    let root_cause = if hom_contract.passed {
        for &(f, g, fg) in &mono_ids {
            let dev = basis_deviation(&ext[fg].hom, &tensor_hom(&ext[f].hom, &ext[g].hom)?)?;
            monoidal.record(dev, tol.functor, || json!({"map": labels[fg]}));
        }
        for &(f, g, gf) in &pair_ids {
            let dev = basis_deviation(&ext[gf].hom, &ext[f].hom.then(&ext[g].hom)?)?;
            covariance.record(dev, tol.functor, || json!({"map": labels[gf]}));
        }
        None
    } else {
        for law in [&mut monoidal, &mut covariance] {
            law.reachable = false;
            law.passed = false;
            law.max_deviation = f64::NAN;
        }
        Some("causality: images of spacelike components do not commute, so extended maps are not multiplicative".into())
    };
    let laws = vec![unit, object, hom_contract, monoidal, covariance];
    Ok(FunctorReport {
        model: model.name(),
        passed: laws.iter().all(|l| l.passed),
        laws,
        maps_checked,
        composable_pairs: pair_ids.len(),
        root_cause,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayResult {
    pub pairs: usize,
    pub basis_pairs: usize,
    pub max_deviation: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub model: String,
    /// All causality checks pass.
    pub p_causal: bool,
    /// The extension is a tensor functor on the fixtures.
    pub q_functor: bool,
    pub consistent: bool,
    pub passed: bool,
    pub spacetimes: Vec<String>,
    pub causality_checks: usize,
    pub causality_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub causality_witness: Option<Value>,
    pub extension_multiplicativity: f64,
    pub functor: FunctorReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replay: Option<ReplayResult>,
}

/// Spacetimes whose spacelike pairs feed the causality side by default.
pub fn equivalence_spacetimes() -> Vec<Arc<CausalSet>> {
    vec![Arc::new(fixtures::antichain2()), Arc::new(fixtures::diamond())]
}

/// `‖[α₁(A₁), α₂(A₂)] - α_χ([A₁⊗1, 1⊗A₂])‖` over basis pairs, `χ` the joint map.
pub fn replay_commutators(model: &NetModel, f1: &Embedding, f2: &Embedding) -> Result<(usize, f64)> {
    let joint = TensorMap::join(&[f1.clone(), f2.clone()])?;
    let ext = extend(model, &joint)?;
    let (h1, h2) = (morphism_of(model, f1)?, morphism_of(model, f2)?);
    let (a1, a2) = (h1.source(), h2.source());
    let (i1, i2) = (CMatrix::identity(a1.ambient_dim()), CMatrix::identity(a2.ambient_dim()));
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for x in a1.basis() {
        for y in a2.basis() {
            let lhs = h1.apply(x).commutator(&h2.apply(y));
            let rhs = ext.hom.apply(&x.kron(&i2).commutator(&i1.kron(y)));
            worst = worst.max((&lhs - &rhs).operator_norm()?);
            count += 1;
        }
    }
    Ok((count, worst))
}

/// Empirical check that causality holds exactly when the extension is a
/// tensor functor, plus the commutator replay for causal models.
pub fn theorem_equivalence_suite(model: &NetModel, tol: &Tolerances, exec: Exec) -> Result<EquivalenceReport> {
    theorem_equivalence_on(model, &equivalence_spacetimes(), tol, exec)
}

/// Same as [`theorem_equivalence_suite`] with the causality side evaluated
/// on the given spacetimes.
pub fn theorem_equivalence_on(
    model: &NetModel,
    spacetimes: &[Arc<CausalSet>],
    tol: &Tolerances,
    exec: Exec,
) -> Result<EquivalenceReport> {
    let mut pairs = Vec::new();
    for m in spacetimes {
        pairs.extend(spacelike_pairs(m)?);
    }
    let causality = par::try_map_indexed(exec, pairs.len(), |i| check_einstein_causality(model, &pairs[i].0, &pairs[i].1, tol))?;
    let p_causal = causality.iter().all(|r| r.passed);
    let causality_max = causality.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    let causality_witness = causality
        .iter()
        .filter(|r| !r.passed)
        .max_by(|a, b| a.max_deviation.total_cmp(&b.max_deviation))
        .and_then(|r| r.witness.clone());

    let functor = verify_tensor_functor(model, tol, exec)?;
    let q_functor = functor.passed;
    let extension_multiplicativity = functor
        .law("hom_contract")
        .and_then(|l| l.witness.as_ref())
        .and_then(|w| w["multiplicativity"].as_f64())
        .unwrap_or(0.0);

    let replay = if p_causal {
        let results = par::try_map_indexed(exec, pairs.len(), |i| replay_commutators(model, &pairs[i].0, &pairs[i].1))?;
        let max_deviation = results.iter().map(|r| r.1).fold(0.0, f64::max);
        Some(ReplayResult {
            pairs: pairs.len(),
            basis_pairs: results.iter().map(|r| r.0).sum(),
            max_deviation,
            passed: max_deviation <= tol.replay,
        })
    } else {
        None
    };
    let consistent = p_causal == q_functor;
    let passed = consistent && replay.as_ref().is_none_or(|r| r.passed);
    Ok(EquivalenceReport {
        model: model.name(),
        p_causal,
        q_functor,
        consistent,
        passed,
        spacetimes: spacetimes.iter().map(|m| m.name().to_string()).collect(),
        causality_checks: causality.len(),
        causality_max,
        causality_witness,
        extension_multiplicativity,
        functor,
        replay,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleDeviation {
    pub index: usize,
    pub terms: usize,
    pub product_norm: f64,
    pub tensor_norm: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NestedLevel {
    pub level: usize,
    pub factor1: Vec<String>,
    pub factor2: Vec<String>,
    /// Largest measured approximation error over the nested samples.
    pub epsilon: f64,
    /// Largest `|gap| - 2ε`; nonpositive up to roundoff when the bound holds.
    pub bound_slack: f64,
    pub within_bound: bool,
    /// Isometry deviation for the approximants at this level.
    pub level_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsometryReport {
    pub model: String,
    pub spacetime: String,
    pub o1: String,
    pub o2: String,
    pub o: String,
    pub samples: usize,
    pub seed: u64,
    /// `local` evaluates on the support of the regions, `dense` on the full
    /// materialized spacetime algebra.
    pub path: String,
    pub realization_dim: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<SampleDeviation>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub nested: Vec<NestedLevel>,
}

#[derive(Clone, Debug)]
pub struct IsometryConfig {
    pub samples: usize,
    pub seed: u64,
    pub nested: bool,
    pub exec: Exec,
}

impl Default for IsometryConfig {
    fn default() -> Self {
        IsometryConfig { samples: 200, seed: 0, nested: false, exec: Exec::default() }
    }
}

struct LocalSample {
    a: Vec<LocalOperator>,
    b: Vec<LocalOperator>,
}

fn local_sample(d: usize, s1: &[usize], s2: &[usize], seed: u64, i: usize) -> Result<LocalSample> {
    let mut rng = par::sample_rng(seed, i as u64);
    let n = rng.random_range(1..=4);
    let (d1, d2) = (d.pow(s1.len() as u32), d.pow(s2.len() as u32));
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for _ in 0..n {
        a.push(LocalOperator::new(d, s1.to_vec(), random_gaussian_matrix(d1, &mut rng))?);
        b.push(LocalOperator::new(d, s2.to_vec(), random_gaussian_matrix(d2, &mut rng))?);
    }
    Ok(LocalSample { a, b })
}

/// `Σ A_n B_n` on the union of supports.
fn product_sum(a: &[LocalOperator], b: &[LocalOperator]) -> Result<LocalOperator> {
    let mut acc: Option<LocalOperator> = None;
    for (x, y) in a.iter().zip(b) {
        let p = x.mul(y)?;
        acc = Some(match acc {
            None => p,
            Some(s) => s.add(&p)?,
        });
    }
    acc.ok_or_else(|| Error::Invalid("empty element".into()))
}

/// `Σ A_n ⊗ B_n` with each factor first brought to the given site lists.
fn tensor_sum(a: &[LocalOperator], b: &[LocalOperator], s1: &[usize], s2: &[usize]) -> Result<CMatrix> {
    let mut acc: Option<CMatrix> = None;
    for (x, y) in a.iter().zip(b) {
        let t = x.embed(s1)?.matrix().kron(y.embed(s2)?.matrix());
        acc = Some(match acc {
            None => t,
            Some(s) => &s + &t,
        });
    }
    acc.ok_or_else(|| Error::Invalid("empty element".into()))
}

fn validate_regions(m: &CausalSet, o1: &Region, o2: &Region, o: &Region) -> Result<()> {
    for r in [o1, o2, o] {
        m.check_region(r)?;
    }
    if o1.is_empty() || o2.is_empty() {
        return Err(Error::Invalid("isometry regions must be nonempty".into()));
    }
    if !m.masks_spacelike(o1.mask(), o2.mask()) {
        return Err(Error::NotSpacelike(o1.label(m), o2.label(m)));
    }
    let inner = o1.union(o2);
    if !inner.is_subset(o) {
        return Err(Error::NotNested { inner: inner.label(m), outer: o.label(m) });
    }
    Ok(())
}

/// Compares `‖Σ A_n B_n‖` inside the net with `‖Σ A_n ⊗ B_n‖_min` for seeded
/// random elements of the two region algebras.
pub fn isometry_theorem_check(
    model: &NetModel,
    m: Arc<CausalSet>,
    o1: &Region,
    o2: &Region,
    o: &Region,
    cfg: &IsometryConfig,
    tol: &Tolerances,
) -> Result<IsometryReport> {
    validate_regions(&m, o1, o2, o)?;
    let (samples, path, realization_dim, nested) = if model.kind() == ModelKind::Qubit {
        local_isometry(model, &m, o1, o2, cfg, tol)?
    } else {
        if cfg.nested {
            return Err(Error::Invalid("nested mode needs the qubit model".into()));
        }
        let (s, dim) = dense_isometry(model, &m, o1, o2, cfg)?;
        (s, "dense", dim, Vec::new())
    };
    let worst = samples.iter().max_by(|a, b| a.deviation.total_cmp(&b.deviation)).cloned();
    let max_deviation = worst.as_ref().map_or(0.0, |w| w.deviation);
    let passed = max_deviation <= tol.isometry && nested.iter().all(|l| l.within_bound && l.level_deviation <= tol.isometry);
    Ok(IsometryReport {
        model: model.name(),
        spacetime: m.name().to_string(),
        o1: o1.label(&m),
        o2: o2.label(&m),
        o: o.label(&m),
        samples: samples.len(),
        seed: cfg.seed,
        path: path.to_string(),
        realization_dim,
        max_deviation,
        tolerance: tol.isometry,
        passed,
        worst,
        nested,
    })
}

type LocalResult = (Vec<SampleDeviation>, &'static str, usize, Vec<NestedLevel>);

fn local_isometry(
    model: &NetModel,
    m: &Arc<CausalSet>,
    o1: &Region,
    o2: &Region,
    cfg: &IsometryConfig,
    tol: &Tolerances,
) -> Result<LocalResult> {
    let d = model.site_dim();
    let (s1, s2) = (region_sites(o1), region_sites(o2));
    let dim = d.checked_pow((s1.len() + s2.len()) as u32).unwrap_or(usize::MAX);
    if dim > KRON_MAX_DIM {
        return Err(Error::MaxDimExceeded { dim, cap: KRON_MAX_DIM });
    }
    let samples = par::try_map_indexed(cfg.exec, cfg.samples, |i| {
        let s = local_sample(d, &s1, &s2, cfg.seed, i)?;
        let product_norm = product_sum(&s.a, &s.b)?.norm()?;
        let tensor_norm = tensor_sum(&s.a, &s.b, &s1, &s2)?.operator_norm()?;
        let deviation = (product_norm - tensor_norm).abs() / tensor_norm.max(1.0);
        Ok::<_, Error>(SampleDeviation { index: i, terms: s.a.len(), product_norm, tensor_norm, deviation })
    })?;
    let nested = if cfg.nested { nested_levels(model, m, o1, o2, cfg, tol)? } else { Vec::new() };
    Ok((samples, "local", dim, nested))
}

fn dense_isometry(
    model: &NetModel,
    m: &CausalSet,
    o1: &Region,
    o2: &Region,
    cfg: &IsometryConfig,
) -> Result<(Vec<SampleDeviation>, usize)> {
    let a1 = Arc::new(restrict_net(model, m, o1)?);
    let a2 = Arc::new(restrict_net(model, m, o2)?);
    let kdim = a1.ambient_dim() * a2.ambient_dim();
    if kdim > KRON_MAX_DIM {
        return Err(Error::MaxDimExceeded { dim: kdim, cap: KRON_MAX_DIM });
    }
    let samples = par::try_map_indexed(cfg.exec, cfg.samples, |i| {
        let mut rng = par::sample_rng(cfg.seed, i as u64);
        let n = rng.random_range(1..=4);
        let t = TensorElement::random(a1.clone(), a2.clone(), n, &mut rng);
        let mut prod = CMatrix::zeros(a1.ambient_dim());
        for (x, y) in t.terms() {
            prod = &prod + &(x * y);
        }
        let product_norm = prod.operator_norm()?;
        let tensor_norm = min_norm_default(&t)?;
        let deviation = (product_norm - tensor_norm).abs() / tensor_norm.max(1.0);
        Ok::<_, Error>(SampleDeviation { index: i, terms: n, product_norm, tensor_norm, deviation })
    })?;
    Ok((samples, a1.ambient_dim()))
}

/// Default increasing chains ending at `o1` and `o2`.
fn region_chains(m: &CausalSet, o1: &Region, o2: &Region) -> Result<(Vec<Region>, Vec<Region>)> {
    if m.name() == "diamond-in-box" {
        let b = fixtures::box_regions(m)?;
        if b.o1 == *o1 && b.o2 == *o2 {
            return Ok((b.chain1, b.chain2));
        }
    }
    Ok((linear_cover(m, o1), linear_cover(m, o2)))
}

/// Site set of the intermediate factor between `inner ⊂ outer`, found by the
/// split search on the sub-causal set induced on `whole`.
fn split_factor(model: &NetModel, m: &CausalSet, whole: &Region, inner: &Region, outer: &Region, tol: &Tolerances) -> Result<Vec<usize>> {
    let sub = Arc::new(m.induced(whole)?.renamed("sub"));
    let to_sub = |r: &Region| -> Result<Region> {
        let names = r.names(m);
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        sub.region(&names)
    };
    let net = HKNet::new(model.clone(), sub.clone())?;
    let outcome = check_split(&net, &to_sub(inner)?, &to_sub(outer)?, tol)?;
    outcome.factor_sites.iter().map(|n| m.index_of(n)).collect()
}

fn nested_levels(
    model: &NetModel,
    m: &Arc<CausalSet>,
    o1: &Region,
    o2: &Region,
    cfg: &IsometryConfig,
    tol: &Tolerances,
) -> Result<Vec<NestedLevel>> {
    let (chain1, chain2) = region_chains(m, o1, o2)?;
    let levels = chain1.len().max(chain2.len());
    let factor = |chain: &[Region], whole: &Region, i: usize| -> Result<Vec<usize>> {
        let i = i.min(chain.len() - 1);
        if i + 1 < chain.len() {
            split_factor(model, m, whole, &chain[i], &chain[i + 1], tol)
        } else {
            Ok(region_sites(&chain[i]))
        }
    };
    let (s1, s2) = (region_sites(o1), region_sites(o2));
    let d = model.site_dim();
    let n_samples = cfg.samples.min(10);
    let mut out = Vec::with_capacity(levels);
    for level in 0..levels {
        let (f1, f2) = (factor(&chain1, o1, level)?, factor(&chain2, o2, level)?);
        let per = par::try_map_indexed(cfg.exec, n_samples, |i| {
            let s = local_sample(d, &s1, &s2, cfg.seed, i)?;
            let ai: Vec<LocalOperator> = s.a.iter().map(|x| x.reduce_to(&f1)).collect::<Result<_>>()?;
            let bj: Vec<LocalOperator> = s.b.iter().map(|y| y.reduce_to(&f2)).collect::<Result<_>>()?;
            let full_prod = product_sum(&s.a, &s.b)?;
            let approx_prod = product_sum(&ai, &bj)?;
            let full_tensor = tensor_sum(&s.a, &s.b, &s1, &s2)?;
            let approx_tensor = tensor_sum(&ai, &bj, &s1, &s2)?;
            let eps_prod = full_prod.add(&approx_prod.scale(crate::linalg::C64::new(-1.0, 0.0)))?.norm()?;
            let eps_tensor = (&full_tensor - &approx_tensor).operator_norm()?;
            let eps = eps_prod.max(eps_tensor);
            let (np, nap) = (full_prod.norm()?, approx_prod.norm()?);
            let (nt, nat) = (full_tensor.operator_norm()?, approx_tensor.operator_norm()?);
            let gap = (np - nap) + (nat - nt);
            let level_dev = (nap - nat).abs() / nat.max(1.0);
            Ok::<_, Error>((eps, gap.abs() - 2.0 * eps, level_dev))
        })?;
        let epsilon = per.iter().map(|p| p.0).fold(0.0, f64::max);
        let bound_slack = per.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let level_deviation = per.iter().map(|p| p.2).fold(0.0, f64::max);
        let names = |sites: &[usize]| sites.iter().map(|&x| m.point_name(x).to_string()).collect();
        out.push(NestedLevel {
            level,
            factor1: names(&f1),
            factor2: names(&f2),
            epsilon,
            bound_slack,
            within_bound: bound_slack <= tol.isometry,
            level_deviation,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn extend_object_examples() {
        let q = NetModel::qubit();
        let e = extend_object(&q, &DisjointSpacetime::unit()).unwrap();
        assert_eq!((e.dim(), e.ambient_dim()), (1, 1));
        let two = extend_object(&q, &pts(&["u", "v"])).unwrap();
        assert!(two.is_full());
        assert_eq!(two.ambient_dim(), 4);
        let dp = disjoint_union(vec![Arc::new(fixtures::diamond()), Arc::new(fixtures::point("x"))]).unwrap();
        let big = extend_object(&q, &dp).unwrap();
        assert_eq!(big.ambient_dim(), 32);
        assert!(big.is_full());
    }

    #[test]
    fn extend_object_is_strictly_associative() {
        let q = NetModel::qubit();
        let (a, b, c) = (pts(&["u"]), single(fixtures::chain2()), pts(&["w"]));
        let left = tensor_algebra(&tensor_algebra(&extend_object(&q, &a).unwrap(), &extend_object(&q, &b).unwrap()).unwrap(), &extend_object(&q, &c).unwrap()).unwrap();
        let right = tensor_algebra(&extend_object(&q, &a).unwrap(), &tensor_algebra(&extend_object(&q, &b).unwrap(), &extend_object(&q, &c).unwrap()).unwrap()).unwrap();
        for (x, y) in left.basis().iter().zip(right.basis()) {
            assert_eq!((x - y).max_abs(), 0.0);
        }
    }

    #[test]
    fn extend_morphism_examples() {
        let q = NetModel::qubit();
        let anti = Arc::new(fixtures::antichain2());
        let pt = Arc::new(fixtures::point("x"));
        let f = Embedding::from_names(pt, anti.clone(), &[("x", "a")]).unwrap();
        let single_ext = extend(&q, &TensorMap::from_embedding(&f)).unwrap();
        let direct = morphism_of(&q, &f).unwrap();
        assert_eq!(basis_deviation(&single_ext.hom, &direct).unwrap(), 0.0);

        let (fa, fb) = (
            Embedding::from_names(Arc::new(fixtures::point("u")), anti.clone(), &[("x", "a")]).unwrap(),
            Embedding::from_names(Arc::new(fixtures::point("v")), anti.clone(), &[("x", "b")]).unwrap(),
        );
        let joint = TensorMap::join(&[fa, fb]).unwrap();
        let ext = extend(&q, &joint).unwrap();
        assert!(ext.report.passed);
        assert!(ext.report.max_deviation() <= 1e-10);
        let fermion = extend(&NetModel::fermion(), &joint).unwrap();
        assert!(!fermion.report.passed);
        assert!(fermion.report.multiplicativity >= 1.0);
    }

    #[test]
    fn causal_extension_images_commute_across_classes() {
        let q = NetModel::qubit();
        let d = Arc::new(fixtures::diamond());
        let (fq, fr) = (
            Embedding::inclusion(d.clone(), &d.region(&["q"]).unwrap()).unwrap(),
            Embedding::inclusion(d.clone(), &d.region(&["r"]).unwrap()).unwrap(),
        );
        let f = extend(&q, &TensorMap::join(&[fq, fr]).unwrap()).unwrap();
        let i2 = CMatrix::identity(2);
        for x in StarAlgebra::full(2).basis() {
            for y in StarAlgebra::full(2).basis() {
                let (u, v) = (f.hom.apply(&x.kron(&i2)), f.hom.apply(&i2.kron(y)));
                assert!(u.commutator(&v).max_abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn functor_laws() {
        let trivial = verify_tensor_functor(&NetModel::trivial(), &tol(), Exec::default()).unwrap();
        assert!(trivial.passed);
        assert!(trivial.laws.iter().all(|l| l.max_deviation == 0.0));
        assert!(trivial.composable_pairs >= 20);
        let qubit = verify_tensor_functor(&NetModel::qubit(), &tol(), Exec::default()).unwrap();
        assert!(qubit.passed, "{:?}", qubit.laws);
        let fermion = verify_tensor_functor(&NetModel::fermion(), &tol(), Exec::default()).unwrap();
        assert!(!fermion.passed);
        assert!(!fermion.law("covariance").unwrap().reachable);
        assert!(fermion.root_cause.as_deref().unwrap().starts_with("causality"));
    }

    #[test]
    fn equivalence_suite() {
        let q = theorem_equivalence_suite(&NetModel::qubit(), &tol(), Exec::default()).unwrap();
        assert!(q.p_causal && q.q_functor && q.passed);
        assert!(q.replay.as_ref().unwrap().max_deviation <= 1e-10);
        let f = theorem_equivalence_suite(&NetModel::fermion(), &tol(), Exec::default()).unwrap();
        assert!(!f.p_causal && !f.q_functor && f.consistent);
        assert!((f.causality_max - 2.0).abs() <= 1e-9);
        assert!(f.extension_multiplicativity >= 1.0);
    }

    #[test]
    fn isometry_on_diamond() {
        let m = Arc::new(fixtures::diamond());
        let (o1, o2, o) = fixtures::default_isometry_regions(&m).unwrap();
        let cfg = IsometryConfig { samples: 40, ..Default::default() };
        let local = isometry_theorem_check(&NetModel::qubit(), m.clone(), &o1, &o2, &o, &cfg, &tol()).unwrap();
        assert!(local.passed && local.max_deviation <= 1e-8);
        let (dense, _) = dense_isometry(&NetModel::qubit(), &m, &o1, &o2, &cfg).unwrap();
        let dense_max = dense.iter().map(|s| s.deviation).fold(0.0, f64::max);
        assert!(dense_max <= 1e-8);

        let bad = isometry_theorem_check(&NetModel::qubit(), m.clone(), &m.region(&["p"]).unwrap(), &o2, &o, &cfg, &tol());
        assert!(matches!(bad, Err(Error::NotSpacelike(..))));
    }

    #[test]
    fn isometry_exact_elements() {
        // Single term (A, 1): both sides equal ‖A‖.
        let a = random_gaussian_matrix(2, &mut par::sample_rng(1, 0));
        let i2 = CMatrix::identity(2);
        let lhs = LocalOperator::new(2, vec![1], a.clone()).unwrap().mul(&LocalOperator::new(2, vec![2], i2.clone()).unwrap()).unwrap();
        assert!((lhs.norm().unwrap() - a.operator_norm().unwrap()).abs() <= 1e-10);
        // 1⊗1 + X_q X_r has norm 2.
        let x = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let terms_a = [LocalOperator::new(2, vec![1], i2.clone()).unwrap(), LocalOperator::new(2, vec![1], x.clone()).unwrap()];
        let terms_b = [LocalOperator::new(2, vec![2], i2).unwrap(), LocalOperator::new(2, vec![2], x).unwrap()];
        let p = product_sum(&terms_a, &terms_b).unwrap().norm().unwrap();
        let t = tensor_sum(&terms_a, &terms_b, &[1], &[2]).unwrap().operator_norm().unwrap();
        assert!((p - 2.0).abs() < 1e-12 && (t - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nested_mode_on_box() {
        let m = Arc::new(fixtures::diamond_in_box());
        let (o1, o2, o) = fixtures::default_isometry_regions(&m).unwrap();
        let cfg = IsometryConfig { samples: 4, nested: true, ..Default::default() };
        let r = isometry_theorem_check(&NetModel::qubit(), m, &o1, &o2, &o, &cfg, &tol()).unwrap();
        assert_eq!(r.nested.len(), 4);
        assert!(r.nested.iter().all(|l| l.within_bound));
        assert_eq!(r.nested.last().unwrap().epsilon, 0.0);
        assert!(r.passed);
    }
}
