//! Checkers for the locality axioms, additivity and the split property.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::causet::{
    admissible_maps, convex_regions, is_causally_convex, is_cauchy_region, CausalSet, Embedding, Region,
};
use crate::cstar::{check_star_hom, classify, generate_algebra, Classification, HomReport, StarAlgebra, StarHom};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::linalg::CMatrix;
use crate::nets::{morphism_of, Axiom, Expectation, HKNet, LocalNet, NetModel};
use crate::par::{self, Exec};

/// Named numerical thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub construction: f64,
    pub verification: f64,
    pub causality: f64,
    pub covariance: f64,
    pub isometry: f64,
    pub replay: f64,
    pub functor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            construction: 1e-10,
            verification: 1e-9,
            causality: 1e-12,
            covariance: 1e-10,
            isometry: 1e-8,
            replay: 1e-10,
            functor: 1e-10,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 7] =
        ["construction", "verification", "causality", "covariance", "isometry", "replay", "functor"];

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::Invalid(format!("tolerance `{name}` must be a nonnegative number")));
        }
        let slot = match name {
            "construction" => &mut self.construction,
            "verification" => &mut self.verification,
            "causality" => &mut self.causality,
            "covariance" => &mut self.covariance,
            "isometry" => &mut self.isometry,
            "replay" => &mut self.replay,
            "functor" => &mut self.functor,
            other => {
                return Err(Error::Invalid(format!("unknown tolerance `{other}`; known: {}", Self::NAMES.join(", "))))
            }
        };
        *slot = value;
        Ok(())
    }
}

/// Outcome of one axiom check on one input.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub instance: String,
    pub passed: bool,
    /// The check's precondition did not hold, so it passed without testing.
    pub vacuous: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AxiomReport {
    fn measured(axiom: Axiom, instance: String, deviation: f64, tolerance: f64) -> Self {
        AxiomReport {
            axiom,
            instance,
            passed: deviation <= tolerance,
            vacuous: false,
            max_deviation: deviation,
            tolerance,
            witness: None,
            notes: Vec::new(),
        }
    }

    fn vacuous(axiom: Axiom, instance: String, tolerance: f64, note: &str) -> Self {
        AxiomReport {
            axiom,
            instance,
            passed: true,
            vacuous: true,
            max_deviation: 0.0,
            tolerance,
            witness: None,
            notes: vec![note.to_string()],
        }
    }
}

fn hom_json(r: &HomReport) -> Value {
    serde_json::to_value(r).unwrap_or(Value::Null)
}

/// The homomorphism contract on a given map (used for subsystem checks and
/// for deliberately corrupted maps).
pub fn check_hom_contract(h: &StarHom, instance: String, tol: &Tolerances) -> AxiomReport {
    let r = check_star_hom(h);
    let dev = r.max_deviation();
    let mut report = AxiomReport::measured(Axiom::Subsystems, instance, dev, tol.verification);
    report.passed = report.passed && r.kernel_dim == 0;
    if !report.passed {
        report.witness = Some(hom_json(&r));
    }
    report
}

pub fn check_subsystems(model: &NetModel, f: &Embedding, tol: &Tolerances) -> Result<AxiomReport> {
    Ok(check_hom_contract(&morphism_of(model, f)?, f.label(), tol))
}

/// `max_k ‖α_{g∘f}(e_k) - α_g(α_f(e_k))‖ / ‖e_k‖` over the source basis.
pub fn check_covariance(model: &NetModel, f: &Embedding, g: &Embedding, tol: &Tolerances) -> Result<AxiomReport> {
    let gf = f.then(g)?;
    let direct = morphism_of(model, &gf)?;
    let (hf, hg) = (morphism_of(model, f)?, morphism_of(model, g)?);
    let mut worst = (0.0, 0);
    for (k, e) in direct.source().basis().iter().enumerate() {
        let d = (&direct.apply(e) - &hg.apply(&hf.apply(e))).operator_norm()? / e.operator_norm()?;
        if d > worst.0 {
            worst = (d, k);
        }
    }
    let mut report =
        AxiomReport::measured(Axiom::Covariance, format!("{} then {}", f.label(), g.label()), worst.0, tol.covariance);
    if !report.passed {
        report.witness = Some(json!({"basis_index": worst.1, "deviation": worst.0}));
    }
    Ok(report)
}

/// `max ‖[α₁(e_i), α₂(e'_j)]‖ / (‖e_i‖ ‖e'_j‖)` over basis pairs.
pub fn check_einstein_causality(
    model: &NetModel,
    f1: &Embedding,
    f2: &Embedding,
    tol: &Tolerances,
) -> Result<AxiomReport> {
    if **f1.target() != **f2.target() {
        return Err(Error::NotComposable("causality check needs a common target".into()));
    }
    let m = f1.target();
    if !m.masks_spacelike(f1.image_mask(), f2.image_mask()) {
        return Err(Error::NotSpacelike(f1.image().label(m), f2.image().label(m)));
    }
    let (h1, h2) = (morphism_of(model, f1)?, morphism_of(model, f2)?);
    let b1: Vec<(CMatrix, f64)> = h1
        .source()
        .basis()
        .iter()
        .zip(h1.images())
        .map(|(e, y)| Ok((y.clone(), e.operator_norm()?)))
        .collect::<Result<_>>()?;
    let b2: Vec<(CMatrix, f64)> = h2
        .source()
        .basis()
        .iter()
        .zip(h2.images())
        .map(|(e, y)| Ok((y.clone(), e.operator_norm()?)))
        .collect::<Result<_>>()?;
    let mut worst = (0.0, 0, 0);
    for (i, (y1, n1)) in b1.iter().enumerate() {
        for (j, (y2, n2)) in b2.iter().enumerate() {
            let c = y1.commutator(y2);
            if c.max_abs() == 0.0 {
                continue;
            }
            let d = c.operator_norm()? / (n1 * n2);
            if d > worst.0 {
                worst = (d, i, j);
            }
        }
    }
    let instance = format!("{} | {}", f1.image().label(m), f2.image().label(m));
    let mut report = AxiomReport::measured(Axiom::Causality, instance, worst.0, tol.causality);
    if !report.passed {
        report.witness = Some(json!({
            "left": f1.label(),
            "right": f2.label(),
            "basis_pair": [worst.1, worst.2],
            "commutator_norm": worst.0,
        }));
    }
    Ok(report)
}

/// For a Cauchy image, the image algebra must span all of `𝔄(M)`.
pub fn check_timeslice(model: &NetModel, f: &Embedding, tol: &Tolerances) -> Result<AxiomReport> {
    let m = f.target();
    let image = f.image();
    if !is_cauchy_region(m, &image) {
        return Ok(AxiomReport::vacuous(Axiom::Timeslice, f.label(), tol.verification, "precondition not met: image is not Cauchy"));
    }
    let h = morphism_of(model, f)?;
    let image_alg = StarAlgebra::from_spanning(h.target_dim(), h.images(), Vec::new());
    let full = crate::nets::algebra_of(model, m)?;
    let dev = image_alg.span_distance(&full);
    let mut report = AxiomReport::measured(Axiom::Timeslice, f.label(), dev, tol.verification);
    if !report.passed {
        report.witness = Some(json!({
            "image": image.label(m),
            "image_dim": image_alg.dim(),
            "spacetime_dim": full.dim(),
        }));
    }
    Ok(report)
}

/// The algebra generated by the cover's region algebras must equal that of
/// `o`. Every cover region must lie inside `o`.
pub fn check_additivity(net: &dyn LocalNet, o: &Region, cover: &[Region], tol: &Tolerances) -> Result<AxiomReport> {
    let m = net.spacetime();
    m.check_region(o)?;
    for (i, r) in cover.iter().enumerate() {
        m.check_region(r)?;
        if !is_causally_convex(m, r) {
            return Err(Error::NotConvex(r.label(m)));
        }
        if i > 0 && !cover[i - 1].is_strict_subset(r) {
            return Err(Error::NotIncreasing(i));
        }
        if !r.is_subset(o) {
            return Err(Error::Invalid(format!("cover region {} is not inside {}", r.label(m), o.label(m))));
        }
    }
    let union = cover.iter().fold(0u64, |acc, r| acc | r.mask());
    if o.mask() & !union != 0 {
        let missing = Region::from_mask(m, o.mask() & !union)?;
        return Err(Error::NotCovering(missing.label(m)));
    }
    let target = net.region_algebra(o)?;
    let mut gens = Vec::new();
    for r in cover {
        let a = net.region_algebra(r)?;
        if a.generators().is_empty() && a.dim() > 1 {
            gens.extend(a.basis().iter().cloned());
        } else {
            gens.extend(a.generators().iter().cloned());
        }
    }
    let generated = generate_algebra(target.ambient_dim(), &gens)?;
    let dev = generated.span_distance(&target);
    let labels: Vec<String> = cover.iter().map(|r| r.label(m)).collect();
    let mut report =
        AxiomReport::measured(Axiom::Additivity, format!("{} <- [{}]", o.label(m), labels.join(" ")), dev, tol.verification);
    if !report.passed {
        report.witness = Some(json!({"generated_dim": generated.dim(), "region_dim": target.dim()}));
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitOutcome {
    pub report: AxiomReport,
    /// Site set of the intermediate factor.
    pub factor_sites: Vec<String>,
    pub classification: Classification,
    pub lower_residual: f64,
    pub upper_residual: f64,
    pub candidates_searched: usize,
}

/// Largest number of extra sites the split search enumerates.
pub const SPLIT_MAX_EXTRA: usize = 16;

/// Searches `O1 ⊆ S ⊆ O2` by ascending `|S|` for a factor `ℛ(S)` with
/// `𝔄(O1) ⊆ ℛ(S) ⊆ 𝔄(O2)`.
pub fn check_split(net: &dyn LocalNet, o1: &Region, o2: &Region, tol: &Tolerances) -> Result<SplitOutcome> {
    let m = net.spacetime();
    m.check_region(o1)?;
    m.check_region(o2)?;
    if !o1.is_strict_subset(o2) {
        return Err(Error::NotNested { inner: o1.label(m), outer: o2.label(m) });
    }
    let extra: Vec<usize> = crate::causet::bits(o2.mask() & !o1.mask()).collect();
    if extra.len() > SPLIT_MAX_EXTRA {
        return Err(Error::Invalid(format!("split search over {} extra sites is too large", extra.len())));
    }
    let mut subsets: Vec<u64> = (0u64..1 << extra.len())
        .map(|bitsel| {
            extra.iter().enumerate().filter(|(i, _)| bitsel >> i & 1 == 1).fold(o1.mask(), |acc, (_, &x)| acc | 1 << x)
        })
        .collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));

    let lower = net.region_algebra(o1)?;
    let upper = net.region_algebra(o2)?;
    let mut notes = vec!["sigma-continuity: vacuously true in finite dimension".to_string()];
    if !m.is_mask_connected(o1.mask()) {
        notes.push(format!("warning: inner region {} is not connected", o1.label(m)));
    }
    for (searched, &mask) in subsets.iter().enumerate() {
        let s = Region::from_mask(m, mask)?;
        let r = net.candidate_algebra(&s)?;
        let lower_residual = r.containment_residual(&lower);
        let upper_residual = upper.containment_residual(&r);
        if lower_residual > tol.verification || upper_residual > tol.verification {
            continue;
        }
        let classification = classify(&r)?;
        if !classification.is_factor {
            continue;
        }
        let instance = format!("{} < {}", o1.label(m), o2.label(m));
        let mut report = AxiomReport::measured(Axiom::Split, instance, lower_residual.max(upper_residual), tol.verification);
        report.witness = Some(json!({
            "factor_sites": s.names(m),
            "blocks": classification.blocks,
            "lower_residual": lower_residual,
            "upper_residual": upper_residual,
        }));
        report.notes = notes;
        return Ok(SplitOutcome {
            report,
            factor_sites: s.names(m),
            classification,
            lower_residual,
            upper_residual,
            candidates_searched: searched + 1,
        });
    }
    Err(Error::NoIntermediateFactor { searched: subsets.len() })
}

/// Aggregate of one axiom over all instances on one spacetime.
#[derive(Clone, Debug, Serialize)]
pub struct CheckSummary {
    pub axiom: Axiom,
    pub spacetime: String,
    pub model: String,
    pub passed: bool,
    pub vacuous: bool,
    pub instances: usize,
    pub failures: usize,
    pub vacuous_instances: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub expected: Expectation,
    pub matches_expectation: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip)]
    pub reports: Vec<AxiomReport>,
}

struct Instance {
    report: AxiomReport,
    expect_fail: bool,
}

fn inclusions(m: &Arc<CausalSet>) -> Result<Vec<Embedding>> {
    convex_regions(m).iter().map(|r| Embedding::inclusion(m.clone(), r)).collect()
}

fn maps_into(m: &Arc<CausalSet>) -> Vec<Embedding> {
    let mut sources = vec![m.clone()];
    sources.extend([fixtures::point("x"), fixtures::chain2(), fixtures::antichain2()].map(Arc::new));
    let mut out = Vec::new();
    for n in sources {
        if n.len() > m.len() {
            continue;
        }
        for map in admissible_maps(&n, m) {
            out.push(Embedding::new(n.clone(), m.clone(), map).expect("enumerated maps are admissible"));
        }
    }
    out
}

fn covariance_pairs(m: &Arc<CausalSet>) -> Result<Vec<(Embedding, Embedding)>> {
    let regions = convex_regions(m);
    let mut out = Vec::new();
    for r2 in &regions {
        let g = Embedding::inclusion(m.clone(), r2)?;
        let sub = g.source().clone();
        for r1 in regions.iter().filter(|r1| r1.is_subset(r2)) {
            let names = r1.names(m);
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            let f = Embedding::inclusion(sub.clone(), &sub.region(&names)?)?;
            out.push((f, g.clone()));
        }
    }
    let pt = Arc::new(fixtures::point("x"));
    let anti = Arc::new(fixtures::antichain2());
    for g in admissible_maps(&anti, m) {
        let g = Embedding::new(anti.clone(), m.clone(), g)?;
        for f in admissible_maps(&pt, &anti) {
            out.push((Embedding::new(pt.clone(), anti.clone(), f)?, g.clone()));
        }
    }
    Ok(out)
}

/// Unordered pairs of spacelike nonempty convex regions, as inclusions.
pub fn spacelike_pairs(m: &Arc<CausalSet>) -> Result<Vec<(Embedding, Embedding)>> {
    let regions = convex_regions(m);
    let mut out = Vec::new();
    for (i, r1) in regions.iter().enumerate() {
        for r2 in &regions[i + 1..] {
            if m.masks_spacelike(r1.mask(), r2.mask()) {
                out.push((Embedding::inclusion(m.clone(), r1)?, Embedding::inclusion(m.clone(), r2)?));
            }
        }
    }
    Ok(out)
}

/// Prefixes of a linear extension of `o`; each prefix is a convex down-set of `o`.
pub fn linear_cover(m: &CausalSet, o: &Region) -> Vec<Region> {
    let mut pts = o.points();
    pts.sort_by_key(|&x| (m.past(x).count_ones(), x));
    let mut mask = 0u64;
    pts.iter()
        .map(|&x| {
            mask |= 1 << x;
            o.with_mask(mask)
        })
        .collect()
}

fn split_pairs(m: &CausalSet) -> Vec<(Region, Region)> {
    let regions = convex_regions(m);
    let mut out = Vec::new();
    for r1 in &regions {
        for r2 in &regions {
            if r1.is_strict_subset(r2) && (r2.len() - r1.len()) <= 6 {
                out.push((r1.clone(), r2.clone()));
            }
        }
    }
    out
}

fn run_instances(
    axiom: Axiom,
    net: &HKNet,
    tol: &Tolerances,
    exec: Exec,
) -> Result<Vec<Instance>> {
    let model = net.model();
    let m = net.spacetime();
    let expectation = model.expected(axiom);
    match axiom {
        Axiom::Subsystems => {
            let mut maps = inclusions(m)?;
            maps.extend(maps_into(m));
            par::try_map_indexed(exec, maps.len(), |i| {
                Ok(Instance { report: check_subsystems(model, &maps[i], tol)?, expect_fail: false })
            })
        }
        Axiom::Covariance => {
            let pairs = covariance_pairs(m)?;
            par::try_map_indexed(exec, pairs.len(), |i| {
                Ok(Instance { report: check_covariance(model, &pairs[i].0, &pairs[i].1, tol)?, expect_fail: false })
            })
        }
        Axiom::Causality => {
            let pairs = spacelike_pairs(m)?;
            par::try_map_indexed(exec, pairs.len(), |i| {
                Ok(Instance {
                    report: check_einstein_causality(model, &pairs[i].0, &pairs[i].1, tol)?,
                    expect_fail: expectation == Expectation::ViolatedIfSpacelike,
                })
            })
        }
        Axiom::Timeslice => {
            let maps = inclusions(m)?;
            par::try_map_indexed(exec, maps.len(), |i| {
                let f = &maps[i];
                let image = f.image();
                let proper_cauchy = is_cauchy_region(m, &image) && image.mask() != m.all_mask();
                Ok(Instance {
                    report: check_timeslice(model, f, tol)?,
                    expect_fail: proper_cauchy && expectation == Expectation::ViolatedIfProperCauchy,
                })
            })
        }
        Axiom::Additivity => {
            let regions = convex_regions(m);
            par::try_map_indexed(exec, regions.len(), |i| {
                let cover = linear_cover(m, &regions[i]);
                Ok(Instance { report: check_additivity(net, &regions[i], &cover, tol)?, expect_fail: false })
            })
        }
        Axiom::Split => {
            let pairs = split_pairs(m);
            par::try_map_indexed(exec, pairs.len(), |i| {
                let (o1, o2) = &pairs[i];
                let report = match check_split(net, o1, o2, tol) {
                    Ok(outcome) => outcome.report,
                    Err(Error::NoIntermediateFactor { searched }) => {
                        let mut r = AxiomReport::measured(
                            Axiom::Split,
                            format!("{} < {}", o1.label(m), o2.label(m)),
                            f64::INFINITY,
                            tol.verification,
                        );
                        r.passed = false;
                        r.witness = Some(json!({"candidates_searched": searched}));
                        r
                    }
                    Err(e) => return Err(e),
                };
                Ok(Instance { report, expect_fail: false })
            })
        }
    }
}

/// Runs the requested checks over the canonical instance families of `m`.
pub fn run_axiom_suite(
    model: &NetModel,
    m: Arc<CausalSet>,
    checks: &[Axiom],
    tol: &Tolerances,
    exec: Exec,
) -> Result<Vec<CheckSummary>> {
    let net = HKNet::new(model.clone(), m.clone())?;
    let mut out = Vec::with_capacity(checks.len());
    for &axiom in checks {
        let instances = run_instances(axiom, &net, tol, exec)?;
        let tolerance = instances.first().map(|i| i.report.tolerance).unwrap_or(match axiom {
            Axiom::Causality => tol.causality,
            Axiom::Covariance => tol.covariance,
            _ => tol.verification,
        });
        let failures = instances.iter().filter(|i| !i.report.passed).count();
        let vacuous_instances = instances.iter().filter(|i| i.report.vacuous).count();
        let max_deviation = instances.iter().map(|i| i.report.max_deviation).fold(0.0, f64::max);
        let matches_expectation = instances.iter().all(|i| i.report.passed != i.expect_fail);
        let witness = instances.iter().find(|i| !i.report.passed).map(|i| {
            json!({"instance": i.report.instance, "deviation": i.report.max_deviation, "detail": i.report.witness})
        });
        let mut notes: Vec<String> = Vec::new();
        for i in &instances {
            for n in &i.report.notes {
                if !notes.contains(n) {
                    notes.push(n.clone());
                }
            }
        }
        out.push(CheckSummary {
            axiom,
            spacetime: m.name().to_string(),
            model: model.name(),
            passed: failures == 0,
            vacuous: vacuous_instances == instances.len(),
            instances: instances.len(),
            failures,
            vacuous_instances,
            max_deviation,
            tolerance,
            expected: model.expected(axiom),
            matches_expectation,
            witness,
            notes,
            reports: instances.into_iter().map(|i| i.report).collect(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::DiagonalNet;

    fn arc(m: CausalSet) -> Arc<CausalSet> {
        Arc::new(m)
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = tol();
        t.set("isometry", 1e-6).unwrap();
        assert_eq!(t.isometry, 1e-6);
        assert!(t.set("bogus", 1.0).is_err());
        assert!(t.set("replay", f64::NAN).is_err());
        assert!(serde_json::from_str::<Tolerances>(r#"{"nope": 1}"#).is_err());
        assert_eq!(serde_json::from_str::<Tolerances>(r#"{"causality": 1e-6}"#).unwrap().causality, 1e-6);
    }

    #[test]
    fn subsystems_examples() {
        let q = NetModel::qubit();
        let anti = arc(fixtures::antichain2());
        assert!(check_subsystems(&q, &Embedding::identity(anti.clone()), &tol()).unwrap().passed);
        let f = Embedding::from_names(arc(fixtures::point("x")), anti, &[("x", "a")]).unwrap();
        let h = morphism_of(&q, &f).unwrap();
        assert!(check_hom_contract(&h, "pt".into(), &tol()).passed);

        // Drop the unit: subtract the identity component of every input.
        let src = h.source().clone();
        let unit_dir = CMatrix::identity(2).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let broken = StarHom::from_fn(src.clone(), 4, |x| {
            let c = unit_dir.hs_inner(x);
            let mut y = x.clone();
            y.axpy(-c, &unit_dir);
            h.apply(&y)
        })
        .unwrap();
        let r = check_hom_contract(&broken, "broken".into(), &tol());
        assert!(!r.passed);
        let unit = r.witness.unwrap()["unit"].as_f64().unwrap();
        assert!((unit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn covariance_examples() {
        let d = arc(fixtures::diamond());
        let id = Embedding::identity(d.clone());
        assert_eq!(check_covariance(&NetModel::qubit(), &id, &id, &tol()).unwrap().max_deviation, 0.0);
        // Fermion bases come out of Gram-Schmidt, so only roundoff remains.
        assert!(check_covariance(&NetModel::fermion(), &id, &id, &tol()).unwrap().max_deviation <= 1e-14);
        for model in [NetModel::qubit(), NetModel::fermion()] {
            let pt = arc(fixtures::point("x"));
            let anti = arc(fixtures::antichain2());
            let f = Embedding::from_names(pt, anti.clone(), &[("x", "b")]).unwrap();
            let g = Embedding::from_names(anti, d.clone(), &[("a", "q"), ("b", "r")]).unwrap();
            assert!(check_covariance(&model, &f, &g, &tol()).unwrap().passed);
        }
    }

    #[test]
    fn causality_examples() {
        let anti = arc(fixtures::antichain2());
        let (fa, fb) = (
            Embedding::inclusion(anti.clone(), &anti.region(&["a"]).unwrap()).unwrap(),
            Embedding::inclusion(anti.clone(), &anti.region(&["b"]).unwrap()).unwrap(),
        );
        assert_eq!(check_einstein_causality(&NetModel::trivial(), &fa, &fb, &tol()).unwrap().max_deviation, 0.0);
        assert_eq!(check_einstein_causality(&NetModel::qubit(), &fa, &fb, &tol()).unwrap().max_deviation, 0.0);
        let r = check_einstein_causality(&NetModel::fermion(), &fa, &fb, &tol()).unwrap();
        assert!(!r.passed);
        assert!((r.max_deviation - 2.0).abs() < 1e-9, "{}", r.max_deviation);

        let c = arc(fixtures::chain2());
        let (ga, gb) = (
            Embedding::inclusion(c.clone(), &c.region(&["a"]).unwrap()).unwrap(),
            Embedding::inclusion(c.clone(), &c.region(&["b"]).unwrap()).unwrap(),
        );
        assert!(matches!(check_einstein_causality(&NetModel::qubit(), &ga, &gb, &tol()), Err(Error::NotSpacelike(..))));
    }

    #[test]
    fn timeslice_examples() {
        let c = arc(fixtures::chain2());
        let fa = Embedding::inclusion(c.clone(), &c.region(&["a"]).unwrap()).unwrap();
        assert!(check_timeslice(&NetModel::trivial(), &fa, &tol()).unwrap().passed);
        let r = check_timeslice(&NetModel::qubit(), &fa, &tol()).unwrap();
        assert!(!r.passed && !r.vacuous);
        let w = r.witness.unwrap();
        assert_eq!((w["image_dim"].as_u64(), w["spacetime_dim"].as_u64()), (Some(4), Some(16)));

        let anti = arc(fixtures::antichain2());
        let fa = Embedding::inclusion(anti.clone(), &anti.region(&["a"]).unwrap()).unwrap();
        let r = check_timeslice(&NetModel::qubit(), &fa, &tol()).unwrap();
        assert!(r.passed && r.vacuous);
    }

    #[test]
    fn additivity_examples() {
        let anti = arc(fixtures::antichain2());
        let net = HKNet::new(NetModel::qubit(), anti.clone()).unwrap();
        let all = Region::all(&anti);
        assert!(check_additivity(&net, &all, std::slice::from_ref(&all), &tol()).unwrap().passed);
        let a = anti.region(&["a"]).unwrap();
        assert!(check_additivity(&net, &all, &[a.clone(), all.clone()], &tol()).unwrap().passed);
        assert!(matches!(check_additivity(&net, &all, std::slice::from_ref(&a), &tol()), Err(Error::NotCovering(_))));
        assert!(matches!(check_additivity(&net, &all, &[all.clone(), a], &tol()), Err(Error::NotIncreasing(1))));
    }

    #[test]
    fn split_examples() {
        let anti = arc(fixtures::antichain2());
        let (a, all) = (anti.region(&["a"]).unwrap(), Region::all(&anti));
        let net = HKNet::new(NetModel::qubit(), anti.clone()).unwrap();
        let out = check_split(&net, &a, &all, &tol()).unwrap();
        assert!(out.report.passed);
        assert_eq!(out.factor_sites, vec!["a".to_string()]);
        assert!(out.classification.is_factor);
        assert_eq!(out.classification.blocks[0].block_dim, 2);

        let net = HKNet::new(NetModel::trivial(), anti.clone()).unwrap();
        let out = check_split(&net, &a, &all, &tol()).unwrap();
        assert_eq!(out.classification.blocks[0].block_dim, 1);

        let net = DiagonalNet::new(anti.clone());
        assert!(matches!(check_split(&net, &a, &all, &tol()), Err(Error::NoIntermediateFactor { searched: 2 })));
        assert!(matches!(check_split(&net, &all, &a, &tol()), Err(Error::NotNested { .. })));
    }

    #[test]
    fn suite_matches_expectations() {
        for m in fixtures::small() {
            for model in [NetModel::trivial(), NetModel::qubit(), NetModel::fermion()] {
                let summaries = run_axiom_suite(&model, m.clone(), &Axiom::ALL, &tol(), Exec::default()).unwrap();
                for s in &summaries {
                    assert!(s.matches_expectation, "{} {} {}", model.name(), m.name(), s.axiom);
                }
            }
        }
    }
}
