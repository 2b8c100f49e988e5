use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use loccov_core::axioms::{check_subsystems, run_axiom_suite, spacelike_pairs};
use loccov_core::causet::{
    cauchy_antichain, convex_regions, is_admissible, CausalSet, Embedding, EmbeddingFile, Region,
};
use loccov_core::cstar::{faithful_variant, generate_algebra, Representation, StarAlgebra};
use loccov_core::fixtures;
use loccov_core::functor_ext::{
    equivalence_spacetimes, isometry_theorem_check, theorem_equivalence_on, IsometryConfig,
};
use loccov_core::linalg::CMatrix;
use loccov_core::nets::Axiom;
use loccov_core::tensor::{min_norm, TensorElement};
use loccov_core::Error;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{load_spacetime, read_json, CliError, FixtureRef, Global};
use crate::report::CheckResult;

pub type Outcome = Result<(Value, Vec<CheckResult>), CliError>;

/// Errors raised while a check is running are reported as failed results;
/// everything else is a problem with the inputs.
fn captured(e: &Error) -> bool {
    matches!(
        e,
        Error::Numerical(_) | Error::NotFaithful { .. } | Error::NotInAlgebra { .. } | Error::InvalidHom(_)
    )
}

fn capture<T>(name: &str, r: loccov_core::Result<T>) -> Result<Result<T, CheckResult>, CliError> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e) if captured(&e) => Ok(Err(CheckResult::new(name, false).witness(Some(json!({"error": e.to_string()}))))),
        Err(e) => Err(e.into()),
    }
}

fn region_from_list(m: &CausalSet, list: &str) -> Result<Region, CliError> {
    let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    Ok(m.region(&names)?)
}

pub fn causet_validate(g: &Global, spacetime: Option<&str>) -> Outcome {
    let m = g.spacetime(spacetime)?;
    let relations = m.reach().pairs().len();
    let mut detail = json!({
        "name": m.name(),
        "points": m.len(),
        "covers": m.covers().len(),
        "relations": relations,
        "connected": m.is_connected(),
        "maximal_chains": m.maximal_chains().len(),
    });
    if m.len() <= 16 {
        detail["convex_regions"] = json!(convex_regions(&m).len());
        let whole = Region::all(&m);
        detail["cauchy_antichain"] = json!(cauchy_antichain(&m, &whole).map(|r| r.names(&m)));
    }
    let inputs = json!({"spacetime": m.to_file()});
    Ok((inputs, vec![CheckResult::new("causal_set", true).detail(detail)]))
}

pub struct EmbedArgs<'a> {
    pub source: &'a str,
    pub target: &'a str,
    pub file: Option<&'a Path>,
    pub map: &'a [String],
    pub model: Option<&'a str>,
}

pub fn embed_check(g: &Global, a: EmbedArgs<'_>) -> Outcome {
    let (n, m) = (load_spacetime(a.source)?, load_spacetime(a.target)?);
    let pairs: BTreeMap<String, String> = match a.file {
        Some(path) => {
            let file: EmbeddingFile = read_json(path)?;
            if file.from != n.name() || file.to != m.name() {
                return Err(CliError::Input(format!(
                    "embedding maps `{}` -> `{}` but the spacetimes are `{}` -> `{}`",
                    file.from,
                    file.to,
                    n.name(),
                    m.name()
                )));
            }
            file.map
        }
        None => a
            .map
            .iter()
            .map(|e| {
                e.split_once('=')
                    .map(|(x, y)| (x.trim().to_string(), y.trim().to_string()))
                    .ok_or_else(|| CliError::Config(format!("--map expects SOURCE=TARGET, got `{e}`")))
            })
            .collect::<Result<_, _>>()?,
    };
    let mut idx = Vec::with_capacity(n.len());
    for p in n.points() {
        let t = pairs.get(p).ok_or_else(|| CliError::Input(format!("point `{p}` of `{}` is not mapped", n.name())))?;
        idx.push(m.index_of(t)?);
    }
    for key in pairs.keys() {
        n.index_of(key)?;
    }
    let adm = is_admissible(&idx, &n, &m);
    let mut inputs = json!({"source": n.name(), "target": m.name(), "map": pairs});
    let mut results = vec![CheckResult::new("admissible", adm.admissible)
        .witness((!adm.admissible).then(|| json!(adm.violations)))
        .detail(json!(adm))];
    if let Some(model_flag) = a.model {
        let model = g.model(Some(model_flag))?;
        inputs["model"] = json!(model.spec());
        if adm.admissible {
            let f = Embedding::new(n.clone(), m.clone(), idx)?;
            match capture("subsystems", check_subsystems(&model, &f, &g.tolerances))? {
                Ok(r) => results.push(
                    CheckResult::new("subsystems", r.passed)
                        .deviation(r.max_deviation, r.tolerance)
                        .witness(if r.passed { None } else { r.witness.clone() })
                        .detail(json!(r)),
                ),
                Err(failed) => results.push(failed),
            }
        }
    }
    Ok((inputs, results))
}

pub fn axioms_run(g: &Global, model: Option<&str>, spacetime: Option<&str>, checks: &[String]) -> Outcome {
    let model = g.model(model)?;
    let m = g.spacetime(spacetime)?;
    let names: Vec<String> = if !checks.is_empty() {
        checks.iter().flat_map(|c| c.split(',')).map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
    } else {
        g.file.checks.clone().unwrap_or_default()
    };
    let axioms: Vec<Axiom> = if names.is_empty() {
        Axiom::ALL.to_vec()
    } else {
        names.iter().map(|s| s.parse::<Axiom>()).collect::<Result<_, _>>().map_err(|e| CliError::Config(e.to_string()))?
    };
    let inputs = json!({
        "model": model.spec(),
        "spacetime": m.name(),
        "checks": axioms.iter().map(|a| a.name()).collect::<Vec<_>>(),
        "seed": g.seed,
        "tolerances": g.tolerances,
        "max_dim": model.max_dim(),
    });
    let summaries = match capture("axioms", run_axiom_suite(&model, m, &axioms, &g.tolerances, g.exec()))? {
        Ok(s) => s,
        Err(failed) => return Ok((inputs, vec![failed])),
    };
    let results = summaries
        .into_iter()
        .map(|s| {
            CheckResult::new(s.axiom.name(), s.passed)
                .vacuous(s.vacuous)
                .deviation(s.max_deviation, s.tolerance)
                .witness(s.witness.clone())
                .detail(json!({
                    "instances": s.instances,
                    "failures": s.failures,
                    "vacuous_instances": s.vacuous_instances,
                    "expected": s.expected,
                    "matches_expectation": s.matches_expectation,
                    "notes": s.notes,
                }))
        })
        .collect();
    Ok((inputs, results))
}

fn fixture_list(g: &Global, flag: &[String]) -> Result<Option<Vec<Arc<CausalSet>>>, CliError> {
    if !flag.is_empty() {
        let refs: Vec<FixtureRef> =
            flag.iter().flat_map(|c| c.split(',')).map(|s| FixtureRef::Name(s.trim().to_string())).collect();
        return refs.iter().map(FixtureRef::load).collect::<Result<_, _>>().map(Some);
    }
    match &g.file.fixtures {
        Some(list) => list.iter().map(FixtureRef::load).collect::<Result<_, _>>().map(Some),
        None => Ok(None),
    }
}

pub fn theorem_equivalence(g: &Global, model: Option<&str>, fixtures_flag: &[String]) -> Outcome {
    let model = g.model(model)?;
    let spacetimes = fixture_list(g, fixtures_flag)?.unwrap_or_else(equivalence_spacetimes);
    for m in &spacetimes {
        spacelike_pairs(m)?;
    }
    let inputs = json!({
        "model": model.spec(),
        "fixtures": spacetimes.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "seed": g.seed,
        "tolerances": g.tolerances,
    });
    let report = match capture("equivalence", theorem_equivalence_on(&model, &spacetimes, &g.tolerances, g.exec()))? {
        Ok(r) => r,
        Err(failed) => return Ok((inputs, vec![failed])),
    };
    let laws: Vec<Value> = report.functor.laws.iter().map(|l| json!(l)).collect();
    let equivalence = CheckResult::new("equivalence", report.consistent)
        .witness((!report.consistent).then(|| json!({"p_causal": report.p_causal, "q_functor": report.q_functor})))
        .detail(json!({
            "p_causal": report.p_causal,
            "q_functor": report.q_functor,
            "causality_checks": report.causality_checks,
            "causality_max": report.causality_max,
            "causality_witness": report.causality_witness,
            "extension_multiplicativity": report.extension_multiplicativity,
            "maps_checked": report.functor.maps_checked,
            "composable_pairs": report.functor.composable_pairs,
            "root_cause": report.functor.root_cause,
            "laws": laws,
        }));
    let replay = match &report.replay {
        Some(r) => CheckResult::new("replay", r.passed)
            .deviation(r.max_deviation, g.tolerances.replay)
            .detail(json!({"pairs": r.pairs, "basis_pairs": r.basis_pairs})),
        None => CheckResult::new("replay", true)
            .vacuous(true)
            .detail(json!({"note": "model is not causal, so there is nothing to replay"})),
    };
    Ok((inputs, vec![equivalence, replay]))
}

pub struct IsometryArgs<'a> {
    pub model: Option<&'a str>,
    pub spacetime: Option<&'a str>,
    pub fixtures: &'a [String],
    pub o1: Option<&'a str>,
    pub o2: Option<&'a str>,
    pub o: Option<&'a str>,
    pub samples: Option<usize>,
    pub nested: bool,
}

pub fn theorem_isometry(g: &Global, a: IsometryArgs<'_>) -> Outcome {
    let model = g.model(a.model)?;
    let spacetimes = match (a.spacetime, fixture_list(g, a.fixtures)?) {
        (Some(s), _) => vec![load_spacetime(s)?],
        (None, Some(list)) => list,
        (None, None) => vec![g.spacetime(None)?],
    };
    let cfg = IsometryConfig {
        samples: a.samples.or(g.file.samples).unwrap_or(200),
        seed: g.seed,
        nested: a.nested || g.file.nested_mode.unwrap_or(false),
        exec: g.exec(),
    };
    let mut inputs = json!({
        "model": model.spec(),
        "fixtures": spacetimes.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "samples": cfg.samples,
        "seed": cfg.seed,
        "nested_mode": cfg.nested,
        "tolerances": g.tolerances,
    });
    let mut results = Vec::new();
    let mut regions = Vec::new();
    for m in spacetimes {
        let (d1, d2, d) = match (a.o1, a.o2) {
            (Some(_), Some(_)) => (Region::empty(&m), Region::empty(&m), Region::all(&m)),
            _ => fixtures::default_isometry_regions(&m)?,
        };
        let o1 = a.o1.map(|s| region_from_list(&m, s)).transpose()?.unwrap_or(d1);
        let o2 = a.o2.map(|s| region_from_list(&m, s)).transpose()?.unwrap_or(d2);
        let o = a.o.map(|s| region_from_list(&m, s)).transpose()?.unwrap_or(d);
        regions.push(json!({"spacetime": m.name(), "o1": o1.names(&m), "o2": o2.names(&m), "o": o.names(&m)}));
        let name = format!("isometry[{}]", m.name());
        match capture(&name, isometry_theorem_check(&model, m.clone(), &o1, &o2, &o, &cfg, &g.tolerances))? {
            Ok(r) => results.push(
                CheckResult::new(name, r.passed)
                    .deviation(r.max_deviation, r.tolerance)
                    .witness(if r.passed { None } else { r.worst.as_ref().map(|w| json!(w)) })
                    .detail(json!(r)),
            ),
            Err(failed) => results.push(failed),
        }
    }
    inputs["regions"] = json!(regions);
    Ok((inputs, results))
}

/// Input of `norm min`: terms `Σ A_n ⊗ B_n` and optional generators of the
/// two algebras (full matrix algebras by default).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormInput {
    pub terms: Vec<(CMatrix, CMatrix)>,
    #[serde(default)]
    pub left_generators: Option<Vec<CMatrix>>,
    #[serde(default)]
    pub right_generators: Option<Vec<CMatrix>>,
}

fn side_algebra(dim: usize, gens: &Option<Vec<CMatrix>>) -> Result<Arc<StarAlgebra>, CliError> {
    Ok(Arc::new(match gens {
        Some(g) => generate_algebra(dim, g)?,
        None => StarAlgebra::full(dim),
    }))
}

pub fn norm_min(g: &Global, input: &Path) -> Outcome {
    let parsed: NormInput = read_json(input)?;
    let first = parsed.terms.first().ok_or_else(|| CliError::Input("`terms` is empty".into()))?;
    let (dl, dr) = (first.0.dim(), first.1.dim());
    let left = side_algebra(dl, &parsed.left_generators)?;
    let right = side_algebra(dr, &parsed.right_generators)?;
    let t = TensorElement::new(left.clone(), right.clone(), parsed.terms.clone())?;
    let inputs = json!({"input": input.display().to_string(), "terms": t.len(), "left_dim": dl, "right_dim": dr, "seed": g.seed});
    let ids = (Representation::identity(left.clone()), Representation::identity(right.clone()));
    let variants = (faithful_variant(left, g.seed), faithful_variant(right, g.seed.wrapping_add(1)));
    let norm = match capture("min_norm", min_norm(&t, &ids.0, &ids.1))? {
        Ok(v) => v,
        Err(failed) => return Ok((inputs, vec![failed])),
    };
    let other = match capture("min_norm", min_norm(&t, &variants.0, &variants.1))? {
        Ok(v) => v,
        Err(failed) => return Ok((inputs, vec![failed])),
    };
    let deviation = (norm - other).abs() / norm.max(1.0);
    let tol = g.tolerances.verification;
    let result = CheckResult::new("min_norm", deviation <= tol).deviation(deviation, tol).detail(json!({
        "norm": norm,
        "variant_norm": other,
        "variant_dims": [variants.0.rep_dim(), variants.1.rep_dim()],
    }));
    Ok((inputs, vec![result]))
}
