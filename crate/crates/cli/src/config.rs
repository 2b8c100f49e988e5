use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use clap::ValueEnum;
use loccov_core::axioms::Tolerances;
use loccov_core::causet::{CausalSet, CausalSetFile};
use loccov_core::fixtures;
use loccov_core::nets::{ModelKind, ModelSpec, NetModel, NET_MAX_DIM};
use loccov_core::tensor::KRON_MAX_DIM;
use serde::{Deserialize, Serialize};

pub const SEED_ENV: &str = "LOCCOV_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl From<loccov_core::Error> for CliError {
    fn from(e: loccov_core::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// A spacetime given by fixture name or inline.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FixtureRef {
    Name(String),
    Inline(CausalSetFile),
}

impl FixtureRef {
    pub fn load(&self) -> Result<Arc<CausalSet>, CliError> {
        match self {
            FixtureRef::Name(name) => load_spacetime(name),
            FixtureRef::Inline(file) => Ok(Arc::new(CausalSet::from_file(file)?)),
        }
    }
}

/// Contents of a `--config` file. Every key is optional; command-line flags
/// take precedence.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<ModelSpec>,
    pub spacetime: Option<String>,
    pub checks: Option<Vec<String>>,
    pub fixtures: Option<Vec<FixtureRef>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub nested_mode: Option<bool>,
    pub tolerances: Option<BTreeMap<String, f64>>,
    pub max_dim: Option<usize>,
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Settings shared by every command after merging flags, config file and
/// environment.
#[derive(Clone, Debug)]
pub struct Global {
    pub format: Format,
    pub tolerances: Tolerances,
    pub max_dim: usize,
    pub seed: u64,
    pub timing: bool,
    pub sequential: bool,
    pub file: ConfigFile,
}

pub struct GlobalFlags<'a> {
    pub format: Option<Format>,
    pub tol: &'a [String],
    pub max_dim: Option<usize>,
    pub seed: Option<u64>,
    pub timing: bool,
    pub sequential: bool,
}

impl Global {
    pub fn resolve(flags: GlobalFlags<'_>, file: ConfigFile, env_seed: Option<String>) -> Result<Self, CliError> {
        let mut tolerances = Tolerances::default();
        for (name, value) in file.tolerances.iter().flatten() {
            tolerances.set(name, *value).map_err(|e| CliError::Config(e.to_string()))?;
        }
        for entry in flags.tol {
            let (name, value) = entry
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--tol expects NAME=VALUE, got `{entry}`")))?;
            let value: f64 =
                value.trim().parse().map_err(|_| CliError::Config(format!("tolerance `{name}` is not a number")))?;
            tolerances.set(name.trim(), value).map_err(|e| CliError::Config(e.to_string()))?;
        }
        let max_dim = flags.max_dim.or(file.max_dim).unwrap_or(NET_MAX_DIM);
        if max_dim == 0 || max_dim > KRON_MAX_DIM {
            return Err(CliError::Config(format!("max_dim must be in 1..={KRON_MAX_DIM}, got {max_dim}")));
        }
        let env_seed = match env_seed {
            Some(s) => Some(s.trim().parse::<u64>().map_err(|_| CliError::Config(format!("{SEED_ENV} must be an unsigned integer, got `{s}`")))?),
            None => None,
        };
        let seed = flags.seed.or(file.seed).or(env_seed).unwrap_or(0);
        Ok(Global {
            format: flags.format.or(file.format).unwrap_or_default(),
            tolerances,
            max_dim,
            seed,
            timing: flags.timing,
            sequential: flags.sequential,
            file,
        })
    }

    pub fn model(&self, flag: Option<&str>) -> Result<NetModel, CliError> {
        let spec = match flag {
            Some(s) => parse_model(s)?,
            None => self.file.model.clone().ok_or_else(|| CliError::Config("no model given (use --model)".into()))?,
        };
        Ok(NetModel::from_spec(&spec).map_err(|e| CliError::Config(e.to_string()))?.with_max_dim(self.max_dim))
    }

    pub fn spacetime(&self, flag: Option<&str>) -> Result<Arc<CausalSet>, CliError> {
        match flag.or(self.file.spacetime.as_deref()) {
            Some(s) => load_spacetime(s),
            None => Err(CliError::Config("no spacetime given (use --spacetime)".into())),
        }
    }

    pub fn exec(&self) -> loccov_core::par::Exec {
        if self.sequential {
            loccov_core::par::Exec::Sequential
        } else {
            loccov_core::par::Exec::Parallel
        }
    }
}

/// `qubit`, `fermion`, `trivial`, `qudit:<d>`, or an inline JSON spec.
pub fn parse_model(s: &str) -> Result<ModelSpec, CliError> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| CliError::Config(format!("model spec: {e}")));
    }
    if let Some(d) = s.strip_prefix("qudit:") {
        let d: usize = d.parse().map_err(|_| CliError::Config(format!("bad site dimension in `{s}`")))?;
        return Ok(ModelSpec { kind: ModelKind::Qubit, site_dim: Some(d) });
    }
    let kind: ModelKind = s.parse().map_err(|e: loccov_core::Error| CliError::Config(e.to_string()))?;
    Ok(ModelSpec { kind, site_dim: None })
}

/// Bundled fixture name or path to a causal-set JSON file.
pub fn load_spacetime(s: &str) -> Result<Arc<CausalSet>, CliError> {
    if fixtures::NAMES.contains(&s) {
        return Ok(Arc::new(fixtures::by_name(s)?));
    }
    let path = Path::new(s);
    if !path.exists() {
        return Err(CliError::Input(format!(
            "`{s}` is neither a bundled fixture ({}) nor a file",
            fixtures::NAMES.join(", ")
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{s}: {e}")))?;
    let file: CausalSetFile = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{s}: {e}")))?;
    Ok(Arc::new(CausalSet::from_file(&file).map_err(|e| CliError::Input(format!("{s}: {e}")))?))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(tol: &[String]) -> GlobalFlags<'_> {
        GlobalFlags { format: None, tol, max_dim: None, seed: None, timing: false, sequential: false }
    }

    #[test]
    fn seed_precedence() {
        let g = Global::resolve(flags(&[]), ConfigFile::default(), None).unwrap();
        assert_eq!(g.seed, 0);
        let g = Global::resolve(flags(&[]), ConfigFile::default(), Some("7".into())).unwrap();
        assert_eq!(g.seed, 7);
        let file = ConfigFile { seed: Some(3), ..Default::default() };
        let g = Global::resolve(flags(&[]), file, Some("7".into())).unwrap();
        assert_eq!(g.seed, 3);
        assert!(Global::resolve(flags(&[]), ConfigFile::default(), Some("x".into())).is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let tol = vec!["isometry=1e-6".to_string()];
        let g = Global::resolve(flags(&tol), ConfigFile::default(), None).unwrap();
        assert_eq!(g.tolerances.isometry, 1e-6);
        for bad in ["isometry", "bogus=1", "isometry=-1"] {
            let tol = vec![bad.to_string()];
            assert!(matches!(Global::resolve(flags(&tol), ConfigFile::default(), None), Err(CliError::Config(_))));
        }
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(serde_json::from_str::<ConfigFile>(r#"{"seed": 1, "sampels": 3}"#).is_err());
        let c: ConfigFile = serde_json::from_str(r#"{"model": {"type": "qubit"}, "fixtures": ["diamond", {"name": "x", "points": ["a"], "covers": []}]}"#).unwrap();
        assert_eq!(c.fixtures.unwrap().len(), 2);
    }

    #[test]
    fn max_dim_is_capped() {
        let mut f = flags(&[]);
        f.max_dim = Some(8192);
        assert!(matches!(Global::resolve(f, ConfigFile::default(), None), Err(CliError::Config(_))));
    }

    #[test]
    fn model_strings() {
        assert_eq!(parse_model("fermion").unwrap().kind, ModelKind::Fermion);
        assert_eq!(parse_model("qudit:3").unwrap().site_dim, Some(3));
        assert_eq!(parse_model(r#"{"type": "trivial"}"#).unwrap().kind, ModelKind::Trivial);
        assert!(parse_model("boson").is_err());
    }
}
