//! Concrete nets: region algebras and the homomorphisms induced by
//! admissible embeddings.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::causet::{bits, CausalSet, Embedding, Region};
use crate::cstar::{StarAlgebra, StarHom};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Default cap on the ambient dimension of materialized net algebras.
pub const NET_MAX_DIM: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Trivial,
    Qubit,
    Fermion,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Trivial => "trivial",
            ModelKind::Qubit => "qubit",
            ModelKind::Fermion => "fermion",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(ModelKind::Trivial),
            "qubit" => Ok(ModelKind::Qubit),
            "fermion" => Ok(ModelKind::Fermion),
            other => Err(Error::Invalid(format!("unknown model `{other}` (expected trivial, qubit or fermion)"))),
        }
    }
}

/// JSON model description: `{"type": "qubit", "site_dim": 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(rename = "type")]
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site_dim: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axiom {
    Subsystems,
    Covariance,
    Causality,
    Timeslice,
    Additivity,
    Split,
}

impl Axiom {
    pub const ALL: [Axiom; 6] =
        [Axiom::Subsystems, Axiom::Covariance, Axiom::Causality, Axiom::Timeslice, Axiom::Additivity, Axiom::Split];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Subsystems => "subsystems",
            Axiom::Covariance => "covariance",
            Axiom::Causality => "causality",
            Axiom::Timeslice => "timeslice",
            Axiom::Additivity => "additivity",
            Axiom::Split => "split",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown check `{s}`")))
    }
}

/// Declared outcome of an axiom check for a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Holds,
    /// Fails exactly on embeddings whose image is Cauchy but not everything.
    ViolatedIfProperCauchy,
    /// Fails exactly on spacelike pairs with nontrivial algebras.
    ViolatedIfSpacelike,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetModel {
    kind: ModelKind,
    site_dim: usize,
    max_dim: usize,
}

impl NetModel {
    pub fn trivial() -> Self {
        NetModel { kind: ModelKind::Trivial, site_dim: 1, max_dim: NET_MAX_DIM }
    }

    pub fn qubit() -> Self {
        NetModel { kind: ModelKind::Qubit, site_dim: 2, max_dim: NET_MAX_DIM }
    }

    /// Site-tensor model with `site_dim`-level sites.
    pub fn qudit(site_dim: usize) -> Result<Self> {
        if site_dim == 0 {
            return Err(Error::Invalid("site_dim must be at least 1".into()));
        }
        Ok(NetModel { kind: ModelKind::Qubit, site_dim, max_dim: NET_MAX_DIM })
    }

    pub fn fermion() -> Self {
        NetModel { kind: ModelKind::Fermion, site_dim: 2, max_dim: NET_MAX_DIM }
    }

    pub fn of_kind(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Trivial => NetModel::trivial(),
            ModelKind::Qubit => NetModel::qubit(),
            ModelKind::Fermion => NetModel::fermion(),
        }
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        match (spec.kind, spec.site_dim) {
            (ModelKind::Qubit, Some(d)) => NetModel::qudit(d),
            (ModelKind::Trivial, Some(d)) if d != 1 => Err(Error::Invalid("trivial model has site_dim 1".into())),
            (ModelKind::Fermion, Some(d)) if d != 2 => Err(Error::Invalid("fermion model has site_dim 2".into())),
            (kind, _) => Ok(NetModel::of_kind(kind)),
        }
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec { kind: self.kind, site_dim: Some(self.site_dim) }
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Self {
        self.max_dim = max_dim;
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn site_dim(&self) -> usize {
        self.site_dim
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn name(&self) -> String {
        match (self.kind, self.site_dim) {
            (ModelKind::Qubit, d) if d != 2 => format!("qudit{d}"),
            (k, _) => k.to_string(),
        }
    }

    /// `site_dim^points`, bounded by the materialization cap.
    pub fn ambient_dim(&self, points: usize) -> Result<usize> {
        let dim = self.site_dim.checked_pow(points as u32).unwrap_or(usize::MAX);
        if dim > self.max_dim {
            return Err(Error::MaxDimExceeded { dim, cap: self.max_dim });
        }
        Ok(dim)
    }

    pub fn expected(&self, axiom: Axiom) -> Expectation {
        match (self.kind, axiom) {
            (ModelKind::Trivial, _) => Expectation::Holds,
            _ if self.site_dim == 1 => Expectation::Holds,
            (_, Axiom::Timeslice) => Expectation::ViolatedIfProperCauchy,
            (ModelKind::Fermion, Axiom::Causality) => Expectation::ViolatedIfSpacelike,
            _ => Expectation::Holds,
        }
    }

    pub fn expected_axioms(&self) -> BTreeMap<Axiom, Expectation> {
        Axiom::ALL.into_iter().map(|a| (a, self.expected(a))).collect()
    }
}

/// Kronecker product over `ops.len()` sites (site 0 most significant), with
/// the identity where no operator is given.
fn site_product(d: usize, ops: &[Option<CMatrix>]) -> CMatrix {
    let id = CMatrix::identity(d);
    ops.iter().fold(CMatrix::identity(1), |acc, op| acc.kron(op.as_ref().unwrap_or(&id)))
}

/// Matrix units `⊗_i E_{r_i c_i}` placed at `positions` (in enumeration order
/// of the digits), identity elsewhere, each multiplied by `scale`.
fn placed_units(d: usize, n_sites: usize, positions: &[usize], scale: f64) -> Vec<CMatrix> {
    let k = positions.len();
    let count = d.pow(2 * k as u32);
    (0..count)
        .map(|mut idx| {
            let mut ops: Vec<Option<CMatrix>> = vec![None; n_sites];
            for &pos in positions.iter().rev() {
                let c = idx % d;
                idx /= d;
                let r = idx % d;
                idx /= d;
                ops[pos] = Some(CMatrix::unit(d, r, c));
            }
            site_product(d, &ops).scale_real(scale)
        })
        .collect()
}

fn site_generators(d: usize, n_sites: usize, positions: &[usize]) -> Vec<CMatrix> {
    let mut out = Vec::new();
    for &pos in positions {
        for i in 0..d.saturating_sub(1) {
            let mut ops = vec![None; n_sites];
            ops[pos] = Some(CMatrix::unit(d, i, i + 1));
            out.push(site_product(d, &ops));
        }
    }
    out
}

/// Jordan-Wigner annihilator `Z ⊗ ... ⊗ Z ⊗ a ⊗ 1 ⊗ ... ⊗ 1` at `site`.
pub fn jw_annihilator(n_sites: usize, site: usize) -> CMatrix {
    let z = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
    let a = CMatrix::unit(2, 0, 1);
    let ops: Vec<Option<CMatrix>> = (0..n_sites)
        .map(|x| match x.cmp(&site) {
            std::cmp::Ordering::Less => Some(z.clone()),
            std::cmp::Ordering::Equal => Some(a.clone()),
            std::cmp::Ordering::Greater => None,
        })
        .collect();
    site_product(2, &ops)
}

/// Site-ordered monomials `∏ m_x` with `m_x ∈ {1, c_x, c_x*, c_x* c_x}` over
/// the annihilators at `positions`; spans the algebra they generate.
fn jw_monomials(n_sites: usize, positions: &[usize]) -> Vec<CMatrix> {
    let dim = 1usize << n_sites;
    let factors: Vec<[CMatrix; 4]> = positions
        .iter()
        .map(|&p| {
            let c = jw_annihilator(n_sites, p);
            let cd = c.adjoint();
            let n = &cd * &c;
            [CMatrix::identity(dim), c, cd, n]
        })
        .collect();
    let count = 4usize.pow(positions.len() as u32);
    (0..count)
        .map(|mut idx| {
            let mut choice = vec![0; positions.len()];
            for slot in choice.iter_mut().rev() {
                *slot = idx % 4;
                idx /= 4;
            }
            factors.iter().zip(&choice).fold(CMatrix::identity(dim), |acc, (f, &ch)| if ch == 0 { acc } else { &acc * &f[ch] })
        })
        .collect()
}

/// `𝔄(M)`: the algebra of the whole spacetime.
pub fn algebra_of(model: &NetModel, m: &CausalSet) -> Result<StarAlgebra> {
    restrict_net(model, m, &Region::all(m))
}

/// Algebra generated by the site operators at the points of `r`.
pub fn restrict_net(model: &NetModel, m: &CausalSet, r: &Region) -> Result<StarAlgebra> {
    m.check_region(r)?;
    let n = m.len();
    let dim = model.ambient_dim(n)?;
    let sites = r.points();
    Ok(match model.kind {
        ModelKind::Trivial => StarAlgebra::scalars(dim),
        ModelKind::Qubit => {
            let d = model.site_dim;
            let outside = n - sites.len();
            let scale = 1.0 / (d.pow(outside as u32) as f64).sqrt();
            let basis = placed_units(d, n, &sites, scale);
            StarAlgebra::from_orthonormal(dim, basis, site_generators(d, n, &sites))
        }
        ModelKind::Fermion => {
            let gens = sites.iter().map(|&x| jw_annihilator(n, x)).collect();
            StarAlgebra::from_spanning(dim, &jw_monomials(n, &sites), gens)
        }
    })
}

/// `α_f`: site operators at `x` go to the same operators at `f(x)`.
pub fn morphism_of(model: &NetModel, f: &Embedding) -> Result<StarHom> {
    let (src, tgt) = (f.source(), f.target());
    let (n, m) = (src.len(), tgt.len());
    let src_dim = model.ambient_dim(n)?;
    let tgt_dim = model.ambient_dim(m)?;
    match model.kind {
        ModelKind::Trivial => Ok(StarHom::identity(Arc::new(StarAlgebra::scalars(src_dim)))),
        ModelKind::Qubit => {
            let d = model.site_dim;
            let source = Arc::new(algebra_of(model, src)?);
            let images = placed_units(d, m, f.map(), 1.0);
            StarHom::new(source, tgt_dim, images)
        }
        ModelKind::Fermion => {
            let all: Vec<usize> = (0..n).collect();
            let inputs = jw_monomials(n, &all);
            let outputs = jw_monomials(m, f.map());
            let gens = all.iter().map(|&x| jw_annihilator(n, x)).collect();
            StarHom::from_pairs(src_dim, gens, &inputs, &outputs, tgt_dim)
        }
    }
}

/// Net on a fixed spacetime: region algebras of the concrete model.
pub trait LocalNet: Sync {
    fn spacetime(&self) -> &Arc<CausalSet>;

    fn region_algebra(&self, r: &Region) -> Result<Arc<StarAlgebra>>;

    /// Intermediate algebra supported on the site set `s`, as a split
    /// candidate.
    fn candidate_algebra(&self, s: &Region) -> Result<Arc<StarAlgebra>> {
        self.region_algebra(s)
    }
}

/// Haag-Kastler net of a model on one spacetime, with a region cache.
#[derive(Debug)]
pub struct HKNet {
    spacetime: Arc<CausalSet>,
    model: NetModel,
    cache: RwLock<HashMap<u64, Arc<StarAlgebra>>>,
}

impl HKNet {
    pub fn new(model: NetModel, spacetime: Arc<CausalSet>) -> Result<Self> {
        model.ambient_dim(spacetime.len())?;
        Ok(HKNet { spacetime, model, cache: RwLock::new(HashMap::new()) })
    }

    pub fn model(&self) -> &NetModel {
        &self.model
    }

    pub fn ambient_dim(&self) -> usize {
        self.model.ambient_dim(self.spacetime.len()).expect("checked at construction")
    }

    pub fn algebra(&self) -> Result<Arc<StarAlgebra>> {
        self.region_algebra(&Region::all(&self.spacetime))
    }

    pub fn morphism(&self, f: &Embedding) -> Result<StarHom> {
        morphism_of(&self.model, f)
    }

    /// `α_{M,O}`, the map induced by the inclusion of a convex region.
    pub fn inclusion_hom(&self, r: &Region) -> Result<StarHom> {
        morphism_of(&self.model, &Embedding::inclusion(self.spacetime.clone(), r)?)
    }
}

impl LocalNet for HKNet {
    fn spacetime(&self) -> &Arc<CausalSet> {
        &self.spacetime
    }

    fn region_algebra(&self, r: &Region) -> Result<Arc<StarAlgebra>> {
        self.spacetime.check_region(r)?;
        if let Some(a) = self.cache.read().expect("cache lock").get(&r.mask()) {
            return Ok(a.clone());
        }
        let a = Arc::new(restrict_net(&self.model, &self.spacetime, r)?);
        Ok(self.cache.write().expect("cache lock").entry(r.mask()).or_insert(a).clone())
    }
}

/// Constant abelian net: every nonempty region gets the diagonal algebra of
/// `M_2`. Used to exercise the failure path of the split search.
#[derive(Debug)]
pub struct DiagonalNet {
    spacetime: Arc<CausalSet>,
}

impl DiagonalNet {
    pub fn new(spacetime: Arc<CausalSet>) -> Self {
        DiagonalNet { spacetime }
    }
}

impl LocalNet for DiagonalNet {
    fn spacetime(&self) -> &Arc<CausalSet> {
        &self.spacetime
    }

    fn region_algebra(&self, r: &Region) -> Result<Arc<StarAlgebra>> {
        self.spacetime.check_region(r)?;
        if r.is_empty() {
            return Ok(Arc::new(StarAlgebra::scalars(2)));
        }
        let p = CMatrix::unit(2, 0, 0);
        Ok(Arc::new(StarAlgebra::from_spanning(2, &[p.clone(), CMatrix::unit(2, 1, 1)], vec![p])))
    }
}

/// Operator on a set of qubit-model sites, stored on those sites only.
/// Norms are unchanged by tensoring with identities, so products and norms
/// are evaluated on the union of supports.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator {
    site_dim: usize,
    sites: Vec<usize>,
    matrix: CMatrix,
}

fn digits_split(d: usize, outer: &[usize], inner: &[usize]) -> (Vec<usize>, Vec<usize>) {
    // For every index over `outer` sites: its index over the `inner` sites
    // and over the remaining sites.
    let total = d.pow(outer.len() as u32);
    let mut in_idx = vec![0; total];
    let mut rest_idx = vec![0; total];
    for (idx, (ii, ri)) in in_idx.iter_mut().zip(rest_idx.iter_mut()).enumerate() {
        let mut rem = idx;
        let mut digits = vec![0; outer.len()];
        for slot in digits.iter_mut().rev() {
            *slot = rem % d;
            rem /= d;
        }
        for (pos, &site) in outer.iter().enumerate() {
            if inner.binary_search(&site).is_ok() {
                *ii = *ii * d + digits[pos];
            } else {
                *ri = *ri * d + digits[pos];
            }
        }
    }
    (in_idx, rest_idx)
}

fn sorted_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

impl LocalOperator {
    pub fn new(site_dim: usize, sites: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("local operator sites must be strictly increasing".into()));
        }
        let expected = site_dim.pow(sites.len() as u32);
        if matrix.dim() != expected {
            return Err(Error::DimensionMismatch { expected, found: matrix.dim() });
        }
        Ok(LocalOperator { site_dim, sites, matrix })
    }

    pub fn identity(site_dim: usize) -> Self {
        LocalOperator { site_dim, sites: Vec::new(), matrix: CMatrix::identity(1) }
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn site_dim(&self) -> usize {
        self.site_dim
    }

    /// The same operator tensored with identities on `sites ⊇ self.sites`.
    pub fn embed(&self, sites: &[usize]) -> Result<LocalOperator> {
        if sites == self.sites.as_slice() {
            return Ok(self.clone());
        }
        if self.sites.iter().any(|s| sites.binary_search(s).is_err()) {
            return Err(Error::Invalid("embedding sites must contain the support".into()));
        }
        let (inner, rest) = digits_split(self.site_dim, sites, &self.sites);
        let dim = inner.len();
        let mut out = CMatrix::zeros(dim);
        for c in 0..dim {
            for r in 0..dim {
                if rest[r] == rest[c] {
                    out.set(r, c, self.matrix.get(inner[r], inner[c]));
                }
            }
        }
        LocalOperator::new(self.site_dim, sites.to_vec(), out)
    }

    pub fn mul(&self, other: &LocalOperator) -> Result<LocalOperator> {
        let u = sorted_union(&self.sites, &other.sites);
        if self.sites.iter().all(|s| other.sites.binary_search(s).is_err()) {
            return self.mul_disjoint(other, u);
        }
        let (a, b) = (self.embed(&u)?, other.embed(&u)?);
        LocalOperator::new(self.site_dim, u, &a.matrix * &b.matrix)
    }

    /// Disjoint supports: `(A ⊗ 1)(1 ⊗ B)` entrywise, with no dense product.
    fn mul_disjoint(&self, other: &LocalOperator, u: Vec<usize>) -> Result<LocalOperator> {
        let d = self.site_dim;
        let (ia, _) = digits_split(d, &u, &self.sites);
        let (ib, _) = digits_split(d, &u, &other.sites);
        let dim = ia.len();
        let mut out = CMatrix::zeros(dim);
        for c in 0..dim {
            for r in 0..dim {
                out.set(r, c, self.matrix.get(ia[r], ia[c]) * other.matrix.get(ib[r], ib[c]));
            }
        }
        LocalOperator::new(d, u, out)
    }

    pub fn add(&self, other: &LocalOperator) -> Result<LocalOperator> {
        let u = sorted_union(&self.sites, &other.sites);
        let (a, b) = (self.embed(&u)?, other.embed(&u)?);
        LocalOperator::new(self.site_dim, u, &a.matrix + &b.matrix)
    }

    pub fn scale(&self, s: C64) -> LocalOperator {
        LocalOperator { site_dim: self.site_dim, sites: self.sites.clone(), matrix: self.matrix.scale(s) }
    }

    pub fn norm(&self) -> Result<f64> {
        self.matrix.operator_norm()
    }

    /// Trace-preserving conditional expectation onto the sites `keep`
    /// (normalized partial trace over the others).
    pub fn reduce_to(&self, keep: &[usize]) -> Result<LocalOperator> {
        let keep: Vec<usize> = keep.iter().copied().filter(|s| self.sites.binary_search(s).is_ok()).collect();
        let (inner, rest) = digits_split(self.site_dim, &self.sites, &keep);
        let small = self.site_dim.pow(keep.len() as u32);
        let traced = self.sites.len() - keep.len();
        let mut out = CMatrix::zeros(small);
        let n = inner.len();
        for c in 0..n {
            for r in 0..n {
                if rest[r] == rest[c] {
                    let v = out.get(inner[r], inner[c]) + self.matrix.get(r, c);
                    out.set(inner[r], inner[c], v);
                }
            }
        }
        let out = out.scale_real(1.0 / self.site_dim.pow(traced as u32) as f64);
        LocalOperator::new(self.site_dim, keep, out)
    }

    /// Dense matrix on all `n_sites` sites.
    pub fn to_dense(&self, n_sites: usize) -> Result<CMatrix> {
        let all: Vec<usize> = (0..n_sites).collect();
        Ok(self.embed(&all)?.matrix)
    }
}

/// Sites of a region, as used by [`LocalOperator`].
pub fn region_sites(r: &Region) -> Vec<usize> {
    bits(r.mask()).collect()
}
