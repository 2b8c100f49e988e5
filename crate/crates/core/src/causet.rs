//! Finite causal sets: strict posets standing in for globally hyperbolic
//! spacetimes, their regions, admissible embeddings and disjoint unions.
//!
//! Point sets are stored as `u64` bitmasks, so a single causal set holds at
//! most [`MAX_POINTS`] points. Exhaustive searches (maximal chains, Cauchy
//! antichains, map enumeration) are intended for fixtures of up to ~16 points.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_POINTS: usize = 64;

/// Strict order relation as one bitmask row per point: bit `y` of row `x`
/// is set iff `x < y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reach(Vec<u64>);

impl Reach {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.0[x] >> y & 1 == 1
    }

    pub fn future(&self, x: usize) -> u64 {
        self.0[x]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.0.len() {
            for y in bits(self.0[x]) {
                out.push((x, y));
            }
        }
        out
    }
}

/// Smallest transitive relation containing `covers` on points `0..n`.
pub fn transitive_closure(covers: &[(usize, usize)], n: usize) -> Result<Reach> {
    if n > MAX_POINTS {
        return Err(Error::TooManyPoints { name: String::new(), points: n, max: MAX_POINTS });
    }
    let mut succ = vec![0u64; n];
    let mut indeg = vec![0usize; n];
    for &(a, b) in covers {
        if a >= n || b >= n {
            return Err(Error::UnknownPoint(format!("#{}", a.max(b))));
        }
        if a == b {
            return Err(Error::Cycle(format!("#{a}")));
        }
        if succ[a] >> b & 1 == 0 {
            succ[a] |= 1 << b;
            indeg[b] += 1;
        }
    }
    // Kahn's algorithm; leftover points lie on or behind a cycle.
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<usize> = (0..n).filter(|&x| indeg[x] == 0).collect();
    while let Some(x) = stack.pop() {
        order.push(x);
        for y in bits(succ[x]) {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                stack.push(y);
            }
        }
    }
    if order.len() < n {
        let on_cycle = (0..n).find(|&x| indeg[x] > 0).unwrap_or(0);
        return Err(Error::Cycle(format!("#{on_cycle}")));
    }
    let mut future = vec![0u64; n];
    for &x in order.iter().rev() {
        let mut f = 0u64;
        for y in bits(succ[x]) {
            f |= 1 << y | future[y];
        }
        future[x] = f;
    }
    Ok(Reach(future))
}

pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Finite strict poset with named points.
#[derive(Clone, Debug)]
pub struct CausalSet {
    name: String,
    points: Vec<String>,
    covers: Vec<(usize, usize)>,
    reach: Reach,
    past: Vec<u64>,
}

impl PartialEq for CausalSet {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.points == other.points && self.reach == other.reach
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CausalSetFile {
    pub name: String,
    pub points: Vec<String>,
    pub covers: Vec<[String; 2]>,
}

impl CausalSet {
    pub fn new<S: AsRef<str>>(name: &str, points: &[S], covers: &[(S, S)]) -> Result<Self> {
        let points: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let index = point_index(&points)?;
        let lookup = |p: &str| index.get(p).copied().ok_or_else(|| Error::UnknownPoint(p.to_string()));
        let covers = covers
            .iter()
            .map(|(a, b)| Ok((lookup(a.as_ref())?, lookup(b.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(name, points, covers)
    }

    pub fn from_indices(name: &str, points: Vec<String>, covers: Vec<(usize, usize)>) -> Result<Self> {
        if points.len() > MAX_POINTS {
            return Err(Error::TooManyPoints { name: name.to_string(), points: points.len(), max: MAX_POINTS });
        }
        point_index(&points)?;
        let reach = transitive_closure(&covers, points.len()).map_err(|e| match e {
            Error::Cycle(p) => {
                let idx: usize = p.trim_start_matches('#').parse().unwrap_or(0);
                Error::Cycle(points.get(idx).cloned().unwrap_or(p))
            }
            other => other,
        })?;
        let n = points.len();
        let mut past = vec![0u64; n];
        for (x, y) in reach.pairs() {
            past[y] |= 1 << x;
        }
        Ok(CausalSet { name: name.to_string(), points, covers, reach, past })
    }

    pub fn from_file(file: &CausalSetFile) -> Result<Self> {
        let covers: Vec<(String, String)> = file.covers.iter().map(|[a, b]| (a.clone(), b.clone())).collect();
        Self::new(&file.name, &file.points, &covers)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(json)?)
    }

    pub fn to_file(&self) -> CausalSetFile {
        CausalSetFile {
            name: self.name.clone(),
            points: self.points.clone(),
            covers: self.covers.iter().map(|&(a, b)| [self.points[a].clone(), self.points[b].clone()]).collect(),
        }
    }

    /// Same order under a different name.
    pub fn renamed(&self, name: &str) -> Self {
        CausalSet { name: name.to_string(), ..self.clone() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point_name(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn reach(&self) -> &Reach {
        &self.reach
    }

    pub fn index_of(&self, point: &str) -> Result<usize> {
        self.points.iter().position(|p| p == point).ok_or_else(|| Error::UnknownPoint(point.to_string()))
    }

    pub fn all_mask(&self) -> u64 {
        full_mask(self.len())
    }

    /// Strict order `x < y`.
    pub fn precedes(&self, x: usize, y: usize) -> bool {
        self.reach.contains(x, y)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.precedes(x, y) || self.precedes(y, x)
    }

    pub fn future(&self, x: usize) -> u64 {
        self.reach.future(x)
    }

    pub fn past(&self, x: usize) -> u64 {
        self.past[x]
    }

    /// Distinct and causally unrelated.
    pub fn spacelike(&self, x: usize, y: usize) -> bool {
        x != y && !self.comparable(x, y)
    }

    /// Every cross pair of the two point sets is spacelike.
    pub fn masks_spacelike(&self, a: u64, b: u64) -> bool {
        if a & b != 0 {
            return false;
        }
        bits(a).all(|x| (self.future(x) | self.past(x)) & b == 0)
    }

    /// Covering pairs of the order (the Hasse diagram), which may be fewer
    /// than the covers the set was built from.
    pub fn hasse(&self) -> Vec<(usize, usize)> {
        self.reach
            .pairs()
            .into_iter()
            .filter(|&(x, y)| self.future(x) & self.past(y) == 0)
            .collect()
    }

    /// Points lying strictly between `x` and `y`.
    pub fn interval(&self, x: usize, y: usize) -> u64 {
        self.future(x) & self.past(y)
    }

    /// Connectedness of the comparability graph.
    pub fn is_connected(&self) -> bool {
        self.is_mask_connected(self.all_mask())
    }

    pub fn is_mask_connected(&self, mask: u64) -> bool {
        let Some(start) = bits(mask).next() else {
            return true;
        };
        let mut seen = 1u64 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0u64;
            for x in bits(frontier) {
                next |= (self.future(x) | self.past(x)) & mask;
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == mask
    }

    /// All inclusion-maximal chains, as bitmasks.
    pub fn maximal_chains(&self) -> Vec<u64> {
        let n = self.len();
        let mut succ = vec![0u64; n];
        for (x, y) in self.hasse() {
            succ[x] |= 1 << y;
        }
        let mut out = Vec::new();
        fn walk(x: usize, acc: u64, succ: &[u64], out: &mut Vec<u64>) {
            let acc = acc | 1 << x;
            if succ[x] == 0 {
                out.push(acc);
            } else {
                for y in bits(succ[x]) {
                    walk(y, acc, succ, out);
                }
            }
        }
        for x in (0..n).filter(|&x| self.past(x) == 0) {
            walk(x, 0, &succ, &mut out);
        }
        out
    }

    /// Subset of points named by `names`.
    pub fn region(&self, names: &[&str]) -> Result<Region> {
        let mut mask = 0u64;
        for n in names {
            mask |= 1 << self.index_of(n)?;
        }
        Ok(Region { spacetime: self.name.clone(), mask })
    }

    /// Sub-causal set on the points of `region`, order inherited.
    pub fn induced(&self, region: &Region) -> Result<CausalSet> {
        self.check_region(region)?;
        let idx: Vec<usize> = region.points();
        let names: Vec<String> = idx.iter().map(|&i| self.points[i].clone()).collect();
        let mut covers = Vec::new();
        for (a, &x) in idx.iter().enumerate() {
            for (b, &y) in idx.iter().enumerate() {
                if self.precedes(x, y) && self.interval(x, y) & region.mask == 0 {
                    covers.push((a, b));
                }
            }
        }
        let name = format!("{}[{}]", self.name, names.join(","));
        CausalSet::from_indices(&name, names, covers)
    }

    pub fn check_region(&self, region: &Region) -> Result<()> {
        if region.spacetime != self.name {
            return Err(Error::SpacetimeMismatch { expected: self.name.clone(), found: region.spacetime.clone() });
        }
        if region.mask & !self.all_mask() != 0 {
            return Err(Error::UnknownPoint(format!("#{}", 63 - region.mask.leading_zeros())));
        }
        Ok(())
    }
}

fn point_index(points: &[String]) -> Result<BTreeMap<&str, usize>> {
    let mut index = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        if index.insert(p.as_str(), i).is_some() {
            return Err(Error::DuplicatePoint(p.clone()));
        }
    }
    Ok(index)
}

/// Subset of the points of a named causal set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    spacetime: String,
    mask: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionFile {
    pub spacetime: String,
    pub points: Vec<String>,
}

impl Region {
    pub fn from_mask(m: &CausalSet, mask: u64) -> Result<Self> {
        let r = Region { spacetime: m.name.clone(), mask };
        m.check_region(&r)?;
        Ok(r)
    }

    pub fn all(m: &CausalSet) -> Self {
        Region { spacetime: m.name.clone(), mask: m.all_mask() }
    }

    pub fn empty(m: &CausalSet) -> Self {
        Region { spacetime: m.name.clone(), mask: 0 }
    }

    pub fn from_file(m: &CausalSet, file: &RegionFile) -> Result<Self> {
        if file.spacetime != m.name {
            return Err(Error::SpacetimeMismatch { expected: m.name.clone(), found: file.spacetime.clone() });
        }
        let names: Vec<&str> = file.points.iter().map(String::as_str).collect();
        m.region(&names)
    }

    pub fn to_file(&self, m: &CausalSet) -> RegionFile {
        RegionFile { spacetime: self.spacetime.clone(), points: self.names(m) }
    }

    pub fn spacetime(&self) -> &str {
        &self.spacetime
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn points(&self) -> Vec<usize> {
        bits(self.mask).collect()
    }

    pub fn names(&self, m: &CausalSet) -> Vec<String> {
        bits(self.mask).map(|i| m.points[i].clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, x: usize) -> bool {
        self.mask >> x & 1 == 1
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn is_strict_subset(&self, other: &Region) -> bool {
        self.is_subset(other) && self.mask != other.mask
    }

    pub fn union(&self, other: &Region) -> Region {
        Region { spacetime: self.spacetime.clone(), mask: self.mask | other.mask }
    }

    pub fn with_mask(&self, mask: u64) -> Region {
        Region { spacetime: self.spacetime.clone(), mask }
    }

    pub fn label(&self, m: &CausalSet) -> String {
        format!("{{{}}}", self.names(m).join(","))
    }
}

/// `p` and `q` are distinct and neither precedes the other.
pub fn spacelike_separated(m: &CausalSet, p: &str, q: &str) -> Result<bool> {
    Ok(m.spacelike(m.index_of(p)?, m.index_of(q)?))
}

/// Interval-closed: every point between two points of `r` lies in `r`.
pub fn is_causally_convex(m: &CausalSet, r: &Region) -> bool {
    convex_mask(m, r.mask)
}

pub(crate) fn convex_mask(m: &CausalSet, mask: u64) -> bool {
    bits(mask).all(|x| bits(m.future(x) & mask).all(|y| m.interval(x, y) & !mask == 0))
}

/// `D(R)`: points all of whose maximal chains meet `R`.
pub fn domain_of_dependence(m: &CausalSet, r: &Region) -> Region {
    let chains = m.maximal_chains();
    r.with_mask(dependence_mask(m, &chains, r.mask))
}

fn dependence_mask(m: &CausalSet, chains: &[u64], mask: u64) -> u64 {
    let missed = chains.iter().filter(|&&c| c & mask == 0).fold(0u64, |acc, &c| acc | c);
    m.all_mask() & !missed
}

/// `R` contains an antichain `S` with `D(S)` the whole set.
pub fn is_cauchy_region(m: &CausalSet, r: &Region) -> bool {
    cauchy_antichain(m, r).is_some()
}

/// An antichain inside `r` meeting every maximal chain, if one exists.
pub fn cauchy_antichain(m: &CausalSet, r: &Region) -> Option<Region> {
    let chains = m.maximal_chains();
    fn search(m: &CausalSet, chains: &[u64], allowed: u64, chosen: u64) -> Option<u64> {
        let Some(&open) = chains.iter().find(|&&c| c & chosen == 0) else {
            return Some(chosen);
        };
        for x in bits(open & allowed) {
            if bits(chosen).all(|y| m.spacelike(x, y)) {
                if let Some(s) = search(m, chains, allowed, chosen | 1 << x) {
                    return Some(s);
                }
            }
        }
        None
    }
    if m.is_empty() {
        return Some(r.with_mask(0));
    }
    search(m, &chains, r.mask, 0).map(|s| r.with_mask(s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    Total,
    Injective,
    OrderPreserving,
    OrderReflecting,
    CausallyConvex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub clause: Clause,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub violations: Vec<Violation>,
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.admissible {
            return write!(f, "admissible");
        }
        let parts: Vec<String> =
            self.violations.iter().map(|v| format!("{:?} [{}]", v.clause, v.witness.join(", "))).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks injectivity, order preservation and reflection, and causal
/// convexity of the image for `map: N -> M` given by target indices.
pub fn is_admissible(map: &[usize], n: &CausalSet, m: &CausalSet) -> AdmissibilityReport {
    let mut violations = Vec::new();
    let name = |s: &CausalSet, i: usize| s.points.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
    if map.len() != n.len() || map.iter().any(|&y| y >= m.len()) {
        violations.push(Violation { clause: Clause::Total, witness: vec![format!("{} source points", n.len())] });
        return AdmissibilityReport { admissible: false, violations };
    }
    let mut first = [None::<Vec<String>>, None, None];
    for x in 0..n.len() {
        for y in 0..n.len() {
            if x == y {
                continue;
            }
            let (fx, fy) = (map[x], map[y]);
            if fx == fy && x < y && first[0].is_none() {
                first[0] = Some(vec![name(n, x), name(n, y), name(m, fx)]);
            }
            let src = n.precedes(x, y);
            let tgt = fx != fy && m.precedes(fx, fy);
            if src && !tgt && first[1].is_none() {
                first[1] = Some(vec![name(n, x), name(n, y)]);
            }
            if !src && tgt && first[2].is_none() {
                first[2] = Some(vec![name(n, x), name(n, y)]);
            }
        }
    }
    for (clause, w) in [Clause::Injective, Clause::OrderPreserving, Clause::OrderReflecting].into_iter().zip(first) {
        if let Some(witness) = w {
            violations.push(Violation { clause, witness });
        }
    }
    let image = map.iter().fold(0u64, |acc, &y| acc | 1 << y);
    if let Some(w) = convexity_witness(m, image) {
        violations.push(Violation { clause: Clause::CausallyConvex, witness: w });
    }
    AdmissibilityReport { admissible: violations.is_empty(), violations }
}

fn convexity_witness(m: &CausalSet, mask: u64) -> Option<Vec<String>> {
    for x in bits(mask) {
        for y in bits(m.future(x) & mask) {
            if let Some(z) = bits(m.interval(x, y) & !mask).next() {
                return Some(vec![m.points[x].clone(), m.points[z].clone(), m.points[y].clone()]);
            }
        }
    }
    None
}

/// Name-keyed variant of [`is_admissible`].
pub fn is_admissible_named(
    map: &BTreeMap<String, String>,
    n: &CausalSet,
    m: &CausalSet,
) -> Result<AdmissibilityReport> {
    let idx = resolve_map(map, n, m)?;
    Ok(match idx {
        Some(idx) => is_admissible(&idx, n, m),
        None => AdmissibilityReport {
            admissible: false,
            violations: vec![Violation { clause: Clause::Total, witness: missing_points(map, n) }],
        },
    })
}

fn missing_points(map: &BTreeMap<String, String>, n: &CausalSet) -> Vec<String> {
    n.points.iter().filter(|p| !map.contains_key(*p)).cloned().collect()
}

fn resolve_map(map: &BTreeMap<String, String>, n: &CausalSet, m: &CausalSet) -> Result<Option<Vec<usize>>> {
    for (k, v) in map {
        n.index_of(k)?;
        m.index_of(v)?;
    }
    if n.points.iter().any(|p| !map.contains_key(p)) {
        return Ok(None);
    }
    n.points.iter().map(|p| m.index_of(&map[p])).collect::<Result<Vec<_>>>().map(Some)
}

/// Admissible embedding `source -> target` (a morphism of the discrete
/// spacetime category).
#[derive(Clone, Debug)]
pub struct Embedding {
    source: Arc<CausalSet>,
    target: Arc<CausalSet>,
    map: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingFile {
    pub from: String,
    pub to: String,
    pub map: BTreeMap<String, String>,
}

impl Embedding {
    pub fn new(source: Arc<CausalSet>, target: Arc<CausalSet>, map: Vec<usize>) -> Result<Self> {
        let report = is_admissible(&map, &source, &target);
        if !report.admissible {
            return Err(Error::NotAdmissible(report));
        }
        Ok(Embedding { source, target, map })
    }

    pub fn from_names(source: Arc<CausalSet>, target: Arc<CausalSet>, pairs: &[(&str, &str)]) -> Result<Self> {
        let map: BTreeMap<String, String> = pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        Self::from_map(source, target, &map)
    }

    pub fn from_map(source: Arc<CausalSet>, target: Arc<CausalSet>, map: &BTreeMap<String, String>) -> Result<Self> {
        match resolve_map(map, &source, &target)? {
            Some(idx) => Self::new(source, target, idx),
            None => Err(Error::NotAdmissible(AdmissibilityReport {
                admissible: false,
                violations: vec![Violation { clause: Clause::Total, witness: missing_points(map, &source) }],
            })),
        }
    }

    pub fn to_file(&self) -> EmbeddingFile {
        EmbeddingFile {
            from: self.source.name.clone(),
            to: self.target.name.clone(),
            map: (0..self.map.len())
                .map(|x| (self.source.points[x].clone(), self.target.points[self.map[x]].clone()))
                .collect(),
        }
    }

    pub fn identity(m: Arc<CausalSet>) -> Self {
        let map = (0..m.len()).collect();
        Embedding { source: m.clone(), target: m, map }
    }

    /// Inclusion of the sub-causal set induced on a causally convex region.
    pub fn inclusion(m: Arc<CausalSet>, region: &Region) -> Result<Self> {
        if !is_causally_convex(&m, region) {
            return Err(Error::NotConvex(region.label(&m)));
        }
        let sub = Arc::new(m.induced(region)?);
        Self::new(sub, m, region.points())
    }

    pub fn source(&self) -> &Arc<CausalSet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<CausalSet> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn image(&self) -> Region {
        Region { spacetime: self.target.name.clone(), mask: self.image_mask() }
    }

    pub fn image_mask(&self) -> u64 {
        self.map.iter().fold(0u64, |acc, &y| acc | 1 << y)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Embedding) -> Result<Embedding> {
        if *self.target != *next.source {
            return Err(Error::NotComposable(format!(
                "target `{}` differs from source `{}`",
                self.target.name, next.source.name
            )));
        }
        let map = self.map.iter().map(|&y| next.map[y]).collect();
        Embedding::new(self.source.clone(), next.target.clone(), map)
    }

    pub fn label(&self) -> String {
        let pairs: Vec<String> = (0..self.map.len())
            .map(|x| format!("{}->{}", self.source.points[x], self.target.points[self.map[x]]))
            .collect();
        format!("{}=>{}:{}", self.source.name, self.target.name, pairs.join(","))
    }
}

/// All admissible maps `n -> m`, as target-index vectors, in lexicographic order.
pub fn admissible_maps(n: &CausalSet, m: &CausalSet) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n.len());
    fn extend(n: &CausalSet, m: &CausalSet, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let x = cur.len();
        if x == n.len() {
            let image = cur.iter().fold(0u64, |acc, &y| acc | 1 << y);
            if convex_mask(m, image) {
                out.push(cur.clone());
            }
            return;
        }
        for y in 0..m.len() {
            let ok = cur.iter().enumerate().all(|(x2, &y2)| {
                y2 != y && n.precedes(x2, x) == m.precedes(y2, y) && n.precedes(x, x2) == m.precedes(y, y2)
            });
            if ok {
                cur.push(y);
                extend(n, m, cur, out);
                cur.pop();
            }
        }
    }
    extend(n, m, &mut current, &mut out);
    out
}

/// All nonempty causally convex regions, ordered by mask.
pub fn convex_regions(m: &CausalSet) -> Vec<Region> {
    assert!(m.len() <= 20, "convex region enumeration is exponential");
    (1..=m.all_mask()).filter(|&mask| convex_mask(m, mask)).map(|mask| Region::from_mask(m, mask).unwrap()).collect()
}

/// Ordered family of causal sets; the empty family is the monoidal unit.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DisjointSpacetime {
    components: Vec<Arc<CausalSet>>,
}

/// Disjoint union of the given causal sets.
pub fn disjoint_union(parts: Vec<Arc<CausalSet>>) -> Result<DisjointSpacetime> {
    let mut seen = std::collections::BTreeSet::new();
    for p in &parts {
        if !seen.insert(p.name.clone()) {
            return Err(Error::DuplicateComponentName(p.name.clone()));
        }
    }
    Ok(DisjointSpacetime { components: parts })
}

impl DisjointSpacetime {
    pub fn unit() -> Self {
        DisjointSpacetime::default()
    }

    pub fn single(m: Arc<CausalSet>) -> Self {
        DisjointSpacetime { components: vec![m] }
    }

    pub fn components(&self) -> &[Arc<CausalSet>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn total_points(&self) -> usize {
        self.components.iter().map(|c| c.len()).sum()
    }

    /// `self ⊔ other`, components kept in order.
    pub fn concat(&self, other: &DisjointSpacetime) -> Result<DisjointSpacetime> {
        disjoint_union(self.components.iter().chain(&other.components).cloned().collect())
    }

    pub fn label(&self) -> String {
        if self.components.is_empty() {
            return "∅".to_string();
        }
        self.components.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join("⊔")
    }

    /// Single causal set with points `component.point` and no relations
    /// between components.
    pub fn flatten(&self) -> Result<CausalSet> {
        let mut points = Vec::new();
        let mut covers = Vec::new();
        for c in &self.components {
            let offset = points.len();
            points.extend(c.points.iter().map(|p| format!("{}.{}", c.name, p)));
            covers.extend(c.covers.iter().map(|&(a, b)| (a + offset, b + offset)));
        }
        CausalSet::from_indices(&self.label(), points, covers)
    }
}

/// Candidate morphism between disjoint spacetimes: every point `x` of source
/// component `k` goes to `map[k][x] = (l, y)`.
#[derive(Clone, Debug)]
pub struct TensorMap {
    pub source: DisjointSpacetime,
    pub target: DisjointSpacetime,
    pub map: Vec<Vec<(usize, usize)>>,
}

impl TensorMap {
    /// Identity on a disjoint spacetime.
    pub fn identity(d: DisjointSpacetime) -> Self {
        let map = d.components.iter().enumerate().map(|(k, c)| (0..c.len()).map(|x| (k, x)).collect()).collect();
        TensorMap { source: d.clone(), target: d, map }
    }

    /// Single-component map from an admissible embedding.
    pub fn from_embedding(f: &Embedding) -> Self {
        TensorMap {
            source: DisjointSpacetime::single(f.source.clone()),
            target: DisjointSpacetime::single(f.target.clone()),
            map: vec![f.map.iter().map(|&y| (0, y)).collect()],
        }
    }

    /// Combines maps `χ_k: N_k -> M` with a common target into `⊔N_k -> M`.
    pub fn join(parts: &[Embedding]) -> Result<Self> {
        let target = parts
            .first()
            .map(|f| f.target.clone())
            .ok_or_else(|| Error::Invalid("join needs at least one map".into()))?;
        if parts.iter().any(|f| *f.target != *target) {
            return Err(Error::NotComposable("maps do not share a target".into()));
        }
        let source = disjoint_union(parts.iter().map(|f| f.source.clone()).collect())?;
        let map = parts.iter().map(|f| f.map.iter().map(|&y| (0, y)).collect()).collect();
        Ok(TensorMap { source, target: DisjointSpacetime::single(target), map })
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &TensorMap) -> Result<TensorMap> {
        if self.target != next.source {
            return Err(Error::NotComposable(format!(
                "target `{}` differs from source `{}`",
                self.target.label(),
                next.source.label()
            )));
        }
        let map = self.map.iter().map(|comp| comp.iter().map(|&(l, y)| next.map[l][y]).collect()).collect();
        Ok(TensorMap { source: self.source.clone(), target: next.target.clone(), map })
    }

    /// `self ⊗ other`: acts componentwise on `source ⊔ other.source`.
    pub fn tensor(&self, other: &TensorMap) -> Result<TensorMap> {
        let offset = self.target.len();
        let map = self
            .map
            .iter()
            .cloned()
            .chain(other.map.iter().map(|comp| comp.iter().map(|&(l, y)| (l + offset, y)).collect()))
            .collect();
        Ok(TensorMap { source: self.source.concat(&other.source)?, target: self.target.concat(&other.target)?, map })
    }

    /// Restriction `χ_k` to source component `k` as an embedding into target
    /// component `l`.
    pub fn component_embedding(&self, k: usize, l: usize) -> Result<Embedding> {
        let map = self.map[k].iter().map(|&(_, y)| y).collect();
        Embedding::new(self.source.components[k].clone(), self.target.components[l].clone(), map)
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .map
            .iter()
            .enumerate()
            .flat_map(|(k, comp)| {
                comp.iter().enumerate().map(move |(x, &(l, y))| {
                    format!(
                        "{}.{}->{}.{}",
                        self.source.components[k].name,
                        self.source.components[k].points[x],
                        self.target.components[l].name,
                        self.target.components[l].points[y]
                    )
                })
            })
            .collect();
        format!("{}=>{}:{}", self.source.label(), self.target.label(), parts.join(","))
    }
}

/// Component assignment `κ` (source component ↦ target component) of a
/// tensor-admissible map, or the first violated clause.
pub fn check_tensor_admissible(f: &TensorMap) -> Result<Vec<usize>> {
    if f.map.len() != f.source.len() {
        return Err(Error::NotTensorAdmissible("map does not cover every source component".into()));
    }
    let mut kappa = Vec::with_capacity(f.map.len());
    for (k, comp) in f.map.iter().enumerate() {
        let src = &f.source.components[k];
        if comp.len() != src.len() {
            return Err(Error::NotTensorAdmissible(format!("component `{}` is not mapped totally", src.name)));
        }
        let Some(&(l, _)) = comp.first() else {
            kappa.push(0);
            continue;
        };
        if comp.iter().any(|&(l2, _)| l2 != l) {
            return Err(Error::SplitImage { component: k });
        }
        if l >= f.target.len() || comp.iter().any(|&(_, y)| y >= f.target.components[l].len()) {
            return Err(Error::NotTensorAdmissible(format!("component `{}` maps outside the target", src.name)));
        }
        let idx: Vec<usize> = comp.iter().map(|&(_, y)| y).collect();
        let report = is_admissible(&idx, src, &f.target.components[l]);
        if !report.admissible {
            return Err(Error::NotTensorAdmissible(format!("component `{}`: {}", src.name, report)));
        }
        kappa.push(l);
    }
    for k1 in 0..kappa.len() {
        for k2 in k1 + 1..kappa.len() {
            if kappa[k1] != kappa[k2] || f.map[k1].is_empty() || f.map[k2].is_empty() {
                continue;
            }
            let tgt = &f.target.components[kappa[k1]];
            let m1 = f.map[k1].iter().fold(0u64, |a, &(_, y)| a | 1 << y);
            let m2 = f.map[k2].iter().fold(0u64, |a, &(_, y)| a | 1 << y);
            if !tgt.masks_spacelike(m1, m2) {
                return Err(Error::NotTensorAdmissible(format!(
                    "images of components `{}` and `{}` are not spacelike in `{}`",
                    f.source.components[k1].name, f.source.components[k2].name, tgt.name
                )));
            }
        }
    }
    Ok(kappa)
}

/// All tensor-admissible maps `src -> tgt`.
pub fn tensor_admissible_maps(src: &DisjointSpacetime, tgt: &DisjointSpacetime) -> Vec<TensorMap> {
    let options: Vec<Vec<Vec<(usize, usize)>>> = src
        .components
        .iter()
        .map(|c| {
            tgt.components
                .iter()
                .enumerate()
                .flat_map(|(l, t)| {
                    admissible_maps(c, t).into_iter().map(move |m| m.into_iter().map(|y| (l, y)).collect())
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; options.len()];
    if options.iter().any(|o| o.is_empty()) {
        return out;
    }
    loop {
        let map: Vec<Vec<(usize, usize)>> = choice.iter().enumerate().map(|(k, &i)| options[k][i].clone()).collect();
        let candidate = TensorMap { source: src.clone(), target: tgt.clone(), map };
        if check_tensor_admissible(&candidate).is_ok() {
            out.push(candidate);
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> CausalSet {
        CausalSet::new("diamond", &["p", "q", "r", "s"], &[("p", "q"), ("p", "r"), ("q", "s"), ("r", "s")]).unwrap()
    }

    fn chain(n: usize) -> CausalSet {
        let names: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        let covers: Vec<(String, String)> = names.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        CausalSet::new(&format!("chain{n}"), &names, &covers).unwrap()
    }

    fn antichain2() -> CausalSet {
        CausalSet::new::<&str>("antichain2", &["a", "b"], &[]).unwrap()
    }

    /// Reachability by explicit path search over the cover graph.
    fn path_oracle(covers: &[(usize, usize)], x: usize, y: usize) -> bool {
        let mut stack = vec![x];
        let mut seen = [false; 64];
        while let Some(v) = stack.pop() {
            for &(a, b) in covers {
                if a == v && !seen[b] {
                    if b == y {
                        return true;
                    }
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        false
    }

    #[test]
    fn closure_examples() {
        let r = transitive_closure(&[(0, 1), (1, 2)], 3).unwrap();
        assert_eq!(r.pairs(), vec![(0, 1), (0, 2), (1, 2)]);
        assert!(transitive_closure(&[], 3).unwrap().pairs().is_empty());
        assert!(matches!(transitive_closure(&[(0, 1), (1, 0)], 2), Err(Error::Cycle(_))));
    }

    #[test]
    fn cycle_error_names_point() {
        let err = CausalSet::new("bad", &["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, Error::Cycle(ref p) if p == "a" || p == "b"));
    }

    #[test]
    fn loader_rejects_duplicates_and_unknowns() {
        assert!(matches!(CausalSet::new::<&str>("x", &["a", "a"], &[]), Err(Error::DuplicatePoint(_))));
        assert!(matches!(CausalSet::new("x", &["a"], &[("a", "z")]), Err(Error::UnknownPoint(_))));
        let json = r#"{"name":"d","points":["a","b"],"covers":[["a","b"]],"extra":1}"#;
        assert!(CausalSet::from_json(json).is_err());
    }

    #[test]
    fn spacelike_examples() {
        let c = chain(2);
        assert!(!spacelike_separated(&c, "a", "b").unwrap());
        assert!(spacelike_separated(&antichain2(), "a", "b").unwrap());
        let d = diamond();
        let oracle = !path_oracle(d.covers(), 1, 2) && !path_oracle(d.covers(), 2, 1);
        assert!(oracle);
        assert_eq!(spacelike_separated(&d, "q", "r").unwrap(), oracle);
        assert!(matches!(spacelike_separated(&d, "q", "zz"), Err(Error::UnknownPoint(_))));
    }

    /// Convexity by explicit enumeration of all triples x < z < y.
    fn convex_oracle(m: &CausalSet, r: &[usize]) -> bool {
        for &x in r {
            for &y in r {
                for z in 0..m.len() {
                    if m.precedes(x, z) && m.precedes(z, y) && !r.contains(&z) {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn convexity_examples() {
        let d = diamond();
        let ps = d.region(&["p", "s"]).unwrap();
        let qr = d.region(&["q", "r"]).unwrap();
        assert_eq!(is_causally_convex(&d, &ps), convex_oracle(&d, &[0, 3]));
        assert!(!is_causally_convex(&d, &ps));
        assert_eq!(is_causally_convex(&d, &qr), convex_oracle(&d, &[1, 2]));
        assert!(is_causally_convex(&d, &qr));
        for i in 0..4 {
            assert!(is_causally_convex(&d, &Region::from_mask(&d, 1 << i).unwrap()));
        }
    }

    #[test]
    fn admissibility_examples() {
        let d = diamond();
        assert!(is_admissible(&[0, 1, 2, 3], &d, &d).admissible);
        let rep = is_admissible(&[0, 1], &antichain2(), &chain(2));
        assert!(!rep.admissible);
        assert_eq!(rep.violations[0].clause, Clause::OrderReflecting);
        let rep = is_admissible(&[0, 2], &chain(2), &chain(3));
        assert!(!rep.admissible);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].clause, Clause::CausallyConvex);
        assert_eq!(rep.violations[0].witness, vec!["a", "b", "c"]);
    }

    #[test]
    fn admissibility_named_errors() {
        let c2 = chain(2);
        let c3 = chain(3);
        let map: BTreeMap<String, String> = [("a".into(), "zz".into())].into();
        assert!(matches!(is_admissible_named(&map, &c2, &c3), Err(Error::UnknownPoint(_))));
        let partial: BTreeMap<String, String> = [("a".into(), "a".into())].into();
        let rep = is_admissible_named(&partial, &c2, &c3).unwrap();
        assert_eq!(rep.violations[0].clause, Clause::Total);
    }

    /// D(R) from an explicit list of maximal chains.
    fn dependence_oracle(m: &CausalSet, chains: &[Vec<usize>], r: &[usize]) -> Vec<usize> {
        (0..m.len())
            .filter(|p| chains.iter().filter(|c| c.contains(p)).all(|c| c.iter().any(|x| r.contains(x))))
            .collect()
    }

    #[test]
    fn domain_of_dependence_examples() {
        let d = diamond();
        let chains = vec![vec![0, 1, 3], vec![0, 2, 3]];
        let mut found: Vec<Vec<usize>> =
            d.maximal_chains().into_iter().map(|c| bits(c).collect()).collect::<Vec<_>>();
        found.sort();
        assert_eq!(found, chains);
        let q = d.region(&["q"]).unwrap();
        assert_eq!(domain_of_dependence(&d, &q).points(), dependence_oracle(&d, &chains, &[1]));
        assert_eq!(domain_of_dependence(&d, &q).points(), vec![1]);
        let c2 = chain(2);
        let a = c2.region(&["a"]).unwrap();
        assert_eq!(domain_of_dependence(&c2, &a).names(&c2), vec!["a", "b"]);
        assert_eq!(domain_of_dependence(&d, &Region::all(&d)), Region::all(&d));
    }

    #[test]
    fn cauchy_examples() {
        let c2 = chain(2);
        let a = c2.region(&["a"]).unwrap();
        assert!(is_cauchy_region(&c2, &a));
        assert_eq!(cauchy_antichain(&c2, &a).unwrap(), a);
        let d = diamond();
        assert!(!is_cauchy_region(&d, &d.region(&["q"]).unwrap()));
        assert!(is_cauchy_region(&d, &d.region(&["q", "r"]).unwrap()));
        for m in [d, chain(3), antichain2()] {
            assert!(is_cauchy_region(&m, &Region::all(&m)));
        }
        let ac = antichain2();
        assert!(!is_cauchy_region(&ac, &ac.region(&["a"]).unwrap()));
    }

    #[test]
    fn disjoint_union_examples() {
        let d = Arc::new(diamond());
        let c = Arc::new(chain(2));
        let one = disjoint_union(vec![d.clone()]).unwrap();
        let flat = one.flatten().unwrap();
        assert_eq!(flat.len(), 4);
        assert_eq!(flat.point_name(0), "diamond.p");
        assert_eq!(flat.reach().pairs(), d.reach().pairs());
        assert!(disjoint_union(vec![]).unwrap().is_empty());
        let two = disjoint_union(vec![d.clone(), c]).unwrap();
        let flat = two.flatten().unwrap();
        assert_eq!(flat.len(), 6);
        for (x, y) in flat.reach().pairs() {
            assert_eq!(x < 4, y < 4, "cross-component relation {x}<{y}");
        }
        assert!(matches!(disjoint_union(vec![d.clone(), d]), Err(Error::DuplicateComponentName(_))));
    }

    #[test]
    fn tensor_admissible_examples() {
        let c2 = Arc::new(chain(2));
        let f = Embedding::identity(c2.clone());
        assert_eq!(check_tensor_admissible(&TensorMap::from_embedding(&f)).unwrap(), vec![0]);

        let pa = Arc::new(CausalSet::new::<&str>("pa", &["x"], &[]).unwrap());
        let pb = Arc::new(CausalSet::new::<&str>("pb", &["x"], &[]).unwrap());
        let src = disjoint_union(vec![pa.clone(), pb.clone()]).unwrap();
        let into_chain = TensorMap {
            source: src.clone(),
            target: DisjointSpacetime::single(c2),
            map: vec![vec![(0, 0)], vec![(0, 1)]],
        };
        assert!(matches!(check_tensor_admissible(&into_chain), Err(Error::NotTensorAdmissible(_))));
        let ac = Arc::new(antichain2());
        let into_ac =
            TensorMap { source: src, target: DisjointSpacetime::single(ac), map: vec![vec![(0, 0)], vec![(0, 1)]] };
        assert_eq!(check_tensor_admissible(&into_ac).unwrap(), vec![0, 0]);
    }

    #[test]
    fn split_image_detected() {
        let c2 = Arc::new(chain(2));
        let p = Arc::new(CausalSet::new::<&str>("pt", &["x"], &[]).unwrap());
        let q = Arc::new(CausalSet::new::<&str>("pt2", &["x"], &[]).unwrap());
        let tgt = disjoint_union(vec![p, q]).unwrap();
        let f = TensorMap { source: DisjointSpacetime::single(c2), target: tgt, map: vec![vec![(0, 0), (1, 0)]] };
        assert!(matches!(check_tensor_admissible(&f), Err(Error::SplitImage { component: 0 })));
    }

    #[test]
    fn enumeration_counts() {
        let d = diamond();
        assert_eq!(admissible_maps(&d, &d).len(), 2);
        assert_eq!(admissible_maps(&chain(2), &d).len(), 4);
        assert_eq!(admissible_maps(&antichain2(), &d).len(), 2);
        assert_eq!(admissible_maps(&chain(2), &chain(3)).len(), 2);
    }

    #[test]
    fn induced_inherits_order() {
        let d = diamond();
        let sub = d.induced(&d.region(&["p", "q", "s"]).unwrap()).unwrap();
        assert_eq!(sub.hasse(), vec![(0, 1), (1, 2)]);
        assert!(sub.precedes(0, 2));
    }
}
