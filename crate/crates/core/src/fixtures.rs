//! Bundled causal-set fixtures.

use std::sync::Arc;

use crate::causet::{CausalSet, Region};
use crate::error::{Error, Result};

pub const NAMES: [&str; 5] = ["chain2", "chain3", "antichain2", "diamond", "diamond-in-box"];

/// Fixtures small enough for full axiom sweeps (ambient qubit dimension ≤ 16).
pub const SMALL: [&str; 4] = ["chain2", "chain3", "antichain2", "diamond"];

pub fn chain2() -> CausalSet {
    CausalSet::new("chain2", &["a", "b"], &[("a", "b")]).unwrap()
}

pub fn chain3() -> CausalSet {
    CausalSet::new("chain3", &["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap()
}

pub fn antichain2() -> CausalSet {
    CausalSet::new::<&str>("antichain2", &["a", "b"], &[]).unwrap()
}

pub fn diamond() -> CausalSet {
    CausalSet::new("diamond", &["p", "q", "r", "s"], &[("p", "q"), ("p", "r"), ("q", "s"), ("r", "s")]).unwrap()
}

pub fn point(name: &str) -> CausalSet {
    CausalSet::new::<&str>(name, &["x"], &[]).unwrap()
}

/// Two spacelike diamonds between a common bottom and top point. Points of
/// the two diamonds are interleaved in the point order so that region
/// algebras do not sit on contiguous tensor factors.
pub fn diamond_in_box() -> CausalSet {
    let points = ["bot", "p1", "p2", "q1", "q2", "r1", "r2", "s1", "s2", "top"];
    let mut covers = vec![("bot", "p1"), ("bot", "p2"), ("s1", "top"), ("s2", "top")];
    covers.extend([("p1", "q1"), ("p1", "r1"), ("q1", "s1"), ("r1", "s1")]);
    covers.extend([("p2", "q2"), ("p2", "r2"), ("q2", "s2"), ("r2", "s2")]);
    CausalSet::new("diamond-in-box", &points, &covers).unwrap()
}

pub fn by_name(name: &str) -> Result<CausalSet> {
    match name {
        "chain2" => Ok(chain2()),
        "chain3" => Ok(chain3()),
        "antichain2" => Ok(antichain2()),
        "diamond" => Ok(diamond()),
        "diamond-in-box" => Ok(diamond_in_box()),
        other => Err(Error::Invalid(format!("unknown fixture `{other}`; known: {}", NAMES.join(", ")))),
    }
}

pub fn all() -> Vec<Arc<CausalSet>> {
    NAMES.iter().map(|n| Arc::new(by_name(n).unwrap())).collect()
}

pub fn small() -> Vec<Arc<CausalSet>> {
    SMALL.iter().map(|n| Arc::new(by_name(n).unwrap())).collect()
}

/// Region layout of the nested-region construction on `diamond-in-box`.
#[derive(Clone, Debug)]
pub struct BoxRegions {
    /// First diamond.
    pub o1: Region,
    /// Second diamond, spacelike to the first.
    pub o2: Region,
    /// Union of the two diamonds.
    pub inner: Region,
    /// Whole spacetime, strictly enclosing `inner`.
    pub outer: Region,
    /// Increasing causally convex chains exhausting each diamond.
    pub chain1: Vec<Region>,
    pub chain2: Vec<Region>,
}

pub fn box_regions(m: &CausalSet) -> Result<BoxRegions> {
    let o1 = m.region(&["p1", "q1", "r1", "s1"])?;
    let o2 = m.region(&["p2", "q2", "r2", "s2"])?;
    let chain1 = vec![m.region(&["p1"])?, m.region(&["p1", "q1"])?, m.region(&["p1", "q1", "r1"])?, o1.clone()];
    let chain2 = vec![m.region(&["p2"])?, m.region(&["p2", "r2"])?, m.region(&["p2", "q2", "r2"])?, o2.clone()];
    Ok(BoxRegions { inner: o1.union(&o2), outer: Region::all(m), o1, o2, chain1, chain2 })
}

/// Default `(O1, O2, O)` for the isometry check on a bundled fixture.
pub fn default_isometry_regions(m: &CausalSet) -> Result<(Region, Region, Region)> {
    match m.name() {
        "diamond" => Ok((m.region(&["q"])?, m.region(&["r"])?, Region::all(m))),
        "antichain2" => Ok((m.region(&["a"])?, m.region(&["b"])?, Region::all(m))),
        "diamond-in-box" => {
            let b = box_regions(m)?;
            Ok((b.o1, b.o2, b.outer))
        }
        other => Err(Error::Invalid(format!("fixture `{other}` has no spacelike region pair"))),
    }
}
