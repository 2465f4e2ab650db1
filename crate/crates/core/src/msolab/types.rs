//! Rank-ρ MSO types. Two structures satisfy the same sentences of quantifier
//! rank at most ρ exactly when their rank-ρ types coincide.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::structure::{CanonicalKey, LabStructure};
use super::MsoError;

/// Default bound on `(|D| + 2^|D|)^ρ`, the number of leaf diagrams a type
/// computation visits.
pub const DEFAULT_TYPE_WORK: u128 = 1 << 25;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Payload {
    /// Encoded atomic diagram of the named elements and sets.
    Atomic(Vec<u64>),
    /// Types one rank lower of every point extension and every set extension.
    Extensions { points: BTreeSet<Arc<RankType>>, sets: BTreeSet<Arc<RankType>> },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RankType {
    pub rank: usize,
    pub payload: Payload,
}

/// A structure together with its named constants and sets, in name order.
pub(crate) struct Frame<'a> {
    pub s: &'a LabStructure,
    consts: Vec<usize>,
    named: Vec<u64>,
}

impl<'a> Frame<'a> {
    pub fn new(s: &'a LabStructure) -> Self {
        Frame { s, consts: s.constants().values().copied().collect(), named: s.sets().values().copied().collect() }
    }

    /// Atomic diagram of constants followed by `points`, over named sets
    /// followed by `sets`. Equal diagrams (for structures with the same
    /// vocabulary) mean the element correspondence is a partial isomorphism.
    pub fn diagram(&self, points: &[usize], sets: &[u64]) -> Vec<u64> {
        let elems: Vec<usize> = self.consts.iter().chain(points).copied().collect();
        let all_sets: Vec<u64> = self.named.iter().chain(sets).copied().collect();
        let b = self.s.branching();
        let mut out = Vec::with_capacity(elems.len() * (elems.len() + 2));
        for &x in &elems {
            for &y in &elems {
                let mut w = (x == y) as u64;
                for a in 0..b {
                    w |= ((self.s.succ(a, x) == Some(y)) as u64) << (a + 1);
                }
                out.push(w);
            }
            out.push(self.s.letter(x).unwrap_or(u64::MAX));
            for chunk in all_sets.chunks(64) {
                out.push(chunk.iter().enumerate().fold(0u64, |w, (i, m)| w | (m >> x & 1) << i));
            }
        }
        out
    }
}

/// Checks that two structures can be compared.
pub fn check_vocabulary(a: &LabStructure, b: &LabStructure) -> Result<(), MsoError> {
    let err = |m: String| Err(MsoError::Vocabulary(m));
    if a.branching() != b.branching() {
        return err(format!("{} vs {} successor relations", a.branching(), b.branching()));
    }
    if !a.constants().keys().eq(b.constants().keys()) {
        return err(format!(
            "constants {:?} vs {:?}",
            a.constants().keys().collect::<Vec<_>>(),
            b.constants().keys().collect::<Vec<_>>()
        ));
    }
    if !a.sets().keys().eq(b.sets().keys()) {
        return err(format!(
            "sets {:?} vs {:?}",
            a.sets().keys().collect::<Vec<_>>(),
            b.sets().keys().collect::<Vec<_>>()
        ));
    }
    if a.letters().is_some() != b.letters().is_some() {
        return err("only one structure has letters".into());
    }
    Ok(())
}

/// `(|D| + 2^|D|)^ρ`, saturating.
pub fn work_estimate(s: &LabStructure, rho: usize) -> u128 {
    let per_round = (s.size() as u128).saturating_add(1u128 << s.size());
    per_round.checked_pow(rho as u32).unwrap_or(u128::MAX)
}

pub(crate) fn check_guard(s: &LabStructure, rho: usize, limit: u128) -> Result<(), MsoError> {
    let w = work_estimate(s, rho);
    if w > limit {
        return Err(MsoError::Guard { what: "type computation work", size: w, limit });
    }
    Ok(())
}

type Key = (usize, Vec<usize>, Vec<u64>);

/// Computes rank types, memoizing per canonical structure so isomorphic
/// structures share work across calls.
#[derive(Debug)]
pub struct TypeEngine {
    limit: u128,
    memo: HashMap<CanonicalKey, HashMap<Key, Arc<RankType>>>,
}

impl Default for TypeEngine {
    fn default() -> Self {
        Self::new(DEFAULT_TYPE_WORK)
    }
}

impl TypeEngine {
    pub fn new(limit: u128) -> Self {
        TypeEngine { limit, memo: HashMap::new() }
    }

    pub fn rank_type(&mut self, s: &LabStructure, rho: usize) -> Result<Arc<RankType>, MsoError> {
        check_guard(s, rho, self.limit)?;
        let frame = Frame::new(s);
        let memo = self.memo.entry(s.canonical_key()).or_default();
        Ok(type_of(&frame, memo, &mut Vec::new(), &mut Vec::new(), rho))
    }

    pub fn equivalent(&mut self, a: &LabStructure, b: &LabStructure, rho: usize) -> Result<bool, MsoError> {
        check_vocabulary(a, b)?;
        check_guard(b, rho, self.limit)?;
        Ok(self.rank_type(a, rho)? == self.rank_type(b, rho)?)
    }
}

fn type_of(
    frame: &Frame<'_>,
    memo: &mut HashMap<Key, Arc<RankType>>,
    points: &mut Vec<usize>,
    sets: &mut Vec<u64>,
    r: usize,
) -> Arc<RankType> {
    if r == 0 {
        return Arc::new(RankType { rank: 0, payload: Payload::Atomic(frame.diagram(points, sets)) });
    }
    let key = (r, points.clone(), sets.clone());
    if let Some(t) = memo.get(&key) {
        return t.clone();
    }
    let mut pt = BTreeSet::new();
    for x in 0..frame.s.size() {
        points.push(x);
        pt.insert(type_of(frame, memo, points, sets, r - 1));
        points.pop();
    }
    let mut st = BTreeSet::new();
    for m in 0..=frame.s.full_mask() {
        sets.push(m);
        st.insert(type_of(frame, memo, points, sets, r - 1));
        sets.pop();
    }
    let t = Arc::new(RankType { rank: r, payload: Payload::Extensions { points: pt, sets: st } });
    memo.insert(key, t.clone());
    t
}

/// Rank-ρ type under the default work guard.
pub fn rank_type(s: &LabStructure, rho: usize) -> Result<RankType, MsoError> {
    TypeEngine::default().rank_type(s, rho).map(|t| (*t).clone())
}

/// Whether `a` and `b` have the same rank-ρ type.
pub fn ef_equivalent(a: &LabStructure, b: &LabStructure, rho: usize) -> Result<bool, MsoError> {
    TypeEngine::default().equivalent(a, b, rho)
}
