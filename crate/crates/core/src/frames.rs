//! Finite dynamic Kripke frames `<W, R, f>` and their relational properties.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::set::{PointSet, MAX_POINTS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("a frame needs at least one world")]
    NoWorlds,
    #[error("{0} worlds exceed the {MAX_POINTS}-world limit")]
    TooManyWorlds(usize),
    #[error("world {world} is out of range for a frame with {worlds} worlds")]
    WorldOutOfRange { world: usize, worlds: usize },
    #[error("function table has {found} entries, expected {expected}")]
    FunctionLength { expected: usize, found: usize },
    #[error("frame has no transition function")]
    MissingFunction,
}

/// The logics of the family and their frame conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FrameClass {
    #[serde(rename = "wK4C")]
    WK4C,
    K4C,
    GLC,
    #[serde(rename = "wK4H")]
    WK4H,
    K4H,
    GLH,
}

impl FrameClass {
    pub const ALL: [FrameClass; 6] = [
        FrameClass::WK4C,
        FrameClass::K4C,
        FrameClass::GLC,
        FrameClass::WK4H,
        FrameClass::K4H,
        FrameClass::GLH,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FrameClass::WK4C => "wK4C",
            FrameClass::K4C => "K4C",
            FrameClass::GLC => "GLC",
            FrameClass::WK4H => "wK4H",
            FrameClass::K4H => "K4H",
            FrameClass::GLH => "GLH",
        }
    }

    /// Homeomorphism classes require a persistent map.
    pub fn is_invertible(self) -> bool {
        matches!(self, FrameClass::WK4H | FrameClass::K4H | FrameClass::GLH)
    }

    pub fn static_logic(self) -> StaticLogic {
        match self {
            FrameClass::WK4C | FrameClass::WK4H => StaticLogic::WK4,
            FrameClass::K4C | FrameClass::K4H => StaticLogic::K4,
            FrameClass::GLC | FrameClass::GLH => StaticLogic::GL,
        }
    }

    /// The continuous-map class with the same static logic.
    pub fn continuous_counterpart(self) -> FrameClass {
        match self.static_logic() {
            StaticLogic::WK4 => FrameClass::WK4C,
            StaticLogic::K4 => FrameClass::K4C,
            StaticLogic::GL => FrameClass::GLC,
        }
    }
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown frame class `{0}` (expected one of wK4C, K4C, GLC, wK4H, K4H, GLH)")]
pub struct UnknownClass(pub String);

impl FromStr for FrameClass {
    type Err = UnknownClass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FrameClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownClass(s.to_string()))
    }
}

impl fmt::Display for StaticLogic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StaticLogic::WK4 => "wK4",
            StaticLogic::K4 => "K4",
            StaticLogic::GL => "GL",
        })
    }
}

/// The unimodal part of a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StaticLogic {
    WK4,
    K4,
    GL,
}

impl StaticLogic {
    /// Weakly transitive for wK4, transitive for K4, strict partial order for GL.
    pub fn admits(self, props: &RelationProperties) -> bool {
        match self {
            StaticLogic::WK4 => props.weakly_transitive.holds,
            StaticLogic::K4 => props.transitive.holds,
            StaticLogic::GL => props.transitive.holds && props.irreflexive.holds,
        }
    }

    /// Cheap direct test used by enumeration.
    pub fn admits_relation(self, succ: &[PointSet]) -> bool {
        match self {
            StaticLogic::WK4 => is_weakly_transitive(succ),
            StaticLogic::K4 => is_transitive(succ),
            StaticLogic::GL => {
                succ.iter().enumerate().all(|(w, s)| !s.contains(w)) && is_transitive(succ)
            }
        }
    }
}

/// Outcome of one property check; failures carry the lexicographically
/// least witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flag<W> {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<W>,
}

impl<W> Flag<W> {
    pub fn from_witness(witness: Option<W>) -> Self {
        Flag {
            holds: witness.is_none(),
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationProperties {
    /// `w R v R u` implies `w = u` or `w R u`; witness `(w, v, u)`.
    pub weakly_transitive: Flag<(usize, usize, usize)>,
    /// Witness `(w, v, u)` with `w R v R u` but not `w R u`.
    pub transitive: Flag<(usize, usize, usize)>,
    pub irreflexive: Flag<usize>,
    /// Witness `(w, v)` with `w != v`, `w R v R w`.
    pub antisymmetric: Flag<(usize, usize)>,
    /// Witness is a reflexive point `[w]` or a cycle `[w0, .., wk]` with
    /// `wi R w(i+1)` and `wk R w0`.
    pub converse_well_founded: Flag<Vec<usize>>,
    /// Witness `(a, b, c)` with `a, b` below `c` in the reflexive closure
    /// but incomparable.
    pub tree_like: Flag<(usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionProperties {
    pub weakly_monotonic: Flag<(usize, usize)>,
    pub monotonic: Flag<(usize, usize)>,
    /// Bijective and `w R v` iff `f(w) R f(v)`.
    pub persistent: Flag<(usize, usize)>,
}

/// A finite frame with worlds `0..n`, a relation stored as successor
/// bitsets, and an optional total map.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DynamicFrame {
    succ: Vec<PointSet>,
    func: Option<Vec<usize>>,
}

impl fmt::Debug for DynamicFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DynamicFrame")
            .field("worlds", &self.size())
            .field("rel", &self.pairs().collect::<Vec<_>>())
            .field("func", &self.func)
            .finish()
    }
}

fn check_size(n: usize) -> Result<(), FrameError> {
    if n == 0 {
        Err(FrameError::NoWorlds)
    } else if n > MAX_POINTS {
        Err(FrameError::TooManyWorlds(n))
    } else {
        Ok(())
    }
}

fn check_func(n: usize, func: &[usize]) -> Result<(), FrameError> {
    if func.len() != n {
        return Err(FrameError::FunctionLength {
            expected: n,
            found: func.len(),
        });
    }
    if let Some(&bad) = func.iter().find(|&&x| x >= n) {
        return Err(FrameError::WorldOutOfRange {
            world: bad,
            worlds: n,
        });
    }
    Ok(())
}

impl DynamicFrame {
    pub fn new(
        worlds: usize,
        rel: impl IntoIterator<Item = (usize, usize)>,
        func: Option<Vec<usize>>,
    ) -> Result<Self, FrameError> {
        check_size(worlds)?;
        let mut succ = vec![PointSet::EMPTY; worlds];
        for (u, v) in rel {
            for w in [u, v] {
                if w >= worlds {
                    return Err(FrameError::WorldOutOfRange { world: w, worlds });
                }
            }
            succ[u].insert(v);
        }
        if let Some(f) = &func {
            check_func(worlds, f)?;
        }
        Ok(DynamicFrame { succ, func })
    }

    pub fn from_successors(
        succ: Vec<PointSet>,
        func: Option<Vec<usize>>,
    ) -> Result<Self, FrameError> {
        let n = succ.len();
        check_size(n)?;
        let full = PointSet::full(n);
        for s in &succ {
            if let Some(bad) = (*s - full).first() {
                return Err(FrameError::WorldOutOfRange {
                    world: bad,
                    worlds: n,
                });
            }
        }
        if let Some(f) = &func {
            check_func(n, f)?;
        }
        Ok(DynamicFrame { succ, func })
    }

    pub fn size(&self) -> usize {
        self.succ.len()
    }

    pub fn worlds(&self) -> PointSet {
        PointSet::full(self.size())
    }

    pub fn successors(&self, w: usize) -> PointSet {
        self.succ[w]
    }

    pub fn successor_table(&self) -> &[PointSet] {
        &self.succ
    }

    pub fn predecessors(&self, w: usize) -> PointSet {
        (0..self.size())
            .filter(|&u| self.succ[u].contains(w))
            .collect()
    }

    pub fn related(&self, u: usize, v: usize) -> bool {
        self.succ[u].contains(v)
    }

    /// Reflexive closure of the relation.
    pub fn related_eq(&self, u: usize, v: usize) -> bool {
        u == v || self.succ[u].contains(v)
    }

    pub fn is_reflexive_at(&self, w: usize) -> bool {
        self.succ[w].contains(w)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, s)| s.iter().map(move |v| (u, v)))
    }

    pub fn func(&self) -> Option<&[usize]> {
        self.func.as_deref()
    }

    pub fn require_func(&self) -> Result<&[usize], FrameError> {
        self.func.as_deref().ok_or(FrameError::MissingFunction)
    }

    pub fn with_func(&self, func: Vec<usize>) -> Result<Self, FrameError> {
        check_func(self.size(), &func)?;
        Ok(DynamicFrame {
            succ: self.succ.clone(),
            func: Some(func),
        })
    }

    pub fn without_func(&self) -> Self {
        DynamicFrame {
            succ: self.succ.clone(),
            func: None,
        }
    }

    /// `{w : some v in A with w R v}`.
    pub fn downset(&self, a: PointSet) -> PointSet {
        downset(&self.succ, a)
    }

    /// `C(w) = {w} ∪ {v : w R v R w}` for each world.
    pub fn clusters(&self) -> Vec<PointSet> {
        (0..self.size())
            .map(|w| {
                let back: PointSet = self.succ[w]
                    .iter()
                    .filter(|&v| self.succ[v].contains(w))
                    .collect();
                back.with(w)
            })
            .collect()
    }

    /// Worlds reachable in one or more steps.
    pub fn transitive_closure(&self) -> Vec<PointSet> {
        let n = self.size();
        let mut reach = self.succ.clone();
        // Warshall over bit rows
        for k in 0..n {
            for i in 0..n {
                if reach[i].contains(k) {
                    reach[i] = reach[i] | reach[k];
                }
            }
        }
        reach
    }

    pub fn relation_properties(&self) -> RelationProperties {
        let n = self.size();
        let mut weak = None;
        let mut trans = None;
        'outer: for w in 0..n {
            for v in self.succ[w] {
                for u in self.succ[v] {
                    if !self.related(w, u) {
                        if trans.is_none() {
                            trans = Some((w, v, u));
                        }
                        if w != u {
                            weak = Some((w, v, u));
                            break 'outer;
                        }
                    }
                }
            }
        }
        let irreflexive = (0..n).find(|&w| self.related(w, w));
        let antisymmetric = (0..n)
            .flat_map(|w| (0..n).map(move |v| (w, v)))
            .find(|&(w, v)| w != v && self.related(w, v) && self.related(v, w));
        RelationProperties {
            weakly_transitive: Flag::from_witness(weak),
            transitive: Flag::from_witness(trans),
            irreflexive: Flag::from_witness(irreflexive),
            antisymmetric: Flag::from_witness(antisymmetric),
            converse_well_founded: Flag::from_witness(self.ascending_cycle()),
            tree_like: Flag::from_witness(self.tree_like_witness()),
        }
    }

    /// A reflexive point, or else a shortest cycle through the least world
    /// lying on one.
    fn ascending_cycle(&self) -> Option<Vec<usize>> {
        let n = self.size();
        if let Some(w) = (0..n).find(|&w| self.related(w, w)) {
            return Some(vec![w]);
        }
        let reach = self.transitive_closure();
        let start = (0..n).find(|&w| reach[w].contains(w))?;
        // BFS from `start` back to itself, smallest ids first
        let mut parent = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::from([start]);
        let mut seen = PointSet::singleton(start);
        while let Some(u) = queue.pop_front() {
            for v in self.succ[u] {
                if v == start {
                    let mut path = vec![u];
                    let mut cur = u;
                    while cur != start {
                        cur = parent[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Some(path);
                }
                if !seen.contains(v) {
                    seen.insert(v);
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        unreachable!("world {start} reaches itself")
    }

    fn tree_like_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.size();
        for a in 0..n {
            for b in 0..n {
                if self.related_eq(a, b) || self.related_eq(b, a) {
                    continue;
                }
                if let Some(c) = (0..n).find(|&c| self.related_eq(a, c) && self.related_eq(b, c)) {
                    return Some((a, b, c));
                }
            }
        }
        None
    }

    pub fn function_properties(&self) -> Result<FunctionProperties, FrameError> {
        let f = self.require_func()?;
        let n = self.size();
        let pairs = || (0..n).flat_map(|w| (0..n).map(move |v| (w, v)));
        let weak = pairs().find(|&(w, v)| self.related(w, v) && !self.related_eq(f[w], f[v]));
        let mono = pairs().find(|&(w, v)| self.related(w, v) && !self.related(f[w], f[v]));
        let persistent = pairs().find(|&(w, v)| {
            (w != v && f[w] == f[v]) || self.related(w, v) != self.related(f[w], f[v])
        });
        Ok(FunctionProperties {
            weakly_monotonic: Flag::from_witness(weak),
            monotonic: Flag::from_witness(mono),
            persistent: Flag::from_witness(persistent),
        })
    }

    /// Class membership: the static condition of the class plus weak
    /// monotonicity (continuous classes) or persistence (invertible ones).
    pub fn in_class(&self, cls: FrameClass) -> Result<bool, FrameError> {
        let f = self.require_func()?;
        if !cls.static_logic().admits_relation(&self.succ) {
            return Ok(false);
        }
        Ok(if cls.is_invertible() {
            is_persistent(&self.succ, f)
        } else {
            is_weakly_monotonic(&self.succ, f)
        })
    }
}

pub(crate) fn downset(succ: &[PointSet], a: PointSet) -> PointSet {
    let mut out = PointSet::EMPTY;
    for (w, s) in succ.iter().enumerate() {
        if s.intersects(a) {
            out.insert(w);
        }
    }
    out
}

pub(crate) fn is_weakly_transitive(succ: &[PointSet]) -> bool {
    succ.iter()
        .enumerate()
        .all(|(w, &s)| s.iter().all(|v| succ[v].without(w).is_subset(s)))
}

pub(crate) fn is_transitive(succ: &[PointSet]) -> bool {
    succ.iter().all(|&s| s.iter().all(|v| succ[v].is_subset(s)))
}

pub(crate) fn is_weakly_monotonic(succ: &[PointSet], f: &[usize]) -> bool {
    succ.iter().enumerate().all(|(w, &s)| {
        let fw = f[w];
        let allowed = succ[fw].with(fw);
        s.iter().all(|v| allowed.contains(f[v]))
    })
}

pub(crate) fn is_persistent(succ: &[PointSet], f: &[usize]) -> bool {
    let image: PointSet = f.iter().copied().collect();
    if image.len() != f.len() {
        return false;
    }
    let n = succ.len();
    (0..n).all(|w| (0..n).all(|v| succ[w].contains(v) == succ[f[w]].contains(f[v])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(n: usize, rel: &[(usize, usize)], func: Option<Vec<usize>>) -> DynamicFrame {
        DynamicFrame::new(n, rel.iter().copied(), func).unwrap()
    }

    fn set(xs: &[usize]) -> PointSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn downset_examples() {
        let chain = frame(2, &[(0, 1)], None);
        assert_eq!(chain.downset(set(&[1])), set(&[0]));
        assert_eq!(chain.downset(PointSet::EMPTY), PointSet::EMPTY);
        let refl = frame(1, &[(0, 0)], None);
        assert_eq!(refl.downset(set(&[0])), set(&[0]));
    }

    #[test]
    fn relation_property_examples() {
        let cluster = frame(2, &[(0, 1), (1, 0)], None);
        let r = cluster.relation_properties();
        assert!(r.weakly_transitive.holds);
        assert_eq!(r.transitive.witness, Some((0, 1, 0)));
        assert_eq!(r.converse_well_founded.witness, Some(vec![0, 1]));
        assert_eq!(r.antisymmetric.witness, Some((0, 1)));

        let chain = frame(3, &[(0, 1), (1, 2)], None);
        let r = chain.relation_properties();
        assert_eq!(r.weakly_transitive.witness, Some((0, 1, 2)));

        let single = frame(1, &[], None).relation_properties();
        assert!(single.weakly_transitive.holds && single.transitive.holds);
        assert!(single.irreflexive.holds && single.antisymmetric.holds);
        assert!(single.converse_well_founded.holds && single.tree_like.holds);

        let refl = frame(1, &[(0, 0)], None).relation_properties();
        assert_eq!(refl.converse_well_founded.witness, Some(vec![0]));
        assert_eq!(refl.irreflexive.witness, Some(0));

        // two roots below a common point
        let vee = frame(3, &[(0, 2), (1, 2)], None).relation_properties();
        assert_eq!(vee.tree_like.witness, Some((0, 1, 2)));
    }

    #[test]
    fn function_property_examples() {
        let id = frame(3, &[(0, 1), (1, 2), (0, 2)], Some(vec![0, 1, 2]));
        let p = id.function_properties().unwrap();
        assert!(p.weakly_monotonic.holds && p.monotonic.holds && p.persistent.holds);

        let swap = frame(2, &[(0, 1)], Some(vec![1, 0]));
        assert_eq!(
            swap.function_properties().unwrap().weakly_monotonic.witness,
            Some((0, 1))
        );

        let collapse = frame(2, &[(0, 1)], Some(vec![0, 0]));
        let p = collapse.function_properties().unwrap();
        assert!(p.weakly_monotonic.holds);
        assert!(!p.monotonic.holds);
        assert_eq!(p.persistent.witness, Some((0, 1)));

        assert_eq!(
            frame(1, &[], None).function_properties(),
            Err(FrameError::MissingFunction)
        );
    }

    #[test]
    fn class_examples() {
        let single = frame(1, &[], Some(vec![0]));
        for cls in FrameClass::ALL {
            assert!(single.in_class(cls).unwrap(), "{cls}");
        }
        let cluster = frame(2, &[(0, 1), (1, 0)], Some(vec![0, 1]));
        assert!(cluster.in_class(FrameClass::WK4C).unwrap());
        assert!(!cluster.in_class(FrameClass::K4C).unwrap());
        let refl = frame(1, &[(0, 0)], Some(vec![0]));
        assert!(refl.in_class(FrameClass::WK4C).unwrap());
        assert!(refl.in_class(FrameClass::K4C).unwrap());
        assert!(!refl.in_class(FrameClass::GLC).unwrap());
        assert_eq!(
            frame(1, &[], None).in_class(FrameClass::GLC),
            Err(FrameError::MissingFunction)
        );
    }

    #[test]
    fn cluster_examples() {
        assert_eq!(
            frame(2, &[(0, 1), (1, 0)], None).clusters(),
            vec![set(&[0, 1]); 2]
        );
        assert_eq!(
            frame(2, &[(0, 1)], None).clusters(),
            vec![set(&[0]), set(&[1])]
        );
        assert_eq!(frame(1, &[(0, 0)], None).clusters(), vec![set(&[0])]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(DynamicFrame::new(0, [], None), Err(FrameError::NoWorlds));
        assert_eq!(
            DynamicFrame::new(2, [(0, 2)], None),
            Err(FrameError::WorldOutOfRange {
                world: 2,
                worlds: 2
            })
        );
        assert_eq!(
            DynamicFrame::new(2, [], Some(vec![0])),
            Err(FrameError::FunctionLength {
                expected: 2,
                found: 1
            })
        );
        assert_eq!("glc".parse::<FrameClass>(), Ok(FrameClass::GLC));
        assert!("S4".parse::<FrameClass>().is_err());
    }

    /// Every relation on up to 3 worlds, compared against the literal
    /// quantifier definitions.
    #[test]
    fn fast_predicates_agree_with_definitions() {
        for n in 1..=3usize {
            for bits in 0u32..1 << (n * n) {
                let rel: Vec<_> = (0..n * n)
                    .filter(|i| bits >> i & 1 == 1)
                    .map(|i| (i / n, i % n))
                    .collect();
                let fr = frame(n, &rel, None);
                let r = |a: usize, b: usize| fr.related(a, b);
                let mut wt = true;
                let mut tr = true;
                for w in 0..n {
                    for v in 0..n {
                        for u in 0..n {
                            if r(w, v) && r(v, u) {
                                wt &= w == u || r(w, u);
                                tr &= r(w, u);
                            }
                        }
                    }
                }
                let props = fr.relation_properties();
                assert_eq!(props.weakly_transitive.holds, wt);
                assert_eq!(props.transitive.holds, tr);
                assert_eq!(is_weakly_transitive(fr.successor_table()), wt);
                assert_eq!(is_transitive(fr.successor_table()), tr);
                if props.transitive.holds {
                    assert!(props.weakly_transitive.holds);
                    if props.converse_well_founded.holds {
                        assert!(props.irreflexive.holds);
                    }
                }
            }
        }
    }

    #[test]
    fn downset_is_monotone_and_additive() {
        for n in 1..=3usize {
            for bits in 0u32..1 << (n * n) {
                let rel: Vec<_> = (0..n * n)
                    .filter(|i| bits >> i & 1 == 1)
                    .map(|i| (i / n, i % n))
                    .collect();
                let fr = frame(n, &rel, None);
                for a in PointSet::all_subsets(n) {
                    for b in PointSet::all_subsets(n) {
                        assert_eq!(fr.downset(a | b), fr.downset(a) | fr.downset(b));
                        if a.is_subset(b) {
                            assert!(fr.downset(a).is_subset(fr.downset(b)));
                        }
                    }
                }
            }
        }
    }
}
