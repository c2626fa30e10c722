//! Model constructions: ⊕-doubling, unwinding into chains, model sums, the
//! cyclic power system of a space, moments and stories, and the dynamic
//! p-morphism and truth-preservation checkers that certify them.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{render, Formula, FormulaError};
use crate::frames::{DynamicFrame, FrameClass, FrameError};
use crate::semantics::{Model, ModelError};
use crate::set::{PointSet, MAX_POINTS};
use crate::spaces::{check_homeomorphism, preimage, DerivativeSpace, SpaceError, Sweep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("input is not in class {class}: {reason}")]
    ClassViolation { class: FrameClass, reason: String },
    #[error("the construction needs {0} points, above the {MAX_POINTS}-point limit")]
    Capacity(usize),
    #[error("the model is not based on a frame")]
    NotAFrame,
    #[error("point map has {found} entries, expected {expected}")]
    MapLength { expected: usize, found: usize },
    #[error("point map sends {point} to {image}, outside the {points}-point target")]
    MapOutOfRange {
        point: usize,
        image: usize,
        points: usize,
    },
    #[error("the map is not a dynamic p-morphism: {0}")]
    PreconditionViolated(PMorphismFailure),
    #[error("power system needs n >= 1")]
    ZeroPower,
    #[error("invalid moment: {0}")]
    InvalidMoment(String),
    #[error("invalid story: {0}")]
    InvalidStory(StoryViolation),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

fn frame_of(m: &Model) -> Result<DynamicFrame, TransformError> {
    m.frame().ok_or(TransformError::NotAFrame)
}

fn require_class(fr: &DynamicFrame, cls: FrameClass) -> Result<(), TransformError> {
    let props = fr.relation_properties();
    let fprops = fr.function_properties()?;
    let reason = if !cls.static_logic().admits(&props) {
        format!(
            "relation does not satisfy the {} frame condition",
            cls.static_logic()
        )
    } else if cls.is_invertible() && !fprops.persistent.holds {
        format!(
            "function is not persistent at {:?}",
            fprops.persistent.witness
        )
    } else if !cls.is_invertible() && !fprops.weakly_monotonic.holds {
        format!(
            "function is not weakly monotonic at {:?}",
            fprops.weakly_monotonic.witness
        )
    } else {
        return Ok(());
    };
    Err(TransformError::ClassViolation { class: cls, reason })
}

/// `ν'(p) = π⁻¹(ν(p))`.
fn lift_valuation(m: &Model, projection: &[usize]) -> BTreeMap<String, PointSet> {
    m.valuation()
        .iter()
        .map(|(k, &v)| (k.clone(), preimage(projection, v)))
        .collect()
}

/// Result of a construction together with its projection back onto the
/// input and the certificate that the projection is a p-morphism.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub model: Model,
    pub projection: Vec<usize>,
    pub certificate: PMorphismReport,
}

/// The ⊕-construction: reflexive worlds are split into an irreflexive
/// 2-cluster; `π(w, i) = w`.
///
/// World `(w, 0)` precedes `(w, 1)`, and worlds are listed in order of `w`.
pub fn oplus(m: &Model) -> Result<Transformed, TransformError> {
    let fr = frame_of(m)?;
    require_class(&fr, FrameClass::WK4C)?;
    let n = fr.size();
    let mut index = vec![[usize::MAX; 2]; n];
    let mut projection = Vec::new();
    for (w, slot) in index.iter_mut().enumerate() {
        let copies = if fr.is_reflexive_at(w) { 2 } else { 1 };
        for s in slot.iter_mut().take(copies) {
            *s = projection.len();
            projection.push(w);
        }
    }
    if projection.len() > MAX_POINTS {
        return Err(TransformError::Capacity(projection.len()));
    }
    let g = fr.require_func()?;
    let copies_of = |w: usize| index[w].iter().copied().filter(|&i| i != usize::MAX);
    let mut rel = Vec::new();
    for (w, v) in fr.pairs() {
        for a in copies_of(w) {
            rel.extend(copies_of(v).filter(|&b| b != a).map(|b| (a, b)));
        }
    }
    let func = projection.iter().map(|&w| index[g[w]][0]).collect();
    let out = DynamicFrame::new(projection.len(), rel, Some(func))?;
    let model = Model::from_frame(&out, lift_valuation(m, &projection))?;
    let certificate =
        check_dynamic_pmorphism(&model, m, &projection, PMorphismOptions::surjective())?;
    assert!(
        certificate.holds,
        "⊕ projection is not a p-morphism: {certificate:?}"
    );
    Ok(Transformed {
        model,
        projection,
        certificate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthBound {
    /// `|W|` chains, plus the query's next depth when the frame has cycles.
    Auto {
        next_depth: Option<usize>,
    },
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub struct Unwound {
    pub frame: DynamicFrame,
    /// World `i` is the chain `chains[i]` of input worlds.
    pub chains: Vec<Vec<usize>>,
    pub projection: Vec<usize>,
    /// No chain of maximal length can be extended, so every world satisfies
    /// the back condition.
    pub exact: bool,
    /// Maximal-length chains whose last world has successors.
    pub frontier: PointSet,
}

/// The frame of `⊏`-chains ordered by strict initial segment, with `g`
/// acting entrywise and deleting repeated neighbours.
pub fn unwind(fr: &DynamicFrame, bound: DepthBound) -> Result<Unwound, TransformError> {
    require_class(fr, FrameClass::K4C)?;
    let props = fr.relation_properties();
    let n = fr.size();
    let strict_order = props.irreflexive.holds && props.antisymmetric.holds;
    let depth = match bound {
        DepthBound::Fixed(d) => d.max(1),
        DepthBound::Auto { next_depth } if !strict_order => n + next_depth.unwrap_or(0),
        DepthBound::Auto { .. } => n,
    };
    let mut chains: Vec<Vec<usize>> = (0..n).map(|w| vec![w]).collect();
    let mut layer = 0..n;
    for _ in 1..depth {
        let start = chains.len();
        for i in layer.clone() {
            let last = *chains[i].last().expect("chains are nonempty");
            for u in fr.successors(last) {
                if chains.len() >= MAX_POINTS {
                    return Err(TransformError::Capacity(chains.len() + 1));
                }
                let mut c = chains[i].clone();
                c.push(u);
                chains.push(c);
            }
        }
        layer = start..chains.len();
        if layer.is_empty() {
            break;
        }
    }
    let index: HashMap<&[usize], usize> = chains
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_slice(), i))
        .collect();
    let mut rel = Vec::new();
    for (i, c) in chains.iter().enumerate() {
        for k in 1..c.len() {
            rel.push((index[&c[..k]], i));
        }
    }
    let g = fr.require_func()?;
    let func = chains
        .iter()
        .map(|c| {
            let mut image: Vec<usize> = c.iter().map(|&w| g[w]).collect();
            image.dedup();
            index[image.as_slice()]
        })
        .collect();
    let projection: Vec<usize> = chains
        .iter()
        .map(|c| *c.last().expect("chains are nonempty"))
        .collect();
    let frontier: PointSet = chains
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            c.len() == depth && !fr.successors(*c.last().expect("nonempty")).is_empty()
        })
        .map(|(i, _)| i)
        .collect();
    let frame = DynamicFrame::new(chains.len(), rel, Some(func))?;
    Ok(Unwound {
        frame,
        chains,
        projection,
        exact: frontier.is_empty(),
        frontier,
    })
}

/// [`unwind`] on the underlying frame with the valuation lifted, certified
/// on the non-frontier worlds.
pub fn unwind_model(
    m: &Model,
    bound: DepthBound,
) -> Result<(Transformed, Unwound), TransformError> {
    let u = unwind(&frame_of(m)?, bound)?;
    let model = Model::from_frame(&u.frame, lift_valuation(m, &u.projection))?;
    let opts = PMorphismOptions {
        back_domain: Some(u.frame.worlds() - u.frontier),
        require_surjective: true,
    };
    let certificate = check_dynamic_pmorphism(&model, m, &u.projection, opts)?;
    assert!(
        certificate.holds,
        "unwinding projection is not a p-morphism: {certificate:?}"
    );
    let t = Transformed {
        model,
        projection: u.projection.clone(),
        certificate,
    };
    Ok((t, u))
}

/// Disjoint union of two models; the right model's points follow the left's.
pub fn sum_models(a: &Model, b: &Model) -> Result<Model, TransformError> {
    let offset = a.size();
    let space = a.space().sum(b.space())?;
    let func = a
        .func()
        .iter()
        .copied()
        .chain(b.func().iter().map(|&y| y + offset))
        .collect();
    let mut valuation = a.valuation().clone();
    for (k, &v) in b.valuation() {
        *valuation.entry(k.clone()).or_default() =
            valuation.get(k).copied().unwrap_or_default() | v.shifted(offset);
    }
    Ok(Model::new(space, func, valuation)?)
}

/// Values for the expressions `X^i p`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExtendedValuation {
    entries: BTreeMap<String, BTreeMap<usize, PointSet>>,
}

impl ExtendedValuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, var: impl Into<String>, iterate: usize, value: PointSet) {
        self.entries
            .entry(var.into())
            .or_default()
            .insert(iterate, value);
    }

    pub fn get(&self, var: &str, iterate: usize) -> PointSet {
        self.entries
            .get(var)
            .and_then(|m| m.get(&iterate))
            .copied()
            .unwrap_or_default()
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// `X^k p ↦ X^(k+i) p`.
    pub fn shifted(&self, i: usize) -> ExtendedValuation {
        let entries = self
            .entries
            .iter()
            .map(|(k, m)| {
                (
                    k.clone(),
                    m.iter()
                        .filter(|(&j, _)| j >= i)
                        .map(|(&j, &v)| (j - i, v))
                        .collect(),
                )
            })
            .collect();
        ExtendedValuation { entries }
    }
}

/// The `n`-fold sum of `sp` with `f(w, i) = (w, i+1 mod n)`; point `(w, i)`
/// has index `i·|A| + w` and lies in `ν(p)` iff `w ∈ ev(X^i p)`.
pub fn power_system(
    sp: &DerivativeSpace,
    n: usize,
    ev: &ExtendedValuation,
) -> Result<Model, TransformError> {
    if n == 0 {
        return Err(TransformError::ZeroPower);
    }
    let a = sp.size();
    if a * n > MAX_POINTS {
        return Err(TransformError::Capacity(a * n));
    }
    let mut space = sp.clone();
    for _ in 1..n {
        space = space.sum(sp)?;
    }
    let func: Vec<usize> = (0..n)
        .flat_map(|i| (0..a).map(move |w| ((i + 1) % n) * a + w))
        .collect();
    let valuation = ev
        .vars()
        .map(|p| {
            (
                p.to_string(),
                (0..n).fold(PointSet::EMPTY, |acc, i| acc | ev.get(p, i).shifted(i * a)),
            )
        })
        .collect();
    let cert = check_homeomorphism(&func, &space, &space, Sweep::auto(space.size(), 0))?;
    assert!(cert.holds, "cyclic shift is not a homeomorphism: {cert:?}");
    Ok(Model::new(space, func, valuation)?)
}

/// Evaluates a ○-normal formula on a bare space, reading `X^k p` as an atom
/// valued by `ev`.
pub fn eval_extended(
    sp: &DerivativeSpace,
    f: &Formula,
    ev: &ExtendedValuation,
) -> Result<PointSet, TransformError> {
    if f.contains_tangle() {
        return Err(FormulaError::TangleUnsupported.into());
    }
    if !f.is_next_normal() {
        return Err(TransformError::Formula(FormulaError::Syntax {
            pos: 0,
            message: format!("`{}` is not in next-normal form", render(f)),
        }));
    }
    Ok(eval_atoms(sp, f, ev))
}

fn eval_atoms(sp: &DerivativeSpace, f: &Formula, ev: &ExtendedValuation) -> PointSet {
    match f {
        Formula::Var(p) => ev.get(p, 0) & sp.full(),
        Formula::Bot => PointSet::EMPTY,
        Formula::Neg(a) => eval_atoms(sp, a, ev).complement(sp.size()),
        Formula::And(a, b) => eval_atoms(sp, a, ev) & eval_atoms(sp, b, ev),
        Formula::Dia(a) => sp.rho(eval_atoms(sp, a, ev)),
        Formula::Next(_) => {
            let mut k = 0;
            let mut cur = f;
            while let Formula::Next(inner) = cur {
                k += 1;
                cur = inner;
            }
            match cur {
                Formula::Var(p) => ev.get(p, k) & sp.full(),
                _ => unreachable!("checked next-normal"),
            }
        }
        Formula::Tangle(_) => unreachable!("checked tangle-free"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PMorphismOptions {
    /// Check the back condition only at these source worlds.
    pub back_domain: Option<PointSet>,
    pub require_surjective: bool,
}

impl PMorphismOptions {
    pub fn surjective() -> Self {
        PMorphismOptions {
            back_domain: None,
            require_surjective: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PMorphismCondition {
    Forth,
    Back,
    Commuting,
    Atoms,
    Surjective,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[error("{condition:?} fails at {witness:?}{}", var.as_ref().map(|v| format!(" for `{v}`")).unwrap_or_default())]
pub struct PMorphismFailure {
    pub condition: PMorphismCondition,
    /// `[w, v]` for forth, `[w, u]` for back (`u` the unmatched target
    /// successor), `[w]` for commuting and atoms, `[u]` for surjectivity.
    pub witness: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PMorphismReport {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<PMorphismFailure>,
}

fn check_map(h: &[usize], from: usize, to: usize) -> Result<(), TransformError> {
    if h.len() != from {
        return Err(TransformError::MapLength {
            expected: from,
            found: h.len(),
        });
    }
    if let Some((point, &image)) = h.iter().enumerate().find(|&(_, &y)| y >= to) {
        return Err(TransformError::MapOutOfRange {
            point,
            image,
            points: to,
        });
    }
    Ok(())
}

/// Forth, back, commuting with the dynamics, agreement on every atom of
/// either valuation, and optionally surjectivity, checked in that order.
pub fn check_dynamic_pmorphism(
    src: &Model,
    dst: &Model,
    h: &[usize],
    opts: PMorphismOptions,
) -> Result<PMorphismReport, TransformError> {
    let m = frame_of(src)?;
    let n = frame_of(dst)?;
    check_map(h, m.size(), n.size())?;
    let fail = |condition, witness: Vec<usize>, var: Option<String>| {
        Ok(PMorphismReport {
            holds: false,
            failure: Some(PMorphismFailure {
                condition,
                witness,
                var,
            }),
        })
    };
    if let Some((w, v)) = m.pairs().find(|&(w, v)| !n.related(h[w], h[v])) {
        return fail(PMorphismCondition::Forth, vec![w, v], None);
    }
    let domain = opts.back_domain.unwrap_or(m.worlds());
    for w in domain {
        let images: PointSet = m.successors(w).iter().map(|v| h[v]).collect();
        if let Some(u) = (n.successors(h[w]) - images).first() {
            return fail(PMorphismCondition::Back, vec![w, u], None);
        }
    }
    let (gm, gn) = (src.func(), dst.func());
    if let Some(w) = (0..m.size()).find(|&w| h[gm[w]] != gn[h[w]]) {
        return fail(PMorphismCondition::Commuting, vec![w], None);
    }
    let vars: BTreeSet<&String> = src
        .valuation()
        .keys()
        .chain(dst.valuation().keys())
        .collect();
    for var in vars {
        let (a, b) = (src.value(var), dst.value(var));
        if let Some(w) = (0..m.size()).find(|&w| a.contains(w) != b.contains(h[w])) {
            return fail(PMorphismCondition::Atoms, vec![w], Some(var.clone()));
        }
    }
    if opts.require_surjective {
        let image: PointSet = h.iter().copied().collect();
        if let Some(u) = (n.worlds() - image).first() {
            return fail(PMorphismCondition::Surjective, vec![u], None);
        }
    }
    Ok(PMorphismReport {
        holds: true,
        failure: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthViolation {
    pub formula: String,
    /// Source points where `φ` and its image disagree.
    pub points: PointSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthReport {
    pub checked: usize,
    pub violations: Vec<TruthViolation>,
}

impl TruthReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `‖φ‖_M = h⁻¹‖φ‖_N` for every formula. A violation means a bug in the
/// evaluator or the construction, since p-morphisms preserve every formula.
pub fn check_truth_preservation(
    src: &Model,
    dst: &Model,
    h: &[usize],
    formulas: &[Formula],
) -> Result<TruthReport, TransformError> {
    let pm = check_dynamic_pmorphism(src, dst, h, PMorphismOptions::default())?;
    if let Some(failure) = pm.failure {
        return Err(TransformError::PreconditionViolated(failure));
    }
    let violations = formulas
        .iter()
        .filter_map(|f| {
            let diff = {
                let here = src.truth_set(f);
                let there = preimage(h, dst.truth_set(f));
                (here - there) | (there - here)
            };
            (!diff.is_empty()).then(|| TruthViolation {
                formula: render(f),
                points: diff,
            })
        })
        .collect();
    Ok(TruthReport {
        checked: formulas.len(),
        violations,
    })
}

/// A finite rooted tree-like frame of a declared class, with a valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Moment {
    frame: DynamicFrame,
    root: usize,
    valuation: BTreeMap<String, PointSet>,
    class: FrameClass,
}

impl Moment {
    pub fn new(
        frame: &DynamicFrame,
        root: usize,
        valuation: BTreeMap<String, PointSet>,
        class: FrameClass,
    ) -> Result<Self, TransformError> {
        let frame = frame.without_func();
        let n = frame.size();
        let bad = |msg: String| Err(TransformError::InvalidMoment(msg));
        if root >= n {
            return bad(format!("root {root} is not a world"));
        }
        if let Some(w) = (0..n).find(|&w| !frame.related_eq(root, w)) {
            return bad(format!("world {w} is not above the root {root}"));
        }
        let props = frame.relation_properties();
        if let Some((a, b, c)) = props.tree_like.witness {
            return bad(format!(
                "not tree-like: {a} and {b} are incomparable below {c}"
            ));
        }
        if !class.static_logic().admits(&props) {
            return bad(format!(
                "relation does not satisfy the {} frame condition",
                class.static_logic()
            ));
        }
        for (var, &s) in &valuation {
            if let Some(p) = (s - frame.worlds()).first() {
                return bad(format!(
                    "valuation of `{var}` mentions point {p} outside the moment"
                ));
            }
        }
        Ok(Moment {
            frame,
            root,
            valuation,
            class,
        })
    }

    pub fn frame(&self) -> &DynamicFrame {
        &self.frame
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn valuation(&self) -> &BTreeMap<String, PointSet> {
        &self.valuation
    }

    pub fn class(&self) -> FrameClass {
        self.class
    }

    pub fn size(&self) -> usize {
        self.frame.size()
    }
}

/// A root cluster placed below the given submoments: every cluster world
/// sees every submoment world. The cluster's worlds come first, its world 0
/// is the root, and submoments follow in order.
pub fn compose_moment(
    cluster: &DynamicFrame,
    cluster_valuation: &BTreeMap<String, PointSet>,
    submoments: &[Moment],
    cls: FrameClass,
) -> Result<Moment, TransformError> {
    let c = cluster.size();
    let is_cluster = (0..c).all(|a| (0..c).all(|b| a == b || cluster.related(a, b)));
    if !is_cluster {
        return Err(TransformError::InvalidMoment(
            "the root worlds do not form a cluster".into(),
        ));
    }
    if cls.static_logic() == crate::frames::StaticLogic::GL
        && (c != 1 || cluster.is_reflexive_at(0))
    {
        return Err(TransformError::ClassViolation {
            class: cls,
            reason: "the root cluster must be a single irreflexive point".into(),
        });
    }
    if let Some(m) = submoments
        .iter()
        .find(|m| m.class.static_logic() != cls.static_logic())
    {
        return Err(TransformError::ClassViolation {
            class: cls,
            reason: format!("submoment declared for {}", m.class),
        });
    }
    let total = c + submoments.iter().map(Moment::size).sum::<usize>();
    if total > MAX_POINTS {
        return Err(TransformError::Capacity(total));
    }
    let above = PointSet::full(total) - PointSet::full(c);
    let mut succ: Vec<PointSet> = cluster
        .successor_table()
        .iter()
        .map(|&s| s | above)
        .collect();
    let mut valuation = cluster_valuation.clone();
    let mut offset = c;
    for m in submoments {
        succ.extend(m.frame.successor_table().iter().map(|s| s.shifted(offset)));
        for (k, &v) in &m.valuation {
            *valuation.entry(k.clone()).or_default() =
                valuation.get(k).copied().unwrap_or_default() | v.shifted(offset);
        }
        offset += m.size();
    }
    let frame = DynamicFrame::from_successors(succ, None)?;
    Moment::new(&frame, 0, valuation, cls)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StoryCondition {
    ClassMismatch,
    Moment,
    MapShape,
    WeaklyMonotonic,
    RootPreserving,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[error("{condition:?} violated at layer {layer}: {detail}")]
pub struct StoryViolation {
    pub condition: StoryCondition,
    pub layer: usize,
    pub detail: String,
}

/// Moments `S_0 .. S_I` linked by maps `f_i : S_i → S_{i+1}`; the last
/// layer maps to itself by the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Story {
    pub class: FrameClass,
    pub moments: Vec<Moment>,
    pub maps: Vec<Vec<usize>>,
}

impl Story {
    pub fn duration(&self) -> usize {
        self.moments.len().saturating_sub(1)
    }

    /// Index of the first point of each layer in [`story_to_model`].
    pub fn offsets(&self) -> Vec<usize> {
        self.moments
            .iter()
            .scan(0, |acc, m| {
                let o = *acc;
                *acc += m.size();
                Some(o)
            })
            .collect()
    }
}

/// The first violated story condition, or `None` for a valid story.
pub fn validate_story(s: &Story) -> Option<StoryViolation> {
    let v = |condition, layer, detail: String| {
        Some(StoryViolation {
            condition,
            layer,
            detail,
        })
    };
    if s.moments.is_empty() {
        return v(
            StoryCondition::MapShape,
            0,
            "a story needs at least one moment".into(),
        );
    }
    if s.maps.len() != s.moments.len() - 1 {
        return v(
            StoryCondition::MapShape,
            0,
            format!(
                "{} moments need {} maps, found {}",
                s.moments.len(),
                s.moments.len() - 1,
                s.maps.len()
            ),
        );
    }
    for (i, m) in s.moments.iter().enumerate() {
        if m.class.static_logic() != s.class.static_logic() {
            return v(
                StoryCondition::ClassMismatch,
                i,
                format!("moment declared for {}", m.class),
            );
        }
        if let Err(e) = Moment::new(&m.frame, m.root, m.valuation.clone(), m.class) {
            return v(StoryCondition::Moment, i, e.to_string());
        }
    }
    for (i, f) in s.maps.iter().enumerate() {
        let (here, next) = (&s.moments[i], &s.moments[i + 1]);
        if f.len() != here.size() {
            return v(
                StoryCondition::MapShape,
                i,
                format!("map has {} entries, expected {}", f.len(), here.size()),
            );
        }
        if let Some((w, &y)) = f.iter().enumerate().find(|&(_, &y)| y >= next.size()) {
            return v(
                StoryCondition::MapShape,
                i,
                format!("f({w}) = {y} is outside the next moment"),
            );
        }
        if let Some((w, u)) = here
            .frame
            .pairs()
            .find(|&(w, u)| !next.frame.related_eq(f[w], f[u]))
        {
            return v(
                StoryCondition::WeaklyMonotonic,
                i,
                format!("{w} ⊏ {u} but f({w}) ⋢ f({u})"),
            );
        }
        if f[here.root] != next.root {
            return v(
                StoryCondition::RootPreserving,
                i,
                format!(
                    "root {} maps to {} instead of root {}",
                    here.root, f[here.root], next.root
                ),
            );
        }
    }
    None
}

/// The disjoint union of the layers, with `f` the union of the maps and
/// the identity on the last layer.
pub fn story_to_model(s: &Story) -> Result<Model, TransformError> {
    if let Some(violation) = validate_story(s) {
        return Err(TransformError::InvalidStory(violation));
    }
    let offsets = s.offsets();
    let total = offsets.last().copied().unwrap_or(0) + s.moments.last().map_or(0, Moment::size);
    if total > MAX_POINTS {
        return Err(TransformError::Capacity(total));
    }
    let mut succ = Vec::with_capacity(total);
    let mut func = Vec::with_capacity(total);
    let mut valuation: BTreeMap<String, PointSet> = BTreeMap::new();
    for (i, m) in s.moments.iter().enumerate() {
        let o = offsets[i];
        succ.extend(m.frame.successor_table().iter().map(|x| x.shifted(o)));
        match s.maps.get(i) {
            Some(f) => func.extend(f.iter().map(|&y| y + offsets[i + 1])),
            None => func.extend(o..o + m.size()),
        }
        for (k, &val) in &m.valuation {
            *valuation.entry(k.clone()).or_default() =
                valuation.get(k).copied().unwrap_or_default() | val.shifted(o);
        }
    }
    let frame = DynamicFrame::from_successors(succ, Some(func))?;
    if !frame.in_class(s.class)? {
        return Err(TransformError::ClassViolation {
            class: s.class,
            reason: "assembled story frame fails the class check".into(),
        });
    }
    Ok(Model::from_frame(&frame, valuation)?)
}
