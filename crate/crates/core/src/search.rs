//! Bounded satisfiability and validity by enumerating finite frames or
//! story-shaped models, and seeded soundness fuzzing.
//!
//! A witness found within the bound is conclusive. The absence of one is
//! only a claim up to the bound.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, FormulaError};
use crate::frames::{is_persistent, is_weakly_monotonic, DynamicFrame, FrameClass, StaticLogic};
use crate::semantics::{
    check_scheme_validity, logic_axioms, Compiled, CounterAssignment, Model, SchemeName,
    ValidityMode,
};
use crate::set::PointSet;
use crate::spaces::DerivativeSpace;
use crate::transforms::{power_system, story_to_model, ExtendedValuation, Moment, Story};

/// Largest frame size `enumerate_frames` accepts for a named class.
pub const MAX_CLASS_WORLDS: usize = 6;
/// Largest frame size when class filtering is off (all `2^(n²)` relations).
pub const MAX_ANY_WORLDS: usize = 4;
/// Exhaustive valuation search stops at `2^22` valuations per frame.
pub const MAX_EXHAUSTIVE_VALUATION_BITS: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuationMode {
    Exhaustive,
    Sampled(u64),
}

impl fmt::Display for ValuationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuationMode::Exhaustive => f.write_str("exhaustive"),
            ValuationMode::Sampled(k) => write!(f, "sampled:{k}"),
        }
    }
}

impl std::str::FromStr for ValuationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exhaustive" => Ok(ValuationMode::Exhaustive),
            _ => s
                .strip_prefix("sampled:")
                .and_then(|k| k.parse().ok())
                .filter(|&k| k > 0)
                .map(ValuationMode::Sampled)
                .ok_or_else(|| {
                    format!("expected `exhaustive` or `sampled:K` with K > 0, got `{s}`")
                }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_worlds: usize,
    pub max_story_branching: usize,
    pub max_valuations: ValuationMode,
    pub time_limit: Option<Duration>,
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    pub jobs: usize,
    /// Skip frames whose world signatures are not sorted.
    pub iso_pruning: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_worlds: 4,
            max_story_branching: 2,
            max_valuations: ValuationMode::Exhaustive,
            time_limit: None,
            seed: 0,
            jobs: 1,
            iso_pruning: true,
        }
    }
}

/// The budget as echoed in bounded verdicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetEcho {
    pub max_worlds: usize,
    pub max_story_branching: usize,
    pub valuations: String,
    pub seed: u64,
    /// Candidate frames or stories examined.
    pub candidates: u64,
}

impl BudgetEcho {
    fn new(b: &SearchBudget, candidates: u64) -> Self {
        BudgetEcho {
            max_worlds: b.max_worlds,
            max_story_branching: b.max_story_branching,
            valuations: b.max_valuations.to_string(),
            seed: b.seed,
            candidates,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Satisfiable { model: Model, point: usize },
    UnsatUpToBound(BudgetEcho),
    ValidUpToBound(BudgetEcho),
    CounterModel { model: Model, point: usize },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Satisfiable { .. } => "satisfiable",
            Verdict::UnsatUpToBound(_) => "unsat_up_to_bound",
            Verdict::ValidUpToBound(_) => "valid_up_to_bound",
            Verdict::CounterModel { .. } => "counter_model",
        }
    }

    /// Whether a witness or countermodel was found.
    pub fn found(&self) -> bool {
        matches!(
            self,
            Verdict::Satisfiable { .. } | Verdict::CounterModel { .. }
        )
    }

    pub fn model(&self) -> Option<(&Model, usize)> {
        match self {
            Verdict::Satisfiable { model, point } | Verdict::CounterModel { model, point } => {
                Some((model, *point))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    /// Sizes whose candidates were all examined.
    pub completed_sizes: usize,
    pub candidates: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("budget exceeded: {reason}")]
    BudgetExceeded { reason: String, progress: Progress },
    #[error("frames with {worlds} worlds exceed the enumeration limit of {limit}")]
    TooManyWorlds { worlds: usize, limit: usize },
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("witness failed re-verification: {0}")]
    Unverified(String),
    #[error("model generation failed: {0}")]
    GenerationFailed(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

fn budget_exceeded(
    reason: impl Into<String>,
    completed_sizes: usize,
    candidates: u64,
) -> SearchError {
    SearchError::BudgetExceeded {
        reason: reason.into(),
        progress: Progress {
            completed_sizes,
            candidates,
        },
    }
}

/// All preorders on `0..n` as reflexive successor tables, built by adding
/// one point at a time above a down-closed set and below an up-closed set.
pub fn preorders(n: usize) -> Vec<Vec<PointSet>> {
    let mut out: Vec<Vec<PointSet>> = vec![vec![]];
    for k in 0..n {
        let mut next = Vec::new();
        for p in &out {
            let preds = |x: usize| (0..k).filter(|&y| p[y].contains(x)).collect::<PointSet>();
            for up in PointSet::all_subsets(k) {
                if !up.iter().all(|u| p[u].is_subset(up)) {
                    continue;
                }
                for down in PointSet::all_subsets(k) {
                    if !down.iter().all(|d| preds(d).is_subset(down)) {
                        continue;
                    }
                    if !down.iter().all(|d| up.is_subset(p[d])) {
                        continue;
                    }
                    let mut q: Vec<PointSet> = p
                        .iter()
                        .enumerate()
                        .map(|(x, &s)| if down.contains(x) { s.with(k) } else { s })
                        .collect();
                    q.push(up.with(k));
                    next.push(q);
                }
            }
        }
        out = next;
    }
    out
}

fn rel_bits(succ: &[PointSet]) -> u64 {
    let n = succ.len();
    succ.iter()
        .enumerate()
        .fold(0, |acc, (u, s)| acc | s.bits() << (u * n))
}

/// Rejects budgets the enumeration could not honour, before any search.
fn check_budget(b: &SearchBudget, logic: Option<StaticLogic>) -> Result<(), SearchError> {
    let limit = if logic.is_some() {
        MAX_CLASS_WORLDS
    } else {
        MAX_ANY_WORLDS
    };
    if b.max_worlds > limit {
        return Err(SearchError::TooManyWorlds {
            worlds: b.max_worlds,
            limit,
        });
    }
    if b.max_worlds == 0 || b.jobs == 0 {
        return Err(SearchError::InvalidBudget(
            "max_worlds and jobs must be at least 1".into(),
        ));
    }
    Ok(())
}

fn from_bits(n: usize, bits: u64) -> Vec<PointSet> {
    (0..n)
        .map(|u| PointSet::from_bits(bits >> (u * n)).window(0, n))
        .collect()
}

/// All relations on `n` worlds admitted by `logic` (every relation when
/// `None`), in increasing order of the bitset with bit `u·n + v` for `u ⊏ v`.
pub fn relations(n: usize, logic: Option<StaticLogic>) -> Result<Vec<Vec<PointSet>>, SearchError> {
    let limit = if logic.is_some() {
        MAX_CLASS_WORLDS
    } else {
        MAX_ANY_WORLDS
    };
    if n == 0 || n > limit {
        return Err(SearchError::TooManyWorlds { worlds: n, limit });
    }
    let mut bits: Vec<u64> = match logic {
        None => (0..1u64 << (n * n)).collect(),
        Some(logic) => {
            let mut out = Vec::new();
            for p in preorders(n) {
                let strict: Vec<PointSet> =
                    p.iter().enumerate().map(|(w, s)| s.without(w)).collect();
                // loops may be dropped freely for wK4, only at trivial clusters for K4
                let droppable: PointSet = match logic {
                    StaticLogic::WK4 => PointSet::full(n),
                    StaticLogic::K4 | StaticLogic::GL => (0..n)
                        .filter(|&w| strict[w].iter().all(|v| !p[v].contains(w)))
                        .collect(),
                };
                if logic == StaticLogic::GL {
                    if droppable == PointSet::full(n) {
                        out.push(rel_bits(&strict));
                    }
                    continue;
                }
                for dropped in PointSet::all_subsets(droppable.len()) {
                    let dropped: PointSet = droppable
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| dropped.contains(i))
                        .map(|(_, w)| w)
                        .collect();
                    let succ: Vec<PointSet> = p
                        .iter()
                        .enumerate()
                        .map(|(w, &s)| if dropped.contains(w) { s.without(w) } else { s })
                        .collect();
                    out.push(rel_bits(&succ));
                }
            }
            out
        }
    };
    bits.sort_unstable();
    bits.dedup();
    Ok(bits.into_iter().map(|b| from_bits(n, b)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FuncRule {
    Any,
    WeaklyMonotonic,
    Persistent,
}

impl FuncRule {
    fn of(cls: Option<FrameClass>) -> Self {
        match cls {
            None => FuncRule::Any,
            Some(c) if c.is_invertible() => FuncRule::Persistent,
            Some(_) => FuncRule::WeaklyMonotonic,
        }
    }
}

/// Function tables allowed by `rule`, lexicographic with `f(0)` most
/// significant, optionally with fixed values.
fn functions(succ: &[PointSet], rule: FuncRule, fixed: &[Option<usize>]) -> Vec<Vec<usize>> {
    fn go(
        succ: &[PointSet],
        rule: FuncRule,
        fixed: &[Option<usize>],
        range: usize,
        f: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let w = f.len();
        if w == succ.len() {
            out.push(f.clone());
            return;
        }
        for y in 0..range {
            if fixed.get(w).copied().flatten().is_some_and(|v| v != y) {
                continue;
            }
            let ok = match rule {
                FuncRule::Any => true,
                FuncRule::WeaklyMonotonic => (0..w).all(|u| {
                    (!succ[u].contains(w) || f[u] == y || succ[f[u]].contains(y))
                        && (!succ[w].contains(u) || f[u] == y || succ[y].contains(f[u]))
                }),
                FuncRule::Persistent => {
                    !f.contains(&y)
                        && (0..w).all(|u| {
                            succ[u].contains(w) == succ[f[u]].contains(y)
                                && succ[w].contains(u) == succ[y].contains(f[u])
                        })
                        && succ[w].contains(w) == succ[y].contains(y)
                }
            };
            if ok {
                f.push(y);
                go(succ, rule, fixed, range, f, out);
                f.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(
        succ,
        rule,
        fixed,
        succ.len(),
        &mut Vec::with_capacity(succ.len()),
        &mut out,
    );
    out
}

/// Per-world isomorphism invariants; a frame is kept by pruning when they
/// are non-increasing in world order.
fn signatures(
    succ: &[PointSet],
    f: &[usize],
) -> Vec<(usize, std::cmp::Reverse<usize>, bool, bool, usize)> {
    let n = succ.len();
    (0..n)
        .map(|w| {
            let indeg = (0..n).filter(|&u| succ[u].contains(w)).count();
            let f_in = f.iter().filter(|&&y| y == w).count();
            (
                succ[w].len(),
                std::cmp::Reverse(indeg),
                succ[w].contains(w),
                f[w] == w,
                f_in,
            )
        })
        .collect()
}

fn canonical_enough(succ: &[PointSet], f: &[usize]) -> bool {
    signatures(succ, f).windows(2).all(|p| p[0] >= p[1])
}

/// All frames with exactly `n` worlds in the class (every frame when `cls`
/// is `None`), ordered by relation bitset, then function table.
pub fn enumerate_frames(
    n: usize,
    cls: Option<FrameClass>,
) -> Result<impl Iterator<Item = DynamicFrame>, SearchError> {
    let rels = relations(n, cls.map(FrameClass::static_logic))?;
    let rule = FuncRule::of(cls);
    Ok(rels.into_iter().flat_map(move |succ| {
        functions(&succ, rule, &[]).into_iter().map(move |f| {
            DynamicFrame::from_successors(succ.clone(), Some(f)).expect("sizes match")
        })
    }))
}

/// Generate-and-filter over every relation and function table; the oracle
/// for [`enumerate_frames`] at small sizes.
pub fn enumerate_frames_naive(n: usize, cls: Option<FrameClass>) -> Vec<DynamicFrame> {
    assert!((1..=3).contains(&n), "naive enumeration is for n <= 3");
    let mut out = Vec::new();
    for bits in 0..1u64 << (n * n) {
        let succ = from_bits(n, bits);
        for code in 0..n.pow(n as u32) {
            let f: Vec<usize> = (0..n).rev().map(|i| code / n.pow(i as u32) % n).collect();
            let fr = DynamicFrame::from_successors(succ.clone(), Some(f)).expect("sizes match");
            if cls.is_none_or(|c| fr.in_class(c).expect("function present")) {
                out.push(fr);
            }
        }
    }
    out
}

/// `b`-bit masks by popcount, then value.
fn masks_by_popcount(b: usize) -> impl Iterator<Item = u64> {
    (0..=b).flat_map(move |c| {
        let first = if c == 0 {
            Some(0u64)
        } else {
            Some((1u64 << c) - 1)
        };
        std::iter::successors(first, move |&x| {
            if x == 0 {
                return None;
            }
            // Gosper's hack
            let low = x & x.wrapping_neg();
            let ripple = x + low;
            let next = (((ripple ^ x) >> 2) / low) | ripple;
            (next < 1u64 << b).then_some(next)
        })
    })
}

fn decode(mask: u64, n: usize, vars: usize) -> Vec<PointSet> {
    (0..vars)
        .map(|j| PointSet::from_bits(mask >> (j * n)).window(0, n))
        .collect()
}

#[derive(Clone, Copy)]
enum Target {
    AnyPoint,
    Point(usize),
}

/// The first valuation under which `prog` is true at the target.
fn witness_valuation(
    prog: &Compiled,
    space: &DerivativeSpace,
    func: &[usize],
    mode: ValuationMode,
    seed: u64,
    target: Target,
) -> Result<Option<(Vec<PointSet>, usize)>, String> {
    let n = space.size();
    let vars = prog.vars().len();
    let mut scratch = Vec::new();
    let mut hit = |vals: &[PointSet]| {
        let truth = prog.eval_into(space, func, vals, &mut scratch);
        match target {
            Target::AnyPoint => truth.first(),
            Target::Point(p) => truth.contains(p).then_some(p),
        }
    };
    match mode {
        ValuationMode::Exhaustive => {
            let bits = n * vars;
            if bits > MAX_EXHAUSTIVE_VALUATION_BITS {
                return Err(format!(
                    "{vars} variables over {n} points need 2^{bits} valuations, above 2^{MAX_EXHAUSTIVE_VALUATION_BITS}"
                ));
            }
            for mask in masks_by_popcount(bits) {
                let vals = decode(mask, n, vars);
                if let Some(p) = hit(&vals) {
                    return Ok(Some((vals, p)));
                }
            }
            Ok(None)
        }
        ValuationMode::Sampled(k) => {
            let empty = vec![PointSet::EMPTY; vars];
            if let Some(p) = hit(&empty) {
                return Ok(Some((empty, p)));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..k {
                let vals: Vec<PointSet> = (0..vars)
                    .map(|_| PointSet::from_bits(rng.gen()) & space.full())
                    .collect();
                if let Some(p) = hit(&vals) {
                    return Ok(Some((vals, p)));
                }
            }
            Ok(None)
        }
    }
}

fn mix(seed: u64, parts: &[u64]) -> u64 {
    // splitmix64 over the parts
    parts.iter().fold(seed, |acc, &x| {
        let mut z = acc ^ x.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    })
}

enum Unit<T> {
    Hit(T),
    Timeout,
    Failed(String),
}

/// Runs `probe` over `0..count` and returns the result of the least index
/// that yields one, regardless of the number of workers.
fn first_hit<T: Send>(
    count: usize,
    jobs: usize,
    probe: impl Fn(usize) -> Option<Unit<T>> + Sync + Send,
) -> Option<Unit<T>> {
    if jobs <= 1 {
        (0..count).find_map(probe)
    } else {
        (0..count).into_par_iter().find_map_first(probe)
    }
}

fn with_pool<T: Send>(jobs: usize, run: impl FnOnce() -> T + Send) -> T {
    if jobs <= 1 {
        return run();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}

fn verify(
    model: &Model,
    f: &Formula,
    point: usize,
    cls: Option<FrameClass>,
) -> Result<(), SearchError> {
    if !model
        .check(f, Some(point))
        .map_err(|e| SearchError::Unverified(e.to_string()))?
        .holds
    {
        return Err(SearchError::Unverified(format!(
            "formula is false at point {point}"
        )));
    }
    if let Some(c) = cls {
        let fr = model
            .frame()
            .ok_or_else(|| SearchError::Unverified("witness is not a frame model".into()))?;
        if !fr
            .in_class(c)
            .map_err(|e| SearchError::Unverified(e.to_string()))?
        {
            return Err(SearchError::Unverified(format!(
                "witness frame is not in {c}"
            )));
        }
    }
    Ok(())
}

fn named(prog: &Compiled, vals: Vec<PointSet>) -> BTreeMap<String, PointSet> {
    prog.vars().iter().cloned().zip(vals).collect()
}

/// Finds a frame model of at most `max_worlds` worlds satisfying `f`,
/// smallest size first, then in enumeration and valuation order.
pub fn sat_search(
    f: &Formula,
    cls: Option<FrameClass>,
    b: &SearchBudget,
) -> Result<Verdict, SearchError> {
    check_budget(b, cls.map(FrameClass::static_logic))?;
    let prog = Compiled::new(f);
    let start = Instant::now();
    let rule = FuncRule::of(cls);
    let mut candidates = 0u64;
    for n in 1..=b.max_worlds {
        let rels = relations(n, cls.map(FrameClass::static_logic))?;
        let examined = AtomicU64::new(0);
        let found = with_pool(b.jobs, || {
            let probe = |i: usize| -> Option<Unit<(Model, usize)>> {
                if b.time_limit.is_some_and(|t| start.elapsed() > t) {
                    return Some(Unit::Timeout);
                }
                let succ = &rels[i];
                let space = DerivativeSpace::from_frame(
                    &DynamicFrame::from_successors(succ.clone(), None).expect("valid"),
                );
                for (j, func) in functions(succ, rule, &[]).into_iter().enumerate() {
                    if b.iso_pruning && !canonical_enough(succ, &func) {
                        continue;
                    }
                    examined.fetch_add(1, Ordering::Relaxed);
                    let seed = mix(b.seed, &[n as u64, i as u64, j as u64]);
                    match witness_valuation(
                        &prog,
                        &space,
                        &func,
                        b.max_valuations,
                        seed,
                        Target::AnyPoint,
                    ) {
                        Err(reason) => return Some(Unit::Failed(reason)),
                        Ok(Some((vals, point))) => {
                            let fr = DynamicFrame::from_successors(succ.clone(), Some(func))
                                .expect("valid");
                            let model = Model::from_frame(&fr, named(&prog, vals))
                                .expect("valuation in range");
                            return Some(Unit::Hit((model, point)));
                        }
                        Ok(None) => {}
                    }
                }
                None
            };
            first_hit(rels.len(), b.jobs, probe)
        });
        match found {
            Some(Unit::Hit((model, point))) => {
                verify(&model, f, point, cls)?;
                return Ok(Verdict::Satisfiable { model, point });
            }
            Some(Unit::Timeout) => {
                return Err(budget_exceeded("time limit reached", n - 1, candidates))
            }
            Some(Unit::Failed(reason)) => return Err(budget_exceeded(reason, n - 1, candidates)),
            None => candidates += examined.into_inner(),
        }
    }
    Ok(Verdict::UnsatUpToBound(BudgetEcho::new(b, candidates)))
}

/// `sat_search` on `¬f`: a countermodel, or validity up to the bound.
pub fn valid_at_bound(
    f: &Formula,
    cls: Option<FrameClass>,
    b: &SearchBudget,
) -> Result<Verdict, SearchError> {
    Ok(match sat_search(&Formula::not(f.clone()), cls, b)? {
        Verdict::Satisfiable { model, point } => Verdict::CounterModel { model, point },
        Verdict::UnsatUpToBound(echo) => Verdict::ValidUpToBound(echo),
        other => other,
    })
}

/// `story_search` on `¬f`.
pub fn story_valid(f: &Formula, cls: FrameClass, b: &SearchBudget) -> Result<Verdict, SearchError> {
    Ok(match story_search(&Formula::not(f.clone()), cls, b)? {
        Verdict::Satisfiable { model, point } => Verdict::CounterModel { model, point },
        Verdict::UnsatUpToBound(echo) => Verdict::ValidUpToBound(echo),
        other => other,
    })
}

/// A rooted frame shape usable as a moment: root 0, every world above it,
/// tree-like, within the branching and height limits.
#[derive(Debug, Clone)]
struct Shape {
    succ: Vec<PointSet>,
}

/// Cluster-level height and out-branching of a weakly transitive frame.
fn height_and_branching(succ: &[PointSet]) -> (usize, usize) {
    let n = succ.len();
    let cluster = |w: usize| {
        (0..n)
            .filter(|&v| v == w || (succ[w].contains(v) && succ[v].contains(w)))
            .collect::<PointSet>()
    };
    let strictly_above = |w: usize| succ[w] - cluster(w);
    let mut height = vec![0usize; n];
    // heights by repeated relaxation; the cluster DAG has depth at most n
    for _ in 0..n {
        for w in 0..n {
            height[w] = 1 + strictly_above(w)
                .iter()
                .map(|v| height[v])
                .max()
                .unwrap_or(0);
        }
    }
    let branching = (0..n)
        .map(|w| {
            let above = strictly_above(w);
            let immediate: Vec<PointSet> = above
                .iter()
                .filter(|&v| {
                    !above
                        .iter()
                        .any(|u| strictly_above(u).contains(v) && !cluster(u).contains(v))
                })
                .map(cluster)
                .collect();
            let mut distinct = immediate;
            distinct.sort();
            distinct.dedup();
            distinct.len()
        })
        .max()
        .unwrap_or(0);
    (height.into_iter().max().unwrap_or(0), branching)
}

fn moment_shapes(
    size: usize,
    logic: StaticLogic,
    max_height: Option<usize>,
    max_branching: usize,
) -> Result<Vec<Shape>, SearchError> {
    let mut out = Vec::new();
    for succ in relations(size, Some(logic))? {
        let fr = DynamicFrame::from_successors(succ.clone(), None).expect("valid");
        if (0..size).any(|w| !fr.related_eq(0, w))
            || fr.relation_properties().tree_like.witness.is_some()
        {
            continue;
        }
        let (h, br) = height_and_branching(&succ);
        if br > max_branching || max_height.is_some_and(|m| h > m) {
            continue;
        }
        out.push(Shape { succ });
    }
    Ok(out)
}

/// Compositions of `total` into `parts` positive sizes, lexicographic.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    (1..=total.saturating_sub(parts - 1))
        .flat_map(|first| {
            compositions(total - first, parts - 1)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
        })
        .collect()
}

/// Searches story-shaped models only: for continuous classes, stories of
/// duration `next_depth(f)` true at the first root; for invertible classes,
/// a single moment valued on the atoms `X^k p` of the next-normal form and
/// turned into its cyclic power system. Sizes grow from 1 to `max_worlds`.
pub fn story_search(
    f: &Formula,
    cls: FrameClass,
    b: &SearchBudget,
) -> Result<Verdict, SearchError> {
    check_budget(b, Some(cls.static_logic()))?;
    if cls.is_invertible() {
        return story_search_invertible(f, cls, b);
    }
    let prog = Compiled::new(f);
    let logic = cls.static_logic();
    let layers = f.next_depth() + 1;
    let max_height = (!f.contains_tangle()).then(|| f.modal_depth() + 1);
    let start = Instant::now();
    let mut shapes: Vec<Vec<Shape>> = vec![vec![]];
    let mut candidates = 0u64;
    for total in layers..=b.max_worlds.max(layers) {
        if total > b.max_worlds {
            break;
        }
        while shapes.len() <= total {
            shapes.push(moment_shapes(
                shapes.len(),
                logic,
                max_height,
                b.max_story_branching,
            )?);
        }
        // skeletons: per-layer sizes and shape indices
        let mut skeletons: Vec<Vec<(usize, usize)>> = Vec::new();
        for sizes in compositions(total, layers) {
            let mut acc: Vec<Vec<(usize, usize)>> = vec![vec![]];
            for &s in &sizes {
                acc = acc
                    .into_iter()
                    .flat_map(|prefix| {
                        (0..shapes[s].len()).map(move |k| {
                            let mut p = prefix.clone();
                            p.push((s, k));
                            p
                        })
                    })
                    .collect();
            }
            skeletons.extend(acc);
        }
        let shapes_ref = &shapes;
        let examined = AtomicU64::new(0);
        let found = with_pool(b.jobs, || {
            let probe = |i: usize| -> Option<Unit<Model>> {
                if b.time_limit.is_some_and(|t| start.elapsed() > t) {
                    return Some(Unit::Timeout);
                }
                let skel = &skeletons[i];
                let moments: Vec<&Shape> = skel.iter().map(|&(s, k)| &shapes_ref[s][k]).collect();
                for (j, maps) in story_maps(&moments).into_iter().enumerate() {
                    examined.fetch_add(1, Ordering::Relaxed);
                    let story = build_story(cls, &moments, &maps, &[]);
                    let bare = story_to_model(&story).expect("story built from valid parts");
                    let seed = mix(b.seed, &[total as u64, i as u64, j as u64]);
                    match witness_valuation(
                        &prog,
                        bare.space(),
                        bare.func(),
                        b.max_valuations,
                        seed,
                        Target::Point(0),
                    ) {
                        Err(reason) => return Some(Unit::Failed(reason)),
                        Ok(Some((vals, _))) => {
                            let valued = split_valuation(&story, &named(&prog, vals));
                            let story = build_story(cls, &moments, &maps, &valued);
                            return Some(Unit::Hit(story_to_model(&story).expect("valid story")));
                        }
                        Ok(None) => {}
                    }
                }
                None
            };
            first_hit(skeletons.len(), b.jobs, probe)
        });
        match found {
            Some(Unit::Hit(model)) => {
                verify(&model, f, 0, Some(cls))?;
                return Ok(Verdict::Satisfiable { model, point: 0 });
            }
            Some(Unit::Timeout) => {
                return Err(budget_exceeded("time limit reached", total - 1, candidates))
            }
            Some(Unit::Failed(reason)) => {
                return Err(budget_exceeded(reason, total - 1, candidates))
            }
            None => candidates += examined.into_inner(),
        }
    }
    Ok(Verdict::UnsatUpToBound(BudgetEcho::new(b, candidates)))
}

/// Root-preserving weakly monotonic maps between consecutive layers, as a
/// product in lexicographic order.
fn story_maps(moments: &[&Shape]) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for pair in moments.windows(2) {
        let (here, next) = (&pair[0].succ, &pair[1].succ);
        let options = layer_maps(here, next);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |m| {
                    let mut p = prefix.clone();
                    p.push(m.clone());
                    p
                })
            })
            .collect();
    }
    out
}

fn layer_maps(here: &[PointSet], next: &[PointSet]) -> Vec<Vec<usize>> {
    fn go(here: &[PointSet], next: &[PointSet], f: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let w = f.len();
        if w == here.len() {
            out.push(f.clone());
            return;
        }
        let choices = if w == 0 { 0..1 } else { 0..next.len() };
        for y in choices {
            let ok = (0..w).all(|u| {
                (!here[u].contains(w) || f[u] == y || next[f[u]].contains(y))
                    && (!here[w].contains(u) || f[u] == y || next[y].contains(f[u]))
            });
            if ok {
                f.push(y);
                go(here, next, f, out);
                f.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(here, next, &mut Vec::new(), &mut out);
    out
}

fn build_story(
    cls: FrameClass,
    moments: &[&Shape],
    maps: &[Vec<usize>],
    valuations: &[BTreeMap<String, PointSet>],
) -> Story {
    let moments = moments
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let fr = DynamicFrame::from_successors(s.succ.clone(), None).expect("valid");
            let val = valuations.get(i).cloned().unwrap_or_default();
            Moment::new(&fr, 0, val, cls).expect("shapes are moments")
        })
        .collect();
    Story {
        class: cls,
        moments,
        maps: maps.to_vec(),
    }
}

/// Splits a valuation of the assembled model back into its layers.
fn split_valuation(
    story: &Story,
    val: &BTreeMap<String, PointSet>,
) -> Vec<BTreeMap<String, PointSet>> {
    story
        .offsets()
        .iter()
        .zip(&story.moments)
        .map(|(&o, m)| {
            val.iter()
                .map(|(k, &v)| (k.clone(), v.window(o, m.size())))
                .collect()
        })
        .collect()
}

fn story_search_invertible(
    f: &Formula,
    cls: FrameClass,
    b: &SearchBudget,
) -> Result<Verdict, SearchError> {
    let nf = f.to_next_normal_form()?;
    let depth = nf.next_depth();
    let copies = depth + 1;
    let atoms: Vec<(String, usize)> = {
        let mut out = Vec::new();
        collect_atoms(&nf, &mut out);
        out.sort();
        out.dedup();
        out
    };
    let atom_name = |(p, k): &(String, usize)| format!("{p}#{k}");
    let flat = replace_atoms(&nf, &atom_name);
    let prog = Compiled::new(&flat);
    let max_height = Some(nf.modal_depth() + 1);
    let start = Instant::now();
    let mut candidates = 0u64;
    for size in 1..=b.max_worlds {
        if size * copies > crate::set::MAX_POINTS {
            break;
        }
        let shapes = moment_shapes(size, cls.static_logic(), max_height, b.max_story_branching)?;
        let found = with_pool(b.jobs, || {
            let probe = |i: usize| -> Option<Unit<Model>> {
                if b.time_limit.is_some_and(|t| start.elapsed() > t) {
                    return Some(Unit::Timeout);
                }
                let fr =
                    DynamicFrame::from_successors(shapes[i].succ.clone(), None).expect("valid");
                let space = DerivativeSpace::from_frame(&fr);
                let id: Vec<usize> = (0..size).collect();
                let seed = mix(b.seed, &[size as u64, i as u64]);
                match witness_valuation(
                    &prog,
                    &space,
                    &id,
                    b.max_valuations,
                    seed,
                    Target::Point(0),
                ) {
                    Err(reason) => Some(Unit::Failed(reason)),
                    Ok(Some((vals, _))) => {
                        let mut ev = ExtendedValuation::new();
                        for var in nf.vars() {
                            ev.set(var, 0, PointSet::EMPTY);
                        }
                        for (name, v) in prog.vars().iter().zip(vals) {
                            let (p, k) =
                                atoms.iter().find(|a| &atom_name(a) == name).expect("atom");
                            ev.set(p.clone(), *k, v);
                        }
                        Some(Unit::Hit(
                            power_system(&space, copies, &ev).expect("within capacity"),
                        ))
                    }
                    Ok(None) => None,
                }
            };
            first_hit(shapes.len(), b.jobs, probe)
        });
        match found {
            Some(Unit::Hit(model)) => {
                let fr = model.frame().expect("power of a frame is a frame");
                let model = Model::from_frame(&fr, model.valuation().clone()).expect("valid");
                verify(&model, f, 0, Some(cls))?;
                return Ok(Verdict::Satisfiable { model, point: 0 });
            }
            Some(Unit::Timeout) => {
                return Err(budget_exceeded("time limit reached", size - 1, candidates))
            }
            Some(Unit::Failed(reason)) => {
                return Err(budget_exceeded(reason, size - 1, candidates))
            }
            None => candidates += shapes.len() as u64,
        }
    }
    Ok(Verdict::UnsatUpToBound(BudgetEcho::new(b, candidates)))
}

fn next_atom(f: &Formula) -> Option<(String, usize)> {
    let mut k = 0;
    let mut cur = f;
    while let Formula::Next(inner) = cur {
        k += 1;
        cur = inner;
    }
    match cur {
        Formula::Var(p) => Some((p.clone(), k)),
        _ => None,
    }
}

fn collect_atoms(f: &Formula, out: &mut Vec<(String, usize)>) {
    if let Some(a) = next_atom(f) {
        out.push(a);
        return;
    }
    for c in f.children() {
        collect_atoms(c, out);
    }
}

fn replace_atoms(f: &Formula, name: &dyn Fn(&(String, usize)) -> String) -> Formula {
    if let Some(a) = next_atom(f) {
        return Formula::Var(name(&a));
    }
    match f {
        Formula::Var(_) | Formula::Bot => f.clone(),
        Formula::Neg(a) => Formula::not(replace_atoms(a, name)),
        Formula::And(a, b) => Formula::and(replace_atoms(a, name), replace_atoms(b, name)),
        Formula::Dia(a) => Formula::dia(replace_atoms(a, name)),
        Formula::Next(a) => Formula::next(replace_atoms(a, name)),
        Formula::Tangle(args) => {
            Formula::Tangle(args.iter().map(|a| replace_atoms(a, name)).collect())
        }
    }
}

/// Test hook for [`random_model`]: `SkipFunction` leaves the random map
/// unrepaired, so the fuzzer must report violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Repair {
    #[default]
    Full,
    SkipFunction,
}

/// Variables of random models.
pub const RANDOM_VARS: [&str; 2] = ["p", "q"];

/// A random model of the class on `size` worlds over `p` and `q`.
///
/// The relation is closed to the class's frame condition. A continuous map
/// is repaired by redirecting `f(v) := f(w)` for each violated `w ⊏ v`
/// until stable, falling back to a constant map. An invertible map is a
/// random automorphism when one of a few tries succeeds, else the identity.
pub fn random_model(
    cls: FrameClass,
    size: usize,
    seed: u64,
    repair: Repair,
) -> Result<Model, SearchError> {
    if size == 0 || size > crate::set::MAX_POINTS {
        return Err(SearchError::GenerationFailed(format!(
            "size {size} is out of range"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let succ = random_relation(cls.static_logic(), size, &mut rng);
    let mut func: Vec<usize> = (0..size).map(|_| rng.gen_range(0..size)).collect();
    if cls.is_invertible() {
        let mut perm: Vec<usize> = (0..size).collect();
        func = (0..size).collect();
        for _ in 0..32 {
            perm.shuffle(&mut rng);
            if repair == Repair::SkipFunction || is_persistent(&succ, &perm) {
                func = perm.clone();
                break;
            }
        }
    } else if repair == Repair::Full {
        repair_weakly_monotonic(&succ, &mut func);
    }
    let valuation = RANDOM_VARS
        .iter()
        .map(|v| {
            (
                v.to_string(),
                PointSet::from_bits(rng.gen()) & PointSet::full(size),
            )
        })
        .collect();
    let fr = DynamicFrame::from_successors(succ, Some(func)).expect("sizes match");
    if repair == Repair::Full && !fr.in_class(cls).expect("function present") {
        return Err(SearchError::GenerationFailed(format!(
            "repair left the frame outside {cls}"
        )));
    }
    Ok(Model::from_frame(&fr, valuation).expect("valuation in range"))
}

fn random_relation(logic: StaticLogic, n: usize, rng: &mut ChaCha8Rng) -> Vec<PointSet> {
    let density = rng.gen_range(0.15..0.6);
    match logic {
        StaticLogic::GL => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut succ = vec![PointSet::EMPTY; n];
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(density) {
                        succ[order[i]].insert(order[j]);
                    }
                }
            }
            transitive_closure(&mut succ);
            succ
        }
        StaticLogic::WK4 | StaticLogic::K4 => {
            let mut succ: Vec<PointSet> = (0..n)
                .map(|w| {
                    (0..n)
                        .filter(|&v| v != w && rng.gen_bool(density))
                        .collect::<PointSet>()
                        .with(w)
                })
                .collect();
            transitive_closure(&mut succ);
            for w in 0..n {
                let in_cluster = succ[w].iter().any(|v| v != w && succ[v].contains(w));
                let keep_loop = (logic == StaticLogic::K4 && in_cluster) || rng.gen_bool(0.5);
                if !keep_loop {
                    succ[w].remove(w);
                }
            }
            succ
        }
    }
}

fn transitive_closure(succ: &mut [PointSet]) {
    let n = succ.len();
    for k in 0..n {
        for i in 0..n {
            if succ[i].contains(k) {
                succ[i] = succ[i] | succ[k];
            }
        }
    }
}

fn repair_weakly_monotonic(succ: &[PointSet], func: &mut [usize]) {
    let n = succ.len();
    for _ in 0..n * n {
        let violation = (0..n)
            .flat_map(|w| succ[w].iter().map(move |v| (w, v)))
            .find(|&(w, v)| func[w] != func[v] && !succ[func[w]].contains(func[v]));
        match violation {
            Some((w, v)) => func[v] = func[w],
            None => return,
        }
    }
    if !is_weakly_monotonic(succ, func) {
        let c = func[0];
        func.iter_mut().for_each(|y| *y = c);
    }
}

/// A random formula over `vars` with modal depth at most `modal` and next
/// depth at most `next`, of roughly `size` connectives.
pub fn random_formula(
    rng: &mut impl Rng,
    vars: &[&str],
    size: usize,
    modal: usize,
    next: usize,
) -> Formula {
    if size == 0 || rng.gen_ratio(1, 6) {
        return match rng.gen_range(0..10) {
            0 => Formula::Bot,
            1 => Formula::top(),
            _ => Formula::var(*vars.choose(rng).expect("nonempty vars")),
        };
    }
    let sub = size - 1;
    match rng.gen_range(0..9) {
        0 | 1 => Formula::not(random_formula(rng, vars, sub, modal, next)),
        2 | 3 => {
            let left = rng.gen_range(0..=sub);
            Formula::and(
                random_formula(rng, vars, left, modal, next),
                random_formula(rng, vars, sub - left, modal, next),
            )
        }
        4 => {
            let left = rng.gen_range(0..=sub);
            Formula::imp(
                random_formula(rng, vars, left, modal, next),
                random_formula(rng, vars, sub - left, modal, next),
            )
        }
        5 if modal > 0 => Formula::dia(random_formula(rng, vars, sub, modal - 1, next)),
        6 if modal > 0 => Formula::square(random_formula(rng, vars, sub, modal - 1, next)),
        7 | 8 if next > 0 => Formula::next(random_formula(rng, vars, sub, modal, next - 1)),
        _ => Formula::not(random_formula(rng, vars, sub, modal, next)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzViolation {
    pub trial: u64,
    pub size: usize,
    pub scheme: SchemeName,
    pub counter: CounterAssignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub class: FrameClass,
    pub trials: u64,
    pub checks: u64,
    pub violations: Vec<FuzzViolation>,
}

/// Evaluates every axiom of the class exhaustively on `trials` random
/// models of 1 to `max_size` worlds; trial `t` uses a seed derived from
/// `seed` and `t` alone.
pub fn soundness_fuzz(
    cls: FrameClass,
    trials: u64,
    max_size: usize,
    seed: u64,
    repair: Repair,
) -> Result<FuzzReport, SearchError> {
    let axioms = logic_axioms(cls);
    let mut checks = 0;
    let mut violations = Vec::new();
    for t in 0..trials {
        let trial_seed = mix(seed, &[t]);
        let size = 1 + (trial_seed % max_size.max(1) as u64) as usize;
        let m = random_model(cls, size, trial_seed, repair)?;
        for ax in &axioms {
            checks += 1;
            let v = check_scheme_validity(&m, ax, ValidityMode::Exhaustive)
                .map_err(|e| budget_exceeded(e.to_string(), 0, t))?;
            if let Some(counter) = v.counter {
                violations.push(FuzzViolation {
                    trial: t,
                    size,
                    scheme: ax.name,
                    counter,
                });
            }
        }
    }
    Ok(FuzzReport {
        class: cls,
        trials,
        checks,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn preorder_counts() {
        let counts: Vec<usize> = (0..=5).map(|n| preorders(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 29, 355, 6942]);
        for n in 1..=3 {
            for p in preorders(n) {
                assert!((0..n).all(|w| p[w].contains(w)));
                assert!(crate::frames::is_transitive(&p));
            }
        }
    }

    #[test]
    fn relation_lists_match_filters() {
        for n in 1..=3 {
            for logic in [StaticLogic::WK4, StaticLogic::K4, StaticLogic::GL] {
                let fast = relations(n, Some(logic)).unwrap();
                let slow: Vec<Vec<PointSet>> = relations(n, None)
                    .unwrap()
                    .into_iter()
                    .filter(|s| logic.admits_relation(s))
                    .collect();
                assert_eq!(fast, slow, "n={n} {logic}");
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(
            enumerate_frames(1, Some(FrameClass::GLC)).unwrap().count(),
            1
        );
        assert_eq!(
            enumerate_frames(1, Some(FrameClass::WK4C)).unwrap().count(),
            2
        );
        for cls in FrameClass::ALL {
            for fr in enumerate_frames(3, Some(cls)).unwrap() {
                assert!(fr.in_class(cls).unwrap());
            }
        }
    }

    #[test]
    fn enumeration_matches_naive_oracle() {
        for n in 1..=3 {
            for cls in FrameClass::ALL.into_iter().map(Some).chain([None]) {
                let fast: Vec<DynamicFrame> = enumerate_frames(n, cls).unwrap().collect();
                assert_eq!(fast, enumerate_frames_naive(n, cls), "n={n} {cls:?}");
            }
        }
    }

    #[test]
    fn masks_in_popcount_order() {
        let all: Vec<u64> = masks_by_popcount(4).collect();
        assert_eq!(all.len(), 16);
        assert_eq!(&all[..6], &[0, 1, 2, 4, 8, 3]);
        assert!(all
            .windows(2)
            .all(|w| (w[0].count_ones(), w[0]) < (w[1].count_ones(), w[1])));
        assert_eq!(masks_by_popcount(0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn sat_examples() {
        let b = SearchBudget {
            max_worlds: 3,
            ..SearchBudget::default()
        };
        assert!(matches!(
            sat_search(&p("p & ~p"), Some(FrameClass::WK4C), &b).unwrap(),
            Verdict::UnsatUpToBound(_)
        ));
        let v = sat_search(&p("<>T"), Some(FrameClass::WK4C), &b).unwrap();
        let (m, point) = v.model().unwrap();
        assert_eq!(m.size(), 1);
        assert!(m.check(&p("<>T"), Some(point)).unwrap().holds);
        assert!(matches!(
            sat_search(&p("[+]p & <>~p"), Some(FrameClass::WK4C), &b).unwrap(),
            Verdict::UnsatUpToBound(_)
        ));
    }

    #[test]
    fn valid_examples() {
        let b = SearchBudget {
            max_worlds: 3,
            ..SearchBudget::default()
        };
        let v = valid_at_bound(&p("[]p -> [][]p"), Some(FrameClass::WK4C), &b).unwrap();
        let (m, _) = v.model().unwrap();
        let fr = m.frame().unwrap();
        assert_eq!(fr.pairs().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        let v = valid_at_bound(&p("[]([]p->p)->[]p"), Some(FrameClass::K4C), &b).unwrap();
        let (m, _) = v.model().unwrap();
        assert_eq!((m.size(), m.value("p")), (1, PointSet::EMPTY));
        assert!(m.frame().unwrap().is_reflexive_at(0));
        let c = crate::semantics::SchemeName::C.scheme().template;
        assert!(matches!(
            valid_at_bound(&c, Some(FrameClass::WK4C), &b).unwrap(),
            Verdict::ValidUpToBound(_)
        ));
    }

    #[test]
    fn story_examples() {
        let b = SearchBudget {
            max_worlds: 3,
            ..SearchBudget::default()
        };
        let v = story_search(&p("X p"), FrameClass::WK4C, &b).unwrap();
        let (m, _) = v.model().unwrap();
        assert_eq!((m.size(), m.func()), (2, &[1, 1][..]));
        assert_eq!(m.value("p"), PointSet::singleton(1));
        let v = story_search(&p("<>T"), FrameClass::GLC, &b).unwrap();
        let (m, _) = v.model().unwrap();
        assert_eq!(m.frame().unwrap().pairs().collect::<Vec<_>>(), vec![(0, 1)]);
        assert!(matches!(
            story_search(&p("p & ~p"), FrameClass::GLC, &b).unwrap(),
            Verdict::UnsatUpToBound(_)
        ));
        let v = story_search(&p("p & X ~p & X X p"), FrameClass::K4H, &b).unwrap();
        assert!(v.found());
    }

    #[test]
    fn random_models_are_in_class() {
        for cls in FrameClass::ALL {
            for seed in 0..40 {
                let m = random_model(cls, 1 + seed as usize % 6, seed, Repair::Full).unwrap();
                assert!(
                    m.frame().unwrap().in_class(cls).unwrap(),
                    "{cls} seed {seed}"
                );
            }
        }
    }

    #[test]
    fn fuzz_finds_nothing_with_repair_and_something_without() {
        let r = soundness_fuzz(FrameClass::WK4C, 100, 5, 7, Repair::Full).unwrap();
        assert!(r.violations.is_empty());
        let r = soundness_fuzz(FrameClass::WK4C, 100, 5, 7, Repair::SkipFunction).unwrap();
        assert!(r.violations.iter().any(|v| v.scheme == SchemeName::C));
    }

    #[test]
    fn jobs_do_not_change_results() {
        let f = p("<>(p & X q) & []~X p");
        for cls in [FrameClass::WK4C, FrameClass::GLC] {
            let one = sat_search(
                &f,
                Some(cls),
                &SearchBudget {
                    max_worlds: 4,
                    ..SearchBudget::default()
                },
            )
            .unwrap();
            let four = sat_search(
                &f,
                Some(cls),
                &SearchBudget {
                    max_worlds: 4,
                    jobs: 4,
                    ..SearchBudget::default()
                },
            )
            .unwrap();
            assert_eq!(one, four);
        }
    }
}
