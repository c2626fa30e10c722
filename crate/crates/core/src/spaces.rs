//! Finite derivative spaces: Cantor derivatives of finite (hence
//! Aleksandroff) topologies, relational derivatives `↓R` of frames,
//! explicit operator tables and topological sums.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frames::{downset, DynamicFrame};
use crate::set::{PointSet, MAX_POINTS};

/// Default bound on the number of points for exhaustive subset sweeps.
pub const DEFAULT_SUBSET_CAP: usize = 10;

/// Largest space an explicit operator table may describe.
pub const TABLE_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("a space needs at least one point")]
    NoPoints,
    #[error("{0} points exceed the {MAX_POINTS}-point limit")]
    TooManyPoints(usize),
    #[error("point {point} is out of range for a space with {points} points")]
    PointOutOfRange { point: usize, points: usize },
    #[error("not a topology: {0}")]
    NotATopology(String),
    #[error("explicit tables are limited to {TABLE_CAP} points, got {0}")]
    TableTooLarge(usize),
    #[error("table has {found} entries, expected {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("exhaustive sweep over {points} points exceeds the subset cap {cap}")]
    SubsetCapExceeded { points: usize, cap: usize },
    #[error("map has {found} entries, expected {expected}")]
    MapLength { expected: usize, found: usize },
    #[error("tangled derivative of an empty family")]
    EmptyFamily,
}

fn check_points(n: usize) -> Result<(), SpaceError> {
    if n == 0 {
        Err(SpaceError::NoPoints)
    } else if n > MAX_POINTS {
        Err(SpaceError::TooManyPoints(n))
    } else {
        Ok(())
    }
}

fn check_subset(n: usize, s: PointSet) -> Result<(), SpaceError> {
    match (s - PointSet::full(n)).first() {
        Some(point) => Err(SpaceError::PointOutOfRange { point, points: n }),
        None => Ok(()),
    }
}

/// A finite topology in its canonical form: the least open neighbourhood
/// of every point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteTopology {
    nbhd: Vec<PointSet>,
}

impl FiniteTopology {
    /// From a family of open sets, which must contain `∅` and the whole
    /// space and be closed under binary unions and intersections.
    pub fn from_opens(points: usize, opens: &[PointSet]) -> Result<Self, SpaceError> {
        check_points(points)?;
        let full = PointSet::full(points);
        for &u in opens {
            check_subset(points, u)?;
        }
        let family: BTreeSet<PointSet> = opens.iter().copied().collect();
        if !family.contains(&PointSet::EMPTY) {
            return Err(SpaceError::NotATopology("the empty set is not open".into()));
        }
        if !family.contains(&full) {
            return Err(SpaceError::NotATopology(
                "the whole space is not open".into(),
            ));
        }
        for &a in &family {
            for &b in &family {
                if !family.contains(&(a | b)) {
                    return Err(SpaceError::NotATopology(format!("{a} ∪ {b} is not open")));
                }
                if !family.contains(&(a & b)) {
                    return Err(SpaceError::NotATopology(format!("{a} ∩ {b} is not open")));
                }
            }
        }
        let nbhd = (0..points)
            .map(|x| {
                family
                    .iter()
                    .filter(|u| u.contains(x))
                    .fold(full, |acc, &u| acc & u)
            })
            .collect();
        Ok(FiniteTopology { nbhd })
    }

    /// From a minimal-neighbourhood map: `x ∈ N(x)` and `y ∈ N(x)` implies
    /// `N(y) ⊆ N(x)`.
    pub fn from_neighbourhoods(nbhd: Vec<PointSet>) -> Result<Self, SpaceError> {
        let n = nbhd.len();
        check_points(n)?;
        for (x, &nx) in nbhd.iter().enumerate() {
            check_subset(n, nx)?;
            if !nx.contains(x) {
                return Err(SpaceError::NotATopology(format!(
                    "point {x} is not in its neighbourhood"
                )));
            }
            if let Some(y) = nx.iter().find(|&y| !nbhd[y].is_subset(nx)) {
                return Err(SpaceError::NotATopology(format!(
                    "N({y}) is not contained in N({x}) although {y} ∈ N({x})"
                )));
            }
        }
        Ok(FiniteTopology { nbhd })
    }

    pub fn discrete(points: usize) -> Result<Self, SpaceError> {
        check_points(points)?;
        Ok(FiniteTopology {
            nbhd: (0..points).map(PointSet::singleton).collect(),
        })
    }

    pub fn indiscrete(points: usize) -> Result<Self, SpaceError> {
        check_points(points)?;
        Ok(FiniteTopology {
            nbhd: vec![PointSet::full(points); points],
        })
    }

    /// The Aleksandroff topology of a frame: opens are the up-closed sets.
    pub fn alexandroff(frame: &DynamicFrame) -> Self {
        let reach = frame.transitive_closure();
        FiniteTopology {
            nbhd: reach
                .into_iter()
                .enumerate()
                .map(|(x, r)| r.with(x))
                .collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.nbhd.len()
    }

    pub fn neighbourhood(&self, x: usize) -> PointSet {
        self.nbhd[x]
    }

    pub fn neighbourhoods(&self) -> &[PointSet] {
        &self.nbhd
    }

    pub fn is_open(&self, u: PointSet) -> bool {
        u.iter().all(|x| self.nbhd[x].is_subset(u))
    }

    /// All open sets, as unions of neighbourhoods, in increasing order.
    pub fn opens(&self) -> Vec<PointSet> {
        let mut family: BTreeSet<PointSet> = BTreeSet::from([PointSet::EMPTY]);
        for &nx in &self.nbhd {
            let grown: Vec<PointSet> = family.iter().map(|&u| u | nx).collect();
            family.extend(grown);
        }
        family.into_iter().collect()
    }

    /// `x ∈ d(S)` iff `N(x)` meets `S` outside `x`.
    pub fn cantor_derivative(&self, s: PointSet) -> PointSet {
        self.nbhd
            .iter()
            .enumerate()
            .filter(|&(x, nx)| !(*nx & s).without(x).is_empty())
            .map(|(x, _)| x)
            .collect()
    }

    pub fn closure(&self, s: PointSet) -> PointSet {
        s | self.cantor_derivative(s)
    }

    pub fn interior(&self, s: PointSet) -> PointSet {
        (0..self.size())
            .filter(|&x| self.nbhd[x].is_subset(s))
            .collect()
    }

    /// Every singleton is the intersection of an open and a closed set,
    /// i.e. `N(x) ∩ cl{x} = {x}`.
    pub fn is_td(&self) -> bool {
        (0..self.size())
            .all(|x| self.nbhd[x] & self.closure(PointSet::singleton(x)) == PointSet::singleton(x))
    }

    /// Disjoint union; the right summand's points are shifted past the left.
    pub fn sum(&self, other: &FiniteTopology) -> Result<Self, SpaceError> {
        let offset = self.size();
        let total = offset + other.size();
        if total > MAX_POINTS {
            return Err(SpaceError::TooManyPoints(total));
        }
        let mut nbhd = self.nbhd.clone();
        nbhd.extend(other.nbhd.iter().map(|n| n.shifted(offset)));
        Ok(FiniteTopology { nbhd })
    }
}

/// How the derivative operator is realised.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Derivative {
    /// `↓R` of a frame (the frame's map, if any, is ignored).
    Frame(DynamicFrame),
    /// Cantor derivative of a finite topology.
    Topology(FiniteTopology),
    /// `table[A.bits()]` is the derivative of `A`.
    Table(Vec<PointSet>),
    /// Topological sum; the right summand starts at the left one's size.
    Sum(Box<DerivativeSpace>, Box<DerivativeSpace>),
}

/// A finite set of points with a derivative operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DerivativeSpace {
    points: usize,
    rho: Derivative,
}

/// Result of an exhaustive or sampled sweep over subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport<W> {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<W>,
    pub checked: u64,
    pub exhaustive: bool,
}

/// Exhaustive up to a point cap, or a seeded sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    Exhaustive { cap: usize },
    Sampled { samples: u64, seed: u64 },
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep::Exhaustive {
            cap: DEFAULT_SUBSET_CAP,
        }
    }
}

impl Sweep {
    /// Exhaustive within the default cap, sampled beyond it.
    pub fn auto(points: usize, seed: u64) -> Self {
        if points <= DEFAULT_SUBSET_CAP {
            Sweep::default()
        } else {
            Sweep::Sampled {
                samples: 1 << 12,
                seed,
            }
        }
    }

    /// Subsets of `{0..n}` to visit, in a deterministic order.
    fn subsets(self, n: usize) -> Result<(Vec<PointSet>, bool), SpaceError> {
        match self {
            Sweep::Exhaustive { cap } => {
                if n > cap || n >= 64 {
                    return Err(SpaceError::SubsetCapExceeded { points: n, cap });
                }
                Ok((PointSet::all_subsets(n).collect(), true))
            }
            Sweep::Sampled { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let full = PointSet::full(n);
                let mut out = vec![PointSet::EMPTY, full];
                out.extend((0..samples).map(|_| PointSet::from_bits(rng.gen()) & full));
                Ok((out, false))
            }
        }
    }
}

/// Per-axiom verdicts for `ρ∅ = ∅`, additivity and `ρρA ⊆ A ∪ ρA`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivativeAxioms {
    pub empty: bool,
    pub additive: SweepReport<(PointSet, PointSet)>,
    pub weakly_idempotent: SweepReport<PointSet>,
}

impl DerivativeAxioms {
    pub fn all_hold(&self) -> bool {
        self.empty && self.additive.holds && self.weakly_idempotent.holds
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scattered {
    pub scattered: bool,
    /// The largest `S` with `S ⊆ ρ(S)` when it is nonempty.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<PointSet>,
}

impl DerivativeSpace {
    pub fn from_frame(frame: &DynamicFrame) -> Self {
        DerivativeSpace {
            points: frame.size(),
            rho: Derivative::Frame(frame.without_func()),
        }
    }

    pub fn from_topology(top: FiniteTopology) -> Self {
        DerivativeSpace {
            points: top.size(),
            rho: Derivative::Topology(top),
        }
    }

    pub fn from_table(points: usize, table: Vec<PointSet>) -> Result<Self, SpaceError> {
        check_points(points)?;
        if points > TABLE_CAP {
            return Err(SpaceError::TableTooLarge(points));
        }
        if table.len() != 1 << points {
            return Err(SpaceError::TableLength {
                expected: 1 << points,
                found: table.len(),
            });
        }
        for &s in &table {
            check_subset(points, s)?;
        }
        Ok(DerivativeSpace {
            points,
            rho: Derivative::Table(table),
        })
    }

    pub fn size(&self) -> usize {
        self.points
    }

    pub fn full(&self) -> PointSet {
        PointSet::full(self.points)
    }

    pub fn derivative(&self) -> &Derivative {
        &self.rho
    }

    /// The underlying frame when the operator is `↓R`.
    pub fn as_frame(&self) -> Option<&DynamicFrame> {
        match &self.rho {
            Derivative::Frame(fr) => Some(fr),
            _ => None,
        }
    }

    pub fn as_topology(&self) -> Option<&FiniteTopology> {
        match &self.rho {
            Derivative::Topology(t) => Some(t),
            _ => None,
        }
    }

    /// `ρ(A)`. Points outside the space are ignored.
    pub fn rho(&self, a: PointSet) -> PointSet {
        let a = a & self.full();
        match &self.rho {
            Derivative::Frame(fr) => downset(fr.successor_table(), a),
            Derivative::Topology(t) => t.cantor_derivative(a),
            Derivative::Table(table) => table[a.bits() as usize],
            Derivative::Sum(left, right) => {
                let offset = left.points;
                left.rho(a.window(0, offset))
                    | right.rho(a.window(offset, right.points)).shifted(offset)
            }
        }
    }

    /// `X ∖ ρ(X ∖ S)`.
    pub fn co_derivative(&self, s: PointSet) -> PointSet {
        self.rho(s.complement(self.points)).complement(self.points)
    }

    /// `S ∪ ρ(S)`.
    pub fn closure(&self, s: PointSet) -> PointSet {
        (s & self.full()) | self.rho(s)
    }

    /// `S ∩ ρ̂(S)`.
    pub fn interior(&self, s: PointSet) -> PointSet {
        s & self.co_derivative(s)
    }

    /// Topological sum `ρ_A(S ∩ A) ∪ ρ_B(S ∩ B)`. Two frames give their
    /// disjoint union and two topologies their sum topology.
    pub fn sum(&self, other: &DerivativeSpace) -> Result<DerivativeSpace, SpaceError> {
        let offset = self.points;
        let points = offset + other.points;
        if points > MAX_POINTS {
            return Err(SpaceError::TooManyPoints(points));
        }
        let rho = match (&self.rho, &other.rho) {
            (Derivative::Frame(a), Derivative::Frame(b)) => {
                let mut succ = a.successor_table().to_vec();
                succ.extend(b.successor_table().iter().map(|s| s.shifted(offset)));
                Derivative::Frame(DynamicFrame::from_successors(succ, None).expect("sizes checked"))
            }
            (Derivative::Topology(a), Derivative::Topology(b)) => Derivative::Topology(a.sum(b)?),
            _ => Derivative::Sum(Box::new(self.clone()), Box::new(other.clone())),
        };
        Ok(DerivativeSpace { points, rho })
    }

    /// The greatest fixpoint of `A ↦ A ∩ ρ(A)`; the space is scattered iff
    /// it is empty.
    pub fn perfect_kernel(&self) -> PointSet {
        let mut a = self.full();
        for _ in 0..=self.points {
            let next = a & self.rho(a);
            if next == a {
                return a;
            }
            a = next;
        }
        unreachable!(
            "decreasing iteration over {} points must stabilise",
            self.points
        )
    }

    pub fn is_scattered(&self) -> Scattered {
        let kernel = self.perfect_kernel();
        Scattered {
            scattered: kernel.is_empty(),
            witness: (!kernel.is_empty()).then_some(kernel),
        }
    }

    /// The largest `A` with `A ⊆ ρ(S ∩ A)` for every `S` in the family.
    pub fn tangled_derivative(&self, family: &[PointSet]) -> Result<PointSet, SpaceError> {
        if family.is_empty() {
            return Err(SpaceError::EmptyFamily);
        }
        let mut a = self.full();
        for _ in 0..=self.points {
            let next = family.iter().fold(a, |acc, &s| acc & self.rho(s & a));
            if next == a {
                assert!(
                    family.iter().all(|&s| a.is_subset(self.rho(s & a))),
                    "tangled derivative fixpoint is not tangled"
                );
                return Ok(a);
            }
            a = next;
        }
        unreachable!(
            "decreasing iteration over {} points must stabilise",
            self.points
        )
    }

    /// Exhaustive (or sampled) check of the three derivative-space axioms.
    pub fn validate_derivative_axioms(&self, sweep: Sweep) -> Result<DerivativeAxioms, SpaceError> {
        let (subsets, exhaustive) = sweep.subsets(self.points)?;
        let empty = self.rho(PointSet::EMPTY).is_empty();
        let rhos: Vec<PointSet> = subsets.iter().map(|&a| self.rho(a)).collect();

        let mut add_witness = None;
        let mut add_checked = 0u64;
        'pairs: for (i, &a) in subsets.iter().enumerate() {
            for (j, &b) in subsets.iter().enumerate() {
                add_checked += 1;
                if self.rho(a | b) != rhos[i] | rhos[j] {
                    add_witness = Some((a, b));
                    break 'pairs;
                }
            }
        }
        let idem_witness = subsets
            .iter()
            .zip(&rhos)
            .find(|&(&a, &ra)| !self.rho(ra).is_subset(a | ra))
            .map(|(&a, _)| a);
        Ok(DerivativeAxioms {
            empty,
            additive: SweepReport {
                holds: add_witness.is_none(),
                witness: add_witness,
                checked: add_checked,
                exhaustive,
            },
            weakly_idempotent: SweepReport {
                holds: idem_witness.is_none(),
                witness: idem_witness,
                checked: subsets.len() as u64,
                exhaustive,
            },
        })
    }
}

fn check_map(f: &[usize], from: usize, to: usize) -> Result<(), SpaceError> {
    if f.len() != from {
        return Err(SpaceError::MapLength {
            expected: from,
            found: f.len(),
        });
    }
    if let Some(&bad) = f.iter().find(|&&y| y >= to) {
        return Err(SpaceError::PointOutOfRange {
            point: bad,
            points: to,
        });
    }
    Ok(())
}

/// `f⁻¹(A)` for a map given as a table.
pub fn preimage(f: &[usize], a: PointSet) -> PointSet {
    f.iter()
        .enumerate()
        .filter(|&(_, &y)| a.contains(y))
        .map(|(x, _)| x)
        .collect()
}

/// `ρ_X f⁻¹(A) ⊆ f⁻¹(A) ∪ f⁻¹ ρ_Y(A)` for every `A ⊆ Y`; the witness is a
/// failing `A`.
pub fn check_continuous(
    f: &[usize],
    x: &DerivativeSpace,
    y: &DerivativeSpace,
    sweep: Sweep,
) -> Result<SweepReport<PointSet>, SpaceError> {
    check_map(f, x.size(), y.size())?;
    let (subsets, exhaustive) = sweep.subsets(y.size())?;
    let witness = subsets.iter().copied().find(|&a| {
        let pre = preimage(f, a);
        !x.rho(pre).is_subset(pre | preimage(f, y.rho(a)))
    });
    Ok(SweepReport {
        holds: witness.is_none(),
        witness,
        checked: subsets.len() as u64,
        exhaustive,
    })
}

/// Bijective and `ρ_X f⁻¹(A) = f⁻¹ ρ_Y(A)` for every `A ⊆ Y`. A
/// non-bijective map fails with no subset witness.
pub fn check_homeomorphism(
    f: &[usize],
    x: &DerivativeSpace,
    y: &DerivativeSpace,
    sweep: Sweep,
) -> Result<SweepReport<PointSet>, SpaceError> {
    check_map(f, x.size(), y.size())?;
    let image: PointSet = f.iter().copied().collect();
    if x.size() != y.size() || image != y.full() {
        return Ok(SweepReport {
            holds: false,
            witness: None,
            checked: 0,
            exhaustive: true,
        });
    }
    let (subsets, exhaustive) = sweep.subsets(y.size())?;
    let witness = subsets
        .iter()
        .copied()
        .find(|&a| x.rho(preimage(f, a)) != preimage(f, y.rho(a)));
    Ok(SweepReport {
        holds: witness.is_none(),
        witness,
        checked: subsets.len() as u64,
        exhaustive,
    })
}
