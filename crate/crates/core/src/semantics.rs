//! d-semantics over dynamic derivative models, axiom schemes and per-model
//! scheme validity.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{parse, Formula};
use crate::frames::{DynamicFrame, FrameClass, FrameError, StaticLogic};
use crate::set::PointSet;
use crate::spaces::{preimage, DerivativeSpace, SpaceError};

/// Exhaustive scheme checks stop at this many assignments.
pub const MAX_EXHAUSTIVE_ASSIGNMENTS_LOG2: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("function has {found} entries, expected {expected}")]
    FunctionLength { expected: usize, found: usize },
    #[error("f({world}) = {image} is out of range for {points} points")]
    FunctionOutOfRange {
        world: usize,
        image: usize,
        points: usize,
    },
    #[error("valuation of `{var}` mentions point {point}, but there are only {points} points")]
    ValuationOutOfRange {
        var: String,
        point: usize,
        points: usize,
    },
    #[error("point {point} is out of range for {points} points")]
    PointOutOfRange { point: usize, points: usize },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("exhaustive check needs 2^{log2} assignments, above the 2^{MAX_EXHAUSTIVE_ASSIGNMENTS_LOG2} limit")]
    BudgetExceeded { log2: usize },
}

/// A dynamic derivative model `⟨X, ρ, f, ν⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    space: DerivativeSpace,
    func: Vec<usize>,
    valuation: BTreeMap<String, PointSet>,
}

impl Model {
    pub fn new(
        space: DerivativeSpace,
        func: Vec<usize>,
        valuation: BTreeMap<String, PointSet>,
    ) -> Result<Self, ModelError> {
        let n = space.size();
        if func.len() != n {
            return Err(ModelError::FunctionLength {
                expected: n,
                found: func.len(),
            });
        }
        if let Some((world, &image)) = func.iter().enumerate().find(|&(_, &y)| y >= n) {
            return Err(ModelError::FunctionOutOfRange {
                world,
                image,
                points: n,
            });
        }
        for (var, &s) in &valuation {
            if let Some(point) = (s - space.full()).first() {
                return Err(ModelError::ValuationOutOfRange {
                    var: var.clone(),
                    point,
                    points: n,
                });
            }
        }
        Ok(Model {
            space,
            func,
            valuation,
        })
    }

    /// A Kripke model: `ρ = ↓⊏` and `f` taken from the frame.
    pub fn from_frame(
        frame: &DynamicFrame,
        valuation: BTreeMap<String, PointSet>,
    ) -> Result<Self, ModelError> {
        let func = frame.require_func()?.to_vec();
        Model::new(DerivativeSpace::from_frame(frame), func, valuation)
    }

    pub fn size(&self) -> usize {
        self.space.size()
    }

    pub fn points(&self) -> PointSet {
        self.space.full()
    }

    pub fn space(&self) -> &DerivativeSpace {
        &self.space
    }

    pub fn func(&self) -> &[usize] {
        &self.func
    }

    pub fn valuation(&self) -> &BTreeMap<String, PointSet> {
        &self.valuation
    }

    pub fn value(&self, var: &str) -> PointSet {
        self.valuation.get(var).copied().unwrap_or_default()
    }

    pub fn with_valuation(
        &self,
        valuation: BTreeMap<String, PointSet>,
    ) -> Result<Self, ModelError> {
        Model::new(self.space.clone(), self.func.clone(), valuation)
    }

    /// The dynamic frame, when the derivative is `↓⊏`.
    pub fn frame(&self) -> Option<DynamicFrame> {
        let fr = self.space.as_frame()?;
        Some(
            fr.with_func(self.func.clone())
                .expect("function checked at construction"),
        )
    }

    /// Variables of `f` with no valuation entry; they evaluate to `∅`.
    pub fn missing_variables(&self, f: &Formula) -> Vec<String> {
        f.vars()
            .into_iter()
            .filter(|v| !self.valuation.contains_key(v))
            .collect()
    }

    /// `‖f‖`.
    pub fn truth_set(&self, f: &Formula) -> PointSet {
        eval(&self.space, &self.func, f, &|v| self.value(v))
    }

    /// Truth at one point, or validity when `at` is `None`.
    pub fn check(&self, f: &Formula, at: Option<usize>) -> Result<CheckResult, ModelError> {
        if let Some(point) = at.filter(|&p| p >= self.size()) {
            return Err(ModelError::PointOutOfRange {
                point,
                points: self.size(),
            });
        }
        let truth = self.truth_set(f);
        let holds = match at {
            Some(p) => truth.contains(p),
            None => truth == self.points(),
        };
        Ok(CheckResult {
            holds,
            truth_set: truth,
            falsified: self.points() - truth,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub holds: bool,
    pub truth_set: PointSet,
    pub falsified: PointSet,
}

/// Evaluates `f` with variables looked up through `val`.
pub fn eval(
    space: &DerivativeSpace,
    func: &[usize],
    f: &Formula,
    val: &dyn Fn(&str) -> PointSet,
) -> PointSet {
    let full = space.full();
    match f {
        Formula::Var(p) => val(p) & full,
        Formula::Bot => PointSet::EMPTY,
        Formula::Neg(a) => eval(space, func, a, val).complement(space.size()),
        Formula::And(a, b) => eval(space, func, a, val) & eval(space, func, b, val),
        Formula::Dia(a) => space.rho(eval(space, func, a, val)),
        Formula::Next(a) => preimage(func, eval(space, func, a, val)),
        Formula::Tangle(args) => {
            let family: Vec<PointSet> = args.iter().map(|a| eval(space, func, a, val)).collect();
            space
                .tangled_derivative(&family)
                .expect("tangle arguments are nonempty")
        }
    }
}

#[derive(Debug, Clone)]
enum Op {
    Var(usize),
    Bot,
    Neg(usize),
    And(usize, usize),
    Dia(usize),
    Next(usize),
    Tangle(Vec<usize>),
}

/// A formula flattened into a shared-subterm program over indexed
/// variables, for evaluating one formula under many valuations.
#[derive(Debug, Clone)]
pub struct Compiled {
    vars: Vec<String>,
    ops: Vec<Op>,
}

impl Compiled {
    pub fn new(f: &Formula) -> Self {
        let vars: Vec<String> = f.vars().into_iter().collect();
        let mut c = Compiled {
            vars,
            ops: Vec::new(),
        };
        let mut seen = HashMap::new();
        c.push(f, &mut seen);
        c
    }

    fn push(&mut self, f: &Formula, seen: &mut HashMap<Formula, usize>) -> usize {
        if let Some(&i) = seen.get(f) {
            return i;
        }
        let op = match f {
            Formula::Var(p) => Op::Var(self.vars.binary_search(p).expect("variable collected")),
            Formula::Bot => Op::Bot,
            Formula::Neg(a) => Op::Neg(self.push(a, seen)),
            Formula::And(a, b) => {
                let a = self.push(a, seen);
                Op::And(a, self.push(b, seen))
            }
            Formula::Dia(a) => Op::Dia(self.push(a, seen)),
            Formula::Next(a) => Op::Next(self.push(a, seen)),
            Formula::Tangle(args) => Op::Tangle(args.iter().map(|a| self.push(a, seen)).collect()),
        };
        self.ops.push(op);
        seen.insert(f.clone(), self.ops.len() - 1);
        self.ops.len() - 1
    }

    /// Variables in sorted order; `eval` takes their values in this order.
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn eval(&self, space: &DerivativeSpace, func: &[usize], vals: &[PointSet]) -> PointSet {
        let mut scratch = Vec::with_capacity(self.ops.len());
        self.eval_into(space, func, vals, &mut scratch)
    }

    /// As [`Compiled::eval`], reusing `scratch` across calls.
    pub fn eval_into(
        &self,
        space: &DerivativeSpace,
        func: &[usize],
        vals: &[PointSet],
        scratch: &mut Vec<PointSet>,
    ) -> PointSet {
        let n = space.size();
        scratch.clear();
        for op in &self.ops {
            let s = match op {
                Op::Var(i) => vals[*i] & space.full(),
                Op::Bot => PointSet::EMPTY,
                Op::Neg(a) => scratch[*a].complement(n),
                Op::And(a, b) => scratch[*a] & scratch[*b],
                Op::Dia(a) => space.rho(scratch[*a]),
                Op::Next(a) => preimage(func, scratch[*a]),
                Op::Tangle(args) => {
                    let family: Vec<PointSet> = args.iter().map(|&a| scratch[a]).collect();
                    space
                        .tangled_derivative(&family)
                        .expect("tangle arguments are nonempty")
                }
            };
            scratch.push(s);
        }
        *scratch.last().expect("a formula has at least one node")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeName {
    K,
    T,
    #[serde(rename = "w4")]
    W4,
    #[serde(rename = "4")]
    Four,
    L,
    #[serde(rename = "Next~")]
    NextNeg,
    #[serde(rename = "Next&")]
    NextAnd,
    C,
    H,
}

impl SchemeName {
    pub const ALL: [SchemeName; 9] = [
        SchemeName::K,
        SchemeName::T,
        SchemeName::W4,
        SchemeName::Four,
        SchemeName::L,
        SchemeName::NextNeg,
        SchemeName::NextAnd,
        SchemeName::C,
        SchemeName::H,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SchemeName::K => "K",
            SchemeName::T => "T",
            SchemeName::W4 => "w4",
            SchemeName::Four => "4",
            SchemeName::L => "L",
            SchemeName::NextNeg => "Next~",
            SchemeName::NextAnd => "Next&",
            SchemeName::C => "C",
            SchemeName::H => "H",
        }
    }

    fn template_text(self) -> &'static str {
        match self {
            SchemeName::K => "[](p -> q) -> ([]p -> []q)",
            SchemeName::T => "[]p -> p",
            SchemeName::W4 => "p & []p -> [][]p",
            SchemeName::Four => "[]p -> [][]p",
            SchemeName::L => "[]([]p -> p) -> []p",
            SchemeName::NextNeg => "~X p <-> X ~p",
            SchemeName::NextAnd => "X(p & q) <-> X p & X q",
            SchemeName::C => "X p & X []p -> []X p",
            SchemeName::H => "[]X p <-> X []p",
        }
    }

    pub fn scheme(self) -> AxiomScheme {
        // `<->` is not concrete syntax; split on it and rebuild with `iff`
        let text = self.template_text();
        let template = match text.split_once(" <-> ") {
            Some((l, r)) => Formula::iff(parse(l).expect("template"), parse(r).expect("template")),
            None => parse(text).expect("template"),
        };
        AxiomScheme {
            name: self,
            template,
        }
    }
}

impl fmt::Display for SchemeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A scheme: a template whose variables are scheme letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomScheme {
    pub name: SchemeName,
    pub template: Formula,
}

impl AxiomScheme {
    pub fn letters(&self) -> Vec<String> {
        self.template.vars().into_iter().collect()
    }
}

/// The axioms beyond classical tautologies for each class.
pub fn logic_axioms(cls: FrameClass) -> Vec<AxiomScheme> {
    let mut names = match cls.static_logic() {
        StaticLogic::WK4 => vec![SchemeName::K, SchemeName::W4],
        StaticLogic::K4 => vec![SchemeName::K, SchemeName::Four],
        StaticLogic::GL => vec![SchemeName::K, SchemeName::Four, SchemeName::L],
    };
    names.extend([SchemeName::NextNeg, SchemeName::NextAnd]);
    names.push(if cls.is_invertible() {
        SchemeName::H
    } else {
        SchemeName::C
    });
    names.into_iter().map(SchemeName::scheme).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidityMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

/// A scheme instance falsified at `point`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterAssignment {
    pub assignment: BTreeMap<String, PointSet>,
    pub point: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeVerdict {
    pub scheme: SchemeName,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counter: Option<CounterAssignment>,
    pub checked: u64,
    pub exhaustive: bool,
}

const PARALLEL_ASSIGNMENTS: u64 = 1 << 12;

/// Checks a scheme with its letters valued directly by subsets. Exhaustive
/// mode walks assignments in index order, letter `j` taking bits
/// `[j·n, (j+1)·n)` of the index; the counterexample is the least index.
pub fn check_scheme_validity(
    m: &Model,
    s: &AxiomScheme,
    mode: ValidityMode,
) -> Result<SchemeVerdict, SemanticsError> {
    let prog = Compiled::new(&s.template);
    let n = m.size();
    let letters = prog.vars().len();
    let fails = |vals: &[PointSet]| -> Option<usize> {
        (m.points() - prog.eval(&m.space, &m.func, vals)).first()
    };
    let counter = |vals: Vec<PointSet>, point: usize| CounterAssignment {
        assignment: prog.vars().iter().cloned().zip(vals).collect(),
        point,
    };
    match mode {
        ValidityMode::Exhaustive => {
            let log2 = n * letters;
            if log2 > MAX_EXHAUSTIVE_ASSIGNMENTS_LOG2 {
                return Err(SemanticsError::BudgetExceeded { log2 });
            }
            let total = 1u64 << log2;
            let decode = |idx: u64| -> Vec<PointSet> {
                (0..letters)
                    .map(|j| PointSet::from_bits(idx >> (j * n)).window(0, n))
                    .collect()
            };
            let probe = |idx: u64| fails(&decode(idx)).map(|p| (idx, p));
            let found = if total >= PARALLEL_ASSIGNMENTS {
                (0..total).into_par_iter().find_map_first(probe)
            } else {
                (0..total).find_map(probe)
            };
            Ok(SchemeVerdict {
                scheme: s.name,
                holds: found.is_none(),
                counter: found.map(|(idx, p)| counter(decode(idx), p)),
                checked: found.map_or(total, |(idx, _)| idx + 1),
                exhaustive: true,
            })
        }
        ValidityMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..samples {
                let vals: Vec<PointSet> = (0..letters)
                    .map(|_| PointSet::from_bits(rng.gen()) & m.points())
                    .collect();
                if let Some(p) = fails(&vals) {
                    return Ok(SchemeVerdict {
                        scheme: s.name,
                        holds: false,
                        counter: Some(counter(vals, p)),
                        checked: i + 1,
                        exhaustive: false,
                    });
                }
            }
            Ok(SchemeVerdict {
                scheme: s.name,
                holds: true,
                counter: None,
                checked: samples,
                exhaustive: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn set(xs: &[usize]) -> PointSet {
        xs.iter().copied().collect()
    }

    fn val(pairs: &[(&str, &[usize])]) -> BTreeMap<String, PointSet> {
        pairs.iter().map(|(k, v)| (k.to_string(), set(v))).collect()
    }

    fn model(n: usize, rel: &[(usize, usize)], func: &[usize], v: &[(&str, &[usize])]) -> Model {
        let fr = DynamicFrame::new(n, rel.iter().copied(), Some(func.to_vec())).unwrap();
        Model::from_frame(&fr, val(v)).unwrap()
    }

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn truth_set_examples() {
        let point = model(1, &[], &[0], &[]);
        assert_eq!(point.truth_set(&p("<>T")), PointSet::EMPTY);
        let m = model(2, &[(0, 1)], &[1, 1], &[("p", &[1])]);
        assert_eq!(m.truth_set(&p("X p")), set(&[0, 1]));
        let chain = model(2, &[(0, 1)], &[0, 1], &[]);
        assert_eq!(chain.truth_set(&p("[]F")), set(&[1]));
        assert_eq!(
            chain.truth_set(&p("[]F")),
            chain.space().rho(chain.points()).complement(2)
        );
    }

    #[test]
    fn model_check_examples() {
        let refl = model(1, &[(0, 0)], &[0], &[("p", &[0])]);
        assert!(refl.check(&p("[]p -> p"), None).unwrap().holds);
        let irr = model(1, &[], &[0], &[]);
        let r = irr.check(&p("[]p -> p"), None).unwrap();
        assert!(!r.holds);
        assert_eq!(r.falsified, set(&[0]));
        assert!(irr.check(&p("[]p"), Some(0)).unwrap().holds);
        assert!(irr.check(&Formula::top(), None).unwrap().holds);
        assert!(matches!(
            irr.check(&Formula::top(), Some(1)),
            Err(ModelError::PointOutOfRange { .. })
        ));
        assert_eq!(
            irr.missing_variables(&p("p & q")),
            vec!["p".to_string(), "q".to_string()]
        );
    }

    #[test]
    fn compiled_matches_direct_evaluation() {
        let m = model(
            3,
            &[(0, 1), (1, 2), (0, 2), (2, 2)],
            &[1, 2, 2],
            &[("p", &[2]), ("q", &[0, 2])],
        );
        for text in [
            "p & X q",
            "<>(p & ~q) -> X <>p",
            "<*>{p, X q}",
            "[+](p | q) & X X ~p",
            "F",
            "[]X p <-> X []p",
        ] {
            let f = match text.split_once(" <-> ") {
                Some((l, r)) => Formula::iff(p(l), p(r)),
                None => p(text),
            };
            let c = Compiled::new(&f);
            let vals: Vec<PointSet> = c.vars().iter().map(|v| m.value(v)).collect();
            assert_eq!(
                c.eval(m.space(), m.func(), &vals),
                m.truth_set(&f),
                "{text}"
            );
        }
    }

    #[test]
    fn templates() {
        assert_eq!(SchemeName::C.scheme().template, p("X p & X []p -> []X p"));
        assert_eq!(SchemeName::W4.scheme().letters(), vec!["p".to_string()]);
        assert_eq!(SchemeName::K.scheme().letters().len(), 2);
        for name in SchemeName::ALL {
            assert_eq!(name.scheme().name, name);
        }
    }

    #[test]
    fn logic_axiom_examples() {
        let names = |cls| {
            logic_axioms(cls)
                .into_iter()
                .map(|s| s.name)
                .collect::<Vec<_>>()
        };
        use SchemeName::*;
        assert_eq!(names(FrameClass::WK4C), vec![K, W4, NextNeg, NextAnd, C]);
        assert_eq!(names(FrameClass::K4C), vec![K, Four, NextNeg, NextAnd, C]);
        assert_eq!(
            names(FrameClass::GLC),
            vec![K, Four, L, NextNeg, NextAnd, C]
        );
        assert_eq!(
            names(FrameClass::GLH),
            vec![K, Four, L, NextNeg, NextAnd, H]
        );
        assert!(!names(FrameClass::K4C).contains(&T));
    }

    #[test]
    fn scheme_validity_examples() {
        // not weakly monotonic: a ⊏ b, f swaps
        let m = model(2, &[(0, 1)], &[1, 0], &[]);
        let v =
            check_scheme_validity(&m, &SchemeName::C.scheme(), ValidityMode::Exhaustive).unwrap();
        assert!(!v.holds);
        let c = v.counter.unwrap();
        assert_eq!((c.assignment["p"], c.point), (set(&[1]), 0));

        let cluster = model(2, &[(0, 1), (1, 0)], &[0, 1], &[("p", &[1])]);
        assert!(cluster.check(&p("[]p"), Some(0)).unwrap().holds);
        assert!(!cluster.check(&p("[][]p"), Some(0)).unwrap().holds);
        let v = check_scheme_validity(
            &cluster,
            &SchemeName::Four.scheme(),
            ValidityMode::Exhaustive,
        )
        .unwrap();
        assert!(!v.holds);
        assert!(
            check_scheme_validity(&cluster, &SchemeName::W4.scheme(), ValidityMode::Exhaustive)
                .unwrap()
                .holds
        );

        let sampled = ValidityMode::Sampled {
            samples: 50,
            seed: 3,
        };
        let v = check_scheme_validity(&cluster, &SchemeName::W4.scheme(), sampled).unwrap();
        assert!(v.holds && !v.exhaustive && v.checked == 50);
    }

    #[test]
    fn exhaustive_budget() {
        let fr = DynamicFrame::new(11, [], Some((0..11).collect())).unwrap();
        let m = Model::from_frame(&fr, BTreeMap::new()).unwrap();
        assert_eq!(
            check_scheme_validity(&m, &SchemeName::K.scheme(), ValidityMode::Exhaustive),
            Err(SemanticsError::BudgetExceeded { log2: 22 })
        );
    }

    #[test]
    fn construction_errors() {
        let fr = DynamicFrame::new(2, [], Some(vec![0, 1])).unwrap();
        assert!(matches!(
            Model::from_frame(&fr, val(&[("p", &[2])])),
            Err(ModelError::ValuationOutOfRange { point: 2, .. })
        ));
        let static_frame = DynamicFrame::new(2, [], None).unwrap();
        assert!(matches!(
            Model::from_frame(&static_frame, BTreeMap::new()),
            Err(ModelError::Frame(_))
        ));
        let sp = DerivativeSpace::from_frame(&static_frame);
        assert!(matches!(
            Model::new(sp, vec![0, 5], BTreeMap::new()),
            Err(ModelError::FunctionOutOfRange { .. })
        ));
    }
}
