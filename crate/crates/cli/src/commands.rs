use std::fs;
use std::path::Path;
use std::time::Duration;

use derivelog::formula::{parse, render, Formula, FormulaError};
use derivelog::frames::FrameError;
use derivelog::io::{
    parse_corpus, CorpusEntry, Expectation, IoError, ModelFile, QueryMode, TopologyFile,
    VerdictRecord,
};
use derivelog::search::{
    sat_search, soundness_fuzz, story_search, story_valid, valid_at_bound, Repair, SearchBudget,
    SearchError, Verdict,
};
use derivelog::semantics::{ModelError, SemanticsError};
use derivelog::spaces::{
    check_continuous, check_homeomorphism, SpaceError, Sweep, DEFAULT_SUBSET_CAP,
};
use derivelog::transforms::{
    oplus, power_system, sum_models, unwind_model, DepthBound, ExtendedValuation, TransformError,
};
use derivelog::{
    check_scheme_validity, logic_axioms, DerivativeSpace, FiniteTopology, FrameClass, Model,
    PointSet, ValidityMode,
};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::config::{parse_config, Config};
use crate::{BudgetArgs, Cli, Command, Engine, ModelOut, Query, StoryQuery, TopoCmd, TransformCmd};

const ANSWERED: u8 = 0;
const MISMATCH: u8 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

fn input(msg: impl std::fmt::Display) -> CliError {
    CliError::Input(msg.to_string())
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match &e {
            SearchError::BudgetExceeded { progress, .. } => CliError::Budget(format!(
                "{e} (completed sizes: {}, candidates: {})",
                progress.completed_sizes, progress.candidates
            )),
            _ => input(e),
        }
    }
}

impl From<SpaceError> for CliError {
    fn from(e: SpaceError) -> Self {
        match e {
            SpaceError::SubsetCapExceeded { .. } => CliError::Budget(e.to_string()),
            _ => input(e),
        }
    }
}

impl From<SemanticsError> for CliError {
    fn from(e: SemanticsError) -> Self {
        CliError::Budget(e.to_string())
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Capacity(_) => CliError::Budget(e.to_string()),
            TransformError::Space(s) => s.into(),
            _ => input(e),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Space(s) => s.into(),
            IoError::Transform(t) => t.into(),
            _ => input(e),
        }
    }
}

macro_rules! input_errors {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                input(e)
            }
        })*
    };
}

input_errors!(FormulaError, FrameError, ModelError, serde_json::Error);

/// Flags, then the config file, then built-in defaults.
struct Settings {
    cfg: Config,
    seed: u64,
    jobs: usize,
}

impl Settings {
    fn budget(&self, b: &BudgetArgs) -> Result<SearchBudget, CliError> {
        let d = SearchBudget::default();
        let time_limit = match b.time_limit {
            Some(s) if !(s.is_finite() && s > 0.0) => {
                return Err(input("--time-limit must be positive"))
            }
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => self.cfg.time_limit,
        };
        Ok(SearchBudget {
            max_worlds: b.max_worlds.or(self.cfg.max_worlds).unwrap_or(d.max_worlds),
            max_story_branching: b
                .branching
                .or(self.cfg.branching)
                .unwrap_or(d.max_story_branching),
            max_valuations: b
                .valuations
                .or(self.cfg.valuations)
                .unwrap_or(d.max_valuations),
            time_limit,
            seed: self.seed,
            jobs: self.jobs,
            iso_pruning: !b.no_iso_pruning,
        })
    }

    fn sweep(&self, points: usize) -> Sweep {
        let cap = self.cfg.subset_cap.unwrap_or(DEFAULT_SUBSET_CAP);
        if points <= cap {
            Sweep::Exhaustive { cap }
        } else {
            Sweep::Sampled {
                samples: 1 << 12,
                seed: self.seed,
            }
        }
    }
}

/// Collected output, written once at the end.
struct Out {
    pretty: bool,
    text: String,
}

impl Out {
    fn emit(&mut self, v: &Value) -> Result<(), CliError> {
        let s = if self.pretty {
            serde_json::to_string_pretty(v)?
        } else {
            serde_json::to_string(v)?
        };
        self.text.push_str(&s);
        self.text.push('\n');
        Ok(())
    }
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = match &cli.config {
        Some(path) => parse_config(&read(path)?).map_err(input)?,
        None if Path::new("derivelog.toml").is_file() => {
            parse_config(&read(Path::new("derivelog.toml"))?).map_err(input)?
        }
        None => Config::default(),
    };
    let jobs = cli.jobs.or(cfg.jobs).unwrap_or(1);
    if jobs == 0 {
        return Err(input("--jobs must be at least 1"));
    }
    let st = Settings {
        seed: cli.seed.or(cfg.seed).unwrap_or(0),
        jobs,
        cfg,
    };
    let mut out = Out {
        pretty: cli.pretty,
        text: String::new(),
    };
    let code = dispatch(cli, &st, &mut out)?;
    match &cli.out {
        Some(path) => {
            fs::write(path, &out.text).map_err(|e| input(format!("{}: {e}", path.display())))?
        }
        None => print!("{}", out.text),
    }
    Ok(code)
}

fn dispatch(cli: &Cli, st: &Settings, out: &mut Out) -> Result<u8, CliError> {
    match &cli.command {
        Command::Parse { formula } => {
            let f = parse(formula)?;
            out.emit(&json!({
                "formula": render(&f),
                "size": f.size(),
                "modal_depth": f.modal_depth(),
                "next_depth": f.next_depth(),
                "vars": f.vars(),
                "next_normal": f.is_next_normal(),
                "tangle": f.contains_tangle(),
            }))?;
        }
        Command::Nnf { formula } => {
            let f = parse(formula)?;
            let nf = f.to_next_normal_form()?;
            out.emit(&json!({
                "formula": render(&f),
                "normal_form": render(&nf),
                "next_depth": nf.next_depth(),
            }))?;
        }
        Command::Check {
            model,
            formula,
            point,
        } => {
            let m = load_model_file(model)?.to_model()?;
            let f = parse(formula)?;
            for v in m.missing_variables(&f) {
                eprintln!("warning: `{v}` has no valuation entry; taking it as empty");
            }
            let r = m.check(&f, *point)?;
            let mut v = json!({ "formula": render(&f) });
            if let Some(p) = point {
                v["point"] = json!(p);
            }
            merge(&mut v, serde_json::to_value(r)?);
            out.emit(&v)?;
        }
        Command::Props {
            model,
            space,
            class,
        } => {
            let path = model
                .as_ref()
                .or(space.as_ref())
                .expect("clap requires one");
            out.emit(&props(&load_model_file(path)?, *class, st)?)?;
        }
        Command::Sat(q) => return query(q, false, st, out),
        Command::Valid(q) => return query(q, true, st, out),
        Command::StorySat(q) => return story_query(q, st, out),
        Command::Transform { op } => transform(op, out)?,
        Command::Topo { op } => topo(op, out)?,
        Command::Fuzz {
            class,
            trials,
            max_worlds,
            broken_repair,
        } => {
            let trials = trials.or(st.cfg.trials).unwrap_or(200);
            let repair = if *broken_repair {
                Repair::SkipFunction
            } else {
                Repair::Full
            };
            let report = soundness_fuzz(*class, trials, *max_worlds, st.seed, repair)?;
            let clean = report.violations.is_empty();
            out.emit(&serde_json::to_value(report)?)?;
            if !clean {
                return Ok(MISMATCH);
            }
        }
        Command::Corpus {
            file,
            engine,
            budget,
        } => return corpus(file, *engine, &st.budget(budget)?, out),
    }
    Ok(ANSWERED)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_model_file(path: &Path) -> Result<ModelFile, CliError> {
    derivelog::io::parse_model_file(&read(path)?)
        .map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_space(path: &Path) -> Result<DerivativeSpace, CliError> {
    Ok(load_model_file(path)?.to_space()?)
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn props(mf: &ModelFile, class: Option<FrameClass>, st: &Settings) -> Result<Value, CliError> {
    let sp = mf.to_space()?;
    let n = sp.size();
    let mut v = Map::new();
    v.insert("points".into(), json!(n));
    let sweep = st.sweep(n);
    v.insert(
        "derivative_axioms".into(),
        serde_json::to_value(sp.validate_derivative_axioms(sweep)?)?,
    );
    v.insert("scattered".into(), serde_json::to_value(sp.is_scattered())?);
    v.insert("perfect_kernel".into(), json!(sp.perfect_kernel()));
    v.insert(
        "dense_in_itself".into(),
        json!(sp.rho(sp.full()) == sp.full()),
    );
    if let Some(t) = sp.as_topology() {
        v.insert("td".into(), json!(t.is_td()));
    }
    if let Some(fr) = sp.as_frame() {
        v.insert(
            "relation".into(),
            serde_json::to_value(fr.relation_properties())?,
        );
        v.insert(
            "alexandroff_td".into(),
            json!(FiniteTopology::alexandroff(fr).is_td()),
        );
        if let Some(func) = &mf.func {
            let dynamic = fr.with_func(func.clone())?;
            v.insert(
                "function".into(),
                serde_json::to_value(dynamic.function_properties()?)?,
            );
            let classes: Map<String, Value> = FrameClass::ALL
                .into_iter()
                .map(|c| Ok((c.name().to_string(), json!(dynamic.in_class(c)?))))
                .collect::<Result<_, FrameError>>()?;
            v.insert("classes".into(), Value::Object(classes));
        }
    }
    if let Some(func) = &mf.func {
        let m = Model::new(sp.clone(), func.clone(), mf.val.clone())?;
        v.insert(
            "continuous".into(),
            serde_json::to_value(check_continuous(m.func(), &sp, &sp, sweep)?)?,
        );
        if let Some(cls) = class {
            let verdicts = logic_axioms(cls)
                .iter()
                .map(|ax| {
                    let bits = ax.letters().len() * n;
                    let mode = if bits <= 16 {
                        ValidityMode::Exhaustive
                    } else {
                        ValidityMode::Sampled {
                            samples: 1 << 12,
                            seed: st.seed,
                        }
                    };
                    Ok(serde_json::to_value(check_scheme_validity(&m, ax, mode)?)?)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            v.insert("class".into(), json!(cls));
            v.insert("axioms".into(), Value::Array(verdicts));
        }
    } else if class.is_some() {
        return Err(input("--class needs a model with a function"));
    }
    Ok(Value::Object(v))
}

fn verdict_value(v: &Verdict, class: Option<FrameClass>, f: &Formula) -> Result<Value, CliError> {
    let rec = VerdictRecord::new(v, class)?;
    let mut val = json!({
        "formula": render(f),
        "class": class.map_or("any", FrameClass::name),
    });
    merge(&mut val, serde_json::to_value(rec)?);
    Ok(val)
}

fn finish(
    v: &Verdict,
    class: Option<FrameClass>,
    f: &Formula,
    expect: Option<Expectation>,
    out: &mut Out,
) -> Result<u8, CliError> {
    let mut val = verdict_value(v, class, f)?;
    if let Some(c) = val.get("caveat").and_then(Value::as_str) {
        eprintln!("note: {c}");
    }
    let mut code = ANSWERED;
    if let Some(e) = expect {
        let ok = e.matches(v);
        val["expect"] = json!(e);
        val["matches"] = json!(ok);
        if !ok {
            code = MISMATCH;
        }
    }
    out.emit(&val)?;
    Ok(code)
}

fn query(q: &Query, valid: bool, st: &Settings, out: &mut Out) -> Result<u8, CliError> {
    let f = parse(&q.formula)?;
    let b = st.budget(&q.budget)?;
    let cls = q.class.0;
    let v = if valid {
        valid_at_bound(&f, cls, &b)?
    } else {
        sat_search(&f, cls, &b)?
    };
    finish(&v, cls, &f, q.expect, out)
}

fn story_query(q: &StoryQuery, st: &Settings, out: &mut Out) -> Result<u8, CliError> {
    let f = parse(&q.formula)?;
    let b = st.budget(&q.budget)?;
    let target =
        match q.duration {
            None => f.clone(),
            Some(_) if q.class.is_invertible() => return Err(input(
                "--duration applies to continuous classes; invertible classes use a single moment",
            )),
            Some(d) if d < f.next_depth() => {
                return Err(input(format!(
                    "--duration {d} is below the next depth {} of the formula",
                    f.next_depth()
                )))
            }
            // a story of duration d for f is one for f ∧ X^d ⊤
            Some(d) => Formula::and(f.clone(), Formula::next_n(Formula::top(), d)),
        };
    let v = if q.valid {
        story_valid(&target, q.class, &b)?
    } else {
        story_search(&target, q.class, &b)?
    };
    finish(&v, Some(q.class), &f, q.expect, out)
}

/// The most specific class the model belongs to.
fn tightest_class(m: &Model) -> Result<Option<FrameClass>, CliError> {
    let Some(fr) = m.frame() else { return Ok(None) };
    for c in [
        FrameClass::GLH,
        FrameClass::K4H,
        FrameClass::WK4H,
        FrameClass::GLC,
        FrameClass::K4C,
        FrameClass::WK4C,
    ] {
        if fr.in_class(c)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

fn model_value(m: &Model, provenance: &str, sink: &ModelOut) -> Result<Value, CliError> {
    let file = ModelFile::from_model(m)?
        .with_class(tightest_class(m)?)
        .with_provenance(provenance);
    if let Some(path) = &sink.model_out {
        let text = serde_json::to_string_pretty(&file)? + "\n";
        fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    }
    Ok(serde_json::to_value(file)?)
}

fn transform(op: &TransformCmd, out: &mut Out) -> Result<(), CliError> {
    let v = match op {
        TransformCmd::Oplus { model, out: sink } => {
            let m = load_model_file(model)?.to_model()?;
            let t = oplus(&m)?;
            json!({
                "transform": "oplus",
                "model": model_value(&t.model, "oplus", sink)?,
                "projection": t.projection,
                "certificate": t.certificate,
            })
        }
        TransformCmd::Unwind {
            model,
            depth,
            out: sink,
        } => {
            let m = load_model_file(model)?.to_model()?;
            let bound = depth.map_or(DepthBound::Auto { next_depth: None }, DepthBound::Fixed);
            let (t, u) = unwind_model(&m, bound)?;
            json!({
                "transform": "unwind",
                "model": model_value(&t.model, "unwind", sink)?,
                "projection": t.projection,
                "chains": u.chains,
                "exact": u.exact,
                "frontier": u.frontier,
                "certificate": t.certificate,
            })
        }
        TransformCmd::Power {
            space,
            copies,
            ext_val,
            out: sink,
        } => {
            let sp = load_space(space)?;
            let ev: ExtendedValuation = match ext_val {
                Some(text) => serde_json::from_str(text)?,
                None => ExtendedValuation::new(),
            };
            let m = power_system(&sp, *copies, &ev)?;
            let cert =
                check_homeomorphism(m.func(), m.space(), m.space(), Sweep::auto(m.size(), 0))?;
            json!({
                "transform": "power",
                "model": model_value(&m, "power", sink)?,
                "copies": copies,
                "homeomorphism": cert,
            })
        }
        TransformCmd::Sum { model, out: sink } => {
            let [a, b] = &model[..] else {
                return Err(input("`transform sum` takes exactly two --model files"));
            };
            let (a, b) = (
                load_model_file(a)?.to_model()?,
                load_model_file(b)?.to_model()?,
            );
            let m = sum_models(&a, &b)?;
            json!({
                "transform": "sum",
                "model": model_value(&m, "sum", sink)?,
                "offset": a.size(),
            })
        }
    };
    out.emit(&v)
}

fn parse_set(text: &str, sp: &DerivativeSpace) -> Result<PointSet, CliError> {
    let s: PointSet = serde_json::from_str(text)?;
    if !s.is_subset(sp.full()) {
        return Err(input(format!(
            "set {text} has points outside the {}-point space",
            sp.size()
        )));
    }
    Ok(s)
}

fn topology_of(path: &Path) -> Result<FiniteTopology, CliError> {
    let sp = load_space(path)?;
    if let Some(t) = sp.as_topology() {
        return Ok(t.clone());
    }
    match sp.as_frame() {
        Some(fr) => Ok(FiniteTopology::alexandroff(fr)),
        None => Err(input("a derivative table has no underlying topology")),
    }
}

fn topo(op: &TopoCmd, out: &mut Out) -> Result<(), CliError> {
    let v = match op {
        TopoCmd::Scattered { space } => {
            let sp = load_space(space)?;
            let mut v = serde_json::to_value(sp.is_scattered())?;
            v["perfect_kernel"] = json!(sp.perfect_kernel());
            v
        }
        TopoCmd::Td { space } => json!({ "td": topology_of(space)?.is_td() }),
        TopoCmd::Tangle { space, sets } => {
            let sp = load_space(space)?;
            let texts: Vec<Value> = serde_json::from_str(sets)?;
            let family = texts
                .iter()
                .map(|t| parse_set(&t.to_string(), &sp))
                .collect::<Result<Vec<_>, _>>()?;
            json!({ "family": family, "tangle": sp.tangled_derivative(&family)? })
        }
        TopoCmd::Derive { space, set } => {
            let sp = load_space(space)?;
            let s = parse_set(set, &sp)?;
            json!({
                "set": s,
                "derivative": sp.rho(s),
                "co_derivative": sp.co_derivative(s),
                "closure": sp.closure(s),
                "interior": sp.interior(s),
            })
        }
        TopoCmd::FromFrame { model } => {
            let fr = load_model_file(model)?.to_frame()?;
            serde_json::to_value(TopologyFile::from_topology(&FiniteTopology::alexandroff(
                &fr,
            )))?
        }
    };
    out.emit(&v)
}

fn run_engine(e: &CorpusEntry, story: bool, b: &SearchBudget) -> Result<Verdict, CliError> {
    let f = &e.formula;
    Ok(match (story, e.mode) {
        (false, QueryMode::Sat) => sat_search(f, e.class, b)?,
        (false, QueryMode::Valid) => valid_at_bound(f, e.class, b)?,
        (true, mode) => {
            let cls = e
                .class
                .ok_or_else(|| input(format!("line {}: the story engine needs a class", e.line)))?;
            match mode {
                QueryMode::Sat => story_search(f, cls, b)?,
                QueryMode::Valid => story_valid(f, cls, b)?,
            }
        }
    })
}

fn corpus(path: &Path, engine: Engine, b: &SearchBudget, out: &mut Out) -> Result<u8, CliError> {
    let entries = parse_corpus(&read(path)?)?;
    let mut code = ANSWERED;
    for e in &entries {
        let primary = run_engine(e, engine == Engine::Story, b)?;
        let mut v = verdict_value(&primary, e.class, &e.formula)?;
        let mut ok = e.expected.matches(&primary);
        if engine == Engine::Both {
            let other = run_engine(e, true, b)?;
            let agree = other.found() == primary.found();
            v["story"] = verdict_value(&other, e.class, &e.formula)?;
            v["agree"] = json!(agree);
            ok &= agree;
        }
        v["line"] = json!(e.line);
        v["expect"] = json!(e.expected);
        v["matches"] = json!(ok);
        if !ok {
            code = MISMATCH;
        }
        out.emit(&v)?;
    }
    if entries.iter().any(|e| !e.expected.wants_model()) {
        eprintln!("note: bounded unsat/valid verdicts are not proofs");
    }
    Ok(code)
}
