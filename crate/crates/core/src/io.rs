//! JSON file formats for models, spaces and stories, the regression corpus
//! line format, and verdict records.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{parse, Formula, FormulaError};
use crate::frames::{DynamicFrame, FrameClass, FrameError};
use crate::search::Verdict;
use crate::semantics::{Model, ModelError};
use crate::set::PointSet;
use crate::spaces::{Derivative, DerivativeSpace, FiniteTopology, SpaceError, TABLE_CAP};
use crate::transforms::{Moment, Story, TransformError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Shape(String),
    #[error("model does not satisfy its declared class {0}")]
    ClassMismatch(FrameClass),
    #[error("corpus line {line}: {message}")]
    Corpus { line: usize, message: String },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

fn shape(msg: impl Into<String>) -> IoError {
    IoError::Shape(msg.into())
}

/// The shared model file. A frame model gives `worlds` and `rel`; a model
/// over a finite topology gives `points` with `opens` or `nbhd`; a model
/// over an explicit derivative gives `points` with `table`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worlds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opens: Option<Vec<PointSet>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nbhd: Option<Vec<PointSet>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<PointSet>>,
    #[serde(default)]
    pub func: Option<Vec<usize>>,
    #[serde(default)]
    pub val: BTreeMap<String, PointSet>,
    #[serde(default)]
    pub class: Option<FrameClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

/// The strict topology file: `points` with exactly one of `opens`, `nbhd`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyFile {
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opens: Option<Vec<PointSet>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nbhd: Option<Vec<PointSet>>,
}

impl TopologyFile {
    pub fn to_topology(&self) -> Result<FiniteTopology, IoError> {
        match (&self.opens, &self.nbhd) {
            (Some(opens), None) => Ok(FiniteTopology::from_opens(self.points, opens)?),
            (None, Some(nbhd)) => {
                if nbhd.len() != self.points {
                    return Err(shape(format!(
                        "`nbhd` has {} entries for {} points",
                        nbhd.len(),
                        self.points
                    )));
                }
                Ok(FiniteTopology::from_neighbourhoods(nbhd.clone())?)
            }
            _ => Err(shape("a topology needs exactly one of `opens` and `nbhd`")),
        }
    }

    pub fn from_topology(t: &FiniteTopology) -> Self {
        TopologyFile {
            points: t.size(),
            opens: None,
            nbhd: Some(t.neighbourhoods().to_vec()),
        }
    }
}

pub fn parse_topology(text: &str) -> Result<FiniteTopology, IoError> {
    serde_json::from_str::<TopologyFile>(text)?.to_topology()
}

impl ModelFile {
    fn kind(&self) -> Result<SpaceKind, IoError> {
        let frame = self.worlds.is_some() || self.rel.is_some();
        let topo = self.opens.is_some() || self.nbhd.is_some();
        let table = self.table.is_some();
        match (frame, topo, table) {
            (true, false, false) if self.points.is_none() => Ok(SpaceKind::Frame),
            (false, true, false) if self.points.is_some() => Ok(SpaceKind::Topology),
            (false, false, true) if self.points.is_some() => Ok(SpaceKind::Table),
            _ => Err(shape(
                "give `worlds` and `rel`, or `points` with exactly one of `opens`, `nbhd` or `table`",
            )),
        }
    }

    /// The frame, with its function when present.
    pub fn to_frame(&self) -> Result<DynamicFrame, IoError> {
        if self.kind()? != SpaceKind::Frame {
            return Err(shape("expected a frame (`worlds` and `rel`)"));
        }
        let worlds = self.worlds.ok_or_else(|| shape("missing `worlds`"))?;
        let rel = self.rel.clone().unwrap_or_default();
        Ok(DynamicFrame::new(worlds, rel, self.func.clone())?)
    }

    pub fn to_space(&self) -> Result<DerivativeSpace, IoError> {
        match self.kind()? {
            SpaceKind::Frame => Ok(DerivativeSpace::from_frame(&self.to_frame()?)),
            SpaceKind::Topology => {
                let t = TopologyFile {
                    points: self.points.unwrap_or(0),
                    opens: self.opens.clone(),
                    nbhd: self.nbhd.clone(),
                };
                Ok(DerivativeSpace::from_topology(t.to_topology()?))
            }
            SpaceKind::Table => Ok(DerivativeSpace::from_table(
                self.points.unwrap_or(0),
                self.table.clone().unwrap_or_default(),
            )?),
        }
    }

    /// The model; a declared class is checked for frame models.
    pub fn to_model(&self) -> Result<Model, IoError> {
        let space = self.to_space()?;
        let func = self
            .func
            .clone()
            .ok_or_else(|| shape("a model needs `func`"))?;
        let model = Model::new(space, func, self.val.clone())?;
        if let Some(cls) = self.class {
            let fr = model
                .frame()
                .ok_or_else(|| shape("`class` applies to frame models only"))?;
            if !fr.in_class(cls)? {
                return Err(IoError::ClassMismatch(cls));
            }
        }
        Ok(model)
    }

    pub fn from_frame(fr: &DynamicFrame) -> Self {
        ModelFile {
            worlds: Some(fr.size()),
            rel: Some(fr.pairs().collect()),
            func: fr.func().map(<[usize]>::to_vec),
            ..ModelFile::default()
        }
    }

    /// Frames and topologies keep their form; any other derivative is
    /// written as a table, which needs at most [`TABLE_CAP`] points.
    pub fn from_model(m: &Model) -> Result<Self, IoError> {
        let mut out = match m.space().derivative() {
            Derivative::Frame(fr) => ModelFile::from_frame(fr),
            Derivative::Topology(t) => ModelFile {
                points: Some(t.size()),
                nbhd: Some(t.neighbourhoods().to_vec()),
                ..ModelFile::default()
            },
            _ => {
                let n = m.size();
                if n > TABLE_CAP {
                    return Err(shape(format!(
                        "a {n}-point mixed sum cannot be written as a table"
                    )));
                }
                let table = PointSet::all_subsets(n).map(|a| m.space().rho(a)).collect();
                ModelFile {
                    points: Some(n),
                    table: Some(table),
                    ..ModelFile::default()
                }
            }
        };
        out.func = Some(m.func().to_vec());
        out.val = m.valuation().clone();
        Ok(out)
    }

    pub fn with_class(mut self, class: Option<FrameClass>) -> Self {
        self.class = class;
        self
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = Some(provenance.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SpaceKind {
    Frame,
    Topology,
    Table,
}

pub fn parse_model_file(text: &str) -> Result<ModelFile, IoError> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_model(text: &str) -> Result<Model, IoError> {
    parse_model_file(text)?.to_model()
}

/// One layer of a story file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerFile {
    pub worlds: usize,
    #[serde(default)]
    pub rel: Vec<(usize, usize)>,
    #[serde(default)]
    pub root: usize,
    #[serde(default)]
    pub val: BTreeMap<String, PointSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoryFile {
    pub class: FrameClass,
    pub layers: Vec<LayerFile>,
    #[serde(default)]
    pub maps: Vec<Vec<usize>>,
}

impl StoryFile {
    pub fn to_story(&self) -> Result<Story, IoError> {
        let moments = self
            .layers
            .iter()
            .map(|l| {
                let fr = DynamicFrame::new(l.worlds, l.rel.iter().copied(), None)?;
                Ok(Moment::new(&fr, l.root, l.val.clone(), self.class)?)
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(Story {
            class: self.class,
            moments,
            maps: self.maps.clone(),
        })
    }

    pub fn from_story(s: &Story) -> Self {
        let layers = s
            .moments
            .iter()
            .map(|m| LayerFile {
                worlds: m.size(),
                rel: m.frame().pairs().collect(),
                root: m.root(),
                val: m.valuation().clone(),
            })
            .collect();
        StoryFile {
            class: s.class,
            layers,
            maps: s.maps.clone(),
        }
    }
}

pub fn parse_story(text: &str) -> Result<Story, IoError> {
    serde_json::from_str::<StoryFile>(text)?.to_story()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryMode {
    Sat,
    Valid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Sat,
    Unsat,
    Valid,
    Counter,
}

impl Expectation {
    /// Whether the expectation asks for a witness or countermodel.
    pub fn wants_model(self) -> bool {
        matches!(self, Expectation::Sat | Expectation::Counter)
    }

    pub fn matches(self, v: &Verdict) -> bool {
        matches!(
            (self, v),
            (Expectation::Sat, Verdict::Satisfiable { .. })
                | (Expectation::Unsat, Verdict::UnsatUpToBound(_))
                | (Expectation::Valid, Verdict::ValidUpToBound(_))
                | (Expectation::Counter, Verdict::CounterModel { .. })
        )
    }
}

impl FromStr for Expectation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sat" => Ok(Expectation::Sat),
            "unsat" => Ok(Expectation::Unsat),
            "valid" => Ok(Expectation::Valid),
            "counter" => Ok(Expectation::Counter),
            _ => Err(format!(
                "expected one of sat, unsat, valid, counter; got `{s}`"
            )),
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::Sat => "sat",
            Expectation::Unsat => "unsat",
            Expectation::Valid => "valid",
            Expectation::Counter => "counter",
        })
    }
}

/// A class name, or `any` for no class filtering.
pub fn parse_class_filter(s: &str) -> Result<Option<FrameClass>, String> {
    if s.eq_ignore_ascii_case("any") {
        return Ok(None);
    }
    s.parse::<FrameClass>().map(Some).map_err(|e| e.to_string())
}

/// `CLASS<TAB>sat|valid<TAB>formula<TAB>expected`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub line: usize,
    pub class: Option<FrameClass>,
    pub mode: QueryMode,
    pub formula: Formula,
    pub expected: Expectation,
}

/// Parses one corpus line; blank lines and `#` comments give `None`.
pub fn parse_corpus_line(line_no: usize, text: &str) -> Result<Option<CorpusEntry>, IoError> {
    let text = text.trim_end_matches(['\r', '\n']);
    if text.trim().is_empty() || text.trim_start().starts_with('#') {
        return Ok(None);
    }
    let err = |message: String| IoError::Corpus {
        line: line_no,
        message,
    };
    let fields: Vec<&str> = text.split('\t').collect();
    let [class, mode, formula, expected] = fields[..] else {
        return Err(err(format!(
            "expected 4 tab-separated fields, found {}",
            fields.len()
        )));
    };
    let class = parse_class_filter(class.trim()).map_err(err)?;
    let mode = match mode.trim() {
        "sat" => QueryMode::Sat,
        "valid" => QueryMode::Valid,
        other => return Err(err(format!("mode must be `sat` or `valid`, got `{other}`"))),
    };
    let formula = parse(formula).map_err(|e| err(e.to_string()))?;
    let expected: Expectation = expected.trim().parse().map_err(err)?;
    let consistent = match mode {
        QueryMode::Sat => matches!(expected, Expectation::Sat | Expectation::Unsat),
        QueryMode::Valid => matches!(expected, Expectation::Valid | Expectation::Counter),
    };
    if !consistent {
        return Err(err(format!(
            "expectation `{expected}` does not fit the query mode"
        )));
    }
    Ok(Some(CorpusEntry {
        line: line_no,
        class,
        mode,
        formula,
        expected,
    }))
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, IoError> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| parse_corpus_line(i + 1, l).transpose())
        .collect()
}

/// A verdict as a JSON record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<crate::search::BudgetEcho>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

impl VerdictRecord {
    pub fn new(v: &Verdict, class: Option<FrameClass>) -> Result<Self, IoError> {
        let (model, point) = match v.model() {
            Some((m, p)) => (Some(ModelFile::from_model(m)?.with_class(class)), Some(p)),
            None => (None, None),
        };
        let (budget, caveat) = match v {
            Verdict::UnsatUpToBound(b) => (
                Some(b.clone()),
                Some("no model within the bound; not a proof of unsatisfiability".to_string()),
            ),
            Verdict::ValidUpToBound(b) => (
                Some(b.clone()),
                Some("no countermodel within the bound; not a proof of validity".to_string()),
            ),
            _ => (None, None),
        };
        Ok(VerdictRecord {
            verdict: v.name().to_string(),
            model,
            point,
            budget,
            caveat,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_round_trip() {
        let text =
            r#"{"worlds": 2, "rel": [[0,1]], "func": [1,1], "val": {"p": [1]}, "class": "GLC"}"#;
        let m = parse_model(text).unwrap();
        assert_eq!(m.value("p"), PointSet::singleton(1));
        let back = ModelFile::from_model(&m)
            .unwrap()
            .with_class(Some(FrameClass::GLC));
        let again = parse_model(&serde_json::to_string(&back).unwrap()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn model_rejections() {
        assert!(matches!(
            parse_model(r#"{"worlds": 1, "rel": [], "func": [0], "extra": 1}"#),
            Err(IoError::Json(_))
        ));
        assert!(matches!(
            parse_model(r#"{"worlds": 1, "rel": [[0,0]], "func": [0], "class": "GLC"}"#),
            Err(IoError::ClassMismatch(_))
        ));
        assert!(matches!(
            parse_model(r#"{"worlds": 1, "rel": [], "func": null}"#),
            Err(IoError::Shape(_))
        ));
        assert!(matches!(
            parse_model(r#"{"worlds": 1, "rel": [[0,3]], "func": [0]}"#),
            Err(IoError::Frame(_))
        ));
        assert!(matches!(
            parse_model(r#"{"worlds": 1, "points": 1, "rel": [], "func": [0]}"#),
            Err(IoError::Shape(_))
        ));
        assert!(
            parse_model(r#"{"worlds": 1, "rel": [], "func": [0], "provenance": "oplus"}"#).is_ok()
        );
    }

    #[test]
    fn topology_files() {
        let t = parse_topology(r#"{"points": 2, "opens": [[], [1], [0,1]]}"#).unwrap();
        assert_eq!(
            t.neighbourhoods(),
            &[PointSet::full(2), PointSet::singleton(1)]
        );
        let same =
            parse_topology(&serde_json::to_string(&TopologyFile::from_topology(&t)).unwrap())
                .unwrap();
        assert_eq!(same, t);
        assert!(parse_topology(r#"{"points": 2}"#).is_err());
        assert!(parse_topology(r#"{"points": 2, "opens": [[0]]}"#).is_err());
        let m = parse_model(r#"{"points": 2, "nbhd": [[0,1],[1]], "func": [0,1]}"#).unwrap();
        assert!(m.space().as_topology().is_some());
    }

    #[test]
    fn story_files() {
        let text = r#"{"class": "GLC", "layers": [{"worlds": 1}, {"worlds": 2, "rel": [[0,1]], "val": {"p": [1]}}], "maps": [[0]]}"#;
        let s = parse_story(text).unwrap();
        assert_eq!(s.duration(), 1);
        assert_eq!(StoryFile::from_story(&s).to_story().unwrap(), s);
        let bad = r#"{"class": "GLC", "layers": [{"worlds": 1, "rel": [[0,0]]}]}"#;
        assert!(matches!(parse_story(bad), Err(IoError::Transform(_))));
    }

    #[test]
    fn corpus_lines() {
        let e = parse_corpus_line(3, "K4C\tvalid\t[]p -> [][]p\tvalid")
            .unwrap()
            .unwrap();
        assert_eq!(
            (e.line, e.class, e.mode, e.expected),
            (
                3,
                Some(FrameClass::K4C),
                QueryMode::Valid,
                Expectation::Valid
            )
        );
        assert_eq!(parse_corpus_line(1, "# comment").unwrap(), None);
        assert_eq!(parse_corpus_line(1, "   ").unwrap(), None);
        assert_eq!(
            parse_corpus_line(1, "any\tsat\tp\tsat")
                .unwrap()
                .unwrap()
                .class,
            None
        );
        assert!(parse_corpus_line(1, "K4C\tsat\tp").is_err());
        assert!(parse_corpus_line(1, "K4C\tsat\tp\tvalid").is_err());
        assert!(parse_corpus_line(1, "K5\tsat\tp\tsat").is_err());
        assert!(parse_corpus_line(1, "K4C\tsat\tp &\tsat").is_err());
    }
}
