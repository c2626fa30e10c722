//! `derivelog`: command-line workbench for dynamic derivative logics.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use derivelog::io::{parse_class_filter, Expectation};
use derivelog::search::ValuationMode;
use derivelog::FrameClass;

/// Formulas, models, spaces and bounded model search for wK4C, K4C, GLC,
/// wK4H, K4H and GLH.
///
/// Exit codes: 0 answered, 1 result differs from the expectation, 2 input
/// error, 3 budget exceeded.
#[derive(Debug, Parser)]
#[command(name = "derivelog", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Indented JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Write the output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// `key = value` defaults; `./derivelog.toml` is read when present.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassFilter(pub Option<FrameClass>);

impl FromStr for ClassFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_class_filter(s).map(ClassFilter)
    }
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    #[arg(long)]
    pub max_worlds: Option<usize>,
    /// Cluster out-branching of story moments.
    #[arg(long)]
    pub branching: Option<usize>,
    /// `exhaustive` or `sampled:K`.
    #[arg(long)]
    pub valuations: Option<ValuationMode>,
    #[arg(long, value_name = "SECONDS")]
    pub time_limit: Option<f64>,
    /// Examine every frame, not just those with sorted world signatures.
    #[arg(long)]
    pub no_iso_pruning: bool,
}

#[derive(Debug, Clone, Args)]
pub struct Query {
    /// A frame class, or `any`.
    #[arg(long)]
    pub class: ClassFilter,
    #[arg(long)]
    pub formula: String,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub expect: Option<Expectation>,
}

#[derive(Debug, Clone, Args)]
pub struct StoryQuery {
    #[arg(long)]
    pub class: FrameClass,
    #[arg(long)]
    pub formula: String,
    /// Story duration; at least the next depth of the formula.
    #[arg(long)]
    pub duration: Option<usize>,
    /// Ask for validity instead of satisfiability.
    #[arg(long)]
    pub valid: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long)]
    pub expect: Option<Expectation>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelOut {
    /// Also write the constructed model file here.
    #[arg(long, value_name = "PATH")]
    pub model_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a formula and report its measures.
    Parse {
        #[arg(long)]
        formula: String,
    },
    /// Next-normal form: every next applied directly to a variable.
    Nnf {
        #[arg(long)]
        formula: String,
    },
    /// Truth set of a formula on a model, or truth at one point.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        point: Option<usize>,
    },
    /// Frame, space and function properties; axiom checks with `--class`.
    Props {
        #[arg(long, required_unless_present = "space", conflicts_with = "space")]
        model: Option<PathBuf>,
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long)]
        class: Option<FrameClass>,
    },
    /// Bounded search for a satisfying model.
    Sat(Query),
    /// Bounded search for a countermodel.
    Valid(Query),
    /// Bounded search over story-shaped models only.
    StorySat(StoryQuery),
    /// Model constructions with their p-morphism certificates.
    Transform {
        #[command(subcommand)]
        op: TransformCmd,
    },
    /// Derivative-space operations.
    Topo {
        #[command(subcommand)]
        op: TopoCmd,
    },
    /// Check every axiom of a class on seeded random models.
    Fuzz {
        #[arg(long)]
        class: FrameClass,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 4)]
        max_worlds: usize,
        /// Harness self-test: leave the function unrepaired.
        #[arg(long, hide = true)]
        broken_repair: bool,
    },
    /// Run a regression corpus, one JSON verdict per line.
    Corpus {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Search)]
        engine: Engine,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    /// Frame enumeration.
    Search,
    /// Story-shaped models.
    Story,
    /// Both, reporting agreement.
    Both,
}

#[derive(Debug, Subcommand)]
pub enum TransformCmd {
    /// Split reflexive worlds into irreflexive 2-clusters.
    Oplus {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        out: ModelOut,
    },
    /// Unwind into chains.
    Unwind {
        #[arg(long)]
        model: PathBuf,
        /// Longest chain; defaults to the world count.
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        out: ModelOut,
    },
    /// Cyclic power system of a space.
    Power {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        copies: usize,
        /// `{"p": {"0": [..], "1": [..]}}`: values of `X^i p`.
        #[arg(long, value_name = "JSON")]
        ext_val: Option<String>,
        #[command(flatten)]
        out: ModelOut,
    },
    /// Disjoint sum of two models.
    Sum {
        /// Give twice.
        #[arg(long, required = true)]
        model: Vec<PathBuf>,
        #[command(flatten)]
        out: ModelOut,
    },
}

#[derive(Debug, Subcommand)]
pub enum TopoCmd {
    /// Scatteredness and the perfect kernel.
    Scattered {
        #[arg(long)]
        space: PathBuf,
    },
    /// T_D check of a topology, or of a frame's Aleksandroff topology.
    Td {
        #[arg(long)]
        space: PathBuf,
    },
    /// Tangled derivative of a family of sets.
    Tangle {
        #[arg(long)]
        space: PathBuf,
        /// JSON list of point lists.
        #[arg(long, value_name = "JSON")]
        sets: String,
    },
    /// Derivative, co-derivative, closure and interior of a set.
    Derive {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_name = "JSON")]
        set: String,
    },
    /// Aleksandroff topology of a frame.
    FromFrame {
        #[arg(long)]
        model: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("derivelog: {e}");
            ExitCode::from(e.code())
        }
    }
}
