//! Dynamic derivative logics over finite frames and finite spaces.

pub mod formula;
pub mod frames;
pub mod io;
pub mod search;
pub mod semantics;
pub mod set;
pub mod spaces;
pub mod transforms;

pub use formula::{Formula, FormulaError};
pub use frames::{DynamicFrame, FrameClass, FrameError, StaticLogic};
pub use semantics::{
    check_scheme_validity, logic_axioms, AxiomScheme, Model, SchemeName, ValidityMode,
};
pub use set::PointSet;
pub use spaces::{DerivativeSpace, FiniteTopology, SpaceError, Sweep};
