//! Propositional configuration checks and CTL model checking.

pub mod ctl;
pub mod formula;
pub mod parse;
pub mod prop;

use thiserror::Error;

pub use ctl::{check_ctl, is_model_path, sat_set, unknown_atoms, StateSet};
pub use formula::{CtlFormula, PropFormula};
pub use parse::{parse_ctl, parse_prop, FormulaParseError};
pub use prop::{check_config, eval_prop};

use crate::kripke::StateId;
use crate::weaver::ConcernValuation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("formula mentions `{0}`, which the valuation does not define")]
    UnknownAtom(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    None,
    Assignment(ConcernValuation),
    /// Starts at an initial state; consecutive states are transitions.
    FinitePath(Vec<StateId>),
    /// `prefix ++ cycle` is a path from an initial state and the last cycle
    /// state steps back to the first.
    Lasso {
        prefix: Vec<StateId>,
        cycle: Vec<StateId>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatResult {
    pub holds: bool,
    pub evidence: Evidence,
}
