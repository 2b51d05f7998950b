use crate::pddl::PddlError;
use crate::planner::{Interrupt, PlannerError, SearchStats};
use crate::strips::{ModelError, StripsError};

/// Failure of any engine operation above the PDDL layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("search stopped ({kind:?}) after {} generated nodes", stats.generated)]
    ResourceLimit { kind: Interrupt, stats: SearchStats },
    #[error("edit `{0}` is not a difference between the two models")]
    IllegalEdit(String),
    #[error("no set of model edits satisfies the explanation goal")]
    NoExplanation,
    #[error("foil is executable to the goal in the planner's model: {}", .0.join(", "))]
    FoilFeasibleInRobot(Vec<String>),
    #[error("foil has no valid completion in the planner's model")]
    FoilInfeasible,
    #[error("no foils to explain")]
    NoFoils,
    #[error("the planning problem itself has no plan")]
    BaseUnsolvable,
    #[error("the empty observation set already has no completion")]
    EmptySetConflict,
    #[error("foil has {len} observations, above the enumeration cap of {cap}")]
    FoilTooLarge { len: usize, cap: usize },
    #[error("the kept observations {0:?} have no valid completion")]
    InfeasibleSelection(Vec<usize>),
    #[error("observation index {0} is out of range")]
    InvalidIndex(usize),
}

impl EngineError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::Pddl(e) => e.code(),
            EngineError::Model(_) => "invalid_model",
            EngineError::UnknownAction(_) => "unknown_action",
            EngineError::ResourceLimit { .. } => "resource_limit",
            EngineError::IllegalEdit(_) => "illegal_edit",
            EngineError::NoExplanation => "no_explanation",
            EngineError::FoilFeasibleInRobot(_) => "foil_feasible_in_robot",
            EngineError::FoilInfeasible => "foil_infeasible",
            EngineError::NoFoils => "no_foils",
            EngineError::BaseUnsolvable => "base_unsolvable",
            EngineError::EmptySetConflict => "empty_set_conflict",
            EngineError::FoilTooLarge { .. } => "foil_too_large",
            EngineError::InfeasibleSelection(_) => "infeasible_selection",
            EngineError::InvalidIndex(_) => "invalid_index",
        }
    }
}

impl From<PlannerError> for EngineError {
    fn from(e: PlannerError) -> Self {
        match e {
            PlannerError::ResourceLimit { kind, stats } => EngineError::ResourceLimit { kind, stats },
        }
    }
}

impl From<StripsError> for EngineError {
    fn from(e: StripsError) -> Self {
        match e {
            StripsError::UnknownAction(a) => EngineError::UnknownAction(a),
        }
    }
}
