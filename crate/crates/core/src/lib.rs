//! Foil-driven explanation and plan refinement over grounded STRIPS models.
//!
//! The crate plans optimally, checks user foils against the planner's model,
//! explains infeasible foils with minimal model edits, and refines plans via
//! closest plans, conflict sets and plausible sets. [`dialogue`] ties these
//! together into a replayable session.

pub mod cost;
pub mod dialogue;
pub mod error;
pub mod fixtures;
pub mod fluent_set;
pub mod foil;
pub mod model_space;
pub mod pddl;
pub mod planner;
pub mod strips;
pub mod subsets;

pub use cost::{Cost, CostError};
pub use dialogue::{
    replay, Answer, DialogueConfig, DialogueError, DialogueSession, FoilStatus, Operation, Response, Strategy, Transcript,
};
pub use error::EngineError;
pub use fluent_set::{FluentId, FluentSet};
pub use foil::{
    best_completion, closest_plan, compile, foil_feasible, suboptimality_report, AnnotatedPlan, ClosestPlan, CompileMode,
    Foil, Provenance, SuboptimalityReport, TransformedProblem,
};
pub use model_space::{
    apply_edits, contrastive_search, diff, gamma, mce_search, Direction, Edit, EditSet, ModelParameter, ParameterKind,
};
pub use pddl::{load_manifest, parse_domain_problem, serialize_model, PddlError};
pub use planner::{CancelToken, Planner, SearchLimits, SearchOutcome, SearchResult};
pub use strips::{ActionSpec, Execution, GroundAction, Model, ModelSpec, ModelTag, Plan, State, Validation};
pub use subsets::{conflict_sets, plausible_sets, resolve_and_plan, FoilSubset, SubsetExplorer, SubsetStatus, VerdictMemo};
