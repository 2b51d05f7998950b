//! The explanatory dialogue as a deterministic state machine.
//!
//! A [`DialogueSession`] holds both models, the current plan, the foils raised
//! so far and any pending user choice. Every [`Operation`] is logged together
//! with its JSON response, so a [`Transcript`] replayed against a fresh session
//! built from the same models reproduces the same bytes.
//!
//! Pending states:
//!
//! ```text
//! None --refine(conflicts)--> ConflictResolution --respond(remove)*--> None
//! None --refine(plausible)--> PlausibleChoice    --respond(choose)---> None
//! None --foil(suboptimal)---> SuboptimalDecision --respond(enforce)--> None
//! any  --cancel | foil------> None
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cost::Cost;
use crate::error::EngineError;
use crate::foil::{best_completion, closest_plan, foil_feasible, AnnotatedPlan, ClosestPlan, Foil, SuboptimalityReport};
use crate::model_space::{apply_edits, contrastive_search, diff, mce_search, EditSet};
use crate::planner::Planner;
use crate::strips::{Model, Plan};
use crate::subsets::{resolve_and_plan, FoilSubset, SubsetExplorer, VerdictMemo, DEFAULT_FOIL_CAP};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DialogueError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("the planner's model has no plan")]
    UnsolvableProblem,
    #[error("no foil has been submitted")]
    NoPendingFoil,
    #[error("the current foil needs no explanation")]
    NothingToExplain,
    #[error("explanation {0} does not exist")]
    UnknownExplanation(u64),
    #[error("explanation {0} is not the latest open explanation")]
    StaleVeto(u64),
    #[error("explanation {0} is not the latest open explanation")]
    StaleAccept(u64),
    #[error("vetoing would leave the planner's model without a plan")]
    UnsolvableAfterVeto,
    #[error("invalid choice: {0}")]
    InvalidChoice(String),
}

impl DialogueError {
    pub fn code(&self) -> &'static str {
        match self {
            DialogueError::Engine(e) => e.code(),
            DialogueError::UnsolvableProblem => "unsolvable_problem",
            DialogueError::NoPendingFoil => "no_pending_foil",
            DialogueError::NothingToExplain => "nothing_to_explain",
            DialogueError::UnknownExplanation(_) => "unknown_explanation",
            DialogueError::StaleVeto(_) => "stale_veto",
            DialogueError::StaleAccept(_) => "stale_accept",
            DialogueError::UnsolvableAfterVeto => "unsolvable_after_veto",
            DialogueError::InvalidChoice(_) => "invalid_choice",
        }
    }

    /// JSON form used in transcripts and service responses.
    pub fn to_json(&self) -> Value {
        serde_json::json!({ "error": { "code": self.code(), "message": self.to_string() } })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Closest,
    Conflicts,
    Plausible,
}

impl std::str::FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "closest" => Ok(Strategy::Closest),
            "conflicts" => Ok(Strategy::Conflicts),
            "plausible" => Ok(Strategy::Plausible),
            other => Err(format!("unknown strategy `{other}` (expected closest, conflicts or plausible)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum Answer {
    /// Drop this action from the presented conflict set.
    Remove { action: String },
    /// Pick a plausible set by its position in the presented list.
    Choose { set: usize },
    /// Adopt the suboptimal foil completion.
    Enforce,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Operation {
    GetPlan,
    SubmitFoil { actions: Vec<String> },
    Explain,
    Accept { explanation: u64 },
    Veto { explanation: u64 },
    Refine { strategy: Strategy },
    Respond { answer: Answer },
    Cancel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoilStatus {
    Infeasible,
    FeasibleOptimal,
    FeasibleSuboptimal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FoilOption {
    Explain,
    ClosestPlan,
    ConflictSets,
    PlausibleSets,
    Enforce,
    ExplainOptimality,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplanationKind {
    /// Refutes every infeasible foil raised so far.
    Contrastive,
    /// Shows why the current plan is optimal.
    Optimality,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Response {
    Plan {
        plan: Plan,
        differences: usize,
    },
    FoilVerdict {
        status: FoilStatus,
        options: Vec<FoilOption>,
        #[serde(skip_serializing_if = "Option::is_none")]
        report: Option<SuboptimalityReport>,
        #[serde(skip_serializing_if = "Option::is_none")]
        plan: Option<Plan>,
    },
    Explanation {
        id: u64,
        explanation: ExplanationKind,
        edits: Vec<String>,
        detail: EditSet,
    },
    Accepted {
        id: u64,
        differences: usize,
    },
    Vetoed {
        id: u64,
        plan: Plan,
        differences: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        foil_status: Option<FoilStatus>,
    },
    Closest {
        closest: ClosestPlan,
    },
    ConflictPrompt {
        conflict: FoilSubset,
        position: usize,
        total: usize,
    },
    PlausiblePrompt {
        sets: Vec<FoilSubset>,
    },
    Refined {
        plan: AnnotatedPlan,
    },
    Cancelled,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pending {
    None,
    ConflictResolution { sets: Vec<FoilSubset>, cursor: usize, removals: Vec<usize> },
    PlausibleChoice { sets: Vec<FoilSubset> },
    SuboptimalDecision { completion: AnnotatedPlan },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplanationState {
    Open,
    Accepted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoggedExplanation {
    pub id: u64,
    pub kind: ExplanationKind,
    pub edits: EditSet,
    pub state: ExplanationState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub operation: Operation,
    pub response: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct Transcript {
    /// Response to session creation.
    pub created: Value,
    pub entries: Vec<TranscriptEntry>,
}

#[derive(Clone, Debug)]
pub struct DialogueConfig {
    pub planner: Planner,
    pub foil_cap: usize,
}

impl Default for DialogueConfig {
    fn default() -> Self {
        DialogueConfig { planner: Planner::default(), foil_cap: DEFAULT_FOIL_CAP }
    }
}

#[derive(Clone, Debug)]
struct ActiveFoil {
    foil: Foil,
    status: FoilStatus,
    memo: Arc<VerdictMemo>,
}

#[derive(Debug)]
pub struct DialogueSession {
    config: DialogueConfig,
    robot: Model,
    human: Model,
    current_plan: Plan,
    /// Foils shown infeasible for the planner, all of which an explanation
    /// has to keep refuted.
    refuted: Vec<Foil>,
    foil_history: Vec<Foil>,
    active: Option<ActiveFoil>,
    pending: Pending,
    explanations: Vec<LoggedExplanation>,
    next_explanation: u64,
    transcript: Transcript,
}

fn to_json(response: &Response) -> Value {
    serde_json::to_value(response).expect("responses serialize")
}

impl DialogueSession {
    /// Opens a dialogue with the planner's optimal plan.
    pub fn new(robot: Model, human: Model, config: DialogueConfig) -> Result<(Self, Response), DialogueError> {
        let plan = config
            .planner
            .solve_optimal(&robot)
            .into_result()
            .map_err(EngineError::from)?
            .ok_or(DialogueError::UnsolvableProblem)?;
        let mut session = DialogueSession {
            config,
            robot,
            human,
            current_plan: plan,
            refuted: Vec::new(),
            foil_history: Vec::new(),
            active: None,
            pending: Pending::None,
            explanations: Vec::new(),
            next_explanation: 1,
            transcript: Transcript::default(),
        };
        let response = session.plan_response();
        session.transcript.created = to_json(&response);
        Ok((session, response))
    }

    pub fn robot(&self) -> &Model {
        &self.robot
    }

    pub fn human(&self) -> &Model {
        &self.human
    }

    pub fn current_plan(&self) -> &Plan {
        &self.current_plan
    }

    pub fn pending(&self) -> &Pending {
        &self.pending
    }

    pub fn foil_history(&self) -> &[Foil] {
        &self.foil_history
    }

    pub fn explanations(&self) -> &[LoggedExplanation] {
        &self.explanations
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn planner(&self) -> &Planner {
        &self.config.planner
    }

    /// Runs one operation and records it, failures included.
    pub fn apply(&mut self, operation: Operation) -> Result<Response, DialogueError> {
        let result = self.dispatch(&operation);
        let response = match &result {
            Ok(r) => to_json(r),
            Err(e) => e.to_json(),
        };
        self.transcript.entries.push(TranscriptEntry { operation, response });
        result
    }

    fn dispatch(&mut self, operation: &Operation) -> Result<Response, DialogueError> {
        match operation {
            Operation::GetPlan => Ok(self.plan_response()),
            Operation::SubmitFoil { actions } => self.submit_foil(Foil::new(actions.iter().cloned())),
            Operation::Explain => self.explain(),
            Operation::Accept { explanation } => self.accept(*explanation),
            Operation::Veto { explanation } => self.veto(*explanation),
            Operation::Refine { strategy } => self.refine(*strategy),
            Operation::Respond { answer } => self.respond(answer),
            Operation::Cancel => {
                self.config.planner.cancel_token().reset();
                self.pending = Pending::None;
                Ok(Response::Cancelled)
            }
        }
    }

    fn differences(&self) -> usize {
        diff(&self.human, &self.robot).len()
    }

    fn plan_response(&self) -> Response {
        Response::Plan { plan: self.current_plan.clone(), differences: self.differences() }
    }

    fn planner_ref(&self) -> &Planner {
        &self.config.planner
    }

    fn classify(&self, foil: &Foil) -> Result<(FoilStatus, Option<SuboptimalityReport>, Option<AnnotatedPlan>), EngineError> {
        let planner = self.planner_ref();
        let Some(completion) = best_completion(planner, &self.robot, foil)? else {
            return Ok((FoilStatus::Infeasible, None, None));
        };
        let optimal = planner.optimal_cost(&self.robot)?.ok_or(EngineError::BaseUnsolvable)?;
        let delta = completion.plan.cost - optimal;
        let report = SuboptimalityReport { cost_of_best_completion: completion.plan.cost, optimal_cost: optimal, delta };
        if delta == Cost::ZERO {
            Ok((FoilStatus::FeasibleOptimal, None, Some(completion)))
        } else {
            Ok((FoilStatus::FeasibleSuboptimal, Some(report), Some(completion)))
        }
    }

    fn submit_foil(&mut self, foil: Foil) -> Result<Response, DialogueError> {
        foil.check_against(&self.robot)?;
        if foil.len() > self.config.foil_cap {
            return Err(EngineError::FoilTooLarge { len: foil.len(), cap: self.config.foil_cap }.into());
        }
        self.pending = Pending::None;
        self.active = None;
        let (status, report, completion) = self.classify(&foil)?;
        self.foil_history.push(foil.clone());
        let mut plan = None;
        let options = match status {
            FoilStatus::Infeasible => {
                if !self.refuted.contains(&foil) {
                    self.refuted.push(foil.clone());
                }
                vec![FoilOption::Explain, FoilOption::ClosestPlan, FoilOption::ConflictSets, FoilOption::PlausibleSets]
            }
            FoilStatus::FeasibleOptimal => {
                let completion = completion.expect("feasible foils have a completion");
                self.current_plan = completion.plan.clone();
                plan = Some(completion.plan);
                Vec::new()
            }
            FoilStatus::FeasibleSuboptimal => {
                let completion = completion.expect("feasible foils have a completion");
                plan = Some(completion.plan.clone());
                self.pending = Pending::SuboptimalDecision { completion };
                vec![FoilOption::Enforce, FoilOption::ExplainOptimality]
            }
        };
        self.active = Some(ActiveFoil { foil, status, memo: Arc::new(VerdictMemo::new()) });
        Ok(Response::FoilVerdict { status, options, report, plan })
    }

    fn explain(&mut self) -> Result<Response, DialogueError> {
        let active = self.active.as_ref().ok_or(DialogueError::NoPendingFoil)?;
        let planner = self.planner_ref();
        let (kind, edits) = match active.status {
            FoilStatus::Infeasible => {
                (ExplanationKind::Contrastive, contrastive_search(planner, &self.robot, &self.human, &self.refuted)?)
            }
            FoilStatus::FeasibleSuboptimal => {
                (ExplanationKind::Optimality, mce_search(planner, &self.robot, &self.human, &self.current_plan)?)
            }
            FoilStatus::FeasibleOptimal => return Err(DialogueError::NothingToExplain),
        };
        let id = self.next_explanation;
        self.next_explanation += 1;
        self.explanations.push(LoggedExplanation { id, kind, edits: edits.clone(), state: ExplanationState::Open });
        Ok(Response::Explanation { id, explanation: kind, edits: edits.render(), detail: edits })
    }

    /// Index of explanation `id` if it is the latest one and still open.
    fn latest_open(&self, id: u64) -> Result<Option<usize>, DialogueError> {
        let pos = self.explanations.iter().position(|e| e.id == id).ok_or(DialogueError::UnknownExplanation(id))?;
        let is_latest = pos + 1 == self.explanations.len();
        Ok((is_latest && self.explanations[pos].state == ExplanationState::Open).then_some(pos))
    }

    fn accept(&mut self, id: u64) -> Result<Response, DialogueError> {
        let pos = self.latest_open(id)?.ok_or(DialogueError::StaleAccept(id))?;
        self.human = apply_edits(&self.human, &self.robot, &self.explanations[pos].edits)?;
        self.explanations[pos].state = ExplanationState::Accepted;
        Ok(Response::Accepted { id, differences: self.differences() })
    }

    fn veto(&mut self, id: u64) -> Result<Response, DialogueError> {
        let pos = self.latest_open(id)?.ok_or(DialogueError::StaleVeto(id))?;
        let inverse = self.explanations[pos].edits.inverse();
        let robot = apply_edits(&self.robot, &self.human, &inverse)?;
        let planner = self.planner_ref();
        let plan = planner
            .solve_optimal(&robot)
            .into_result()
            .map_err(EngineError::from)?
            .ok_or(DialogueError::UnsolvableAfterVeto)?;
        // Foils the updated planner model now admits are no longer refuted.
        let mut refuted = Vec::new();
        for foil in &self.refuted {
            if !foil_feasible(planner, &robot, foil)? {
                refuted.push(foil.clone());
            }
        }
        self.robot = robot;
        self.current_plan = plan.clone();
        self.refuted = refuted;
        self.explanations.remove(pos);
        self.pending = Pending::None;
        let mut foil_status = None;
        if let Some(active) = self.active.take() {
            let (status, _, _) = self.classify(&active.foil)?;
            foil_status = Some(status);
            self.active = Some(ActiveFoil { foil: active.foil, status, memo: Arc::new(VerdictMemo::new()) });
        }
        Ok(Response::Vetoed { id, plan, differences: self.differences(), foil_status })
    }

    fn refine(&mut self, strategy: Strategy) -> Result<Response, DialogueError> {
        let active = self.active.clone().ok_or(DialogueError::NoPendingFoil)?;
        let planner = self.planner_ref();
        match strategy {
            Strategy::Closest => {
                let closest = closest_plan(planner, &self.robot, &active.foil)?;
                self.current_plan = closest.plan.clone();
                self.pending = Pending::None;
                Ok(Response::Closest { closest })
            }
            Strategy::Conflicts => {
                let explorer = SubsetExplorer::with_cap(planner, &self.robot, &active.foil, &active.memo, self.config.foil_cap)?;
                let sets = explorer.conflict_sets()?;
                self.pending = Pending::ConflictResolution { sets, cursor: 0, removals: Vec::new() };
                self.advance_conflicts()
            }
            Strategy::Plausible => {
                let explorer = SubsetExplorer::with_cap(planner, &self.robot, &active.foil, &active.memo, self.config.foil_cap)?;
                let sets = explorer.plausible_sets()?;
                self.pending = Pending::PlausibleChoice { sets: sets.clone() };
                Ok(Response::PlausiblePrompt { sets })
            }
        }
    }

    /// Skips conflicts already broken by earlier removals, then prompts for
    /// the next one or plans once none remain.
    fn advance_conflicts(&mut self) -> Result<Response, DialogueError> {
        let Pending::ConflictResolution { sets, cursor, removals } = &mut self.pending else {
            unreachable!("called only while resolving conflicts");
        };
        while *cursor < sets.len() && sets[*cursor].indices.iter().any(|i| removals.contains(i)) {
            *cursor += 1;
        }
        if *cursor < sets.len() {
            return Ok(Response::ConflictPrompt { conflict: sets[*cursor].clone(), position: *cursor, total: sets.len() });
        }
        let removals = removals.clone();
        let foil = &self.active.as_ref().expect("conflicts need an active foil").foil;
        let kept: Vec<usize> = (0..foil.len()).filter(|i| !removals.contains(i)).collect();
        let plan = resolve_and_plan(self.planner_ref(), &self.robot, foil, &kept)?;
        self.current_plan = plan.plan.clone();
        self.pending = Pending::None;
        Ok(Response::Refined { plan })
    }

    fn respond(&mut self, answer: &Answer) -> Result<Response, DialogueError> {
        match (&mut self.pending, answer) {
            (Pending::None, _) => Err(DialogueError::InvalidChoice("nothing is awaiting an answer".into())),
            (Pending::ConflictResolution { sets, cursor, removals }, Answer::Remove { action }) => {
                let set = &sets[*cursor];
                let Some(k) = set.actions.iter().position(|a| a == action) else {
                    return Err(DialogueError::InvalidChoice(format!("`{action}` is not in the presented conflict set")));
                };
                removals.push(set.indices[k]);
                *cursor += 1;
                self.advance_conflicts()
            }
            (Pending::PlausibleChoice { sets }, Answer::Choose { set }) => {
                let chosen = sets
                    .get(*set)
                    .ok_or_else(|| DialogueError::InvalidChoice(format!("no plausible set at position {set}")))?
                    .indices
                    .clone();
                let foil = &self.active.as_ref().expect("plausible sets need an active foil").foil;
                let plan = resolve_and_plan(self.planner_ref(), &self.robot, foil, &chosen)?;
                self.current_plan = plan.plan.clone();
                self.pending = Pending::None;
                Ok(Response::Refined { plan })
            }
            (Pending::SuboptimalDecision { completion }, Answer::Enforce) => {
                let plan = completion.clone();
                self.current_plan = plan.plan.clone();
                self.pending = Pending::None;
                Ok(Response::Refined { plan })
            }
            (_, answer) => Err(DialogueError::InvalidChoice(format!("answer {answer:?} does not fit the pending prompt"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplayMismatch {
    /// 0 for session creation, otherwise the 1-based entry number.
    pub step: usize,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplayReport {
    pub steps: usize,
    pub mismatches: Vec<ReplayMismatch>,
}

impl ReplayReport {
    pub fn is_identical(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Feeds `transcript` through a fresh session and compares serialized
/// responses byte for byte.
pub fn replay(robot: Model, human: Model, config: DialogueConfig, transcript: &Transcript) -> ReplayReport {
    let mut mismatches = Vec::new();
    let mut check = |step: usize, expected: &Value, actual: &Value| {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        if expected != actual {
            mismatches.push(ReplayMismatch { step, expected, actual });
        }
    };
    let mut session = match DialogueSession::new(robot, human, config) {
        Ok((session, created)) => {
            check(0, &transcript.created, &to_json(&created));
            session
        }
        Err(e) => {
            check(0, &transcript.created, &e.to_json());
            return ReplayReport { steps: 1, mismatches };
        }
    };
    for (i, entry) in transcript.entries.iter().enumerate() {
        let actual = match session.apply(entry.operation.clone()) {
            Ok(r) => to_json(&r),
            Err(e) => e.to_json(),
        };
        check(i + 1, &entry.response, &actual);
    }
    ReplayReport { steps: transcript.entries.len() + 1, mismatches }
}
