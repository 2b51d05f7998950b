//! Grounded propositional STRIPS: models, states, execution and validation.
//!
//! A [`Model`] is immutable once built. Fluents and actions are kept in
//! lexicographic name order, so two models built from the same vocabulary
//! assign identical [`FluentId`]s and action indices. That canonical order is
//! also what the planner's deterministic tie-breaking relies on.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::fluent_set::{FluentId, FluentSet};

/// Which side of the reconciliation pair a model represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    #[default]
    Robot,
    Human,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("{context} references unknown fluent `{fluent}`")]
    UnknownFluent { context: String, fluent: String },
    #[error("action `{action}` both adds and deletes `{fluent}`")]
    OverlappingEffects { action: String, fluent: String },
    #[error("invalid symbol `{0}`")]
    InvalidName(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StripsError {
    #[error("unknown action `{0}`")]
    UnknownAction(String),
}

/// Name-level description of one ground action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ActionSpec {
    pub cost: Cost,
    #[serde(default)]
    pub pre: BTreeSet<String>,
    #[serde(default)]
    pub add: BTreeSet<String>,
    #[serde(default)]
    pub del: BTreeSet<String>,
}

/// Name-level, freely editable form of a [`Model`].
///
/// Model edits, vocabulary alignment and serialization all go through this
/// form; [`Model::from_spec`] re-validates every invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ModelSpec {
    pub domain_name: String,
    pub problem_name: String,
    #[serde(default)]
    pub tag: ModelTag,
    pub fluents: BTreeSet<String>,
    pub actions: BTreeMap<String, ActionSpec>,
    pub init: BTreeSet<String>,
    pub goal: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub name: String,
    pub cost: Cost,
    pub pre: FluentSet,
    pub add: FluentSet,
    pub del: FluentSet,
}

impl GroundAction {
    pub fn applicable(&self, state: &FluentSet) -> bool {
        self.pre.is_subset(state)
    }

    /// `(state ∪ add) \ del`, without checking the precondition.
    pub fn successor(&self, state: &FluentSet) -> FluentSet {
        let mut next = state.clone();
        next.union_with(&self.add);
        next.difference_with(&self.del);
        next
    }
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(into = "ModelSpec", try_from = "ModelSpec")]
pub struct Model {
    domain_name: String,
    problem_name: String,
    tag: ModelTag,
    fluents: Vec<String>,
    fluent_index: HashMap<String, FluentId>,
    actions: Vec<GroundAction>,
    action_index: HashMap<String, usize>,
    init: FluentSet,
    goal: FluentSet,
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.domain_name == other.domain_name
            && self.problem_name == other.problem_name
            && self.tag == other.tag
            && self.fluents == other.fluents
            && self.actions == other.actions
            && self.init == other.init
            && self.goal == other.goal
    }
}

impl Eq for Model {}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("domain", &self.domain_name)
            .field("problem", &self.problem_name)
            .field("tag", &self.tag)
            .field("fluents", &self.fluents.len())
            .field("actions", &self.actions.len())
            .finish()
    }
}

pub(crate) fn valid_symbol(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| !c.is_whitespace() && !matches!(c, '(' | ')' | ';' | '?'))
}

impl Model {
    pub fn from_spec(spec: ModelSpec) -> Result<Model, ModelError> {
        let ModelSpec { domain_name, problem_name, tag, fluents, actions, init, goal } = spec;
        let fluents: Vec<String> = fluents.into_iter().collect();
        for name in fluents.iter().chain(actions.keys()) {
            if !valid_symbol(name) {
                return Err(ModelError::InvalidName(name.clone()));
            }
        }
        let fluent_index: HashMap<String, FluentId> = fluents
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), FluentId(i as u32)))
            .collect();
        let n = fluents.len();
        let to_set = |context: &str, names: &BTreeSet<String>| -> Result<FluentSet, ModelError> {
            let mut set = FluentSet::empty(n);
            for name in names {
                let id = fluent_index.get(name).ok_or_else(|| ModelError::UnknownFluent {
                    context: context.to_string(),
                    fluent: name.clone(),
                })?;
                set.insert(*id);
            }
            Ok(set)
        };
        let init_set = to_set("init", &init)?;
        let goal_set = to_set("goal", &goal)?;
        let mut ground = Vec::with_capacity(actions.len());
        for (name, a) in &actions {
            if let Some(f) = a.add.intersection(&a.del).next() {
                return Err(ModelError::OverlappingEffects { action: name.clone(), fluent: f.clone() });
            }
            let ctx = format!("action `{name}`");
            ground.push(GroundAction {
                name: name.clone(),
                cost: a.cost,
                pre: to_set(&ctx, &a.pre)?,
                add: to_set(&ctx, &a.add)?,
                del: to_set(&ctx, &a.del)?,
            });
        }
        let action_index = ground.iter().enumerate().map(|(i, a)| (a.name.clone(), i)).collect();
        Ok(Model {
            domain_name,
            problem_name,
            tag,
            fluents,
            fluent_index,
            actions: ground,
            action_index,
            init: init_set,
            goal: goal_set,
        })
    }

    pub fn to_spec(&self) -> ModelSpec {
        let names = |s: &FluentSet| s.iter().map(|id| self.fluent_name(id).to_string()).collect();
        ModelSpec {
            domain_name: self.domain_name.clone(),
            problem_name: self.problem_name.clone(),
            tag: self.tag,
            fluents: self.fluents.iter().cloned().collect(),
            actions: self
                .actions
                .iter()
                .map(|a| {
                    (
                        a.name.clone(),
                        ActionSpec { cost: a.cost, pre: names(&a.pre), add: names(&a.add), del: names(&a.del) },
                    )
                })
                .collect(),
            init: names(&self.init),
            goal: names(&self.goal),
        }
    }

    pub fn with_tag(mut self, tag: ModelTag) -> Model {
        self.tag = tag;
        self
    }

    pub fn tag(&self) -> ModelTag {
        self.tag
    }

    pub fn domain_name(&self) -> &str {
        &self.domain_name
    }

    pub fn problem_name(&self) -> &str {
        &self.problem_name
    }

    pub fn fluent_count(&self) -> usize {
        self.fluents.len()
    }

    pub fn fluent_names(&self) -> &[String] {
        &self.fluents
    }

    pub fn fluent_name(&self, id: FluentId) -> &str {
        &self.fluents[id.index()]
    }

    pub fn fluent_id(&self, name: &str) -> Option<FluentId> {
        self.fluent_index.get(name).copied()
    }

    pub fn actions(&self) -> &[GroundAction] {
        &self.actions
    }

    pub fn action(&self, name: &str) -> Option<&GroundAction> {
        self.action_index.get(name).map(|&i| &self.actions[i])
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.action_index.get(name).copied()
    }

    pub fn init(&self) -> &FluentSet {
        &self.init
    }

    pub fn goal(&self) -> &FluentSet {
        &self.goal
    }

    pub fn initial_state(&self) -> State {
        State(self.init.clone())
    }

    pub fn fluent_set_names(&self, set: &FluentSet) -> Vec<&str> {
        set.iter().map(|id| self.fluent_name(id)).collect()
    }

    fn resolve(&self, name: &str) -> Result<&GroundAction, StripsError> {
        self.action(name).ok_or_else(|| StripsError::UnknownAction(name.to_string()))
    }

    /// One transition. `Ok(None)` means the precondition does not hold.
    pub fn apply(&self, state: &State, action_name: &str) -> Result<Option<State>, StripsError> {
        let action = self.resolve(action_name)?;
        Ok(action.applicable(&state.0).then(|| State(action.successor(&state.0))))
    }

    /// Folds [`Model::apply`] from the initial state. All names are resolved
    /// before anything runs, so an unknown name is reported even when an
    /// earlier step is inapplicable.
    pub fn execute<S: AsRef<str>>(&self, steps: &[S]) -> Result<Execution, StripsError> {
        let resolved = steps
            .iter()
            .map(|s| self.resolve(s.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        let mut state = self.init.clone();
        let mut cost = Cost::ZERO;
        for (step, action) in resolved.into_iter().enumerate() {
            if !action.applicable(&state) {
                return Ok(Execution::Infeasible { step, action: action.name.clone() });
            }
            state = action.successor(&state);
            cost += action.cost;
        }
        Ok(Execution::Completed { final_state: State(state), cost })
    }

    pub fn validate_goal<S: AsRef<str>>(&self, steps: &[S]) -> Result<Validation, StripsError> {
        Ok(match self.execute(steps)? {
            Execution::Infeasible { step, action } => Validation::Infeasible { step, action },
            Execution::Completed { final_state, cost } => {
                if self.goal.is_subset(&final_state.0) {
                    Validation::Valid { cost }
                } else {
                    Validation::ExecutableNotGoal { cost }
                }
            }
        })
    }

    pub fn goal_reached(&self, state: &FluentSet) -> bool {
        self.goal.is_subset(state)
    }

    /// Rebuilds this model over a (super)set of fluent names so that it shares
    /// fluent ids with another model built over the same vocabulary.
    pub fn realign(&self, vocabulary: &BTreeSet<String>) -> Result<Model, ModelError> {
        let mut spec = self.to_spec();
        spec.fluents.extend(vocabulary.iter().cloned());
        Model::from_spec(spec)
    }
}

impl TryFrom<ModelSpec> for Model {
    type Error = ModelError;
    fn try_from(spec: ModelSpec) -> Result<Self, Self::Error> {
        Model::from_spec(spec)
    }
}

impl From<Model> for ModelSpec {
    fn from(m: Model) -> Self {
        m.to_spec()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State(pub FluentSet);

impl State {
    pub fn contains(&self, id: FluentId) -> bool {
        self.0.contains(id)
    }

    pub fn fluents(&self) -> &FluentSet {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Execution {
    Completed { final_state: State, cost: Cost },
    /// `step` is the zero-based position of the first inapplicable action.
    Infeasible { step: usize, action: String },
}

impl Execution {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Execution::Infeasible { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Validation {
    Valid { cost: Cost },
    ExecutableNotGoal { cost: Cost },
    Infeasible { step: usize, action: String },
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validation::Valid { .. })
    }
}

/// An executable action sequence together with its total cost.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<String>,
    pub cost: Cost,
}

impl Plan {
    pub fn empty() -> Plan {
        Plan { steps: Vec::new(), cost: Cost::ZERO }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn contains(&self, action: &str) -> bool {
        self.steps.iter().any(|s| s == action)
    }
}
