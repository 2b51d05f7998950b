//! Models as sets of atomic parameters, unit edits between two models, and
//! the minimum-cardinality explanation searches over those edits.
//!
//! Both searches walk edit subsets layer by layer in increasing size. Within a
//! layer, candidates are visited in lexicographic order of their sorted
//! renderings and the first one passing the goal test wins, so ties resolve
//! deterministically. A layer's goal tests may run in parallel; the winner is
//! still the first passing candidate in that order.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::error::EngineError;
use crate::foil::{compile, foil_feasible, CompileMode, Foil};
use crate::planner::Planner;
use crate::strips::{Model, ModelSpec, Plan, Validation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterKind {
    InitHas,
    GoalHas,
    PreOf,
    AddEffOf,
    DelEffOf,
    CostOf,
}

/// One atom of a model's parameterization. Init and goal parameters carry a
/// fluent, structural action parameters carry action and fluent, and cost
/// parameters carry action and value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelParameter {
    pub kind: ParameterKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub action: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fluent: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cost_value: Option<Cost>,
}

impl ModelParameter {
    pub fn init_has(fluent: &str) -> Self {
        Self { kind: ParameterKind::InitHas, action: None, fluent: Some(fluent.into()), cost_value: None }
    }

    pub fn goal_has(fluent: &str) -> Self {
        Self { kind: ParameterKind::GoalHas, action: None, fluent: Some(fluent.into()), cost_value: None }
    }

    pub fn of_action(kind: ParameterKind, action: &str, fluent: &str) -> Self {
        debug_assert!(matches!(kind, ParameterKind::PreOf | ParameterKind::AddEffOf | ParameterKind::DelEffOf));
        Self { kind, action: Some(action.into()), fluent: Some(fluent.into()), cost_value: None }
    }

    pub fn cost_of(action: &str, cost: Cost) -> Self {
        Self { kind: ParameterKind::CostOf, action: Some(action.into()), fluent: None, cost_value: Some(cost) }
    }

    /// Identity of the parameter slot, ignoring a cost value.
    fn slot(&self) -> (ParameterKind, Option<&str>, Option<&str>) {
        (self.kind, self.action.as_deref(), self.fluent.as_deref())
    }
}

impl fmt::Display for ModelParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let action = self.action.as_deref().unwrap_or_default();
        let fluent = self.fluent.as_deref().unwrap_or_default();
        match self.kind {
            ParameterKind::InitHas => write!(f, "init-has-{fluent}"),
            ParameterKind::GoalHas => write!(f, "goal-has-{fluent}"),
            ParameterKind::PreOf => write!(f, "{action}-has-precondition-{fluent}"),
            ParameterKind::AddEffOf => write!(f, "{action}-has-add-effect-{fluent}"),
            ParameterKind::DelEffOf => write!(f, "{action}-has-del-effect-{fluent}"),
            ParameterKind::CostOf => write!(f, "{action}-has-cost-{}", self.cost_value.unwrap_or_default()),
        }
    }
}

impl PartialOrd for ModelParameter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ModelParameter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_string()
            .cmp(&other.to_string())
            .then_with(|| (self.slot(), self.cost_value).cmp(&(other.slot(), other.cost_value)))
    }
}

/// The parameterization of a model.
pub fn gamma(model: &Model) -> Vec<ModelParameter> {
    let mut out = Vec::new();
    for f in model.fluent_set_names(model.init()) {
        out.push(ModelParameter::init_has(f));
    }
    for f in model.fluent_set_names(model.goal()) {
        out.push(ModelParameter::goal_has(f));
    }
    for a in model.actions() {
        for (kind, set) in [(ParameterKind::PreOf, &a.pre), (ParameterKind::AddEffOf, &a.add), (ParameterKind::DelEffOf, &a.del)]
        {
            for f in model.fluent_set_names(set) {
                out.push(ModelParameter::of_action(kind, &a.name, f));
            }
        }
        out.push(ModelParameter::cost_of(&a.name, a.cost));
    }
    out.sort();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AddToModel,
    RemoveFromModel,
}

/// A unit change moving one parameter of a base model to its value in a
/// reference model. A cost edit replaces the base cost `replaced` with
/// `parameter.cost_value` and counts as a single edit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edit {
    pub parameter: ModelParameter,
    pub direction: Direction,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub replaced: Option<Cost>,
}

impl Edit {
    /// The same change seen from the reference model's side.
    pub fn inverse(&self) -> Edit {
        match (self.parameter.kind, self.replaced) {
            (ParameterKind::CostOf, Some(old)) => Edit {
                parameter: ModelParameter { cost_value: Some(old), ..self.parameter.clone() },
                direction: self.direction,
                replaced: self.parameter.cost_value,
            },
            _ => Edit {
                parameter: self.parameter.clone(),
                direction: match self.direction {
                    Direction::AddToModel => Direction::RemoveFromModel,
                    Direction::RemoveFromModel => Direction::AddToModel,
                },
                replaced: None,
            },
        }
    }
}

impl fmt::Display for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verb = match self.direction {
            Direction::AddToModel => "add",
            Direction::RemoveFromModel => "remove",
        };
        write!(f, "{verb} {}", self.parameter)
    }
}

impl PartialOrd for Edit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Edit {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_string()
            .cmp(&other.to_string())
            .then_with(|| (&self.parameter, self.replaced).cmp(&(&other.parameter, other.replaced)))
    }
}

/// A set of edits kept sorted by rendering, with at most one edit per
/// parameter slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EditSet {
    edits: Vec<Edit>,
}

impl EditSet {
    pub fn new(mut edits: Vec<Edit>) -> Result<EditSet, EngineError> {
        edits.sort();
        edits.dedup();
        let mut slots = std::collections::HashSet::new();
        if let Some(e) = edits.iter().find(|e| !slots.insert(e.parameter.slot())) {
            return Err(EngineError::IllegalEdit(e.to_string()));
        }
        Ok(EditSet { edits })
    }

    pub fn empty() -> EditSet {
        EditSet::default()
    }

    pub fn edits(&self) -> &[Edit] {
        &self.edits
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    pub fn contains(&self, edit: &Edit) -> bool {
        self.edits.binary_search(edit).is_ok()
    }

    pub fn inverse(&self) -> EditSet {
        let mut edits: Vec<Edit> = self.edits.iter().map(Edit::inverse).collect();
        edits.sort();
        EditSet { edits }
    }

    /// One line per edit.
    pub fn render(&self) -> Vec<String> {
        self.edits.iter().map(Edit::to_string).collect()
    }
}

impl fmt::Display for EditSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.edits.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

fn set_diff(
    out: &mut Vec<Edit>,
    base: &BTreeSet<String>,
    reference: &BTreeSet<String>,
    param: impl Fn(&str) -> ModelParameter,
) {
    for f in reference.difference(base) {
        out.push(Edit { parameter: param(f), direction: Direction::AddToModel, replaced: None });
    }
    for f in base.difference(reference) {
        out.push(Edit { parameter: param(f), direction: Direction::RemoveFromModel, replaced: None });
    }
}

/// Every edit that moves `base` toward `reference`, sorted by rendering.
/// Actions present on only one side contribute nothing; paired manifests
/// guarantee both sides ground the same actions.
pub fn diff(base: &Model, reference: &Model) -> EditSet {
    let (b, r) = (base.to_spec(), reference.to_spec());
    let mut out = Vec::new();
    set_diff(&mut out, &b.init, &r.init, ModelParameter::init_has);
    set_diff(&mut out, &b.goal, &r.goal, ModelParameter::goal_has);
    for (name, ra) in &r.actions {
        let Some(ba) = b.actions.get(name) else { continue };
        set_diff(&mut out, &ba.pre, &ra.pre, |f| ModelParameter::of_action(ParameterKind::PreOf, name, f));
        set_diff(&mut out, &ba.add, &ra.add, |f| ModelParameter::of_action(ParameterKind::AddEffOf, name, f));
        set_diff(&mut out, &ba.del, &ra.del, |f| ModelParameter::of_action(ParameterKind::DelEffOf, name, f));
        if ba.cost != ra.cost {
            out.push(Edit {
                parameter: ModelParameter::cost_of(name, ra.cost),
                direction: Direction::AddToModel,
                replaced: Some(ba.cost),
            });
        }
    }
    EditSet::new(out).expect("a diff touches each slot once")
}

fn apply_to_spec(spec: &mut ModelSpec, edit: &Edit) {
    let p = &edit.parameter;
    let fluent = p.fluent.clone().unwrap_or_default();
    let toggle = |set: &mut BTreeSet<String>| match edit.direction {
        Direction::AddToModel => {
            set.insert(fluent.clone());
        }
        Direction::RemoveFromModel => {
            set.remove(&fluent);
        }
    };
    match p.kind {
        ParameterKind::InitHas => toggle(&mut spec.init),
        ParameterKind::GoalHas => toggle(&mut spec.goal),
        kind => {
            let action = spec.actions.get_mut(p.action.as_deref().unwrap_or_default()).expect("edit checked against diff");
            match kind {
                ParameterKind::PreOf => toggle(&mut action.pre),
                ParameterKind::AddEffOf => toggle(&mut action.add),
                ParameterKind::DelEffOf => toggle(&mut action.del),
                ParameterKind::CostOf => action.cost = p.cost_value.expect("cost edit carries a value"),
                ParameterKind::InitHas | ParameterKind::GoalHas => unreachable!(),
            }
        }
    }
}

/// `base` with each listed parameter moved to its value in `reference`.
///
/// Fails with [`EngineError::IllegalEdit`] for an edit outside the difference
/// and with [`EngineError::Model`] when a partial edit leaves an action both
/// adding and deleting a fluent.
pub fn apply_edits(base: &Model, reference: &Model, edits: &EditSet) -> Result<Model, EngineError> {
    let delta = diff(base, reference);
    apply_checked(base, &delta, edits.edits())
}

fn apply_checked(base: &Model, delta: &EditSet, edits: &[Edit]) -> Result<Model, EngineError> {
    let mut spec = base.to_spec();
    for e in edits {
        if !delta.contains(e) {
            return Err(EngineError::IllegalEdit(e.to_string()));
        }
        apply_to_spec(&mut spec, e);
    }
    Ok(Model::from_spec(spec)?)
}

/// Advances `idx` to the next k-combination of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        if k == 0 || !next_combination(&mut idx, n) {
            return out;
        }
    }
}

/// Layered search over subsets of `delta`. A candidate whose edits do not
/// form a valid model fails the goal test.
fn layered_search(
    human: &Model,
    delta: &EditSet,
    goal: impl Fn(&Model) -> Result<bool, EngineError> + Sync,
) -> Result<EditSet, EngineError> {
    let all = delta.edits();
    for k in 0..=all.len() {
        let layer = combinations(all.len(), k);
        let found = layer
            .par_iter()
            .map(|combo| {
                let edits: Vec<Edit> = combo.iter().map(|&i| all[i].clone()).collect();
                let verdict = match apply_checked(human, delta, &edits) {
                    Ok(model) => goal(&model),
                    Err(EngineError::Model(_)) => Ok(false),
                    Err(e) => Err(e),
                };
                (edits, verdict)
            })
            .find_first(|(_, verdict)| !matches!(verdict, Ok(false)));
        if let Some((edits, verdict)) = found {
            verdict?;
            return Ok(EditSet { edits });
        }
    }
    Err(EngineError::NoExplanation)
}

/// Smallest edit set after which `pi_star` is valid and optimal in the
/// updated human model.
pub fn mce_search(planner: &Planner, robot: &Model, human: &Model, pi_star: &Plan) -> Result<EditSet, EngineError> {
    let delta = diff(human, robot);
    layered_search(human, &delta, |m| match m.validate_goal(&pi_star.steps)? {
        Validation::Valid { cost } => Ok(planner.optimal_cost(m)? == Some(cost)),
        _ => Ok(false),
    })
}

/// Smallest edit set after which no foil has a valid completion in the
/// updated human model.
pub fn contrastive_search(planner: &Planner, robot: &Model, human: &Model, foils: &[Foil]) -> Result<EditSet, EngineError> {
    if foils.is_empty() {
        return Err(EngineError::NoFoils);
    }
    for foil in foils {
        if foil_feasible(planner, robot, foil)? {
            return Err(EngineError::FoilFeasibleInRobot(foil.observations.clone()));
        }
    }
    // Cheapest compilations first, so still-feasible foils reject early.
    let mut ordered: Vec<&Foil> = foils.iter().collect();
    ordered.sort_by_key(|f| f.len());
    let delta = diff(human, robot);
    layered_search(human, &delta, |m| {
        for foil in &ordered {
            let compiled = compile(m, foil, CompileMode::Hard)?;
            if planner.decide_solvable(&compiled.model)? {
                return Ok(false);
            }
        }
        Ok(true)
    })
}
