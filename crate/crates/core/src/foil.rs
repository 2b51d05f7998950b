//! Foils and their compilation into planning problems.
//!
//! Observation `o_i` (1-based) gets a monitor fluent `MET_O{i}`, an explain
//! action `EXPLAIN_O{i}_<action>` that replicates the observed action and adds
//! the monitor, and in soft mode a discard action `DISCARD_O{i}_<action>` that
//! adds the monitor for a penalty. Both families for `i > 1` require
//! `MET_O{i-1}`, so monitors fire strictly in foil order. The compiled goal
//! asks for every monitor.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::error::EngineError;
use crate::planner::{LexCost, Planner, Task};
use crate::strips::{ActionSpec, Model, Plan};

/// An ordered sequence of observed actions. Duplicates are distinct
/// observations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Foil {
    pub observations: Vec<String>,
}

impl Foil {
    pub fn new<S: Into<String>>(observations: impl IntoIterator<Item = S>) -> Foil {
        Foil { observations: observations.into_iter().map(Into::into).collect() }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Observations at `indices`, kept in foil order.
    pub fn subsequence(&self, indices: &[usize]) -> Result<Foil, EngineError> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        sorted
            .into_iter()
            .map(|i| self.observations.get(i).cloned().ok_or(EngineError::InvalidIndex(i)))
            .collect::<Result<Vec<_>, _>>()
            .map(|observations| Foil { observations })
    }

    pub fn check_against(&self, model: &Model) -> Result<(), EngineError> {
        match self.observations.iter().find(|o| model.action(o).is_none()) {
            Some(o) => Err(EngineError::UnknownAction(o.clone())),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompileMode {
    /// Observations may be discarded at a penalty.
    Soft,
    /// Every observation must be explained.
    Hard,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformedProblem {
    pub model: Model,
    pub mode: CompileMode,
    pub monitor_fluents: Vec<String>,
    pub explain_actions: Vec<String>,
    /// Empty in hard mode.
    pub discard_actions: Vec<String>,
    /// Cost carried by discard actions, above the cost of any plan that
    /// repeats no base action.
    pub discard_penalty: Cost,
    observed: HashMap<String, (usize, String)>,
}

/// Where a step of a projected plan came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "used-foil")]
    UsedFoil,
    #[serde(rename = "new")]
    New,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanStep {
    pub action: String,
    pub provenance: Provenance,
    /// Observation index satisfied by this step.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub observation: Option<usize>,
}

/// A base-model plan with per-step provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedPlan {
    pub plan: Plan,
    pub steps: Vec<PlanStep>,
}

impl AnnotatedPlan {
    /// Observation indices the plan satisfies, ascending.
    pub fn used(&self) -> Vec<usize> {
        self.steps.iter().filter_map(|s| s.observation).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosestPlan {
    pub plan: Plan,
    pub steps: Vec<PlanStep>,
    pub used: Vec<usize>,
    pub discarded: Vec<usize>,
}

impl TransformedProblem {
    /// Maps a compiled plan back to base actions, dropping discards.
    pub fn project(&self, base: &Model, steps: &[String]) -> Result<AnnotatedPlan, EngineError> {
        let discards: BTreeSet<&str> = self.discard_actions.iter().map(String::as_str).collect();
        let mut out = Vec::new();
        for step in steps {
            if discards.contains(step.as_str()) {
                continue;
            }
            match self.observed.get(step) {
                Some((i, action)) => out.push(PlanStep {
                    action: action.clone(),
                    provenance: Provenance::UsedFoil,
                    observation: Some(*i),
                }),
                None => out.push(PlanStep { action: step.clone(), provenance: Provenance::New, observation: None }),
            }
        }
        let names: Vec<String> = out.iter().map(|s| s.action.clone()).collect();
        let mut cost = Cost::ZERO;
        for n in &names {
            cost += base.action(n).ok_or_else(|| EngineError::UnknownAction(n.clone()))?.cost;
        }
        Ok(AnnotatedPlan { plan: Plan { steps: names, cost }, steps: out })
    }

    pub fn is_discard(&self, action: &str) -> bool {
        self.discard_actions.iter().any(|d| d == action)
    }
}

/// Picks a marker so none of the generated symbols clash with the model.
fn marker(model: &Model, foil: &Foil) -> String {
    let mut marker = String::from("O");
    loop {
        let clash = (1..=foil.len()).any(|i| {
            model.fluent_id(&format!("MET_{marker}{i}")).is_some()
                || model.action(&format!("EXPLAIN_{marker}{i}_{}", foil.observations[i - 1])).is_some()
                || model.action(&format!("DISCARD_{marker}{i}_{}", foil.observations[i - 1])).is_some()
        });
        if !clash {
            return marker;
        }
        marker.push('O');
    }
}

pub fn compile(model: &Model, foil: &Foil, mode: CompileMode) -> Result<TransformedProblem, EngineError> {
    foil.check_against(model)?;
    let marker = marker(model, foil);
    let mut spec = model.to_spec();
    let discard_penalty = Cost::ONE + Cost::sum(model.actions().iter().map(|a| &a.cost));
    let mut monitor_fluents = Vec::with_capacity(foil.len());
    let mut explain_actions = Vec::with_capacity(foil.len());
    let mut discard_actions = Vec::new();
    let mut observed = HashMap::new();

    for (i, name) in foil.observations.iter().enumerate() {
        let met = format!("MET_{marker}{}", i + 1);
        let chain: BTreeSet<String> = monitor_fluents.last().cloned().into_iter().collect();
        let base = &spec.actions[name];

        let mut explain = base.clone();
        explain.pre.extend(chain.iter().cloned());
        explain.add.insert(met.clone());
        let explain_name = format!("EXPLAIN_{marker}{}_{name}", i + 1);

        if mode == CompileMode::Soft {
            let discard = ActionSpec {
                cost: discard_penalty,
                pre: chain,
                add: BTreeSet::from([met.clone()]),
                del: BTreeSet::new(),
            };
            let discard_name = format!("DISCARD_{marker}{}_{name}", i + 1);
            spec.actions.insert(discard_name.clone(), discard);
            discard_actions.push(discard_name);
        }
        spec.actions.insert(explain_name.clone(), explain);
        observed.insert(explain_name.clone(), (i, name.clone()));
        explain_actions.push(explain_name);
        spec.fluents.insert(met.clone());
        spec.goal.insert(met.clone());
        monitor_fluents.push(met);
    }

    Ok(TransformedProblem {
        model: Model::from_spec(spec)?,
        mode,
        monitor_fluents,
        explain_actions,
        discard_actions,
        discard_penalty,
        observed,
    })
}

/// Whether some valid plan of `model` contains the foil as an ordered
/// subsequence.
pub fn foil_feasible(planner: &Planner, model: &Model, foil: &Foil) -> Result<bool, EngineError> {
    let compiled = compile(model, foil, CompileMode::Hard)?;
    Ok(planner.decide_solvable(&compiled.model)?)
}

/// Cheapest valid plan containing the foil, projected to base actions.
pub fn best_completion(planner: &Planner, model: &Model, foil: &Foil) -> Result<Option<AnnotatedPlan>, EngineError> {
    let compiled = compile(model, foil, CompileMode::Hard)?;
    match planner.solve_optimal(&compiled.model).into_result()? {
        Some(plan) => Ok(Some(compiled.project(model, &plan.steps)?)),
        None => Ok(None),
    }
}

/// The valid plan using as many observations as possible, cheapest among
/// those.
pub fn closest_plan(planner: &Planner, model: &Model, foil: &Foil) -> Result<ClosestPlan, EngineError> {
    let compiled = compile(model, foil, CompileMode::Soft)?;
    let discards: BTreeSet<&str> = compiled.discard_actions.iter().map(String::as_str).collect();
    let task = Task::with_costs(&compiled.model, |a| {
        if discards.contains(a.name.as_str()) {
            LexCost { discards: 1, cost: Cost::ZERO }
        } else {
            LexCost { discards: 0, cost: a.cost }
        }
    });
    let (result, stats) = planner.search_task(&task);
    let path = match result {
        Ok(Some((path, _))) => path,
        Ok(None) => return Err(EngineError::BaseUnsolvable),
        Err(kind) => return Err(EngineError::ResourceLimit { kind, stats }),
    };
    let steps: Vec<String> = path.iter().map(|&i| compiled.model.actions()[i as usize].name.clone()).collect();
    let annotated = compiled.project(model, &steps)?;
    let used = annotated.used();
    let discarded = (0..foil.len()).filter(|i| !used.contains(i)).collect();
    Ok(ClosestPlan { plan: annotated.plan, steps: annotated.steps, used, discarded })
}

/// Cost comparison for a foil that does have a valid completion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuboptimalityReport {
    pub cost_of_best_completion: Cost,
    pub optimal_cost: Cost,
    pub delta: Cost,
}

pub fn suboptimality_report(planner: &Planner, robot: &Model, foil: &Foil) -> Result<SuboptimalityReport, EngineError> {
    let compiled = compile(robot, foil, CompileMode::Hard)?;
    let completion = planner.optimal_cost(&compiled.model)?.ok_or(EngineError::FoilInfeasible)?;
    let optimal = planner.optimal_cost(robot)?.ok_or(EngineError::BaseUnsolvable)?;
    Ok(SuboptimalityReport { cost_of_best_completion: completion, optimal_cost: optimal, delta: completion - optimal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{firefight_foil, firefight_models};

    #[test]
    fn fixture_foil_is_infeasible_for_the_robot_only() {
        let (robot, human) = firefight_models();
        let foil = Foil::new(firefight_foil());
        let planner = Planner::default();
        assert!(!foil_feasible(&planner, &robot, &foil).unwrap());
        assert!(foil_feasible(&planner, &human, &foil).unwrap());
    }

    #[test]
    fn compilation_shape() {
        let (robot, _) = firefight_models();
        let foil = Foil::new(firefight_foil());
        let soft = compile(&robot, &foil, CompileMode::Soft).unwrap();
        assert_eq!(soft.monitor_fluents, vec!["MET_O1", "MET_O2", "MET_O3", "MET_O4"]);
        assert_eq!(soft.discard_actions.len(), 4);
        assert_eq!(soft.model.actions().len(), robot.actions().len() + 8);
        let e2 = soft.model.action(&soft.explain_actions[1]).unwrap();
        assert!(e2.pre.contains(soft.model.fluent_id("MET_O1").unwrap()));
        let d2 = soft.model.action(&soft.discard_actions[1]).unwrap();
        assert_eq!(soft.model.fluent_set_names(&d2.pre), vec!["MET_O1"]);
        assert_eq!(d2.cost, soft.discard_penalty);
        let hard = compile(&robot, &foil, CompileMode::Hard).unwrap();
        assert!(hard.discard_actions.is_empty());
        assert_eq!(hard.model.actions().len(), robot.actions().len() + 4);
    }

    #[test]
    fn unknown_observation_is_reported() {
        let (robot, _) = firefight_models();
        let err = compile(&robot, &Foil::new(["NOPE"]), CompileMode::Hard).unwrap_err();
        assert_eq!(err, EngineError::UnknownAction("NOPE".into()));
    }

    #[test]
    fn closest_plan_keeps_two_observations() {
        let (robot, _) = firefight_models();
        let foil = Foil::new(firefight_foil());
        let closest = closest_plan(&Planner::default(), &robot, &foil).unwrap();
        assert_eq!(closest.used, vec![0, 3]);
        assert_eq!(closest.discarded, vec![1, 2]);
        assert!(robot.validate_goal(&closest.plan.steps).unwrap().is_valid());
        let marked: Vec<&str> = closest
            .steps
            .iter()
            .filter(|s| s.provenance == Provenance::UsedFoil)
            .map(|s| s.action.as_str())
            .collect();
        assert_eq!(marked, vec!["DEPLOY_SMALL_ENGINES_FIRECHIEF_ADMINFIRE_BYENG", "ADDRESS_MEDIA_FIRECHIEF"]);
    }

    #[test]
    fn empty_foil_compiles_to_the_base_problem() {
        let (robot, _) = firefight_models();
        let planner = Planner::default();
        let optimal = planner.solve_optimal(&robot).plan().cloned().unwrap();
        for mode in [CompileMode::Soft, CompileMode::Hard] {
            let compiled = compile(&robot, &Foil::default(), mode).unwrap();
            assert_eq!(planner.solve_optimal(&compiled.model).plan(), Some(&optimal));
        }
        let closest = closest_plan(&planner, &robot, &Foil::default()).unwrap();
        assert_eq!(closest.plan, optimal);
    }

    #[test]
    fn optimal_plan_as_foil_is_fully_used() {
        let (robot, _) = firefight_models();
        let planner = Planner::default();
        let optimal = planner.solve_optimal(&robot).plan().cloned().unwrap();
        let foil = Foil::new(optimal.steps.clone());
        let closest = closest_plan(&planner, &robot, &foil).unwrap();
        assert!(closest.discarded.is_empty());
        assert_eq!(closest.plan, optimal);
        let report = suboptimality_report(&planner, &robot, &foil).unwrap();
        assert_eq!(report.delta, Cost::ZERO);
    }
}
