//! Optimal planning and solvability decisions.
//!
//! [`Planner`] bundles the resource budget shared by every search. All
//! operations are pure functions of their model arguments; a planner may be
//! cloned and used from several threads, and every clone observes the same
//! [`CancelToken`].

mod astar;
mod hm;
mod hmax;
mod task;

use std::collections::{HashSet, VecDeque};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::cost::Cost;
use crate::strips::{Model, Plan};

pub use hmax::HmaxEvaluator;
pub use task::{LexCost, PathCost, Task, TaskAction};

pub const DEFAULT_MAX_GENERATED: u64 = 10_000_000;
pub const DEFAULT_MAX_TIME: Duration = Duration::from_secs(60);
/// Largest m tried by [`Planner::decide_solvable`] before exhaustive search.
pub const DEFAULT_HM_CEILING: usize = 2;

#[derive(Clone, Debug, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::SeqCst);
    }

    pub fn reset(&self) {
        self.0.store(false, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::SeqCst)
    }
}

#[derive(Clone, Debug)]
pub struct SearchLimits {
    /// Generated-node budget per call.
    pub max_generated: u64,
    /// Wall-clock budget per call.
    pub max_time: Duration,
    pub cancel: CancelToken,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_generated: DEFAULT_MAX_GENERATED, max_time: DEFAULT_MAX_TIME, cancel: CancelToken::new() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub expanded: u64,
    pub generated: u64,
    pub elapsed_ms: u64,
}

/// Plan as action indices with its cost, none if unsolvable.
pub type TaskOutcome<C> = Result<Option<(Vec<u32>, C)>, Interrupt>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Interrupt {
    NodeBudget,
    TimeBudget,
    Cancelled,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlannerError {
    #[error("search stopped ({kind:?}) after {} generated nodes", stats.generated)]
    ResourceLimit { kind: Interrupt, stats: SearchStats },
}

pub(crate) struct Budget<'a> {
    limits: &'a SearchLimits,
    started: Instant,
    ticks: u32,
}

impl<'a> Budget<'a> {
    fn new(limits: &'a SearchLimits) -> Self {
        Budget { limits, started: Instant::now(), ticks: 0 }
    }

    /// Cancellation is checked on every expansion, the clock every 256.
    fn check(&mut self, stats: &SearchStats) -> Result<(), Interrupt> {
        if self.limits.cancel.is_cancelled() {
            return Err(Interrupt::Cancelled);
        }
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(256) && self.started.elapsed() > self.limits.max_time {
            return Err(Interrupt::TimeBudget);
        }
        self.check_generated(stats)
    }

    fn check_generated(&self, stats: &SearchStats) -> Result<(), Interrupt> {
        if stats.generated > self.limits.max_generated {
            Err(Interrupt::NodeBudget)
        } else {
            Ok(())
        }
    }

    fn elapsed_ms(&self) -> u64 {
        self.started.elapsed().as_millis() as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SearchOutcome {
    Plan { plan: Plan },
    Unsolvable,
    ResourceLimit { kind: Interrupt },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    #[serde(flatten)]
    pub outcome: SearchOutcome,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn plan(&self) -> Option<&Plan> {
        match &self.outcome {
            SearchOutcome::Plan { plan } => Some(plan),
            _ => None,
        }
    }

    pub fn into_result(self) -> Result<Option<Plan>, PlannerError> {
        match self.outcome {
            SearchOutcome::Plan { plan } => Ok(Some(plan)),
            SearchOutcome::Unsolvable => Ok(None),
            SearchOutcome::ResourceLimit { kind } => Err(PlannerError::ResourceLimit { kind, stats: self.stats }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Planner {
    pub limits: SearchLimits,
    pub hm_ceiling: usize,
}

impl Default for Planner {
    fn default() -> Self {
        Planner { limits: SearchLimits::default(), hm_ceiling: DEFAULT_HM_CEILING }
    }
}

impl Planner {
    pub fn with_limits(limits: SearchLimits) -> Self {
        Planner { limits, ..Planner::default() }
    }

    pub fn cancel_token(&self) -> &CancelToken {
        &self.limits.cancel
    }

    /// Cost-optimal plan via A* with h^max.
    pub fn solve_optimal(&self, model: &Model) -> SearchResult {
        let task = Task::from_model(model);
        let (result, stats) = self.search_task(&task);
        let outcome = match result {
            Ok(Some((path, cost))) => SearchOutcome::Plan {
                plan: Plan { steps: path.iter().map(|&i| model.actions()[i as usize].name.clone()).collect(), cost },
            },
            Ok(None) => SearchOutcome::Unsolvable,
            Err(kind) => SearchOutcome::ResourceLimit { kind },
        };
        SearchResult { outcome, stats }
    }

    /// Optimal search over any cost algebra; returns action indices.
    pub fn search_task<C: PathCost>(&self, task: &Task<C>) -> (TaskOutcome<C>, SearchStats) {
        let mut budget = Budget::new(&self.limits);
        let mut stats = SearchStats::default();
        let r = astar::search(task, &mut budget, &mut stats);
        stats.elapsed_ms = budget.elapsed_ms();
        (r, stats)
    }

    /// `Ok(None)` stands for an infinite optimal cost.
    pub fn optimal_cost(&self, model: &Model) -> Result<Option<Cost>, PlannerError> {
        Ok(self.solve_optimal(model).into_result()?.map(|p| p.cost))
    }

    /// Sound but incomplete: `true` proves the model has no plan.
    pub fn hm_unsolvable(&self, model: &Model, m: usize) -> bool {
        !hm::goal_reachable(&Task::from_model(model), m)
    }

    /// Complete solvability decision: h^m pretests for m = 1..=ceiling,
    /// then exhaustive reachable-state search.
    pub fn decide_solvable(&self, model: &Model) -> Result<bool, PlannerError> {
        let task = Task::from_model(model);
        for m in 1..=self.hm_ceiling.max(1) {
            if !hm::goal_reachable(&task, m) {
                return Ok(false);
            }
        }
        self.exhaustive_reachable(&task)
    }

    fn exhaustive_reachable<C: PathCost>(&self, task: &Task<C>) -> Result<bool, PlannerError> {
        let mut budget = Budget::new(&self.limits);
        let mut stats = SearchStats::default();
        if task.goal.is_subset(&task.init) {
            return Ok(true);
        }
        let mut seen = HashSet::from([task.init.clone()]);
        let mut queue = VecDeque::from([task.init.clone()]);
        stats.generated = 1;
        let interrupted = |kind, budget: &Budget, mut stats: SearchStats| {
            stats.elapsed_ms = budget.elapsed_ms();
            PlannerError::ResourceLimit { kind, stats }
        };
        while let Some(state) = queue.pop_front() {
            budget.check(&stats).map_err(|k| interrupted(k, &budget, stats))?;
            stats.expanded += 1;
            for a in &task.actions {
                if !a.pre.is_subset(&state) {
                    continue;
                }
                let mut next = state.clone();
                next.union_with(&a.add);
                next.difference_with(&a.del);
                if seen.contains(&next) {
                    continue;
                }
                stats.generated += 1;
                if task.goal.is_subset(&next) {
                    return Ok(true);
                }
                budget.check_generated(&stats).map_err(|k| interrupted(k, &budget, stats))?;
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strips::{ActionSpec, ModelSpec};

    fn names(xs: &[&str]) -> std::collections::BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    /// `(name, cost, pre, add, del)`.
    type Row<'a> = (&'a str, u32, &'a [&'a str], &'a [&'a str], &'a [&'a str]);

    fn model(actions: &[Row], init: &[&str], goal: &[&str]) -> Model {
        let mut spec = ModelSpec {
            domain_name: "t".into(),
            problem_name: "t".into(),
            fluents: names(&["P", "Q", "R", "S"]),
            init: names(init),
            goal: names(goal),
            ..Default::default()
        };
        for (n, c, pre, add, del) in actions {
            spec.actions.insert(
                n.to_string(),
                ActionSpec { cost: Cost::integer(*c), pre: names(pre), add: names(add), del: names(del) },
            );
        }
        Model::from_spec(spec).unwrap()
    }

    #[test]
    fn goal_in_init_gives_empty_plan() {
        let m = model(&[("X", 1, &[], &["Q"], &[])], &["P"], &["P"]);
        let r = Planner::default().solve_optimal(&m);
        assert_eq!(r.plan(), Some(&Plan::empty()));
    }

    #[test]
    fn prefers_cheaper_longer_plan() {
        let m = model(
            &[("DIRECT", 5, &["P"], &["S"], &[]), ("STEP1", 1, &["P"], &["Q"], &[]), ("STEP2", 1, &["Q"], &["S"], &[])],
            &["P"],
            &["S"],
        );
        let plan = Planner::default().solve_optimal(&m).plan().cloned().unwrap();
        assert_eq!(plan.steps, vec!["STEP1", "STEP2"]);
        assert_eq!(plan.cost, Cost::integer(2));
    }

    #[test]
    fn ties_break_lexicographically() {
        let m = model(&[("B_WAY", 1, &["P"], &["S"], &[]), ("A_WAY", 1, &["P"], &["S"], &[])], &["P"], &["S"]);
        let plan = Planner::default().solve_optimal(&m).plan().cloned().unwrap();
        assert_eq!(plan.steps, vec!["A_WAY"]);
    }

    #[test]
    fn goal_never_added_is_infinite() {
        let m = model(&[("X", 1, &["P"], &["Q"], &[])], &["P"], &["S"]);
        let planner = Planner::default();
        assert_eq!(planner.optimal_cost(&m).unwrap(), None);
        assert!(planner.hm_unsolvable(&m, 1));
        assert!(!planner.decide_solvable(&m).unwrap());
    }

    #[test]
    fn delete_interference_needs_h2() {
        // Q and R are each reachable but never together: TAKE_R deletes Q and
        // nothing re-adds it after R.
        let m = model(
            &[
                ("TAKE_Q", 1, &["P"], &["Q"], &["P"]),
                ("TAKE_R", 1, &["Q"], &["R"], &["Q"]),
            ],
            &["P"],
            &["Q", "R"],
        );
        let planner = Planner::default();
        assert!(!planner.hm_unsolvable(&m, 1));
        assert!(planner.hm_unsolvable(&m, 2));
        assert!(!planner.decide_solvable(&m).unwrap());
        assert_eq!(planner.solve_optimal(&m).outcome, SearchOutcome::Unsolvable);
    }

    #[test]
    fn node_budget_and_cancellation_interrupt() {
        let m = model(
            &[("STEP1", 1, &["P"], &["Q"], &[]), ("STEP2", 1, &["Q"], &["R"], &[]), ("STEP3", 1, &["R"], &["S"], &[])],
            &["P"],
            &["S"],
        );
        let planner = Planner::with_limits(SearchLimits { max_generated: 1, ..Default::default() });
        assert!(matches!(
            planner.solve_optimal(&m).outcome,
            SearchOutcome::ResourceLimit { kind: Interrupt::NodeBudget }
        ));
        let planner = Planner::default();
        planner.cancel_token().cancel();
        assert!(matches!(
            planner.solve_optimal(&m).outcome,
            SearchOutcome::ResourceLimit { kind: Interrupt::Cancelled }
        ));
    }
}
