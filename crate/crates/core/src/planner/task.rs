use std::fmt::Debug;
use std::ops::Add;

use crate::cost::Cost;
use crate::fluent_set::{FluentId, FluentSet};
use crate::strips::Model;

/// Path cost algebra the searches run over: a totally ordered monoid where
/// `a <= b` implies `a + c <= b + c`.
pub trait PathCost: Copy + Ord + Add<Output = Self> + Debug + Send + Sync {
    fn zero() -> Self;
}

impl PathCost for Cost {
    fn zero() -> Self {
        Cost::ZERO
    }
}

/// Lexicographic (discard count, action cost) pair used by the soft foil
/// compilation: one discard outweighs any amount of ordinary cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LexCost {
    pub discards: u32,
    pub cost: Cost,
}

impl Add for LexCost {
    type Output = LexCost;
    fn add(self, rhs: LexCost) -> LexCost {
        LexCost { discards: self.discards + rhs.discards, cost: self.cost + rhs.cost }
    }
}

impl PathCost for LexCost {
    fn zero() -> Self {
        LexCost::default()
    }
}

#[derive(Clone, Debug)]
pub struct TaskAction<C> {
    pub pre: FluentSet,
    pub add: FluentSet,
    pub del: FluentSet,
    pub pre_list: Vec<u32>,
    pub add_list: Vec<u32>,
    pub cost: C,
}

/// Search-facing view of a model with an arbitrary cost algebra. Action
/// indices follow the model's (name-sorted) action order.
#[derive(Clone, Debug)]
pub struct Task<C> {
    pub fluents: usize,
    pub init: FluentSet,
    pub goal: FluentSet,
    pub actions: Vec<TaskAction<C>>,
    /// fluent -> actions that have it as a precondition
    pub consumers: Vec<Vec<u32>>,
}

fn ids(set: &FluentSet) -> Vec<u32> {
    set.iter().map(|FluentId(i)| i).collect()
}

impl Task<Cost> {
    pub fn from_model(model: &Model) -> Self {
        Task::with_costs(model, |a| a.cost)
    }
}

impl<C: PathCost> Task<C> {
    pub fn with_costs(model: &Model, cost: impl Fn(&crate::strips::GroundAction) -> C) -> Self {
        let n = model.fluent_count();
        let actions: Vec<TaskAction<C>> = model
            .actions()
            .iter()
            .map(|a| TaskAction {
                pre: a.pre.clone(),
                add: a.add.clone(),
                del: a.del.clone(),
                pre_list: ids(&a.pre),
                add_list: ids(&a.add),
                cost: cost(a),
            })
            .collect();
        let mut consumers = vec![Vec::new(); n];
        for (i, a) in actions.iter().enumerate() {
            for &f in &a.pre_list {
                consumers[f as usize].push(i as u32);
            }
        }
        Task { fluents: n, init: model.init().clone(), goal: model.goal().clone(), actions, consumers }
    }
}
