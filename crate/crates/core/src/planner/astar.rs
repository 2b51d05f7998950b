//! A* over a [`Task`] with the h^max heuristic.
//!
//! Open-list order is `(f, h, path)`: lower f first, then lower h, then the
//! lexicographically smallest action-index sequence. Action indices follow
//! name order, so the last key is the lexicographic order on action names.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::hmax::HmaxEvaluator;
use super::task::{PathCost, Task};
use super::{Budget, Interrupt, SearchStats};
use crate::fluent_set::FluentSet;

struct OpenEntry<C> {
    f: C,
    h: C,
    g: C,
    path: Vec<u32>,
    node: u32,
}

impl<C: PathCost> PartialEq for OpenEntry<C> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<C: PathCost> Eq for OpenEntry<C> {}

impl<C: PathCost> PartialOrd for OpenEntry<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<C: PathCost> Ord for OpenEntry<C> {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        (other.f, other.h, &other.path, other.node).cmp(&(self.f, self.h, &self.path, self.node))
    }
}

struct NodeInfo<C> {
    g: C,
    path: Vec<u32>,
    h: Option<C>,
}

/// Returns the optimal action-index sequence and its cost, `Ok(None)` when
/// the open list empties without reaching the goal.
pub fn search<C: PathCost>(
    task: &Task<C>,
    budget: &mut Budget<'_>,
    stats: &mut SearchStats,
) -> Result<Option<(Vec<u32>, C)>, Interrupt> {
    let mut evaluator = HmaxEvaluator::new(task);
    let mut index: HashMap<FluentSet, u32> = HashMap::new();
    let mut states: Vec<FluentSet> = Vec::new();
    let mut nodes: Vec<NodeInfo<C>> = Vec::new();
    let mut open = BinaryHeap::new();

    let h0 = evaluator.evaluate(task, &task.init);
    index.insert(task.init.clone(), 0);
    states.push(task.init.clone());
    nodes.push(NodeInfo { g: C::zero(), path: Vec::new(), h: h0 });
    stats.generated += 1;
    let Some(h0) = h0 else {
        return Ok(None);
    };
    open.push(OpenEntry { f: h0, h: h0, g: C::zero(), path: Vec::new(), node: 0 });

    while let Some(entry) = open.pop() {
        budget.check(stats)?;
        let info = &nodes[entry.node as usize];
        if info.g != entry.g || info.path != entry.path {
            continue;
        }
        let state = states[entry.node as usize].clone();
        if task.goal.is_subset(&state) {
            return Ok(Some((entry.path, entry.g)));
        }
        stats.expanded += 1;
        for (ai, action) in task.actions.iter().enumerate() {
            if !action.pre.is_subset(&state) {
                continue;
            }
            let mut succ = state.clone();
            succ.union_with(&action.add);
            succ.difference_with(&action.del);
            stats.generated += 1;
            budget.check_generated(stats)?;
            let g = entry.g + action.cost;
            let mut path = Vec::with_capacity(entry.path.len() + 1);
            path.extend_from_slice(&entry.path);
            path.push(ai as u32);

            let (node, improved) = match index.get(&succ) {
                Some(&id) => {
                    let n = &nodes[id as usize];
                    let better = g < n.g || (g == n.g && path < n.path);
                    (id, better && n.h.is_some())
                }
                None => {
                    let id = states.len() as u32;
                    let h = evaluator.evaluate(task, &succ);
                    index.insert(succ.clone(), id);
                    states.push(succ);
                    nodes.push(NodeInfo { g, path: path.clone(), h });
                    (id, h.is_some())
                }
            };
            if improved {
                let n = &mut nodes[node as usize];
                n.g = g;
                n.path = path.clone();
                let h = n.h.expect("dead ends are never pushed");
                open.push(OpenEntry { f: g + h, h, g, path, node });
            }
        }
    }
    Ok(None)
}
