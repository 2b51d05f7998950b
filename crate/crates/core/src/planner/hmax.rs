//! Delete-relaxation h^max, computed with a generalized Dijkstra sweep.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::task::{PathCost, Task};
use crate::fluent_set::FluentSet;

/// Reusable scratch buffers so per-state evaluation does not allocate.
pub struct HmaxEvaluator<C> {
    dist: Vec<Option<C>>,
    settled: Vec<bool>,
    unsatisfied: Vec<u32>,
    max_pre: Vec<C>,
    heap: BinaryHeap<Reverse<(C, u32)>>,
}

impl<C: PathCost> HmaxEvaluator<C> {
    pub fn new(task: &Task<C>) -> Self {
        HmaxEvaluator {
            dist: vec![None; task.fluents],
            settled: vec![false; task.fluents],
            unsatisfied: vec![0; task.actions.len()],
            max_pre: vec![C::zero(); task.actions.len()],
            heap: BinaryHeap::new(),
        }
    }

    /// `None` when some goal fluent is relaxed-unreachable (a dead end).
    pub fn evaluate(&mut self, task: &Task<C>, state: &FluentSet) -> Option<C> {
        let mut pending_goals = task.goal.iter().filter(|g| !state.contains(*g)).count();
        if pending_goals == 0 {
            return Some(C::zero());
        }
        self.dist.iter_mut().for_each(|d| *d = None);
        self.settled.iter_mut().for_each(|s| *s = false);
        self.heap.clear();
        for (i, a) in task.actions.iter().enumerate() {
            self.unsatisfied[i] = a.pre_list.len() as u32;
            self.max_pre[i] = C::zero();
        }
        for f in state.iter() {
            self.dist[f.index()] = Some(C::zero());
            self.heap.push(Reverse((C::zero(), f.0)));
        }
        for (i, a) in task.actions.iter().enumerate() {
            if a.pre_list.is_empty() {
                self.relax(task, i, a.cost);
            }
        }
        while let Some(Reverse((c, f))) = self.heap.pop() {
            let fi = f as usize;
            if self.settled[fi] || self.dist[fi] != Some(c) {
                continue;
            }
            self.settled[fi] = true;
            if task.goal.contains(crate::fluent_set::FluentId(f)) && !state.contains(crate::fluent_set::FluentId(f)) {
                pending_goals -= 1;
                if pending_goals == 0 {
                    return Some(c);
                }
            }
            for &ai in &task.consumers[fi] {
                let ai = ai as usize;
                self.unsatisfied[ai] -= 1;
                if c > self.max_pre[ai] {
                    self.max_pre[ai] = c;
                }
                if self.unsatisfied[ai] == 0 {
                    let reach = self.max_pre[ai] + task.actions[ai].cost;
                    self.relax(task, ai, reach);
                }
            }
        }
        None
    }

    fn relax(&mut self, task: &Task<C>, action: usize, reach: C) {
        for &g in &task.actions[action].add_list {
            let gi = g as usize;
            if self.dist[gi].is_none_or(|d| reach < d) {
                self.dist[gi] = Some(reach);
                self.heap.push(Reverse((reach, g)));
            }
        }
    }
}
