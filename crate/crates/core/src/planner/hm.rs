//! h^m reachability over fluent tuples of size at most m.
//!
//! A tuple is reached when it holds initially, or when some action with an
//! m-reachable precondition adds part of it and the remainder (neither added
//! nor deleted) is m-reachable together with that precondition. If some
//! goal tuple stays unreached the task has no plan.

use std::collections::HashSet;

use super::task::{PathCost, Task};

type Tuple = Vec<u32>;

struct Reach {
    m: usize,
    reached: HashSet<Tuple>,
}

impl Reach {
    /// Every non-empty subset of `xs` with at most `m` elements is reached.
    fn all_subsets_reached(&self, xs: &[u32]) -> bool {
        let mut buf = Vec::with_capacity(self.m);
        self.subsets_from(xs, 0, &mut buf)
    }

    fn subsets_from(&self, xs: &[u32], start: usize, buf: &mut Vec<u32>) -> bool {
        for i in start..xs.len() {
            buf.push(xs[i]);
            let mut key = buf.clone();
            key.sort_unstable();
            let ok = self.reached.contains(&key) && (buf.len() >= self.m || self.subsets_from(xs, i + 1, buf));
            buf.pop();
            if !ok {
                return false;
            }
        }
        true
    }
}

fn combinations(items: &[u32], k: usize, start: usize, buf: &mut Vec<u32>, out: &mut Vec<Tuple>) {
    if buf.len() == k {
        out.push(buf.clone());
        return;
    }
    for i in start..items.len() {
        buf.push(items[i]);
        combinations(items, k, i + 1, buf, out);
        buf.pop();
    }
}

fn subsets_up_to(items: &[u32], m: usize) -> Vec<Tuple> {
    let mut out = Vec::new();
    for k in 1..=m.min(items.len()) {
        combinations(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// `true` when the goal is m-reachable (the test is inconclusive), `false`
/// when the task provably has no plan.
pub fn goal_reachable<C: PathCost>(task: &Task<C>, m: usize) -> bool {
    assert!(m >= 1, "h^m needs m >= 1");
    let init: Vec<u32> = task.init.iter().map(|f| f.0).collect();
    let goal: Vec<u32> = task.goal.iter().map(|f| f.0).collect();
    let mut reach = Reach { m, reached: subsets_up_to(&init, m).into_iter().collect() };
    if reach.all_subsets_reached(&goal) {
        return true;
    }

    let mut changed = true;
    while changed {
        changed = false;
        for action in &task.actions {
            if !reach.all_subsets_reached(&action.pre_list) {
                continue;
            }
            // Fluents that may ride along unchanged through this action.
            let persistent: Vec<u32> = (0..task.fluents as u32)
                .filter(|&f| {
                    let id = crate::fluent_set::FluentId(f);
                    !action.add.contains(id) && !action.del.contains(id) && reach.reached.contains(&vec![f])
                })
                .collect();
            for added in subsets_up_to(&action.add_list, m) {
                let room = m - added.len();
                let mut extras: Vec<Tuple> = vec![Vec::new()];
                extras.extend(subsets_up_to(&persistent, room));
                for extra in extras {
                    let mut tuple: Tuple = added.iter().chain(&extra).copied().collect();
                    tuple.sort_unstable();
                    if reach.reached.contains(&tuple) {
                        continue;
                    }
                    if !extra.is_empty() {
                        let mut support = action.pre_list.clone();
                        support.extend(&extra);
                        support.sort_unstable();
                        support.dedup();
                        if !reach.all_subsets_reached(&support) {
                            continue;
                        }
                    }
                    reach.reached.insert(tuple);
                    changed = true;
                }
            }
        }
        if reach.all_subsets_reached(&goal) {
            return true;
        }
    }
    false
}
