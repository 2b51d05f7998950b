//! Seeded instance generators and brute-force oracles shared by the
//! integration tests and the acceptance runner.
//!
//! The oracles work on [`ModelSpec`] name sets only and never call the
//! planner, the foil compiler or the model-space code they check.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};

use foilwise_core::{ActionSpec, Cost, Model, ModelSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type NameState = BTreeSet<String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_fluents: usize,
    pub max_actions: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_fluents: 12, max_actions: 12 }
    }
}

fn pick(rng: &mut ChaCha8Rng, fluents: &[String], lo: usize, hi: usize) -> BTreeSet<String> {
    let n = rng.gen_range(lo..=hi.min(fluents.len()));
    fluents.choose_multiple(rng, n).cloned().collect()
}

fn random_cost(rng: &mut ChaCha8Rng) -> Cost {
    match rng.gen_range(0..10) {
        0 => Cost::ZERO,
        1 => Cost::ratio(1, 2).unwrap(),
        2 => Cost::ratio(3, 2).unwrap(),
        _ => Cost::integer(rng.gen_range(1..=4)),
    }
}

pub fn random_spec(rng: &mut ChaCha8Rng, shape: Shape) -> ModelSpec {
    let nf = rng.gen_range(3..=shape.max_fluents);
    let na = rng.gen_range(1..=shape.max_actions);
    let fluents: Vec<String> = (0..nf).map(|i| format!("F{i}")).collect();
    let mut actions = BTreeMap::new();
    for i in 0..na {
        let pre = pick(rng, &fluents, 0, 2);
        let add = pick(rng, &fluents, 1, 3);
        let del: BTreeSet<String> = pick(rng, &fluents, 0, 2).difference(&add).cloned().collect();
        actions.insert(format!("ACT{i}"), ActionSpec { cost: random_cost(rng), pre, add, del });
    }
    let init = pick(rng, &fluents, 0, nf / 2 + 1);
    let goal = pick(rng, &fluents, 1, 3);
    ModelSpec {
        domain_name: "random".into(),
        problem_name: "random".into(),
        tag: Default::default(),
        fluents: fluents.into_iter().collect(),
        actions,
        init,
        goal,
    }
}

pub fn random_model(rng: &mut ChaCha8Rng, shape: Shape) -> Model {
    Model::from_spec(random_spec(rng, shape)).expect("generator respects model invariants")
}

/// Random observation sequence over the model's actions.
pub fn random_foil(rng: &mut ChaCha8Rng, spec: &ModelSpec, max_len: usize) -> Vec<String> {
    let names: Vec<&String> = spec.actions.keys().collect();
    let n = rng.gen_range(1..=max_len);
    (0..n).map(|_| (*names.choose(rng).unwrap()).clone()).collect()
}

// ---------------------------------------------------------------------------
// State-space oracles

fn step(a: &ActionSpec, s: &NameState) -> Option<NameState> {
    if !a.pre.is_subset(s) {
        return None;
    }
    let mut next: NameState = s.difference(&a.del).cloned().collect();
    next.extend(a.add.iter().cloned());
    Some(next)
}

/// Dijkstra over the explicit state graph.
pub fn optimal_cost(spec: &ModelSpec) -> Option<Cost> {
    let mut dist: HashMap<NameState, Cost> = HashMap::from([(spec.init.clone(), Cost::ZERO)]);
    let mut heap = BinaryHeap::from([Reverse((Cost::ZERO, spec.init.clone()))]);
    while let Some(Reverse((d, s))) = heap.pop() {
        if dist.get(&s).is_some_and(|&best| best < d) {
            continue;
        }
        if spec.goal.is_subset(&s) {
            return Some(d);
        }
        for a in spec.actions.values() {
            if let Some(t) = step(a, &s) {
                let nd = d + a.cost;
                if dist.get(&t).is_none_or(|&old| nd < old) {
                    dist.insert(t.clone(), nd);
                    heap.push(Reverse((nd, t)));
                }
            }
        }
    }
    None
}

pub fn reachable_states(spec: &ModelSpec) -> usize {
    let mut seen = HashSet::from([spec.init.clone()]);
    let mut queue = VecDeque::from([spec.init.clone()]);
    while let Some(s) = queue.pop_front() {
        for a in spec.actions.values() {
            if let Some(t) = step(a, &s) {
                if seen.insert(t.clone()) {
                    queue.push_back(t);
                }
            }
        }
    }
    seen.len()
}

pub fn solvable(spec: &ModelSpec) -> bool {
    let mut seen = HashSet::from([spec.init.clone()]);
    let mut queue = VecDeque::from([spec.init.clone()]);
    while let Some(s) = queue.pop_front() {
        if spec.goal.is_subset(&s) {
            return true;
        }
        for a in spec.actions.values() {
            if let Some(t) = step(a, &s) {
                if seen.insert(t.clone()) {
                    queue.push_back(t);
                }
            }
        }
    }
    false
}

/// Cheapest valid plan containing `foil` as an ordered subsequence, by
/// Dijkstra over (state, observations matched so far).
pub fn completion_cost(spec: &ModelSpec, foil: &[String]) -> Option<Cost> {
    let start = (spec.init.clone(), 0usize);
    let mut dist: HashMap<(NameState, usize), Cost> = HashMap::from([(start.clone(), Cost::ZERO)]);
    let mut heap = BinaryHeap::from([Reverse((Cost::ZERO, start))]);
    while let Some(Reverse((d, (s, k)))) = heap.pop() {
        if dist.get(&(s.clone(), k)).is_some_and(|&best| best < d) {
            continue;
        }
        if k == foil.len() && spec.goal.is_subset(&s) {
            return Some(d);
        }
        for (name, a) in &spec.actions {
            let Some(t) = step(a, &s) else { continue };
            let nd = d + a.cost;
            let mut targets = vec![k];
            if k < foil.len() && foil[k] == *name {
                targets.push(k + 1);
            }
            for nk in targets {
                let key = (t.clone(), nk);
                if dist.get(&key).is_none_or(|&old| nd < old) {
                    dist.insert(key.clone(), nd);
                    heap.push(Reverse((nd, key)));
                }
            }
        }
    }
    None
}

pub fn foil_feasible(spec: &ModelSpec, foil: &[String]) -> bool {
    completion_cost(spec, foil).is_some()
}

pub fn subsequence(foil: &[String], mask: u64) -> Vec<String> {
    foil.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, o)| o.clone()).collect()
}

pub fn mask_of(indices: &[usize]) -> u64 {
    indices.iter().fold(0, |m, &i| m | 1 << i)
}

/// Solvability of every observation subset, by bitmask.
pub fn subset_verdicts(spec: &ModelSpec, foil: &[String]) -> Vec<bool> {
    (0..1u64 << foil.len()).map(|m| foil_feasible(spec, &subsequence(foil, m))).collect()
}

/// Minimal unsolvable subsets, sorted by (size, indices).
pub fn minimal_conflicts(verdicts: &[bool], n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = (0..1u64 << n)
        .filter(|&m| !verdicts[m as usize])
        .filter(|&m| (0..n).filter(|i| m & (1 << i) != 0).all(|i| verdicts[(m & !(1 << i)) as usize]))
        .collect();
    out.sort_by_key(|&m| (m.count_ones(), indices_of(m)));
    out
}

/// Maximal solvable subsets, sorted by (descending size, indices).
pub fn maximal_plausible(verdicts: &[bool], n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = (0..1u64 << n)
        .filter(|&m| verdicts[m as usize])
        .filter(|&m| (0..n).filter(|i| m & (1 << i) == 0).all(|i| !verdicts[(m | 1 << i) as usize]))
        .collect();
    out.sort_by_key(|&m| (Reverse(m.count_ones()), indices_of(m)));
    out
}

pub fn indices_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1 << i) != 0).collect()
}

/// Lexicographic (fewest discards, then cheapest) closest plan value.
pub fn closest_value(spec: &ModelSpec, foil: &[String]) -> Option<(usize, Cost)> {
    (0..1u64 << foil.len())
        .filter_map(|m| {
            let discards = foil.len() - m.count_ones() as usize;
            completion_cost(spec, &subsequence(foil, m)).map(|c| (discards, c))
        })
        .min()
}

// ---------------------------------------------------------------------------
// Model-difference oracles

/// One slot where two models may disagree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Init(String),
    Goal(String),
    Pre(String, String),
    Add(String, String),
    Del(String, String),
    Cost(String),
}

fn member(spec: &ModelSpec, slot: &Slot) -> bool {
    match slot {
        Slot::Init(f) => spec.init.contains(f),
        Slot::Goal(f) => spec.goal.contains(f),
        Slot::Pre(a, f) => spec.actions[a].pre.contains(f),
        Slot::Add(a, f) => spec.actions[a].add.contains(f),
        Slot::Del(a, f) => spec.actions[a].del.contains(f),
        Slot::Cost(_) => unreachable!(),
    }
}

/// Slots where `base` and `reference` differ.
pub fn differing_slots(base: &ModelSpec, reference: &ModelSpec) -> Vec<Slot> {
    let mut out = Vec::new();
    for f in &reference.fluents {
        for slot in [Slot::Init(f.clone()), Slot::Goal(f.clone())] {
            if member(base, &slot) != member(reference, &slot) {
                out.push(slot);
            }
        }
        for a in reference.actions.keys() {
            for slot in [Slot::Pre(a.clone(), f.clone()), Slot::Add(a.clone(), f.clone()), Slot::Del(a.clone(), f.clone())] {
                if member(base, &slot) != member(reference, &slot) {
                    out.push(slot);
                }
            }
        }
    }
    for (a, ra) in &reference.actions {
        if base.actions[a].cost != ra.cost {
            out.push(Slot::Cost(a.clone()));
        }
    }
    out
}

/// The edit rendering the library is expected to produce for a slot.
pub fn render(base: &ModelSpec, reference: &ModelSpec, slot: &Slot) -> String {
    let verb = |present: bool| if present { "add" } else { "remove" };
    match slot {
        Slot::Init(f) => format!("{} init-has-{f}", verb(reference.init.contains(f))),
        Slot::Goal(f) => format!("{} goal-has-{f}", verb(reference.goal.contains(f))),
        Slot::Pre(a, f) => format!("{} {a}-has-precondition-{f}", verb(reference.actions[a].pre.contains(f))),
        Slot::Add(a, f) => format!("{} {a}-has-add-effect-{f}", verb(reference.actions[a].add.contains(f))),
        Slot::Del(a, f) => format!("{} {a}-has-del-effect-{f}", verb(reference.actions[a].del.contains(f))),
        Slot::Cost(a) => {
            let _ = base;
            format!("add {a}-has-cost-{}", reference.actions[a].cost)
        }
    }
}

/// `base` with the chosen slots copied from `reference`; `None` if that
/// leaves an action adding and deleting the same fluent.
pub fn copy_slots(base: &ModelSpec, reference: &ModelSpec, slots: &[Slot]) -> Option<ModelSpec> {
    let mut out = base.clone();
    let set = |target: &mut BTreeSet<String>, f: &String, on: bool| {
        if on {
            target.insert(f.clone());
        } else {
            target.remove(f);
        }
    };
    for slot in slots {
        match slot {
            Slot::Init(f) => set(&mut out.init, f, reference.init.contains(f)),
            Slot::Goal(f) => set(&mut out.goal, f, reference.goal.contains(f)),
            Slot::Pre(a, f) => set(&mut out.actions.get_mut(a).unwrap().pre, f, reference.actions[a].pre.contains(f)),
            Slot::Add(a, f) => set(&mut out.actions.get_mut(a).unwrap().add, f, reference.actions[a].add.contains(f)),
            Slot::Del(a, f) => set(&mut out.actions.get_mut(a).unwrap().del, f, reference.actions[a].del.contains(f)),
            Slot::Cost(a) => out.actions.get_mut(a).unwrap().cost = reference.actions[a].cost,
        }
    }
    let clean = out.actions.values().all(|a| a.add.is_disjoint(&a.del));
    clean.then_some(out)
}

/// Minimum-cardinality slot subset passing `goal`, ties broken by sorted
/// rendering. Returns the sorted renderings.
pub fn brute_force_minimum(
    base: &ModelSpec,
    reference: &ModelSpec,
    goal: impl Fn(&ModelSpec) -> bool,
) -> Option<Vec<String>> {
    let slots = differing_slots(base, reference);
    let mut best: Option<Vec<String>> = None;
    for mask in 0..1u64 << slots.len() {
        let chosen: Vec<Slot> = indices_of(mask).into_iter().map(|i| slots[i].clone()).collect();
        if best.as_ref().is_some_and(|b| b.len() < chosen.len()) {
            continue;
        }
        let Some(candidate) = copy_slots(base, reference, &chosen) else { continue };
        if !goal(&candidate) {
            continue;
        }
        let mut rendered: Vec<String> = chosen.iter().map(|s| render(base, reference, s)).collect();
        rendered.sort();
        let better = match &best {
            None => true,
            Some(b) => (rendered.len(), &rendered) < (b.len(), b),
        };
        if better {
            best = Some(rendered);
        }
    }
    best
}

/// Perturbs up to `max_edits` slots of `robot` to obtain a human model.
pub fn perturb(rng: &mut ChaCha8Rng, robot: &ModelSpec, max_edits: usize) -> ModelSpec {
    let mut human = robot.clone();
    let fluents: Vec<String> = robot.fluents.iter().cloned().collect();
    let actions: Vec<String> = robot.actions.keys().cloned().collect();
    let edits = rng.gen_range(0..=max_edits);
    let mut applied = 0;
    let mut attempts = 0;
    while applied < edits && attempts < 50 {
        attempts += 1;
        let f = fluents.choose(rng).unwrap().clone();
        let a = actions.choose(rng).unwrap().clone();
        let toggle = |s: &mut BTreeSet<String>| {
            if !s.remove(&f) {
                s.insert(f.clone());
            }
        };
        let before = human.clone();
        match rng.gen_range(0..12) {
            0 => toggle(&mut human.init),
            1 => toggle(&mut human.goal),
            2..=4 => toggle(&mut human.actions.get_mut(&a).unwrap().pre),
            5..=7 => toggle(&mut human.actions.get_mut(&a).unwrap().add),
            8..=10 => toggle(&mut human.actions.get_mut(&a).unwrap().del),
            _ => {
                let c = human.actions.get_mut(&a).unwrap();
                c.cost += Cost::ONE;
            }
        }
        let ok = human.actions.values().all(|x| x.add.is_disjoint(&x.del)) && !human.goal.is_empty();
        if !ok || differing_slots(&human, robot).len() <= differing_slots(&before, robot).len() {
            human = before;
            continue;
        }
        applied += 1;
    }
    human
}

/// Validity and cost of a step sequence.
pub fn plan_cost(spec: &ModelSpec, steps: &[String]) -> Option<Cost> {
    let mut s = spec.init.clone();
    let mut cost = Cost::ZERO;
    for name in steps {
        let a = spec.actions.get(name)?;
        s = step(a, &s)?;
        cost += a.cost;
    }
    spec.goal.is_subset(&s).then_some(cost)
}

/// Whether `sub` occurs in `seq` as an ordered subsequence.
pub fn is_subsequence(sub: &[String], seq: &[String]) -> bool {
    let mut it = seq.iter();
    sub.iter().all(|x| it.any(|y| y == x))
}
