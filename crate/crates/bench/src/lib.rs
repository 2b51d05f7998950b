//! Benchmark instances.

use std::collections::{BTreeMap, BTreeSet};

use foilwise_core::{ActionSpec, Cost, Model, ModelSpec, ModelTag};

/// A pair of models that differ in `n` preconditions.
///
/// Each of the `n` goals can be reached by a cheap `FAST_i` or a costly
/// `SLOW_i`. In the robot model `FAST_i` needs an unreachable `key_i`, so
/// reconciling the human's model with the robot's plan takes `n` edits.
pub fn gadgets(n: usize) -> (Model, Model) {
    let spec = |tag: ModelTag, locked: bool| {
        let mut fluents = BTreeSet::new();
        let mut actions = BTreeMap::new();
        let mut goal = BTreeSet::new();
        for i in 0..n {
            let (g, key) = (format!("g{i}"), format!("key{i}"));
            fluents.extend([g.clone(), key.clone()]);
            goal.insert(g.clone());
            let pre = if locked { BTreeSet::from([key]) } else { BTreeSet::new() };
            let add = BTreeSet::from([g]);
            actions.insert(format!("FAST_{i}"), ActionSpec { cost: Cost::integer(1), pre, add: add.clone(), del: BTreeSet::new() });
            actions.insert(format!("SLOW_{i}"), ActionSpec { cost: Cost::integer(3), pre: BTreeSet::new(), add, del: BTreeSet::new() });
        }
        let spec = ModelSpec {
            domain_name: "gadgets".into(),
            problem_name: format!("gadgets-{n}"),
            tag,
            fluents,
            actions,
            init: BTreeSet::new(),
            goal,
        };
        Model::from_spec(spec).expect("gadget models are well formed")
    };
    (spec(ModelTag::Robot, true), spec(ModelTag::Human, false))
}

#[cfg(test)]
mod tests {
    use foilwise_core::{diff, mce_search, Planner};

    use super::*;

    #[test]
    fn explanation_needs_every_difference() {
        let (robot, human) = gadgets(3);
        assert_eq!(diff(&robot, &human).len(), 3);
        let planner = Planner::default();
        let plan = planner.solve_optimal(&robot).plan().cloned().unwrap();
        assert_eq!(mce_search(&planner, &robot, &human, &plan).unwrap().len(), 3);
    }
}
