mod common;

use foilwise_core::foil::{compile, CompileMode, Foil};
use foilwise_core::fixtures::{firefight_foil, firefight_models};
use foilwise_core::{Cost, Planner, SearchOutcome};
use proptest::prelude::*;

use common::{random_model, rng, Shape};

const SMALL: Shape = Shape { max_fluents: 8, max_actions: 10 };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn optimal_cost_matches_state_graph_oracle(seed in any::<u64>()) {
        let model = random_model(&mut rng(seed), SMALL);
        let expected = common::optimal_cost(&model.to_spec());
        let result = Planner::default().solve_optimal(&model);
        match (&result.outcome, expected) {
            (SearchOutcome::Plan { plan }, Some(cost)) => {
                prop_assert_eq!(plan.cost, cost);
                prop_assert_eq!(common::plan_cost(&model.to_spec(), &plan.steps), Some(cost));
            }
            (SearchOutcome::Unsolvable, None) => {}
            (outcome, expected) => prop_assert!(false, "planner {:?} vs oracle {:?}", outcome, expected),
        }
    }

    #[test]
    fn hm_pretest_is_sound_and_monotone(seed in any::<u64>()) {
        let model = random_model(&mut rng(seed), Shape::default());
        let planner = Planner::default();
        let solvable = common::solvable(&model.to_spec());
        let h1 = planner.hm_unsolvable(&model, 1);
        let h2 = planner.hm_unsolvable(&model, 2);
        prop_assert!(!(h1 && solvable));
        prop_assert!(!(h2 && solvable));
        prop_assert!(!h1 || h2, "m = 2 must prove whatever m = 1 proves");
        prop_assert_eq!(planner.decide_solvable(&model).unwrap(), solvable);
    }

    #[test]
    fn solving_is_deterministic(seed in any::<u64>()) {
        let model = random_model(&mut rng(seed), SMALL);
        let planner = Planner::default();
        prop_assert_eq!(planner.solve_optimal(&model).outcome, planner.solve_optimal(&model).outcome);
    }
}

#[test]
fn fixture_plan_uses_one_of_each_pair() {
    let (robot, _) = firefight_models();
    let plan = Planner::default().solve_optimal(&robot).plan().cloned().unwrap();
    let count = |names: &[&str]| names.iter().filter(|n| plan.contains(n)).count();
    assert_eq!(
        count(&["DEPLOY_SMALL_ENGINES_FIRECHIEF_ADMINFIRE_BYENG", "DEPLOY_BIG_ENGINES_FIRECHIEF_MESAFIRE_BYENG"]),
        1
    );
    assert_eq!(count(&["SEND_SOCIAL_MEDIA_BYENG_BYENG", "ADDRESS_MEDIA_FIRECHIEF"]), 1);
    assert!(robot.validate_goal(&plan.steps).unwrap().is_valid());
    assert_eq!(Planner::default().optimal_cost(&robot).unwrap(), Some(plan.cost));
}

#[test]
fn hard_foil_compilation_ladder() {
    let (robot, human) = firefight_models();
    let foil = Foil::new(firefight_foil());
    let planner = Planner::default();
    let hard_robot = compile(&robot, &foil, CompileMode::Hard).unwrap().model;
    // The foil is refuted only by delete interactions, which the delete
    // relaxation ignores; pairs of fluents catch it.
    assert!(!planner.hm_unsolvable(&hard_robot, 1));
    assert!(planner.hm_unsolvable(&hard_robot, 2));
    assert!(!planner.decide_solvable(&hard_robot).unwrap());
    assert_eq!(planner.optimal_cost(&hard_robot).unwrap(), None);
    let hard_human = compile(&human, &foil, CompileMode::Hard).unwrap().model;
    assert!(planner.decide_solvable(&hard_human).unwrap());
    assert!(!planner.hm_unsolvable(&hard_human, 2));
}

#[test]
fn zero_cost_cycles_terminate() {
    let mut spec = foilwise_core::ModelSpec {
        domain_name: "z".into(),
        problem_name: "z".into(),
        fluents: ["A", "B", "C"].iter().map(|s| s.to_string()).collect(),
        init: ["A"].iter().map(|s| s.to_string()).collect(),
        goal: ["C"].iter().map(|s| s.to_string()).collect(),
        ..Default::default()
    };
    let s = |x: &[&str]| x.iter().map(|v| v.to_string()).collect();
    for (n, pre, add, del, c) in [("AB", "A", "B", "A", 0), ("BA", "B", "A", "B", 0), ("BC", "B", "C", "", 2)] {
        spec.actions.insert(
            n.into(),
            foilwise_core::ActionSpec {
                cost: Cost::integer(c),
                pre: s(&[pre]),
                add: s(&[add]),
                del: if del.is_empty() { s(&[]) } else { s(&[del]) },
            },
        );
    }
    let model = foilwise_core::Model::from_spec(spec).unwrap();
    let plan = Planner::default().solve_optimal(&model).plan().cloned().unwrap();
    assert_eq!(plan.steps, vec!["AB", "BC"]);
}
