mod common;

use foilwise_core::fixtures::{firefight_foil, firefight_models};
use foilwise_core::foil::{closest_plan, compile, foil_feasible, suboptimality_report, CompileMode, Provenance};
use foilwise_core::subsets::{resolve_and_plan, SubsetExplorer, VerdictMemo};
use foilwise_core::{Cost, EngineError, Foil, Planner};
use proptest::prelude::*;

use common::{random_foil, random_model, rng, Shape};

const SHAPE: Shape = Shape { max_fluents: 8, max_actions: 8 };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn foil_feasibility_matches_product_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_model(&mut r, SHAPE);
        let spec = model.to_spec();
        let foil = random_foil(&mut r, &spec, 6);
        let planner = Planner::default();
        prop_assert_eq!(foil_feasible(&planner, &model, &Foil::new(foil.clone())).unwrap(), common::foil_feasible(&spec, &foil));
    }

    #[test]
    fn closest_plan_is_lexicographically_optimal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_model(&mut r, SHAPE);
        let spec = model.to_spec();
        let foil = random_foil(&mut r, &spec, 6);
        let planner = Planner::default();
        let result = closest_plan(&planner, &model, &Foil::new(foil.clone()));
        match common::closest_value(&spec, &foil) {
            None => prop_assert_eq!(result.unwrap_err(), EngineError::BaseUnsolvable),
            Some((discards, cost)) => {
                let closest = result.unwrap();
                prop_assert_eq!(closest.discarded.len(), discards);
                prop_assert_eq!(closest.plan.cost, cost);
                // Projection validity and ordering preservation.
                prop_assert_eq!(common::plan_cost(&spec, &closest.plan.steps), Some(cost));
                let used: Vec<String> = closest.used.iter().map(|&i| foil[i].clone()).collect();
                let marked: Vec<String> = closest.steps.iter().filter(|s| s.provenance == Provenance::UsedFoil).map(|s| s.action.clone()).collect();
                prop_assert_eq!(&used, &marked);
                prop_assert!(common::is_subsequence(&used, &closest.plan.steps));
                let mut all: Vec<usize> = closest.used.iter().chain(&closest.discarded).copied().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..foil.len()).collect::<Vec<_>>());
                // Mode consistency.
                let feasible = foil_feasible(&planner, &model, &Foil::new(foil.clone())).unwrap();
                prop_assert_eq!(feasible, discards == 0);
            }
        }
    }

    #[test]
    fn enumerations_match_exhaustive_oracle_and_are_dual(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_model(&mut r, SHAPE);
        let spec = model.to_spec();
        if !common::solvable(&spec) {
            return Ok(());
        }
        let foil = random_foil(&mut r, &spec, 6);
        let n = foil.len();
        let verdicts = common::subset_verdicts(&spec, &foil);
        let planner = Planner::default();
        let as_foil = Foil::new(foil.clone());
        let memo = VerdictMemo::new();
        let explorer = SubsetExplorer::new(&planner, &model, &as_foil, &memo).unwrap();
        let conflicts: Vec<u64> = explorer.conflict_sets().unwrap().iter().map(|c| c.mask()).collect();
        let plausible: Vec<u64> = explorer.plausible_sets().unwrap().iter().map(|p| p.mask()).collect();
        prop_assert_eq!(&conflicts, &common::minimal_conflicts(&verdicts, n));
        prop_assert_eq!(&plausible, &common::maximal_plausible(&verdicts, n));
        // Maximal subsets hitting no conflict are exactly the plausible sets.
        let avoids = |m: u64| conflicts.iter().all(|&c| m & c != c);
        let mut dual: Vec<u64> = (0..1u64 << n)
            .filter(|&m| avoids(m) && (0..n).filter(|i| m & (1 << i) == 0).all(|i| !avoids(m | 1 << i)))
            .collect();
        dual.sort_by_key(|&m| (std::cmp::Reverse(m.count_ones()), common::indices_of(m)));
        prop_assert_eq!(&plausible, &dual);
    }

    #[test]
    fn resolving_a_plausible_set_keeps_it(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_model(&mut r, SHAPE);
        let spec = model.to_spec();
        if !common::solvable(&spec) {
            return Ok(());
        }
        let foil = Foil::new(random_foil(&mut r, &spec, 5));
        let planner = Planner::default();
        let memo = VerdictMemo::new();
        let sets = SubsetExplorer::new(&planner, &model, &foil, &memo).unwrap().plausible_sets().unwrap();
        for set in sets {
            let plan = resolve_and_plan(&planner, &model, &foil, &set.indices).unwrap();
            prop_assert_eq!(plan.used(), set.indices.clone());
            prop_assert!(common::is_subsequence(&set.actions, &plan.plan.steps));
            prop_assert_eq!(Some(plan.plan.cost), common::completion_cost(&spec, &set.actions));
        }
    }
}

#[test]
fn fixture_enumerations_and_closest_plan() {
    let (robot, _) = firefight_models();
    let foil = Foil::new(firefight_foil());
    let planner = Planner::default();
    let spec = robot.to_spec();
    let verdicts = common::subset_verdicts(&spec, &foil.observations);
    let memo = VerdictMemo::new();
    let explorer = SubsetExplorer::new(&planner, &robot, &foil, &memo).unwrap();
    let conflicts = explorer.conflict_sets().unwrap();
    assert_eq!(
        conflicts.iter().map(|c| c.actions.clone()).collect::<Vec<_>>(),
        vec![
            vec!["DEPLOY_SMALL_ENGINES_FIRECHIEF_ADMINFIRE_BYENG", "DEPLOY_BIG_ENGINES_FIRECHIEF_MESAFIRE_BYENG"],
            vec!["SEND_SOCIAL_MEDIA_BYENG_BYENG", "ADDRESS_MEDIA_FIRECHIEF"],
        ]
    );
    assert!(conflicts.iter().all(|c| !c.cannot_complete));
    let plausible: Vec<u64> = explorer.plausible_sets().unwrap().iter().map(|p| p.mask()).collect();
    assert_eq!(plausible, common::maximal_plausible(&verdicts, 4));

    let closest = closest_plan(&planner, &robot, &foil).unwrap();
    assert_eq!(closest.used.len(), 2);
    assert_eq!(Some((closest.discarded.len(), closest.plan.cost)), common::closest_value(&spec, &foil.observations));

    let kept = resolve_and_plan(&planner, &robot, &foil, &[1, 3]).unwrap();
    let steps = &kept.plan.steps;
    let big = steps.iter().position(|s| s == "DEPLOY_BIG_ENGINES_FIRECHIEF_MESAFIRE_BYENG").unwrap();
    let media = steps.iter().position(|s| s == "ADDRESS_MEDIA_FIRECHIEF").unwrap();
    assert!(big < media);
    assert_eq!(resolve_and_plan(&planner, &robot, &foil, &[]).unwrap().plan, planner.solve_optimal(&robot).plan().cloned().unwrap());
}

#[test]
fn singleton_conflicts_are_flagged() {
    let (robot, _) = firefight_models();
    let planner = Planner::default();
    // Reassigning engines needs social media without losing the no-social
    // flag, which the planner's model never allows.
    let foil = Foil::new(["REASSIGN_ENGINES_FIRECHIEF", "ADDRESS_MEDIA_FIRECHIEF"]);
    let memo = VerdictMemo::new();
    let conflicts = SubsetExplorer::new(&planner, &robot, &foil, &memo).unwrap().conflict_sets().unwrap();
    assert_eq!(conflicts.len(), 1);
    assert_eq!(conflicts[0].indices, vec![0]);
    assert!(conflicts[0].cannot_complete);
}

#[test]
fn feasible_foil_has_no_conflicts_and_one_plausible_set() {
    let (robot, _) = firefight_models();
    let planner = Planner::default();
    let foil = Foil::new(["CORDON_AREA_FIRECHIEF"]);
    let memo = VerdictMemo::new();
    let explorer = SubsetExplorer::new(&planner, &robot, &foil, &memo).unwrap();
    assert!(explorer.conflict_sets().unwrap().is_empty());
    let plausible = explorer.plausible_sets().unwrap();
    assert_eq!(plausible.len(), 1);
    assert_eq!(plausible[0].indices, vec![0]);
}

#[test]
fn suboptimality_of_a_lone_address_media_foil() {
    let (robot, _) = firefight_models();
    let planner = Planner::default();
    let foil = Foil::new(["ADDRESS_MEDIA_FIRECHIEF"]);
    let report = suboptimality_report(&planner, &robot, &foil).unwrap();
    let hard = compile(&robot, &foil, CompileMode::Hard).unwrap();
    let completion = planner.optimal_cost(&hard.model).unwrap().unwrap();
    assert_eq!(report.cost_of_best_completion, completion);
    assert_eq!(report.delta, completion - planner.optimal_cost(&robot).unwrap().unwrap());
    let empty = suboptimality_report(&planner, &robot, &Foil::default()).unwrap();
    assert_eq!(empty.delta, Cost::ZERO);
    assert_eq!(
        suboptimality_report(&planner, &robot, &Foil::new(firefight_foil())),
        Err(EngineError::FoilInfeasible)
    );
}
