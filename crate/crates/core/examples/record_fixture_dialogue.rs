//! Records the reference dialogue over the bundled fixture.
//!
//! `cargo run -p foilwise-core --example record_fixture_dialogue` rewrites
//! `fixtures/firefight-mini/dialogue.json`.

use foilwise_core::dialogue::DialogueConfig;
use foilwise_core::fixtures::{fixture_dir, firefight_foil, firefight_models};
use foilwise_core::{Answer, DialogueSession, Operation, Strategy};

fn main() {
    let (robot, human) = firefight_models();
    let (mut session, _) = DialogueSession::new(robot, human, DialogueConfig::default()).expect("fixture is solvable");
    let foil = firefight_foil();
    let remove = |i: usize| Operation::Respond { answer: Answer::Remove { action: foil[i].clone() } };
    let script = vec![
        Operation::GetPlan,
        Operation::SubmitFoil { actions: foil.clone() },
        Operation::Explain,
        Operation::Accept { explanation: 1 },
        Operation::Refine { strategy: Strategy::Conflicts },
        remove(0),
        remove(2),
        Operation::SubmitFoil { actions: foil.clone() },
        Operation::Refine { strategy: Strategy::Plausible },
        Operation::Respond { answer: Answer::Choose { set: 3 } },
        Operation::SubmitFoil { actions: foil.clone() },
        Operation::Refine { strategy: Strategy::Closest },
        Operation::Accept { explanation: 7 },
        Operation::SubmitFoil { actions: vec![foil[2].clone()] },
        Operation::Explain,
        Operation::Accept { explanation: 2 },
        Operation::SubmitFoil { actions: vec![foil[0].clone(), foil[1].clone()] },
        Operation::Explain,
        Operation::Veto { explanation: 3 },
        Operation::SubmitFoil { actions: vec![foil[1].clone(), foil[0].clone()] },
        Operation::Respond { answer: Answer::Enforce },
        Operation::Cancel,
    ];
    for op in script {
        let _ = session.apply(op);
    }
    let path = fixture_dir().join("dialogue.json");
    let text = serde_json::to_string_pretty(session.transcript()).expect("transcript serializes");
    std::fs::write(&path, text + "\n").expect("fixture directory is writable");
    println!("wrote {}", path.display());
}
