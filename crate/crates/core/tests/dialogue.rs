use foilwise_core::dialogue::{DialogueConfig, Pending};
use foilwise_core::fixtures::{firefight_foil, firefight_models, firefight_transcript, DIALOGUE};
use foilwise_core::{replay, Answer, DialogueSession, Operation, Response, Strategy};

fn session() -> DialogueSession {
    let (robot, human) = firefight_models();
    DialogueSession::new(robot, human, DialogueConfig::default()).unwrap().0
}

#[test]
fn recorded_dialogue_replays_byte_identically() {
    let transcript = firefight_transcript();
    assert_eq!(transcript.entries.len(), 22);
    let (robot, human) = firefight_models();
    let report = replay(robot, human, DialogueConfig::default(), &transcript);
    assert!(report.is_identical(), "{:#?}", report.mismatches);

    // Re-running the operations reproduces the file itself.
    let mut s = session();
    for entry in &transcript.entries {
        let _ = s.apply(entry.operation.clone());
    }
    assert_eq!(serde_json::to_string_pretty(s.transcript()).unwrap() + "\n", DIALOGUE);
}

#[test]
fn tampered_transcript_is_reported() {
    let mut transcript = firefight_transcript();
    transcript.entries[2].response["edits"][0] = "add something-else".into();
    let (robot, human) = firefight_models();
    let report = replay(robot, human, DialogueConfig::default(), &transcript);
    assert_eq!(report.mismatches.len(), 1);
    assert_eq!(report.mismatches[0].step, 3);
}

#[test]
fn explain_accept_then_resolve_both_conflicts() {
    let mut s = session();
    let foil = firefight_foil();
    s.apply(Operation::SubmitFoil { actions: foil.clone() }).unwrap();
    let Response::Explanation { id, edits, .. } = s.apply(Operation::Explain).unwrap() else { panic!() };
    assert_eq!(edits, vec!["add SEND_SOCIAL_MEDIA_BYENG_BYENG-has-del-effect-NO_SOCIAL_MEDIA"]);
    s.apply(Operation::Accept { explanation: id }).unwrap();
    s.apply(Operation::SubmitFoil { actions: foil.clone() }).unwrap();
    s.apply(Operation::Refine { strategy: Strategy::Conflicts }).unwrap();
    s.apply(Operation::Respond { answer: Answer::Remove { action: foil[0].clone() } }).unwrap();
    let Response::Refined { plan } =
        s.apply(Operation::Respond { answer: Answer::Remove { action: foil[2].clone() } }).unwrap()
    else {
        panic!()
    };
    assert_eq!(plan.used(), vec![1, 3]);
    assert!(s.current_plan().contains(&foil[1]) && s.current_plan().contains(&foil[3]));
    assert_eq!(s.pending(), &Pending::None);
}

#[test]
fn operations_round_trip_through_json() {
    for op in firefight_transcript().entries.iter().map(|e| &e.operation) {
        let text = serde_json::to_string(op).unwrap();
        assert_eq!(&serde_json::from_str::<Operation>(&text).unwrap(), op);
    }
    let op: Operation = serde_json::from_str(r#"{"op":"refine","strategy":"plausible"}"#).unwrap();
    assert_eq!(op, Operation::Refine { strategy: Strategy::Plausible });
}
