//! The bundled `firefight-mini` scenario, embedded so tests, benches and the
//! service can use it without touching the filesystem.

use crate::pddl::{load_manifest_str, read_foil, ParseOptions};
use crate::strips::Model;

pub const ROBOT_DOMAIN: &str = include_str!("../fixtures/firefight-mini/robot-domain.pddl");
pub const ROBOT_PROBLEM: &str = include_str!("../fixtures/firefight-mini/robot-problem.pddl");
pub const HUMAN_DOMAIN: &str = include_str!("../fixtures/firefight-mini/human-domain.pddl");
pub const HUMAN_PROBLEM: &str = include_str!("../fixtures/firefight-mini/human-problem.pddl");
pub const FOIL: &str = include_str!("../fixtures/firefight-mini/foil.txt");
/// Recorded reference dialogue; see `examples/record_fixture_dialogue.rs`.
pub const DIALOGUE: &str = include_str!("../fixtures/firefight-mini/dialogue.json");

/// Directory holding the fixture files, for tools that need real paths.
pub fn fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/firefight-mini")
}

/// `(robot, human)` models of the fire scenario.
pub fn firefight_models() -> (Model, Model) {
    load_manifest_str(ROBOT_DOMAIN, ROBOT_PROBLEM, HUMAN_DOMAIN, HUMAN_PROBLEM, ParseOptions::default())
        .expect("bundled fixture parses")
}

/// The four-action "why not both" foil.
pub fn firefight_foil() -> Vec<String> {
    read_foil(FOIL)
}

/// The recorded reference dialogue.
pub fn firefight_transcript() -> crate::dialogue::Transcript {
    serde_json::from_str(DIALOGUE).expect("bundled transcript parses")
}
