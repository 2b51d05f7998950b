use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{parse_with_options, ParseOptions, PddlError};
use crate::strips::{Model, ModelTag};

/// Pairs the planner's model with the user's model of the same task.
/// Relative paths resolve against the manifest's own directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub robot_domain: PathBuf,
    pub robot_problem: PathBuf,
    pub human_domain: PathBuf,
    pub human_problem: PathBuf,
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

fn read(path: &Path) -> Result<String, PddlError> {
    fs::read_to_string(path).map_err(|e| PddlError::Io { path: path.display().to_string(), message: e.to_string() })
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<(Model, Model), PddlError> {
    load_manifest_with_options(path, ParseOptions::default())
}

pub fn load_manifest_with_options(path: impl AsRef<Path>, options: ParseOptions) -> Result<(Model, Model), PddlError> {
    let path = path.as_ref();
    let text = read(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| PddlError::Manifest(e.to_string()))?;
    let load = |p: &Path| read(&base.join(p));
    load_manifest_str(
        &load(&manifest.robot_domain)?,
        &load(&manifest.robot_problem)?,
        &load(&manifest.human_domain)?,
        &load(&manifest.human_problem)?,
        options,
    )
}

/// Parses both pairs, aligns their fluent vocabularies and checks that they
/// share initial state, goal and action names.
pub fn load_manifest_str(
    robot_domain: &str,
    robot_problem: &str,
    human_domain: &str,
    human_problem: &str,
    options: ParseOptions,
) -> Result<(Model, Model), PddlError> {
    let robot = parse_with_options(robot_domain, robot_problem, options)?;
    let human = parse_with_options(human_domain, human_problem, options)?;
    align(robot, human)
}

pub(crate) fn align(robot: Model, human: Model) -> Result<(Model, Model), PddlError> {
    let mut vocab: std::collections::BTreeSet<String> = robot.fluent_names().iter().cloned().collect();
    vocab.extend(human.fluent_names().iter().cloned());
    let robot = robot.realign(&vocab)?.with_tag(ModelTag::Robot);
    let human = human.realign(&vocab)?.with_tag(ModelTag::Human);
    if robot.init() != human.init() {
        return Err(PddlError::InitGoalMismatch("initial state"));
    }
    if robot.goal() != human.goal() {
        return Err(PddlError::InitGoalMismatch("goal"));
    }
    let names = |m: &Model| m.actions().iter().map(|a| a.name.clone()).collect::<std::collections::BTreeSet<_>>();
    let (ra, ha) = (names(&robot), names(&human));
    if let Some(diff) = ra.symmetric_difference(&ha).next() {
        return Err(PddlError::ActionVocabularyMismatch(diff.clone()));
    }
    Ok((robot, human))
}
