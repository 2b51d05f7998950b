//! PDDL input/output: the supported subset, model serialization, paired
//! robot/human manifests, and the plan and foil text formats.

mod manifest;
mod parse;
mod sexpr;
mod write;

use std::fmt;

pub use manifest::{load_manifest, load_manifest_str, load_manifest_with_options, Manifest};
pub use parse::{ground_symbol, parse_domain_problem, parse_with_options, ParseOptions, DEFAULT_GROUNDING_CAP};
pub use write::{serialize_model, PddlDocuments};

use crate::cost::Cost;
use crate::strips::{ModelError, Plan};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Document {
    Domain,
    Problem,
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Document::Domain => "domain",
            Document::Problem => "problem",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PddlError {
    #[error("{doc} {line}:{col}: {message}")]
    Syntax { doc: Document, line: usize, col: usize, message: String },
    #[error("unsupported PDDL feature `{0}`")]
    UnsupportedFeature(String),
    #[error("grounding would produce {count} actions, above the cap of {cap}")]
    GroundingExplosion { count: u128, cap: usize },
    #[error("two different groundings map to the symbol `{0}`")]
    SymbolCollision(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("malformed manifest: {0}")]
    Manifest(String),
    #[error("robot and human models disagree on the {0}")]
    InitGoalMismatch(&'static str),
    #[error("robot and human models ground different action sets (first difference: `{0}`)")]
    ActionVocabularyMismatch(String),
}

impl PddlError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            PddlError::Syntax { .. } => "syntax_error",
            PddlError::UnsupportedFeature(_) => "unsupported_feature",
            PddlError::GroundingExplosion { .. } => "grounding_explosion",
            PddlError::SymbolCollision(_) => "symbol_collision",
            PddlError::Model(_) => "invalid_model",
            PddlError::Io { .. } => "io_error",
            PddlError::Manifest(_) => "malformed_manifest",
            PddlError::InitGoalMismatch(_) => "init_goal_mismatch",
            PddlError::ActionVocabularyMismatch(_) => "action_vocabulary_mismatch",
        }
    }
}

/// Renders a plan: one action per line followed by `; cost = <rational>`.
pub fn write_plan(plan: &Plan) -> String {
    let mut out = String::new();
    for step in &plan.steps {
        out.push_str(step);
        out.push('\n');
    }
    out.push_str(&format!("; cost = {}\n", plan.cost));
    out
}

/// Reads a plan file. Returns the steps and, when present, the recorded cost.
pub fn read_plan(text: &str) -> Result<(Vec<String>, Option<Cost>), PddlError> {
    let mut steps = Vec::new();
    let mut cost = None;
    for line in text.lines() {
        let line = line.trim();
        if let Some(comment) = line.strip_prefix(';') {
            if let Some(v) = comment.trim().strip_prefix("cost =") {
                cost = Some(v.trim().parse().map_err(|e: crate::cost::CostError| PddlError::Manifest(e.to_string()))?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        // Tolerate planner-style `(action)` lines.
        let bare = line.trim_start_matches('(').trim_end_matches(')').trim();
        steps.push(bare.to_string());
    }
    Ok((steps, cost))
}

/// Reads a foil file: one action name per line, order significant, `#` comments.
pub fn read_foil(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_text_round_trip() {
        let plan = Plan { steps: vec!["A".into(), "B_C".into()], cost: Cost::ratio(7, 2).unwrap() };
        let text = write_plan(&plan);
        assert_eq!(text, "A\nB_C\n; cost = 7/2\n");
        assert_eq!(read_plan(&text).unwrap(), (plan.steps.clone(), Some(plan.cost)));
    }

    #[test]
    fn foil_file_skips_comments() {
        let foil = read_foil("# why not these?\nDEPLOY_X\n\n  ADDRESS_Y  # keep this\n");
        assert_eq!(foil, vec!["DEPLOY_X", "ADDRESS_Y"]);
    }
}
