//! Minimal conflict sets and maximal plausible sets of a foil.
//!
//! A subset of observations is judged by whether its hard compilation (the
//! observations kept in foil order) has a plan. That verdict is monotone: if a
//! subsequence has a completion, so does every subsequence of it. Conflict
//! sets are found bottom-up, skipping supersets of known conflicts; plausible
//! sets top-down, skipping subsets of known plausible sets.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::foil::{best_completion, compile, AnnotatedPlan, CompileMode, Foil};
use crate::planner::Planner;
use crate::strips::Model;

pub const DEFAULT_FOIL_CAP: usize = 12;
/// Hard ceiling imposed by the bitmask encoding.
pub const MAX_FOIL_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetStatus {
    Conflict,
    Plausible,
}

/// An ordered subset of foil observations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoilSubset {
    pub status: SubsetStatus,
    pub indices: Vec<usize>,
    pub actions: Vec<String>,
    /// Set on single-action conflicts: that action alone admits no valid
    /// completion.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub cannot_complete: bool,
}

impl FoilSubset {
    fn new(status: SubsetStatus, mask: u64, foil: &Foil) -> FoilSubset {
        let indices = mask_indices(mask);
        let actions = indices.iter().map(|&i| foil.observations[i].clone()).collect();
        let cannot_complete = status == SubsetStatus::Conflict && indices.len() == 1;
        FoilSubset { status, indices, actions, cannot_complete }
    }

    pub fn mask(&self) -> u64 {
        self.indices.iter().fold(0, |m, &i| m | 1 << i)
    }
}

fn mask_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1 << i) != 0).collect()
}

/// Solvability verdicts by observation bitmask, for one fixed model and foil.
/// Safe to share between threads and across enumerations.
#[derive(Debug, Default)]
pub struct VerdictMemo {
    verdicts: RwLock<HashMap<u64, bool>>,
    planner_calls: AtomicU64,
}

impl VerdictMemo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn planner_calls(&self) -> u64 {
        self.planner_calls.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.verdicts.read().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, mask: u64) -> Option<bool> {
        self.verdicts.read().expect("memo lock").get(&mask).copied()
    }

    fn insert(&self, mask: u64, verdict: bool) {
        self.verdicts.write().expect("memo lock").entry(mask).or_insert(verdict);
    }
}

/// k-subsets of `0..n` as masks, in lexicographic order of their index lists.
fn layer(n: usize, k: usize) -> Vec<u64> {
    fn go(n: usize, k: usize, start: usize, acc: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..=n.saturating_sub(k) {
            go(n, k - 1, i + 1, acc | 1 << i, out);
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(n, k, 0, 0, &mut out);
    }
    out
}

pub struct SubsetExplorer<'a> {
    planner: &'a Planner,
    model: &'a Model,
    foil: &'a Foil,
    memo: &'a VerdictMemo,
}

impl<'a> SubsetExplorer<'a> {
    pub fn new(planner: &'a Planner, model: &'a Model, foil: &'a Foil, memo: &'a VerdictMemo) -> Result<Self, EngineError> {
        Self::with_cap(planner, model, foil, memo, DEFAULT_FOIL_CAP)
    }

    pub fn with_cap(
        planner: &'a Planner,
        model: &'a Model,
        foil: &'a Foil,
        memo: &'a VerdictMemo,
        cap: usize,
    ) -> Result<Self, EngineError> {
        let cap = cap.min(MAX_FOIL_CAP);
        if foil.len() > cap {
            return Err(EngineError::FoilTooLarge { len: foil.len(), cap });
        }
        foil.check_against(model)?;
        Ok(SubsetExplorer { planner, model, foil, memo })
    }

    /// Whether the observations in `mask` admit a valid completion.
    pub fn solvable(&self, mask: u64) -> Result<bool, EngineError> {
        if let Some(v) = self.memo.get(mask) {
            return Ok(v);
        }
        let sub = self.foil.subsequence(&mask_indices(mask))?;
        let compiled = compile(self.model, &sub, CompileMode::Hard)?;
        self.memo.planner_calls.fetch_add(1, Ordering::Relaxed);
        let verdict = self.planner.decide_solvable(&compiled.model)?;
        self.memo.insert(mask, verdict);
        Ok(verdict)
    }

    fn verdicts(&self, candidates: &[u64]) -> Result<Vec<bool>, EngineError> {
        candidates.par_iter().map(|&m| self.solvable(m)).collect()
    }

    /// All minimal conflict sets, by cardinality and then foil position.
    pub fn conflict_sets(&self) -> Result<Vec<FoilSubset>, EngineError> {
        if !self.solvable(0)? {
            return Err(EngineError::EmptySetConflict);
        }
        let mut found: Vec<u64> = Vec::new();
        for k in 1..=self.foil.len() {
            let candidates: Vec<u64> =
                layer(self.foil.len(), k).into_iter().filter(|&m| !found.iter().any(|&c| c & !m == 0)).collect();
            let verdicts = self.verdicts(&candidates)?;
            found.extend(candidates.iter().zip(verdicts).filter(|(_, ok)| !ok).map(|(&m, _)| m));
        }
        Ok(found.into_iter().map(|m| FoilSubset::new(SubsetStatus::Conflict, m, self.foil)).collect())
    }

    /// All maximal plausible sets, by decreasing cardinality and then foil
    /// position.
    pub fn plausible_sets(&self) -> Result<Vec<FoilSubset>, EngineError> {
        let mut found: Vec<u64> = Vec::new();
        for k in (0..=self.foil.len()).rev() {
            let candidates: Vec<u64> =
                layer(self.foil.len(), k).into_iter().filter(|&m| !found.iter().any(|&p| m & p == m)).collect();
            let verdicts = self.verdicts(&candidates)?;
            found.extend(candidates.iter().zip(verdicts).filter(|(_, ok)| *ok).map(|(&m, _)| m));
        }
        if found.is_empty() {
            return Err(EngineError::EmptySetConflict);
        }
        Ok(found.into_iter().map(|m| FoilSubset::new(SubsetStatus::Plausible, m, self.foil)).collect())
    }
}

pub fn conflict_sets(planner: &Planner, model: &Model, foil: &Foil) -> Result<Vec<FoilSubset>, EngineError> {
    let memo = VerdictMemo::new();
    SubsetExplorer::new(planner, model, foil, &memo)?.conflict_sets()
}

pub fn plausible_sets(planner: &Planner, model: &Model, foil: &Foil) -> Result<Vec<FoilSubset>, EngineError> {
    let memo = VerdictMemo::new();
    SubsetExplorer::new(planner, model, foil, &memo)?.plausible_sets()
}

/// Cheapest valid plan containing the `kept` observations in foil order.
pub fn resolve_and_plan(planner: &Planner, model: &Model, foil: &Foil, kept: &[usize]) -> Result<AnnotatedPlan, EngineError> {
    let mut kept = kept.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let sub = foil.subsequence(&kept)?;
    let mut plan = best_completion(planner, model, &sub)?.ok_or_else(|| EngineError::InfeasibleSelection(kept.clone()))?;
    // Observation indices refer to the subsequence; map them to the foil.
    for step in &mut plan.steps {
        if let Some(i) = step.observation.as_mut() {
            *i = kept[*i];
        }
    }
    Ok(plan)
}
