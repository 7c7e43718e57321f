//! Machine-checkable solving proofs.
//!
//! A proof is the ordered log of every deduction made while solving a
//! puzzle: which actor (a named propagator, or a search decision recorded
//! under the actor name `backtrack`) eliminated which candidates and placed
//! which labels. Proofs replay deterministically, certify fairness (no
//! `backtrack` step) and feed the difficulty rating.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::domain::{initial_domain, BoardDomain, CellDomain};
use crate::model::{CellId, Label, PartialLabeledBoard};

/// Reserved actor name for labels written by search decisions.
pub const BACKTRACK_ACTOR: &str = "backtrack";

/// Who performed a proof step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepActor {
    /// A registered polynomial propagator, by its stable name.
    Propagator(String),
    /// An exponential-search decision.
    Backtrack,
}

impl StepActor {
    pub fn name(&self) -> &str {
        match self {
            StepActor::Propagator(name) => name,
            StepActor::Backtrack => BACKTRACK_ACTOR,
        }
    }
}

impl fmt::Display for StepActor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One deduction: candidate eliminations and at most one placed label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub serial: u64,
    pub actor: StepActor,
    pub eliminations: Vec<(CellId, Label)>,
    pub placement: Option<(CellId, Label)>,
}

/// An ordered, strictly serial-increasing sequence of proof steps.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Proof {
    steps: Vec<ProofStep>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("puzzle is not a partial Latin board")]
    NotPartialLatin,
    #[error("serials not strictly increasing at step {index}")]
    SerialOrder { index: usize },
    #[error("step {serial} touches cell {cell}, which is not an empty cell of the puzzle")]
    UnknownCell { serial: u64, cell: CellId },
    #[error("step {serial} needs candidate {label} at cell {cell}, but it is not available")]
    MissingCandidate {
        serial: u64,
        cell: CellId,
        label: Label,
    },
    #[error("replay finished without completing the board")]
    Incomplete,
    #[error("replayed assignment is not a Latin board")]
    NotALatinBoard,
}

impl Proof {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<ProofStep>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[ProofStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub(crate) fn push(&mut self, step: ProofStep) {
        debug_assert!(self
            .steps
            .last()
            .is_none_or(|prev| prev.serial < step.serial));
        self.steps.push(step);
    }

    pub(crate) fn truncate(&mut self, len: usize) {
        self.steps.truncate(len);
    }

    /// True when any label was written by a search decision.
    pub fn has_backtrack(&self) -> bool {
        self.steps
            .iter()
            .any(|s| matches!(s.actor, StepActor::Backtrack))
    }

    /// Number of steps per actor name.
    pub fn histogram(&self) -> BTreeMap<String, u64> {
        let mut hist = BTreeMap::new();
        for step in &self.steps {
            *hist.entry(step.actor.name().to_string()).or_insert(0) += 1;
        }
        hist
    }

    /// Replays the proof on `puzzle` and returns the resulting total
    /// assignment. Every elimination must remove a present candidate,
    /// every placement must pick a remaining candidate, and the final
    /// board must be a Latin board.
    pub fn replay(&self, puzzle: &PartialLabeledBoard) -> Result<PartialLabeledBoard, ReplayError> {
        let mut domain = initial_domain(puzzle).map_err(|_| ReplayError::NotPartialLatin)?;
        let mut last_serial = None;
        for (index, step) in self.steps.iter().enumerate() {
            if let Some(prev) = last_serial {
                if step.serial <= prev {
                    return Err(ReplayError::SerialOrder { index });
                }
            }
            last_serial = Some(step.serial);
            for &(cell, label) in &step.eliminations {
                let mask = self.lookup(&domain, step.serial, cell)?;
                if !mask.contains(label) {
                    return Err(ReplayError::MissingCandidate {
                        serial: step.serial,
                        cell,
                        label,
                    });
                }
                let mut mask = mask;
                mask.remove(label);
                domain.set(cell, mask);
            }
            if let Some((cell, label)) = step.placement {
                let mask = self.lookup(&domain, step.serial, cell)?;
                if !mask.contains(label) {
                    return Err(ReplayError::MissingCandidate {
                        serial: step.serial,
                        cell,
                        label,
                    });
                }
                domain.set(cell, CellDomain::singleton(label));
            }
        }
        finish_replay(puzzle, &domain)
    }

    fn lookup(
        &self,
        domain: &BoardDomain,
        serial: u64,
        cell: CellId,
    ) -> Result<CellDomain, ReplayError> {
        domain
            .get(cell)
            .ok_or(ReplayError::UnknownCell { serial, cell })
    }
}

fn finish_replay(
    puzzle: &PartialLabeledBoard,
    domain: &BoardDomain,
) -> Result<PartialLabeledBoard, ReplayError> {
    let mut clues: Vec<(CellId, Label)> = puzzle.clues().collect();
    for (cell, mask) in domain.iter() {
        match mask.sole() {
            Some(label) => clues.push((cell, label)),
            None => return Err(ReplayError::Incomplete),
        }
    }
    let total = puzzle
        .with_clues(&clues)
        .map_err(|_| ReplayError::NotALatinBoard)?;
    if !total.is_latin_board() {
        return Err(ReplayError::NotALatinBoard);
    }
    Ok(total)
}
