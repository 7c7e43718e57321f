//! Classification and puzzle solving.
//!
//! Classification buckets a partial labeled board by its completion count
//! using a two-witness search: not a partial Latin board, no completion,
//! exactly one (a Latin puzzle), more than one, or already complete. Two
//! witnesses are enough to separate unique from multiple, which keeps the
//! check exponentially cheaper than full enumeration.

use std::time::Duration;

use thiserror::Error;

use crate::model::{LatinBoard, PartialLabeledBoard};
use crate::proof::Proof;
use crate::search::{enumerate_solutions, SearchConfig, SearchStatus, SolutionLimit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassificationTag {
    /// Some asterism already exceeds a multiset count (or the board is not
    /// uniform for the multiset's `k`).
    NotPlb,
    /// A partial Latin board with no completion.
    NotCompletable,
    /// A Latin puzzle: exactly one completion.
    UniqueSolution,
    /// At least two completions.
    MultipleSolutions,
    /// The input is already a Latin board.
    AlreadyLatinBoard,
    /// A budget cap stopped the search before a verdict was reached.
    Indeterminate,
}

impl std::fmt::Display for ClassificationTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ClassificationTag::NotPlb => "NotPLB",
            ClassificationTag::NotCompletable => "NotCompletable",
            ClassificationTag::UniqueSolution => "UniqueSolution",
            ClassificationTag::MultipleSolutions => "MultipleSolutions",
            ClassificationTag::AlreadyLatinBoard => "AlreadyLatinBoard",
            ClassificationTag::Indeterminate => "Indeterminate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub tag: ClassificationTag,
    /// Completions seen before stopping (capped at two).
    pub solutions_found: u64,
    /// Up to two witness completions.
    pub witnesses: Vec<LatinBoard>,
}

impl Classification {
    pub fn is_unique(&self) -> bool {
        self.tag == ClassificationTag::UniqueSolution
    }
}

/// Optional cost caps for classification; exceeding one yields
/// [`ClassificationTag::Indeterminate`] with the evidence gathered so far.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClassifyBudget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

/// Classifies with a two-witness search and no cost caps.
pub fn classify(plb: &PartialLabeledBoard) -> Classification {
    classify_budgeted(plb, ClassifyBudget::default())
}

pub fn classify_budgeted(plb: &PartialLabeledBoard, budget: ClassifyBudget) -> Classification {
    if !plb.board().validate(plb.multiset().k()).is_valid() || !plb.is_partial_latin_board() {
        return Classification {
            tag: ClassificationTag::NotPlb,
            solutions_found: 0,
            witnesses: Vec::new(),
        };
    }
    if plb.is_latin_board() {
        let witness = LatinBoard::try_new(plb.clone()).expect("checked Latin board");
        return Classification {
            tag: ClassificationTag::AlreadyLatinBoard,
            solutions_found: 1,
            witnesses: vec![witness],
        };
    }
    let cfg = SearchConfig {
        limit: SolutionLimit::Finite(2),
        max_nodes: budget.max_nodes,
        max_time: budget.max_time,
        ..SearchConfig::default()
    };
    let result = enumerate_solutions(plb, &cfg);
    let found = result.solutions.len() as u64;
    let witnesses: Vec<LatinBoard> = result.solutions.iter().map(|s| s.board.clone()).collect();
    let tag = match (found, result.status) {
        (n, SearchStatus::Incomplete(_)) if n < 2 => ClassificationTag::Indeterminate,
        (0, _) => ClassificationTag::NotCompletable,
        (1, _) => ClassificationTag::UniqueSolution,
        _ => ClassificationTag::MultipleSolutions,
    };
    Classification {
        tag,
        solutions_found: found,
        witnesses,
    }
}

#[derive(Debug, Error, Clone)]
pub enum SolveError {
    #[error("input is not a Latin puzzle (classified {tag})")]
    NotAPuzzle { tag: ClassificationTag },
    #[error("budget exhausted before the input could be classified")]
    Indeterminate,
}

#[derive(Debug, Clone)]
pub struct SolvedPuzzle {
    pub solution: LatinBoard,
    /// Full proof of the solving run: propagation steps plus any search
    /// decisions, replayable against the puzzle.
    pub proof: Proof,
}

/// Solves a Latin puzzle: verifies uniqueness internally and returns the
/// single completion with its proof. A board that is already complete is
/// its own solution with an empty proof.
pub fn solve_puzzle(puzzle: &PartialLabeledBoard) -> Result<SolvedPuzzle, SolveError> {
    let cfg = SearchConfig::with_limit(SolutionLimit::Finite(2));
    let result = enumerate_solutions(puzzle, &cfg);
    if result.solutions.len() == 1 && result.is_complete() {
        let sol = result.solutions.into_iter().next().expect("one solution");
        return Ok(SolvedPuzzle {
            solution: sol.board,
            proof: sol.proof,
        });
    }
    let classification = classify(puzzle);
    match classification.tag {
        ClassificationTag::UniqueSolution | ClassificationTag::AlreadyLatinBoard => {
            unreachable!("two-witness search disagreed with classification")
        }
        ClassificationTag::Indeterminate => Err(SolveError::Indeterminate),
        tag => Err(SolveError::NotAPuzzle { tag }),
    }
}
