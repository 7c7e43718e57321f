//! Puzzle generation.
//!
//! Three routes produce Latin puzzles:
//!
//! - from a complete Latin board, by greedy clue removal: every removal
//!   that keeps the completion unique is kept and dug deeper, every other
//!   is restored — yielding a chain of ever-harder puzzles whose last
//!   element is critical;
//! - from a partial labeled board, by enumerating up to `n` of its
//!   completions and chaining each;
//! - in a single instrumented search pass: every label write is tagged,
//!   and a tag appearing on exactly one solution's path marks an ancestor
//!   state completable only to that solution. Each candidate is re-verified
//!   by classification before being emitted, so correctness does not rest
//!   on the tag-uniqueness argument.
//!
//! Inscription pairs are never removal candidates and appear among the
//! clues of every emitted puzzle.

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{
    CellId, Inscription, Label, LatinBoard, ModelError, PartialLabeledBoard,
};
use crate::proof::Proof;
use crate::propagate::default_propagators;
use crate::rating::{certify_fair, rate, DifficultyBand, DifficultyRating, FairnessVerdict};
use crate::search::{enumerate_solutions, SearchConfig, SolutionLimit, Tag};
use crate::solve::{classify, ClassificationTag};

/// The tag trail from the seed board to a solution; prefix-closed within
/// one generation run and strictly serial-increasing.
pub type TagSequence = Vec<Tag>;

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("solution limit must be positive")]
    ZeroLimit,
    #[error("inscription pair at cell {cell} disagrees with the board")]
    InscriptionMismatch { cell: CellId },
    #[error("single-pass generation requires an exhaustive search, but a budget cap stopped it")]
    ExhaustionRequired,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A generated puzzle with its solution, solving proof, fairness flag,
/// criticality flag and difficulty rating.
#[derive(Debug, Clone)]
pub struct GeneratedPuzzle {
    pub puzzle: PartialLabeledBoard,
    pub solution: LatinBoard,
    pub proof: Proof,
    pub fair: bool,
    pub critical: bool,
    pub rating: DifficultyRating,
}

/// Attaches fairness verdict, proof and rating to a verified puzzle.
fn finalize(
    puzzle: PartialLabeledBoard,
    solution: &LatinBoard,
    search_proof: Proof,
    critical: bool,
) -> GeneratedPuzzle {
    let verdict = certify_fair(&puzzle, &default_propagators())
        .expect("shipped propagators are monotonic and the puzzle is a PLB");
    let (fair, proof) = match verdict {
        FairnessVerdict::Fair(fpas) => (true, fpas),
        FairnessVerdict::NotCertified => (false, search_proof),
    };
    let rating = rate(&proof, &puzzle).expect("solver proofs replay on their puzzles");
    GeneratedPuzzle {
        puzzle,
        solution: solution.clone(),
        proof,
        fair,
        critical,
        rating,
    }
}

/// Returns the unique completion's proof when `clues` admit exactly one.
fn unique_completion(
    base: &PartialLabeledBoard,
    clues: &[(CellId, Label)],
) -> Result<Option<(LatinBoard, Proof)>, GenerateError> {
    let candidate = base.with_clues(clues)?;
    let result = enumerate_solutions(&candidate, &SearchConfig::with_limit(SolutionLimit::Finite(2)));
    if result.is_complete() && result.solutions.len() == 1 {
        let sol = result.solutions.into_iter().next().expect("one solution");
        Ok(Some((sol.board, sol.proof)))
    } else {
        Ok(None)
    }
}

/// Greedy clue-removal with an explicit cell-priority order: at every
/// level the present clues are tried in priority order; a removal that
/// keeps uniqueness is recorded and kept, any other is restored. Produces
/// a chain of puzzles with strictly decreasing clue counts; the last one
/// is critical by construction.
pub fn puzzles_from_latin_board_with_priority(
    lb: &LatinBoard,
    inscription: Option<&Inscription>,
    priority: &[CellId],
) -> Result<Vec<GeneratedPuzzle>, GenerateError> {
    if let Some(ins) = inscription {
        for &(cell, label) in ins.pairs() {
            if lb.label_at(cell) != label {
                return Err(GenerateError::InscriptionMismatch { cell });
            }
        }
    }
    let base = PartialLabeledBoard::new(
        std::sync::Arc::clone(lb.board_arc()),
        lb.multiset().clone(),
        &lb.clues().collect::<Vec<_>>(),
        inscription.cloned(),
    )?;
    let mut working: Vec<Option<Label>> = lb.assignment().to_vec();
    let mut chain: Vec<(Vec<(CellId, Label)>, Proof)> = Vec::new();
    dig(&base, &mut working, inscription, priority, &mut chain)?;

    let last = chain.len().saturating_sub(1);
    Ok(chain
        .into_iter()
        .enumerate()
        .map(|(i, (clues, proof))| {
            let puzzle = base.with_clues(&clues).expect("clues came from the board");
            finalize(puzzle, lb, proof, i == last)
        })
        .collect())
}

fn dig(
    base: &PartialLabeledBoard,
    working: &mut Vec<Option<Label>>,
    inscription: Option<&Inscription>,
    priority: &[CellId],
    chain: &mut Vec<(Vec<(CellId, Label)>, Proof)>,
) -> Result<(), GenerateError> {
    let snapshot: Vec<CellId> = priority
        .iter()
        .copied()
        .filter(|&cell| {
            working[cell].is_some() && !inscription.is_some_and(|i| i.contains_cell(cell))
        })
        .collect();
    for cell in snapshot {
        let Some(saved) = working[cell].take() else {
            // Already removed by a deeper level.
            continue;
        };
        let clues: Vec<(CellId, Label)> = working
            .iter()
            .enumerate()
            .filter_map(|(c, l)| l.map(|l| (c, l)))
            .collect();
        match unique_completion(base, &clues)? {
            Some((_, proof)) => {
                chain.push((clues, proof));
                dig(base, working, inscription, priority, chain)?;
                // The successful removal stays removed.
            }
            None => {
                working[cell] = Some(saved);
            }
        }
    }
    Ok(())
}

/// Clue-removal generation with a seeded random visitation order.
pub fn puzzles_from_latin_board(
    lb: &LatinBoard,
    inscription: Option<&Inscription>,
    seed: u64,
) -> Result<Vec<GeneratedPuzzle>, GenerateError> {
    let mut priority: Vec<CellId> = (0..lb.board().cell_count()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    priority.shuffle(&mut rng);
    puzzles_from_latin_board_with_priority(lb, inscription, &priority)
}

/// Enumerates up to `n` completions of `pb` and chains each of them.
/// `quota`, when given, stops generation once that many puzzles exist.
pub fn puzzles_from_pb(
    pb: &PartialLabeledBoard,
    n: u64,
    seed: u64,
    quota: Option<usize>,
) -> Result<Vec<GeneratedPuzzle>, GenerateError> {
    if n == 0 {
        return Err(GenerateError::ZeroLimit);
    }
    let result = enumerate_solutions(pb, &SearchConfig::with_limit(SolutionLimit::Finite(n)));
    let mut all = Vec::new();
    for sol in &result.solutions {
        let chain = puzzles_from_latin_board(&sol.board, pb.inscription(), seed)?;
        all.extend(chain);
        if quota.is_some_and(|q| all.len() >= q) {
            all.truncate(quota.expect("checked"));
            break;
        }
    }
    Ok(all)
}

/// Single-pass generation: one exhaustive instrumented enumeration yields
/// both the solutions and, from tag uniqueness, the puzzles along their
/// paths. Every candidate is re-verified before emission.
pub fn single_pass_generate(
    pb: &PartialLabeledBoard,
    seed: u64,
) -> Result<Vec<GeneratedPuzzle>, GenerateError> {
    let cfg = SearchConfig {
        limit: SolutionLimit::Infinite,
        schedule_seed: Some(seed),
        ..SearchConfig::default()
    };
    let result = enumerate_solutions(pb, &cfg);
    if !result.is_complete() {
        return Err(GenerateError::ExhaustionRequired);
    }

    let mut tag_occurrences: BTreeMap<u64, u32> = BTreeMap::new();
    for sol in &result.solutions {
        for tag in &sol.tags {
            *tag_occurrences.entry(tag.serial).or_insert(0) += 1;
        }
    }

    let mut seen: Vec<Vec<Option<Label>>> = Vec::new();
    let mut puzzles = Vec::new();
    for sol in &result.solutions {
        let mut clues: Vec<(CellId, Label)> = pb.clues().collect();
        for tag in &sol.tags {
            clues.push((tag.cell, tag.label));
            if tag_occurrences[&tag.serial] != 1 {
                continue;
            }
            let candidate = pb.with_clues(&clues)?;
            if candidate.is_total() || seen.contains(&candidate.assignment().to_vec()) {
                continue;
            }
            let Some((witness, proof)) = unique_completion(pb, &clues)? else {
                continue;
            };
            debug_assert_eq!(witness.assignment(), sol.board.assignment());
            seen.push(candidate.assignment().to_vec());
            let critical = is_critical(&candidate);
            puzzles.push(finalize(candidate, &sol.board, proof, critical));
        }
    }
    Ok(puzzles)
}

/// True when removing any single non-inscription clue destroys the
/// uniqueness of the completion. Expects a uniquely completable input.
pub fn is_critical(puzzle: &PartialLabeledBoard) -> bool {
    let clues: Vec<(CellId, Label)> = puzzle.clues().collect();
    for &(cell, _) in &clues {
        if puzzle
            .inscription()
            .is_some_and(|ins| ins.contains_cell(cell))
        {
            continue;
        }
        let fewer: Vec<(CellId, Label)> = clues
            .iter()
            .copied()
            .filter(|&(c, _)| c != cell)
            .collect();
        let smaller = puzzle
            .with_clues(&fewer)
            .expect("removal keeps clues valid");
        if classify(&smaller).tag == ClassificationTag::UniqueSolution {
            return false;
        }
    }
    true
}

/// Cell-count ceiling under which minimality is decided exhaustively.
pub const MINIMALITY_BUDGET_CELLS: usize = 16;

#[derive(Debug, Clone)]
pub enum Minimality {
    /// No uniquely completable puzzle with fewer clues exists on this
    /// board and multiset (inscription included in every candidate).
    Minimal,
    /// A smaller unique puzzle, returned as the witness.
    NotMinimal { witness: PartialLabeledBoard },
    /// The board exceeds the exhaustive-search budget.
    Unknown,
}

/// Exhaustively scans all smaller clue sets (over all cells and label
/// choices, inscription always included) for a uniquely completable one.
pub fn is_minimal(puzzle: &PartialLabeledBoard, budget_cells: usize) -> Minimality {
    if puzzle.board().cell_count() > budget_cells {
        return Minimality::Unknown;
    }
    let inscription: Vec<(CellId, Label)> = puzzle
        .inscription()
        .map(|i| i.pairs().to_vec())
        .unwrap_or_default();
    let clue_count = puzzle.clue_count();
    if clue_count <= inscription.len() {
        return Minimality::Minimal;
    }
    let free_cells: Vec<CellId> = (0..puzzle.board().cell_count())
        .filter(|&c| {
            !puzzle
                .inscription()
                .is_some_and(|ins| ins.contains_cell(c))
        })
        .collect();
    for size in (0..clue_count - inscription.len()).rev() {
        let mut clues = inscription.clone();
        if let Some(witness) = scan_clue_sets(puzzle, &free_cells, 0, size, &mut clues) {
            return Minimality::NotMinimal { witness };
        }
    }
    Minimality::Minimal
}

/// Depth-first over clue sets of exactly `remaining` more cells, trying
/// every label at each chosen cell. Prunes branches that already violate
/// the partial-Latin-board condition.
fn scan_clue_sets(
    puzzle: &PartialLabeledBoard,
    free_cells: &[CellId],
    from: usize,
    remaining: usize,
    clues: &mut Vec<(CellId, Label)>,
) -> Option<PartialLabeledBoard> {
    if remaining == 0 {
        let candidate = puzzle.with_clues(clues).expect("cells and labels in range");
        if classify(&candidate).tag == ClassificationTag::UniqueSolution {
            return Some(candidate);
        }
        return None;
    }
    if free_cells.len() - from < remaining {
        return None;
    }
    for i in from..free_cells.len() {
        let cell = free_cells[i];
        for label in puzzle.multiset().labels() {
            clues.push((cell, label));
            let still_plb = puzzle
                .with_clues(clues)
                .map(|p| p.is_partial_latin_board())
                .unwrap_or(false);
            if still_plb {
                if let Some(witness) =
                    scan_clue_sets(puzzle, free_cells, i + 1, remaining - 1, clues)
                {
                    return Some(witness);
                }
            }
            clues.pop();
        }
    }
    None
}

/// Generation pipeline options, shared by the command-line front end.
#[derive(Debug, Clone)]
pub struct GenerateOptions {
    /// Keep at most this many puzzles after filtering.
    pub count: Option<usize>,
    pub fair_only: bool,
    pub critical_only: bool,
    pub band: Option<DifficultyBand>,
    pub seed: u64,
    pub single_pass: bool,
    /// How many completions to draw puzzles from when the seed board is
    /// not already complete.
    pub solution_limit: u64,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            count: None,
            fair_only: false,
            critical_only: false,
            band: None,
            seed: 0,
            single_pass: false,
            solution_limit: 4,
        }
    }
}

/// Generates puzzles from a seed board and applies the requested filters.
pub fn generate_puzzles(
    pb: &PartialLabeledBoard,
    opts: &GenerateOptions,
) -> Result<Vec<GeneratedPuzzle>, GenerateError> {
    let mut puzzles = if opts.single_pass {
        single_pass_generate(pb, opts.seed)?
    } else if pb.is_latin_board() {
        let lb = LatinBoard::try_new(pb.clone()).expect("checked Latin board");
        puzzles_from_latin_board(&lb, pb.inscription(), opts.seed)?
    } else {
        puzzles_from_pb(pb, opts.solution_limit, opts.seed, None)?
    };
    puzzles.retain(|p| {
        (!opts.fair_only || p.fair)
            && (!opts.critical_only || p.critical)
            && opts.band.is_none_or(|b| p.rating.band == b)
    });
    if let Some(count) = opts.count {
        puzzles.truncate(count);
    }
    Ok(puzzles)
}
