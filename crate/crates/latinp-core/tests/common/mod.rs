#![allow(dead_code)] // shared across test targets with different usage

//! Test-only reference machinery, independent of the solver under test.
//!
//! The oracles only use the structural predicates (`is_partial_latin_board`
//! / `is_latin_board`): no domains, no propagators, no heuristics, no
//! nogoods. `oracle_exhaustive` literally tries every assignment;
//! `oracle_solutions` walks cells in id order with prefix feasibility
//! checks, which the exhaustive form cross-validates on small boards.

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use latinp_core::catalog;
use latinp_core::{Board, CellId, Label, LabelMultiset, PartialLabeledBoard};

/// Every total assignment over the empty cells, filtered by the
/// Latin-board predicate. Exponential in the number of empty cells; use
/// only when `support^empty` is small.
pub fn oracle_exhaustive(plb: &PartialLabeledBoard) -> Vec<Vec<Option<Label>>> {
    let empty: Vec<CellId> = plb.empty_cells().collect();
    let support = plb.multiset().support();
    let mut counters = vec![0usize; empty.len()];
    let mut found = Vec::new();
    loop {
        let clues: Vec<(CellId, Label)> = plb
            .clues()
            .chain(
                empty
                    .iter()
                    .zip(&counters)
                    .map(|(&c, &i)| (c, Label(i as u16))),
            )
            .collect();
        let total = plb.with_clues(&clues).expect("labels in support");
        if total.is_latin_board() {
            found.push(total.assignment().to_vec());
        }
        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos == counters.len() {
                found.sort();
                return found;
            }
            counters[pos] += 1;
            if counters[pos] < support {
                break;
            }
            counters[pos] = 0;
            pos += 1;
        }
        if counters.iter().all(|&c| c == 0) {
            found.sort();
            return found;
        }
    }
}

/// Reference enumeration with fixed cell order and prefix pruning by the
/// partial-Latin-board predicate alone. Complete and tractable for boards
/// up to a few dozen cells.
pub fn oracle_solutions(plb: &PartialLabeledBoard) -> Vec<Vec<Option<Label>>> {
    if !plb.board().validate(plb.multiset().k()).is_valid() || !plb.is_partial_latin_board() {
        return Vec::new();
    }
    let empty: Vec<CellId> = plb.empty_cells().collect();
    let mut assignment = plb.assignment().to_vec();
    let mut found = Vec::new();
    recurse(plb, &empty, 0, &mut assignment, &mut found);
    found.sort();
    found
}

fn recurse(
    plb: &PartialLabeledBoard,
    empty: &[CellId],
    depth: usize,
    assignment: &mut Vec<Option<Label>>,
    found: &mut Vec<Vec<Option<Label>>>,
) {
    if depth == empty.len() {
        let clues: Vec<(CellId, Label)> = assignment
            .iter()
            .enumerate()
            .filter_map(|(c, l)| l.map(|l| (c, l)))
            .collect();
        let total = plb.with_clues(&clues).expect("labels in support");
        if total.is_latin_board() {
            found.push(total.assignment().to_vec());
        }
        return;
    }
    let cell = empty[depth];
    for i in 0..plb.multiset().support() {
        let label = Label(i as u16);
        assignment[cell] = Some(label);
        let clues: Vec<(CellId, Label)> = assignment
            .iter()
            .enumerate()
            .filter_map(|(c, l)| l.map(|l| (c, l)))
            .collect();
        let prefix = plb.with_clues(&clues).expect("labels in support");
        if prefix.is_partial_latin_board() {
            recurse(plb, empty, depth + 1, assignment, found);
        }
        assignment[cell] = None;
    }
}

/// Solution-count bucket: 0, 1, or "2 or more".
pub fn oracle_bucket(plb: &PartialLabeledBoard) -> u64 {
    (oracle_solutions(plb).len() as u64).min(2)
}

/// Small boards used for randomized cross-checks; all at most 16 cells.
pub fn trial_pool() -> Vec<PartialLabeledBoard> {
    vec![
        catalog::latin_square(2),
        catalog::latin_square(3),
        catalog::latin_square(4),
        catalog::shidoku(),
        // Shidoku topology over a repeated-label multiset.
        ripeto_shidoku(),
        // Two overlapping asterisms with a repeated multiset.
        PartialLabeledBoard::empty(
            Arc::new(Board::new("bands", 6, vec![vec![0, 1, 2, 3], vec![2, 3, 4, 5]]).unwrap()),
            LabelMultiset::new(vec![2, 2]).unwrap(),
        ),
    ]
}

pub fn ripeto_shidoku() -> PartialLabeledBoard {
    let base = catalog::shidoku();
    PartialLabeledBoard::empty(
        Arc::new(base.board().clone()),
        LabelMultiset::new(vec![2, 2]).unwrap(),
    )
}

/// A random partial Latin board from the pool: random clues are added one
/// by one and kept only while the board stays a PLB.
pub fn random_plb(rng: &mut ChaCha8Rng) -> PartialLabeledBoard {
    let pool = trial_pool();
    let base = &pool[rng.random_range(0..pool.len())];
    random_plb_on(base, rng)
}

pub fn random_plb_on(base: &PartialLabeledBoard, rng: &mut ChaCha8Rng) -> PartialLabeledBoard {
    let cells = base.board().cell_count();
    let support = base.multiset().support();
    let mut clues: Vec<(CellId, Label)> = base.clues().collect();
    let attempts = rng.random_range(0..=cells / 2);
    for _ in 0..attempts {
        let cell = rng.random_range(0..cells);
        if clues.iter().any(|&(c, _)| c == cell) {
            continue;
        }
        clues.push((cell, Label(rng.random_range(0..support) as u16)));
        let candidate = base.with_clues(&clues).expect("valid cell and label");
        if !candidate.is_partial_latin_board() {
            clues.pop();
        }
    }
    base.with_clues(&clues).expect("valid clues")
}
