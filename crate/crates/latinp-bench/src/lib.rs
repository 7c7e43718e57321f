//! Shared fixtures for the engine benchmarks.

use latinp_core::catalog;
use latinp_core::{puzzles_from_pb, GeneratedPuzzle, PartialLabeledBoard};

pub fn empty_shidoku() -> PartialLabeledBoard {
    catalog::shidoku()
}

pub fn empty_latin_square(n: usize) -> PartialLabeledBoard {
    catalog::latin_square(n)
}

/// A fixed fair puzzle for solver benchmarks.
pub fn fair_shidoku_puzzle() -> GeneratedPuzzle {
    puzzles_from_pb(&catalog::shidoku(), 1, 7, None)
        .expect("generation succeeds")
        .into_iter()
        .find(|p| p.fair)
        .expect("seed 7 yields a fair puzzle")
}

/// A fixed critical puzzle (search required) for solver benchmarks.
pub fn hard_shidoku_puzzle() -> GeneratedPuzzle {
    puzzles_from_pb(&catalog::shidoku(), 1, 7, None)
        .expect("generation succeeds")
        .into_iter()
        .find(|p| p.critical)
        .expect("seed 7 yields a critical puzzle")
}
