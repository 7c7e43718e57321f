//! Constraint solving, puzzle generation and difficulty rating for Latin
//! boards: Latin squares generalized to arbitrary cell sets, overlapping
//! asterisms and label multisets.
//!
//! The pipeline is layered bottom-up:
//!
//! - [`model`] — boards, multisets, partial labelings and the structural
//!   checks that gate everything else;
//! - [`domain`] — candidate-label domains and the strength partial order;
//! - [`propagate`] — monotonic propagators run to a fixpoint;
//! - [`search`] — backtracking enumeration with interleaved propagation,
//!   nogood recording and exact state restoration;
//! - [`solve`] — classification (not a PLB / no completion / unique /
//!   multiple / already complete) and puzzle solving with proofs;
//! - [`generate`] — puzzle extraction from complete boards, from partial
//!   boards, and in a single instrumented search pass; criticality and
//!   minimality checks;
//! - [`rating`] — fairness certification and proof-derived difficulty;
//! - [`catalog`] — programmatic constructors for common board families;
//! - [`mod@format`] — the line-oriented board and proof file formats.

pub mod catalog;
pub mod domain;
pub mod format;
pub mod generate;
pub mod model;
pub mod proof;
pub mod propagate;
pub mod rating;
pub mod search;
pub mod solve;

pub use domain::{initial_domain, is_stronger, solution_space_size, BoardDomain, CellDomain};
pub use generate::{
    generate_puzzles, is_critical, is_minimal, puzzles_from_latin_board,
    puzzles_from_latin_board_with_priority, puzzles_from_pb, single_pass_generate,
    GenerateOptions, GeneratedPuzzle, Minimality, TagSequence,
};
pub use model::{
    is_latin_board, is_partial_latin_board, validate_board, Board, CellId, Inscription, Label,
    LabelMultiset, LatinBoard, PartialLabeledBoard,
};
pub use proof::{Proof, ProofStep, StepActor};
pub use propagate::{
    check_monotonic, default_propagators, propagate_fixpoint, PropagationContext,
    PropagationOutcome, Propagator, Schedule,
};
pub use rating::{
    certify_fair, fairness_robustness_check, rate, rate_with, DifficultyBand, DifficultyRating,
    FairnessVerdict, RatingConfig,
};
pub use search::{
    choose_branch, enumerate_solutions, enumerate_solutions_parallel, FoundSolution, NogoodStore,
    SearchConfig, SearchResult, SearchStats, SearchStatus, SolutionLimit, Tag,
};
pub use solve::{classify, classify_budgeted, solve_puzzle, Classification, ClassificationTag};
