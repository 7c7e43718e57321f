//! Fairness certification and proof-derived difficulty rating.
//!
//! A puzzle is certified *fair* when the monotonic propagator set alone
//! solves it: the resulting proof is a full polynomial attrition sequence,
//! and monotonicity guarantees that any partial attrition a solver starts
//! with still extends to a full one. The certificate is sufficient, not
//! necessary: `NotCertified` does not mean unfair, only that the shipped
//! set stalled.
//!
//! Ratings are pure functions of (proof, puzzle): the sum of per-step
//! propagator weights, normalized by the puzzle's initial empty-cell
//! count, bucketed into bands. Any search decision in the proof makes the
//! puzzle `unfair` regardless of score.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use thiserror::Error;

use crate::domain::initial_domain;
use crate::model::PartialLabeledBoard;
use crate::proof::{Proof, ReplayError};
use crate::propagate::{
    run_fixpoint, PropagationContext, PropagationState, Propagator, Schedule,
    COUNT_SATURATION, INTERSECTION, REQUIRED_COUNT,
};

#[derive(Debug, Error)]
pub enum RatingError {
    #[error("propagator `{name}` is not declared monotonic")]
    NonMonotonicPropagator { name: String },
    #[error("puzzle is not a partial Latin board on a uniform board")]
    NotPartialLatin,
    #[error("proof does not replay on the puzzle: {0}")]
    ReplayMismatch(#[from] ReplayError),
    #[error("rating config line {line}: {message}")]
    Config { line: usize, message: String },
}

/// Difficulty bands, coarsest first. `Unfair` overrides every score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DifficultyBand {
    VeryEasy,
    Easy,
    Medium,
    Difficult,
    VeryDifficult,
    Unfair,
}

impl DifficultyBand {
    pub fn as_str(&self) -> &'static str {
        match self {
            DifficultyBand::VeryEasy => "very easy",
            DifficultyBand::Easy => "easy",
            DifficultyBand::Medium => "medium",
            DifficultyBand::Difficult => "difficult",
            DifficultyBand::VeryDifficult => "very difficult",
            DifficultyBand::Unfair => "unfair",
        }
    }

    /// Parses both the display form (`very easy`) and key form (`very_easy`).
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().replace(['-', '_'], " ").as_str() {
            "very easy" => Some(DifficultyBand::VeryEasy),
            "easy" => Some(DifficultyBand::Easy),
            "medium" => Some(DifficultyBand::Medium),
            "difficult" => Some(DifficultyBand::Difficult),
            "very difficult" => Some(DifficultyBand::VeryDifficult),
            "unfair" => Some(DifficultyBand::Unfair),
            _ => None,
        }
    }
}

impl fmt::Display for DifficultyBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An exact rational score (weighted steps over initial empty cells) with
/// its band and the per-propagator step histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifficultyRating {
    pub weighted_steps: u64,
    pub empty_cells: u64,
    pub band: DifficultyBand,
    pub step_histogram: BTreeMap<String, u64>,
}

impl DifficultyRating {
    /// The score as a float, for display; banding itself compares exactly.
    pub fn score(&self) -> f64 {
        self.weighted_steps as f64 / self.empty_cells.max(1) as f64
    }
}

/// An exact threshold `num/100`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Threshold {
    hundredths: u64,
}

impl Threshold {
    fn admits(&self, weighted: u64, cells: u64) -> bool {
        // weighted/cells < hundredths/100
        (weighted as u128) * 100 < (self.hundredths as u128) * (cells.max(1) as u128)
    }
}

/// Per-propagator weights and band thresholds. Shipped defaults: weights
/// 1/2/4 for saturation/required/intersection; bands at 1.05, 1.35, 1.80
/// and 2.50. Tunable through a `key = value` config file.
#[derive(Debug, Clone)]
pub struct RatingConfig {
    weights: BTreeMap<String, u32>,
    very_easy: Threshold,
    easy: Threshold,
    medium: Threshold,
    difficult: Threshold,
}

impl Default for RatingConfig {
    fn default() -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(COUNT_SATURATION.to_string(), 1);
        weights.insert(REQUIRED_COUNT.to_string(), 2);
        weights.insert(INTERSECTION.to_string(), 4);
        Self {
            weights,
            very_easy: Threshold { hundredths: 105 },
            easy: Threshold { hundredths: 135 },
            medium: Threshold { hundredths: 180 },
            difficult: Threshold { hundredths: 250 },
        }
    }
}

impl RatingConfig {
    pub fn weight(&self, actor: &str) -> u32 {
        self.weights.get(actor).copied().unwrap_or(1)
    }

    fn band_of(&self, weighted: u64, cells: u64) -> DifficultyBand {
        if self.very_easy.admits(weighted, cells) {
            DifficultyBand::VeryEasy
        } else if self.easy.admits(weighted, cells) {
            DifficultyBand::Easy
        } else if self.medium.admits(weighted, cells) {
            DifficultyBand::Medium
        } else if self.difficult.admits(weighted, cells) {
            DifficultyBand::Difficult
        } else {
            DifficultyBand::VeryDifficult
        }
    }

    /// Parses `weights.<propagator> = <int>` and `bands.<name> = <decimal>`
    /// lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, RatingError> {
        let mut config = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| RatingError::Config {
                line,
                message: "expected `key = value`".to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            if let Some(name) = key.strip_prefix("weights.") {
                let weight: u32 = value.parse().map_err(|_| RatingError::Config {
                    line,
                    message: format!("bad weight `{value}`"),
                })?;
                config.weights.insert(name.to_string(), weight);
            } else if let Some(band) = key.strip_prefix("bands.") {
                let threshold = parse_hundredths(value).ok_or_else(|| RatingError::Config {
                    line,
                    message: format!("bad threshold `{value}`"),
                })?;
                let slot = match band {
                    "very_easy" => &mut config.very_easy,
                    "easy" => &mut config.easy,
                    "medium" => &mut config.medium,
                    "difficult" => &mut config.difficult,
                    other => {
                        return Err(RatingError::Config {
                            line,
                            message: format!("unknown band `{other}`"),
                        })
                    }
                };
                *slot = Threshold {
                    hundredths: threshold,
                };
            } else {
                return Err(RatingError::Config {
                    line,
                    message: format!("unknown key `{key}`"),
                });
            }
        }
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, RatingError> {
        let text = std::fs::read_to_string(path).map_err(|e| RatingError::Config {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }
}

/// Parses a decimal like `1.05` into hundredths, exactly.
fn parse_hundredths(s: &str) -> Option<u64> {
    let (whole, frac) = match s.split_once('.') {
        Some((w, f)) => (w, f),
        None => (s, ""),
    };
    if frac.len() > 2 || whole.is_empty() && frac.is_empty() {
        return None;
    }
    let whole: u64 = if whole.is_empty() { 0 } else { whole.parse().ok()? };
    let frac_value: u64 = if frac.is_empty() {
        0
    } else {
        let parsed: u64 = frac.parse().ok()?;
        if frac.len() == 1 {
            parsed * 10
        } else {
            parsed
        }
    };
    Some(whole * 100 + frac_value)
}

/// Outcome of fairness certification.
#[derive(Debug, Clone)]
pub enum FairnessVerdict {
    /// The propagators alone solved the puzzle; the proof is the full
    /// polynomial attrition sequence.
    Fair(Proof),
    /// The propagators stalled; the theorem gives no verdict either way.
    NotCertified,
}

impl FairnessVerdict {
    pub fn is_fair(&self) -> bool {
        matches!(self, FairnessVerdict::Fair(_))
    }
}

/// Certifies fairness by running the given monotonic propagators to their
/// fixpoint. Rejects propagator sets containing a non-monotonic member.
pub fn certify_fair(
    puzzle: &PartialLabeledBoard,
    props: &[Box<dyn Propagator>],
) -> Result<FairnessVerdict, RatingError> {
    for prop in props {
        if !prop.is_monotonic() {
            return Err(RatingError::NonMonotonicPropagator {
                name: prop.name().to_string(),
            });
        }
    }
    // Resolvedness only certifies a Latin board on a uniform board.
    if !puzzle.board().validate(puzzle.multiset().k()).is_valid() {
        return Err(RatingError::NotPartialLatin);
    }
    let ctx = PropagationContext::new(puzzle).map_err(|_| RatingError::NotPartialLatin)?;
    let domain = initial_domain(puzzle).map_err(|_| RatingError::NotPartialLatin)?;
    let mut state = PropagationState::from_domain(&ctx, &domain);
    let mut proof = Proof::new();
    let mut serial = 0u64;
    run_fixpoint(
        &ctx,
        &mut state,
        props,
        Schedule::CheapestFirst,
        &mut serial,
        &mut proof,
    );
    if state.is_resolved() {
        Ok(FairnessVerdict::Fair(proof))
    } else {
        Ok(FairnessVerdict::NotCertified)
    }
}

/// One failed robustness trial, reported with the offending schedule:
/// the random attrition prefix plus the seed of the resumed fixpoint,
/// which together reproduce the run exactly.
#[derive(Debug, Clone)]
pub struct RobustnessFailure {
    pub trial: u32,
    /// The attrition prefix applied before resuming, as (propagator name,
    /// asterism index) pairs.
    pub prefix: Vec<(String, usize)>,
    /// Schedule seed of the resumed fixpoint.
    pub resume_seed: u64,
}

#[derive(Debug, Clone)]
pub struct RobustnessReport {
    pub trials: u32,
    pub failures: Vec<RobustnessFailure>,
}

impl RobustnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Empirically exercises the fairness guarantee on a certified puzzle:
/// random attrition prefixes (random propagator subsequences over random
/// asterisms) followed by a full fixpoint must still solve it. A failure
/// indicates a propagator that is not actually monotonic.
pub fn fairness_robustness_check(
    puzzle: &PartialLabeledBoard,
    props: &[Box<dyn Propagator>],
    trials: u32,
    seed: u64,
) -> Result<RobustnessReport, RatingError> {
    if !puzzle.board().validate(puzzle.multiset().k()).is_valid() {
        return Err(RatingError::NotPartialLatin);
    }
    let ctx = PropagationContext::new(puzzle).map_err(|_| RatingError::NotPartialLatin)?;
    let domain = initial_domain(puzzle).map_err(|_| RatingError::NotPartialLatin)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for trial in 0..trials {
        let mut state = PropagationState::from_domain(&ctx, &domain);
        let mut prefix = Vec::new();
        if ctx.asterism_count() > 0 && !props.is_empty() {
            let steps = rng.random_range(0..=2 * ctx.asterism_count());
            for _ in 0..steps {
                let p = rng.random_range(0..props.len());
                let asterism = rng.random_range(0..ctx.asterism_count());
                prefix.push((props[p].name().to_string(), asterism));
                props[p].apply_to_asterism(&ctx, &mut state, asterism);
                state.drain_effects();
                if state.is_wiped() {
                    break;
                }
            }
        }
        let mut proof = Proof::new();
        let mut serial = 0u64;
        let resume_seed: u64 = rng.random();
        run_fixpoint(
            &ctx,
            &mut state,
            props,
            Schedule::Seeded(resume_seed),
            &mut serial,
            &mut proof,
        );
        if !state.is_resolved() {
            failures.push(RobustnessFailure {
                trial,
                prefix,
                resume_seed,
            });
        }
    }
    Ok(RobustnessReport { trials, failures })
}

/// Rates a proof against its puzzle using the default configuration.
pub fn rate(proof: &Proof, puzzle: &PartialLabeledBoard) -> Result<DifficultyRating, RatingError> {
    rate_with(proof, puzzle, &RatingConfig::default())
}

/// Rates a proof against its puzzle: validates the replay, sums propagator
/// step weights, normalizes by the initial number of empty cells, and
/// assigns the band (`unfair` whenever a search decision appears).
pub fn rate_with(
    proof: &Proof,
    puzzle: &PartialLabeledBoard,
    config: &RatingConfig,
) -> Result<DifficultyRating, RatingError> {
    proof.replay(puzzle)?;
    let empty_cells = puzzle.empty_cells().count() as u64;
    let mut weighted = 0u64;
    let mut histogram = BTreeMap::new();
    let mut unfair = false;
    for step in proof.steps() {
        *histogram.entry(step.actor.name().to_string()).or_insert(0) += 1;
        match &step.actor {
            crate::proof::StepActor::Backtrack => unfair = true,
            crate::proof::StepActor::Propagator(name) => {
                weighted += config.weight(name) as u64;
            }
        }
    }
    let band = if unfair {
        DifficultyBand::Unfair
    } else {
        config.band_of(weighted, empty_cells)
    };
    Ok(DifficultyRating {
        weighted_steps: weighted,
        empty_cells: empty_cells.max(1),
        band,
        step_histogram: histogram,
    })
}
