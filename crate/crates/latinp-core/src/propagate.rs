//! Polynomial attrition: propagators, their engine, and monotonicity checks.
//!
//! A propagator implements one attrition theorem: a mapping that only ever
//! shrinks a board domain. The shipped set generalizes the classic Sudoku
//! deductions to label multisets:
//!
//! - `count_saturation` — a label that already occurs as often as the
//!   multiset allows in an asterism is removed from every other cell there;
//! - `required_count` — when the cells still able to hold a label are
//!   exactly as many as the copies still required, they are all forced;
//! - `intersection` — when all of an asterism's remaining copies of a label
//!   must fall inside its overlap with another asterism, the other asterism
//!   loses the label outside the overlap.
//!
//! All three are monotonic: a stronger input never yields a weaker output.
//! A contradicted input (an empty cell domain, or more forced copies than
//! the multiset allows) is collapsed to the fully wiped domain, which keeps
//! the monotone order intact and makes wipeout an explicit outcome rather
//! than an error.

use std::collections::VecDeque;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::domain::{BoardDomain, CellDomain, DomainError};
use crate::model::{Board, CellId, Label, LabelMultiset, PartialLabeledBoard};
use crate::proof::{Proof, ProofStep, StepActor};

/// Stable names of the shipped propagators, as they appear in proof files.
pub const COUNT_SATURATION: &str = "count_saturation";
pub const REQUIRED_COUNT: &str = "required_count";
pub const INTERSECTION: &str = "intersection";

/// Static view of a partial Latin board prepared for propagation: per
/// asterism clue counts, empty-cell slots, and overlap structure.
#[derive(Debug)]
pub struct PropagationContext {
    support: usize,
    counts: Vec<u32>,
    /// Clue occurrences per asterism, flattened `[asterism * support + label]`.
    clue_counts: Vec<u32>,
    /// Empty-cell slots per asterism.
    empty_slots: Vec<Vec<u32>>,
    slot_cells: Vec<CellId>,
    slot_asterisms: Vec<Vec<u32>>,
    /// Asterisms sharing at least one empty cell, per asterism.
    overlapping: Vec<Vec<u32>>,
    /// Cell membership bitsets per asterism.
    membership: Vec<Vec<u64>>,
    asterism_count: usize,
}

impl PropagationContext {
    pub fn new(plb: &PartialLabeledBoard) -> Result<Self, DomainError> {
        if !plb.is_partial_latin_board() {
            return Err(DomainError::NotPartialLatin);
        }
        let board: &Board = plb.board();
        let multiset: &LabelMultiset = plb.multiset();
        let support = multiset.support();
        let n_ast = board.constellation().len();
        let words = board.cell_count().div_ceil(64);

        let slot_cells: Vec<CellId> = plb.empty_cells().collect();
        let mut slot_of_cell = vec![usize::MAX; board.cell_count()];
        for (slot, &cell) in slot_cells.iter().enumerate() {
            slot_of_cell[cell] = slot;
        }

        let mut clue_counts = vec![0u32; n_ast * support];
        let mut empty_slots = vec![Vec::new(); n_ast];
        let mut membership = vec![vec![0u64; words]; n_ast];
        for (a, asterism) in board.constellation().iter().enumerate() {
            for &cell in asterism {
                membership[a][cell / 64] |= 1u64 << (cell % 64);
                match plb.label_at(cell) {
                    Some(label) => clue_counts[a * support + label.index()] += 1,
                    None => empty_slots[a].push(slot_of_cell[cell] as u32),
                }
            }
        }

        let mut slot_asterisms = vec![Vec::new(); slot_cells.len()];
        for (slot, &cell) in slot_cells.iter().enumerate() {
            for &a in board.asterisms_of(cell) {
                slot_asterisms[slot].push(a as u32);
            }
        }

        let mut overlapping = vec![Vec::new(); n_ast];
        for asterisms in &slot_asterisms {
            for &a in asterisms {
                for &b in asterisms {
                    if a != b && !overlapping[a as usize].contains(&b) {
                        overlapping[a as usize].push(b);
                    }
                }
            }
        }
        for list in &mut overlapping {
            list.sort_unstable();
        }

        Ok(Self {
            support,
            counts: multiset.counts().to_vec(),
            clue_counts,
            empty_slots,
            slot_cells,
            slot_asterisms,
            overlapping,
            membership,
            asterism_count: n_ast,
        })
    }

    #[inline]
    pub fn support(&self) -> usize {
        self.support
    }

    #[inline]
    pub fn asterism_count(&self) -> usize {
        self.asterism_count
    }

    #[inline]
    pub fn slot_count(&self) -> usize {
        self.slot_cells.len()
    }

    #[inline]
    pub fn cell_of_slot(&self, slot: usize) -> CellId {
        self.slot_cells[slot]
    }

    #[inline]
    pub fn slot_cells(&self) -> &[CellId] {
        &self.slot_cells
    }

    #[inline]
    pub fn empty_slots_of(&self, asterism: usize) -> &[u32] {
        &self.empty_slots[asterism]
    }

    #[inline]
    pub fn asterisms_of_slot(&self, slot: usize) -> &[u32] {
        &self.slot_asterisms[slot]
    }

    #[inline]
    pub fn overlapping(&self, asterism: usize) -> &[u32] {
        &self.overlapping[asterism]
    }

    /// Multiset count of a label.
    #[inline]
    pub fn count(&self, label: Label) -> u32 {
        self.counts[label.index()]
    }

    /// Clue occurrences of a label in an asterism.
    #[inline]
    pub fn clue_count(&self, asterism: usize, label: Label) -> u32 {
        self.clue_counts[asterism * self.support + label.index()]
    }

    #[inline]
    pub fn cell_in_asterism(&self, cell: CellId, asterism: usize) -> bool {
        self.membership[asterism][cell / 64] & (1u64 << (cell % 64)) != 0
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.support).map(|i| Label(i as u16))
    }

    fn to_domain(&self, masks: &[CellDomain]) -> BoardDomain {
        BoardDomain::new(
            self.slot_cells
                .iter()
                .copied()
                .zip(masks.iter().copied())
                .collect(),
        )
    }
}

/// One logged domain change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Effect {
    Eliminated { slot: u32, label: Label },
    Forced { slot: u32, label: Label },
}

/// Mutable domain store handed to propagators. Tracks singleton counts per
/// asterism so that over-count contradictions surface on every write, and
/// keeps a trail so that search can restore state bit-exactly.
#[derive(Debug)]
pub struct PropagationState {
    masks: Vec<CellDomain>,
    /// Singleton occurrences, flattened `[asterism * support + label]`.
    sing: Vec<u32>,
    trail: Vec<(u32, CellDomain)>,
    effects: Vec<Effect>,
    wiped: bool,
    unresolved: usize,
}

impl PropagationState {
    /// Builds the store for `domain`, which must be keyed by the same empty
    /// cells the context was built from. A domain that is already wiped or
    /// carries more forced copies of a label than the multiset allows is
    /// collapsed immediately.
    pub fn from_domain(ctx: &PropagationContext, domain: &BoardDomain) -> Self {
        assert_eq!(
            domain.cells(),
            ctx.slot_cells(),
            "board domain keyed by different empty cells than the propagation context"
        );
        let masks: Vec<CellDomain> = domain.masks().to_vec();
        let mut sing = vec![0u32; ctx.asterism_count() * ctx.support()];
        let mut wiped = false;
        let mut unresolved = 0usize;
        for (slot, mask) in masks.iter().enumerate() {
            if mask.is_empty() {
                wiped = true;
            }
            match mask.sole() {
                Some(label) => {
                    for &a in ctx.asterisms_of_slot(slot) {
                        let idx = a as usize * ctx.support() + label.index();
                        sing[idx] += 1;
                        if ctx.clue_count(a as usize, label) + sing[idx] > ctx.count(label) {
                            wiped = true;
                        }
                    }
                }
                None => unresolved += 1,
            }
        }
        Self {
            masks,
            sing,
            trail: Vec::new(),
            effects: Vec::new(),
            wiped,
            unresolved,
        }
    }

    #[inline]
    pub fn mask(&self, slot: usize) -> CellDomain {
        self.masks[slot]
    }

    #[inline]
    pub fn is_wiped(&self) -> bool {
        self.wiped
    }

    /// True when every cell domain is a singleton and no count is violated.
    #[inline]
    pub fn is_resolved(&self) -> bool {
        !self.wiped && self.unresolved == 0
    }

    /// Singleton occurrences of `label` among the empty cells of `asterism`.
    #[inline]
    pub fn singleton_count(&self, ctx: &PropagationContext, asterism: usize, label: Label) -> u32 {
        self.sing[asterism * ctx.support() + label.index()]
    }

    /// Declares the current domain contradictory (collapses to wiped).
    pub fn contradiction(&mut self) {
        self.wiped = true;
    }

    /// Removes `label` from a cell domain. No-op when absent.
    pub fn eliminate(&mut self, ctx: &PropagationContext, slot: usize, label: Label) {
        let old = self.masks[slot];
        if !old.contains(label) {
            return;
        }
        let mut new = old;
        new.remove(label);
        self.effects.push(Effect::Eliminated {
            slot: slot as u32,
            label,
        });
        self.write_mask(ctx, slot, new);
        if let Some(sole) = new.sole() {
            if !old.is_singleton() {
                self.effects.push(Effect::Forced {
                    slot: slot as u32,
                    label: sole,
                });
            }
        }
    }

    /// Collapses a cell domain to `{label}`. With `record_eliminations`,
    /// each dropped candidate is logged (propagator deductions); without,
    /// only the placement is logged (search decisions).
    pub fn force(
        &mut self,
        ctx: &PropagationContext,
        slot: usize,
        label: Label,
        record_eliminations: bool,
    ) {
        let old = self.masks[slot];
        debug_assert!(old.contains(label));
        if old == CellDomain::singleton(label) {
            return;
        }
        if record_eliminations {
            for other in old.labels() {
                if other != label {
                    self.effects.push(Effect::Eliminated {
                        slot: slot as u32,
                        label: other,
                    });
                }
            }
        }
        self.effects.push(Effect::Forced {
            slot: slot as u32,
            label,
        });
        self.write_mask(ctx, slot, CellDomain::singleton(label));
    }

    fn write_mask(&mut self, ctx: &PropagationContext, slot: usize, new: CellDomain) {
        let old = self.masks[slot];
        debug_assert_ne!(old, new);
        self.trail.push((slot as u32, old));
        self.masks[slot] = new;
        self.transition(ctx, slot, old, new, true);
    }

    fn transition(
        &mut self,
        ctx: &PropagationContext,
        slot: usize,
        old: CellDomain,
        new: CellDomain,
        check: bool,
    ) {
        let old_sole = old.sole();
        let new_sole = new.sole();
        if old_sole == new_sole {
            if new.is_empty() && check {
                self.wiped = true;
            }
            return;
        }
        if let Some(label) = old_sole {
            for &a in ctx.asterisms_of_slot(slot) {
                self.sing[a as usize * ctx.support() + label.index()] -= 1;
            }
            self.unresolved += 1;
        }
        if let Some(label) = new_sole {
            for &a in ctx.asterisms_of_slot(slot) {
                let idx = a as usize * ctx.support() + label.index();
                self.sing[idx] += 1;
                if check && ctx.clue_count(a as usize, label) + self.sing[idx] > ctx.count(label) {
                    // More forced copies than the multiset allows: the
                    // partial-Latin-board condition just failed.
                    self.wiped = true;
                }
            }
            self.unresolved -= 1;
        }
        if new.is_empty() && check {
            self.wiped = true;
        }
    }

    pub(crate) fn drain_effects(&mut self) -> Vec<Effect> {
        std::mem::take(&mut self.effects)
    }

    pub(crate) fn has_effects(&self) -> bool {
        !self.effects.is_empty()
    }

    /// Current trail position; pass to [`Self::undo_to`] to restore.
    pub(crate) fn mark(&self) -> usize {
        self.trail.len()
    }

    /// Restores every domain written after `mark`, bit-exactly. Only valid
    /// for marks taken in non-wiped states.
    pub(crate) fn undo_to(&mut self, ctx: &PropagationContext, mark: usize) {
        while self.trail.len() > mark {
            let (slot, old) = self.trail.pop().expect("trail underflow");
            let slot = slot as usize;
            let current = self.masks[slot];
            self.masks[slot] = old;
            self.transition(ctx, slot, current, old, false);
        }
        self.wiped = false;
        self.effects.clear();
    }

    #[cfg(test)]
    pub(crate) fn masks(&self) -> &[CellDomain] {
        &self.masks
    }

    /// Snapshot of the current store as a public board domain; wiped stores
    /// collapse to the all-empty domain.
    pub fn to_board_domain(&self, ctx: &PropagationContext) -> BoardDomain {
        if self.wiped {
            ctx.to_domain(&vec![CellDomain::EMPTY; self.masks.len()])
        } else {
            ctx.to_domain(&self.masks)
        }
    }
}

/// Result of applying attrition to a board domain. Wipeout is an outcome,
/// never an error: it certifies the input had no completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationOutcome {
    pub domain: BoardDomain,
    pub eliminations: Vec<(CellId, Label, String)>,
    pub placements: Vec<(CellId, Label)>,
    pub wipeout: bool,
}

/// A named attrition theorem with its algorithm.
///
/// Soundness contract: `apply` never grows any cell domain. Propagators
/// declaring `is_monotonic` additionally promise that stronger inputs map
/// to stronger outputs; [`check_monotonic`] probes that claim empirically.
pub trait Propagator: Send + Sync {
    /// Stable identifier, used verbatim in proof files.
    fn name(&self) -> &str;

    /// Complexity weight; the rating counts it per proof step and the
    /// engine schedules cheaper propagators first.
    fn weight(&self) -> u32 {
        1
    }

    fn is_monotonic(&self) -> bool;

    /// Applies the propagator to a single asterism of the prepared board.
    fn apply_to_asterism(
        &self,
        ctx: &PropagationContext,
        state: &mut PropagationState,
        asterism: usize,
    );

    /// One full sweep over all asterisms.
    fn apply(&self, ctx: &PropagationContext, domain: &BoardDomain) -> PropagationOutcome {
        let mut state = PropagationState::from_domain(ctx, domain);
        if !state.is_wiped() {
            for a in 0..ctx.asterism_count() {
                self.apply_to_asterism(ctx, &mut state, a);
                if state.is_wiped() {
                    break;
                }
            }
        }
        let effects = state.drain_effects();
        let mut eliminations = Vec::new();
        let mut placements = Vec::new();
        for effect in effects {
            match effect {
                Effect::Eliminated { slot, label } => eliminations.push((
                    ctx.cell_of_slot(slot as usize),
                    label,
                    self.name().to_string(),
                )),
                Effect::Forced { slot, label } => {
                    placements.push((ctx.cell_of_slot(slot as usize), label))
                }
            }
        }
        if state.is_wiped() {
            // The collapse retracts any placements made along the way.
            placements.clear();
        }
        PropagationOutcome {
            domain: state.to_board_domain(ctx),
            wipeout: state.is_wiped(),
            eliminations,
            placements,
        }
    }
}

/// Saturated labels are removed from the rest of their asterism.
#[derive(Debug, Clone, Copy, Default)]
pub struct CountSaturation;

impl Propagator for CountSaturation {
    fn name(&self) -> &str {
        COUNT_SATURATION
    }

    fn weight(&self) -> u32 {
        1
    }

    fn is_monotonic(&self) -> bool {
        true
    }

    fn apply_to_asterism(
        &self,
        ctx: &PropagationContext,
        state: &mut PropagationState,
        asterism: usize,
    ) {
        for label in ctx.labels() {
            if state.is_wiped() {
                return;
            }
            let occupied =
                ctx.clue_count(asterism, label) + state.singleton_count(ctx, asterism, label);
            if occupied < ctx.count(label) {
                continue;
            }
            for &slot in ctx.empty_slots_of(asterism) {
                let mask = state.mask(slot as usize);
                if mask.contains(label) && mask != CellDomain::singleton(label) {
                    state.eliminate(ctx, slot as usize, label);
                    if state.is_wiped() {
                        return;
                    }
                }
            }
        }
    }
}

/// Labels with exactly as many candidate cells as copies still required
/// force all those cells.
#[derive(Debug, Clone, Copy, Default)]
pub struct RequiredCount;

impl Propagator for RequiredCount {
    fn name(&self) -> &str {
        REQUIRED_COUNT
    }

    fn weight(&self) -> u32 {
        2
    }

    fn is_monotonic(&self) -> bool {
        true
    }

    fn apply_to_asterism(
        &self,
        ctx: &PropagationContext,
        state: &mut PropagationState,
        asterism: usize,
    ) {
        for label in ctx.labels() {
            if state.is_wiped() {
                return;
            }
            let required = ctx.count(label).saturating_sub(ctx.clue_count(asterism, label));
            if required == 0 {
                continue;
            }
            let mut candidates = 0u32;
            for &slot in ctx.empty_slots_of(asterism) {
                if state.mask(slot as usize).contains(label) {
                    candidates += 1;
                }
            }
            if candidates < required {
                // Not enough cells left for the copies the asterism still
                // needs; collapsing keeps the propagator monotonic.
                state.contradiction();
                return;
            }
            if candidates == required {
                for &slot in ctx.empty_slots_of(asterism) {
                    let mask = state.mask(slot as usize);
                    if mask.contains(label) && !mask.is_singleton() {
                        state.force(ctx, slot as usize, label, true);
                        if state.is_wiped() {
                            return;
                        }
                    }
                }
            }
        }
    }
}

/// When every remaining copy of a label in one asterism must land in its
/// overlap with another, the other asterism loses the label elsewhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct Intersection;

impl Propagator for Intersection {
    fn name(&self) -> &str {
        INTERSECTION
    }

    fn weight(&self) -> u32 {
        4
    }

    fn is_monotonic(&self) -> bool {
        true
    }

    fn apply_to_asterism(
        &self,
        ctx: &PropagationContext,
        state: &mut PropagationState,
        asterism: usize,
    ) {
        let mut candidate_slots: Vec<u32> = Vec::new();
        for label in ctx.labels() {
            if state.is_wiped() {
                return;
            }
            let required = ctx.count(label).saturating_sub(ctx.clue_count(asterism, label));
            if required == 0 {
                continue;
            }
            candidate_slots.clear();
            for &slot in ctx.empty_slots_of(asterism) {
                if state.mask(slot as usize).contains(label) {
                    candidate_slots.push(slot);
                }
            }
            if (candidate_slots.len() as u32) < required {
                state.contradiction();
                return;
            }
            for &other in ctx.overlapping(asterism) {
                let other = other as usize;
                let confined = candidate_slots
                    .iter()
                    .all(|&slot| ctx.cell_in_asterism(ctx.cell_of_slot(slot as usize), other));
                if !confined {
                    continue;
                }
                // `required` copies are pinned inside the overlap, which
                // caps how many copies `other` may still place elsewhere.
                let spare = ctx.count(label) as i64
                    - ctx.clue_count(other, label) as i64
                    - required as i64;
                if spare < 0 {
                    state.contradiction();
                    return;
                }
                if spare > 0 {
                    continue;
                }
                for &slot in ctx.empty_slots_of(other) {
                    let cell = ctx.cell_of_slot(slot as usize);
                    if ctx.cell_in_asterism(cell, asterism) {
                        continue;
                    }
                    if state.mask(slot as usize).contains(label) {
                        state.eliminate(ctx, slot as usize, label);
                        if state.is_wiped() {
                            return;
                        }
                    }
                }
            }
        }
    }
}

/// The shipped propagator set, cheapest first.
pub fn default_propagators() -> Vec<Box<dyn Propagator>> {
    vec![
        Box::new(CountSaturation),
        Box::new(RequiredCount),
        Box::new(Intersection),
    ]
}

/// How the fixpoint engine picks the next (propagator, asterism) unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Deterministic: cheapest propagator first, FIFO over dirty asterisms.
    #[default]
    CheapestFirst,
    /// Random unit order from the given seed. For monotonic propagator sets
    /// the fixpoint is schedule-independent; only proofs and stats differ.
    Seeded(u64),
}

/// Runs the propagators to a mutual fixpoint and returns the outcome plus
/// the proof fragment of everything they did. Serial numbers start at 0.
pub fn propagate_fixpoint(
    ctx: &PropagationContext,
    domain: &BoardDomain,
    props: &[Box<dyn Propagator>],
    schedule: Schedule,
) -> (PropagationOutcome, Proof) {
    let mut state = PropagationState::from_domain(ctx, domain);
    let mut proof = Proof::new();
    let mut serial = 0u64;
    run_fixpoint(ctx, &mut state, props, schedule, &mut serial, &mut proof);
    let outcome = outcome_from_proof(ctx, &state, &proof);
    (outcome, proof)
}

pub(crate) fn outcome_from_proof(
    ctx: &PropagationContext,
    state: &PropagationState,
    proof: &Proof,
) -> PropagationOutcome {
    let mut eliminations = Vec::new();
    let mut placements = Vec::new();
    for step in proof.steps() {
        for &(cell, label) in &step.eliminations {
            eliminations.push((cell, label, step.actor.name().to_string()));
        }
        if let Some(p) = step.placement {
            placements.push(p);
        }
    }
    if state.is_wiped() {
        placements.clear();
    }
    PropagationOutcome {
        domain: state.to_board_domain(ctx),
        wipeout: state.is_wiped(),
        eliminations,
        placements,
    }
}

/// Work-queue fixpoint driver shared by the public entry point and the
/// search interleaving. Appends proof steps for every change.
pub(crate) fn run_fixpoint(
    ctx: &PropagationContext,
    state: &mut PropagationState,
    props: &[Box<dyn Propagator>],
    schedule: Schedule,
    serial: &mut u64,
    proof: &mut Proof,
) {
    if state.is_wiped() || props.is_empty() {
        return;
    }
    let n_ast = ctx.asterism_count();
    let mut queued = vec![vec![true; n_ast]; props.len()];
    let mut queues: Vec<VecDeque<usize>> = (0..props.len())
        .map(|_| (0..n_ast).collect::<VecDeque<_>>())
        .collect();

    // Stable cheapest-first order over propagator indices.
    let mut by_weight: Vec<usize> = (0..props.len()).collect();
    by_weight.sort_by_key(|&i| (props[i].weight(), i));
    let mut rng = match schedule {
        Schedule::CheapestFirst => None,
        Schedule::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };

    while !state.is_wiped() {
        let pick = match rng.as_mut() {
            None => by_weight
                .iter()
                .copied()
                .find(|&p| !queues[p].is_empty())
                .map(|p| (p, queues[p].pop_front().expect("non-empty queue"))),
            Some(rng) => {
                let nonempty: Vec<usize> =
                    (0..props.len()).filter(|&p| !queues[p].is_empty()).collect();
                if nonempty.is_empty() {
                    None
                } else {
                    let p = nonempty[rng.random_range(0..nonempty.len())];
                    let at = rng.random_range(0..queues[p].len());
                    Some((p, queues[p].remove(at).expect("in-range index")))
                }
            }
        };
        let Some((p, asterism)) = pick else {
            break;
        };
        queued[p][asterism] = false;
        props[p].apply_to_asterism(ctx, state, asterism);
        if !state.has_effects() {
            continue;
        }
        let effects = state.drain_effects();
        let actor = StepActor::Propagator(props[p].name().to_string());
        let changed = append_steps(ctx, &effects, actor, serial, proof);
        for slot in changed {
            for &a in ctx.asterisms_of_slot(slot) {
                let a = a as usize;
                for (p2, q) in queues.iter_mut().enumerate() {
                    if !queued[p2][a] {
                        queued[p2][a] = true;
                        q.push_back(a);
                    }
                }
            }
        }
    }
}

/// Segments a unit's effects into proof steps: every placement closes a
/// step carrying the eliminations that led to it, trailing eliminations
/// form a final placement-less step. Returns changed slots for dirty
/// marking.
pub(crate) fn append_steps(
    ctx: &PropagationContext,
    effects: &[Effect],
    actor: StepActor,
    serial: &mut u64,
    proof: &mut Proof,
) -> Vec<usize> {
    let mut changed = Vec::new();
    let mut pending: Vec<(CellId, Label)> = Vec::new();
    for effect in effects {
        match *effect {
            Effect::Eliminated { slot, label } => {
                pending.push((ctx.cell_of_slot(slot as usize), label));
                if !changed.contains(&(slot as usize)) {
                    changed.push(slot as usize);
                }
            }
            Effect::Forced { slot, label } => {
                if !changed.contains(&(slot as usize)) {
                    changed.push(slot as usize);
                }
                proof.push(ProofStep {
                    serial: *serial,
                    actor: actor.clone(),
                    eliminations: std::mem::take(&mut pending),
                    placement: Some((ctx.cell_of_slot(slot as usize), label)),
                });
                *serial += 1;
            }
        }
    }
    if !pending.is_empty() {
        proof.push(ProofStep {
            serial: *serial,
            actor,
            eliminations: pending,
            placement: None,
        });
        *serial += 1;
    }
    changed
}

/// Empirically probes a propagator's monotonicity: random domain pairs
/// `D' ⊆ D` over random small partial Latin boards must satisfy
/// `apply(D') ⊆ apply(D)` pointwise. Counterexamples are reported verbatim.
pub fn check_monotonic(prop: &dyn Propagator, trials: u32, seed: u64) -> MonotonicityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = trial_boards();
    let mut counterexamples = Vec::new();
    for _ in 0..trials {
        let plb = random_trial_plb(&pool, &mut rng);
        let ctx = match PropagationContext::new(&plb) {
            Ok(ctx) => ctx,
            Err(_) => continue,
        };
        let weaker = random_subdomain(&plb, None, &mut rng);
        let stronger = random_subdomain(&plb, Some(&weaker), &mut rng);
        let weaker_image = prop.apply(&ctx, &weaker);
        let stronger_image = prop.apply(&ctx, &stronger);
        let ordered = stronger_image
            .domain
            .masks()
            .iter()
            .zip(weaker_image.domain.masks())
            .all(|(s, w)| s.is_subset_of(*w));
        if !ordered {
            counterexamples.push(MonotonicityCounterexample {
                clues: plb.clues().collect(),
                board_name: plb.board().name().to_string(),
                weaker,
                stronger,
                weaker_image: weaker_image.domain,
                stronger_image: stronger_image.domain,
            });
        }
    }
    MonotonicityReport {
        trials,
        counterexamples,
    }
}

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub trials: u32,
    pub counterexamples: Vec<MonotonicityCounterexample>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// A violating pair, kept verbatim for inspection.
#[derive(Debug, Clone)]
pub struct MonotonicityCounterexample {
    pub board_name: String,
    pub clues: Vec<(CellId, Label)>,
    pub weaker: BoardDomain,
    pub stronger: BoardDomain,
    pub weaker_image: BoardDomain,
    pub stronger_image: BoardDomain,
}

fn trial_boards() -> Vec<(std::sync::Arc<Board>, LabelMultiset)> {
    use std::sync::Arc;
    let square = |n: usize, name: &str| {
        let mut constellation = Vec::new();
        for r in 0..n {
            constellation.push((0..n).map(|c| r * n + c).collect::<Vec<_>>());
        }
        for c in 0..n {
            constellation.push((0..n).map(|r| r * n + c).collect::<Vec<_>>());
        }
        Arc::new(Board::new(name, n * n, constellation).unwrap())
    };
    vec![
        (square(2, "square2"), LabelMultiset::set_of(2).unwrap()),
        (square(3, "square3"), LabelMultiset::set_of(3).unwrap()),
        (
            Arc::new(Board::new("chain", 4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap()),
            LabelMultiset::new(vec![2, 1]).unwrap(),
        ),
        (
            Arc::new(Board::new("bands", 6, vec![vec![0, 1, 2, 3], vec![2, 3, 4, 5]]).unwrap()),
            LabelMultiset::new(vec![2, 2]).unwrap(),
        ),
    ]
}

fn random_trial_plb(
    pool: &[(std::sync::Arc<Board>, LabelMultiset)],
    rng: &mut ChaCha8Rng,
) -> PartialLabeledBoard {
    let (board, multiset) = &pool[rng.random_range(0..pool.len())];
    let mut clues: Vec<(CellId, Label)> = Vec::new();
    let attempts = rng.random_range(0..=board.cell_count() / 2);
    for _ in 0..attempts {
        let cell = rng.random_range(0..board.cell_count());
        if clues.iter().any(|&(c, _)| c == cell) {
            continue;
        }
        let label = Label(rng.random_range(0..multiset.support()) as u16);
        clues.push((cell, label));
        let plb = PartialLabeledBoard::new(
            std::sync::Arc::clone(board),
            multiset.clone(),
            &clues,
            None,
        )
        .expect("valid clue");
        if !plb.is_partial_latin_board() {
            clues.pop();
        }
    }
    PartialLabeledBoard::new(std::sync::Arc::clone(board), multiset.clone(), &clues, None)
        .expect("valid clues")
}

/// A random domain between the initial domain and `at_most` (when given),
/// occasionally wiping a cell to exercise the collapsed path.
fn random_subdomain(
    plb: &PartialLabeledBoard,
    at_most: Option<&BoardDomain>,
    rng: &mut ChaCha8Rng,
) -> BoardDomain {
    let base = crate::domain::initial_domain(plb).expect("plb");
    let mut entries = Vec::new();
    for (cell, full) in base.iter() {
        let start = at_most.and_then(|d| d.get(cell)).unwrap_or(full);
        let mut mask = start;
        for label in start.labels() {
            if rng.random_bool(0.25) {
                mask.remove(label);
            }
        }
        if mask.is_empty() && !rng.random_bool(0.05) {
            // Mostly keep domains non-empty; rare wipes still get coverage.
            mask = start;
        }
        entries.push((cell, mask));
    }
    BoardDomain::new(entries)
}
