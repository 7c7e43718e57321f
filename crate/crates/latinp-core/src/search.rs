//! Exponential attrition: backtracking enumeration of Latin boards.
//!
//! The search interleaves the polynomial propagators between decisions,
//! restores state from a trail on backtrack, optionally records nogoods,
//! and logs every written label into a proof. Each found solution carries
//! its proof and the tag sequence of the placements along its path, which
//! is what single-pass puzzle extraction consumes.
//!
//! Contract of [`enumerate_solutions`]: an input that is not a partial
//! Latin board yields an empty list; an input that is already a Latin
//! board yields exactly itself; otherwise all solutions are returned under
//! an infinite limit and exactly `min(N, total)` under a finite one, in a
//! deterministic order that finite limits prefix.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use crate::domain::{initial_domain, BoardDomain};
use crate::model::{CellId, Label, LatinBoard, PartialLabeledBoard};
use crate::proof::{Proof, ProofStep, StepActor};
use crate::propagate::{
    default_propagators, run_fixpoint, PropagationContext, PropagationState, Propagator, Schedule,
};

/// The solution cap `N`: a positive integer or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionLimit {
    Finite(u64),
    Infinite,
}

impl SolutionLimit {
    fn reached(self, found: usize) -> bool {
        match self {
            SolutionLimit::Finite(n) => found as u64 >= n,
            SolutionLimit::Infinite => false,
        }
    }
}

/// Branching heuristic id. The default picks a cell with the fewest
/// remaining candidates, ties broken by lowest cell id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branching {
    #[default]
    MinDomain,
}

/// Instantiation heuristic id. The default tries candidate labels in
/// ascending interned order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Instantiation {
    #[default]
    AscendingLabels,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub limit: SolutionLimit,
    pub interleave_propagation: bool,
    pub nogood_recording: bool,
    pub branching: Branching,
    pub instantiation: Instantiation,
    /// Randomizes only the propagation schedule; for the shipped monotonic
    /// propagators this perturbs proofs and stats, never the solution set.
    pub schedule_seed: Option<u64>,
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
    pub nogood_capacity: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            limit: SolutionLimit::Infinite,
            interleave_propagation: true,
            nogood_recording: false,
            branching: Branching::MinDomain,
            instantiation: Instantiation::AscendingLabels,
            schedule_seed: None,
            max_nodes: None,
            max_time: None,
            nogood_capacity: 1024,
        }
    }
}

impl SearchConfig {
    pub fn with_limit(limit: SolutionLimit) -> Self {
        Self {
            limit,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub backtracks: u64,
    pub backjumps: u64,
    pub propagations: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    Complete,
    Incomplete(BudgetExceeded),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetExceeded {
    Nodes,
    WallTime,
}

/// One tagged label write on a solution path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tag {
    pub serial: u64,
    pub cell: CellId,
    pub label: Label,
}

/// A solution together with the proof and tag sequence of its search path.
#[derive(Debug, Clone)]
pub struct FoundSolution {
    pub board: LatinBoard,
    pub proof: Proof,
    pub tags: Vec<Tag>,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub solutions: Vec<FoundSolution>,
    pub stats: SearchStats,
    pub status: SearchStatus,
}

impl SearchResult {
    fn empty(status: SearchStatus) -> Self {
        Self {
            solutions: Vec::new(),
            stats: SearchStats::default(),
            status,
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.status, SearchStatus::Complete)
    }
}

/// Default branching over a public board domain: minimum domain size among
/// non-singleton cells, ties broken by lowest cell id; candidate labels in
/// ascending interned order. Returns `None` when every domain is decided.
pub fn choose_branch(domain: &BoardDomain, cfg: &SearchConfig) -> Option<(CellId, Vec<Label>)> {
    let Branching::MinDomain = cfg.branching;
    let Instantiation::AscendingLabels = cfg.instantiation;
    let mut best: Option<(u32, CellId)> = None;
    for (cell, mask) in domain.iter() {
        let len = mask.len();
        if len >= 2 && best.is_none_or(|(b, _)| len < b) {
            best = Some((len, cell));
        }
    }
    let (_, cell) = best?;
    let labels = domain.get(cell).expect("cell present").labels().collect();
    Some((cell, labels))
}

/// Bounded FIFO store of assignment fragments proven jointly unextendable.
#[derive(Debug, Clone, Default)]
pub struct NogoodStore {
    capacity: usize,
    store: VecDeque<Vec<(CellId, Label)>>,
}

impl NogoodStore {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            store: VecDeque::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }

    /// Records a fragment; the oldest entry is evicted at capacity.
    pub fn record(&mut self, fragment: &[(CellId, Label)]) {
        if self.capacity == 0 {
            return;
        }
        let mut fragment = fragment.to_vec();
        fragment.sort_unstable();
        if self.store.len() == self.capacity {
            self.store.pop_front();
        }
        self.store.push_back(fragment);
    }

    /// True iff `assignment` extends some recorded nogood.
    pub fn consult(&self, assignment: &[(CellId, Label)]) -> bool {
        self.store
            .iter()
            .any(|ng| ng.iter().all(|pair| assignment.contains(pair)))
    }
}

/// Enumerates Latin boards completing `plb` under the given configuration.
pub fn enumerate_solutions(plb: &PartialLabeledBoard, cfg: &SearchConfig) -> SearchResult {
    let started = Instant::now();
    if !plb.board().validate(plb.multiset().k()).is_valid() || !plb.is_partial_latin_board() {
        return SearchResult::empty(SearchStatus::Complete);
    }
    if plb.is_latin_board() {
        let board = LatinBoard::try_new(plb.clone()).expect("checked Latin board");
        return SearchResult {
            solutions: vec![FoundSolution {
                board,
                proof: Proof::new(),
                tags: Vec::new(),
            }],
            stats: SearchStats {
                wall_time: started.elapsed(),
                ..SearchStats::default()
            },
            status: SearchStatus::Complete,
        };
    }

    let ctx = PropagationContext::new(plb).expect("checked partial Latin board");
    let domain = initial_domain(plb).expect("checked partial Latin board");
    let mut driver = Driver::new(plb, &ctx, cfg, started);
    let mut state = PropagationState::from_domain(&ctx, &domain);
    driver.root(&mut state);
    driver.finish(started)
}

struct Driver<'a> {
    plb: &'a PartialLabeledBoard,
    ctx: &'a PropagationContext,
    cfg: &'a SearchConfig,
    props: Vec<Box<dyn Propagator>>,
    schedule: Schedule,
    serial: u64,
    proof: Proof,
    tags: Vec<Tag>,
    decisions: Vec<(CellId, Label)>,
    nogoods: NogoodStore,
    solutions: Vec<FoundSolution>,
    stats: SearchStats,
    started: Instant,
    stopped: Option<SearchStatus>,
}

impl<'a> Driver<'a> {
    fn new(
        plb: &'a PartialLabeledBoard,
        ctx: &'a PropagationContext,
        cfg: &'a SearchConfig,
        started: Instant,
    ) -> Self {
        Self {
            plb,
            ctx,
            cfg,
            props: default_propagators(),
            schedule: match cfg.schedule_seed {
                Some(seed) => Schedule::Seeded(seed),
                None => Schedule::CheapestFirst,
            },
            serial: 0,
            proof: Proof::new(),
            tags: Vec::new(),
            decisions: Vec::new(),
            nogoods: NogoodStore::new(cfg.nogood_capacity),
            solutions: Vec::new(),
            stats: SearchStats::default(),
            started,
            stopped: None,
        }
    }

    fn root(&mut self, state: &mut PropagationState) {
        if self.cfg.interleave_propagation {
            self.propagate(state);
            if state.is_wiped() {
                return;
            }
        }
        if state.is_resolved() {
            self.record_solution(state);
            return;
        }
        self.dfs(state);
    }

    fn finish(mut self, started: Instant) -> SearchResult {
        self.stats.wall_time = started.elapsed();
        SearchResult {
            solutions: self.solutions,
            stats: self.stats,
            status: self.stopped.unwrap_or(SearchStatus::Complete),
        }
    }

    fn propagate(&mut self, state: &mut PropagationState) {
        self.stats.propagations += 1;
        let before = self.proof.len();
        run_fixpoint(
            self.ctx,
            state,
            &self.props,
            self.schedule,
            &mut self.serial,
            &mut self.proof,
        );
        self.sync_tags(before);
    }

    /// Mirrors new placement steps into the tag stack.
    fn sync_tags(&mut self, from_step: usize) {
        for step in &self.proof.steps()[from_step..] {
            if let Some((cell, label)) = step.placement {
                self.tags.push(Tag {
                    serial: step.serial,
                    cell,
                    label,
                });
            }
        }
    }

    fn over_budget(&mut self) -> bool {
        if self.stopped.is_some() {
            return true;
        }
        if let Some(cap) = self.cfg.max_nodes {
            if self.stats.nodes >= cap {
                self.stopped = Some(SearchStatus::Incomplete(BudgetExceeded::Nodes));
                return true;
            }
        }
        if let Some(cap) = self.cfg.max_time {
            if self.stats.nodes.is_multiple_of(64) && self.started.elapsed() >= cap {
                self.stopped = Some(SearchStatus::Incomplete(BudgetExceeded::WallTime));
                return true;
            }
        }
        false
    }

    /// Explores the subtree below the current state. Returns the number of
    /// solutions found inside it, or `None` when the subtree was not fully
    /// explored (limit reached or budget exceeded).
    fn dfs(&mut self, state: &mut PropagationState) -> Option<u64> {
        if self.over_budget() {
            return None;
        }
        self.stats.nodes += 1;

        let (slot, labels) = self
            .branch_slot(state)
            .expect("dfs is only entered on unresolved states");

        let mut found = 0u64;
        let mut exhausted = true;
        for label in labels {
            if self.cfg.limit.reached(self.solutions.len()) || self.over_budget() {
                exhausted = false;
                break;
            }
            let trail_mark = state.mark();
            let proof_mark = self.proof.len();
            let tag_mark = self.tags.len();

            let cell = self.ctx.cell_of_slot(slot);
            state.force(self.ctx, slot, label, false);
            state.drain_effects();
            self.proof.push(ProofStep {
                serial: self.serial,
                actor: StepActor::Backtrack,
                eliminations: Vec::new(),
                placement: Some((cell, label)),
            });
            self.tags.push(Tag {
                serial: self.serial,
                cell,
                label,
            });
            self.serial += 1;
            self.decisions.push((cell, label));

            let pruned = self.cfg.nogood_recording && self.nogoods.consult(&self.decisions);
            let sub = if pruned {
                self.stats.backjumps += 1;
                Some(0)
            } else if state.is_wiped() {
                Some(0)
            } else {
                if self.cfg.interleave_propagation {
                    self.propagate(state);
                }
                if state.is_wiped() {
                    Some(0)
                } else if state.is_resolved() {
                    self.record_solution(state);
                    Some(1)
                } else {
                    self.dfs(state)
                }
            };

            self.decisions.pop();
            state.undo_to(self.ctx, trail_mark);
            self.proof.truncate(proof_mark);
            self.tags.truncate(tag_mark);
            self.stats.backtracks += 1;

            match sub {
                Some(n) => {
                    found += n;
                    // A fully explored, solution-free subtree makes its
                    // decision set a nogood.
                    if self.cfg.nogood_recording && n == 0 {
                        let mut fragment = self.decisions.clone();
                        fragment.push((cell, label));
                        self.nogoods.record(&fragment);
                    }
                }
                None => exhausted = false,
            }
        }
        exhausted.then_some(found)
    }

    fn branch_slot(&self, state: &PropagationState) -> Option<(usize, Vec<Label>)> {
        let Branching::MinDomain = self.cfg.branching;
        let mut best: Option<(u32, usize)> = None;
        for slot in 0..self.ctx.slot_count() {
            let len = state.mask(slot).len();
            if len >= 2 && best.is_none_or(|(b, _)| len < b) {
                best = Some((len, slot));
            }
        }
        let (_, slot) = best?;
        let Instantiation::AscendingLabels = self.cfg.instantiation;
        Some((slot, state.mask(slot).labels().collect()))
    }

    fn record_solution(&mut self, state: &PropagationState) {
        let mut clues: Vec<(CellId, Label)> = self.plb.clues().collect();
        for slot in 0..self.ctx.slot_count() {
            let label = state.mask(slot).sole().expect("resolved state");
            clues.push((self.ctx.cell_of_slot(slot), label));
        }
        let total = self
            .plb
            .with_clues(&clues)
            .expect("solution labels stay in support");
        let board =
            LatinBoard::try_new(total).expect("resolved, violation-free states are Latin boards");
        self.solutions.push(FoundSolution {
            board,
            proof: self.proof.clone(),
            tags: self.tags.clone(),
        });
    }
}

/// Root-parallel enumeration: splits the first branching cell's candidates
/// across workers and merges their solution lists in branch order, which
/// reproduces the sequential solution order exactly. Budgets apply per
/// worker; a finite limit is applied to the merged list.
pub fn enumerate_solutions_parallel(
    plb: &PartialLabeledBoard,
    cfg: &SearchConfig,
    jobs: usize,
) -> SearchResult {
    if jobs <= 1 {
        return enumerate_solutions(plb, cfg);
    }
    let started = Instant::now();
    if !plb.board().validate(plb.multiset().k()).is_valid() || !plb.is_partial_latin_board() {
        return SearchResult::empty(SearchStatus::Complete);
    }
    if plb.is_latin_board() {
        return enumerate_solutions(plb, cfg);
    }
    let ctx = PropagationContext::new(plb).expect("checked partial Latin board");
    let domain = initial_domain(plb).expect("checked partial Latin board");
    let mut probe = PropagationState::from_domain(&ctx, &domain);
    let mut serial = 0u64;
    let mut root_proof = Proof::new();
    if cfg.interleave_propagation {
        run_fixpoint(
            &ctx,
            &mut probe,
            &default_propagators(),
            Schedule::CheapestFirst,
            &mut serial,
            &mut root_proof,
        );
    }
    if probe.is_wiped() || probe.is_resolved() {
        return enumerate_solutions(plb, cfg);
    }
    let Some((cell, labels)) = choose_root(&ctx, &probe) else {
        return enumerate_solutions(plb, cfg);
    };

    let mut buckets: Vec<Option<SearchResult>> = Vec::new();
    buckets.resize_with(labels.len(), || None);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (i, &label) in labels.iter().enumerate() {
            let worker_cfg = cfg.clone();
            let plb = plb.clone();
            handles.push((
                i,
                scope.spawn(move || {
                    let mut clues: Vec<(CellId, Label)> = plb.clues().collect();
                    clues.push((cell, label));
                    match plb.with_clues(&clues) {
                        Ok(sub) => enumerate_solutions(&sub, &worker_cfg),
                        Err(_) => SearchResult::empty(SearchStatus::Complete),
                    }
                }),
            ));
        }
        let _ = jobs;
        for (i, handle) in handles {
            buckets[i] = Some(handle.join().expect("search worker panicked"));
        }
    });

    let mut merged = SearchResult::empty(SearchStatus::Complete);
    for bucket in buckets.into_iter().flatten() {
        merged.solutions.extend(bucket.solutions);
        merged.stats.nodes += bucket.stats.nodes;
        merged.stats.backtracks += bucket.stats.backtracks;
        merged.stats.backjumps += bucket.stats.backjumps;
        merged.stats.propagations += bucket.stats.propagations;
        if let SearchStatus::Incomplete(reason) = bucket.status {
            merged.status = SearchStatus::Incomplete(reason);
        }
    }
    if let SolutionLimit::Finite(n) = cfg.limit {
        merged.solutions.truncate(n as usize);
    }
    merged.stats.wall_time = started.elapsed();
    merged
}

fn choose_root(ctx: &PropagationContext, state: &PropagationState) -> Option<(CellId, Vec<Label>)> {
    let mut best: Option<(u32, usize)> = None;
    for slot in 0..ctx.slot_count() {
        let len = state.mask(slot).len();
        if len >= 2 && best.is_none_or(|(b, _)| len < b) {
            best = Some((len, slot));
        }
    }
    let (_, slot) = best?;
    Some((ctx.cell_of_slot(slot), state.mask(slot).labels().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Board, LabelMultiset};
    use std::sync::Arc;

    fn latin_square_board(n: usize) -> Arc<Board> {
        let mut constellation = Vec::new();
        for r in 0..n {
            constellation.push((0..n).map(|c| r * n + c).collect::<Vec<_>>());
        }
        for c in 0..n {
            constellation.push((0..n).map(|r| r * n + c).collect::<Vec<_>>());
        }
        Arc::new(Board::new(format!("latin{n}"), n * n, constellation).unwrap())
    }

    fn empty_square(n: usize) -> PartialLabeledBoard {
        PartialLabeledBoard::empty(latin_square_board(n), LabelMultiset::set_of(n).unwrap())
    }

    #[test]
    fn small_latin_square_counts() {
        for (n, expected) in [(1usize, 1usize), (2, 2), (3, 12)] {
            let result = enumerate_solutions(&empty_square(n), &SearchConfig::default());
            assert!(result.is_complete());
            assert_eq!(result.solutions.len(), expected, "order {n}");
        }
    }

    #[test]
    fn propagation_toggle_preserves_the_solution_set() {
        let plb = empty_square(3);
        let with = enumerate_solutions(&plb, &SearchConfig::default());
        let without = enumerate_solutions(
            &plb,
            &SearchConfig {
                interleave_propagation: false,
                ..SearchConfig::default()
            },
        );
        let boards = |r: &SearchResult| {
            let mut v: Vec<_> = r
                .solutions
                .iter()
                .map(|s| s.board.assignment().to_vec())
                .collect();
            v.sort();
            v
        };
        assert_eq!(boards(&with), boards(&without));
    }

    #[test]
    fn non_plb_input_yields_an_empty_list() {
        let board = latin_square_board(2);
        let plb = PartialLabeledBoard::new(
            board,
            LabelMultiset::set_of(2).unwrap(),
            &[(0, Label(0)), (1, Label(0))],
            None,
        )
        .unwrap();
        let result = enumerate_solutions(&plb, &SearchConfig::default());
        assert!(result.is_complete());
        assert!(result.solutions.is_empty());
    }

    #[test]
    fn latin_board_input_returns_itself() {
        let board = latin_square_board(2);
        let plb = PartialLabeledBoard::new(
            board,
            LabelMultiset::set_of(2).unwrap(),
            &[(0, Label(0)), (1, Label(1)), (2, Label(1)), (3, Label(0))],
            None,
        )
        .unwrap();
        let result = enumerate_solutions(&plb, &SearchConfig::default());
        assert_eq!(result.solutions.len(), 1);
        assert!(result.solutions[0].proof.is_empty());
        assert_eq!(result.solutions[0].board.as_plb(), &plb);
    }

    #[test]
    fn finite_limits_are_prefixes_of_the_full_run() {
        let plb = empty_square(3);
        let full = enumerate_solutions(&plb, &SearchConfig::default());
        for n in 1..=full.solutions.len() as u64 {
            let capped =
                enumerate_solutions(&plb, &SearchConfig::with_limit(SolutionLimit::Finite(n)));
            assert_eq!(capped.solutions.len(), n as usize);
            for (a, b) in capped.solutions.iter().zip(&full.solutions) {
                assert_eq!(a.board.assignment(), b.board.assignment());
            }
        }
    }

    #[test]
    fn nogood_recording_preserves_the_solution_set() {
        // The 2x2-boxed board: all 288 solutions either way.
        let mut constellation = Vec::new();
        for r in 0..4usize {
            constellation.push((0..4).map(|c| r * 4 + c).collect::<Vec<_>>());
        }
        for c in 0..4usize {
            constellation.push((0..4).map(|r| r * 4 + c).collect::<Vec<_>>());
        }
        for br in 0..2usize {
            for bc in 0..2usize {
                constellation.push(vec![
                    br * 8 + bc * 2,
                    br * 8 + bc * 2 + 1,
                    br * 8 + bc * 2 + 4,
                    br * 8 + bc * 2 + 5,
                ]);
            }
        }
        let board = Arc::new(Board::new("boxed4", 16, constellation).unwrap());
        let plb = PartialLabeledBoard::empty(board, LabelMultiset::set_of(4).unwrap());
        let plain = enumerate_solutions(&plb, &SearchConfig::default());
        assert_eq!(plain.solutions.len(), 288);
        let with_nogoods = enumerate_solutions(
            &plb,
            &SearchConfig {
                nogood_recording: true,
                interleave_propagation: false,
                ..SearchConfig::default()
            },
        );
        let set = |r: &SearchResult| {
            let mut v: Vec<_> = r
                .solutions
                .iter()
                .map(|s| s.board.assignment().to_vec())
                .collect();
            v.sort();
            v
        };
        assert_eq!(set(&plain), set(&with_nogoods));
    }

    #[test]
    fn node_budget_reports_incomplete() {
        let plb = empty_square(4);
        let result = enumerate_solutions(
            &plb,
            &SearchConfig {
                max_nodes: Some(3),
                interleave_propagation: false,
                ..SearchConfig::default()
            },
        );
        assert_eq!(
            result.status,
            SearchStatus::Incomplete(BudgetExceeded::Nodes)
        );
    }

    #[test]
    fn proofs_replay_to_their_solutions() {
        let plb = empty_square(3);
        let result = enumerate_solutions(&plb, &SearchConfig::default());
        for sol in &result.solutions {
            let replayed = sol.proof.replay(&plb).unwrap();
            assert_eq!(replayed.assignment(), sol.board.assignment());
        }
    }

    #[test]
    fn tags_are_strictly_increasing_and_cover_all_empty_cells() {
        let plb = empty_square(3);
        let result = enumerate_solutions(&plb, &SearchConfig::default());
        for sol in &result.solutions {
            assert!(sol.tags.windows(2).all(|w| w[0].serial < w[1].serial));
            assert_eq!(sol.tags.len(), 9);
        }
    }

    #[test]
    fn parallel_enumeration_matches_sequential_order() {
        let plb = empty_square(3);
        let seq = enumerate_solutions(&plb, &SearchConfig::default());
        let par = enumerate_solutions_parallel(&plb, &SearchConfig::default(), 3);
        assert_eq!(seq.solutions.len(), par.solutions.len());
        for (a, b) in seq.solutions.iter().zip(&par.solutions) {
            assert_eq!(a.board.assignment(), b.board.assignment());
        }
    }

    #[test]
    fn choose_branch_prefers_small_domains_and_low_ids() {
        use crate::domain::CellDomain;
        let d = BoardDomain::new(vec![
            (0, CellDomain::full(3)),
            (1, CellDomain::from_bits(0b011)),
            (2, CellDomain::from_bits(0b110)),
        ]);
        let (cell, labels) = choose_branch(&d, &SearchConfig::default()).unwrap();
        assert_eq!(cell, 1);
        assert_eq!(labels, vec![Label(0), Label(1)]);
    }

    #[test]
    fn choose_branch_on_decided_domain_is_none() {
        use crate::domain::CellDomain;
        let d = BoardDomain::new(vec![(0, CellDomain::singleton(Label(1)))]);
        assert!(choose_branch(&d, &SearchConfig::default()).is_none());
    }

    #[test]
    fn nogood_store_consults_recorded_fragments() {
        let mut store = NogoodStore::new(2);
        assert!(!store.consult(&[(0, Label(0))]));
        store.record(&[(0, Label(0)), (1, Label(1))]);
        assert!(store.consult(&[(1, Label(1)), (0, Label(0))]));
        assert!(store.consult(&[(0, Label(0)), (1, Label(1)), (2, Label(0))]));
        assert!(!store.consult(&[(0, Label(0))]));
        // FIFO eviction at capacity.
        store.record(&[(2, Label(0))]);
        store.record(&[(3, Label(0))]);
        assert!(!store.consult(&[(0, Label(0)), (1, Label(1))]));
        assert!(store.consult(&[(3, Label(0))]));
    }

    #[test]
    fn state_restoration_is_bit_exact_after_backtracking() {
        let plb = empty_square(3);
        let ctx = PropagationContext::new(&plb).unwrap();
        let domain = initial_domain(&plb).unwrap();
        let mut state = PropagationState::from_domain(&ctx, &domain);
        let snapshot = state.masks().to_vec();
        let mark = state.mark();
        state.force(&ctx, 0, Label(0), false);
        let mut proof = Proof::new();
        let mut serial = 0;
        run_fixpoint(
            &ctx,
            &mut state,
            &default_propagators(),
            Schedule::CheapestFirst,
            &mut serial,
            &mut proof,
        );
        assert_ne!(state.masks(), snapshot.as_slice());
        state.undo_to(&ctx, mark);
        assert_eq!(state.masks(), snapshot.as_slice());
    }
}
