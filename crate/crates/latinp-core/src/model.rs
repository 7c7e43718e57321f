//! Boards, label multisets and (partial) labelings.
//!
//! A board is an abstract set of cells grouped into overlapping *asterisms*
//! (the generalization of rows, columns and boxes). Cells are plain integer
//! ids; geometry never enters the model. A `PartialLabeledBoard` attaches a
//! label multiset and a partial assignment to a board and is the universal
//! input of every solver entry point.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Cells are identified by dense indices `0..cell_count`.
pub type CellId = usize;

/// An interned label id, dense within a board's alphabet.
///
/// Display strings (digits, letters, words) live in the I/O layer; the model
/// and all solvers only ever see interned ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u16);

impl Label {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Largest supported alphabet. Cell domains are one machine word wide.
pub const MAX_SUPPORT: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("board must have at least one cell")]
    NoCells,
    #[error("cell {cell} out of range for board with {cell_count} cells")]
    CellOutOfRange { cell: CellId, cell_count: usize },
    #[error("multiset must contain at least one label")]
    EmptyMultiset,
    #[error("label {label} has zero count")]
    ZeroCount { label: Label },
    #[error("alphabet of {support} labels exceeds the maximum of {MAX_SUPPORT}")]
    SupportTooLarge { support: usize },
    #[error("label {label} at cell {cell} is outside the multiset support")]
    LabelOutOfSupport { cell: CellId, label: Label },
    #[error("cell {cell} labeled more than once")]
    DuplicateAssignment { cell: CellId },
    #[error("inscription names cell {cell} more than once")]
    InscriptionCellCollision { cell: CellId },
    #[error("inscription pair at cell {cell} is not among the clues")]
    InscriptionNotAmongClues { cell: CellId },
}

/// A `k`-multiset of labels: how many copies of each label every asterism
/// must hold. Counts are dense over the interned alphabet `0..support`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMultiset {
    counts: Vec<u32>,
    k: u32,
}

impl LabelMultiset {
    /// Builds a multiset from per-label counts; `counts[i]` is the count of
    /// label `i`. Every count must be at least one.
    pub fn new(counts: Vec<u32>) -> Result<Self, ModelError> {
        if counts.is_empty() {
            return Err(ModelError::EmptyMultiset);
        }
        if counts.len() > MAX_SUPPORT {
            return Err(ModelError::SupportTooLarge {
                support: counts.len(),
            });
        }
        for (i, &c) in counts.iter().enumerate() {
            if c == 0 {
                return Err(ModelError::ZeroCount {
                    label: Label(i as u16),
                });
            }
        }
        let k = counts.iter().sum();
        Ok(Self { counts, k })
    }

    /// The plain set alphabet `{0, .., n-1}`, one copy each.
    pub fn set_of(n: usize) -> Result<Self, ModelError> {
        Self::new(vec![1; n])
    }

    /// Total count `k` (the asterism size of a matching uniform board).
    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of distinct labels.
    #[inline]
    pub fn support(&self) -> usize {
        self.counts.len()
    }

    /// Count of one label; zero if outside the support.
    #[inline]
    pub fn count(&self, label: Label) -> u32 {
        self.counts.get(label.index()).copied().unwrap_or(0)
    }

    #[inline]
    pub fn contains(&self, label: Label) -> bool {
        label.index() < self.counts.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.counts.len()).map(|i| Label(i as u16))
    }
}

/// A board: a set of cells plus a constellation of asterisms covering it.
///
/// Asterisms may overlap and, coming from files, may even repeat; validation
/// reports structural defects instead of refusing to represent them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Board {
    name: String,
    cell_count: usize,
    constellation: Vec<Vec<CellId>>,
    /// For every cell, the indices of the asterisms containing it.
    memberships: Vec<Vec<usize>>,
}

impl Board {
    pub fn new(
        name: impl Into<String>,
        cell_count: usize,
        constellation: Vec<Vec<CellId>>,
    ) -> Result<Self, ModelError> {
        if cell_count == 0 {
            return Err(ModelError::NoCells);
        }
        let mut memberships = vec![Vec::new(); cell_count];
        for (idx, asterism) in constellation.iter().enumerate() {
            for &cell in asterism {
                if cell >= cell_count {
                    return Err(ModelError::CellOutOfRange { cell, cell_count });
                }
                if !memberships[cell].contains(&idx) {
                    memberships[cell].push(idx);
                }
            }
        }
        Ok(Self {
            name: name.into(),
            cell_count,
            constellation,
            memberships,
        })
    }

    #[inline]
    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    #[inline]
    pub fn constellation(&self) -> &[Vec<CellId>] {
        &self.constellation
    }

    #[inline]
    pub fn asterism(&self, idx: usize) -> &[CellId] {
        &self.constellation[idx]
    }

    /// Indices of the asterisms containing `cell`.
    #[inline]
    pub fn asterisms_of(&self, cell: CellId) -> &[usize] {
        &self.memberships[cell]
    }

    /// Sum of all asterism sizes; the unit of the linear-time bound on
    /// the partial-Latin-board check.
    pub fn total_asterism_cells(&self) -> usize {
        self.constellation.iter().map(Vec::len).sum()
    }

    /// Checks that the constellation covers all cells and that every
    /// asterism has exactly `k` distinct cells. Violations are data, not
    /// failures; an empty violation list means the board is a valid
    /// `k`-uniform board. Duplicate asterisms are merely warned about.
    pub fn validate(&self, k: u32) -> ValidationReport {
        let mut violations = Vec::new();
        let mut warnings = Vec::new();
        let mut covered = vec![false; self.cell_count];
        let mut seen = vec![false; self.cell_count];

        for (idx, asterism) in self.constellation.iter().enumerate() {
            let mut distinct = 0usize;
            for &cell in asterism {
                covered[cell] = true;
                if seen[cell] {
                    violations.push(BoardViolation::DuplicateCellInAsterism {
                        asterism: idx,
                        cell,
                    });
                } else {
                    seen[cell] = true;
                    distinct += 1;
                }
            }
            for &cell in asterism {
                seen[cell] = false;
            }
            if distinct != k as usize {
                violations.push(BoardViolation::AsterismWrongSize {
                    asterism: idx,
                    size: distinct,
                });
            }
            for (earlier, other) in self.constellation[..idx].iter().enumerate() {
                if same_cell_set(other, asterism) {
                    warnings.push(BoardWarning::DuplicateAsterism {
                        asterism: idx,
                        duplicate_of: earlier,
                    });
                    break;
                }
            }
        }
        for (cell, &c) in covered.iter().enumerate() {
            if !c {
                violations.push(BoardViolation::CellNotCovered { cell });
            }
        }
        ValidationReport {
            violations,
            warnings,
        }
    }
}

fn same_cell_set(a: &[CellId], b: &[CellId]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    a.dedup();
    b.sort_unstable();
    b.dedup();
    a == b
}

/// Free-function form of [`Board::validate`].
pub fn validate_board(board: &Board, k: u32) -> ValidationReport {
    board.validate(k)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoardViolation {
    CellNotCovered { cell: CellId },
    AsterismWrongSize { asterism: usize, size: usize },
    DuplicateCellInAsterism { asterism: usize, cell: CellId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoardWarning {
    DuplicateAsterism { asterism: usize, duplicate_of: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<BoardViolation>,
    pub warnings: Vec<BoardWarning>,
}

impl ValidationReport {
    /// True when there are no violations; warnings do not disqualify.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Clue pairs pinned in every instance of a Puzzle; the mechanism behind
/// word-inscribed boards. Pairs are kept sorted by cell.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Inscription {
    pairs: Vec<(CellId, Label)>,
}

impl Inscription {
    pub fn new(mut pairs: Vec<(CellId, Label)>) -> Result<Self, ModelError> {
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(ModelError::InscriptionCellCollision { cell: w[0].0 });
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(CellId, Label)] {
        &self.pairs
    }

    pub fn contains_cell(&self, cell: CellId) -> bool {
        self.pairs.binary_search_by_key(&cell, |p| p.0).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }
}

/// A board plus a multiset and a partial cell labeling; optionally an
/// inscription whose pairs must appear among the assigned clues.
///
/// Immutable after construction and cheap to clone: the board is shared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialLabeledBoard {
    board: Arc<Board>,
    multiset: LabelMultiset,
    assignment: Vec<Option<Label>>,
    inscription: Option<Inscription>,
}

impl PartialLabeledBoard {
    pub fn new(
        board: Arc<Board>,
        multiset: LabelMultiset,
        clues: &[(CellId, Label)],
        inscription: Option<Inscription>,
    ) -> Result<Self, ModelError> {
        let mut assignment = vec![None; board.cell_count()];
        for &(cell, label) in clues {
            if cell >= board.cell_count() {
                return Err(ModelError::CellOutOfRange {
                    cell,
                    cell_count: board.cell_count(),
                });
            }
            if !multiset.contains(label) {
                return Err(ModelError::LabelOutOfSupport { cell, label });
            }
            if assignment[cell].is_some() {
                return Err(ModelError::DuplicateAssignment { cell });
            }
            assignment[cell] = Some(label);
        }
        if let Some(ins) = &inscription {
            for &(cell, label) in ins.pairs() {
                if cell >= board.cell_count() {
                    return Err(ModelError::CellOutOfRange {
                        cell,
                        cell_count: board.cell_count(),
                    });
                }
                if assignment[cell] != Some(label) {
                    return Err(ModelError::InscriptionNotAmongClues { cell });
                }
            }
        }
        Ok(Self {
            board,
            multiset,
            assignment,
            inscription,
        })
    }

    /// An unlabeled board over the given multiset.
    pub fn empty(board: Arc<Board>, multiset: LabelMultiset) -> Self {
        let assignment = vec![None; board.cell_count()];
        Self {
            board,
            multiset,
            assignment,
            inscription: None,
        }
    }

    #[inline]
    pub fn board(&self) -> &Board {
        &self.board
    }

    #[inline]
    pub fn board_arc(&self) -> &Arc<Board> {
        &self.board
    }

    #[inline]
    pub fn multiset(&self) -> &LabelMultiset {
        &self.multiset
    }

    #[inline]
    pub fn label_at(&self, cell: CellId) -> Option<Label> {
        self.assignment[cell]
    }

    #[inline]
    pub fn assignment(&self) -> &[Option<Label>] {
        &self.assignment
    }

    pub fn inscription(&self) -> Option<&Inscription> {
        self.inscription.as_ref()
    }

    pub fn clues(&self) -> impl Iterator<Item = (CellId, Label)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(c, l)| l.map(|l| (c, l)))
    }

    pub fn clue_count(&self) -> usize {
        self.assignment.iter().filter(|l| l.is_some()).count()
    }

    pub fn empty_cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(c, l)| l.is_none().then_some(c))
    }

    pub fn is_total(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    /// Same board and multiset, different clue set. Used by the generator
    /// and the classification pipeline.
    pub fn with_clues(&self, clues: &[(CellId, Label)]) -> Result<Self, ModelError> {
        Self::new(
            Arc::clone(&self.board),
            self.multiset.clone(),
            clues,
            self.inscription.clone(),
        )
    }

    /// Same board and multiset with both the clues and the inscription
    /// replaced.
    pub fn with_clues_and_inscription(
        &self,
        clues: &[(CellId, Label)],
        inscription: Option<Inscription>,
    ) -> Result<Self, ModelError> {
        Self::new(
            Arc::clone(&self.board),
            self.multiset.clone(),
            clues,
            inscription,
        )
    }

    /// The partial-Latin-board condition: in every asterism, no label occurs
    /// more often than its multiset count. Runs in time linear in the total
    /// number of asterism cells.
    pub fn is_partial_latin_board(&self) -> bool {
        let mut counts = vec![0u32; self.multiset.support()];
        for asterism in self.board.constellation() {
            let mut ok = true;
            for &cell in asterism {
                if let Some(label) = self.assignment[cell] {
                    counts[label.index()] += 1;
                    if counts[label.index()] > self.multiset.count(label) {
                        ok = false;
                    }
                }
            }
            for &cell in asterism {
                if let Some(label) = self.assignment[cell] {
                    counts[label.index()] = 0;
                }
            }
            if !ok {
                return false;
            }
        }
        true
    }

    /// True when the assignment is total and every asterism holds the
    /// multiset exactly.
    pub fn is_latin_board(&self) -> bool {
        if !self.is_total() {
            return false;
        }
        let mut counts = vec![0u32; self.multiset.support()];
        for asterism in self.board.constellation() {
            for &cell in asterism {
                let label = self.assignment[cell].expect("total assignment");
                counts[label.index()] += 1;
            }
            let exact = counts
                .iter()
                .enumerate()
                .all(|(i, &c)| c == self.multiset.count(Label(i as u16)));
            for &cell in asterism {
                let label = self.assignment[cell].expect("total assignment");
                counts[label.index()] = 0;
            }
            if !exact {
                return false;
            }
        }
        true
    }
}

/// Free-function form of [`PartialLabeledBoard::is_partial_latin_board`].
pub fn is_partial_latin_board(plb: &PartialLabeledBoard) -> bool {
    plb.is_partial_latin_board()
}

/// Free-function form of [`PartialLabeledBoard::is_latin_board`].
pub fn is_latin_board(plb: &PartialLabeledBoard) -> bool {
    plb.is_latin_board()
}

/// A totally labeled board in which every asterism holds the multiset
/// exactly: the witness type returned by the solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinBoard(PartialLabeledBoard);

impl LatinBoard {
    /// Wraps a total labeling after checking the Latin-board condition.
    pub fn try_new(plb: PartialLabeledBoard) -> Result<Self, PartialLabeledBoard> {
        if plb.is_latin_board() {
            Ok(Self(plb))
        } else {
            Err(plb)
        }
    }

    #[inline]
    pub fn as_plb(&self) -> &PartialLabeledBoard {
        &self.0
    }

    pub fn into_plb(self) -> PartialLabeledBoard {
        self.0
    }

    #[inline]
    pub fn label_at(&self, cell: CellId) -> Label {
        self.0.assignment[cell].expect("Latin boards are total")
    }
}

impl std::ops::Deref for LatinBoard {
    type Target = PartialLabeledBoard;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}
