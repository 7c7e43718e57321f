//! Cell domains and board domains.
//!
//! A cell domain is the candidate-label set of one empty cell, held as a
//! one-word bit mask over interned label ids so that the attrition hot loop
//! works in O(1) set operations. A board domain maps every empty cell of a
//! partial Latin board to its cell domain; domains are compared by the
//! pointwise-inclusion partial order that all attrition is measured against.

use num_bigint::BigUint;
use thiserror::Error;

use crate::model::{CellId, Label, PartialLabeledBoard};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("input is not a partial Latin board")]
    NotPartialLatin,
    #[error("board domains are keyed by different empty-cell sets")]
    CellSetMismatch,
}

/// Candidate labels of one empty cell, as a bit mask over label ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellDomain(u64);

impl CellDomain {
    pub const EMPTY: CellDomain = CellDomain(0);

    /// The full domain over an alphabet of `support` labels.
    #[inline]
    pub fn full(support: usize) -> Self {
        debug_assert!((1..=64).contains(&support));
        if support == 64 {
            Self(u64::MAX)
        } else {
            Self((1u64 << support) - 1)
        }
    }

    #[inline]
    pub fn singleton(label: Label) -> Self {
        Self(1u64 << label.index())
    }

    #[inline]
    pub fn from_bits(bits: u64) -> Self {
        Self(bits)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn contains(self, label: Label) -> bool {
        self.0 & (1u64 << label.index()) != 0
    }

    #[inline]
    pub fn insert(&mut self, label: Label) {
        self.0 |= 1u64 << label.index();
    }

    #[inline]
    pub fn remove(&mut self, label: Label) {
        self.0 &= !(1u64 << label.index());
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_singleton(self) -> bool {
        self.0 != 0 && self.0 & (self.0 - 1) == 0
    }

    /// The only candidate, when the domain is a singleton.
    #[inline]
    pub fn sole(self) -> Option<Label> {
        if self.is_singleton() {
            Some(Label(self.0.trailing_zeros() as u16))
        } else {
            None
        }
    }

    #[inline]
    pub fn is_subset_of(self, other: CellDomain) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn labels(self) -> impl Iterator<Item = Label> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros();
                bits &= bits - 1;
                Some(Label(i as u16))
            }
        })
    }
}

/// The domains of all empty cells of a partial labeled board, kept as
/// parallel arrays sorted by cell id. Snapshots are plain clones and
/// restoration is bit-exact by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoardDomain {
    cells: Vec<CellId>,
    masks: Vec<CellDomain>,
}

impl BoardDomain {
    pub fn new(mut entries: Vec<(CellId, CellDomain)>) -> Self {
        entries.sort_unstable_by_key(|e| e.0);
        let cells = entries.iter().map(|e| e.0).collect();
        let masks = entries.iter().map(|e| e.1).collect();
        Self { cells, masks }
    }

    /// Number of empty cells covered.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[CellId] {
        &self.cells
    }

    pub fn masks(&self) -> &[CellDomain] {
        &self.masks
    }

    pub fn get(&self, cell: CellId) -> Option<CellDomain> {
        self.slot_of(cell).map(|i| self.masks[i])
    }

    pub fn set(&mut self, cell: CellId, dom: CellDomain) {
        let slot = self.slot_of(cell).expect("cell not in board domain");
        self.masks[slot] = dom;
    }

    pub fn slot_of(&self, cell: CellId) -> Option<usize> {
        self.cells.binary_search(&cell).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (CellId, CellDomain)> + '_ {
        self.cells.iter().copied().zip(self.masks.iter().copied())
    }

    /// True when some cell domain is empty; a wiped-out domain produced by
    /// sound attrition certifies that the board is not completable.
    pub fn is_wiped(&self) -> bool {
        self.masks.iter().any(|m| m.is_empty())
    }

    /// True when every cell domain is a singleton.
    pub fn is_fully_determined(&self) -> bool {
        self.masks.iter().all(|m| m.is_singleton())
    }
}

/// The weakest sound domain of a partial Latin board: every empty cell may
/// hold every label of the multiset support.
pub fn initial_domain(plb: &PartialLabeledBoard) -> Result<BoardDomain, DomainError> {
    if !plb.is_partial_latin_board() {
        return Err(DomainError::NotPartialLatin);
    }
    let full = CellDomain::full(plb.multiset().support());
    Ok(BoardDomain::new(
        plb.empty_cells().map(|c| (c, full)).collect(),
    ))
}

/// Exact size of the solution space `∏ |D(x)|` over all empty cells.
///
/// The space itself is never materialized; only its cardinality matters.
pub fn solution_space_size(domain: &BoardDomain) -> BigUint {
    let mut size = BigUint::from(1u32);
    for mask in domain.masks() {
        size *= BigUint::from(mask.len());
    }
    size
}

/// The pointwise-inclusion partial order on board domains: `d1` is stronger
/// (more advanced) than `d2` when `d1(x) ⊆ d2(x)` at every empty cell.
pub fn is_stronger(d1: &BoardDomain, d2: &BoardDomain) -> Result<bool, DomainError> {
    if d1.cells() != d2.cells() {
        return Err(DomainError::CellSetMismatch);
    }
    Ok(d1
        .masks()
        .iter()
        .zip(d2.masks())
        .all(|(a, b)| a.is_subset_of(*b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Board, LabelMultiset};
    use std::sync::Arc;

    fn domain_of(sizes: &[(CellId, &[u16])]) -> BoardDomain {
        BoardDomain::new(
            sizes
                .iter()
                .map(|&(c, labels)| {
                    let mut m = CellDomain::EMPTY;
                    for &l in labels {
                        m.insert(Label(l));
                    }
                    (c, m)
                })
                .collect(),
        )
    }

    #[test]
    fn initial_domain_gives_full_support_everywhere() {
        let board = Arc::new(Board::new("row", 3, vec![vec![0, 1, 2]]).unwrap());
        let plb = PartialLabeledBoard::new(
            board,
            LabelMultiset::new(vec![2, 1]).unwrap(),
            &[(0, Label(0))],
            None,
        )
        .unwrap();
        let d = initial_domain(&plb).unwrap();
        assert_eq!(d.cells(), &[1, 2]);
        for (_, mask) in d.iter() {
            assert_eq!(mask, CellDomain::full(2));
        }
    }

    #[test]
    fn initial_domain_rejects_non_plb() {
        let board = Arc::new(Board::new("row", 3, vec![vec![0, 1, 2]]).unwrap());
        let plb = PartialLabeledBoard::new(
            board,
            LabelMultiset::new(vec![1, 2]).unwrap(),
            &[(0, Label(0)), (1, Label(0))],
            None,
        )
        .unwrap();
        assert_eq!(initial_domain(&plb), Err(DomainError::NotPartialLatin));
    }

    #[test]
    fn total_assignment_has_an_empty_board_domain() {
        let board = Arc::new(Board::new("unit", 1, vec![vec![0]]).unwrap());
        let plb = PartialLabeledBoard::new(
            board,
            LabelMultiset::new(vec![1]).unwrap(),
            &[(0, Label(0))],
            None,
        )
        .unwrap();
        let d = initial_domain(&plb).unwrap();
        assert!(d.is_empty());
        assert_eq!(solution_space_size(&d), BigUint::from(1u32));
    }

    #[test]
    fn ternary_domain_over_37_cells_counts_exactly() {
        let entries: Vec<_> = (0..37).map(|c| (c, &[0u16, 1, 2][..])).collect();
        let d = domain_of(&entries);
        assert_eq!(
            solution_space_size(&d),
            BigUint::from(450_283_905_890_997_363u64)
        );
        assert_eq!(solution_space_size(&d), BigUint::from(3u32).pow(37));
    }

    #[test]
    fn wiped_domain_has_size_zero() {
        let d = domain_of(&[(0, &[0, 1]), (1, &[])]);
        assert!(d.is_wiped());
        assert_eq!(solution_space_size(&d), BigUint::from(0u32));
    }

    #[test]
    fn stronger_is_reflexive_and_detects_strict_refinement() {
        let d1 = domain_of(&[(0, &[1]), (1, &[0, 1])]);
        let d2 = domain_of(&[(0, &[1, 2]), (1, &[0, 1])]);
        assert!(is_stronger(&d1, &d1).unwrap());
        assert!(is_stronger(&d1, &d2).unwrap());
        assert!(!is_stronger(&d2, &d1).unwrap());
    }

    #[test]
    fn incomparable_domains_fail_both_directions() {
        let d1 = domain_of(&[(0, &[0]), (1, &[0, 1])]);
        let d2 = domain_of(&[(0, &[1]), (1, &[0])]);
        assert!(!is_stronger(&d1, &d2).unwrap());
        assert!(!is_stronger(&d2, &d1).unwrap());
    }

    #[test]
    fn mismatched_cell_sets_are_an_error() {
        let d1 = domain_of(&[(0, &[0])]);
        let d2 = domain_of(&[(1, &[0])]);
        assert_eq!(is_stronger(&d1, &d2), Err(DomainError::CellSetMismatch));
    }

    #[test]
    fn size_never_increases_under_strengthening() {
        let weak = domain_of(&[(0, &[0, 1, 2]), (1, &[0, 1]), (2, &[2])]);
        let strong = domain_of(&[(0, &[0, 2]), (1, &[1]), (2, &[2])]);
        assert!(is_stronger(&strong, &weak).unwrap());
        assert!(solution_space_size(&strong) <= solution_space_size(&weak));
    }

    #[test]
    fn cell_domain_bit_operations() {
        let mut m = CellDomain::full(3);
        assert_eq!(m.len(), 3);
        m.remove(Label(1));
        assert!(!m.contains(Label(1)));
        assert!(m.contains(Label(0)));
        m.remove(Label(0));
        assert_eq!(m.sole(), Some(Label(2)));
        m.remove(Label(2));
        assert!(m.is_empty());
        assert_eq!(m.sole(), None);
    }
}
