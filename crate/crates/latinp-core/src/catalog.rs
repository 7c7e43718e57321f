//! Programmatic constructors for common board families.
//!
//! The catalog covers the families the engine is usually exercised with:
//! plain Latin squares (rows and columns), boxed squares (rows, columns
//! and boxes), gerechte squares (rows, columns and a caller-given region
//! partition), and extra-window variants that add asterisms to a base
//! family. Any family can carry a repeated-label multiset and an
//! inscription pre-fill. Boards beyond these families (polygon and
//! polyhedron nets and the like) come in through the board file format.

use thiserror::Error;

use crate::model::{
    Board, CellId, Inscription, Label, LabelMultiset, ModelError, PartialLabeledBoard,
    ValidationReport,
};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("box dimensions must be at least 1")]
    ZeroBox,
    #[error("region partition must have {expected} regions of {expected} cells, got {got} regions")]
    RegionCount { expected: usize, got: usize },
    #[error("region {region} has {got} cells, expected {expected}")]
    RegionSize {
        region: usize,
        got: usize,
        expected: usize,
    },
    #[error("cell {cell} is missing from the region partition or appears twice")]
    RegionCover { cell: CellId },
    #[error("multiset totals {got}, but the board's asterisms have {expected} cells")]
    MultisetMismatch { expected: u32, got: u32 },
    #[error("inscription label {label} at cell {cell} is outside the multiset support")]
    InscriptionLabel { cell: CellId, label: Label },
    #[error("constructed board failed validation: {report:?}")]
    Invalid { report: ValidationReport },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A board family with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// An order-`n` square with rows and columns: `2n` asterisms.
    LatinSquare { order: usize },
    /// Rows, columns and `box_rows x box_cols` boxes over a square of side
    /// `box_rows * box_cols`.
    SudokuBoxes { box_rows: usize, box_cols: usize },
    /// Rows, columns and a caller-given partition into `order` regions of
    /// `order` cells each.
    Gerechte {
        order: usize,
        regions: Vec<Vec<CellId>>,
    },
    /// A base family plus extra caller-given asterisms.
    ExtraWindows {
        base: Box<Family>,
        windows: Vec<Vec<CellId>>,
    },
}

impl Family {
    fn build(&self) -> Result<(String, usize, Vec<Vec<CellId>>), CatalogError> {
        match self {
            Family::LatinSquare { order } => {
                let n = *order;
                if n == 0 {
                    return Err(CatalogError::ZeroOrder);
                }
                let mut constellation = rows_and_columns(n);
                canonicalize(&mut constellation);
                Ok((format!("latin{n}"), n * n, constellation))
            }
            Family::SudokuBoxes { box_rows, box_cols } => {
                let (r, c) = (*box_rows, *box_cols);
                if r == 0 || c == 0 {
                    return Err(CatalogError::ZeroBox);
                }
                let side = r * c;
                let mut constellation = rows_and_columns(side);
                for band in 0..c {
                    for stack in 0..r {
                        let mut cells = Vec::with_capacity(side);
                        for dr in 0..r {
                            for dc in 0..c {
                                cells.push((band * r + dr) * side + stack * c + dc);
                            }
                        }
                        constellation.push(cells);
                    }
                }
                canonicalize(&mut constellation);
                Ok((format!("sudoku{r}x{c}"), side * side, constellation))
            }
            Family::Gerechte { order, regions } => {
                let n = *order;
                if n == 0 {
                    return Err(CatalogError::ZeroOrder);
                }
                if regions.len() != n {
                    return Err(CatalogError::RegionCount {
                        expected: n,
                        got: regions.len(),
                    });
                }
                let mut covered = vec![false; n * n];
                for (i, region) in regions.iter().enumerate() {
                    if region.len() != n {
                        return Err(CatalogError::RegionSize {
                            region: i,
                            got: region.len(),
                            expected: n,
                        });
                    }
                    for &cell in region {
                        if cell >= n * n || covered[cell] {
                            return Err(CatalogError::RegionCover { cell });
                        }
                        covered[cell] = true;
                    }
                }
                if let Some(cell) = covered.iter().position(|&c| !c) {
                    return Err(CatalogError::RegionCover { cell });
                }
                let mut constellation = rows_and_columns(n);
                constellation.extend(regions.iter().cloned());
                canonicalize(&mut constellation);
                Ok((format!("gerechte{n}"), n * n, constellation))
            }
            Family::ExtraWindows { base, windows } => {
                let (name, cells, mut constellation) = base.build()?;
                constellation.extend(windows.iter().cloned());
                canonicalize(&mut constellation);
                Ok((format!("{name}+windows"), cells, constellation))
            }
        }
    }
}

/// A buildable board description: a family, an optional repeated-label
/// multiset, and an optional inscription pre-fill.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogSpec {
    pub family: Family,
    /// Replaces the default one-of-each multiset; its total must equal the
    /// asterism size `k`.
    pub multiset: Option<LabelMultiset>,
    /// Pre-filled clue pairs pinned in every generated puzzle.
    pub inscription: Vec<(CellId, Label)>,
}

impl CatalogSpec {
    pub fn plain(family: Family) -> Self {
        Self {
            family,
            multiset: None,
            inscription: Vec::new(),
        }
    }
}

fn rows_and_columns(n: usize) -> Vec<Vec<CellId>> {
    let mut constellation = Vec::with_capacity(2 * n);
    for r in 0..n {
        constellation.push((0..n).map(|c| r * n + c).collect());
    }
    for c in 0..n {
        constellation.push((0..n).map(|r| r * n + c).collect());
    }
    constellation
}

/// Sorts cells within each asterism and asterisms lexicographically, so
/// catalog boards serialize canonically and round-trip structurally.
fn canonicalize(constellation: &mut [Vec<CellId>]) {
    for asterism in constellation.iter_mut() {
        asterism.sort_unstable();
    }
    constellation.sort();
}

/// Builds the described board as a partial labeled board: empty unless an
/// inscription pre-fills cells. The result always passes validation for
/// its multiset's `k`.
pub fn build(spec: &CatalogSpec) -> Result<PartialLabeledBoard, CatalogError> {
    let (name, cell_count, constellation) = spec.family.build()?;
    let k = constellation
        .first()
        .map(|a| a.len() as u32)
        .unwrap_or_default();
    let multiset = match &spec.multiset {
        Some(ms) => {
            if ms.k() != k {
                return Err(CatalogError::MultisetMismatch {
                    expected: k,
                    got: ms.k(),
                });
            }
            ms.clone()
        }
        None => LabelMultiset::set_of(k as usize)?,
    };
    for &(cell, label) in &spec.inscription {
        if !multiset.contains(label) {
            return Err(CatalogError::InscriptionLabel { cell, label });
        }
    }
    let board = Board::new(name, cell_count, constellation)?;
    let report = board.validate(multiset.k());
    if !report.is_valid() {
        return Err(CatalogError::Invalid { report });
    }
    let inscription = if spec.inscription.is_empty() {
        None
    } else {
        Some(Inscription::new(spec.inscription.clone())?)
    };
    Ok(PartialLabeledBoard::new(
        std::sync::Arc::new(board),
        multiset,
        &spec.inscription,
        inscription,
    )?)
}

/// The 4x4 boxed square (`sudoku_boxes(2, 2)`), ubiquitous in tests.
pub fn shidoku() -> PartialLabeledBoard {
    build(&CatalogSpec::plain(Family::SudokuBoxes {
        box_rows: 2,
        box_cols: 2,
    }))
    .expect("well-formed family")
}

/// An empty order-`n` Latin square board.
pub fn latin_square(n: usize) -> PartialLabeledBoard {
    build(&CatalogSpec::plain(Family::LatinSquare { order: n })).expect("well-formed family")
}
