//! Line-oriented text formats for boards, puzzles and proofs.
//!
//! Board files:
//!
//! ```text
//! board <name>
//! cells <n>
//! labels <display:count> <display:count> ...   # the multiset
//! asterism <cell> <cell> ... <cell>            # repeated
//! inscription <cell>=<display> ...             # optional
//! clue <cell>=<display>                        # repeated
//! ```
//!
//! `#` starts a comment, blank lines are ignored, parse errors carry line
//! numbers. Serialization is canonical: asterisms with sorted cells in
//! lexicographic order, clues sorted by cell, so parse ∘ serialize is a
//! fixpoint after one round.
//!
//! Proof files hold one step per line, `<serial> <actor> <effect>...`,
//! where an effect is `<cell>!=<display>` (elimination) or
//! `<cell>=<display>` (placement). The display strings of the interned
//! labels live here, in the I/O layer, and nowhere else.

use thiserror::Error;

use crate::model::{
    BoardViolation, CellId, Inscription, Label, LabelMultiset, ModelError, PartialLabeledBoard,
};
use crate::proof::{Proof, ProofStep, StepActor, BACKTRACK_ACTOR};
use crate::propagate::{COUNT_SATURATION, INTERSECTION, REQUIRED_COUNT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected `{expected}`")]
    Expected { line: usize, expected: &'static str },
    #[error("line {line}: malformed directive `{token}`")]
    BadDirective { line: usize, token: String },
    #[error("line {line}: bad cell `{token}`")]
    BadCell { line: usize, token: String },
    #[error("line {line}: cell {cell} out of range (board has {cells} cells)")]
    CellOutOfRange {
        line: usize,
        cell: CellId,
        cells: usize,
    },
    #[error("line {line}: bad count in `{token}`")]
    BadCount { line: usize, token: String },
    #[error("line {line}: bad label display `{token}`")]
    BadLabel { line: usize, token: String },
    #[error("line {line}: unknown label `{token}`")]
    UnknownLabel { line: usize, token: String },
    #[error("line {line}: duplicate label display `{token}`")]
    DuplicateLabel { line: usize, token: String },
    #[error("line {line}: {source}")]
    Model { line: usize, source: ModelError },
    #[error("board is not uniform for k = {k}: {violations:?}")]
    NonUniform {
        k: u32,
        violations: Vec<BoardViolation>,
    },
    #[error("line {line}: bad serial `{token}`")]
    BadSerial { line: usize, token: String },
    #[error("line {line}: serials must be strictly increasing")]
    SerialOrder { line: usize },
    #[error("line {line}: unknown actor `{token}`")]
    UnknownActor { line: usize, token: String },
    #[error("line {line}: a step may place at most one label")]
    MultiplePlacements { line: usize },
    #[error("missing `{0}` line")]
    Missing(&'static str),
}

/// Display strings for interned labels, indexed by label id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelNames {
    displays: Vec<String>,
}

impl LabelNames {
    pub fn new(displays: Vec<String>) -> Self {
        Self { displays }
    }

    /// `1`, `2`, ... `n` — the default alphabet for catalog boards.
    pub fn numeric(support: usize) -> Self {
        Self {
            displays: (1..=support).map(|i| i.to_string()).collect(),
        }
    }

    pub fn display(&self, label: Label) -> &str {
        &self.displays[label.index()]
    }

    pub fn lookup(&self, display: &str) -> Option<Label> {
        self.displays
            .iter()
            .position(|d| d == display)
            .map(|i| Label(i as u16))
    }

    pub fn len(&self) -> usize {
        self.displays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.displays.is_empty()
    }
}

/// A parsed board document: the partial labeled board plus the label
/// display table it was written with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoardFile {
    pub plb: PartialLabeledBoard,
    pub names: LabelNames,
}

impl BoardFile {
    pub fn new(plb: PartialLabeledBoard, names: LabelNames) -> Self {
        Self { plb, names }
    }

    /// Wraps a board with the numeric alphabet.
    pub fn numeric(plb: PartialLabeledBoard) -> Self {
        let names = LabelNames::numeric(plb.multiset().support());
        Self { plb, names }
    }

    /// Same document, different assignment (used when printing solutions).
    pub fn with_plb(&self, plb: PartialLabeledBoard) -> Self {
        Self {
            plb,
            names: self.names.clone(),
        }
    }
}

fn valid_display(token: &str) -> bool {
    !token.is_empty()
        && !token
            .chars()
            .any(|c| c.is_whitespace() || c == ':' || c == '=' || c == '#' || c == '!')
}

/// Strips comments and yields (1-based line number, significant content).
fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            None
        } else {
            Some((i + 1, content))
        }
    })
}

fn parse_cell(token: &str, cells: usize, line: usize) -> Result<CellId, ParseError> {
    let cell: CellId = token.parse().map_err(|_| ParseError::BadCell {
        line,
        token: token.to_string(),
    })?;
    if cell >= cells {
        return Err(ParseError::CellOutOfRange { line, cell, cells });
    }
    Ok(cell)
}

fn parse_pair(
    token: &str,
    cells: usize,
    names: &LabelNames,
    line: usize,
) -> Result<(CellId, Label), ParseError> {
    let (cell, display) = token.split_once('=').ok_or_else(|| ParseError::BadDirective {
        line,
        token: token.to_string(),
    })?;
    let cell = parse_cell(cell, cells, line)?;
    let label = names
        .lookup(display)
        .ok_or_else(|| ParseError::UnknownLabel {
            line,
            token: display.to_string(),
        })?;
    Ok((cell, label))
}

/// Parses a board document. The board must validate as uniform for the
/// multiset's `k`; duplicate asterisms only warn and are kept.
pub fn parse_board(text: &str) -> Result<BoardFile, ParseError> {
    let mut lines = significant_lines(text);

    let (line, content) = lines.next().ok_or(ParseError::Missing("board"))?;
    let name = content
        .strip_prefix("board ")
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or(ParseError::Expected {
            line,
            expected: "board <name>",
        })?
        .to_string();

    let (line, content) = lines.next().ok_or(ParseError::Missing("cells"))?;
    let cells: usize = content
        .strip_prefix("cells ")
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n| n > 0)
        .ok_or(ParseError::Expected {
            line,
            expected: "cells <n>",
        })?;

    let (line, content) = lines.next().ok_or(ParseError::Missing("labels"))?;
    let spec = content.strip_prefix("labels ").ok_or(ParseError::Expected {
        line,
        expected: "labels <display:count> ...",
    })?;
    let mut displays = Vec::new();
    let mut counts = Vec::new();
    for token in spec.split_whitespace() {
        let (display, count) = token.split_once(':').ok_or_else(|| ParseError::BadCount {
            line,
            token: token.to_string(),
        })?;
        if !valid_display(display) {
            return Err(ParseError::BadLabel {
                line,
                token: display.to_string(),
            });
        }
        if displays.iter().any(|d: &String| d == display) {
            return Err(ParseError::DuplicateLabel {
                line,
                token: display.to_string(),
            });
        }
        let count: u32 = count.parse().map_err(|_| ParseError::BadCount {
            line,
            token: token.to_string(),
        })?;
        if count == 0 {
            return Err(ParseError::BadCount {
                line,
                token: token.to_string(),
            });
        }
        displays.push(display.to_string());
        counts.push(count);
    }
    let multiset = LabelMultiset::new(counts).map_err(|source| ParseError::Model { line, source })?;
    let names = LabelNames::new(displays);

    let mut constellation: Vec<Vec<CellId>> = Vec::new();
    let mut inscription_pairs: Vec<(CellId, Label)> = Vec::new();
    let mut clues: Vec<(CellId, Label)> = Vec::new();
    let mut last_line = line;
    for (line, content) in lines {
        last_line = line;
        if let Some(rest) = content.strip_prefix("asterism ") {
            let mut asterism = Vec::new();
            for token in rest.split_whitespace() {
                asterism.push(parse_cell(token, cells, line)?);
            }
            if asterism.is_empty() {
                return Err(ParseError::Expected {
                    line,
                    expected: "asterism <cell> ...",
                });
            }
            constellation.push(asterism);
        } else if let Some(rest) = content.strip_prefix("inscription ") {
            for token in rest.split_whitespace() {
                inscription_pairs.push(parse_pair(token, cells, &names, line)?);
            }
        } else if let Some(rest) = content.strip_prefix("clue ") {
            for token in rest.split_whitespace() {
                clues.push(parse_pair(token, cells, &names, line)?);
            }
        } else {
            return Err(ParseError::BadDirective {
                line,
                token: content.to_string(),
            });
        }
    }
    if constellation.is_empty() {
        return Err(ParseError::Missing("asterism"));
    }

    let board = crate::model::Board::new(name, cells, constellation)
        .map_err(|source| ParseError::Model { line: last_line, source })?;
    let report = board.validate(multiset.k());
    if !report.is_valid() {
        return Err(ParseError::NonUniform {
            k: multiset.k(),
            violations: report.violations,
        });
    }
    let inscription = if inscription_pairs.is_empty() {
        None
    } else {
        Some(
            Inscription::new(inscription_pairs)
                .map_err(|source| ParseError::Model { line: last_line, source })?,
        )
    };
    let plb = PartialLabeledBoard::new(std::sync::Arc::new(board), multiset, &clues, inscription)
        .map_err(|source| ParseError::Model { line: last_line, source })?;
    Ok(BoardFile { plb, names })
}

/// Serializes canonically: sorted asterisms and clues, labels in interned
/// order.
pub fn serialize_board(file: &BoardFile) -> String {
    let plb = &file.plb;
    let names = &file.names;
    let mut out = String::new();
    out.push_str(&format!("board {}\n", plb.board().name()));
    out.push_str(&format!("cells {}\n", plb.board().cell_count()));
    let labels: Vec<String> = plb
        .multiset()
        .labels()
        .map(|l| format!("{}:{}", names.display(l), plb.multiset().count(l)))
        .collect();
    out.push_str(&format!("labels {}\n", labels.join(" ")));

    let mut asterisms: Vec<Vec<CellId>> = plb
        .board()
        .constellation()
        .iter()
        .map(|a| {
            let mut a = a.clone();
            a.sort_unstable();
            a
        })
        .collect();
    asterisms.sort();
    for asterism in &asterisms {
        let cells: Vec<String> = asterism.iter().map(ToString::to_string).collect();
        out.push_str(&format!("asterism {}\n", cells.join(" ")));
    }

    if let Some(ins) = plb.inscription() {
        if !ins.is_empty() {
            let pairs: Vec<String> = ins
                .pairs()
                .iter()
                .map(|&(c, l)| format!("{}={}", c, names.display(l)))
                .collect();
            out.push_str(&format!("inscription {}\n", pairs.join(" ")));
        }
    }
    for (cell, label) in plb.clues() {
        out.push_str(&format!("clue {}={}\n", cell, names.display(label)));
    }
    out
}

fn known_actor(token: &str) -> Option<StepActor> {
    match token {
        BACKTRACK_ACTOR => Some(StepActor::Backtrack),
        COUNT_SATURATION | REQUIRED_COUNT | INTERSECTION => {
            Some(StepActor::Propagator(token.to_string()))
        }
        _ => None,
    }
}

/// One step per line: `<serial> <actor> <cell>!=<display> ... <cell>=<display>`.
pub fn serialize_proof(proof: &Proof, names: &LabelNames) -> String {
    let mut out = String::new();
    for step in proof.steps() {
        out.push_str(&format!("{} {}", step.serial, step.actor.name()));
        for &(cell, label) in &step.eliminations {
            out.push_str(&format!(" {}!={}", cell, names.display(label)));
        }
        if let Some((cell, label)) = step.placement {
            out.push_str(&format!(" {}={}", cell, names.display(label)));
        }
        out.push('\n');
    }
    out
}

/// Parses a proof file; serials must be strictly increasing and actors
/// must be registered propagator names or `backtrack`.
pub fn parse_proof(text: &str, names: &LabelNames) -> Result<Proof, ParseError> {
    let mut steps = Vec::new();
    let mut last_serial: Option<u64> = None;
    for (line, content) in significant_lines(text) {
        let mut tokens = content.split_whitespace();
        let serial_token = tokens.next().expect("significant lines are non-empty");
        let serial: u64 = serial_token.parse().map_err(|_| ParseError::BadSerial {
            line,
            token: serial_token.to_string(),
        })?;
        if last_serial.is_some_and(|prev| serial <= prev) {
            return Err(ParseError::SerialOrder { line });
        }
        last_serial = Some(serial);
        let actor_token = tokens.next().ok_or(ParseError::Expected {
            line,
            expected: "<serial> <actor> <effect>...",
        })?;
        let actor = known_actor(actor_token).ok_or_else(|| ParseError::UnknownActor {
            line,
            token: actor_token.to_string(),
        })?;
        let mut eliminations = Vec::new();
        let mut placement = None;
        for token in tokens {
            if let Some((cell, display)) = token.split_once("!=") {
                let cell: CellId = cell.parse().map_err(|_| ParseError::BadCell {
                    line,
                    token: token.to_string(),
                })?;
                let label = names
                    .lookup(display)
                    .ok_or_else(|| ParseError::UnknownLabel {
                        line,
                        token: display.to_string(),
                    })?;
                eliminations.push((cell, label));
            } else if let Some((cell, display)) = token.split_once('=') {
                if placement.is_some() {
                    return Err(ParseError::MultiplePlacements { line });
                }
                let cell: CellId = cell.parse().map_err(|_| ParseError::BadCell {
                    line,
                    token: token.to_string(),
                })?;
                let label = names
                    .lookup(display)
                    .ok_or_else(|| ParseError::UnknownLabel {
                        line,
                        token: display.to_string(),
                    })?;
                placement = Some((cell, label));
            } else {
                return Err(ParseError::BadDirective {
                    line,
                    token: token.to_string(),
                });
            }
        }
        steps.push(ProofStep {
            serial,
            actor,
            eliminations,
            placement,
        });
    }
    Ok(Proof::from_steps(steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::model::Label;

    #[test]
    fn minimal_one_cell_file_parses() {
        let text = "board t\ncells 1\nlabels a:1\nasterism 0\n";
        let file = parse_board(text).unwrap();
        assert_eq!(file.plb.board().cell_count(), 1);
        assert_eq!(file.plb.multiset().k(), 1);
        assert_eq!(file.names.display(Label(0)), "a");
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\n# a puzzle\nboard t # named t\n\ncells 1\nlabels a:1\nasterism 0\n";
        assert!(parse_board(text).is_ok());
    }

    #[test]
    fn shidoku_file_round_trips() {
        let pb = catalog::shidoku();
        let file = BoardFile::numeric(pb);
        let text = serialize_board(&file);
        let parsed = parse_board(&text).unwrap();
        assert_eq!(parsed, file);
        // Canonical form is a serialization fixpoint.
        assert_eq!(serialize_board(&parsed), text);
    }

    #[test]
    fn repeated_label_multisets_are_first_class() {
        let text = "\
board ripeto
cells 9
labels 1:3 2:3 3:3
asterism 0 1 2 3 4 5 6 7 8
clue 0=1
clue 1=3
";
        let file = parse_board(text).unwrap();
        assert_eq!(file.plb.multiset().k(), 9);
        assert_eq!(file.plb.multiset().count(Label(0)), 3);
        assert_eq!(file.plb.label_at(1), Some(Label(2)));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let base = "board t\ncells 4\nlabels a:1 b:1\n";
        let bad_label = format!("{base}asterism 0 1\nasterism 2 3\nclue 0=z\n");
        assert_eq!(
            parse_board(&bad_label),
            Err(ParseError::UnknownLabel {
                line: 6,
                token: "z".to_string()
            })
        );
        let bad_cell = format!("{base}asterism 0 9\n");
        assert_eq!(
            parse_board(&bad_cell),
            Err(ParseError::CellOutOfRange {
                line: 4,
                cell: 9,
                cells: 4
            })
        );
        let bad_count = "board t\ncells 1\nlabels a:0\nasterism 0\n";
        assert!(matches!(
            parse_board(bad_count),
            Err(ParseError::BadCount { line: 3, .. })
        ));
    }

    #[test]
    fn non_uniform_boards_are_rejected() {
        let text = "board t\ncells 3\nlabels a:1 b:1 c:1\nasterism 0 1\nasterism 1 2\n";
        assert!(matches!(
            parse_board(text),
            Err(ParseError::NonUniform { k: 3, .. })
        ));
    }

    #[test]
    fn inscriptions_must_appear_among_clues() {
        let text = "\
board t
cells 4
labels a:1 b:1
asterism 0 1
asterism 2 3
asterism 0 2
asterism 1 3
inscription 0=a
";
        assert!(matches!(parse_board(text), Err(ParseError::Model { .. })));
        let with_clue = format!("{text}clue 0=a\n");
        let file = parse_board(&with_clue).unwrap();
        assert!(file.plb.inscription().is_some());
    }

    #[test]
    fn inscripted_files_round_trip() {
        let text = "\
board t
cells 4
labels a:1 b:1
asterism 0 1
asterism 0 2
asterism 1 3
asterism 2 3
inscription 0=a
clue 0=a
clue 3=b
";
        let file = parse_board(text).unwrap();
        let again = parse_board(&serialize_board(&file)).unwrap();
        assert_eq!(file, again);
    }

    #[test]
    fn proofs_round_trip_and_validate() {
        let names = LabelNames::numeric(2);
        let text = "0 count_saturation 1!=1 1=2\n3 backtrack 2=1\n";
        let proof = parse_proof(text, &names).unwrap();
        assert_eq!(proof.len(), 2);
        assert_eq!(proof.steps()[0].eliminations, vec![(1, Label(0))]);
        assert_eq!(proof.steps()[1].placement, Some((2, Label(0))));
        assert_eq!(serialize_proof(&proof, &names), text);
    }

    #[test]
    fn proof_parsing_rejects_bad_input() {
        let names = LabelNames::numeric(2);
        assert!(matches!(
            parse_proof("0 warp 1=1\n", &names),
            Err(ParseError::UnknownActor { line: 1, .. })
        ));
        assert!(matches!(
            parse_proof("1 backtrack 0=1\n1 backtrack 1=1\n", &names),
            Err(ParseError::SerialOrder { line: 2 })
        ));
        assert!(matches!(
            parse_proof("0 backtrack 0=1 1=2\n", &names),
            Err(ParseError::MultiplePlacements { line: 1 })
        ));
    }
}
