//! End-to-end tests driving the `latinp` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU64, Ordering};

use latinp_core::catalog;
use latinp_core::format::{parse_board, serialize_board, BoardFile};
use latinp_core::{enumerate_solutions, SearchConfig, SolutionLimit};

static COUNTER: AtomicU64 = AtomicU64::new(0);

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "latinp-cli-test-{}-{}",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

fn write_board(dir: &Path, name: &str, file: &BoardFile) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serialize_board(file)).expect("write board file");
    path
}

fn latinp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latinp"))
        .args(args)
        .env_remove("LATINP_CONFIG")
        .output()
        .expect("run latinp")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

#[test]
fn classify_empty_shidoku_prints_multiple_solutions() {
    let dir = scratch_dir();
    let path = write_board(&dir, "shidoku.board", &BoardFile::numeric(catalog::shidoku()));
    let out = latinp(&["classify", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "MultipleSolutions");
}

#[test]
fn generate_fair_then_verify_fair_round_trips() {
    let dir = scratch_dir();
    let out_dir = dir.join("puzzles");
    let out = latinp(&[
        "generate",
        "--family",
        "shidoku",
        "--fair",
        "--count",
        "1",
        "--seed",
        "7",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let puzzle = out_dir.join("puzzle_000.board");
    assert!(puzzle.exists());
    assert!(out_dir.join("puzzle_000.proof").exists());

    let verify = latinp(&["verify", puzzle.to_str().unwrap(), "--fair"]);
    assert!(
        verify.status.success(),
        "{}",
        String::from_utf8_lossy(&verify.stderr)
    );
    let text = stdout(&verify);
    assert!(text.contains("unique: ok"));
    assert!(text.contains("fair: ok"));
}

#[test]
fn solve_non_plb_prints_zero_solutions_and_exits_zero() {
    let dir = scratch_dir();
    // Two equal labels in one row: a valid file, but not a PLB.
    let text = "\
board bad
cells 4
labels 1:1 2:1
asterism 0 1
asterism 0 2
asterism 1 3
asterism 2 3
clue 0=1
clue 1=1
";
    let path = dir.join("bad.board");
    std::fs::write(&path, text).expect("write");
    let out = latinp(&["solve", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "# solutions: 0");
}

#[test]
fn solve_prints_solutions_and_writes_replayable_proofs() {
    let dir = scratch_dir();
    let plb = catalog::latin_square(2);
    let path = write_board(&dir, "square2.board", &BoardFile::numeric(plb.clone()));
    let proof_path = dir.join("solution.proof");
    let out = latinp(&[
        "solve",
        path.to_str().unwrap(),
        "--limit",
        "1",
        "--proof",
        proof_path.to_str().unwrap(),
        "--stats",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# solutions: 1"));
    assert!(text.contains("clue 0="));
    assert!(proof_path.exists());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    // The printed solution parses back to a Latin board.
    let body: String = text
        .lines()
        .take_while(|l| !l.starts_with("# solutions"))
        .map(|l| format!("{l}\n"))
        .collect();
    let parsed = parse_board(&body).expect("printed solution parses");
    assert!(parsed.plb.is_latin_board());
}

#[test]
fn solve_limit_inf_enumerates_everything() {
    let dir = scratch_dir();
    let path = write_board(
        &dir,
        "square3.board",
        &BoardFile::numeric(catalog::latin_square(3)),
    );
    let out = latinp(&["solve", path.to_str().unwrap(), "--limit", "inf"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("# solutions: 12"));
}

#[test]
fn rate_prints_score_band_and_histogram() {
    let dir = scratch_dir();
    // A one-clue puzzle on the 2x2 square is fair and trivially rated.
    let plb = catalog::latin_square(2);
    let puzzle = enumerate_solutions(&plb, &SearchConfig::with_limit(SolutionLimit::Finite(1)))
        .solutions
        .remove(0)
        .board;
    let one_clue = plb
        .with_clues(&[(0, puzzle.label_at(0))])
        .expect("valid clue");
    let path = write_board(&dir, "puzzle.board", &BoardFile::numeric(one_clue));
    let out = latinp(&["rate", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("score="));
    assert!(text.contains("band="));
    assert!(text.contains("steps.count_saturation="));
}

#[test]
fn rating_config_env_var_is_honored() {
    let dir = scratch_dir();
    let plb = catalog::latin_square(2);
    let puzzle = enumerate_solutions(&plb, &SearchConfig::with_limit(SolutionLimit::Finite(1)))
        .solutions
        .remove(0)
        .board;
    let one_clue = plb
        .with_clues(&[(0, puzzle.label_at(0))])
        .expect("valid clue");
    let path = write_board(&dir, "puzzle.board", &BoardFile::numeric(one_clue));
    let config_path = dir.join("rating.conf");
    std::fs::write(&config_path, "weights.count_saturation = 50\n").expect("write config");
    let out = Command::new(env!("CARGO_BIN_EXE_latinp"))
        .args(["rate", path.to_str().unwrap()])
        .env("LATINP_CONFIG", &config_path)
        .output()
        .expect("run latinp");
    assert!(out.status.success());
    assert!(stdout(&out).contains("band=very difficult"));
}

#[test]
fn generate_to_stdout_is_deterministic() {
    let run = || {
        let out = latinp(&[
            "generate",
            "--family",
            "latin3",
            "--count",
            "4",
            "--seed",
            "11",
        ]);
        assert!(out.status.success());
        stdout(&out)
    };
    let first = run();
    assert_eq!(first, run());
    assert!(first.contains("# generated:"));
}

#[test]
fn generate_single_pass_works_on_the_tiny_square() {
    let out = latinp(&[
        "generate",
        "--family",
        "latin2",
        "--single-pass",
        "--seed",
        "0",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("# generated: 6"));
}

#[test]
fn verify_critical_flags_redundant_clues() {
    let dir = scratch_dir();
    let plb = catalog::latin_square(2);
    let solution = enumerate_solutions(&plb, &SearchConfig::with_limit(SolutionLimit::Finite(1)))
        .solutions
        .remove(0)
        .board;
    // Two clues on the tiny square: unique but never critical.
    let padded = plb
        .with_clues(&[(0, solution.label_at(0)), (1, solution.label_at(1))])
        .expect("valid clues");
    let path = write_board(&dir, "padded.board", &BoardFile::numeric(padded));
    let out = latinp(&["verify", path.to_str().unwrap(), "--critical"]);
    assert_eq!(out.status.code(), Some(2));

    let minimal = plb
        .with_clues(&[(0, solution.label_at(0))])
        .expect("valid clue");
    let path = write_board(&dir, "minimal.board", &BoardFile::numeric(minimal));
    let out = latinp(&[
        "verify",
        path.to_str().unwrap(),
        "--critical",
        "--minimal",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_errors_exit_one() {
    let out = latinp(&["generate"]);
    assert_eq!(out.status.code(), Some(1));
    let out = latinp(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let out = latinp(&["generate", "--family", "marsian"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parse_errors_exit_two() {
    let dir = scratch_dir();
    let path = dir.join("broken.board");
    std::fs::write(&path, "board x\ncells 1\nlabels a:1\nasterism 5\n").expect("write");
    let out = latinp(&["classify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let missing = latinp(&["classify", dir.join("nope.board").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn budget_cap_exits_three() {
    let dir = scratch_dir();
    let path = write_board(
        &dir,
        "latin4.board",
        &BoardFile::numeric(catalog::latin_square(4)),
    );
    let out = latinp(&["classify", path.to_str().unwrap(), "--max-nodes", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout(&out).trim(), "Indeterminate");
}

#[test]
fn help_exits_zero() {
    let out = latinp(&["--help"]);
    assert!(out.status.success());
}
