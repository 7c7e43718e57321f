//! Command-line front end for the Latin-board engine.
//!
//! Subcommands: `solve`, `classify`, `generate`, `rate`, `verify`.
//! Exit codes: 0 success, 1 usage error, 2 parse/validation/verification
//! error, 3 budget exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use latinp_core::catalog::{self, CatalogSpec, Family};
use latinp_core::format::{parse_board, serialize_board, serialize_proof, BoardFile};
use latinp_core::generate::{generate_puzzles, GenerateOptions, Minimality};
use latinp_core::rating::{rate_with, DifficultyBand, FairnessVerdict, RatingConfig};
use latinp_core::solve::{classify, solve_puzzle, ClassificationTag};
use latinp_core::{
    certify_fair, default_propagators, enumerate_solutions, enumerate_solutions_parallel,
    is_critical, is_minimal, LabelMultiset, PartialLabeledBoard, SearchConfig, SearchStatus,
    SolutionLimit,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "latinp",
    about = "Solve, classify, generate, rate and verify Latin-board puzzles",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate completions of a board file.
    Solve(SolveArgs),
    /// Print the completion class of a board file.
    Classify(ClassifyArgs),
    /// Generate puzzles from a board file or a named family.
    Generate(GenerateArgs),
    /// Solve a puzzle and print its difficulty rating.
    Rate(RateArgs),
    /// Re-check properties of a puzzle file.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Board file to solve.
    board: PathBuf,
    /// Maximum number of solutions to return (`inf` for all).
    #[arg(long, default_value = "inf")]
    limit: String,
    /// Write the first solution's proof to this file.
    #[arg(long)]
    proof: Option<PathBuf>,
    /// Print search statistics to stderr.
    #[arg(long)]
    stats: bool,
    /// Split the root branching across this many threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Abort after this many search nodes.
    #[arg(long)]
    max_nodes: Option<u64>,
}

#[derive(Args)]
struct ClassifyArgs {
    board: PathBuf,
    /// Abort after this many search nodes.
    #[arg(long)]
    max_nodes: Option<u64>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Seed board file.
    #[arg(long, conflicts_with = "family")]
    board: Option<PathBuf>,
    /// Named family: shidoku, sudoku, `latin<N>`, `sudoku<R>x<C>`,
    /// shidoku-ripeto, sudoku-ripeto.
    #[arg(long)]
    family: Option<String>,
    /// Keep at most this many puzzles.
    #[arg(long)]
    count: Option<usize>,
    /// Keep only puzzles certified fair.
    #[arg(long)]
    fair: bool,
    /// Keep only critical puzzles.
    #[arg(long)]
    critical: bool,
    /// Keep only puzzles of this difficulty band.
    #[arg(long)]
    difficulty: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write puzzles (and proofs) into this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use single-pass tagged generation.
    #[arg(long)]
    single_pass: bool,
    /// How many completions to draw puzzles from.
    #[arg(long, default_value_t = 4)]
    solutions: u64,
}

#[derive(Args)]
struct RateArgs {
    puzzle: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    puzzle: PathBuf,
    /// Require a fairness certificate.
    #[arg(long)]
    fair: bool,
    /// Require criticality.
    #[arg(long)]
    critical: bool,
    /// Require minimality (exhaustive; small boards only).
    #[arg(long)]
    minimal: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are successes, not usage errors.
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let code = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Classify(args) => cmd_classify(&args),
        Command::Generate(args) => cmd_generate(&args),
        Command::Rate(args) => cmd_rate(&args),
        Command::Verify(args) => cmd_verify(&args),
    };
    match code {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn data_error(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_DATA,
        message: message.into(),
    }
}

fn budget_error(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_BUDGET,
        message: message.into(),
    }
}

fn load_board(path: &Path) -> Result<BoardFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| data_error(format!("cannot read {}: {e}", path.display())))?;
    parse_board(&text).map_err(|e| data_error(format!("{}: {e}", path.display())))
}

fn rating_config() -> Result<RatingConfig, CliError> {
    match std::env::var_os("LATINP_CONFIG") {
        Some(path) => RatingConfig::from_path(Path::new(&path))
            .map_err(|e| data_error(format!("LATINP_CONFIG: {e}"))),
        None => Ok(RatingConfig::default()),
    }
}

fn parse_limit(text: &str) -> Result<SolutionLimit, CliError> {
    if text.eq_ignore_ascii_case("inf") {
        return Ok(SolutionLimit::Infinite);
    }
    match text.parse::<u64>() {
        Ok(n) if n > 0 => Ok(SolutionLimit::Finite(n)),
        _ => Err(usage(format!(
            "--limit takes a positive integer or `inf`, got `{text}`"
        ))),
    }
}

fn parse_family(spec: &str) -> Result<PartialLabeledBoard, CliError> {
    let spec = spec.trim().to_ascii_lowercase();
    let built = match spec.as_str() {
        "shidoku" => catalog::build(&CatalogSpec::plain(Family::SudokuBoxes {
            box_rows: 2,
            box_cols: 2,
        })),
        "sudoku" => catalog::build(&CatalogSpec::plain(Family::SudokuBoxes {
            box_rows: 3,
            box_cols: 3,
        })),
        "shidoku-ripeto" => catalog::build(&CatalogSpec {
            family: Family::SudokuBoxes {
                box_rows: 2,
                box_cols: 2,
            },
            multiset: Some(LabelMultiset::new(vec![2, 2]).expect("valid multiset")),
            inscription: Vec::new(),
        }),
        "sudoku-ripeto" => catalog::build(&CatalogSpec {
            family: Family::SudokuBoxes {
                box_rows: 3,
                box_cols: 3,
            },
            multiset: Some(LabelMultiset::new(vec![3, 3, 3]).expect("valid multiset")),
            inscription: Vec::new(),
        }),
        other => {
            if let Some(n) = other.strip_prefix("latin").and_then(|s| s.parse().ok()) {
                catalog::build(&CatalogSpec::plain(Family::LatinSquare { order: n }))
            } else if let Some((r, c)) = other
                .strip_prefix("sudoku")
                .and_then(|s| s.split_once('x'))
                .and_then(|(r, c)| Some((r.parse().ok()?, c.parse().ok()?)))
            {
                catalog::build(&CatalogSpec::plain(Family::SudokuBoxes {
                    box_rows: r,
                    box_cols: c,
                }))
            } else {
                return Err(usage(format!("unknown family `{other}`")));
            }
        }
    };
    built.map_err(|e| usage(format!("family `{spec}`: {e}")))
}

fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let file = load_board(&args.board)?;
    let cfg = SearchConfig {
        limit: parse_limit(&args.limit)?,
        max_nodes: args.max_nodes,
        ..SearchConfig::default()
    };
    let result = if args.jobs > 1 {
        enumerate_solutions_parallel(&file.plb, &cfg, args.jobs)
    } else {
        enumerate_solutions(&file.plb, &cfg)
    };
    let mut stdout = String::new();
    for (i, sol) in result.solutions.iter().enumerate() {
        if i > 0 {
            stdout.push('\n');
        }
        stdout.push_str(&serialize_board(&file.with_plb(sol.board.as_plb().clone())));
    }
    print!("{stdout}");
    println!("# solutions: {}", result.solutions.len());
    if let (Some(path), Some(first)) = (&args.proof, result.solutions.first()) {
        std::fs::write(path, serialize_proof(&first.proof, &file.names))
            .map_err(|e| data_error(format!("cannot write {}: {e}", path.display())))?;
    }
    if args.stats {
        let s = result.stats;
        eprintln!(
            "nodes={} backtracks={} backjumps={} propagations={} wall={:?}",
            s.nodes, s.backtracks, s.backjumps, s.propagations, s.wall_time
        );
    }
    if let SearchStatus::Incomplete(reason) = result.status {
        return Err(budget_error(format!("search stopped early: {reason:?}")));
    }
    Ok(())
}

fn cmd_classify(args: &ClassifyArgs) -> Result<(), CliError> {
    let file = load_board(&args.board)?;
    let classification = latinp_core::classify_budgeted(
        &file.plb,
        latinp_core::solve::ClassifyBudget {
            max_nodes: args.max_nodes,
            max_time: None,
        },
    );
    println!("{}", classification.tag);
    if classification.tag == ClassificationTag::Indeterminate {
        return Err(budget_error(format!(
            "stopped after finding {} solution(s)",
            classification.solutions_found
        )));
    }
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let file = match (&args.board, &args.family) {
        (Some(path), None) => load_board(path)?,
        (None, Some(spec)) => BoardFile::numeric(parse_family(spec)?),
        _ => return Err(usage("give exactly one of --board or --family")),
    };
    let config = rating_config()?;
    let band = match &args.difficulty {
        None => None,
        Some(name) => Some(
            DifficultyBand::parse(name)
                .ok_or_else(|| usage(format!("unknown difficulty band `{name}`")))?,
        ),
    };
    let opts = GenerateOptions {
        count: if band.is_some() { None } else { args.count },
        fair_only: args.fair,
        critical_only: args.critical,
        band: None, // applied below with the configured weights
        seed: args.seed,
        single_pass: args.single_pass,
        solution_limit: args.solutions,
    };
    let mut puzzles = generate_puzzles(&file.plb, &opts).map_err(|e| data_error(e.to_string()))?;
    if let Some(band) = band {
        puzzles.retain(|p| {
            rate_with(&p.proof, &p.puzzle, &config)
                .map(|r| r.band == band)
                .unwrap_or(false)
        });
        if let Some(count) = args.count {
            puzzles.truncate(count);
        }
    }

    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)
            .map_err(|e| data_error(format!("cannot create {}: {e}", dir.display())))?;
        for (i, p) in puzzles.iter().enumerate() {
            let board_path = dir.join(format!("puzzle_{i:03}.board"));
            let proof_path = dir.join(format!("puzzle_{i:03}.proof"));
            std::fs::write(
                &board_path,
                serialize_board(&file.with_plb(p.puzzle.clone())),
            )
            .map_err(|e| data_error(format!("cannot write {}: {e}", board_path.display())))?;
            std::fs::write(&proof_path, serialize_proof(&p.proof, &file.names))
                .map_err(|e| data_error(format!("cannot write {}: {e}", proof_path.display())))?;
        }
        println!("# wrote {} puzzles to {}", puzzles.len(), dir.display());
    } else {
        for (i, p) in puzzles.iter().enumerate() {
            if i > 0 {
                println!();
            }
            let rating =
                rate_with(&p.proof, &p.puzzle, &config).map_err(|e| data_error(e.to_string()))?;
            print!("{}", serialize_board(&file.with_plb(p.puzzle.clone())));
            println!(
                "# fair={} critical={} band={} score={:.3}",
                p.fair,
                p.critical,
                rating.band,
                rating.score()
            );
        }
        println!("# generated: {}", puzzles.len());
    }
    Ok(())
}

fn cmd_rate(args: &RateArgs) -> Result<(), CliError> {
    let file = load_board(&args.puzzle)?;
    let config = rating_config()?;
    // Prefer the propagation-only proof; fall back to the search proof.
    let proof = match certify_fair(&file.plb, &default_propagators()) {
        Ok(FairnessVerdict::Fair(proof)) => proof,
        Ok(FairnessVerdict::NotCertified) => {
            solve_puzzle(&file.plb)
                .map_err(|e| data_error(e.to_string()))?
                .proof
        }
        Err(e) => return Err(data_error(e.to_string())),
    };
    let rating = rate_with(&proof, &file.plb, &config).map_err(|e| data_error(e.to_string()))?;
    println!("score={:.3}", rating.score());
    println!("band={}", rating.band);
    for (actor, count) in &rating.step_histogram {
        println!("steps.{actor}={count}");
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let file = load_board(&args.puzzle)?;
    let classification = classify(&file.plb);
    match classification.tag {
        ClassificationTag::UniqueSolution | ClassificationTag::AlreadyLatinBoard => {
            println!("unique: ok ({})", classification.tag);
        }
        tag => return Err(data_error(format!("not a puzzle: classified {tag}"))),
    }
    if args.fair {
        match certify_fair(&file.plb, &default_propagators()) {
            Ok(FairnessVerdict::Fair(proof)) => {
                println!("fair: ok (proof steps: {})", proof.len());
            }
            Ok(FairnessVerdict::NotCertified) => {
                return Err(data_error(
                    "fair: not certified by the shipped propagators",
                ))
            }
            Err(e) => return Err(data_error(e.to_string())),
        }
    }
    if args.critical {
        if is_critical(&file.plb) {
            println!("critical: ok");
        } else {
            return Err(data_error("critical: some clue is redundant"));
        }
    }
    if args.minimal {
        match is_minimal(&file.plb, latinp_core::generate::MINIMALITY_BUDGET_CELLS) {
            Minimality::Minimal => println!("minimal: ok"),
            Minimality::NotMinimal { witness } => {
                return Err(data_error(format!(
                    "minimal: a {}-clue puzzle exists",
                    witness.clue_count()
                )))
            }
            Minimality::Unknown => {
                return Err(budget_error(
                    "minimal: board exceeds the exhaustive-search budget",
                ))
            }
        }
    }
    Ok(())
}
