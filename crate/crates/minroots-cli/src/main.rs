//! Command-line front end: build and serialize reflection tables, reduce
//! and multiply words, enumerate growth, and run the verification suite.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid matrix file,
//! 3 resource cap or arithmetic overflow, 4 verification failure,
//! 5 internal invariant violation.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use minroots::{brink, naive, verify, words, BuildError, CoxeterSystem, Error, MinimalRootTable};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "minroots", version, about = "Minimal-root reflection tables for Coxeter groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Naive,
    Brink,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the reflection table and print the number of minimal roots.
    Build {
        /// Matrix file (first line rank, then rows of orders; inf or 0 for infinity).
        matrix: PathBuf,
        #[arg(long, value_enum, default_value = "brink")]
        algo: Algo,
        /// Write the canonical table file here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        max_roots: usize,
    },
    /// Table size, depth histogram, and build wall time.
    Stats {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value = "brink")]
        algo: Algo,
        #[arg(long, default_value_t = 1_000_000)]
        max_roots: usize,
    },
    /// Print the normal form of a word.
    Reduce {
        matrix: PathBuf,
        /// 1-based generator numbers, space-separated (compact digits
        /// allowed for rank at most 9).
        word: String,
        #[arg(long, default_value_t = 1_000_000)]
        max_roots: usize,
    },
    /// Print the normal form of the product of two words.
    Mult {
        matrix: PathBuf,
        w1: String,
        w2: String,
        #[arg(long, default_value_t = 1_000_000)]
        max_roots: usize,
    },
    /// Count normal forms per length.
    Growth {
        matrix: PathBuf,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = 1_000_000)]
        max_roots: usize,
        #[arg(long, default_value_t = 5_000_000)]
        max_words: usize,
    },
    /// Cross-check both builders, the invariant suites, and the
    /// multiplication oracle.
    Verify {
        matrix: PathBuf,
        /// Cayley ball radius (default 10 for rank <= 3, 6 for rank 4-5,
        /// else 4).
        #[arg(long)]
        ball: Option<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        max_roots: usize,
        #[arg(long, default_value_t = 5_000_000)]
        max_ball: usize,
    },
}

enum CliError {
    Usage(String),
    Matrix(String),
    Resource(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Matrix(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Internal(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Matrix(m) | CliError::Resource(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(p) => CliError::Matrix(p.to_string()),
            Error::Build(BuildError::RootCap { .. }) | Error::Build(BuildError::Overflow) => {
                CliError::Resource(e.to_string())
            }
            Error::Build(BuildError::Invariant(_)) => CliError::Internal(e.to_string()),
            Error::Resource(_) => CliError::Resource(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn load_system(path: &Path) -> Result<CoxeterSystem, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Matrix(format!("cannot read {}: {e}", path.display())))?;
    CoxeterSystem::parse(&text).map_err(|e| CliError::Matrix(e.to_string()))
}

fn build_with(sys: &CoxeterSystem, algo: Algo, max_roots: usize) -> Result<MinimalRootTable, CliError> {
    let table = match algo {
        Algo::Naive => naive::build_table_naive(sys, max_roots)?,
        Algo::Brink => brink::build_table_brink(sys, max_roots)?,
    };
    Ok(table)
}

fn parse_cli_word(text: &str, rank: usize) -> Result<Vec<usize>, CliError> {
    words::parse_word(text, rank).map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.cmd {
        Cmd::Build { matrix, algo, out, max_roots } => {
            let sys = load_system(&matrix)?;
            let table = build_with(&sys, algo, max_roots)?;
            if let Some(path) = out {
                let canonical = table.canonical_form().map_err(CliError::from)?;
                std::fs::write(&path, canonical)
                    .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
            }
            println!("N={}", table.count());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Stats { matrix, algo, max_roots } => {
            let sys = load_system(&matrix)?;
            let start = Instant::now();
            match algo {
                Algo::Brink => {
                    let detailed = brink::build_brink_detailed(&sys, max_roots).map_err(CliError::from)?;
                    let elapsed = start.elapsed();
                    print_stats(detailed.table(), elapsed.as_secs_f64());
                    for (process, count) in detailed.census() {
                        if count > 0 {
                            println!("process {:?}: {}", process, count);
                        }
                    }
                }
                Algo::Naive => {
                    let table = naive::build_table_naive(&sys, max_roots).map_err(CliError::from)?;
                    let elapsed = start.elapsed();
                    print_stats(&table, elapsed.as_secs_f64());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Reduce { matrix, word, max_roots } => {
            let sys = load_system(&matrix)?;
            let letters = parse_cli_word(&word, sys.rank())?;
            let table = build_with(&sys, Algo::Brink, max_roots)?;
            let nf = words::normalize(&table, &letters);
            println!("{}", words::format_word(nf.letters()));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Mult { matrix, w1, w2, max_roots } => {
            let sys = load_system(&matrix)?;
            let a = parse_cli_word(&w1, sys.rank())?;
            let b = parse_cli_word(&w2, sys.rank())?;
            let table = build_with(&sys, Algo::Brink, max_roots)?;
            let na = words::normalize(&table, &a);
            let nb = words::normalize(&table, &b);
            let product = words::multiply(&table, &na, &nb);
            println!("{}", words::format_word(product.letters()));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Growth { matrix, max_len, max_roots, max_words } => {
            let sys = load_system(&matrix)?;
            let table = build_with(&sys, Algo::Brink, max_roots)?;
            let counts = words::growth(&table, max_len, max_words).map_err(CliError::from)?;
            for (len, count) in counts.iter().enumerate() {
                println!("{len}: {count}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { matrix, ball, max_roots, max_ball } => {
            let sys = load_system(&matrix)?;
            let radius = ball.unwrap_or_else(|| verify::default_radius(sys.rank()));
            let report = verify::cross_check(&sys, radius, max_roots, max_ball).map_err(CliError::from)?;
            print!("{report}");
            if report.passed() {
                println!("verify: PASS");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("verify: FAIL");
                Ok(ExitCode::from(4))
            }
        }
    }
}

fn print_stats(table: &MinimalRootTable, seconds: f64) {
    println!("N={}", table.count());
    let hist = table.depth_histogram();
    for (depth, count) in hist.iter().enumerate().skip(1) {
        if *count > 0 {
            println!("depth {depth}: {count}");
        }
    }
    println!("build time: {seconds:.6}s");
}
