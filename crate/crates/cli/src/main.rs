use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gpdb_cli::{run, Command, QueryReport, QueryRequest, Selection, Semantics};
use gpdb_core::Limits;

/// Evaluate probabilistic logic programs with non-monotonic negation.
#[derive(Parser)]
#[command(name = "gpdb", version)]
struct Cli {
    /// Emit a single JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Largest Herbrand base to accept.
    #[arg(long, global = true, default_value_t = Limits::default().max_atoms)]
    max_atoms: usize,
    /// Most distinct negated literals to accept.
    #[arg(long, global = true, default_value_t = Limits::default().max_neg)]
    max_neg: usize,
    /// Cap on fixpoint iterations.
    #[arg(long, global = true, default_value_t = Limits::default().max_iters)]
    max_iters: usize,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and ground, then summarize.
    Check { file: PathBuf },
    /// Least fixpoint of a negation-free program.
    Lfp { file: PathBuf },
    /// All stable formula functions.
    Stable { file: PathBuf },
    /// Minimal stable classes with their Hoare and Smyth selections.
    Classes {
        file: PathBuf,
        /// Only Hoare-minimal classes.
        #[arg(long, conflicts_with = "smyth")]
        hoare: bool,
        /// Only Smyth-minimal classes.
        #[arg(long)]
        smyth: bool,
    },
    /// Interval of one ground basic formula, e.g. -F "a ^ b".
    Query {
        file: PathBuf,
        #[arg(short = 'F', long = "formula")]
        formula: String,
        /// Defaults to lfp for negation-free programs, stable otherwise.
        #[arg(long, value_enum)]
        semantics: Option<Semantics>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (program, command) = match cli.command {
        Cmd::Check { file } => (file, Command::Check),
        Cmd::Lfp { file } => (file, Command::Lfp),
        Cmd::Stable { file } => (file, Command::Stable),
        Cmd::Classes { file, hoare, smyth } => {
            let selection = match (hoare, smyth) {
                (true, _) => Selection::Hoare,
                (_, true) => Selection::Smyth,
                _ => Selection::All,
            };
            (file, Command::Classes(selection))
        }
        Cmd::Query {
            file,
            formula,
            semantics,
        } => (file, Command::Query { formula, semantics }),
    };
    let req = QueryRequest {
        program,
        command,
        limits: Limits {
            max_atoms: cli.max_atoms,
            max_neg: cli.max_neg,
            max_iters: cli.max_iters,
        },
    };

    match run(&req) {
        Ok(report) => {
            if cli.json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            if cli.json {
                print!("{}", QueryReport::failure(&req, &err).to_json());
            }
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
