//! `torlib`: analyze, liberate and simulate affine Z^p-actions on tori.
//!
//! Exit codes: 0 success, 2 malformed or invalid input, 3 not liberated,
//! 4 undecided.

mod commands;
mod document;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(torlib::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(s) => write!(f, "{s}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<torlib::Error> for CliError {
    fn from(e: torlib::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "torlib", version, about = "Free affine Z^p-actions on tori")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    output: Format,

    /// Write the report to this file instead of stdout.
    #[arg(short = 'o', long = "out", global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fixed lattices, decomposition blocks and coboundary solutions.
    Analyze {
        file: PathBuf,
        #[arg(long = "box", default_value_t = 4)]
        bound: u32,
    },
    /// Decide whether the linear part admits a free affine extension.
    Liberate {
        file: PathBuf,
        #[arg(long = "box", default_value_t = 4)]
        bound: u32,
    },
    /// Irrationality test for affine input, minimal classification for
    /// linear input on Z³.
    Minimal { file: PathBuf },
    /// Search for a commutator obstruction on the unipotent part.
    Obstruct {
        file: PathBuf,
        #[arg(long = "box", default_value_t = 4)]
        bound: u32,
    },
    /// Iterate one map of the action numerically.
    Simulate {
        file: PathBuf,
        /// Group element, comma separated (default e₁).
        #[arg(long, allow_hyphen_values = true)]
        ell: Option<String>,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        /// Symbol value, `name=value`; repeatable.
        #[arg(long = "assign")]
        assign: Vec<String>,
        /// Seed for unassigned symbols and the starting point.
        #[arg(long)]
        seed: Option<u64>,
        /// Starting point, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        /// Rational assignment and exhaustive fixed-point search instead of
        /// float iteration.
        #[arg(long)]
        exact: bool,
    },
}

/// A `.json` output path forces JSON.
fn format_of(cli: &Cli) -> Format {
    match &cli.out {
        Some(p) if p.extension().is_some_and(|e| e == "json") => Format::Json,
        _ => cli.output,
    }
}

fn run(cli: &Cli) -> Result<(String, u8), CliError> {
    let format = format_of(cli);
    let (report, code) = match &cli.command {
        Command::Analyze { file, bound } => commands::analyze(&document::load(file)?, *bound)?,
        Command::Liberate { file, bound } => commands::liberate(&document::load(file)?, *bound),
        Command::Minimal { file } => commands::minimal(&document::load(file)?)?,
        Command::Obstruct { file, bound } => commands::obstruct(&document::load(file)?, *bound)?,
        Command::Simulate {
            file,
            ell,
            iters,
            assign,
            seed,
            x0,
            exact,
        } => {
            let opts = commands::SimulateOptions {
                ell: ell.clone(),
                iters: *iters,
                assign: assign.clone(),
                seed: *seed,
                x0: x0.clone(),
                exact: *exact,
            };
            let doc = document::load(file)?;
            if format == Format::Text && !exact {
                return commands::simulate_csv(&doc, &opts).map(|s| (s, 0));
            }
            commands::simulate(&doc, &opts)?
        }
    };
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("serializable") + "\n",
        Format::Text => render::text(&report),
    };
    Ok((text, code))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, code)) => {
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
