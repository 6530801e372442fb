use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use domestic::geometry::DEFAULT_ENUMERATION_CAP;

mod commands;
mod error;
mod suites;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "domestic", version, about = "Opposition diagrams and domesticity of automorphisms of small buildings over GF(2)")]
struct Cli {
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Cap on chambers, cosets or cases visited by a single computation.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_CAP)]
    budget: u128,
    #[arg(long, global = true, value_enum, default_value_t = Format::Ascii)]
    format: Format,
    /// Allow the long E7, E8 and F4 coset suites.
    #[arg(long, global = true)]
    extended: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Ascii,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decorated opposition diagram and JSON report of one automorphism.
    Analyze {
        /// Named family, e.g. `sp:3:0`, `an-duality:2`, `oplus:5:1`.
        #[arg(long, conflicts_with_all = ["identity", "json"])]
        family: Option<String>,
        /// The identity of the model given by `--model`.
        #[arg(long, requires = "model")]
        identity: bool,
        /// Model label such as `A:3`, `C:2`, `D:4` or `B:2`.
        #[arg(long)]
        model: Option<String>,
        /// File holding an automorphism in JSON form (`-` for stdin).
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Runs a named reproduction suite; `all` runs every suite.
    Verify { suite: String },
    /// Runs a search on a named Chevalley element such as `F4.theta4p`.
    Search {
        element: String,
        #[arg(long, value_enum, default_value_t = SearchStrategy::Orbit)]
        strategy: SearchStrategy,
        /// Type set for `coset`, as comma-separated labels.
        #[arg(long)]
        types: Option<String>,
        /// Restrict coset scans to the A-set of the element.
        #[arg(long)]
        restrict: bool,
        /// Vertex type for `fixed`.
        #[arg(long)]
        vertex_type: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Classifies the conjugacy classes of `sp4`, `sp6`, `gl3` or `gl4`.
    Enumerate { group: String },
    /// Writes automorphisms, diagram tables or the element catalogue.
    Export {
        #[arg(value_enum)]
        what: ExportKind,
        /// Families to include (defaults to a built-in list for `diagrams`).
        #[arg(long)]
        family: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchStrategy {
    Aset,
    Orbit,
    Coset,
    Sample,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    Automorphism,
    Diagrams,
    Catalogue,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub budget: u128,
    pub format: Format,
    pub extended: bool,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid(format!("--jobs: {e}")))?;
    }
    let opts = Options { budget: cli.budget, format: cli.format, extended: cli.extended };
    match cli.command {
        Command::Analyze { family, identity, model, json } => {
            commands::analyze(&commands::source(family, identity, model, json)?, opts)?;
            Ok(true)
        }
        Command::Verify { suite } => suites::verify(&suite, opts),
        Command::Search { element, strategy, types, restrict, vertex_type, samples, seed } => {
            let req = commands::SearchRequest { element, strategy, types, restrict, vertex_type, samples, seed };
            commands::search(&req, opts)?;
            Ok(true)
        }
        Command::Enumerate { group } => {
            commands::enumerate(&group, opts)?;
            Ok(true)
        }
        Command::Export { what, family } => {
            commands::export(what, &family, opts)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
