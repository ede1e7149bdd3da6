//! Command-line front end for `causal-bde`: file formats plus the `priors`,
//! `score`, `learn`, `predict` and `simulate` subcommands.

pub mod commands;
pub mod error;
pub mod formats;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::{CliError, CliResult};

/// Environment variable overriding the completion cap for hidden data.
pub const MAX_COMPLETIONS_ENV: &str = "CAUSAL_BDE_MAX_COMPLETIONS";

#[derive(Debug, Parser)]
#[command(
    name = "causal-bde",
    version,
    about = "Bayesian learning of causal networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Dirichlet exponents for one structure.
    Priors(PriorsArgs),
    /// Score a list of structures and print their posterior.
    Score(ScoreArgs),
    /// Search the structure space.
    Learn(LearnArgs),
    /// Model-averaged probability of query cases.
    Predict(PredictArgs),
    /// Sample cases from a network.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Causal,
    Acausal,
}

impl From<ModeArg> for causal_bde::Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Causal => causal_bde::Mode::Causal,
            ModeArg::Acausal => causal_bde::Mode::Acausal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SearchArg {
    Exhaustive,
    Greedy,
}

/// Prior settings shared by every learning subcommand.
#[derive(Debug, Args)]
pub struct PriorArgs {
    /// Prior network JSON; also declares the variables and their states.
    #[arg(long, value_name = "FILE")]
    pub prior_network: PathBuf,
    /// Equivalent sample size for priors built from the prior network.
    #[arg(long, conflicts_with = "epsilon")]
    pub ess: Option<f64>,
    /// Use uninformative priors with this exponent instead.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Case file (CSV).
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,
    /// Variable that is never observed (repeatable).
    #[arg(long, value_name = "NAME")]
    pub hidden: Vec<String>,
}

#[derive(Debug, Args)]
pub struct PriorsArgs {
    #[command(flatten)]
    pub prior: PriorArgs,
    /// Arc list such as `a->b, b->c`; empty for no arcs.
    #[arg(long, default_value = "")]
    pub structure: String,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Structures JSON.
    #[arg(long, value_name = "FILE")]
    pub structures: PathBuf,
    #[arg(long, value_enum, default_value = "causal")]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "causal")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub search: SearchArg,
    /// Parent bound; unbounded for exhaustive search, 3 for greedy by default.
    #[arg(long)]
    pub max_parents: Option<usize>,
    /// Random restarts for greedy search.
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of hypotheses to print.
    #[arg(long, default_value_t = 5)]
    pub top: usize,
    /// Write the top structure as DOT.
    #[arg(long, value_name = "FILE")]
    pub dot: Option<PathBuf>,
    /// Write the top structure with posterior-mean tables as network JSON.
    #[arg(long, value_name = "FILE")]
    pub network_out: Option<PathBuf>,
    /// Write every greedy step as CSV.
    #[arg(long, value_name = "FILE")]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub prior: PriorArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Query cases (CSV, same format as the data).
    #[arg(long, value_name = "FILE")]
    pub cases: PathBuf,
    /// Average over these structures instead of every DAG or class.
    #[arg(long, value_name = "FILE")]
    pub structures: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "causal")]
    pub mode: ModeArg,
    #[arg(long)]
    pub max_parents: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Ground-truth network JSON.
    #[arg(long, value_name = "FILE")]
    pub network: PathBuf,
    /// Number of cases.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Set a variable in every case, as `name=state` (repeatable).
    #[arg(long = "do", value_name = "NAME=STATE", conflicts_with = "regime")]
    pub interventions: Vec<String>,
    /// Per-case set decisions (CSV).
    #[arg(long, value_name = "FILE")]
    pub regime: Option<PathBuf>,
    /// Write this variable as `?` (repeatable).
    #[arg(long, value_name = "NAME")]
    pub hidden: Vec<String>,
    /// Output file; standard output by default.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the subcommand, writing
/// results to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                return write!(out, "{e}").map_err(|e| CliError::Data(e.to_string()));
            }
            _ => return Err(CliError::Usage(e.to_string())),
        },
    };
    commands::dispatch(cli.command, out)
}
