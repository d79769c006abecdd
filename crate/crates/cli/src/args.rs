use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cactl", version, about = "Boundary controllability of Boolean cellular automata")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transition-graph analysis for a range of region lengths.
    Analyze(AnalyzeArgs),
    /// One verdict row per elementary rule.
    Survey(SurveyArgs),
    /// Synthesize boundary controls between two region words.
    Steer(SteerArgs),
    /// Trace block language and its finite-type approximation.
    Trace(TraceArgs),
    /// Blocking-word and visibly-blocking checks.
    Blocking(BlockingArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// `wolfram:<code>` or `table:r=<r>:<bits>`.
    #[arg(long)]
    pub rule: String,
    #[arg(long)]
    pub n_min: usize,
    #[arg(long)]
    pub n_max: usize,
    /// Also compute the height-K trace approximation at every n.
    #[arg(long)]
    pub trace_k: Option<usize>,
    #[arg(long, default_value_t = 4096)]
    pub index_cap: usize,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    #[arg(long)]
    pub n: usize,
    /// `all` or a comma-separated list of Wolfram codes.
    #[arg(long, default_value = "all")]
    pub rules: String,
    #[arg(long, default_value_t = 4096)]
    pub index_cap: usize,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RenderKind {
    Text,
    Image,
}

#[derive(Debug, Args)]
pub struct SteerArgs {
    #[arg(long)]
    pub rule: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    /// Require a plan of exactly this many steps.
    #[arg(long)]
    pub exact_time: Option<usize>,
    #[arg(long, value_enum)]
    pub render: Option<RenderKind>,
    /// Output file for the rendering (required for `image`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Draw only the region, without the control cells.
    #[arg(long)]
    pub no_borders: bool,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub rule: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Compare the height-2 approximation with the transition graph.
    #[arg(long)]
    pub check_approx: bool,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BlockingArgs {
    #[arg(long)]
    pub rule: String,
    #[arg(long)]
    pub word: Option<String>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub offset: Option<usize>,
    /// Verify a visibly blocking set instead of a single word.
    #[arg(long)]
    pub visibly: bool,
    #[arg(long)]
    pub l: Option<usize>,
    /// `all` or a comma-separated list of words of length L.
    #[arg(long)]
    pub set: Option<String>,
    /// Horizon of the bounded checks (default 6 steps of radius 1).
    #[arg(long)]
    pub t_max: Option<usize>,
    /// Largest region searched for transition-graph witnesses.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}
