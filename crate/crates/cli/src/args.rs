use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Probabilistic zero forcing experiments.
///
/// Options may be given before or after the subcommand. When `--config` names an
/// experiment file, any option given explicitly on the command line replaces the
/// corresponding field of the file; fields set by neither fall back to defaults.
#[derive(Debug, Parser)]
#[command(name = "pzf", version, about, long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Vertex count; a comma-separated list for `sweep` and `bounds`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Edge probability: a decimal, a fraction `a/b`, or `n^-x` (relative to each n).
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub p: Vec<String>,
    #[arg(long, global = true, value_enum)]
    pub family: Option<Family>,
    /// Master seed. Required by `verify`; other commands default to 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub max_rounds: Option<u32>,
    /// A vertex `3`, a set `0,4,7`, or `min` for the fastest of all singleton starts.
    #[arg(long, global = true)]
    pub start: Option<String>,
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    #[arg(long, global = true)]
    pub c1: Option<f64>,
    #[arg(long, global = true)]
    pub c2: Option<f64>,
    /// Divisor of the alternative rule `min(c / d_lower, 1)`.
    #[arg(long, global = true)]
    pub dlower: Option<f64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Gnp,
    Path,
    Cycle,
    Star,
    Complete,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample or build a graph and write its edge list.
    Sample,
    /// Exact expected propagation times on a small graph.
    Exact,
    /// Run seeded trials and summarise propagation times.
    Run,
    /// Run trials over an (n, p) grid.
    Sweep {
        /// Fit median propagation time against a growth model.
        #[arg(long, value_enum)]
        fit: Option<FitModel>,
    },
    /// Coupled pairs of processes and their containment verdicts.
    Couple {
        #[arg(value_enum)]
        mode: CoupleMode,
        /// Vertices added to the start set for the larger process (`subset` mode).
        #[arg(long, value_delimiter = ',')]
        extra: Vec<usize>,
    },
    /// Degree and neighbourhood expansion audit of a sampled graph.
    Expansion,
    /// Predicted round bounds, phase thresholds or the η recursion over a grid.
    Bounds,
    /// Exhaustive edge-conditioning checks on tiny vertex sets.
    Oracle {
        #[arg(value_enum)]
        kind: OracleChoice,
    },
    /// Run the acceptance checks; exits 2 if any fails.
    Verify {
        /// Only these criteria (1 to 11).
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<u8>,
    },
    /// Project a summary table onto two axes for plotting.
    Plotdata {
        /// Summary CSV written by `run` or `sweep`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitModel {
    LoglogN,
    LogInvP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoupleMode {
    Subset,
    Alternative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleChoice {
    Edge,
    Domination,
}
