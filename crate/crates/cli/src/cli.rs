use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Exceptional points of interpolated qubit channels.
#[derive(Debug, Parser)]
#[command(name = "qcep", version, about)]
pub struct Cli {
    /// Numerical tolerance of the command (see README for its meaning per command).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (a directory for `decompose`); standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON file with default values for any flag; flags on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List built-in channels or show one channel.
    #[command(subcommand)]
    Channels(ChannelsCmd),
    /// Eigenvalues of (1 − p) E_a + p E_b on a grid of p.
    Sweep(SweepArgs),
    /// Locate an EP on a pair family or an EP3 in a triple simplex.
    EpFind(EpFindArgs),
    /// Phase diagram over the simplex of three channels.
    PhaseDiagram(PhaseDiagramArgs),
    /// Compile a channel into two one-ancilla circuits.
    Decompose(DecomposeArgs),
    /// Synthetic process tomography with maximum-likelihood reconstruction.
    Qpt(QptArgs),
}

#[derive(Debug, Subcommand)]
pub enum ChannelsCmd {
    List,
    /// Affine form and CPTP report of a built-in channel or a channel file.
    Show { channel: String },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Two channels, comma separated (default E1,E2).
    #[arg(long)]
    pub pair: Option<String>,
    /// Number of equispaced p values in [0, 1] (default 101).
    #[arg(long)]
    pub points: Option<usize>,
    /// Add eigenvalues estimated by simulated tomography at every point.
    #[arg(long)]
    pub tomography: bool,
    /// Shots per tomography setting (default 4096).
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EpFindArgs {
    #[arg(long, conflicts_with = "triple")]
    pub pair: Option<String>,
    #[arg(long)]
    pub triple: Option<String>,
    /// Starting barycentric point for the EP3 search (default centroid).
    #[arg(long)]
    pub start: Option<String>,
}

#[derive(Debug, Args)]
pub struct PhaseDiagramArgs {
    /// Three channels, comma separated (default E1,E2,E3).
    #[arg(long)]
    pub triple: Option<String>,
    /// Lattice subdivisions per simplex edge (default 200).
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    pub channel: String,
    /// Random restarts after the identity-like start (default 8 in total).
    #[arg(long)]
    pub starts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct QptArgs {
    pub channel: String,
    /// Shots per setting (default 4096).
    #[arg(long)]
    pub shots: Option<u64>,
    /// Use exact outcome probabilities instead of sampled counts.
    #[arg(long)]
    pub exact: bool,
    /// Weight of the fully depolarizing channel mixed in before measuring.
    #[arg(long)]
    pub noise: Option<f64>,
}
