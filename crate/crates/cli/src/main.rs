mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "percolab",
    version,
    about = "Percolation, plaquette-surface and tree experiments"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output directory for CSV files and manifests.
    #[arg(long, global = true, default_value = "percolab-out")]
    pub out: std::path::PathBuf,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// JSON object of default flag values; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    /// Master seed.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact solution on the tree T_b, with golden-file comparison.
    Tree(commands::TreeArgs),
    /// Property checks of Π(A) over connected vertex sets.
    TopologyCheck(commands::TopologyArgs),
    /// Sample one configuration and store it in the binary format.
    Sample(commands::SampleArgs),
    /// One-arm probabilities and exponent fits.
    OneArm(commands::OneArmArgs),
    /// Bisection for p_c on the left-right crossing of B_n.
    Pc(commands::PcArgs),
    /// Bisection for p_fin on spanning components of X^F in B_n.
    Pfin(commands::PfinArgs),
    /// Block experiment: R_n deletion, good blocks, overlaps.
    Block(commands::BlockArgs),
    /// Hyperplane surface built from good paths in a slab.
    Surface(commands::SurfaceArgs),
    /// Rightmost-growth construction of lim Π(V_n).
    PiLimit(commands::PiLimitArgs),
    /// Number of spanning X^F components over a grid of p.
    Uniqueness(commands::UniquenessArgs),
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    ExitCode::from(commands::run(argv))
}
