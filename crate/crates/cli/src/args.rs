use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dmcv_core::{FigureId, Scheme};

#[derive(Debug, Parser)]
#[command(name = "dmcv", version, about = "Key rates for discrete-modulated MDI CV-QKD with zero-photon catalysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the key rate of a single configuration.
    Keyrate {
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
    /// Optimize transmittance, variance, or reachable distance.
    Optimize {
        #[arg(long, value_enum)]
        optimize: Target,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Relay placement used by `--optimize distance`.
        #[arg(long, value_enum, default_value_t = LayoutArg::Asymmetric)]
        layout: LayoutArg,
        /// Place the relay at `L_BC = d·L_AC` instead (distance mode only).
        #[arg(long)]
        ratio_d: Option<f64>,
        /// Bisection tolerance for `--optimize distance`, km.
        #[arg(long, default_value_t = 1e-3)]
        tol_km: f64,
    },
    /// Write the data behind one figure as CSV files plus a JSON manifest.
    Figure {
        #[arg(value_parser = parse_figure)]
        figure: FigureId,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        distance_steps: Option<usize>,
        #[arg(long)]
        variance_steps: Option<usize>,
        #[arg(long)]
        beta_steps: Option<usize>,
        #[arg(long)]
        modulation_steps: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    T,
    Tv,
    Distance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    Asymmetric,
    /// Symmetric relay, reported distance `L_AC + L_BC`.
    Symmetric,
    /// Symmetric relay, reported distance per arm.
    SymmetricPerArm,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ProtocolArgs {
    /// Scenario file supplying defaults; explicit flags override it.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<Scheme>,
    /// Catalysis transmittance in (0,1], or `off`.
    #[arg(long)]
    pub zpc_t: Option<String>,
    #[arg(long)]
    pub variance: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, conflicts_with_all = ["eps_a", "eps_b"])]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eps_a: Option<f64>,
    #[arg(long)]
    pub eps_b: Option<f64>,
    /// Alice–relay distance, km.
    #[arg(long)]
    pub lac: Option<f64>,
    /// Bob–relay distance, km.
    #[arg(long)]
    pub lbc: Option<f64>,
    /// Fiber loss, dB/km.
    #[arg(long)]
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub t_lo: Option<f64>,
    #[arg(long)]
    pub t_hi: Option<f64>,
    #[arg(long)]
    pub t_steps: Option<usize>,
    #[arg(long)]
    pub v_lo: Option<f64>,
    #[arg(long)]
    pub v_hi: Option<f64>,
    #[arg(long)]
    pub v_steps: Option<usize>,
    #[arg(long)]
    pub refine_iters: Option<usize>,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse()
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    s.parse()
}
