//! Flag definitions for the four subcommands.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "phaserk",
    about = "Energy-decreasing IMEX Runge-Kutta schemes for phase-field models",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify a tableau pair: eigenvalues, thresholds, verdict.
    Analyze(AnalyzeArgs),
    /// Integrate a phase-field model and track the discrete energy.
    Simulate(SimulateArgs),
    /// Fit a self-convergence order against a fine-step reference.
    Converge(ConvergeArgs),
    /// Build a four-stage third-order pair from family parameters.
    Construct(ConstructArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Tableau file (stage count, implicit rows, explicit rows).
    #[arg(long)]
    pub tableau: PathBuf,
    /// Lipschitz constant entering the beta threshold.
    #[arg(long, default_value_t = 2.0)]
    pub lipschitz: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Model: ac, ch, or mbe.
    #[arg(long, default_value = "ac")]
    pub model: String,
    /// Interfacial width parameter.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Truncation bound of the double-well nonlinearity.
    #[arg(long, default_value_t = 1.0)]
    pub cutoff: f64,
    /// Implicit-side stabilization weight; defaults to the certificate
    /// threshold alpha0.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Zeroth-order stabilization weight; defaults to the certificate
    /// threshold beta0.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Grid points per dimension (power of two); defaults to 128 in 1-D
    /// and 64 in 2-D.
    #[arg(long)]
    pub n: Option<usize>,
    /// Spatial dimension (1 or 2).
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Apply the 2/3 dealiasing rule to the nonlinear term.
    #[arg(long)]
    pub dealias: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Tableau file.
    #[arg(long)]
    pub tableau: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Time step.
    #[arg(long)]
    pub tau: f64,
    /// Final time.
    #[arg(long)]
    pub tend: f64,
    /// Seed for the random initial state.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Run even when the pair has no dissipation certificate.
    #[arg(long)]
    pub force: bool,
    /// Write a field snapshot every this many steps (0 = none).
    #[arg(long, default_value_t = 0)]
    pub snap_stride: usize,
    /// Also emit a plotting helper script next to the CSV.
    #[arg(long)]
    pub plot_script: bool,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    /// Tableau file.
    #[arg(long)]
    pub tableau: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated step sizes, at least three, each dividing --tend.
    #[arg(long, value_delimiter = ',')]
    pub taus: Vec<f64>,
    /// Final time.
    #[arg(long)]
    pub tend: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Also emit a plotting helper script next to the CSV.
    #[arg(long)]
    pub plot_script: bool,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Family parameter file (key = value lines: c2, c3, c4, zeta,
    /// zeta_hat, free_a, free_ahat).
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory for the tableau and its report.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Lipschitz constant for the certificate report.
    #[arg(long, default_value_t = 2.0)]
    pub lipschitz: f64,
}
