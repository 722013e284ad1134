use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    X,
    P,
    Both,
}

/// Exact metric operator, Hermitian counterpart and numeric checks for
/// H = p²/2m + μ²x²/2 + iεx³ − mħ²ε²x⁴.
#[derive(Debug, Parser)]
#[command(name = "weylpt", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Mass m.
    #[arg(long = "m", default_value_t = 1.0, global = true)]
    pub mass: f64,
    /// Spring parameter μ (frequency μ/√m).
    #[arg(long, default_value_t = 1.0, global = true)]
    pub mu: f64,
    /// Reduced Planck constant ħ.
    #[arg(long, default_value_t = 1.0, global = true)]
    pub hbar: f64,
    /// Scaled-units shortcut: sets m = ħ = 1 and μ = M, so 𝓜 = M.
    #[arg(long = "M", global = true, conflicts_with_all = ["mass", "mu", "hbar"])]
    pub m_scale: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the metric-generator hierarchy Q₁, Q₃, … and check residuals.
    Qsolve {
        #[arg(long, default_value_t = 7)]
        max_order: u32,
    },
    /// Equivalent Hermitian Hamiltonian h = e^{−Q/2} H e^{Q/2}.
    Hermitian {
        #[arg(long, default_value_t = 6)]
        max_order: u32,
    },
    /// Physical position and momentum operators e^{Q/2} A e^{−Q/2}.
    Observables {
        #[arg(long, value_enum, default_value_t = Which::Both)]
        which: Which,
        #[arg(long, default_value_t = 3)]
        max_order: u32,
    },
    /// Physical-unit h through ε² and its classical limit.
    Classical,
    /// First-order energies: exact, printed formula and matrix oracle.
    Energy {
        #[arg(long, default_value_t = 8)]
        n_max: u32,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 120)]
        dim: usize,
    },
    /// Lowest eigenvalues of the truncated non-Hermitian Hamiltonian.
    Spectrum {
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 80)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        levels: usize,
    },
    /// Physical wave function e^{−Q/2}ψₙ and its probability density.
    Density {
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        xmin: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        xmax: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
    /// Run the full invariant and oracle suite.
    Verify {
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 80)]
        dim: usize,
    },
}
