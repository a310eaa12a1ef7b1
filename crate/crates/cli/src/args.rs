use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "convspec", version, about = "Spectra and dynamics of exactly solvable photon conversion models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Numerical and closed-form eigenvalues of one sector.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sector: SectorArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Polynomials `P_n(E_l)` of one sector, one column per eigenvalue.
    Eigvec {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sector: SectorArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Orthogonality weights of one sector.
    Weights {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sector: SectorArgs,
        /// Rescale the weights to sum to one.
        #[arg(long)]
        normalized: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Expectation value of an observable along the exact evolution.
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sector: OptionalSectorArgs,
        /// Last time sample.
        #[arg(long = "t-max", allow_negative_numbers = true)]
        t_max: f64,
        /// Time step.
        #[arg(long)]
        dt: f64,
        /// Initial state (JSON); defaults to `|0>` of the selected sector.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Observable (JSON); defaults to the mode-0 photon number.
        #[arg(long)]
        observable: Option<PathBuf>,
        /// Also write a gnuplot script plotting the CSV written to `--out`.
        #[arg(long)]
        gnuplot: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Coefficient tables of every sector of a lifted model.
    Lift {
        #[command(flatten)]
        model: ModelArgs,
        /// Single sector level.
        #[arg(long = "N", conflicts_with = "n_max")]
        n: Option<usize>,
        /// All levels from 0 through this one.
        #[arg(long = "N-max")]
        n_max: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Invariant suite over a parameter grid; exits 1 if any residual exceeds its tolerance.
    Verify {
        /// Family name, or `all`.
        #[arg(long)]
        family: String,
        #[command(flatten)]
        params: FamilyParams,
        /// Largest sector level checked.
        #[arg(long = "N-max", default_value_t = 12)]
        n_max: usize,
        /// Single tolerance replacing the per-check defaults.
        #[arg(long)]
        tol: Option<f64>,
        /// Corrupt one coupling before diagonalizing (exercises the failure path).
        #[arg(long, hide = true)]
        inject_fault: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct FamilyParams {
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
}

impl FamilyParams {
    pub fn given(&self) -> Vec<(&'static str, f64)> {
        [
            ("p", self.p),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("q", self.q),
            ("c", self.c),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Catalog family name, e.g. `krawtchouk` or `dual_q_hahn`.
    #[arg(long, conflicts_with = "model")]
    pub family: Option<String>,
    #[command(flatten)]
    pub params: FamilyParams,
    /// Model specification file (JSON).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Multiplicity of mode 0; values above 1 lift the model.
    #[arg(long)]
    pub k0: Option<usize>,
    /// Multiplicity of mode 1; values above 1 lift the model.
    #[arg(long)]
    pub k1: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega1: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SectorArgs {
    #[arg(long, default_value_t = 0)]
    pub r0: usize,
    #[arg(long, default_value_t = 0)]
    pub r1: usize,
    /// Sector level.
    #[arg(long = "N")]
    pub n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OptionalSectorArgs {
    #[arg(long, default_value_t = 0)]
    pub r0: usize,
    #[arg(long, default_value_t = 0)]
    pub r1: usize,
    /// Sector level of the default initial state.
    #[arg(long = "N")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
