use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ptf-fool", version, about = "Bounded-independence fooling of Gaussian polynomial threshold functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Output path (CSV or JSON depending on the subcommand); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Master seed; a random seed is chosen and printed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 or omitted: all cores). Outputs do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Arithmetic {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Split {
    Exhaustive,
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleModeArg {
    PaperExact,
    Desk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Iid,
    Kwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Gaussian,
    Sign,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Gaussian moments E[p^k] (optionally with a Monte Carlo check).
    Moments(MomentsArgs),
    /// M_ell estimates with witnesses.
    Mell(MellArgs),
    /// Structure decomposition of a multilinear polynomial (JSON).
    Decompose(DecomposeArgs),
    /// Check a decomposition against its polynomial (CSV).
    Verify(VerifyArgs),
    /// Check the mollifier properties (CSV).
    Mollifier(MollifierArgs),
    /// Parameter schedule (JSON).
    Schedule(ScheduleArgs),
    /// Draw samples from the iid or k-wise family (binary f64 + JSON sidecar, or CSV).
    Sample(SampleArgs),
    /// Multilinear replacement of a general polynomial (JSON).
    Multilinearize(MultilinearizeArgs),
    /// Fooling-error curves from an experiment config (CSV + JSON sidecar).
    Fool(FoolArgs),
    /// Anticoncentration curve Pr(|p| < eps) (CSV).
    Anticoncentration(AntiArgs),
    /// Exact sign-versus-Gaussian moment ratios (CSV).
    BernoulliCompare(BernoulliArgs),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Moments(a) => &a.common,
            Command::Mell(a) => &a.common,
            Command::Decompose(a) => &a.common,
            Command::Verify(a) => &a.common,
            Command::Mollifier(a) => &a.common,
            Command::Schedule(a) => &a.common,
            Command::Sample(a) => &a.common,
            Command::Multilinearize(a) => &a.common,
            Command::Fool(a) => &a.common,
            Command::Anticoncentration(a) => &a.common,
            Command::BernoulliCompare(a) => &a.common,
        }
    }
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Polynomial file (text or JSON).
    #[arg(long)]
    pub poly: PathBuf,
    /// Moment orders.
    #[arg(long, value_delimiter = ',', default_values_t = [2u32, 4])]
    pub k: Vec<u32>,
    /// Coefficient arithmetic.
    #[arg(long, value_enum, default_value_t = Arithmetic::Exact)]
    pub mode: Arithmetic,
    /// Also estimate each moment from this many iid Gaussian samples.
    #[arg(long)]
    pub samples: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MellArgs {
    /// Homogeneous polynomial file (text or JSON).
    #[arg(long)]
    pub poly: PathBuf,
    /// Orders ell (default 1..=degree).
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Search mode.
    #[arg(long, value_enum, default_value_t = Split::Exhaustive)]
    pub mode: Split,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Multilinear polynomial file (text or JSON), read exactly.
    #[arg(long)]
    pub poly: PathBuf,
    /// Moment schedule m_1,...,m_d (even, nondecreasing); default 4,16,16,...
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<u32>,
    /// Split search mode.
    #[arg(long, value_enum, default_value_t = Split::Exhaustive)]
    pub mode: Split,
    /// Run the verifier and write its CSV next to the output (exit 1 on failure).
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// The decomposed polynomial (text or JSON).
    #[arg(long)]
    pub poly: PathBuf,
    /// Decomposition JSON produced by `decompose`.
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MollifierArgs {
    /// Smoothness parameters C.
    #[arg(long, value_delimiter = ',', default_values_t = [2.0f64, 4.0])]
    pub c: Vec<f64>,
    /// Dimension n (1 to 3).
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Highest derivative order checked (at most 3).
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Tail radii D.
    #[arg(long, value_delimiter = ',', default_values_t = [5.0f64, 10.0, 20.0])]
    pub d: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    /// Degree d.
    #[arg(long)]
    pub d: usize,
    /// Target error eps in (0, 1/2).
    #[arg(long)]
    pub eps: f64,
    /// Symbolic exponents (paper-exact) or concrete desk-scale values.
    #[arg(long, value_enum, default_value_t = ScheduleModeArg::Desk)]
    pub mode: ScheduleModeArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Sample family.
    #[arg(long, value_enum, default_value_t = Family::Kwise)]
    pub mode: Family,
    /// Coordinates per sample.
    #[arg(long)]
    pub n: usize,
    /// Independence k (kwise only).
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Finite field, `prime:<p>` or `binary:<b>` (kwise only).
    #[arg(long, default_value = "prime:65537")]
    pub field: String,
    /// Marginal law (kwise only; sign needs a binary field).
    #[arg(long, value_enum, default_value_t = TargetArg::Gaussian)]
    pub target: TargetArg,
    /// Number of samples.
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    /// Split every coordinate into this many correlated copies.
    #[arg(long)]
    pub copies: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct MultilinearizeArgs {
    /// General polynomial file (powers allowed).
    #[arg(long)]
    pub poly: PathBuf,
    /// Copies N per variable.
    #[arg(long)]
    pub copies: usize,
    /// Estimate Pr(|p(X) - p_delta(X~)| > delta) and exit 1 if it is not below delta.
    #[arg(long)]
    pub verify: bool,
    /// Threshold delta for --verify.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Samples for --verify.
    #[arg(long, default_value_t = 20_000)]
    pub samples: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct FoolArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Samples per point (overrides the config).
    #[arg(long)]
    pub samples: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct AntiArgs {
    /// Multilinear polynomial file; rescaled to E[p^2] = 1.
    #[arg(long)]
    pub poly: PathBuf,
    /// Samples.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// eps grid (default 13 log-spaced points from 1e-4 to 1e-1).
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BernoulliArgs {
    /// Polynomial files; a seeded battery is used when none are given.
    #[arg(long)]
    pub poly: Vec<PathBuf>,
    /// Even moment orders.
    #[arg(long, value_delimiter = ',', default_values_t = [2u32, 4, 6])]
    pub k: Vec<u32>,
    /// Battery size.
    #[arg(long, default_value_t = 200)]
    pub size: usize,
    /// Battery variable count.
    #[arg(long, default_value_t = 12)]
    pub nvars: usize,
    /// Battery maximum degree.
    #[arg(long, default_value_t = 3)]
    pub degree: usize,
    #[command(flatten)]
    pub common: Common,
}
