use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "nbpk", version, about = "Poisson-Kingman and negative binomial Poisson-Kingman sampling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw ranked weight vectors.
    Sample(SampleArgs),
    /// Evaluate a density on a grid (stable family, alpha = 0.5).
    Density(DensityArgs),
    /// Run verification criteria.
    Verify(VerifyArgs),
    /// Mean weight by rank, PD(alpha, 0) against the r-trimmed law.
    Zipf(ZipfArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file. Without it, output goes to `$NBPK_OUTPUT_DIR/<command>.<ext>`
    /// when that variable is set, else to stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Stable,
    Gamma,
    TruncStable,
    GenGamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructionArg {
    Jump,
    Stick,
    Trimmed,
    Ratio,
    Subordinator,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Scale C of the stable Lévy density.
    #[arg(long = "c", default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum, default_value_t = ConstructionArg::Jump)]
    pub construction: ConstructionArg,
    /// Negative binomial shape r; omit for the Poisson case.
    #[arg(long)]
    pub r: Option<f64>,
    /// Intensity multiplier v of the Poisson case.
    #[arg(long, default_value_t = 1.0)]
    pub v: f64,
    #[arg(long, default_value_t = 10)]
    pub n_weights: usize,
    #[arg(long, default_value_t = 1)]
    pub n_samples: usize,
    /// Terms broken off by the stick constructions.
    #[arg(long, default_value_t = nbpk::simplex::DEFAULT_STICK_TERMS)]
    pub n_terms: usize,
    #[arg(long, default_value_t = nbpk::point_process::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityName {
    /// Density of the BN(r) total.
    #[value(name = "g-r")]
    GR,
    /// First size-biased pick fraction w given T_0 = t.
    FirstPick,
    /// Next remaining sum t1 given T_n = t.
    Transition,
    /// Remaining sum T_n after n picks.
    MarginalTn,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(value_enum)]
    pub name: DensityName,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long = "c", default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Conditioning total for first-pick and transition.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Step index for transition and marginal-tn.
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// List suites and criteria, then exit.
    #[arg(long)]
    pub list: bool,
    /// Run only these suites (repeatable).
    #[arg(long)]
    pub suite: Vec<String>,
    /// Run only these criteria (repeatable), e.g. c07.
    #[arg(long)]
    pub criterion: Vec<String>,
    #[arg(long, default_value_t = nbpk::verify::DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ZipfArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Number of largest jumps trimmed.
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 100)]
    pub n_ranks: usize,
    #[arg(long, default_value_t = 1000)]
    pub n_samples: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}
