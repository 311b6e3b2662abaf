use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bregnmf::divergence::{Convention, Family};
use bregnmf::io::{ArgOrder, TrajectoryFormat};
use bregnmf::nmf::Algorithm;

#[derive(Debug, Parser)]
#[command(
    name = "bregnmf",
    version,
    about = "β-divergence NMF and Bregman generator verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factorize a nonnegative matrix V ≈ WH.
    Factorize(FactorizeArgs),
    /// Check that the generator families reproduce the β-divergence.
    Verify(VerifyArgs),
    /// Emit β-divergence curves against a fixed reference value.
    Curve(CurveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Standard,
    Flipped,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Standard => Convention::Standard,
            ConventionArg::Flipped => Convention::Flipped,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    MuBeta,
    MuBregman,
    Sbcd,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::MuBeta => Algorithm::MuBeta,
            AlgorithmArg::MuBregman => Algorithm::MuBregman,
            AlgorithmArg::Sbcd => Algorithm::Sbcd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    A,
    B,
    C,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::A => Family::A,
            FamilyArg::B => Family::B,
            FamilyArg::C => Family::C,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// Numeric rectangle.
    Csv,
    /// UCI sonar layout: 60 features plus a class label per row.
    Sonar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrajectoryFormatArg {
    Csv,
    Json,
}

impl From<TrajectoryFormatArg> for TrajectoryFormat {
    fn from(f: TrajectoryFormatArg) -> Self {
        match f {
            TrajectoryFormatArg::Csv => TrajectoryFormat::Csv,
            TrajectoryFormatArg::Json => TrajectoryFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    /// d_β(point | reference)
    PointFirst,
    /// d_β(reference | point)
    ReferenceFirst,
}

impl From<OrderArg> for ArgOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::PointFirst => ArgOrder::PointFirst,
            OrderArg::ReferenceFirst => ArgOrder::ReferenceFirst,
        }
    }
}

#[derive(Debug, Args)]
pub struct FactorizeArgs {
    /// Input matrix file.
    #[arg(long, short)]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value_t = InputFormat::Csv)]
    pub format: InputFormat,

    #[arg(long, default_value_t = ',')]
    pub delimiter: char,

    /// The first CSV row holds column labels.
    #[arg(long)]
    pub has_header: bool,

    /// Factorize the transpose of the loaded matrix.
    #[arg(long)]
    pub transpose: bool,

    /// Factorization rank K.
    #[arg(long, short = 'k')]
    pub rank: usize,

    #[arg(long, value_enum, default_value_t = AlgorithmArg::MuBeta)]
    pub algorithm: AlgorithmArg,

    /// β, read in the --convention indexing.
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub beta: f64,

    /// Use the Bregman divergence of this generator family instead of d_β.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,

    #[arg(long, value_enum, default_value_t = ConventionArg::Standard)]
    pub convention: ConventionArg,

    #[arg(long, default_value_t = 0, conflicts_with = "seeds")]
    pub seed: u64,

    /// Inclusive seed range `a..b`; each seed writes to its own subdirectory.
    #[arg(long)]
    pub seeds: Option<String>,

    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,

    /// Relative objective change below which the solver stops.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,

    #[arg(long, default_value_t = 1e-12)]
    pub eps_floor: f64,

    /// Rescale W columns to unit max after solving.
    #[arg(long)]
    pub normalize: bool,

    #[arg(long, env = "BREGNMF_OUT_DIR", default_value = "out")]
    pub out_dir: PathBuf,

    #[arg(long, value_enum, default_value_t = TrajectoryFormatArg::Csv)]
    pub trajectory_format: TrajectoryFormatArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated β values (in --convention indexing) replacing the
    /// default grids.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub beta_grid: Option<Vec<f64>>,

    #[arg(long, value_enum, default_value_t = ConventionArg::Standard)]
    pub convention: ConventionArg,

    /// Negative control: use a wrong family-C constant.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Comma-separated β values.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0,1,2,3"
    )]
    pub betas: Vec<f64>,

    /// Sample range `lo:hi`, both bounds > 0.
    #[arg(long, allow_hyphen_values = true, default_value = "0.1:3")]
    pub range: String,

    #[arg(long, default_value_t = 100)]
    pub samples: usize,

    /// Fixed argument of the divergence.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub reference: f64,

    #[arg(long, value_enum, default_value_t = OrderArg::PointFirst)]
    pub order: OrderArg,

    #[arg(long, value_enum, default_value_t = ConventionArg::Standard)]
    pub convention: ConventionArg,

    /// Output CSV; defaults to `<out-dir>/curve.csv`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,

    #[arg(long, env = "BREGNMF_OUT_DIR", default_value = "out")]
    pub out_dir: PathBuf,
}
