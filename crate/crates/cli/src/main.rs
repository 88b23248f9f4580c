//! `fksum` command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod run;

#[derive(Debug, Parser)]
#[command(name = "fksum", version, about = "Exact fast kernel sums, smoothers and projection pursuit")]
pub struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output file; stdout when absent. `ica` takes `model.json,sources.csv`.
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kernel curves and constants.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Kernel sums and derivative sums of one data column.
    Sum(SumArgs),
    /// Kernel density estimate on a grid.
    Density(DensityArgs),
    /// Nadaraya-Watson or local linear regression on a grid.
    Regress(RegressArgs),
    /// Independent component analysis; writes a JSON model and the sources.
    Ica(IcaArgs),
    /// Minimum density hyperplane; writes a JSON model.
    Mdh(MdhArgs),
    /// Projection pursuit regression.
    #[command(subcommand)]
    Ppr(PprCmd),
    /// Desk-scale benchmarks.
    #[command(subcommand)]
    Bench(BenchCmd),
    /// Synthetic datasets.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct KernelArg {
    /// Kernel coefficients beta_0,...,beta_k.
    #[arg(long, default_value = "0.25,0.25")]
    pub beta: String,
}

#[derive(Debug, Subcommand)]
pub enum KernelCmd {
    /// The kernel rescaled to unit variance, sampled on [-5, 5].
    Curve {
        #[command(flatten)]
        kernel: KernelArg,
        #[arg(long, default_value_t = 500)]
        n: usize,
    },
    /// Normalizer, variance and roughness.
    Constants {
        #[command(flatten)]
        kernel: KernelArg,
    },
}

#[derive(Debug, Args)]
pub struct SumArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Column holding the points (name or 1-based position).
    #[arg(long, default_value = "1")]
    pub col: String,
    /// Column holding the weights; unit weights when absent.
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long)]
    pub h: f64,
    #[command(flatten)]
    pub kernel: KernelArg,
    /// CSV whose first column holds the evaluation points.
    #[arg(long)]
    pub eval: Option<PathBuf>,
    #[arg(long)]
    pub nbin: Option<usize>,
    /// sum, dsum or both.
    #[arg(long, default_value = "sum")]
    pub mode: String,
}

#[derive(Debug, Args)]
#[group(id = "bandwidth", required = true, multiple = false, args = ["h", "silverman", "cv"])]
pub struct BandwidthArgs {
    /// Fixed bandwidth.
    #[arg(long)]
    pub h: Option<f64>,
    /// Silverman's rule times this multiplier.
    #[arg(long)]
    pub silverman: Option<f64>,
    /// Leave-one-out cross-validation.
    #[arg(long)]
    pub cv: bool,
    /// Search interval `lo,hi` for `--cv`.
    #[arg(long, requires = "cv")]
    pub bracket: Option<String>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "1")]
    pub col: String,
    #[command(flatten)]
    pub bandwidth: BandwidthArgs,
    #[command(flatten)]
    pub kernel: KernelArg,
    #[arg(long)]
    pub nbin: Option<usize>,
    /// Number of grid points spanning the data range padded by 3h.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct RegressArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "1")]
    pub x: String,
    #[arg(long, default_value = "2")]
    pub y: String,
    /// nw or loclin.
    #[arg(long, default_value = "loclin")]
    pub method: String,
    #[command(flatten)]
    pub bandwidth: BandwidthArgs,
    #[command(flatten)]
    pub kernel: KernelArg,
    /// Number of grid points spanning the range of x.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct IcaArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Comma-separated columns; all columns when absent.
    #[arg(long)]
    pub cols: Option<String>,
    #[arg(long)]
    pub ncomp: usize,
    #[arg(long, default_value_t = 1.5)]
    pub hmult: f64,
    #[arg(long, default_value_t = 20)]
    pub it: usize,
    #[arg(long)]
    pub nbin: Option<usize>,
    #[command(flatten)]
    pub kernel: KernelArg,
}

#[derive(Debug, Args)]
pub struct MdhArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub cols: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub alphamax: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hmult: f64,
    /// Penalty constant, or `auto`.
    #[arg(long = "C", default_value = "auto")]
    pub c: String,
    /// Quasi-Newton iterations per penalty stage.
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    #[command(flatten)]
    pub kernel: KernelArg,
}

#[derive(Debug, Subcommand)]
pub enum PprCmd {
    /// Fits a model to the response column and the remaining (or listed) columns.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        y: String,
        #[arg(long)]
        cols: Option<String>,
        #[arg(long, default_value_t = 2)]
        nterms: usize,
        #[arg(long, default_value_t = 50)]
        max_iter: usize,
        #[command(flatten)]
        kernel: KernelArg,
    },
    /// Predicts from a saved model; the data must hold the fitted columns in order.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        cols: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BenchCmd {
    /// Fast sum against the naive double loop over doubling sizes.
    Scaling {
        /// Comma-separated ascending sizes.
        #[arg(long, default_value = "4096,8192,16384,32768,65536")]
        sizes: String,
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
        #[command(flatten)]
        kernel: KernelArg,
    },
    Ica {
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        d: usize,
    },
    Mdh {
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        d: usize,
    },
    Ppr {
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        nterms: usize,
    },
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// bimodal, sine-kink, clusters, ica, ppr or uniform.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numeric() { 3 } else { 2 })
        }
    }
}
