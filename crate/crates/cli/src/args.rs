use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use se2n_core::checks::Suite;

#[derive(Debug, Parser)]
#[command(
    name = "se2n",
    version,
    about = "Roto-translation invariant Fourier descriptors over SE(2,N)"
)]
pub struct Cli {
    /// Overlay file of `key=value` lines; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a synthetic rotated-object dataset as PGM files plus manifest.csv.
    Synth(SynthArgs),
    /// Extract descriptor features from a dataset directory.
    Extract(ExtractArgs),
    /// Train a one-against-one Gaussian SVM on a feature file.
    Train(TrainArgs),
    /// Classify a feature file with a saved model.
    Predict(PredictArgs),
    /// Recognition rate over random splits, or the clean/noisy protocol.
    Eval(EvalArgs),
    /// Run a numerical property suite and write its residual report.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 10)]
    pub classes: usize,
    #[arg(long, default_value_t = 72)]
    pub poses: usize,
    #[arg(long, default_value_t = 128)]
    pub size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

/// Descriptor parameters; unset values fall back to the config overlay,
/// then to the library defaults.
#[derive(Debug, Args, Default)]
pub struct DescriptorArgs {
    /// PS, BS, RPS, RBS, RPS+BS, CYCLIC_BS, HU, ZERNIKE or AFMT.
    #[arg(long)]
    pub kind: Option<String>,
    /// Rotation order.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Side of the square frequency window, in spectrum bins.
    #[arg(long)]
    pub window: Option<usize>,
    /// Hexagonal lattice step, in spectrum bins.
    #[arg(long)]
    pub lattice_step: Option<f64>,
    /// Zero-padding factor before the FFT.
    #[arg(long)]
    pub padding: Option<usize>,
    /// re_im or modulus.
    #[arg(long)]
    pub encoding: Option<String>,
    /// Skip barycenter centering.
    #[arg(long)]
    pub no_center: bool,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Dataset directory (manifest.csv or COIL-style names).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Feature CSV to write; grid manifests go next to it.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub descriptor: DescriptorArgs,
}

#[derive(Debug, Args, Default)]
pub struct SvmArgs {
    /// Fixed kernel bandwidth; otherwise chosen from the sigma grid.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Comma-separated candidate bandwidths (default scales with the
    /// feature dimension).
    #[arg(long)]
    pub sigma_grid: Option<String>,
    /// Soft-margin regularization.
    #[arg(long = "C")]
    pub c: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub svm: SvmArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Predictions CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Feature CSV for the random-split protocol.
    #[arg(
        long,
        required_unless_present = "train_clean_test_noisy",
        conflicts_with = "train_clean_test_noisy"
    )]
    pub features: Option<PathBuf>,
    /// Training fraction per class.
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Split without per-class stratification.
    #[arg(long)]
    pub no_stratify: bool,
    /// Learn on every clean image of --in, test on noisy views.
    #[arg(long, requires = "input")]
    pub train_clean_test_noisy: bool,
    /// Dataset directory for the clean/noisy protocol.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Comma-separated noise standard deviations on the 0-255 scale.
    #[arg(long, default_value = "5,10,20")]
    pub noise_sd: String,
    /// Test views drawn per class in the clean/noisy protocol.
    #[arg(long, default_value_t = 15)]
    pub views: usize,
    /// Report CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub svm: SvmArgs,
    #[command(flatten)]
    pub descriptor: DescriptorArgs,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: se2n_core::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// identities, invariance, oracle or genericity.
    #[arg(long, value_parser = parse_suite)]
    pub suite: Suite,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Residual report CSV (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}
