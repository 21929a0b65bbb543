//! `eventflux` command-line front end.
//!
//! Every subcommand prints exactly one JSON line on stdout. Progress and
//! human-readable detail go to stderr.

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eventflux::FormatKind;

#[derive(Parser, Debug)]
#[command(
    name = "eventflux",
    version,
    about = "Event-camera subsampling and representation toolkit"
)]
pub struct Cli {
    /// Base seed for every random draw.
    #[arg(long, global = true, env = "EVENTFLUX_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Suppress stderr detail.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Convert between event file formats.
    Convert(ConvertArgs),
    /// Draw a random subset of events.
    Subsample(SubsampleArgs),
    /// Build the kernel-weighted frame tensor.
    Represent(RepresentArgs),
    /// Hyperparameter sensitivity of a set of training runs.
    HpSensitivity(HpArgs),
    /// Histogram of pairwise gradient cosine similarities.
    GradDiversity(GradArgs),
    /// One-tailed binomial test against chance.
    Binomial(BinomialArgs),
    /// Generate synthetic rotating-fan streams.
    GenFan(GenFanArgs),
}

#[derive(Args, Debug)]
pub struct Geometry {
    /// Sensor width, required for atis-bin input.
    #[arg(long)]
    pub width: Option<u16>,
    #[arg(long)]
    pub height: Option<u16>,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Defaults to the input file extension.
    #[arg(long)]
    pub in_format: Option<FormatKind>,
    #[arg(long)]
    pub out: PathBuf,
    /// Defaults to the output file extension.
    #[arg(long)]
    pub out_format: Option<FormatKind>,
    #[command(flatten)]
    pub geometry: Geometry,
}

#[derive(Args, Debug)]
pub struct SubsampleArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub in_format: Option<FormatKind>,
    /// Number of events to keep.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub epoch: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Write this many draws (epochs `epoch..epoch+repeats`) to `.rNNN` files.
    #[arg(long)]
    pub repeats: Option<usize>,
    #[command(flatten)]
    pub geometry: Geometry,
}

#[derive(Args, Debug)]
pub struct RepresentArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub in_format: Option<FormatKind>,
    /// Temporal bins per polarity.
    #[arg(long, default_value_t = eventflux::represent::DEFAULT_CHANNELS)]
    pub channels: usize,
    #[arg(long, default_value = "triangular")]
    pub kernel: eventflux::KernelKind,
    /// Gaussian width in normalized time.
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    /// Weights for `--kernel mlp`.
    #[arg(long)]
    pub kernel_file: Option<PathBuf>,
    /// Use raw microsecond timestamps instead of normalizing to [0, 1].
    #[arg(long)]
    pub raw_time: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write nonzero cells as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub geometry: Geometry,
}

#[derive(Args, Debug)]
pub struct HpArgs {
    /// Runs table, `.csv` or `.jsonl`.
    #[arg(long)]
    pub runs: PathBuf,
    #[arg(long, default_value = "validation")]
    pub split: eventflux::analysis::Split,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub kmax: usize,
    /// Per-k table; defaults to the report path with a `.per_k.csv` suffix.
    #[arg(long)]
    pub per_k_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GradArgs {
    /// Gradient file, binary or CSV.
    #[arg(long)]
    pub grads: PathBuf,
    #[arg(long, default_value_t = eventflux::analysis::DEFAULT_COSINE_BINS)]
    pub bins: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BinomialArgs {
    #[arg(long)]
    pub correct: u64,
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub chance: f64,
}

#[derive(Args, Debug)]
pub struct GenFanArgs {
    /// Single clip output path.
    #[arg(long, conflicts_with = "dataset")]
    pub out: Option<PathBuf>,
    /// Write a two-class dataset into this directory instead.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Revolutions per second of a single clip, or of the slow class.
    #[arg(long, default_value_t = 10.0)]
    pub speed: f64,
    /// Fast-class speed in dataset mode; three times `--speed` by default.
    #[arg(long)]
    pub fast_speed: Option<f64>,
    /// Clip length in microseconds.
    #[arg(long, default_value_t = eventflux::synth::DEFAULT_CLIP_US)]
    pub duration: u64,
    #[arg(long, default_value_t = 128)]
    pub width: u16,
    #[arg(long, default_value_t = 128)]
    pub height: u16,
    #[arg(long, default_value_t = 3)]
    pub blades: u32,
    #[arg(long, default_value_t = 3200)]
    pub events_per_rev: u32,
    /// Background events per second.
    #[arg(long, default_value_t = 2000.0)]
    pub noise_rate: f64,
    #[arg(long, default_value_t = eventflux::synth::DEFAULT_SLOW_VIDEOS)]
    pub n_slow: usize,
    #[arg(long, default_value_t = eventflux::synth::DEFAULT_FAST_VIDEOS)]
    pub n_fast: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
