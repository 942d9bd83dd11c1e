//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "yona",
    version,
    about = "Patch-level image augmentation: cut, mask one piece with noise, augment the other",
    args_override_self = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Augment a CIFAR binary file and write augmented.bin plus manifest.txt.
    Augment(AugmentArgs),
    /// Write original / augmented / composed PNGs for each augmentation.
    Preview(PreviewArgs),
    /// Report structural coin frequencies and masked fractions.
    Stats(StatsArgs),
    /// Time the plain augmentation against its composed version.
    Bench(BenchArgs),
    /// Train a softmax-regression probe and report loss, accuracy and calibration.
    Probe(ProbeArgs),
    /// Write a class-structured synthetic CIFAR binary file.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetKind {
    Cifar10,
    Cifar100,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Random,
    Height,
    Width,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MaskedPieceArg {
    Random,
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionScaleArg {
    Piece,
    Image,
}

/// Flags shared by every command that builds a pipeline.
#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    /// Augmentation: hflip, vflip, jitter, erasing, cutout, grid, randaug, autoaug or identity.
    #[arg(long, default_value = "hflip")]
    pub aug: String,

    /// Apply probability; defaults to 0.5 for gated augmentations and 1 otherwise.
    #[arg(long)]
    pub apply_probability: Option<f64>,

    /// Wrap the augmentation in the cut / mask / augment / concat composition (the default).
    #[arg(long, overrides_with_all = ["yona", "no_yona"])]
    pub yona: bool,

    /// Apply the augmentation to the whole image.
    #[arg(long, overrides_with_all = ["yona", "no_yona"])]
    pub no_yona: bool,

    /// Augment two halves independently instead of masking one.
    #[arg(long, conflicts_with = "yona")]
    pub yoco: bool,

    /// Extent of the masked piece along the cut axis.
    #[arg(long, default_value_t = 0.5)]
    pub mask_fraction: f64,

    /// Noise for the masked piece: uniform, constant:V or gaussian:MEAN:STDDEV.
    #[arg(long, default_value = "uniform")]
    pub noise: String,

    /// Cut axis.
    #[arg(long, value_enum, default_value_t = AxisArg::Random)]
    pub axis: AxisArg,

    /// Which side of the cut is masked.
    #[arg(long, value_enum, default_value_t = MaskedPieceArg::Random)]
    pub masked_piece: MaskedPieceArg,

    /// What Cutout and Erasing sizes are measured against inside a piece.
    #[arg(long, value_enum, default_value_t = RegionScaleArg::Piece)]
    pub region_scale: RegionScaleArg,

    /// Color jitter brightness factor.
    #[arg(long, default_value_t = 0.4)]
    pub brightness: f64,

    /// Color jitter contrast factor.
    #[arg(long, default_value_t = 0.4)]
    pub contrast: f64,

    /// Color jitter saturation factor.
    #[arg(long, default_value_t = 0.4)]
    pub saturation: f64,

    /// Color jitter hue shift, in turns.
    #[arg(long, default_value_t = 0.1)]
    pub hue: f64,

    /// Random Erasing area range as MIN,MAX fractions of the image.
    #[arg(long, default_value = "0.02,0.4")]
    pub erasing_scale: String,

    /// Random Erasing aspect ratio range as MIN,MAX.
    #[arg(long, default_value = "0.3,3.3")]
    pub erasing_ratio: String,

    /// Random Erasing fill byte.
    #[arg(long, default_value_t = 0)]
    pub erasing_fill: u8,

    /// Cutout square area as a fraction of the image.
    #[arg(long, default_value_t = 0.25)]
    pub cutout_area: f64,

    /// Grid rows.
    #[arg(long, default_value_t = 4)]
    pub grid_rows: usize,

    /// Grid columns.
    #[arg(long, default_value_t = 4)]
    pub grid_cols: usize,

    /// Chance that a grid cell is transformed.
    #[arg(long, default_value_t = 0.5)]
    pub grid_cell_p: f64,

    /// RandAugment number of operations.
    #[arg(long, default_value_t = 2)]
    pub randaug_n: usize,

    /// RandAugment magnitude, 0 to 30.
    #[arg(long, default_value_t = 9.0)]
    pub randaug_m: f64,

    /// AutoAugment policy file; the bundled CIFAR-10 policy when absent.
    #[arg(long)]
    pub autoaug_policy: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Global seed; image i uses streams derived from (seed, i).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; all cores when absent, 1 for sequential.
    #[arg(long)]
    pub workers: Option<usize>,

    /// JSON file of flag values; keys are flag names, flags on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AugmentArgs {
    /// CIFAR binary file to augment.
    #[arg(long)]
    pub input: PathBuf,

    /// Record layout of the input.
    #[arg(long, value_enum, default_value_t = DatasetKind::Cifar10)]
    pub dataset: DatasetKind,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PreviewArgs {
    /// PNG image or CIFAR binary file.
    #[arg(long)]
    pub input: PathBuf,

    /// Record layout when the input is a CIFAR file.
    #[arg(long, value_enum, default_value_t = DatasetKind::Cifar10)]
    pub dataset: DatasetKind,

    /// Number of CIFAR records to preview.
    #[arg(long, default_value_t = 1)]
    pub count: usize,

    /// Comma-separated augmentations, one row each.
    #[arg(long, default_value = "hflip,vflip,jitter,erasing,cutout,grid,randaug,autoaug")]
    pub augs: String,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// CIFAR binary file; synthetic records when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Record layout of the input.
    #[arg(long, value_enum, default_value_t = DatasetKind::Cifar10)]
    pub dataset: DatasetKind,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    /// Number of compositions to sample.
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,

    /// Synthetic images to cycle through when no input is given.
    #[arg(long, default_value_t = 100)]
    pub images: usize,

    #[command(flatten)]
    pub source: SourceArgs,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Exit 4 if either coin frequency is further than this from 0.5.
    #[arg(long)]
    pub gate_coin_tolerance: Option<f64>,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Timed iterations per arm, at least 100.
    #[arg(long, default_value_t = 10_000)]
    pub iterations: usize,

    /// Image channels.
    #[arg(long, default_value_t = 3)]
    pub channels: usize,

    /// Image height.
    #[arg(long, default_value_t = 32)]
    pub height: usize,

    /// Image width.
    #[arg(long, default_value_t = 32)]
    pub width: usize,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Exit 4 if the composed / plain ratio exceeds this.
    #[arg(long)]
    pub gate_ratio: Option<f64>,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ProbeArgs {
    /// CIFAR training file; synthetic records when absent.
    #[arg(long)]
    pub train: Option<PathBuf>,

    /// Training records to use (the first N of the file, or N synthetic).
    #[arg(long, default_value_t = 1000)]
    pub train_records: usize,

    /// CIFAR evaluation file; synthetic records when absent.
    #[arg(long)]
    pub test: Option<PathBuf>,

    /// Evaluation records to use.
    #[arg(long, default_value_t = 1000)]
    pub test_records: usize,

    /// Record layout of the files.
    #[arg(long, value_enum, default_value_t = DatasetKind::Cifar10)]
    pub dataset: DatasetKind,

    /// Training epochs.
    #[arg(long, default_value_t = 20)]
    pub epochs: usize,

    /// SGD learning rate.
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,

    /// SGD momentum.
    #[arg(long, default_value_t = 0.9)]
    pub momentum: f64,

    /// Mini-batch size.
    #[arg(long, default_value_t = 100)]
    pub batch_size: usize,

    /// Equal-count bins for the RMS calibration error.
    #[arg(long, default_value_t = 15)]
    pub bins: usize,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Exit 4 unless the epoch loss strictly decreases.
    #[arg(long)]
    pub gate_decreasing: bool,

    /// Exit 4 if the RMS calibration error (percent) exceeds this.
    #[arg(long)]
    pub gate_max_rms: Option<f64>,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Number of records.
    #[arg(long, default_value_t = 1000)]
    pub count: usize,

    /// Record layout.
    #[arg(long, value_enum, default_value_t = DatasetKind::Cifar10)]
    pub dataset: DatasetKind,

    /// Output file.
    #[arg(long)]
    pub out: PathBuf,

    /// Seed for labels and pixels.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
