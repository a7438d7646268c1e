use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use wmx_core::augment::SuiteName;
use wmx_core::ensemble::Mode;
use wmx_core::imgcore::ExportMode;
use wmx_core::toymodel::ConflictRule;
use wmx_core::watermark::MethodId;

#[derive(Debug, Parser)]
#[command(name = "wmx", version, about = "Watermark embedding, ensembling and robustness experiments")]
pub struct Cli {
    /// Worker threads (0 = all cores). Overrides WMX_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Embed a secret with one watermarker.
    Embed(EmbedArgs),
    /// Extract a secret and print it as hex.
    Extract(ExtractArgs),
    /// Embed a message with an ensemble of two watermarkers.
    Ensemble(EnsembleEmbedArgs),
    /// Extract an ensemble message.
    EnsembleExtract(EnsembleExtractArgs),
    /// Apply an augmentation suite to one image.
    Augment(AugmentArgs),
    /// Export the residual between a watermarked image and its cover.
    Residual(ResidualArgs),
    /// Run an experiment over a corpus.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Enumerate watermark sets in the discrete quality-ball model.
    Toy(ToyArgs),
    /// Write a deterministic synthetic corpus of PNG images.
    SynthCorpus(SynthArgs),
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Clean full-secret accuracy per method.
    Accuracy(AccuracyArgs),
    /// Full-secret accuracy after augmentation suites.
    Robust(RobustArgs),
    /// Coexistence matrix over ordered method pairs.
    Coexist(CoexistArgs),
    /// Ensemble accuracy and PSNR over clipping strengths.
    Tradeoff(TradeoffArgs),
    /// Unclipped series and parallel PSNR per image.
    PsnrDist(PsnrDistArgs),
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16),
        None => s.parse(),
    }
    .map_err(|e| format!("invalid integer '{s}': {e}"))
}

#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    /// Message length in bits.
    #[arg(long, default_value_t = wmx_core::watermark::DEFAULT_CAPACITY)]
    pub capacity: usize,
    /// Watermark key (decimal or 0x-prefixed hex).
    #[arg(long, value_parser = parse_u64)]
    pub key: Option<u64>,
    /// QIM quantisation step (transform methods).
    #[arg(long)]
    pub step: Option<f64>,
    /// Embedding amplitude (spread spectrum).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Transform block size.
    #[arg(long)]
    pub block: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub method: MethodId,
    #[command(flatten)]
    pub params: MethodArgs,
    /// Secret as big-endian hex; random from --seed when omitted.
    #[arg(long)]
    pub secret_hex: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub method: MethodId,
    #[command(flatten)]
    pub params: MethodArgs,
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub first: MethodId,
    #[arg(long)]
    pub second: MethodId,
    /// Bits carried by the first method (default: 32, or half the code length).
    #[arg(long)]
    pub first_bits: Option<usize>,
    #[arg(long)]
    pub second_bits: Option<usize>,
    #[arg(long, value_parser = parse_u64)]
    pub first_key: Option<u64>,
    #[arg(long, value_parser = parse_u64)]
    pub second_key: Option<u64>,
    /// Code expression, e.g. reed_muller_1(3) or extend(hamming(3)).
    #[arg(long, conflicts_with = "ecc_file")]
    pub ecc: Option<String>,
    /// Code file: `n k d`, k generator rows, optional H section.
    #[arg(long)]
    pub ecc_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnsembleEmbedArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value = "series")]
    pub mode: Mode,
    /// Clipping strength; omitted means no clipping.
    #[arg(long, allow_negative_numbers = true)]
    pub strength: Option<f64>,
    #[arg(long)]
    pub secret_hex: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EnsembleExtractArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[arg(long)]
    pub suite: SuiteName,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    #[arg(long)]
    pub original: PathBuf,
    #[arg(long)]
    pub watermarked: PathBuf,
    #[arg(long, default_value = "rgb")]
    pub mode: ExportMode,
    /// Amplification for rgb and ycbcr exports.
    #[arg(long, default_value_t = 10.0)]
    pub gain: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    /// Directory of PNG images (sorted by file name).
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    pub corpus: Option<PathBuf>,
    /// Use N generated images instead of a directory.
    #[arg(long)]
    pub synthetic: Option<usize>,
    /// Side length of generated images.
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    /// Long-side cap for loaded images (0 disables).
    #[arg(long, default_value_t = wmx_core::harness::DEFAULT_MAX_DIM)]
    pub max_dim: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV report path; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AccuracyArgs {
    #[arg(long, alias = "method", value_delimiter = ',', required = true)]
    pub methods: Vec<MethodId>,
    #[command(flatten)]
    pub params: MethodArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct RobustArgs {
    #[arg(long, alias = "method", value_delimiter = ',', required = true)]
    pub methods: Vec<MethodId>,
    #[arg(long, alias = "suite", value_delimiter = ',', required = true)]
    pub suites: Vec<SuiteName>,
    #[command(flatten)]
    pub params: MethodArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct CoexistArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub methods: Vec<MethodId>,
    #[command(flatten)]
    pub params: MethodArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct TradeoffArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Clipping strengths (default -0.2 to 1.2 in steps of 0.2).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub strengths: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub suites: Vec<SuiteName>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct PsnrDistArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// PSNR threshold for the above-threshold fractions.
    #[arg(long, default_value_t = 40.0)]
    pub threshold: f64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    #[arg(long, default_value_t = 3)]
    pub channels: usize,
    /// HxW, e.g. 1x1.
    #[arg(long, default_value = "1x1")]
    pub size: String,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// adjacent or ball<r>.
    #[arg(long, default_value = "ball1")]
    pub rule: ConflictRule,
    /// Minimum PSNR in dB; the default admits the whole 3-level cube.
    #[arg(long, default_value_t = 6.0)]
    pub min_psnr: f64,
    /// Comma-separated clean image coordinates (default: middle level).
    #[arg(long, value_delimiter = ',')]
    pub center: Vec<usize>,
    /// Two point sets `x,y,z;x,y,z` to compose, e.g. for a coexistence check.
    #[arg(long, num_args = 2, value_names = ["SET_A", "SET_B"])]
    pub compose: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub dir: PathBuf,
}
