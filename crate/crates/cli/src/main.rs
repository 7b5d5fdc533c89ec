mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Failure;

/// Steiner triple systems under coloured triples.
#[derive(Parser, Debug)]
#[command(name = "stsd", version)]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Leave elapsed times out of the JSON output.
    #[arg(long, global = true)]
    pub no_timing: bool,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a colouring file.
    Generate(GenerateArgs),
    /// Construct a Steiner triple system.
    Construct(ConstructArgs),
    /// Colour counts and discrepancy of a system under a colouring.
    Discrepancy(SystemColouringArgs),
    /// Count gadgets, exactly up to the cap and by sampling above it.
    CountGadgets(CountGadgetsArgs),
    /// Gather distinct gadgets from random copies.
    CollectGadgets(CollectGadgetsArgs),
    /// Recover the vertex split of a 2-colouring.
    RecoverStructure(RecoverArgs),
    /// Triangle-decompose a graph.
    Decompose(DecomposeArgs),
    /// Build a system with a large count of one colour from gadgets.
    Boost(BoostArgs),
    /// Improve a system by Pasch trades.
    TradeSearch(TradeSearchArgs),
    /// Best of several random relabellings of a constructed system.
    Baseline(BaselineArgs),
    /// List every labelled system of order 3, 7 or 9.
    Enumerate(EnumerateArgs),
    /// Analyze a colouring with three or more colours.
    Analyze(AnalyzeArgs),
    /// Check a system file, optionally against a colouring file.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColouringKind {
    /// Cross triples one colour, triples inside a side the other.
    Split,
    Monochromatic,
    Random,
    /// Colour 1 with probability `density`, else colour 2.
    Biased,
    /// Recolour `flips` random triples of `--input`.
    Perturb,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: ColouringKind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    /// Size of the first side for `split` (default: the balanced size).
    #[arg(long)]
    pub x_size: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub colour: u8,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 1)]
    pub flips: usize,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the sparse format with this default colour.
    #[arg(long)]
    pub sparse_default: Option<u8>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct ConstructArgs {
    #[arg(long)]
    pub n: usize,
    /// Relabel the constructed system by a random permutation with this seed.
    #[arg(long)]
    pub embed_seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct SystemColouringArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub colouring: PathBuf,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct CountGadgetsArgs {
    #[arg(long)]
    pub colouring: PathBuf,
    #[arg(long, default_value_t = sts_core::gadgets::DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
    #[arg(long, default_value_t = 200_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct CollectGadgetsArgs {
    #[arg(long)]
    pub colouring: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub max_count: usize,
    /// Random copies to probe.
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Copies file to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct RecoverArgs {
    #[arg(long)]
    pub colouring: PathBuf,
    #[arg(long, default_value_t = sts_core::structure::DEFAULT_PARITY_SAMPLE_SIZE)]
    pub sample_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct DecomposeArgs {
    /// Edge list, or a single line `K <n> minus-shadows <copies file>`.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = sts_core::decompose::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Shuffle completions with this seed instead of ascending order.
    #[arg(long)]
    pub shuffle_seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Greedy,
    Sampled,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct BoostArgs {
    #[arg(long)]
    pub colouring: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub target_count: Option<usize>,
    /// Default: ceil(n / 28).
    #[arg(long)]
    pub vertex_cap: Option<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Greedy)]
    pub mode: Mode,
    /// Inclusion probability in sampled mode.
    #[arg(long, default_value_t = 0.01)]
    pub p: f64,
    #[arg(long, default_value_t = 2_000)]
    pub pool: usize,
    #[arg(long, default_value_t = 20_000)]
    pub probes: usize,
    #[arg(long, default_value_t = sts_core::decompose::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Only the ascending-order decomposition of the leave graph.
    #[arg(long)]
    pub plain: bool,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct TradeSearchArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub colouring: PathBuf,
    #[arg(long, default_value_t = 1_000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct BaselineArgs {
    #[arg(long)]
    pub colouring: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    /// Print only the number of systems, as a bare integer.
    #[arg(long)]
    pub count_only: bool,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub colouring: PathBuf,
    #[arg(long, default_value_t = sts_core::gadgets::DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
    #[arg(long, default_value_t = 200_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.01)]
    pub density_threshold: f64,
    #[arg(long, default_value_t = 0.05)]
    pub residual_threshold: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub colouring: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(k) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exhausted: {msg}");
            ExitCode::from(2)
        }
    }
}
