use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lre_core::bench::{ChunkSpec, Family, SweepVar};
use lre_core::{FoldMode, Strategy};

#[derive(Debug, Parser)]
#[command(name = "lre", version, about = "Layerwise Richardson extrapolation toolkit")]
pub struct Cli {
    /// Worker threads for parallel simulation (defaults to all cores).
    #[arg(long, global = true, env = "LRE_THREADS")]
    pub threads: Option<usize>,

    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print scale-factor vectors and extrapolation coefficients.
    Coeffs(CoeffsArgs),
    /// Tabulate the sampling overhead against chunk count or gap.
    Overhead(OverheadArgs),
    /// Write noise-scaled copies of a circuit.
    Fold(FoldArgs),
    /// Mitigate one circuit on the embedded simulator.
    Run(RunArgs),
    /// Run a benchmark sweep and emit per-strategy statistics.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CircuitFormat {
    Qasm,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Global,
    Local,
}

impl From<ModeArg> for FoldMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Global => FoldMode::Global,
            ModeArg::Local => FoldMode::Local,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Lre,
    Re,
    Unmitigated,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Lre => Strategy::Lre,
            StrategyArg::Re => Strategy::Re,
            StrategyArg::Unmitigated => Strategy::Unmitigated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Ghz,
    Random,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Ghz => Family::GhzMirror,
            FamilyArg::Random => Family::RandomMirror,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepArg {
    Qubits,
    Degree,
    Shots,
    Delta,
    Chunks,
}

impl From<SweepArg> for SweepVar {
    fn from(s: SweepArg) -> Self {
        match s {
            SweepArg::Qubits => SweepVar::Qubits,
            SweepArg::Degree => SweepVar::Degree,
            SweepArg::Shots => SweepVar::Shots,
            SweepArg::Delta => SweepVar::Delta,
            SweepArg::Chunks => SweepVar::Chunks,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long, short = 'l')]
    pub layers: usize,
    #[arg(long, short = 'd')]
    pub degree: u32,
    #[arg(long, default_value_t = 2)]
    pub delta: u32,
    /// Explicit node set instead of the default pattern, e.g. "1,1;3,1;1,3".
    #[arg(long)]
    pub nodes: Option<String>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OverheadArgs {
    /// Degrees to tabulate; one curve each.
    #[arg(long, short = 'd', value_delimiter = ',', required = true)]
    pub degree: Vec<u32>,
    /// Sweep l = 1..=max-layers at fixed Δ.
    #[arg(long, conflicts_with_all = ["layers", "delta_range"])]
    pub max_layers: Option<usize>,
    #[arg(long, default_value_t = 2, conflicts_with = "delta_range")]
    pub delta: u32,
    /// Fixed chunk count for a sweep over Δ.
    #[arg(long, short = 'l', requires = "delta_range")]
    pub layers: Option<usize>,
    /// Gap sweep as start:end:step (inclusive), e.g. 2:20:2.
    #[arg(long, requires = "layers")]
    pub delta_range: Option<String>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FoldArgs {
    /// Input circuit (.qasm or .json).
    #[arg(long = "in", short = 'i')]
    pub input: PathBuf,
    #[arg(long, short = 'l')]
    pub chunks: usize,
    /// One odd scale factor per chunk, e.g. 1,3,1.
    #[arg(long, value_delimiter = ',', required_unless_present = "all_vectors", conflicts_with = "all_vectors")]
    pub lambdas: Option<Vec<u32>>,
    /// Write every circuit of the default node set for --degree and --delta.
    #[arg(long, requires = "degree")]
    pub all_vectors: bool,
    #[arg(long, short = 'd')]
    pub degree: Option<u32>,
    #[arg(long, default_value_t = 2)]
    pub delta: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Local)]
    pub mode: ModeArg,
    /// Output format; defaults to the input format.
    #[arg(long, value_enum)]
    pub format: Option<CircuitFormat>,
    /// Output directory; a single folded circuit goes to stdout when omitted.
    #[arg(long, short, required_if_eq("all_vectors", "true"))]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Amplitude-damping probability after single-qubit gates.
    #[arg(long, default_value_t = 0.04)]
    pub p1: f64,
    /// Amplitude-damping probability on each qubit after a CNOT.
    #[arg(long, default_value_t = 0.08)]
    pub p2: f64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long = "in", short = 'i')]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = StrategyArg::Lre)]
    pub strategy: StrategyArg,
    #[arg(long, short = 'd', default_value_t = 2)]
    pub degree: u32,
    /// Chunk count for LRE; defaults to one chunk per layer.
    #[arg(long, short = 'l')]
    pub chunks: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub delta: u32,
    /// Total shot budget.
    #[arg(long, default_value_t = 1_000_000, conflicts_with = "exact")]
    pub shots: u64,
    #[arg(long, env = "LRE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Use exact expectation values instead of sampling.
    #[arg(long)]
    pub exact: bool,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Local)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, value_enum)]
    pub sweep: SweepArg,
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<u64>,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 1_000_000, conflicts_with = "exact")]
    pub shots: u64,
    #[arg(long)]
    pub exact: bool,
    #[arg(long, env = "LRE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Qubit count when not swept.
    #[arg(long, default_value_t = 4)]
    pub qubits: usize,
    /// Layers of the random half-circuit.
    #[arg(long, default_value_t = 2)]
    pub half_depth: usize,
    #[arg(long, default_value_t = 0.9)]
    pub p_cnot: f64,
    #[arg(long, short = 'd', default_value_t = 2)]
    pub degree: u32,
    #[arg(long, default_value_t = 2)]
    pub delta: u32,
    /// LRE chunk count when not swept: "full" or a number.
    #[arg(long, default_value = "full", value_parser = parse_chunk_spec)]
    pub chunks: ChunkSpec,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [StrategyArg::Unmitigated, StrategyArg::Re, StrategyArg::Lre])]
    pub strategies: Vec<StrategyArg>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Local)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_chunk_spec(s: &str) -> Result<ChunkSpec, String> {
    if s == "full" {
        return Ok(ChunkSpec::Full);
    }
    match s.parse::<usize>() {
        Ok(l) if l >= 1 => Ok(ChunkSpec::Fixed(l)),
        _ => Err(format!("expected `full` or a positive integer, got `{s}`")),
    }
}
