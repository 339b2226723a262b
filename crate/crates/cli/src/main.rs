//! `quasm` — assemble sequences by annealing overlap-graph QUBOs.
//!
//! Subcommands mirror the pipeline stages and compose through files:
//! `generate` FASTA reads, build the overlap `graph`, compile a `qubo`,
//! `solve` it, `assemble` the solution back into a sequence, run a `bench`
//! campaign, or do a whole single-instance `pipeline` at once.
//!
//! All randomness flows from `--seed` through ChaCha8; per-stage streams are
//! derived from the stage name (and index), so every artifact except wall
//! times is reproducible byte-for-byte.

mod commands;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "quasm", version, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random nucleotide sequences as FASTA
    Generate(GenerateArgs),
    /// Build the overlap graph from FASTA reads
    Graph(GraphArgs),
    /// Compile a Hamiltonian-path QUBO from a graph
    Qubo(QuboArgs),
    /// Minimize a QUBO file (SimCIM or exhaustive search)
    Solve(SolveArgs),
    /// Decode a solver result into a path and reconstructed sequence
    Assemble(AssembleArgs),
    /// Run a seeded benchmark campaign with R99/TTS reporting
    Bench(BenchArgs),
    /// Run the whole pipeline for one synthetic instance
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Sequence length in bases
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    length: u64,
    /// Number of sequences
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output FASTA path (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArgs {
    /// Input FASTA path
    #[arg(long)]
    input: PathBuf,
    /// Shred each read into k-mers of this length (whole reads when omitted)
    #[arg(long)]
    k: Option<usize>,
    /// Minimum exact suffix/prefix overlap (defaults to k-1, or 1)
    #[arg(long)]
    min_overlap: Option<usize>,
    /// Output graph JSON path (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum EncodingArg {
    Positional,
    Edge,
}

impl From<EncodingArg> for quasm::formulation::Encoding {
    fn from(value: EncodingArg) -> Self {
        match value {
            EncodingArg::Positional => Self::Positional,
            EncodingArg::Edge => Self::Edge,
        }
    }
}

#[derive(Args)]
struct QuboArgs {
    /// Input graph JSON path
    #[arg(long)]
    graph: PathBuf,
    /// Variable encoding
    #[arg(long, value_enum, default_value = "positional")]
    encoding: EncodingArg,
    /// Penalty coefficient A > 0 (integer, decimal or ratio like 3/4)
    #[arg(long, default_value = "1")]
    penalty: String,
    /// Output QUBO path
    #[arg(long)]
    output: PathBuf,
    /// Variable-map JSON path (defaults to the output with .varmap.json)
    #[arg(long)]
    varmap: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Simcim,
    Brute,
}

#[derive(Args, Clone)]
struct SolverOpts {
    /// Solver config JSON (falls back to $QUASM_SOLVER_CONFIG, then defaults)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Independent SimCIM restarts
    #[arg(long)]
    attempts: Option<usize>,
    /// Update steps per attempt
    #[arg(long)]
    iterations: Option<usize>,
    /// Coupling gain
    #[arg(long)]
    zeta: Option<f64>,
    /// Gaussian noise standard deviation
    #[arg(long)]
    noise_sigma: Option<f64>,
    /// Pump ramp start
    #[arg(long)]
    pump_start: Option<f64>,
    /// Pump ramp end
    #[arg(long)]
    pump_end: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    /// Input QUBO path
    #[arg(long)]
    qubo: PathBuf,
    /// Solver backend
    #[arg(long, value_enum, default_value = "simcim")]
    solver: SolverArg,
    /// Master seed (overrides the config file's seed)
    #[arg(long)]
    seed: Option<u64>,
    /// Known ground energy (QUBO domain) for marking ground hits
    #[arg(long)]
    reference: Option<f64>,
    #[command(flatten)]
    solver_opts: SolverOpts,
    /// Output result JSON path
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct AssembleArgs {
    /// Input graph JSON path
    #[arg(long)]
    graph: PathBuf,
    /// Variable-map JSON path (decode mode)
    #[arg(long, required_unless_present = "partition")]
    varmap: Option<PathBuf>,
    /// Solver result JSON path (decode mode)
    #[arg(long, required_unless_present = "partition")]
    result: Option<PathBuf>,
    /// Split the graph at bridges, solve each part and stitch the paths
    #[arg(long)]
    partition: bool,
    /// Variable encoding (partition mode)
    #[arg(long, value_enum, default_value = "positional")]
    encoding: EncodingArg,
    /// Penalty coefficient (partition mode)
    #[arg(long, default_value = "1")]
    penalty: String,
    /// Solver backend (partition mode)
    #[arg(long, value_enum, default_value = "brute")]
    solver: SolverArg,
    /// Master seed (partition mode with SimCIM)
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    solver_opts: SolverOpts,
    /// Output assembly report JSON path (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated sequence lengths
    #[arg(long, default_value = "5,6,7,8,9,10", value_delimiter = ',')]
    lengths: Vec<usize>,
    /// Instances per length
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    instances: u64,
    /// k-mer length
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Minimum overlap (defaults to k-1)
    #[arg(long)]
    min_overlap: Option<usize>,
    /// Variable encoding
    #[arg(long, value_enum, default_value = "positional")]
    encoding: EncodingArg,
    /// Penalty coefficient
    #[arg(long, default_value = "1")]
    penalty: String,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-run time for TTS: "measured" or "fixed:N" (N in microseconds)
    #[arg(long, default_value = "measured")]
    ta: String,
    #[command(flatten)]
    solver_opts: SolverOpts,
    /// CSV report path
    #[arg(long)]
    csv: Option<PathBuf>,
    /// JSON report path (gzip-compressed when large)
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Sequence length in bases
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    length: u64,
    /// k-mer length
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Minimum overlap (defaults to k-1)
    #[arg(long)]
    min_overlap: Option<usize>,
    /// Variable encoding
    #[arg(long, value_enum, default_value = "positional")]
    encoding: EncodingArg,
    /// Penalty coefficient
    #[arg(long, default_value = "1")]
    penalty: String,
    /// Solver backend
    #[arg(long, value_enum, default_value = "simcim")]
    solver: SolverArg,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver_opts: SolverOpts,
    /// Directory for all pipeline artifacts
    #[arg(long)]
    outdir: PathBuf,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate(args) => commands::generate(args),
        Command::Graph(args) => commands::graph(args),
        Command::Qubo(args) => commands::qubo(args),
        Command::Solve(args) => commands::solve(args),
        Command::Assemble(args) => commands::assemble(args),
        Command::Bench(args) => commands::bench(args),
        Command::Pipeline(args) => commands::pipeline(args),
    }
}
