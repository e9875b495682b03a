use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "aoqmap",
    version,
    about = "Swap-network routing, optimization, noisy simulation and qubit placement for counterdiabatic QAOA",
    args_override_self = true
)]
pub struct Cli {
    /// JSON object whose keys are the long option names of the subcommand.
    /// Options given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and lower one ansatz, report CX count and depth.
    Route(RouteArgs),
    /// Optimize ansatz candidates over repeats, one CSV row per candidate per repeat.
    Optimize(OptimizeArgs),
    /// Noisy expectation values with optional DD, ZNE and readout mitigation.
    Simulate(SimulateArgs),
    /// Exhaustive optimum of a problem instance.
    Oracle(OracleArgs),
    /// Choose the best linear chain of physical qubits for a circuit.
    DeviceSelect(DeviceSelectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    /// Complete graph MaxCut on --n vertices.
    Complete,
    /// Random --degree-regular MaxCut graph seeded by --instance-seed.
    Regular,
    /// Synthetic mean-variance portfolio seeded by --instance-seed.
    Portfolio,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Generated instance family.
    #[arg(long, value_enum)]
    pub problem: Option<Generator>,
    /// Qubit count for generated instances.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub degree: usize,
    #[arg(long, default_value_t = 0)]
    pub instance_seed: u64,
    /// Portfolio budget; defaults to n/2.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Portfolio risk aversion.
    #[arg(long, default_value_t = 0.5)]
    pub risk: f64,
    /// Problem instance JSON (`n`, `zz`, `z`, `offset`, optional `budget` and `kind`).
    #[arg(long, value_name = "FILE", conflicts_with = "problem")]
    pub problem_file: Option<PathBuf>,
    /// MaxCut edge list: `n` on the first line, then `i j [weight]`.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["problem", "problem_file"])]
    pub graph_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AnsatzArgs {
    /// Hamiltonian sequence, e.g. ZY-ZZ-X.
    #[arg(long, default_value = "ZY-ZZ-X")]
    pub sequence: String,
    /// ORIG, ORIG_FS, ORIG_SF, AOQ_FS or AOQ_SF.
    #[arg(long, default_value = "AOQ_FS")]
    pub mode: String,
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    /// GD or COBYLA (derivative-free trust region).
    #[arg(long, default_value = "GD")]
    pub optimizer: String,
    #[arg(long, default_value_t = 1000)]
    pub maxiter: usize,
    #[arg(long, default_value_t = 10)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random initial qubit orders tried for the routed modes.
    #[arg(long, default_value_t = 1)]
    pub order_budget: usize,
    /// Extra iterations polishing the best start.
    #[arg(long)]
    pub refine_maxiter: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RouteArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub ansatz: AnsatzArgs,
    /// Comma-separated angles; random angles from --seed otherwise.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub order_budget: usize,
    /// Write the lowered circuit in text form here.
    #[arg(long, value_name = "FILE")]
    pub circuit_out: Option<PathBuf>,
    /// CSV destination; stdout by default.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// SEQUENCE:MODE pairs, e.g. ZY-ZZ-X:AOQ_FS,ZZ-X-ZY:ORIG.
    #[arg(long, value_delimiter = ',', default_value = "ZY-ZZ-X:AOQ_FS")]
    pub candidate: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Per-repeat CSV destination; stdout by default.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Mean/SEM CSV per candidate; stderr by default.
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
    /// Winning ansatz, order and angles of the first repeat as JSON.
    #[arg(long, value_name = "FILE")]
    pub params_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub ansatz: AnsatzArgs,
    /// Comma-separated angles.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "params_file")]
    pub params: Option<Vec<f64>>,
    /// Output of `optimize --params-out`; overrides the ansatz options.
    #[arg(long, value_name = "FILE")]
    pub params_file: Option<PathBuf>,
    /// Used to find angles when neither --params nor --params-file is given.
    #[command(flatten)]
    pub optimizer: OptimizerArgs,

    /// One-qubit depolarizing rate; two-qubit gates get ten times this.
    #[arg(long, conflicts_with_all = ["eps1", "eps2"])]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eps1: Option<f64>,
    #[arg(long)]
    pub eps2: Option<f64>,
    /// Uniform T1 in µs; enables thermal relaxation together with --t2.
    #[arg(long, requires = "t2")]
    pub t1: Option<f64>,
    #[arg(long, requires = "t1")]
    pub t2: Option<f64>,
    /// Bundled device name or device JSON; supplies all noise parameters.
    #[arg(long, conflicts_with_all = ["eps", "eps1", "eps2", "t1"])]
    pub device: Option<String>,
    /// Physical qubits for --device, comma-separated; selected automatically otherwise.
    #[arg(long, value_delimiter = ',', requires = "device")]
    pub chain: Option<Vec<usize>>,
    /// Symmetric readout flip probability used for --rem without a device.
    #[arg(long, default_value_t = 0.0)]
    pub readout: f64,
    /// Open an idle window of this length (ns) on every qubit halfway through.
    #[arg(long)]
    pub idle_ns: Option<f64>,

    #[arg(long)]
    pub dd: bool,
    #[arg(long)]
    pub zne: bool,
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,2.5,3")]
    pub scales: Vec<f64>,
    /// linear or poly2.
    #[arg(long, default_value = "linear")]
    pub extrapolation: String,
    #[arg(long)]
    pub rem: bool,
    #[arg(long, default_value_t = 100_000)]
    pub shots: u64,
    /// Trajectories for circuits too wide for the density matrix.
    #[arg(long, default_value_t = 2000)]
    pub trajectories: usize,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DeviceSelectArgs {
    /// Bundled device name (perth, ehningen, cairo) or device JSON path.
    #[arg(long)]
    pub device: String,
    /// Lowered circuit in text form; built from the problem options otherwise.
    #[arg(long, value_name = "FILE")]
    pub circuit: Option<PathBuf>,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub ansatz: AnsatzArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}
