//! Command-line surface.
//!
//! Only the flag layout lives here; domain descriptors stay strings and
//! are parsed in `config`, so config-file values and flags share one code
//! path. Every field is optional at this layer — defaults and required
//! checks are applied after the flag/file merge.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "freeflow",
    version,
    about = "Gradient-flow numerics: Fokker-Planck evolution, particle samplers, \
             and one-dimensional optimal transport"
)]
pub struct Cli {
    /// Flat `key = value` config file; explicit flags override file keys.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evolve a density under the Fokker-Planck equation.
    FpEvolve(FpEvolveArgs),
    /// Integrate the stochastic particle process for a noising schedule.
    SdeSample(SdeSampleArgs),
    /// Integrate the deterministic probability-flow companion process.
    OdeSample(OdeSampleArgs),
    /// Run the discrete noising chain.
    DdpmChain(DdpmChainArgs),
    /// Optimal map and Wasserstein distance between two densities.
    Ot(OtArgs),
    /// Displacement interpolation between two densities.
    Interpolate(InterpolateArgs),
    /// Kinetic action of the displacement path against the distance.
    Action(ActionArgs),
    /// Scan a velocity field for characteristic crossings.
    ShockScan(ShockScanArgs),
    /// Free-energy trace along a Fokker-Planck evolution.
    EnergyTrace(EnergyTraceArgs),
    /// Minimizing-movement (proximal) steps of the free energy.
    Jko(JkoArgs),
    /// Run the validation suite and emit a machine-readable report.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Default)]
pub struct FpEvolveArgs {
    /// Initial density: `gauss:MEAN,VARIANCE`, `uniform:LO,HI`, `file:PATH`.
    #[arg(long)]
    pub init: Option<String>,
    /// Potential: `zero` or `quad:BETA` (psi = beta x^2 / 2).
    #[arg(long)]
    pub potential: Option<String>,
    /// Constant diffusivity D.
    #[arg(long)]
    pub diffusion: Option<f64>,
    /// Evolution horizon.
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    /// Grid `A:B:M`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Solver time step (default: 0.9 of the stability bound).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Recorded snapshots, endpoints included.
    #[arg(long)]
    pub snapshots: Option<usize>,
    /// Terminal density artifact (default fp-evolve.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Energy trace artifact (default fp-evolve-energy.csv).
    #[arg(long = "energy-out")]
    pub energy_out: Option<PathBuf>,
    /// Artifact encoding: csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct SdeSampleArgs {
    /// Initial density descriptor.
    #[arg(long)]
    pub init: Option<String>,
    /// Noising pattern: vp or ve.
    #[arg(long)]
    pub pattern: Option<String>,
    /// VP rate beta (constant).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Diffusivity D; defaults to beta under vp, 1 under ve.
    #[arg(long)]
    pub diffusion: Option<f64>,
    /// Schedule horizon (default: the simulation end time).
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Simulation end time.
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    /// Particle time step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Particle count.
    #[arg(long)]
    pub n: Option<usize>,
    /// RNG seed for both the initial draw and the path noise.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid `A:B:M` on which the initial density is realized.
    #[arg(long)]
    pub grid: Option<String>,
    /// Terminal ensemble artifact (default sde-sample.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Artifact encoding: csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct OdeSampleArgs {
    /// Initial density descriptor.
    #[arg(long)]
    pub init: Option<String>,
    /// Noising pattern: vp or ve.
    #[arg(long)]
    pub pattern: Option<String>,
    /// VP rate beta (constant).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Diffusivity D; defaults to beta under vp, 1 under ve.
    #[arg(long)]
    pub diffusion: Option<f64>,
    /// Schedule horizon (default: the simulation end time).
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Simulation end time.
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    /// Particle time step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Particle count.
    #[arg(long)]
    pub n: Option<usize>,
    /// RNG seed for the initial draw (the flow itself is deterministic).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid `A:B:M` for the density run that supplies the score.
    #[arg(long)]
    pub grid: Option<String>,
    /// Snapshots in the score table (default grows with t-end).
    #[arg(long)]
    pub snapshots: Option<usize>,
    /// Terminal ensemble artifact (default ode-sample.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Artifact encoding: csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct DdpmChainArgs {
    /// Initial density descriptor.
    #[arg(long)]
    pub init: Option<String>,
    /// Per-step beta, in (0, 0.5).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Chain length.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Particle count.
    #[arg(long)]
    pub n: Option<usize>,
    /// RNG seed for both the initial draw and the chain noise.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid `A:B:M` on which the initial density is realized.
    #[arg(long)]
    pub grid: Option<String>,
    /// Terminal ensemble artifact (default ddpm-chain.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Artifact encoding: csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct OtArgs {
    /// Source density descriptor.
    #[arg(long)]
    pub mu: Option<String>,
    /// Target density descriptor.
    #[arg(long)]
    pub nu: Option<String>,
    /// Grid `A:B:M`.
    #[arg(long)]
    pub grid: Option<String>,
    /// JSON report (default ot.json).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Optional transport-map table `x,map` (CSV).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct InterpolateArgs {
    /// Source density descriptor.
    #[arg(long)]
    pub mu: Option<String>,
    /// Target density descriptor.
    #[arg(long)]
    pub nu: Option<String>,
    /// Comma-separated interpolation parameters in [0, 1] (default 0.5).
    #[arg(long)]
    pub times: Option<String>,
    /// Grid `A:B:M`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Interpolant artifact (default interpolate.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Artifact encoding: csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct ActionArgs {
    /// Source density descriptor.
    #[arg(long)]
    pub mu: Option<String>,
    /// Target density descriptor.
    #[arg(long)]
    pub nu: Option<String>,
    /// Snapshots along the displacement path.
    #[arg(long)]
    pub snapshots: Option<usize>,
    /// Grid `A:B:M`.
    #[arg(long)]
    pub grid: Option<String>,
    /// JSON report (default action.json).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct ShockScanArgs {
    /// Velocity field: neg-identity, neg-sine, or monotone-demo.
    #[arg(long)]
    pub field: Option<String>,
    /// Scan horizon.
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Grid `A:B:M`.
    #[arg(long)]
    pub grid: Option<String>,
    /// JSON report (default shock-scan.json).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct EnergyTraceArgs {
    /// Initial density descriptor.
    #[arg(long)]
    pub init: Option<String>,
    /// Potential: `zero` or `quad:BETA`.
    #[arg(long)]
    pub potential: Option<String>,
    /// Constant diffusivity D.
    #[arg(long)]
    pub diffusion: Option<f64>,
    /// Evolution horizon.
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    /// Grid `A:B:M`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Solver time step (default: 0.9 of the stability bound).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Trace rows, endpoints included.
    #[arg(long)]
    pub snapshots: Option<usize>,
    /// Trace artifact (default energy-trace.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Artifact encoding: csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct JkoArgs {
    /// Initial density descriptor.
    #[arg(long)]
    pub init: Option<String>,
    /// Potential: `zero` or `quad:BETA`.
    #[arg(long)]
    pub potential: Option<String>,
    /// Constant diffusivity D.
    #[arg(long)]
    pub diffusion: Option<f64>,
    /// Proximal step size tau.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Number of proximal steps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Grid `A:B:M`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Final density artifact (default jko.csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Artifact encoding: csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct ValidateArgs {
    /// `all` or one criterion name (see `validate --suite help-names`).
    #[arg(long)]
    pub suite: Option<String>,
    /// Also write the JSON report to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
