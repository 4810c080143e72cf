//! Command-line front end for the gradient-flow laboratory.
//!
//! The binary exposes the solvers in `freeflow-core` as subcommands with a
//! shared configuration story: every flag can also be given as a
//! `key = value` line in a config file passed via `--config`, with flags
//! taking precedence. All numeric output is deterministic for a fixed
//! configuration and seed, and artifacts are written atomically.
//!
//! Exit codes: 0 on success, 1 when `validate` finds a failing criterion,
//! 2 for configuration errors, 3 for numerical failures such as a CFL
//! violation or a shock inside the integration window.

// Validation code writes `!(a > b)` instead of `a <= b` on purpose: the
// negated form also trips on NaN, which must always fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

pub use args::{Cli, Command};

use config::FileConfig;
use freeflow_core::{Error, Result};

/// Applies `FREEFLOW_THREADS` to the global rayon pool. Must run before
/// any parallel work touches the pool; an unset or empty variable leaves
/// the default (one thread per core).
pub fn init_thread_pool() -> Result<()> {
    let Ok(raw) = std::env::var("FREEFLOW_THREADS") else {
        return Ok(());
    };
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(());
    }
    let threads: usize = raw.parse().map_err(|_| Error::InvalidInput {
        what: "FREEFLOW_THREADS",
        why: format!("`{raw}` is not a thread count"),
    })?;
    if threads == 0 {
        return Err(Error::InvalidInput {
            what: "FREEFLOW_THREADS",
            why: "thread count must be at least 1".into(),
        });
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidInput {
            what: "FREEFLOW_THREADS",
            why: e.to_string(),
        })
}

/// Runs one parsed invocation and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    let mut file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::empty(),
    };
    let print = |line: String| -> i32 {
        println!("{line}");
        0
    };
    let code = match cli.command {
        Command::FpEvolve(a) => print(commands::fp_evolve_cmd(a, &mut file)?),
        Command::SdeSample(a) => print(commands::sde_sample_cmd(a, &mut file)?),
        Command::OdeSample(a) => print(commands::ode_sample_cmd(a, &mut file)?),
        Command::DdpmChain(a) => print(commands::ddpm_chain_cmd(a, &mut file)?),
        Command::Ot(a) => print(commands::ot_cmd(a, &mut file)?),
        Command::Interpolate(a) => print(commands::interpolate_cmd(a, &mut file)?),
        Command::Action(a) => print(commands::action_cmd(a, &mut file)?),
        Command::ShockScan(a) => print(commands::shock_scan_cmd(a, &mut file)?),
        Command::EnergyTrace(a) => print(commands::energy_trace_cmd(a, &mut file)?),
        Command::Jko(a) => print(commands::jko_cmd(a, &mut file)?),
        Command::Validate(a) => commands::validate_cmd(a, &mut file)?,
    };
    Ok(code)
}
