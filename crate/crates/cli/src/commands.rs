//! Subcommand implementations.
//!
//! Every command follows the same shape: merge flags over config-file keys,
//! reject unknown keys, parse and validate every input, and only then touch
//! the numerics. Artifacts are written atomically (temp file plus rename),
//! so an aborted run never leaves a partial output behind. Each function
//! returns a one-line summary that the binary prints on success.

use std::path::PathBuf;

use freeflow_core::energy::{free_energy, jko_step, EnergyBreakdown};
use freeflow_core::eulerian::{fp_evolve, shock_time, EvolveOptions};
use freeflow_core::lagrangian::{ddpm_chain, simulate_probability_flow_ode, simulate_sde};
use freeflow_core::measures::{
    density_moments, sample_from_density, Density1D, DiffusionSchedule, PotentialSpec,
};
use freeflow_core::transport::{
    benamou_brenier_action, displacement_interpolation, displacement_path, quantile_map,
    w2_distance,
};
use freeflow_core::{Error, Result};
use serde::Serialize;

use crate::args::{
    ActionArgs, DdpmChainArgs, EnergyTraceArgs, FpEvolveArgs, InterpolateArgs, JkoArgs, OtArgs,
    OdeSampleArgs, SdeSampleArgs, ShockScanArgs, ValidateArgs,
};
use crate::config::{
    evolve_options, parse_grid, parse_potential, parse_times, required, FieldArg, FileConfig,
    InitSpec, Merge, OutputFormat, PatternArg, DEFAULT_GRID,
};
use crate::output::{
    write_density, write_energy_trace, write_ensemble, write_json, write_map_csv, write_slices,
};
use crate::validate;

/// Default artifact path for a command, with the extension following the
/// output format.
fn default_out(stem: &str, format: OutputFormat) -> PathBuf {
    let ext = match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    PathBuf::from(format!("{stem}.{ext}"))
}

fn parse_format(s: Option<String>) -> Result<OutputFormat> {
    match s {
        Some(s) => OutputFormat::parse(&s),
        None => Ok(OutputFormat::default()),
    }
}

fn potential_or_zero(s: Option<String>) -> Result<PotentialSpec<f64>> {
    match s {
        Some(s) => parse_potential(&s),
        None => Ok(PotentialSpec::zero()),
    }
}

/// Drift/diffusion schedule for the particle commands. The VP pattern with
/// an explicit diffusivity decouples the drift rate from the noise scale;
/// without one the classical beta-ties-both convention applies. The VE
/// pattern has no drift, so its accumulated variance starts from the
/// initial density's variance and grows linearly at rate 2 D.
fn build_schedule(
    pattern: PatternArg,
    beta: f64,
    diffusion: Option<f64>,
    horizon: f64,
    rho0: &Density1D<f64>,
) -> Result<DiffusionSchedule<f64>> {
    match pattern {
        PatternArg::Vp => match diffusion {
            None => DiffusionSchedule::vp(move |_| beta, horizon),
            Some(d) => DiffusionSchedule::vp_with(move |_| beta, move |_| d, horizon),
        },
        PatternArg::Ve => {
            let d = diffusion.unwrap_or(1.0);
            let (_, var0) = density_moments(rho0);
            DiffusionSchedule::ve(move |t| var0 + 2.0 * d * t, move |_| d, horizon)
        }
    }
}

/// Fokker-Planck density matching the particle schedule, used as the score
/// source for the probability-flow ODE.
fn schedule_potential(pattern: PatternArg, beta: f64) -> Result<PotentialSpec<f64>> {
    match pattern {
        PatternArg::Vp => PotentialSpec::quadratic(beta),
        PatternArg::Ve => Ok(PotentialSpec::zero()),
    }
}

pub fn fp_evolve_cmd(a: FpEvolveArgs, file: &mut FileConfig) -> Result<String> {
    let mut m = Merge::new(file);
    let grid_s = m.string(a.grid, "grid").unwrap_or_else(|| DEFAULT_GRID.into());
    let init_s = required(m.string(a.init, "init"), "init")?;
    let pot_s = m.string(a.potential, "potential");
    let d = m.f64(a.diffusion, "diffusion")?.unwrap_or(1.0);
    let t_end = required(m.f64(a.t_end, "t-end")?, "t-end")?;
    let dt = m.f64(a.dt, "dt")?;
    let snapshots = m.usize(a.snapshots, "snapshots")?.unwrap_or(65);
    let format = parse_format(m.string(a.format, "format"))?;
    let out = m
        .path(a.out, "out")
        .unwrap_or_else(|| default_out("fp-evolve", format));
    let energy_out = m
        .path(a.energy_out, "energy-out")
        .unwrap_or_else(|| default_out("fp-evolve-energy", format));
    file.ensure_consumed()?;

    let grid = parse_grid(&grid_s)?;
    let init = InitSpec::parse("init", &init_s)?;
    let pot = potential_or_zero(pot_s)?;
    let opts = evolve_options(dt, snapshots)?;

    let rho0 = init.realize(grid)?;
    let traj = fp_evolve(&rho0, |_| d, &pot, t_end, opts)?;
    let rows: Vec<EnergyBreakdown<f64>> = traj
        .densities()
        .iter()
        .map(|rho| free_energy(rho, d, &pot))
        .collect::<Result<_>>()?;
    write_density(&out, traj.final_density(), format)?;
    write_energy_trace(&energy_out, traj.times(), &rows, format)?;
    let (mean, var) = density_moments(traj.final_density());
    let energy = rows.last().map_or(f64::NAN, |r| r.total);
    Ok(format!(
        "fp-evolve: t={t_end} mean={mean:.6e} var={var:.6e} energy={energy:.6e} -> {}, {}",
        out.display(),
        energy_out.display()
    ))
}

pub fn energy_trace_cmd(a: EnergyTraceArgs, file: &mut FileConfig) -> Result<String> {
    let mut m = Merge::new(file);
    let grid_s = m.string(a.grid, "grid").unwrap_or_else(|| DEFAULT_GRID.into());
    let init_s = required(m.string(a.init, "init"), "init")?;
    let pot_s = m.string(a.potential, "potential");
    let d = m.f64(a.diffusion, "diffusion")?.unwrap_or(1.0);
    let t_end = required(m.f64(a.t_end, "t-end")?, "t-end")?;
    let dt = m.f64(a.dt, "dt")?;
    let snapshots = m.usize(a.snapshots, "snapshots")?.unwrap_or(129);
    let format = parse_format(m.string(a.format, "format"))?;
    let out = m
        .path(a.out, "out")
        .unwrap_or_else(|| default_out("energy-trace", format));
    file.ensure_consumed()?;

    let grid = parse_grid(&grid_s)?;
    let init = InitSpec::parse("init", &init_s)?;
    let pot = potential_or_zero(pot_s)?;
    let opts = evolve_options(dt, snapshots)?;

    let rho0 = init.realize(grid)?;
    let traj = fp_evolve(&rho0, |_| d, &pot, t_end, opts)?;
    let rows: Vec<EnergyBreakdown<f64>> = traj
        .densities()
        .iter()
        .map(|rho| free_energy(rho, d, &pot))
        .collect::<Result<_>>()?;
    write_energy_trace(&out, traj.times(), &rows, format)?;
    let first = rows.first().map_or(f64::NAN, |r| r.total);
    let last = rows.last().map_or(f64::NAN, |r| r.total);
    Ok(format!(
        "energy-trace: t={t_end} energy {first:.6e} -> {last:.6e} ({} rows) -> {}",
        rows.len(),
        out.display()
    ))
}

pub fn sde_sample_cmd(a: SdeSampleArgs, file: &mut FileConfig) -> Result<String> {
    let mut m = Merge::new(file);
    let grid_s = m.string(a.grid, "grid").unwrap_or_else(|| DEFAULT_GRID.into());
    let init_s = required(m.string(a.init, "init"), "init")?;
    let pattern_s = m.string(a.pattern, "pattern");
    let beta = m.f64(a.beta, "beta")?.unwrap_or(1.0);
    let diffusion = m.f64(a.diffusion, "diffusion")?;
    let t_end = required(m.f64(a.t_end, "t-end")?, "t-end")?;
    let horizon = m.f64(a.horizon, "horizon")?.unwrap_or(t_end);
    let dt = m.f64(a.dt, "dt")?.unwrap_or(0.01);
    let n = m.usize(a.n, "n")?.unwrap_or(10_000);
    let seed = m.u64(a.seed, "seed")?.unwrap_or(0);
    let format = parse_format(m.string(a.format, "format"))?;
    let out = m
        .path(a.out, "out")
        .unwrap_or_else(|| default_out("sde-sample", format));
    file.ensure_consumed()?;

    let grid = parse_grid(&grid_s)?;
    let init = InitSpec::parse("init", &init_s)?;
    let pattern = match pattern_s {
        Some(s) => PatternArg::parse(&s)?,
        None => PatternArg::Vp,
    };
    if !(dt > 0.0) {
        return Err(Error::InvalidInput {
            what: "dt",
            why: format!("step size must be positive, got {dt}"),
        });
    }

    let rho0 = init.realize(grid)?;
    let sched = build_schedule(pattern, beta, diffusion, horizon, &rho0)?;
    let ens0 = sample_from_density(&rho0, n, seed)?;
    let ens = simulate_sde(&ens0, &sched, t_end, dt, seed)?;
    write_ensemble(&out, &ens, format)?;
    let (mean, var) = ens.moments();
    Ok(format!(
        "sde-sample: {n} particles to t={t_end} mean={mean:.6e} var={var:.6e} -> {}",
        out.display()
    ))
}

pub fn ode_sample_cmd(a: OdeSampleArgs, file: &mut FileConfig) -> Result<String> {
    let mut m = Merge::new(file);
    let grid_s = m.string(a.grid, "grid").unwrap_or_else(|| DEFAULT_GRID.into());
    let init_s = required(m.string(a.init, "init"), "init")?;
    let pattern_s = m.string(a.pattern, "pattern");
    let beta = m.f64(a.beta, "beta")?.unwrap_or(1.0);
    let diffusion = m.f64(a.diffusion, "diffusion")?;
    let t_end = required(m.f64(a.t_end, "t-end")?, "t-end")?;
    let horizon = m.f64(a.horizon, "horizon")?.unwrap_or(t_end);
    let dt = m.f64(a.dt, "dt")?.unwrap_or(0.02);
    let n = m.usize(a.n, "n")?.unwrap_or(10_000);
    let seed = m.u64(a.seed, "seed")?.unwrap_or(0);
    let snapshots = m.usize(a.snapshots, "snapshots")?;
    let format = parse_format(m.string(a.format, "format"))?;
    let out = m
        .path(a.out, "out")
        .unwrap_or_else(|| default_out("ode-sample", format));
    file.ensure_consumed()?;

    let grid = parse_grid(&grid_s)?;
    let init = InitSpec::parse("init", &init_s)?;
    let pattern = match pattern_s {
        Some(s) => PatternArg::parse(&s)?,
        None => PatternArg::Vp,
    };
    if !(dt > 0.0) {
        return Err(Error::InvalidInput {
            what: "dt",
            why: format!("step size must be positive, got {dt}"),
        });
    }
    // Score table resolution: a snapshot every ~0.04 time units unless the
    // caller asks for a specific count.
    let snapshots = match snapshots {
        Some(s) if s >= 2 => s,
        Some(s) => {
            return Err(Error::InvalidInput {
                what: "snapshots",
                why: format!("need at least 2 snapshots, got {s}"),
            })
        }
        None => ((t_end / 0.04).round() as usize + 1).clamp(9, 129),
    };

    let rho0 = init.realize(grid)?;
    let pot = schedule_potential(pattern, beta)?;
    let d_run = diffusion.unwrap_or(match pattern {
        PatternArg::Vp => beta,
        PatternArg::Ve => 1.0,
    });
    let fp = fp_evolve(
        &rho0,
        |_| d_run,
        &pot,
        t_end,
        EvolveOptions {
            dt: None,
            snapshots,
        },
    )?;
    let table: Vec<(f64, Density1D<f64>)> = fp
        .times()
        .iter()
        .copied()
        .zip(fp.densities().iter().cloned())
        .collect();
    let sched = build_schedule(pattern, beta, diffusion, horizon, &rho0)?;
    let ens0 = sample_from_density(&rho0, n, seed)?;
    let ens = simulate_probability_flow_ode(&ens0, &sched, &table, t_end, dt)?;
    write_ensemble(&out, &ens, format)?;
    let (mean, var) = ens.moments();
    Ok(format!(
        "ode-sample: {n} particles to t={t_end} mean={mean:.6e} var={var:.6e} -> {}",
        out.display()
    ))
}

pub fn ddpm_chain_cmd(a: DdpmChainArgs, file: &mut FileConfig) -> Result<String> {
    let mut m = Merge::new(file);
    let grid_s = m.string(a.grid, "grid").unwrap_or_else(|| DEFAULT_GRID.into());
    let init_s = required(m.string(a.init, "init"), "init")?;
    let beta = m.f64(a.beta, "beta")?.unwrap_or(0.01);
    let steps = m.usize(a.steps, "steps")?.unwrap_or(100);
    let n = m.usize(a.n, "n")?.unwrap_or(10_000);
    let seed = m.u64(a.seed, "seed")?.unwrap_or(0);
    let format = parse_format(m.string(a.format, "format"))?;
    let out = m
        .path(a.out, "out")
        .unwrap_or_else(|| default_out("ddpm-chain", format));
    file.ensure_consumed()?;

    let grid = parse_grid(&grid_s)?;
    let init = InitSpec::parse("init", &init_s)?;
    if steps == 0 {
        return Err(Error::InvalidInput {
            what: "steps",
            why: "need at least one step".into(),
        });
    }

    let rho0 = init.realize(grid)?;
    let ens0 = sample_from_density(&rho0, n, seed)?;
    let betas = vec![beta; steps];
    let ens = ddpm_chain(&ens0, &betas, seed)?;
    write_ensemble(&out, &ens, format)?;
    let (mean, var) = ens.moments();
    Ok(format!(
        "ddpm-chain: {n} particles, {steps} steps at beta={beta} mean={mean:.6e} var={var:.6e} -> {}",
        out.display()
    ))
}

#[derive(Serialize)]
struct OtReport<'a> {
    mu: &'a str,
    nu: &'a str,
    grid: &'a str,
    w2: f64,
    w2_squared: f64,
}

pub fn ot_cmd(a: OtArgs, file: &mut FileConfig) -> Result<String> {
    let mut m = Merge::new(file);
    let grid_s = m.string(a.grid, "grid").unwrap_or_else(|| DEFAULT_GRID.into());
    let mu_s = required(m.string(a.mu, "mu"), "mu")?;
    let nu_s = required(m.string(a.nu, "nu"), "nu")?;
    let report = m
        .path(a.report, "report")
        .unwrap_or_else(|| PathBuf::from("ot.json"));
    let map_out = m.path(a.out, "out");
    file.ensure_consumed()?;

    let grid = parse_grid(&grid_s)?;
    let mu = InitSpec::parse("mu", &mu_s)?.realize(grid)?;
    let nu = InitSpec::parse("nu", &nu_s)?.realize(grid)?;

    let w2 = w2_distance(&mu, &nu);
    let doc = OtReport {
        mu: &mu_s,
        nu: &nu_s,
        grid: &grid_s,
        w2,
        w2_squared: w2 * w2,
    };
    write_json(&report, &doc)?;
    if let Some(path) = &map_out {
        let map = quantile_map(&mu, &nu)?;
        write_map_csv(path, &map)?;
    }
    let map_note = map_out.map_or(String::new(), |p| format!(", map -> {}", p.display()));
    Ok(format!(
        "ot: w2={w2:.9e} -> {}{map_note}",
        report.display()
    ))
}

pub fn interpolate_cmd(a: InterpolateArgs, file: &mut FileConfig) -> Result<String> {
    let mut m = Merge::new(file);
    let grid_s = m.string(a.grid, "grid").unwrap_or_else(|| DEFAULT_GRID.into());
    let mu_s = required(m.string(a.mu, "mu"), "mu")?;
    let nu_s = required(m.string(a.nu, "nu"), "nu")?;
    let times_s = m.string(a.times, "times");
    let format = parse_format(m.string(a.format, "format"))?;
    let out = m
        .path(a.out, "out")
        .unwrap_or_else(|| default_out("interpolate", format));
    file.ensure_consumed()?;

    let grid = parse_grid(&grid_s)?;
    let times = match times_s {
        Some(s) => parse_times("times", &s)?,
        None => vec![0.5],
    };
    for &t in &times {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidInput {
                what: "times",
                why: format!("interpolation times must lie in [0, 1], got {t}"),
            });
        }
    }
    let mu = InitSpec::parse("mu", &mu_s)?.realize(grid)?;
    let nu = InitSpec::parse("nu", &nu_s)?.realize(grid)?;

    let mut slices = Vec::with_capacity(times.len());
    for &t in &times {
        slices.push((t, displacement_interpolation(&mu, &nu, t)?));
    }
    write_slices(&out, &slices, format)?;
    let w2 = w2_distance(&mu, &nu);
    Ok(format!(
        "interpolate: {} slices along a path of length w2={w2:.9e} -> {}",
        slices.len(),
        out.display()
    ))
}

#[derive(Serialize)]
struct ActionReport<'a> {
    mu: &'a str,
    nu: &'a str,
    grid: &'a str,
    snapshots: usize,
    action: f64,
    w2: f64,
    w2_squared: f64,
    relative_gap: f64,
}

pub fn action_cmd(a: ActionArgs, file: &mut FileConfig) -> Result<String> {
    let mut m = Merge::new(file);
    let grid_s = m.string(a.grid, "grid").unwrap_or_else(|| DEFAULT_GRID.into());
    let mu_s = required(m.string(a.mu, "mu"), "mu")?;
    let nu_s = required(m.string(a.nu, "nu"), "nu")?;
    let snapshots = m.usize(a.snapshots, "snapshots")?.unwrap_or(33);
    let report = m
        .path(a.report, "report")
        .unwrap_or_else(|| PathBuf::from("action.json"));
    file.ensure_consumed()?;

    let grid = parse_grid(&grid_s)?;
    if snapshots < 2 {
        return Err(Error::InvalidInput {
            what: "snapshots",
            why: format!("need at least 2 snapshots, got {snapshots}"),
        });
    }
    let mu = InitSpec::parse("mu", &mu_s)?.realize(grid)?;
    let nu = InitSpec::parse("nu", &nu_s)?.realize(grid)?;

    let path = displacement_path(&mu, &nu, snapshots)?;
    let action = benamou_brenier_action(&path)?;
    let w2 = w2_distance(&mu, &nu);
    let w2_squared = w2 * w2;
    let relative_gap = if w2_squared > 0.0 {
        (action - w2_squared).abs() / w2_squared
    } else {
        action.abs()
    };
    let doc = ActionReport {
        mu: &mu_s,
        nu: &nu_s,
        grid: &grid_s,
        snapshots,
        action,
        w2,
        w2_squared,
        relative_gap,
    };
    write_json(&report, &doc)?;
    Ok(format!(
        "action: {action:.9e} vs w2^2={w2_squared:.9e} (gap {relative_gap:.3e}) -> {}",
        report.display()
    ))
}

#[derive(Serialize)]
struct ShockScanReport {
    field: &'static str,
    grid: String,
    t_max: f64,
    shock_detected: bool,
    shock_time: Option<f64>,
    predicted_time: Option<f64>,
    crossing_pair: Option<(f64, f64)>,
}

pub fn shock_scan_cmd(a: ShockScanArgs, file: &mut FileConfig) -> Result<String> {
    let mut m = Merge::new(file);
    let grid_s = m.string(a.grid, "grid").unwrap_or_else(|| DEFAULT_GRID.into());
    let field_s = required(m.string(a.field, "field"), "field")?;
    let t_max = m.f64(a.t_max, "t-max")?.unwrap_or(2.0);
    let report = m
        .path(a.report, "report")
        .unwrap_or_else(|| PathBuf::from("shock-scan.json"));
    file.ensure_consumed()?;

    let grid = parse_grid(&grid_s)?;
    let field = FieldArg::parse(&field_s)?;
    if !(t_max > 0.0) {
        return Err(Error::InvalidInput {
            what: "t-max",
            why: format!("scan horizon must be positive, got {t_max}"),
        });
    }

    let v0 = field.realize(&grid)?;
    let rep = shock_time(&v0, &grid, t_max)?;
    let doc = ShockScanReport {
        field: field.name(),
        grid: grid_s,
        t_max,
        shock_detected: rep.shock_detected,
        shock_time: rep.shock_time,
        predicted_time: rep.predicted_time.is_finite().then_some(rep.predicted_time),
        crossing_pair: rep.crossing_pair,
    };
    write_json(&report, &doc)?;
    let verdict = match rep.shock_time {
        Some(t) => format!("shock at t={t:.6e}"),
        None => format!("no shock on [0, {t_max}]"),
    };
    Ok(format!(
        "shock-scan: {} -> {verdict} -> {}",
        field.name(),
        report.display()
    ))
}

pub fn jko_cmd(a: JkoArgs, file: &mut FileConfig) -> Result<String> {
    let mut m = Merge::new(file);
    let grid_s = m.string(a.grid, "grid").unwrap_or_else(|| DEFAULT_GRID.into());
    let init_s = required(m.string(a.init, "init"), "init")?;
    let pot_s = m.string(a.potential, "potential");
    let d = m.f64(a.diffusion, "diffusion")?.unwrap_or(1.0);
    let tau = m.f64(a.tau, "tau")?.unwrap_or(0.01);
    let steps = m.usize(a.steps, "steps")?.unwrap_or(20);
    let format = parse_format(m.string(a.format, "format"))?;
    let out = m
        .path(a.out, "out")
        .unwrap_or_else(|| default_out("jko", format));
    file.ensure_consumed()?;

    let grid = parse_grid(&grid_s)?;
    let init = InitSpec::parse("init", &init_s)?;
    let pot = potential_or_zero(pot_s)?;
    if !(tau > 0.0) {
        return Err(Error::InvalidInput {
            what: "tau",
            why: format!("step size must be positive, got {tau}"),
        });
    }
    if steps == 0 {
        return Err(Error::InvalidInput {
            what: "steps",
            why: "need at least one step".into(),
        });
    }

    let mut rho = init.realize(grid)?;
    for _ in 0..steps {
        rho = jko_step(&rho, tau, d, &pot)?;
    }
    write_density(&out, &rho, format)?;
    let (mean, var) = density_moments(&rho);
    let energy = free_energy(&rho, d, &pot)?.total;
    Ok(format!(
        "jko: {steps} steps of tau={tau} to t={:.6e} mean={mean:.6e} var={var:.6e} energy={energy:.6e} -> {}",
        tau * steps as f64,
        out.display()
    ))
}

/// Runs a validation suite, prints the JSON report to stdout, and returns
/// the process exit code: 0 when every criterion passed, 1 otherwise.
pub fn validate_cmd(a: ValidateArgs, file: &mut FileConfig) -> Result<i32> {
    let mut m = Merge::new(file);
    let suite = m.string(a.suite, "suite").unwrap_or_else(|| "all".into());
    let out = m.path(a.out, "out");
    file.ensure_consumed()?;

    let results = validate::run_suite(&suite)?;
    let json = serde_json::to_string_pretty(&results).map_err(|e| Error::Io {
        path: "<stdout>".into(),
        why: e.to_string(),
    })?;
    println!("{json}");
    if let Some(path) = out {
        write_json(&path, &results)?;
    }
    Ok(if results.iter().all(|r| r.pass) { 0 } else { 1 })
}
