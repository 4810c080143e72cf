//! Conservative upwind transport under a prescribed velocity field:
//! the continuity equation `d rho/dt + (rho v)_x = 0` with zero-flux domain
//! ends (mass reaching the boundary accumulates in the end cells instead of
//! leaking, keeping the total exact).

use crate::error::{Error, Result};
use crate::measures::{Density1D, VelocityField1D};
use crate::scalar::{as_f64, cast, Scalar};

use super::fp::{admissible_dt, plan_steps, EvolveOptions};
use super::trajectory::EulerianTrajectory;

/// Evolves `rho0` to `t_end` under the velocity field `v`.
///
/// If the field carries a validity horizon (a Burgers solution valid only
/// until its shock), horizons at or past it are refused.
pub fn continuity_evolve<S: Scalar>(
    rho0: &Density1D<S>,
    v: &VelocityField1D<S>,
    t_end: S,
    opts: EvolveOptions<S>,
) -> Result<EulerianTrajectory<S>> {
    if !(t_end.is_finite() && t_end > S::zero()) {
        return Err(Error::InvalidInput {
            what: "horizon",
            why: format!("need finite t_end > 0, got {t_end}"),
        });
    }
    if opts.snapshots < 2 {
        return Err(Error::InvalidInput {
            what: "snapshot count",
            why: "need at least the two endpoint snapshots".into(),
        });
    }
    if !v.lipschitz().is_finite() {
        return Err(Error::InvalidInput {
            what: "velocity field",
            why: "Lipschitz estimate is not finite".into(),
        });
    }
    if let Some(t_shock) = v.valid_until() {
        if t_end >= t_shock {
            return Err(Error::ShockEncountered {
                time: as_f64(t_shock),
            });
        }
    }
    let grid = *rho0.grid();
    let h = grid.h();
    let m = grid.cells();

    // peak speed over edges x horizon samples fixes the admissible step
    let mut v_max = S::zero();
    for k in 0..=256 {
        let t = t_end * cast::<S>(k as f64 / 256.0);
        for e in 0..=m {
            let speed = v.eval(grid.edge(e), t);
            if !speed.is_finite() {
                return Err(Error::InvalidInput {
                    what: "velocity field",
                    why: format!("v({}, {t}) is not finite", grid.edge(e)),
                });
            }
            v_max = v_max.max(speed.abs());
        }
    }
    let dt_cap = admissible_dt(h, S::zero(), v_max);
    let (steps, dt) = plan_steps(t_end, dt_cap, opts.dt, opts.snapshots)?;
    let per_block = steps / (opts.snapshots - 1);

    let mut rho = rho0.values().to_vec();
    let mut flux = vec![S::zero(); m + 1];
    let mut times = Vec::with_capacity(opts.snapshots);
    let mut densities = Vec::with_capacity(opts.snapshots);
    times.push(S::zero());
    densities.push(rho0.clone());

    for step in 0..steps {
        let t = dt * cast::<S>(step as f64);
        for k in 1..m {
            let speed = v.eval(grid.edge(k), t);
            // donor-cell upwind value
            let donor = if speed > S::zero() { rho[k - 1] } else { rho[k] };
            flux[k] = speed * donor;
        }
        let r = dt / h;
        for i in 0..m {
            rho[i] = rho[i] - r * (flux[i + 1] - flux[i]);
        }
        if (step + 1) % per_block == 0 {
            times.push(dt * cast::<S>((step + 1) as f64));
            densities.push(Density1D::new(grid, rho.clone())?);
        }
    }
    EulerianTrajectory::new(times, densities)
}
