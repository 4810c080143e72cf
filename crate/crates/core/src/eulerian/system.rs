//! The coupled system of time-dependent transport:
//!
//! ```text
//! d rho/dt + (rho v)_x = 0,   rho_0 = mu
//! dv/dt + v dv/dx = 0,        v at t=0 given
//! ```
//!
//! The velocity rides its own characteristics (pressureless flow) while the
//! density is carried by the continuity equation underneath. Valid strictly
//! before the velocity shocks; the pushforward of mu under the launch map
//! `x + t v0(x)` solves the same system and serves as a cross-check.

use crate::error::{Error, Result};
use crate::measures::{pushforward_density, Density1D, TransportMap1D, VelocityField1D};
use crate::scalar::{as_f64, Scalar};

use super::advection::continuity_evolve;
use super::burgers::{burgers_evolve, characteristic_preimage, predicted_shock_time};
use super::fp::EvolveOptions;
use super::trajectory::EulerianTrajectory;

/// Evolves `mu` under the self-transported field started from `v0`,
/// recording both densities and velocity slices at the snapshot times.
pub fn solve_optimality_system<S: Scalar>(
    mu: &Density1D<S>,
    v0: &VelocityField1D<S>,
    t_end: S,
    opts: EvolveOptions<S>,
) -> Result<EulerianTrajectory<S>> {
    if !(t_end.is_finite() && t_end > S::zero()) {
        return Err(Error::InvalidInput {
            what: "horizon",
            why: format!("need finite t_end > 0, got {t_end}"),
        });
    }
    let grid = *mu.grid();
    let predicted = predicted_shock_time(v0, &grid);
    if t_end >= predicted {
        return Err(Error::ShockEncountered {
            time: as_f64(predicted),
        });
    }
    // freeze v0 on the grid so the closure field owns its data
    let v0_vals: Vec<S> = grid
        .centers()
        .iter()
        .map(|&x| v0.eval(x, S::zero()))
        .collect();
    let v_max = v0_vals
        .iter()
        .fold(S::zero(), |acc, v| acc.max(v.abs()));
    let v0_pl = VelocityField1D::from_grid_values(grid, v0_vals)?;
    let field = VelocityField1D::new(
        move |x: S, t: S| {
            if t <= S::zero() {
                return v0_pl.eval(x, S::zero());
            }
            let pad = t * v_max + S::one();
            let y = characteristic_preimage(|y| v0_pl.eval(y, S::zero()), t, x, pad);
            v0_pl.eval(y, S::zero())
        },
        &grid,
        t_end,
    )?;
    let field = if predicted.is_finite() {
        field.with_valid_until(predicted)
    } else {
        field
    };
    let traj = continuity_evolve(mu, &field, t_end, opts)?;
    let velocities = traj
        .times()
        .iter()
        .map(|&t| burgers_evolve(v0, t, &grid))
        .collect::<Result<Vec<_>>>()?;
    traj.with_velocities(velocities)
}

/// Change-of-variables density of `mu` under a monotone map (monotonicity
/// is enforced by the map type at construction).
pub fn pushforward_by_map<S: Scalar>(
    mu: &Density1D<S>,
    map: &TransportMap1D<S>,
) -> Result<Density1D<S>> {
    pushforward_density(mu, map)
}
