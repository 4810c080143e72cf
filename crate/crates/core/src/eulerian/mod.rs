//! Grid-based evolution.
//!
//! Four solvers share the snapshot container here:
//!
//! - [`fp_evolve`] integrates the convection-diffusion equation
//!   `d rho/dt = (D rho' + rho psi')_x` with conservative fluxes and
//!   zero-flux walls (the gradient-flow side of the free energy).
//! - [`continuity_evolve`] transports a density under a prescribed
//!   velocity field, `d rho/dt + (rho v)_x = 0`.
//! - [`burgers_evolve`] and [`shock_time`] handle the pressureless
//!   velocity equation `dv/dt + v dv/dx = 0` by characteristics, up to
//!   the first crossing.
//! - [`solve_optimality_system`] couples the last two, with
//!   [`pushforward_by_map`] as the closed-form cross-check.
//!
//! Everything is explicit in time with a stability-bounded step; all
//! schemes conserve mass to rounding by construction.

mod advection;
mod burgers;
mod fp;
mod system;
mod trajectory;

pub use advection::continuity_evolve;
pub use burgers::{burgers_evolve, shock_time};
pub use fp::{admissible_dt, fp_evolve, EvolveOptions};
pub use system::{pushforward_by_map, solve_optimality_system};
pub use trajectory::{EulerianTrajectory, ShockReport};
