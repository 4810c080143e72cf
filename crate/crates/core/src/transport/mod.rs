//! Optimal transport on the line: monotone rearrangement maps, the
//! Wasserstein distance, displacement interpolation, kinetic actions, and
//! general convex transport costs.
//!
//! In one dimension the optimal map between two densities is the monotone
//! rearrangement `T = Q_nu . F_mu` (target quantile after source CDF),
//! for every convex cost at once. Everything here builds on that map:
//! distances integrate quantile differences, geodesics push the source
//! through `(1 - t) id + t T`, and the action module measures the kinetic
//! energy such paths spend.

mod action;
mod cost;
mod quantile;

pub use action::{benamou_brenier_action, displacement_path, displacement_velocity};
pub use cost::{convex_cost_trajectory, legendre_transform, straight_line_cost_check, CostSpec};
pub use quantile::{displacement_interpolation, quantile_map, w2_distance};
