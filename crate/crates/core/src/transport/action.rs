//! Kinetic action of density paths and the displacement path that
//! minimizes it.
//!
//! For a path of densities rho_t carrying a velocity field v_t on the unit
//! time interval, the action is
//!
//! ```text
//!     A = integral over t in [0, 1] of integral of rho_t v_t^2 dx dt.
//! ```
//!
//! Among all paths joining two measures, the displacement interpolation
//! minimizes A, and its action equals the squared Wasserstein distance.
//! Discretely, the time integral uses trapezoid weights per slab (so
//! non-uniform snapshot times are fine) and the space integral sums cell
//! midpoints.

use crate::error::{Error, Result};
use crate::measures::{Density1D, TransportMap1D};
use crate::scalar::{cast, Scalar};

use super::quantile::{displacement_interpolation, quantile_map};

/// Discrete kinetic action of a trajectory with velocity data on the unit
/// time interval.
pub fn benamou_brenier_action<S: Scalar>(
    traj: &crate::eulerian::EulerianTrajectory<S>,
) -> Result<S> {
    let velocities = traj.velocities().ok_or(Error::MissingVelocities)?;
    let times = traj.times();
    if times.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: times.len(),
        });
    }
    let span_tol = cast::<S>(1e-9);
    let last = *times.last().expect("checked nonempty");
    if times[0].abs() > span_tol || (last - S::one()).abs() > span_tol {
        return Err(Error::InvalidInput {
            what: "action time span",
            why: format!("need times covering [0, 1], got [{}, {last}]", times[0]),
        });
    }
    let h = traj.grid().h();
    let kinetic: Vec<S> = traj
        .densities()
        .iter()
        .zip(velocities)
        .map(|(rho, v)| {
            rho.values()
                .iter()
                .zip(v)
                .fold(S::zero(), |acc, (&r, &vi)| acc + r * vi * vi)
                * h
        })
        .collect();
    let half = cast::<S>(0.5);
    let mut action = S::zero();
    for k in 0..times.len() - 1 {
        action = action + (times[k + 1] - times[k]) * half * (kinetic[k] + kinetic[k + 1]);
    }
    Ok(action)
}

/// Velocity field of the displacement interpolation at parameter `s`,
/// sampled at the source grid's cell centers.
///
/// A particle started at `y` moves with the constant velocity `T(y) - y`,
/// so the field at a point `z` is that expression evaluated at
/// `y = zeta_s^{-1}(z)` with `zeta_s = (1 - s) id + s T`. Centers beyond
/// the range of `zeta_s` (where the interpolant carries no mass) reuse the
/// nearest invertible end value.
pub fn displacement_velocity<S: Scalar>(
    mu: &Density1D<S>,
    nu: &Density1D<S>,
    s: S,
) -> Result<Vec<S>> {
    if !(s >= S::zero() && s <= S::one()) {
        return Err(Error::InvalidInput {
            what: "interpolation parameter",
            why: format!("s = {s} is outside [0, 1]"),
        });
    }
    let map = quantile_map(mu, nu)?;
    let grid = *mu.grid();
    let one_minus = S::one() - s;
    let zeta_values: Vec<S> = map
        .values()
        .iter()
        .enumerate()
        .map(|(i, &ti)| one_minus * grid.center(i) + s * ti)
        .collect();
    let zeta = TransportMap1D::from_values(grid, zeta_values)?;
    let m = grid.cells();
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let z = grid.center(i);
        let y = match zeta.invert(z) {
            Ok(y) => y,
            // only flat end segments fail to invert; clamp to that end
            Err(_) => {
                if z < zeta.eval(grid.center(0)) {
                    grid.center(0)
                } else {
                    grid.center(m - 1)
                }
            }
        };
        out.push(map.eval(y) - y);
    }
    Ok(out)
}

/// Displacement path from `mu` to `nu` sampled at `snapshots` uniform
/// times on [0, 1], with the geodesic velocity field attached to each
/// snapshot. Its [`benamou_brenier_action`] approximates the squared
/// Wasserstein distance.
pub fn displacement_path<S: Scalar>(
    mu: &Density1D<S>,
    nu: &Density1D<S>,
    snapshots: usize,
) -> Result<crate::eulerian::EulerianTrajectory<S>> {
    if snapshots < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: snapshots,
        });
    }
    let mut times = Vec::with_capacity(snapshots);
    let mut densities = Vec::with_capacity(snapshots);
    let mut velocities = Vec::with_capacity(snapshots);
    for k in 0..snapshots {
        let t = cast::<S>(k as f64 / (snapshots - 1) as f64);
        times.push(t);
        densities.push(displacement_interpolation(mu, nu, t)?);
        velocities.push(displacement_velocity(mu, nu, t)?);
    }
    crate::eulerian::EulerianTrajectory::new(times, densities)?.with_velocities(velocities)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eulerian::EulerianTrajectory;
    use crate::measures::{l1_distance, Grid1D};
    use crate::transport::quantile::w2_distance;
    use approx::assert_relative_eq;

    fn still_trajectory(times: Vec<f64>) -> EulerianTrajectory<f64> {
        let g = Grid1D::new(-8.0, 8.0, 256).unwrap();
        let rho = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let densities = vec![rho; times.len()];
        EulerianTrajectory::new(times, densities).unwrap()
    }

    #[test]
    fn translation_action_is_the_squared_speed() {
        let traj = still_trajectory(vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let m = traj.grid().cells();
        let traj = traj.with_velocities(vec![vec![2.0; m]; 5]).unwrap();
        assert_relative_eq!(benamou_brenier_action(&traj).unwrap(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn still_path_has_zero_action() {
        let traj = still_trajectory(vec![0.0, 1.0]);
        let m = traj.grid().cells();
        let traj = traj.with_velocities(vec![vec![0.0; m]; 2]).unwrap();
        assert_eq!(benamou_brenier_action(&traj).unwrap(), 0.0);
    }

    #[test]
    fn non_uniform_times_get_trapezoid_weights() {
        let times = vec![0.0, 0.1, 0.6, 1.0];
        let traj = still_trajectory(times);
        let m = traj.grid().cells();
        let velocities: Vec<Vec<f64>> = (0..4).map(|k| vec![k as f64; m]).collect();
        let traj = traj.with_velocities(velocities).unwrap();
        // kinetic energies 0, 1, 4, 9 with unit mass:
        // 0.1 * 0.5 + 0.5 * 2.5 + 0.4 * 6.5 = 3.9
        assert_relative_eq!(benamou_brenier_action(&traj).unwrap(), 3.9, epsilon = 1e-12);
    }

    #[test]
    fn velocities_are_required() {
        let traj = still_trajectory(vec![0.0, 1.0]);
        assert!(matches!(
            benamou_brenier_action(&traj),
            Err(Error::MissingVelocities)
        ));
    }

    #[test]
    fn the_unit_time_span_is_required() {
        for times in [vec![0.0, 0.5], vec![0.1, 1.0]] {
            let traj = still_trajectory(times);
            let m = traj.grid().cells();
            let traj = traj.with_velocities(vec![vec![1.0; m]; 2]).unwrap();
            assert!(benamou_brenier_action(&traj).is_err());
        }
    }

    #[test]
    fn geodesic_velocity_matches_the_affine_map() {
        // T(x) = 3 + 2x, so the field at s = 0 is z + 3 and the inverse
        // map at s = 1 gives (z + 3) / 2
        let g = Grid1D::new(-9.0, 15.0, 512).unwrap();
        let mu = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let nu = Density1D::gaussian(g, 3.0, 2.0).unwrap();
        let at_start = displacement_velocity(&mu, &nu, 0.0).unwrap();
        let at_end = displacement_velocity(&mu, &nu, 1.0).unwrap();
        for i in 0..g.cells() {
            let z = g.center(i);
            if !(-2.5..=2.5).contains(&z) {
                continue;
            }
            assert_relative_eq!(at_start[i], z + 3.0, epsilon = 2e-2);
            assert_relative_eq!(at_end[i], (z + 3.0) / 2.0, epsilon = 2e-2);
        }
    }

    #[test]
    fn geodesic_action_equals_the_squared_distance() {
        let g = Grid1D::new(-9.0, 15.0, 512).unwrap();
        let mu = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let nu = Density1D::gaussian(g, 3.0, 2.0).unwrap();
        let traj = displacement_path(&mu, &nu, 21).unwrap();
        let action = benamou_brenier_action(&traj).unwrap();
        // Gaussian pair: W2^2 = 3^2 + (2 - 1)^2 = 10
        assert_relative_eq!(action, 10.0, max_relative = 0.02);
        let w2 = w2_distance(&mu, &nu);
        assert_relative_eq!(action, w2 * w2, max_relative = 0.02);
    }

    #[test]
    fn reparameterized_paths_cost_more() {
        // running the same geodesic at non-constant speed s(t) = t^2
        // multiplies the action by the integral of (2t)^2, i.e. 4/3
        let g = Grid1D::new(-9.0, 15.0, 512).unwrap();
        let mu = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let nu = Density1D::gaussian(g, 3.0, 2.0).unwrap();
        let n = 21;
        let mut times = Vec::new();
        let mut densities = Vec::new();
        let mut velocities = Vec::new();
        for k in 0..n {
            let t = k as f64 / (n - 1) as f64;
            let s = t * t;
            times.push(t);
            densities.push(displacement_interpolation(&mu, &nu, s).unwrap());
            let slice = displacement_velocity(&mu, &nu, s).unwrap();
            velocities.push(slice.into_iter().map(|v| 2.0 * t * v).collect());
        }
        let warped = EulerianTrajectory::new(times, densities)
            .unwrap()
            .with_velocities(velocities)
            .unwrap();
        let action = benamou_brenier_action(&warped).unwrap();
        assert_relative_eq!(action, 40.0 / 3.0, max_relative = 0.03);

        let straight = displacement_path(&mu, &nu, 21).unwrap();
        assert!(action > benamou_brenier_action(&straight).unwrap());
    }

    #[test]
    fn a_single_snapshot_is_not_a_path() {
        let g = Grid1D::new(-8.0, 8.0, 128).unwrap();
        let mu = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let nu = Density1D::gaussian(g, 1.0, 1.0).unwrap();
        assert!(matches!(
            displacement_path(&mu, &nu, 1),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn displacement_path_hits_both_endpoints() {
        let g = Grid1D::new(-9.0, 15.0, 512).unwrap();
        let mu = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let nu = Density1D::gaussian(g, 3.0, 2.0).unwrap();
        let traj = displacement_path(&mu, &nu, 5).unwrap();
        assert!(l1_distance(&traj.densities()[0], &mu).unwrap() <= 2e-2);
        assert!(l1_distance(traj.final_density(), &nu).unwrap() <= 2e-2);
    }
}
