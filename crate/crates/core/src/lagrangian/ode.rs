//! Probability-flow ODE: the deterministic particle flow
//!
//! ```text
//!     dx/dt = -grad Psi(x, t) - D(t) * d/dx log rho_t(x)
//! ```
//!
//! whose marginals coincide with the Ito process of the same schedule. The
//! sign convention is fixed once here: with the forward equation written as
//! `d rho/dt = D rho_xx + (rho Psi_x)_x`, the velocity field above is the
//! one whose continuity equation reproduces it, so a run initialized at the
//! stationary profile must freeze (drift and score term cancel). Reverse-time
//! use is time reversal of this same integrator.
//!
//! Scores come from a table of density snapshots, typically a concurrent
//! grid-solver run; classic fourth-order Runge-Kutta does the stepping and
//! no randomness is involved anywhere.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{Density1D, DiffusionSchedule, ParticleEnsemble};
use crate::scalar::{cast, Scalar};

use super::score::ScoreTable;

/// Integrates every particle of `ens0` through the probability-flow ODE up
/// to `t_end` with fixed Runge-Kutta steps no longer than `dt`. The score
/// table must cover `[0, t_end]`; a particle that wanders out of the
/// table's grid, or into a region below the density floor, fails with its
/// index attached. When `D(t) = 0` the score never enters and the flow is
/// the pure drift of the schedule.
pub fn simulate_probability_flow_ode<S: Scalar>(
    ens0: &ParticleEnsemble<S>,
    sched: &DiffusionSchedule<S>,
    score_source: &[(S, Density1D<S>)],
    t_end: S,
    dt: S,
) -> Result<ParticleEnsemble<S>> {
    if t_end > sched.horizon() {
        return Err(Error::InvalidInput {
            what: "horizon",
            why: format!(
                "t_end = {t_end} exceeds the schedule horizon {}",
                sched.horizon()
            ),
        });
    }
    let table = ScoreTable::new(score_source)?;
    let (t_first, t_last) = table.span();
    if t_first > S::zero() || t_last < t_end {
        return Err(Error::InvalidInput {
            what: "score source",
            why: format!("snapshots span [{t_first}, {t_last}], need [0, {t_end}]"),
        });
    }
    let steps = super::plan_substeps(t_end, dt)?;
    let dt = t_end / cast::<S>(steps as f64);
    let half = dt / (S::one() + S::one());
    let sixth = dt / cast::<S>(6.0);
    let two = S::one() + S::one();

    let velocity = |x: S, t: S, particle: usize| -> Result<S> {
        let mut v = -sched.grad_potential(x, t);
        let d = sched.diffusivity(t);
        if d > S::zero() {
            let s = table.eval(x, t).map_err(|e| attach_particle(e, particle))?;
            v = v - d * s;
        }
        Ok(v)
    };

    let positions: Vec<S> = ens0
        .positions()
        .par_iter()
        .enumerate()
        .map(|(p, &x0)| {
            let mut x = x0;
            for step in 0..steps {
                let t = dt * cast::<S>(step as f64);
                let k1 = velocity(x, t, p)?;
                let k2 = velocity(x + half * k1, t + half, p)?;
                let k3 = velocity(x + half * k2, t + half, p)?;
                let k4 = velocity(x + dt * k3, t + dt, p)?;
                x = x + sixth * (k1 + two * (k2 + k3) + k4);
            }
            Ok(x)
        })
        .collect::<Result<Vec<_>>>()?;
    ParticleEnsemble::new(positions, ens0.time() + t_end)
}

/// Rewrites score-evaluation failures so the caller learns which particle
/// left the valid region.
fn attach_particle(e: Error, particle: usize) -> Error {
    match e {
        Error::LowDensity { position, .. } => Error::LowDensity {
            position,
            particle: Some(particle),
        },
        Error::OutOfDomain { value, .. } => Error::LowDensity {
            position: value,
            particle: Some(particle),
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::simulate_sde;
    use crate::measures::{ks_distance, sample_from_density, Grid1D};
    use approx::assert_relative_eq;

    #[test]
    fn stationary_flow_freezes_the_ensemble() {
        // grad Psi = x and rho = N(0,1): score is -x, the velocity cancels
        let grid = Grid1D::new(-8.0, 8.0, 1024).unwrap();
        let rho = Density1D::gaussian(grid, 0.0, 1.0).unwrap();
        let ens0 = sample_from_density(&rho, 10_000, 31).unwrap();
        let sched = DiffusionSchedule::vp(|_t: f64| 1.0, 2.0).unwrap();
        let source = vec![(0.0, rho.clone()), (1.0, rho.clone())];
        let out = simulate_probability_flow_ode(&ens0, &sched, &source, 1.0, 1e-2).unwrap();
        let moved = ens0
            .positions()
            .iter()
            .zip(out.positions())
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(moved <= 1e-3, "largest displacement {moved}");
        assert!(ks_distance(&out, &rho) <= 0.02);
    }

    #[test]
    fn zero_diffusivity_is_the_pure_drift_flow() {
        // frozen case: VE with D = 0 moves nothing in either simulator
        let ens0 = ParticleEnsemble::new(vec![0.4, -1.1, 2.0], 0.0).unwrap();
        let grid = Grid1D::new(-8.0, 8.0, 256).unwrap();
        let rho = Density1D::gaussian(grid, 0.0, 1.0).unwrap();
        let source = vec![(0.0, rho.clone()), (1.0, rho.clone())];
        let frozen = DiffusionSchedule::ve(|_t: f64| 0.0, |_| 0.0, 1.0).unwrap();
        let a = simulate_probability_flow_ode(&ens0, &frozen, &source, 1.0, 1e-2).unwrap();
        let b = simulate_sde(&ens0, &frozen, 1.0, 1e-2, 123).unwrap();
        assert_eq!(a.positions(), ens0.positions());
        assert_eq!(a.positions(), b.positions());

        // pure drift: grad Psi = x decays x0 = 1 to e^{-1}; Runge-Kutta
        // nails it and Euler-Maruyama approaches at first order
        let one = ParticleEnsemble::new(vec![1.0], 0.0).unwrap();
        let drift = DiffusionSchedule::vp_with(|_t: f64| 1.0, |_| 0.0, 2.0).unwrap();
        let o = simulate_probability_flow_ode(&one, &drift, &source, 1.0, 1e-4).unwrap();
        assert_relative_eq!(o.positions()[0], (-1.0f64).exp(), epsilon = 1e-9);
        let s = simulate_sde(&one, &drift, 1.0, 1e-4, 0).unwrap();
        assert!((o.positions()[0] - s.positions()[0]).abs() < 5e-5);
    }

    #[test]
    fn heat_flow_variance_tracks_the_spreading_gaussian() {
        // Psi = 0, D = 1: the flow stretches x by sigma(t)/sigma(0), so an
        // N(0,1) ensemble should reach variance 1 + 2t = 4 at t = 1.5
        let grid = Grid1D::new(-12.0, 12.0, 1024).unwrap();
        let rho0 = Density1D::gaussian(grid, 0.0, 1.0).unwrap();
        let ens0 = sample_from_density(&rho0, 10_000, 8).unwrap();
        let sched = DiffusionSchedule::ve(|t: f64| t, |_| 1.0, 2.0).unwrap();
        let source: Vec<(f64, Density1D<f64>)> = (0..=24)
            .map(|k| {
                let t = 1.5 * k as f64 / 24.0;
                let sd = (1.0 + 2.0 * t).sqrt();
                (t, Density1D::gaussian(grid, 0.0, sd).unwrap())
            })
            .collect();
        let out = simulate_probability_flow_ode(&ens0, &sched, &source, 1.5, 1e-2).unwrap();
        let (_, var) = out.moments();
        assert_relative_eq!(var, 4.0, epsilon = 4.0 * 0.03);
    }

    #[test]
    fn integration_is_deterministic() {
        let grid = Grid1D::new(-8.0, 8.0, 512).unwrap();
        let rho = Density1D::gaussian(grid, 0.0, 1.0).unwrap();
        let ens0 = sample_from_density(&rho, 500, 4).unwrap();
        let sched = DiffusionSchedule::vp(|_t: f64| 0.5, 1.0).unwrap();
        let source = vec![(0.0, rho.clone()), (1.0, rho.clone())];
        let a = simulate_probability_flow_ode(&ens0, &sched, &source, 0.5, 1e-2).unwrap();
        let b = simulate_probability_flow_ode(&ens0, &sched, &source, 0.5, 1e-2).unwrap();
        assert_eq!(a.positions(), b.positions());
    }

    #[test]
    fn escaping_particle_reports_its_index() {
        // static N(0,1) table with D = 1 and no drift: velocity is +x, so
        // the particle near the edge blows outward and leaves the grid
        let grid = Grid1D::new(-2.0, 2.0, 128).unwrap();
        let rho = Density1D::gaussian(grid, 0.0, 1.0).unwrap();
        let source = vec![(0.0, rho.clone()), (4.0, rho.clone())];
        let sched = DiffusionSchedule::ve(|t: f64| t, |_| 1.0, 4.0).unwrap();
        let ens0 = ParticleEnsemble::new(vec![0.0, 1.9], 0.0).unwrap();
        match simulate_probability_flow_ode(&ens0, &sched, &source, 4.0, 1e-2) {
            Err(Error::LowDensity {
                particle: Some(p), ..
            }) => assert_eq!(p, 1),
            other => panic!("expected a low-density failure, got {other:?}"),
        }
    }

    #[test]
    fn uncovered_horizon_is_rejected() {
        let grid = Grid1D::new(-8.0, 8.0, 256).unwrap();
        let rho = Density1D::gaussian(grid, 0.0, 1.0).unwrap();
        let sched = DiffusionSchedule::vp(|_t: f64| 1.0, 4.0).unwrap();
        let source = vec![(0.0, rho.clone()), (1.0, rho.clone())];
        let ens0 = ParticleEnsemble::new(vec![0.0], 0.0).unwrap();
        assert!(matches!(
            simulate_probability_flow_ode(&ens0, &sched, &source, 2.0, 1e-2),
            Err(Error::InvalidInput { .. })
        ));
    }
}
