//! Particle-view simulators for the same dynamics the Eulerian module
//! solves on grids.
//!
//! Four ways to move particles, one underlying flow:
//! - [`simulate_sde`]: Euler-Maruyama steps of the Ito process
//!   `dx = -grad Psi dt + sqrt(2 D) dW`;
//! - [`ddpm_chain`]: the discrete noising recursion
//!   `x <- sqrt(1 - 2 beta) x + sqrt(2 beta) xi`;
//! - [`simulate_probability_flow_ode`]: the deterministic flow
//!   `dx/dt = -grad Psi - D * score` whose marginals match the SDE;
//! - [`trace_characteristics`]: integral curves of an arbitrary velocity
//!   field, `d/dt x(t) = v(x(t), t)`.
//!
//! All randomness is counter-based: draws are keyed by
//! `(seed, particle, step)`, so results are bit-identical across thread
//! counts, and two simulators given the same seed consume the same noise
//! step for step. The ODE routines use no randomness at all.

mod chain;
mod ode;
mod score;
mod sde;
mod trace;

pub use chain::ddpm_chain;
pub use ode::simulate_probability_flow_ode;
pub use score::{exact_score, ExactScore, ScoreTable};
pub use sde::simulate_sde;
pub use trace::{trace_characteristics, Trajectory};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Splits `[0, t_end]` into equal substeps no longer than the requested
/// `dt`, so every simulator lands on the horizon exactly.
pub(crate) fn plan_substeps<S: Scalar>(t_end: S, dt: S) -> Result<usize> {
    if !t_end.is_finite() || t_end <= S::zero() {
        return Err(Error::InvalidInput {
            what: "horizon",
            why: format!("need finite t_end > 0, got {t_end}"),
        });
    }
    if !dt.is_finite() || dt <= S::zero() {
        return Err(Error::InvalidInput {
            what: "time step",
            why: format!("need finite dt > 0, got {dt}"),
        });
    }
    let ratio = (t_end / dt).ceil();
    let steps = ratio
        .to_usize()
        .filter(|&n| n <= 100_000_000)
        .ok_or_else(|| Error::InvalidInput {
            what: "time step",
            why: format!("t_end / dt = {} steps is not a workable count", ratio),
        })?;
    Ok(steps.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cast;

    #[test]
    fn substeps_cover_the_horizon_without_overshoot() {
        assert_eq!(plan_substeps(1.0f64, 0.1).unwrap(), 10);
        assert_eq!(plan_substeps(1.0f64, 0.3).unwrap(), 4);
        assert_eq!(plan_substeps(0.05f64, 0.1).unwrap(), 1);
        assert!(plan_substeps(1.0f64, 0.0).is_err());
        assert!(plan_substeps(-1.0f64, 0.1).is_err());
        assert!(plan_substeps(1.0f64, 1e-12).is_err());
    }

    #[test]
    fn cast_helper_round_trips_on_integers() {
        let n = plan_substeps(2.0f64, 0.25).unwrap();
        let dt_eff = 2.0 / cast::<f64>(n as f64);
        assert_eq!(n, 8);
        assert_eq!(dt_eff, 0.25);
    }
}
