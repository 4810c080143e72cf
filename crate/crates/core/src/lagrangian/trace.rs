//! Integral curves of a velocity field.
//!
//! `trace_characteristics` integrates `d/dt x(t) = v(x(t), t)` from a set
//! of start points with classic fourth-order Runge-Kutta and records every
//! step. A finite Lipschitz estimate on the field guarantees the curves
//! are unique, so traces started at distinct points never cross.

use crate::error::{Error, Result};
use crate::measures::VelocityField1D;
use crate::scalar::{cast, Scalar};

/// Time-major record of traced particle paths: row `k` holds every
/// particle's position at `times[k]`.
#[derive(Debug, Clone)]
pub struct Trajectory<S: Scalar> {
    times: Vec<S>,
    positions: Vec<Vec<S>>,
}

impl<S: Scalar> Trajectory<S> {
    pub fn times(&self) -> &[S] {
        &self.times
    }

    /// One row per time stamp, one column per particle.
    pub fn positions(&self) -> &[Vec<S>] {
        &self.positions
    }

    /// Number of recorded time stamps.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Number of traced particles.
    pub fn particles(&self) -> usize {
        self.positions.first().map_or(0, Vec::len)
    }

    pub fn final_positions(&self) -> &[S] {
        self.positions
            .last()
            .expect("trajectory always holds the initial row")
    }
}

/// Traces the curves `d/dt x = v(x, t)` from each entry of `x0` over
/// `[0, t_end]` with fixed Runge-Kutta steps no longer than `dt`, recording
/// the state after every step (plus the initial one).
pub fn trace_characteristics<S: Scalar>(
    v: &VelocityField1D<S>,
    x0: &[S],
    t_end: S,
    dt: S,
) -> Result<Trajectory<S>> {
    if !v.lipschitz().is_finite() {
        return Err(Error::InvalidInput {
            what: "velocity field",
            why: "Lipschitz estimate is not finite".into(),
        });
    }
    if let Some(bad) = x0.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidInput {
            what: "start points",
            why: format!("non-finite start {bad}"),
        });
    }
    let steps = super::plan_substeps(t_end, dt)?;
    let dt = t_end / cast::<S>(steps as f64);
    let half = dt / (S::one() + S::one());
    let sixth = dt / cast::<S>(6.0);
    let two = S::one() + S::one();

    let mut times = Vec::with_capacity(steps + 1);
    let mut positions = Vec::with_capacity(steps + 1);
    times.push(S::zero());
    positions.push(x0.to_vec());
    let mut current = x0.to_vec();
    for step in 0..steps {
        let t = dt * cast::<S>(step as f64);
        for x in current.iter_mut() {
            let k1 = v.eval(*x, t);
            let k2 = v.eval(*x + half * k1, t + half);
            let k3 = v.eval(*x + half * k2, t + half);
            let k4 = v.eval(*x + dt * k3, t + dt);
            *x = *x + sixth * (k1 + two * (k2 + k3) + k4);
        }
        times.push(dt * cast::<S>((step + 1) as f64));
        positions.push(current.clone());
    }
    Ok(Trajectory { times, positions })
}
