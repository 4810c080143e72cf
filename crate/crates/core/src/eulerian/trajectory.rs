//! Trajectory containers for the grid solvers.

use crate::error::{Error, Result};
use crate::measures::{Density1D, Grid1D};
use crate::scalar::Scalar;

/// Time-indexed sequence of densities, optionally with the velocity field
/// (at cell centers) that produced each snapshot.
#[derive(Debug, Clone)]
pub struct EulerianTrajectory<S: Scalar> {
    times: Vec<S>,
    densities: Vec<Density1D<S>>,
    velocities: Option<Vec<Vec<S>>>,
}

impl<S: Scalar> EulerianTrajectory<S> {
    pub fn new(times: Vec<S>, densities: Vec<Density1D<S>>) -> Result<Self> {
        if times.len() != densities.len() {
            return Err(Error::InvalidInput {
                what: "trajectory",
                why: format!("{} times but {} densities", times.len(), densities.len()),
            });
        }
        if times.is_empty() {
            return Err(Error::InvalidInput {
                what: "trajectory",
                why: "need at least one snapshot".into(),
            });
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidInput {
                    what: "trajectory times",
                    why: format!("times must strictly increase, got {} then {}", w[0], w[1]),
                });
            }
        }
        let grid = densities[0].grid();
        if densities.iter().any(|d| d.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(EulerianTrajectory {
            times,
            densities,
            velocities: None,
        })
    }

    /// Attaches per-snapshot velocity values at cell centers.
    pub fn with_velocities(mut self, velocities: Vec<Vec<S>>) -> Result<Self> {
        if velocities.len() != self.times.len() {
            return Err(Error::InvalidInput {
                what: "trajectory velocities",
                why: format!(
                    "{} snapshots but {} velocity slices",
                    self.times.len(),
                    velocities.len()
                ),
            });
        }
        let m = self.grid().cells();
        if velocities.iter().any(|v| v.len() != m) {
            return Err(Error::GridMismatch);
        }
        self.velocities = Some(velocities);
        Ok(self)
    }

    pub fn times(&self) -> &[S] {
        &self.times
    }

    pub fn densities(&self) -> &[Density1D<S>] {
        &self.densities
    }

    pub fn velocities(&self) -> Option<&[Vec<S>]> {
        self.velocities.as_deref()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> &Grid1D<S> {
        self.densities[0].grid()
    }

    pub fn final_density(&self) -> &Density1D<S> {
        self.densities.last().expect("trajectory is never empty")
    }

    pub fn final_time(&self) -> S {
        *self.times.last().expect("trajectory is never empty")
    }
}

/// Outcome of a characteristic-crossing scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockReport<S: Scalar> {
    /// Whether adjacent characteristics cross inside the scanned horizon.
    pub shock_detected: bool,
    /// First crossing time (midpoint of the bracketing scan interval).
    pub shock_time: Option<S>,
    /// Launch points of the first crossing pair.
    pub crossing_pair: Option<(S, S)>,
    /// `1 / max(-v0')` from finite differences; infinite when the initial
    /// field is nondecreasing.
    pub predicted_time: S,
}
