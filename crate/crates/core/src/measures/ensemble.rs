//! Particle ensembles.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Positions of N particles at one time stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble<S: Scalar> {
    positions: Vec<S>,
    time: S,
}

impl<S: Scalar> ParticleEnsemble<S> {
    pub fn new(positions: Vec<S>, time: S) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidInput {
                what: "ensemble",
                why: "needs at least one particle".into(),
            });
        }
        if !time.is_finite() {
            return Err(Error::InvalidInput {
                what: "ensemble time",
                why: format!("time {time} is not finite"),
            });
        }
        if let Some(p) = positions.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidInput {
                what: "ensemble positions",
                why: format!("non-finite position {p}"),
            });
        }
        Ok(ParticleEnsemble { positions, time })
    }

    pub fn positions(&self) -> &[S] {
        &self.positions
    }

    pub fn time(&self) -> S {
        self.time
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Sample mean and (population) variance.
    pub fn moments(&self) -> (S, S) {
        let n = crate::scalar::cast::<S>(self.positions.len() as f64);
        let mean = self.positions.iter().copied().sum::<S>() / n;
        let var = self
            .positions
            .iter()
            .map(|&x| (x - mean) * (x - mean))
            .sum::<S>()
            / n;
        (mean, var)
    }
}
