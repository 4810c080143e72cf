//! Monotone transport maps, represented as piecewise-linear functions.

use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

use super::grid::Grid1D;

/// Nondecreasing map `T(x)` sampled at cell centers and interpolated
/// piecewise linearly, with linear extension outside the sampled range.
#[derive(Debug, Clone)]
pub struct TransportMap1D<S: Scalar> {
    grid: Grid1D<S>,
    values: Vec<S>,
}

impl<S: Scalar> TransportMap1D<S> {
    /// From explicit values at cell centers. Rejects non-finite entries or
    /// a decreasing pair (equal consecutive values are allowed: the map may
    /// be flat where mass concentrates).
    pub fn from_values(grid: Grid1D<S>, values: Vec<S>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::GridMismatch);
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidInput {
                    what: "transport map values",
                    why: format!("non-finite entry at cell {i}"),
                });
            }
            if i > 0 && *v < values[i - 1] {
                return Err(Error::NotMonotone { position: crate::scalar::as_f64(grid.center(i)) });
            }
        }
        Ok(TransportMap1D { grid, values })
    }

    /// Samples a closure at the cell centers.
    pub fn from_fn(grid: Grid1D<S>, f: impl Fn(S) -> S) -> Result<Self> {
        let values = grid.centers().iter().map(|&x| f(x)).collect();
        Self::from_values(grid, values)
    }

    pub fn grid(&self) -> Grid1D<S> {
        self.grid
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// Evaluates the map; outside the sampled centers the end segments are
    /// extended with their own slopes (constant extension if an end segment
    /// is flat).
    pub fn eval(&self, x: S) -> S {
        let m = self.values.len();
        let h = self.grid.h();
        let first = self.grid.center(0);
        let last = self.grid.center(m - 1);
        if x <= first {
            let slope = (self.values[1] - self.values[0]) / h;
            return self.values[0] + slope * (x - first);
        }
        if x >= last {
            let slope = (self.values[m - 1] - self.values[m - 2]) / h;
            return self.values[m - 1] + slope * (x - last);
        }
        let pos = (x - first) / h;
        let i = pos.floor().to_usize().unwrap_or(0).min(m - 2);
        let frac = pos - cast(i as f64);
        self.values[i] + (self.values[i + 1] - self.values[i]) * frac
    }

    /// Inverts the map at `y` by locating the segment whose value range
    /// contains `y`. Flat stretches return their left endpoint; values beyond
    /// the sampled range use the extended end segments where possible.
    pub fn invert(&self, y: S) -> Result<S> {
        let m = self.values.len();
        let h = self.grid.h();
        let first = self.grid.center(0);
        let last = self.grid.center(m - 1);
        if y <= self.values[0] {
            let slope = (self.values[1] - self.values[0]) / h;
            if slope <= S::zero() {
                if y == self.values[0] {
                    return Ok(first);
                }
                return Err(Error::DegenerateTarget);
            }
            return Ok(first + (y - self.values[0]) / slope);
        }
        if y >= self.values[m - 1] {
            let slope = (self.values[m - 1] - self.values[m - 2]) / h;
            if slope <= S::zero() {
                if y == self.values[m - 1] {
                    return Ok(last);
                }
                return Err(Error::DegenerateTarget);
            }
            return Ok(last + (y - self.values[m - 1]) / slope);
        }
        // partition_point: first index with values[i] >= y, so the segment
        // [i-1, i] brackets y.
        let i = self.values.partition_point(|v| *v < y);
        let lo = self.values[i - 1];
        let hi = self.values[i];
        let x0 = self.grid.center(i - 1);
        if hi == lo {
            return Ok(x0);
        }
        Ok(x0 + h * (y - lo) / (hi - lo))
    }

    /// Composes `self` after `inner`: the map `x -> self(inner(x))`,
    /// resampled on `inner`'s grid.
    pub fn compose(&self, inner: &TransportMap1D<S>) -> Result<Self> {
        let values = inner.values.iter().map(|&y| self.eval(y)).collect();
        Self::from_values(inner.grid, values)
    }
}
