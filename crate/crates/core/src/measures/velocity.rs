//! Velocity fields for the Eulerian solvers.

use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

use super::grid::Grid1D;

const TIME_SAMPLES: usize = 33;

type FieldFn<S> = Box<dyn Fn(S, S) -> S + Send + Sync>;

/// Velocity field `v(x, t)` with a finite-difference Lipschitz estimate and
/// an optional validity horizon (set when the field stops being single-valued
/// past some time, e.g. a characteristic field past its shock).
pub struct VelocityField1D<S: Scalar> {
    eval: FieldFn<S>,
    lipschitz: S,
    valid_until: Option<S>,
}

impl<S: Scalar> VelocityField1D<S> {
    /// Wraps a closure, checking finiteness on `grid x [0, horizon]` and
    /// estimating the spatial Lipschitz constant by finite differences.
    pub fn new(
        eval: impl Fn(S, S) -> S + Send + Sync + 'static,
        grid: &Grid1D<S>,
        horizon: S,
    ) -> Result<Self> {
        if !horizon.is_finite() || horizon < S::zero() {
            return Err(Error::InvalidInput {
                what: "velocity horizon",
                why: format!("need a finite nonnegative horizon, got {horizon}"),
            });
        }
        let h = grid.h();
        let mut lipschitz = S::zero();
        for k in 0..TIME_SAMPLES {
            let t = horizon * cast(k as f64 / (TIME_SAMPLES - 1) as f64);
            let mut prev = eval(grid.center(0), t);
            if !prev.is_finite() {
                return Err(Error::InvalidInput {
                    what: "velocity field",
                    why: format!("v({}, {t}) is not finite", grid.center(0)),
                });
            }
            for i in 1..grid.cells() {
                let v = eval(grid.center(i), t);
                if !v.is_finite() {
                    return Err(Error::InvalidInput {
                        what: "velocity field",
                        why: format!("v({}, {t}) is not finite", grid.center(i)),
                    });
                }
                lipschitz = lipschitz.max(((v - prev) / h).abs());
                prev = v;
            }
        }
        Ok(VelocityField1D {
            eval: Box::new(eval),
            lipschitz,
            valid_until: None,
        })
    }

    /// Time-independent field from grid values, piecewise linear between cell
    /// centers and extended linearly beyond them.
    pub fn from_grid_values(grid: Grid1D<S>, values: Vec<S>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::InvalidInput {
                what: "velocity values",
                why: format!("expected {} cells, got {}", grid.cells(), values.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput {
                what: "velocity values",
                why: "non-finite entry".into(),
            });
        }
        let g = grid;
        let vals = values.clone();
        let eval = move |x: S, _t: S| interp_centers(&g, &vals, x);
        Self::new(eval, &grid, S::zero())
    }

    /// Marks the field as valid only up to `t`; evolution routines refuse
    /// horizons beyond it.
    pub fn with_valid_until(mut self, t: S) -> Self {
        self.valid_until = Some(t);
        self
    }

    pub fn eval(&self, x: S, t: S) -> S {
        (self.eval)(x, t)
    }

    /// Finite-difference estimate of `sup |dv/dx|` from construction time.
    pub fn lipschitz(&self) -> S {
        self.lipschitz
    }

    pub fn valid_until(&self) -> Option<S> {
        self.valid_until
    }
}

impl<S: Scalar> std::fmt::Debug for VelocityField1D<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "VelocityField1D(lipschitz ~ {})", self.lipschitz)
    }
}

/// Piecewise-linear interpolation through `(center_i, values_i)` with linear
/// extension beyond the first and last centers.
pub(crate) fn interp_centers<S: Scalar>(grid: &Grid1D<S>, values: &[S], x: S) -> S {
    let m = values.len();
    let h = grid.h();
    let first = grid.center(0);
    let last = grid.center(m - 1);
    if x <= first {
        let slope = (values[1] - values[0]) / h;
        return values[0] + slope * (x - first);
    }
    if x >= last {
        let slope = (values[m - 1] - values[m - 2]) / h;
        return values[m - 1] + slope * (x - last);
    }
    let pos = (x - first) / h;
    let i = pos.floor().to_usize().unwrap_or(0).min(m - 2);
    let frac = pos - cast(i as f64);
    values[i] + (values[i + 1] - values[i]) * frac
}
