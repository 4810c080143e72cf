//! Grid densities and tangent vectors.
//!
//! A `Density1D` stores cell-averaged values of a probability density: all
//! values nonnegative and `h * sum(values) = 1`. Construction rejects mass
//! defects instead of renormalizing silently; `from_unnormalized` is the
//! explicit normalization path for histograms and Boltzmann weights.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, cast, precision_floor, Scalar};
use crate::special::{normal_cdf, normal_sf};

use super::grid::Grid1D;

/// Probability density on a uniform grid, stored as cell averages.
#[derive(Debug, Clone, PartialEq)]
pub struct Density1D<S: Scalar> {
    grid: Grid1D<S>,
    values: Vec<S>,
}

impl<S: Scalar> Density1D<S> {
    /// Accepts only near-unit mass: `|h * sum - 1| <= 1e-6` (widened by the
    /// scalar's epsilon so the check stays meaningful in f32).
    pub fn new(grid: Grid1D<S>, values: Vec<S>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::InvalidInput {
                what: "density values",
                why: format!("expected {} cells, got {}", grid.cells(), values.len()),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() || *v < S::zero() {
                return Err(Error::InvalidInput {
                    what: "density values",
                    why: format!("cell {i} holds {v}, must be finite and nonnegative"),
                });
            }
        }
        let mass = grid.h() * values.iter().copied().sum();
        let tol = precision_floor::<S>(1e-6, 64.0 * grid.cells() as f64);
        if (mass - S::one()).abs() > tol {
            return Err(Error::InvalidInput {
                what: "density mass",
                why: format!("h * sum = {} is off unit mass by more than {}", mass, tol),
            });
        }
        Ok(Density1D { grid, values })
    }

    /// Rescales nonnegative values to unit mass. This is the explicit
    /// normalization operation; plain `new` never rescales.
    pub fn from_unnormalized(grid: Grid1D<S>, values: Vec<S>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::InvalidInput {
                what: "density values",
                why: format!("expected {} cells, got {}", grid.cells(), values.len()),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() || *v < S::zero() {
                return Err(Error::InvalidInput {
                    what: "density values",
                    why: format!("cell {i} holds {v}, must be finite and nonnegative"),
                });
            }
        }
        let mass = grid.h() * values.iter().copied().sum();
        if !(mass.is_finite() && mass > cast(1e-12)) {
            return Err(Error::InvalidInput {
                what: "density mass",
                why: format!("total mass {} is too small to normalize", mass),
            });
        }
        let scaled = values.into_iter().map(|v| v / mass).collect();
        Ok(Density1D { grid, values: scaled })
    }

    /// Gaussian with the given mean and standard deviation, built from exact
    /// cell averages of the normal CDF and normalized on the grid.
    pub fn gaussian(grid: Grid1D<S>, mean: S, sigma: S) -> Result<Self> {
        if !(sigma.is_finite() && sigma > S::zero()) || !mean.is_finite() {
            return Err(Error::InvalidInput {
                what: "gaussian parameters",
                why: format!("mean {mean}, sigma {sigma}"),
            });
        }
        let h = as_f64(grid.h());
        let (mf, sf) = (as_f64(mean), as_f64(sigma));
        let mut values = Vec::with_capacity(grid.cells());
        for i in 0..grid.cells() {
            let zl = (as_f64(grid.edge(i)) - mf) / sf;
            let zr = zl + h / sf;
            // difference of survival functions in the upper tail: the CDF
            // difference would cancel to zero beyond ~7.5 sigma
            let p = if zl + zr > 0.0 {
                normal_sf(zl) - normal_sf(zr)
            } else {
                normal_cdf(zr) - normal_cdf(zl)
            };
            values.push(cast::<S>((p / h).max(0.0)));
        }
        Self::from_unnormalized(grid, values)
    }

    /// Uniform density on `[lo, hi]`, cell-averaged exactly (boundary cells
    /// carry the fractional overlap).
    pub fn uniform(grid: Grid1D<S>, lo: S, hi: S) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput {
                what: "uniform support",
                why: format!("need lo < hi, got [{lo}, {hi}]"),
            });
        }
        if lo < grid.lo() || hi > grid.hi() {
            return Err(Error::OutOfDomain {
                value: as_f64(if lo < grid.lo() { lo } else { hi }),
                lo: as_f64(grid.lo()),
                hi: as_f64(grid.hi()),
            });
        }
        let h = grid.h();
        let height = S::one() / (hi - lo);
        let values = (0..grid.cells())
            .map(|i| {
                let el = grid.edge(i);
                let er = grid.edge(i + 1);
                let overlap = (er.min(hi) - el.max(lo)).max(S::zero());
                overlap / h * height
            })
            .collect();
        Self::from_unnormalized(grid, values)
    }

    pub fn grid(&self) -> &Grid1D<S> {
        &self.grid
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn mass(&self) -> S {
        self.grid.h() * self.values.iter().copied().sum()
    }

    /// CDF at cell edges; `m + 1` entries, first 0, last the total mass.
    pub fn cdf_edges(&self) -> Vec<S> {
        let h = self.grid.h();
        let mut cum = Vec::with_capacity(self.values.len() + 1);
        let mut acc = S::zero();
        cum.push(acc);
        for v in &self.values {
            acc = acc + h * *v;
            cum.push(acc);
        }
        cum
    }

    /// Piecewise-linear CDF; clamped to the domain.
    pub fn cdf_at(&self, x: S) -> S {
        if x <= self.grid.lo() {
            return S::zero();
        }
        if x >= self.grid.hi() {
            return self.mass();
        }
        let i = self.grid.cell_of_clamped(x);
        let h = self.grid.h();
        let mut acc = S::zero();
        for v in &self.values[..i] {
            acc = acc + h * *v;
        }
        acc + self.values[i] * (x - self.grid.edge(i))
    }

    /// Quantile of the piecewise-linear CDF, normalized by total mass so that
    /// `quantile(1)` is the right end of the support. `u` is clamped to [0,1].
    pub fn quantile(&self, u: S) -> S {
        let cum = self.cdf_edges();
        quantile_from_edges(&self.grid, &self.values, &cum, u)
    }

    /// Quantiles at many levels, sharing one CDF pass.
    pub fn quantiles(&self, us: &[S]) -> Vec<S> {
        let cum = self.cdf_edges();
        us.iter()
            .map(|&u| quantile_from_edges(&self.grid, &self.values, &cum, u))
            .collect()
    }
}

pub(crate) fn quantile_from_edges<S: Scalar>(grid: &Grid1D<S>, values: &[S], cum: &[S], u: S) -> S {
    let mass = cum[cum.len() - 1];
    let target = u.max(S::zero()).min(S::one()) * mass;
    // First edge index with cum >= target.
    let k = cum.partition_point(|c| *c < target);
    if k == 0 {
        // target <= 0: left end of the support.
        let first = values.iter().position(|v| *v > S::zero()).unwrap_or(0);
        return grid.edge(first);
    }
    let i = k - 1;
    if i >= values.len() {
        return grid.hi();
    }
    if values[i] > S::zero() {
        grid.edge(i) + (target - cum[i]) / values[i]
    } else {
        grid.edge(i)
    }
}

/// Tangent vector to the space of densities: cell values integrating to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector1D<S: Scalar> {
    grid: Grid1D<S>,
    values: Vec<S>,
}

impl<S: Scalar> TangentVector1D<S> {
    /// Requires `|h * sum| <= 1e-8` (epsilon-widened for narrow scalars).
    pub fn new(grid: Grid1D<S>, values: Vec<S>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::InvalidInput {
                what: "tangent values",
                why: format!("expected {} cells, got {}", grid.cells(), values.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput {
                what: "tangent values",
                why: "non-finite entry".into(),
            });
        }
        let total = grid.h() * values.iter().copied().sum();
        let tol = precision_floor::<S>(1e-8, 64.0 * grid.cells() as f64);
        if total.abs() > tol {
            return Err(Error::InvalidInput {
                what: "tangent mass",
                why: format!("h * sum = {} but tangents must integrate to zero", total),
            });
        }
        Ok(TangentVector1D { grid, values })
    }

    pub fn grid(&self) -> &Grid1D<S> {
        &self.grid
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }
}
