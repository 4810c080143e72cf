//! Probability measures on uniform 1-D grids, in both representations used
//! throughout the crate: grid densities (cell averages, midpoint-rule
//! integrals) and particle ensembles. Conversions between the two live here
//! as free functions, together with the pushforward of a density under a
//! monotone map, which Eulerian solvers and transport routines share.

mod density;
mod ensemble;
mod grid;
mod map;
mod potential;
mod schedule;
mod velocity;

pub use density::{Density1D, TangentVector1D};
pub use ensemble::ParticleEnsemble;
pub use grid::Grid1D;
pub use map::TransportMap1D;
pub use potential::PotentialSpec;
pub use schedule::{DiffusionSchedule, Pattern};
pub use velocity::VelocityField1D;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::{cast, Scalar};

/// RNG stream reserved for inverse-CDF sampling, disjoint from the
/// per-step streams used by the particle simulators.
const SAMPLE_STREAM: u64 = u64::MAX;

/// Midpoint-rule mean and variance of a grid density.
pub fn density_moments<S: Scalar>(rho: &Density1D<S>) -> (S, S) {
    let grid = rho.grid();
    let mut mass = S::zero();
    let mut mean = S::zero();
    for (i, &v) in rho.values().iter().enumerate() {
        mass = mass + v;
        mean = mean + grid.center(i) * v;
    }
    mean = mean / mass;
    let mut var = S::zero();
    for (i, &v) in rho.values().iter().enumerate() {
        let d = grid.center(i) - mean;
        var = var + d * d * v;
    }
    (mean, var / mass)
}

/// Histogram density: cell counts divided by `N·h`.
pub fn build_density_from_samples<S: Scalar>(
    ensemble: &ParticleEnsemble<S>,
    grid: Grid1D<S>,
) -> Result<Density1D<S>> {
    let n = ensemble.len();
    let mut counts = vec![0u64; grid.cells()];
    for &x in ensemble.positions() {
        counts[grid.cell_of(x)?] += 1;
    }
    let scale = S::one() / (cast::<S>(n as f64) * grid.h());
    let values = counts
        .iter()
        .map(|&c| cast::<S>(c as f64) * scale)
        .collect();
    Density1D::new(grid, values)
}

/// Inverse-CDF sampling with one counter-RNG stream per draw: deterministic
/// for a fixed seed and independent of evaluation order, so the draw loop
/// parallelizes safely.
pub fn sample_from_density<S: Scalar>(
    rho: &Density1D<S>,
    n: usize,
    seed: u64,
) -> Result<ParticleEnsemble<S>> {
    if n == 0 {
        return Err(Error::InvalidInput {
            what: "sample count",
            why: "need at least one draw".into(),
        });
    }
    let cum = rho.cdf_edges();
    let positions: Vec<S> = (0..n)
        .into_par_iter()
        .map(|i| {
            let u = rng::uniform(seed, SAMPLE_STREAM, i as u64);
            density::quantile_from_edges(rho.grid(), rho.values(), &cum, u)
        })
        .collect();
    ParticleEnsemble::new(positions, S::zero())
}

/// Kolmogorov-Smirnov distance between an ensemble's empirical CDF and a
/// grid density's piecewise-linear CDF.
pub fn ks_distance<S: Scalar>(ensemble: &ParticleEnsemble<S>, rho: &Density1D<S>) -> S {
    let mut xs: Vec<S> = ensemble.positions().to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).expect("ensemble positions are finite"));
    let grid = rho.grid();
    let cum = rho.cdf_edges();
    let n = cast::<S>(xs.len() as f64);
    let mut sup = S::zero();
    for (i, &x) in xs.iter().enumerate() {
        let f = if x <= grid.lo() {
            S::zero()
        } else if x >= grid.hi() {
            cum[cum.len() - 1]
        } else {
            let k = grid.cell_of_clamped(x);
            cum[k] + rho.values()[k] * (x - grid.edge(k))
        };
        let below = cast::<S>(i as f64) / n;
        let above = cast::<S>((i + 1) as f64) / n;
        sup = sup.max((f - below).abs()).max((above - f).abs());
    }
    sup
}

/// Pushforward of a grid density under a nondecreasing map, computed by
/// composing the cumulative function with the rightmost preimage of each
/// cell edge. Mass carried past either end of the grid is lumped into the
/// boundary cells, so the result is always a valid density on `mu`'s grid.
pub fn pushforward_density<S: Scalar>(
    mu: &Density1D<S>,
    map: &TransportMap1D<S>,
) -> Result<Density1D<S>> {
    let grid = *mu.grid();
    let m = grid.cells();
    let cum = mu.cdf_edges();
    let mut cdf_new = Vec::with_capacity(m + 1);
    cdf_new.push(S::zero());
    for k in 1..m {
        let x = rightmost_preimage(map, grid.edge(k));
        let x = x.max(grid.lo()).min(grid.hi());
        cdf_new.push(if x <= grid.lo() {
            S::zero()
        } else if x >= grid.hi() {
            cum[m]
        } else {
            let i = grid.cell_of_clamped(x);
            cum[i] + mu.values()[i] * (x - grid.edge(i))
        });
    }
    cdf_new.push(S::one());
    let h = grid.h();
    let values = (0..m)
        .map(|k| ((cdf_new[k + 1] - cdf_new[k]).max(S::zero())) / h)
        .collect();
    Density1D::new(grid, values)
}

/// Largest `x` with `map(x) <= y`, using the map's linear end extensions.
/// Returns -inf / +inf surrogates (grid ends are clamped by the caller)
/// when the preimage is empty or unbounded.
fn rightmost_preimage<S: Scalar>(map: &TransportMap1D<S>, y: S) -> S {
    let values = map.values();
    let m = values.len();
    let grid = map.grid();
    let h = grid.h();
    let first = grid.center(0);
    let last = grid.center(m - 1);
    if y < values[0] {
        let slope = (values[1] - values[0]) / h;
        if slope <= S::zero() {
            return S::neg_infinity().max(cast(-1e300));
        }
        return first + (y - values[0]) / slope;
    }
    if y >= values[m - 1] {
        let slope = (values[m - 1] - values[m - 2]) / h;
        if slope <= S::zero() {
            return S::infinity().min(cast(1e300));
        }
        return last + (y - values[m - 1]) / slope;
    }
    // first index whose value exceeds y; the previous index is the rightmost
    // sample with value <= y, and y sits strictly inside that segment
    let j = values.partition_point(|v| *v <= y);
    let lo = values[j - 1];
    let hi = values[j];
    grid.center(j - 1) + h * (y - lo) / (hi - lo)
}

/// L1 distance between two densities on the same grid.
pub fn l1_distance<S: Scalar>(p: &Density1D<S>, q: &Density1D<S>) -> Result<S> {
    if p.grid() != q.grid() {
        return Err(Error::GridMismatch);
    }
    let h = p.grid().h();
    let sum = p
        .values()
        .iter()
        .zip(q.values())
        .map(|(&a, &b)| (a - b).abs())
        .fold(S::zero(), |acc, d| acc + d);
    Ok(sum * h)
}

/// Convenience used by diagnostics: the largest |p - q| over cells.
pub fn linf_distance<S: Scalar>(p: &Density1D<S>, q: &Density1D<S>) -> Result<S> {
    if p.grid() != q.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(p.values()
        .iter()
        .zip(q.values())
        .map(|(&a, &b)| (a - b).abs())
        .fold(S::zero(), |acc, d| acc.max(d)))
}

pub(crate) fn check_same_grid<S: Scalar>(p: &Density1D<S>, q: &Density1D<S>) -> Result<()> {
    if p.grid() != q.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}
