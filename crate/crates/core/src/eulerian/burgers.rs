//! Pressureless flow: the inviscid Burgers equation
//! `dv/dt + v dv/dx = 0` solved by the method of characteristics, and
//! finite-time shock detection.
//!
//! A characteristic launched from y carries the constant velocity v0(y)
//! along x(t) = y + t v0(y). Before any two characteristics cross, the
//! launch map is strictly increasing and v(x, t) = v0(y(x, t)) with y the
//! unique preimage. Crossing first happens at 1/max(-v0'), after which the
//! field is multivalued and these routines refuse to evaluate it.

use crate::error::{Error, Result};
use crate::measures::{Grid1D, VelocityField1D};
use crate::scalar::{as_f64, cast, Scalar};

use super::trajectory::ShockReport;

/// `1 / max(-v0')` from finite differences over adjacent cell centers;
/// infinite when the sampled field is nondecreasing.
pub(crate) fn predicted_shock_time<S: Scalar>(v0: &VelocityField1D<S>, grid: &Grid1D<S>) -> S {
    let h = grid.h();
    let mut steepest = S::zero();
    let mut prev = v0.eval(grid.center(0), S::zero());
    for i in 1..grid.cells() {
        let next = v0.eval(grid.center(i), S::zero());
        steepest = steepest.max((prev - next) / h);
        prev = next;
    }
    if steepest > S::zero() {
        S::one() / steepest
    } else {
        S::infinity()
    }
}

/// Solves `y + t f(y) = x` for the characteristic launch point by bracket
/// expansion and bisection (position tolerance 1e-12). Total by
/// construction: callers guard `t` against the shock time, where the launch
/// map stops being invertible.
pub(crate) fn characteristic_preimage<S: Scalar>(f: impl Fn(S) -> S, t: S, x: S, pad: S) -> S {
    let zeta = |y: S| y + t * f(y) - x;
    let mut lo = x - pad;
    let mut hi = x + pad;
    let mut width = pad + pad;
    for _ in 0..128 {
        if zeta(lo) <= S::zero() {
            break;
        }
        lo = lo - width;
        width = width + width;
    }
    width = pad + pad;
    for _ in 0..128 {
        if zeta(hi) >= S::zero() {
            break;
        }
        hi = hi + width;
        width = width + width;
    }
    let tol = cast::<S>(1e-12);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) / (S::one() + S::one());
        if zeta(mid) < S::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / (S::one() + S::one())
}

/// Velocity at time `t_query` on the grid centers, by inverting the
/// characteristic launch map. Fails once `t_query` reaches the predicted
/// crossing time, where preimages stop being unique.
pub fn burgers_evolve<S: Scalar>(
    v0: &VelocityField1D<S>,
    t_query: S,
    grid: &Grid1D<S>,
) -> Result<Vec<S>> {
    if !(t_query.is_finite() && t_query >= S::zero()) {
        return Err(Error::InvalidInput {
            what: "query time",
            why: format!("need finite t >= 0, got {t_query}"),
        });
    }
    let predicted = predicted_shock_time(v0, grid);
    if t_query >= predicted {
        return Err(Error::ShockEncountered {
            time: as_f64(predicted),
        });
    }
    let f = |y: S| v0.eval(y, S::zero());
    if t_query == S::zero() {
        return Ok(grid.centers().iter().map(|&x| f(x)).collect());
    }
    let mut v_max = S::zero();
    for i in 0..grid.cells() {
        v_max = v_max.max(f(grid.center(i)).abs());
    }
    let pad = t_query * v_max + S::one();
    Ok(grid
        .centers()
        .iter()
        .map(|&x| f(characteristic_preimage(f, t_query, x, pad)))
        .collect())
}

/// Scans for the first crossing of adjacent characteristics on 1024 time
/// samples in `[0, t_max]` and compares with the analytic prediction.
pub fn shock_time<S: Scalar>(
    v0: &VelocityField1D<S>,
    grid: &Grid1D<S>,
    t_max: S,
) -> Result<ShockReport<S>> {
    if !(t_max.is_finite() && t_max > S::zero()) {
        return Err(Error::InvalidInput {
            what: "scan horizon",
            why: format!("need finite t_max > 0, got {t_max}"),
        });
    }
    let predicted = predicted_shock_time(v0, grid);
    let m = grid.cells();
    let launch: Vec<S> = grid
        .centers()
        .iter()
        .map(|&x| v0.eval(x, S::zero()))
        .collect();
    let samples = 1024usize;
    let mut prev_t = S::zero();
    for j in 1..=samples {
        let t = t_max * cast::<S>(j as f64 / samples as f64);
        for i in 0..m - 1 {
            let left = grid.center(i) + t * launch[i];
            let right = grid.center(i + 1) + t * launch[i + 1];
            if right <= left {
                let two = S::one() + S::one();
                return Ok(ShockReport {
                    shock_detected: true,
                    shock_time: Some((prev_t + t) / two),
                    crossing_pair: Some((grid.center(i), grid.center(i + 1))),
                    predicted_time: predicted,
                });
            }
        }
        prev_t = t;
    }
    Ok(ShockReport {
        shock_detected: false,
        shock_time: None,
        crossing_pair: None,
        predicted_time: predicted,
    })
}
