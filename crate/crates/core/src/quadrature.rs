//! Cell averages of the Boltzmann factor exp(-Psi/D).
//!
//! Shared by the stationary-state constructor and the grid solver's fitted
//! edge fluxes, which must agree on these averages to the last bit: the
//! solver's discrete stationary state is exactly the density proportional
//! to them, so any daylight between the two computations would show up as
//! spurious drift in stationarity checks.

use crate::measures::{Grid1D, PotentialSpec};
use crate::scalar::{cast, Scalar};

// 5-point Gauss-Legendre rule on [-1, 1]; machine-accurate cell averages
// for smooth potentials at laboratory grid spacings.
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Log of the per-cell average of exp(-Psi/d), in log-sum-exp form so steep
/// potentials neither overflow nor underflow. Entries can be -inf where the
/// potential is effectively infinite across a cell. Caller guarantees d > 0.
pub(crate) fn boltzmann_log_means<S: Scalar>(
    pot: &PotentialSpec<S>,
    grid: &Grid1D<S>,
    d: S,
) -> Vec<S> {
    let two = S::one() + S::one();
    let half_h = grid.h() / two;
    (0..grid.cells())
        .map(|i| {
            let c = grid.center(i);
            let mut a = [S::zero(); 5];
            for (j, slot) in a.iter_mut().enumerate() {
                *slot = -pot.psi(c + cast::<S>(GL_NODES[j]) * half_h) / d;
            }
            let peak = a.iter().fold(S::neg_infinity(), |p, &q| p.max(q));
            if !peak.is_finite() {
                return peak;
            }
            let mut s = S::zero();
            for (j, &aj) in a.iter().enumerate() {
                s = s + cast::<S>(GL_WEIGHTS[j] / 2.0) * (aj - peak).exp();
            }
            peak + s.ln()
        })
        .collect()
}
