//! Exact score functions read off grid densities.
//!
//! The score of a density is `d/dx log rho`, evaluated here by central
//! differences of the cell-value logarithms (one-sided at the two boundary
//! cells) and linear interpolation between cell centers. Cells where the
//! density sits below the floor `1e-12` have no usable logarithm; queries
//! that touch them fail rather than extrapolate, and so do queries outside
//! the grid.

use crate::error::{Error, Result};
use crate::measures::{Density1D, Grid1D};
use crate::scalar::{as_f64, cast, Scalar};

/// Densities below this value are treated as vacuum: their logarithm is
/// numerically meaningless at working precision.
const DENSITY_FLOOR: f64 = 1e-12;

/// Score of one density, tabulated at cell centers.
pub struct ExactScore<S: Scalar> {
    grid: Grid1D<S>,
    /// `d/dx log rho` at each center; NaN marks cells whose stencil dips
    /// below the density floor.
    values: Vec<S>,
}

/// Tabulates `d/dx log rho` at every cell center of `rho`'s grid.
pub fn exact_score<S: Scalar>(rho: &Density1D<S>) -> Result<ExactScore<S>> {
    let grid = *rho.grid();
    let m = grid.cells();
    if m < 2 {
        return Err(Error::InsufficientData { needed: 2, got: m });
    }
    let floor = cast::<S>(DENSITY_FLOOR);
    let v = rho.values();
    let logs: Vec<Option<S>> = v
        .iter()
        .map(|&p| if p >= floor { Some(p.ln()) } else { None })
        .collect();
    let h = grid.h();
    let two_h = h + h;
    let nan = S::nan();
    let values: Vec<S> = (0..m)
        .map(|i| {
            let stencil = if i == 0 {
                (logs[0], logs[1], h)
            } else if i == m - 1 {
                (logs[m - 2], logs[m - 1], h)
            } else {
                (logs[i - 1], logs[i + 1], two_h)
            };
            match (stencil.0, stencil.1, logs[i]) {
                (Some(lo), Some(hi), Some(_)) => (hi - lo) / stencil.2,
                _ => nan,
            }
        })
        .collect();
    Ok(ExactScore { grid, values })
}

impl<S: Scalar> ExactScore<S> {
    /// Score at `x`, linearly interpolated between cell centers (constant
    /// on the two boundary half-cells). Fails outside the grid and
    /// wherever the density floor left no usable logarithm.
    pub fn eval(&self, x: S) -> Result<S> {
        let grid = &self.grid;
        if !x.is_finite() || x < grid.lo() || x > grid.hi() {
            return Err(Error::OutOfDomain {
                value: as_f64(x),
                lo: as_f64(grid.lo()),
                hi: as_f64(grid.hi()),
            });
        }
        let m = self.values.len();
        let first = grid.center(0);
        let last = grid.center(m - 1);
        let s = if x <= first {
            self.values[0]
        } else if x >= last {
            self.values[m - 1]
        } else {
            let pos = (x - first) / grid.h();
            let i = pos.floor().to_usize().unwrap_or(0).min(m - 2);
            let frac = pos - cast::<S>(i as f64);
            self.values[i] + (self.values[i + 1] - self.values[i]) * frac
        };
        if !s.is_finite() {
            return Err(Error::LowDensity {
                position: as_f64(x),
                particle: None,
            });
        }
        Ok(s)
    }

    pub fn grid(&self) -> &Grid1D<S> {
        &self.grid
    }

    /// Tabulated center values; NaN where the floor blocked the stencil.
    pub fn values(&self) -> &[S] {
        &self.values
    }
}

/// Scores of a sequence of density snapshots, blended linearly in time.
pub struct ScoreTable<S: Scalar> {
    times: Vec<S>,
    scores: Vec<ExactScore<S>>,
}

impl<S: Scalar> ScoreTable<S> {
    /// Builds per-snapshot scores from `(time, density)` pairs. Times must
    /// be finite and strictly increasing; densities must share one grid.
    pub fn new(source: &[(S, Density1D<S>)]) -> Result<Self> {
        if source.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        for w in source.windows(2) {
            if w[0].1.grid() != w[1].1.grid() {
                return Err(Error::GridMismatch);
            }
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidInput {
                    what: "score table times",
                    why: format!("not strictly increasing at t = {}", w[1].0),
                });
            }
        }
        if source.iter().any(|(t, _)| !t.is_finite()) {
            return Err(Error::InvalidInput {
                what: "score table times",
                why: "non-finite entry".into(),
            });
        }
        let times = source.iter().map(|(t, _)| *t).collect();
        let scores = source
            .iter()
            .map(|(_, rho)| exact_score(rho))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScoreTable { times, scores })
    }

    /// First and last snapshot times.
    pub fn span(&self) -> (S, S) {
        (self.times[0], self.times[self.times.len() - 1])
    }

    /// Score at `(x, t)`: linear blend of the two snapshots bracketing `t`.
    /// Times outside the table's span use the nearest endpoint, which keeps
    /// end-of-horizon rounding harmless.
    pub fn eval(&self, x: S, t: S) -> Result<S> {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return self.scores[0].eval(x);
        }
        if t >= self.times[n - 1] {
            return self.scores[n - 1].eval(x);
        }
        let j = self.times.partition_point(|&u| u <= t).min(n - 1);
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        let w = (t - t0) / (t1 - t0);
        let a = self.scores[j - 1].eval(x)?;
        let b = self.scores[j].eval(x)?;
        Ok(a + (b - a) * w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian(mean: f64, sd: f64) -> Density1D<f64> {
        let grid = Grid1D::new(-8.0, 8.0, 1024).unwrap();
        Density1D::gaussian(grid, mean, sd).unwrap()
    }

    #[test]
    fn standard_normal_score_is_minus_x() {
        let score = exact_score(&gaussian(0.0, 1.0)).unwrap();
        let mut worst = 0.0f64;
        for k in 0..=320 {
            let x = -4.0 + 0.025 * k as f64;
            let s = score.eval(x).unwrap();
            worst = worst.max((s + x).abs());
        }
        assert!(worst <= 1e-3, "max |score(x) + x| = {worst}");
    }

    #[test]
    fn uniform_density_has_zero_score() {
        let grid = Grid1D::new(0.0, 1.0, 64).unwrap();
        let rho = Density1D::uniform(grid, 0.0, 1.0).unwrap();
        let score = exact_score(&rho).unwrap();
        for k in 1..20 {
            let s = score.eval(0.05 * k as f64).unwrap();
            assert!(s.abs() < 1e-12, "score {s} at interior point");
        }
    }

    #[test]
    fn score_vanishes_at_the_mode() {
        let score = exact_score(&gaussian(2.0, 2.0)).unwrap();
        let s = score.eval(2.0).unwrap();
        assert!(s.abs() < 1e-9, "score at the mode: {s}");
    }

    #[test]
    fn deep_tail_query_reports_low_density() {
        let score = exact_score(&gaussian(0.0, 1.0)).unwrap();
        // exp(-7.9^2 / 2) is far below the 1e-12 floor
        assert!(matches!(
            score.eval(7.9),
            Err(Error::LowDensity {
                particle: None,
                ..
            })
        ));
    }

    #[test]
    fn queries_outside_the_grid_are_rejected() {
        let score = exact_score(&gaussian(0.0, 1.0)).unwrap();
        assert!(matches!(
            score.eval(9.0),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn table_blends_scores_linearly_in_time() {
        let table = ScoreTable::new(&[(0.0, gaussian(0.0, 1.0)), (1.0, gaussian(0.0, 2.0))]).unwrap();
        // scores at x = 1: -1 and -1/4; halfway blend is -5/8
        let s = table.eval(1.0, 0.5).unwrap();
        assert_relative_eq!(s, -0.625, epsilon = 1e-3);
        // endpoint clamping
        let e = table.eval(1.0, 2.0).unwrap();
        assert_relative_eq!(e, -0.25, epsilon = 1e-3);
    }

    #[test]
    fn table_rejects_disordered_times_and_mixed_grids() {
        let a = gaussian(0.0, 1.0);
        let b = gaussian(0.0, 2.0);
        assert!(matches!(
            ScoreTable::new(&[(1.0, a.clone()), (0.5, b.clone())]),
            Err(Error::InvalidInput { .. })
        ));
        let other_grid = Grid1D::new(-4.0, 4.0, 256).unwrap();
        let c = Density1D::gaussian(other_grid, 0.0, 1.0).unwrap();
        assert!(matches!(
            ScoreTable::new(&[(0.0, a), (1.0, c)]),
            Err(Error::GridMismatch)
        ));
        assert!(matches!(
            ScoreTable::<f64>::new(&[]),
            Err(Error::InsufficientData { .. })
        ));
    }
}
