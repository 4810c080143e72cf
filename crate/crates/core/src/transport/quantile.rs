//! Monotone rearrangement, Wasserstein distance, displacement
//! interpolation.

use crate::error::{Error, Result};
use crate::measures::{pushforward_density, Density1D, TransportMap1D};
use crate::scalar::{cast, Scalar};

/// Number of quantile knots in distance quadratures.
const QUANTILE_KNOTS: usize = 4096;

/// Fraction of total mass allowed in a single cell before the target
/// counts as a point mass, whose quantile function cannot be inverted
/// stably.
const POINT_MASS_FRACTION: f64 = 0.999;

/// The optimal (monotone) transport map `T = Q_nu (F_mu)` from `mu` to
/// `nu`, tabulated on `mu`'s grid. Both inputs keep their own grids.
pub fn quantile_map<S: Scalar>(
    mu: &Density1D<S>,
    nu: &Density1D<S>,
) -> Result<TransportMap1D<S>> {
    let frac = cast::<S>(POINT_MASS_FRACTION);
    let peak = nu
        .values()
        .iter()
        .fold(S::zero(), |p, &v| p.max(v))
        * nu.grid().h();
    if peak >= frac {
        return Err(Error::DegenerateTarget);
    }
    let grid = *mu.grid();
    let values: Vec<S> = (0..grid.cells())
        .map(|i| nu.quantile(mu.cdf_at(grid.center(i))))
        .collect();
    TransportMap1D::from_values(grid, values)
}

/// Quadratic Wasserstein distance
///
/// ```text
///     W2(mu, nu)^2 = Integral_0^1 (Q_mu(u) - Q_nu(u))^2 du
/// ```
///
/// by the midpoint rule on 4096 quantile knots. The inputs may live on
/// different grids.
pub fn w2_distance<S: Scalar>(mu: &Density1D<S>, nu: &Density1D<S>) -> S {
    let n = QUANTILE_KNOTS;
    let us: Vec<S> = (0..n)
        .map(|j| cast::<S>((j as f64 + 0.5) / n as f64))
        .collect();
    let qm = mu.quantiles(&us);
    let qn = nu.quantiles(&us);
    let sum = qm
        .iter()
        .zip(&qn)
        .map(|(&a, &b)| (a - b) * (a - b))
        .fold(S::zero(), |acc, d| acc + d);
    (sum / cast::<S>(n as f64)).sqrt()
}

/// The Wasserstein geodesic at parameter `t`: the pushforward of `mu`
/// under `(1 - t) id + t T` with `T` the optimal map to `nu`.
pub fn displacement_interpolation<S: Scalar>(
    mu: &Density1D<S>,
    nu: &Density1D<S>,
    t: S,
) -> Result<Density1D<S>> {
    if !(t >= S::zero() && t <= S::one()) {
        return Err(Error::InvalidInput {
            what: "interpolation parameter",
            why: format!("t = {t} is outside [0, 1]"),
        });
    }
    let map = quantile_map(mu, nu)?;
    let grid = map.grid();
    let one_minus = S::one() - t;
    let values: Vec<S> = map
        .values()
        .iter()
        .enumerate()
        .map(|(i, &ti)| one_minus * grid.center(i) + t * ti)
        .collect();
    let interp = TransportMap1D::from_values(grid, values)?;
    pushforward_density(mu, &interp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{density_moments, l1_distance, Grid1D};
    use approx::assert_relative_eq;

    fn grid() -> Grid1D<f64> {
        Grid1D::new(-9.0, 15.0, 1024).unwrap()
    }

    #[test]
    fn self_transport_is_the_identity() {
        let g: Grid1D<f64> = Grid1D::new(-8.0, 8.0, 1024).unwrap();
        let rho = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let map = quantile_map(&rho, &rho).unwrap();
        let mut worst = 0.0f64;
        for (i, &t) in map.values().iter().enumerate() {
            // far tails carry no resolvable mass; compare where the CDF moves
            let x = g.center(i);
            if x.abs() <= 6.0 {
                worst = worst.max((t - x).abs());
            }
        }
        assert!(worst <= g.h(), "identity deviation {worst} > h");
    }

    #[test]
    fn uniform_doubling_map_is_two_x() {
        let g: Grid1D<f64> = Grid1D::new(-0.5, 2.5, 1024).unwrap();
        let mu = Density1D::uniform(g, 0.0, 1.0).unwrap();
        let nu = Density1D::uniform(g, 0.0, 2.0).unwrap();
        let map = quantile_map(&mu, &nu).unwrap();
        for (i, &t) in map.values().iter().enumerate() {
            let x = g.center(i);
            if (0.05..=0.95).contains(&x) {
                assert!((t - 2.0 * x).abs() <= 1e-3, "T({x}) = {t}");
            }
        }
    }

    #[test]
    fn gaussian_map_is_affine() {
        let g = grid();
        let mu = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let nu = Density1D::gaussian(g, 3.0, 2.0).unwrap();
        let map = quantile_map(&mu, &nu).unwrap();
        for (i, &t) in map.values().iter().enumerate() {
            let x = g.center(i);
            if (-3.0..=3.0).contains(&x) {
                assert!((t - (3.0 + 2.0 * x)).abs() <= 1e-2, "T({x}) = {t}");
            }
        }
    }

    #[test]
    fn map_pushes_the_source_onto_the_target() {
        let g = grid();
        let mu = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let nu = Density1D::gaussian(g, 3.0, 2.0).unwrap();
        let map = quantile_map(&mu, &nu).unwrap();
        let pushed = pushforward_density(&mu, &map).unwrap();
        let l1 = l1_distance(&pushed, &nu).unwrap();
        assert!(l1 <= 2e-2, "pushforward L1 {l1}");
    }

    #[test]
    fn point_mass_target_is_rejected() {
        let g = Grid1D::new(0.0, 1.0, 64).unwrap();
        let mu = Density1D::uniform(g, 0.0, 1.0).unwrap();
        let mut spike = vec![0.0; 64];
        spike[32] = 1.0;
        let nu = Density1D::from_unnormalized(g, spike).unwrap();
        assert!(matches!(
            quantile_map(&mu, &nu),
            Err(Error::DegenerateTarget)
        ));
    }

    #[test]
    fn w2_metric_values_match_closed_forms() {
        let g = grid();
        let a = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let b = Density1D::gaussian(g, 3.0, 2.0).unwrap();
        // identical inputs
        assert!(w2_distance(&a, &a) <= 1e-8);
        // Gaussian pair: sqrt((m1-m2)^2 + (s1-s2)^2)
        assert_relative_eq!(w2_distance(&a, &b), 10.0f64.sqrt(), epsilon = 1e-3);
        assert_relative_eq!(w2_distance(&b, &a), 10.0f64.sqrt(), epsilon = 1e-3);
        // pure translation of a uniform block whose edges sit on cell
        // edges (h = 3/128 divides 1.5 and 2.25): exact to rounding
        let u1 = Density1D::uniform(g, 0.0, 1.5).unwrap();
        let u2 = Density1D::uniform(g, 2.25, 3.75).unwrap();
        assert_relative_eq!(w2_distance(&u1, &u2), 2.25, epsilon = 1e-12);
        // unaligned block edges smear over one partial cell each, an O(h)
        // effect on the quantiles; the distance must stay first-order close
        let v1 = Density1D::uniform(g, 0.0, 1.0).unwrap();
        let v2 = Density1D::uniform(g, 2.0, 3.0).unwrap();
        assert_relative_eq!(w2_distance(&v1, &v2), 2.0, epsilon = 5e-4);
    }

    #[test]
    fn interpolation_hits_both_endpoints() {
        let g = grid();
        let mu = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let nu = Density1D::gaussian(g, 4.0, 1.0).unwrap();
        let at0 = displacement_interpolation(&mu, &nu, 0.0).unwrap();
        let at1 = displacement_interpolation(&mu, &nu, 1.0).unwrap();
        assert!(l1_distance(&at0, &mu).unwrap() <= 2e-2);
        assert!(l1_distance(&at1, &nu).unwrap() <= 2e-2);
    }

    #[test]
    fn gaussian_midpoint_is_the_mean_shifted_gaussian() {
        let g = grid();
        let mu = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let nu = Density1D::gaussian(g, 4.0, 1.0).unwrap();
        let mid = displacement_interpolation(&mu, &nu, 0.5).unwrap();
        let expect = Density1D::gaussian(g, 2.0, 1.0).unwrap();
        let l1 = l1_distance(&mid, &expect).unwrap();
        assert!(l1 <= 1e-2, "midpoint L1 {l1}");
    }

    #[test]
    fn uniform_interpolation_translates_the_block() {
        let g = Grid1D::new(-1.0, 4.0, 1024).unwrap();
        let mu = Density1D::uniform(g, 0.0, 1.0).unwrap();
        let nu = Density1D::uniform(g, 2.0, 3.0).unwrap();
        let quarter = displacement_interpolation(&mu, &nu, 0.25).unwrap();
        let expect = Density1D::uniform(g, 0.5, 1.5).unwrap();
        let l1 = l1_distance(&quarter, &expect).unwrap();
        assert!(l1 <= 2e-2, "quarter-way L1 {l1}");
        let (mean, _) = density_moments(&quarter);
        assert_relative_eq!(mean, 1.0, epsilon = 1e-2);
    }

    #[test]
    fn parameter_outside_unit_interval_is_rejected() {
        let g = Grid1D::new(-8.0, 8.0, 128).unwrap();
        let rho = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        assert!(displacement_interpolation(&rho, &rho, 1.5).is_err());
        assert!(displacement_interpolation(&rho, &rho, -0.1).is_err());
    }
}
