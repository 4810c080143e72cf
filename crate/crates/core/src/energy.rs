//! The free-energy functional and its Wasserstein geometry.
//!
//! The central object is
//!
//! ```text
//!     E(rho) = D * Integral rho log rho dx + Integral rho Psi dx
//! ```
//!
//! together with the scalar product that makes the Fokker-Planck equation a
//! gradient flow: two tangent vectors s1, s2 at rho (grid functions summing
//! to zero) are paired by solving s_i = (rho phi_i')' for the flux rho phi_i'
//! and integrating flux1 * flux2 / rho. In one dimension the elliptic solve
//! collapses to a cumulative sum with zero-flux ends, which makes the
//! discrete pairing exactly adjoint to the flux-form divergence used by both
//! [`wasserstein_gradient`] and the Fokker-Planck solver.
//!
//! Two independent verifications of the gradient-flow structure live here:
//! [`dissipation_residual`] checks dE/dt = -||d rho/dt||^2_rho along solver
//! output, and [`jko_step`] advances a density by one minimizing-movement
//! step argmin E(rho) + W2(rho, rho_prev)^2 / (2 tau) without ever touching
//! the PDE solver.
//!
//! Sign conventions: with rho_inf = e^{-Psi/D} / Z, direct substitution gives
//! E(rho) = D * KL(rho || rho_inf) - D * log Z, so E - D*KL is the constant
//! -D log Z. The identity is sometimes quoted with the opposite sign on the
//! log Z term; everything here (and the tests) pins the substitution form.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{
    check_same_grid, pushforward_density, Density1D, Grid1D, PotentialSpec, TangentVector1D,
    TransportMap1D,
};
use crate::scalar::{as_f64, cast, precision_floor, Scalar};

/// Density floor below which a cell edge counts as degenerate in the
/// Wasserstein scalar product.
const EDGE_FLOOR: f64 = 1e-12;

/// Fraction of the result that degenerate edges may contribute before the
/// scalar product refuses to answer.
const THIN_BUDGET: f64 = 1e-6;

/// Number of quantile segments in the JKO map parameterization. The two
/// end segments carry `1/JKO_KNOTS` of mass each across the whole tail,
/// where a single log-linear piece misplaces it; that bias caps the
/// accuracy of a step at roughly `1/JKO_KNOTS`, so the count is sized to
/// keep it below the time-discretization error at practical step sizes.
const JKO_KNOTS: usize = 4096;

const JKO_MAX_ITER: usize = 500;

/// Value of `E` split into its parts; `total` is exactly
/// `diffusivity * entropy_term + potential_term` as computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown<S: Scalar> {
    /// `Integral rho log rho` (not multiplied by D).
    pub entropy_term: S,
    /// `Integral rho Psi`.
    pub potential_term: S,
    /// `D * entropy_term + potential_term`.
    pub total: S,
    /// The diffusivity the total was taken at.
    pub diffusivity: S,
}

/// `h * sum p_i log p_i` with the convention `0 log 0 = 0`.
pub fn entropy_term<S: Scalar>(rho: &Density1D<S>) -> S {
    let mut acc = S::zero();
    for &p in rho.values() {
        if p > S::zero() {
            acc = acc + p * p.ln();
        }
    }
    acc * rho.grid().h()
}

/// Free energy `D * Integral rho log rho + Integral rho Psi`, midpoint rule.
pub fn free_energy<S: Scalar>(
    rho: &Density1D<S>,
    diffusivity: S,
    pot: &PotentialSpec<S>,
) -> Result<EnergyBreakdown<S>> {
    if !(diffusivity.is_finite() && diffusivity >= S::zero()) {
        return Err(Error::InvalidInput {
            what: "diffusivity",
            why: format!("need finite D >= 0, got {diffusivity}"),
        });
    }
    let grid = rho.grid();
    let entropy = entropy_term(rho);
    let mut pot_acc = S::zero();
    for (i, &p) in rho.values().iter().enumerate() {
        pot_acc = pot_acc + p * pot.psi(grid.center(i));
    }
    let potential = pot_acc * grid.h();
    Ok(EnergyBreakdown {
        entropy_term: entropy,
        potential_term: potential,
        total: diffusivity * entropy + potential,
        diffusivity,
    })
}

/// Partition integral `Z = Integral e^{-Psi/D}` by midpoint quadrature over
/// the grid.
pub fn partition_constant<S: Scalar>(
    pot: &PotentialSpec<S>,
    diffusivity: S,
    grid: &Grid1D<S>,
) -> Result<S> {
    if !(diffusivity.is_finite() && diffusivity > S::zero()) {
        return Err(Error::InvalidInput {
            what: "diffusivity",
            why: format!("need finite D > 0, got {diffusivity}"),
        });
    }
    let mut z = S::zero();
    for i in 0..grid.cells() {
        let w = (-pot.psi(grid.center(i)) / diffusivity).exp();
        if !w.is_finite() {
            return Err(Error::NormalizationFailure);
        }
        z = z + w;
    }
    z = z * grid.h();
    if !(z.is_finite() && z > S::zero()) {
        return Err(Error::NormalizationFailure);
    }
    Ok(z)
}

/// Boltzmann density `rho_inf = e^{-Psi/D} / Z` on the grid.
///
/// Each cell value is the cell average of `e^{-Psi/D}` (Gauss-Legendre
/// quadrature), not the midpoint sample. The grid solver's discrete
/// stationary state is exactly this averaged profile, so initializing a run
/// from `stationary_density` keeps it fixed to rounding instead of letting
/// it creep by the O(h^2) midpoint-vs-average offset.
pub fn stationary_density<S: Scalar>(
    pot: &PotentialSpec<S>,
    diffusivity: S,
    grid: &Grid1D<S>,
) -> Result<Density1D<S>> {
    // run the quadrature first so a non-normalizable potential reports
    // NormalizationFailure rather than a generic construction error
    partition_constant(pot, diffusivity, grid)?;
    let logs = crate::quadrature::boltzmann_log_means(pot, grid, diffusivity);
    let peak = logs
        .iter()
        .fold(S::neg_infinity(), |p, &q| if q > p { q } else { p });
    if !peak.is_finite() {
        return Err(Error::NormalizationFailure);
    }
    let values: Vec<S> = logs.iter().map(|&l| (l - peak).exp()).collect();
    Density1D::from_unnormalized(*grid, values)
}

/// `KL(rho || sigma) = h * sum p_i log(p_i / q_i)`; requires the reference to
/// carry mass wherever `rho` does.
pub fn kl_divergence<S: Scalar>(rho: &Density1D<S>, sigma: &Density1D<S>) -> Result<S> {
    check_same_grid(rho, sigma)?;
    let grid = rho.grid();
    let floor = cast::<S>(1e-300).max(S::min_positive_value());
    let mut acc = S::zero();
    for (i, (&p, &q)) in rho.values().iter().zip(sigma.values()).enumerate() {
        if p > S::zero() {
            if q < floor {
                return Err(Error::SupportMismatch {
                    position: as_f64(grid.center(i)),
                });
            }
            acc = acc + p * (p.ln() - q.ln());
        }
    }
    Ok(acc * grid.h())
}

/// Cumulative fluxes `F(k) = h * sum_{j<k} s_j` at the `m+1` cell edges.
/// Zero at both ends for a zero-sum tangent (up to rounding).
fn edge_fluxes<S: Scalar>(s: &TangentVector1D<S>) -> Vec<S> {
    let h = s.grid().h();
    let mut fluxes = Vec::with_capacity(s.values().len() + 1);
    let mut acc = S::zero();
    fluxes.push(acc);
    for &v in s.values() {
        acc = acc + h * v;
        fluxes.push(acc);
    }
    fluxes
}

/// Wasserstein scalar product of two tangent vectors at `rho`:
/// `h * sum_k F1(k) F2(k) / rho_edge(k)` over interior edges, with
/// `rho_edge` the two-cell average. Edges where `rho_edge` sits below the
/// 1e-12 floor may only contribute immaterially (under 1e-6 of the result);
/// a tangent that pushes real flux through near-vacuum is rejected.
pub fn wasserstein_scalar_product<S: Scalar>(
    s1: &TangentVector1D<S>,
    s2: &TangentVector1D<S>,
    rho: &Density1D<S>,
) -> Result<S> {
    if s1.grid() != rho.grid() || s2.grid() != rho.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = rho.grid();
    let h = grid.h();
    let half = S::one() / (S::one() + S::one());
    let floor = precision_floor::<S>(EDGE_FLOOR, 1.0);
    let f1 = edge_fluxes(s1);
    let f2 = edge_fluxes(s2);
    let values = rho.values();
    let mut main = S::zero();
    let mut thin = S::zero();
    let mut worst_thin = S::zero();
    let mut worst_edge = 0usize;
    for k in 1..grid.cells() {
        let re = (values[k - 1] + values[k]) * half;
        let num = f1[k] * f2[k];
        if re >= floor {
            main = main + num / re;
        } else if num != S::zero() {
            if re <= S::zero() {
                return Err(Error::DegenerateDensity {
                    position: as_f64(grid.edge(k)),
                });
            }
            let c = num / re;
            thin = thin + c;
            if c.abs() > worst_thin.abs() {
                worst_thin = c;
                worst_edge = k;
            }
        }
    }
    let main = main * h;
    let thin = thin * h;
    let budget = cast::<S>(THIN_BUDGET) * S::one().max(main.abs());
    if thin.abs() > budget {
        return Err(Error::DegenerateDensity {
            position: as_f64(grid.edge(worst_edge)),
        });
    }
    Ok(main + thin)
}

/// Squared Wasserstein norm of a tangent vector at `rho`. This is the
/// squared quantity `Integral rho |v|^2`, exposed squared throughout.
pub fn tangent_norm_sq<S: Scalar>(s: &TangentVector1D<S>, rho: &Density1D<S>) -> Result<S> {
    wasserstein_scalar_product(s, s, rho)
}

/// Wasserstein gradient of `E` at `rho`: `-(D rho' + rho Psi')'` in
/// conservative flux form with zero-flux ends, so the result sums to zero
/// exactly up to rounding and is a valid tangent vector.
pub fn wasserstein_gradient<S: Scalar>(
    rho: &Density1D<S>,
    diffusivity: S,
    pot: &PotentialSpec<S>,
) -> Result<TangentVector1D<S>> {
    if !(diffusivity.is_finite() && diffusivity >= S::zero()) {
        return Err(Error::InvalidInput {
            what: "diffusivity",
            why: format!("need finite D >= 0, got {diffusivity}"),
        });
    }
    let grid = rho.grid();
    let h = grid.h();
    let half = S::one() / (S::one() + S::one());
    let values = rho.values();
    let m = grid.cells();
    // interior edge fluxes D rho' + rho Psi'; zero at the domain ends
    let mut flux = vec![S::zero(); m + 1];
    for k in 1..m {
        let grad_rho = (values[k] - values[k - 1]) / h;
        let rho_edge = (values[k] + values[k - 1]) * half;
        flux[k] = diffusivity * grad_rho + rho_edge * pot.grad(grid.edge(k));
    }
    let out = (0..m).map(|i| -(flux[i + 1] - flux[i]) / h).collect();
    TangentVector1D::new(*grid, out)
}

/// Residuals of the dissipation identity along a uniformly spaced density
/// trajectory: for each interior snapshot,
///
/// ```text
///     r_k = (E_{k+1} - E_{k-1}) / (2 dt) + || (rho_{k+1} - rho_{k-1}) / (2 dt) ||^2_{rho_k}
/// ```
///
/// which vanishes when the trajectory is the gradient flow of `E`.
pub fn dissipation_residual<S: Scalar>(
    times: &[S],
    densities: &[Density1D<S>],
    diffusivity: S,
    pot: &PotentialSpec<S>,
) -> Result<Vec<S>> {
    if times.len() != densities.len() {
        return Err(Error::InvalidInput {
            what: "trajectory",
            why: format!("{} times but {} densities", times.len(), densities.len()),
        });
    }
    if times.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: times.len(),
        });
    }
    let dt = times[1] - times[0];
    if !(dt.is_finite() && dt > S::zero()) {
        return Err(Error::InvalidInput {
            what: "trajectory times",
            why: "times must increase".into(),
        });
    }
    let tol = cast::<S>(1e-9) * dt;
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > tol {
            return Err(Error::InvalidInput {
                what: "trajectory times",
                why: "snapshot spacing is not uniform".into(),
            });
        }
    }
    let grid = densities[0].grid();
    for d in densities {
        if d.grid() != grid {
            return Err(Error::GridMismatch);
        }
    }
    let energies: Vec<S> = densities
        .iter()
        .map(|d| free_energy(d, diffusivity, pot).map(|e| e.total))
        .collect::<Result<_>>()?;
    let two_dt = dt + dt;
    (1..times.len() - 1)
        .into_par_iter()
        .map(|k| {
            let de = (energies[k + 1] - energies[k - 1]) / two_dt;
            let s: Vec<S> = densities[k + 1]
                .values()
                .iter()
                .zip(densities[k - 1].values())
                .map(|(&a, &b)| (a - b) / two_dt)
                .collect();
            let tangent = TangentVector1D::new(*grid, s)?;
            let speed_sq = tangent_norm_sq(&tangent, &densities[k])?;
            Ok(de + speed_sq)
        })
        .collect()
}

/// One minimizing-movement step: returns (a grid representation of)
///
/// ```text
///     argmin_rho  E(rho) + W2(rho, rho_prev)^2 / (2 tau)
/// ```
///
/// Candidate densities are parameterized by a monotone map on 256 quantile
/// knots of `rho_prev`; the inner problem is minimized by damped Newton
/// descent with backtracking (monotonicity enforced by the line search:
/// any step collapsing a knot interval is infeasible). The optimized knot
/// map is then applied to `rho_prev` as a pushforward.
pub fn jko_step<S: Scalar>(
    rho_prev: &Density1D<S>,
    tau: S,
    diffusivity: S,
    pot: &PotentialSpec<S>,
) -> Result<Density1D<S>> {
    if !(tau.is_finite() && tau > S::zero()) {
        return Err(Error::InvalidInput {
            what: "jko step size",
            why: format!("need finite tau > 0, got {tau}"),
        });
    }
    if !(diffusivity.is_finite() && diffusivity >= S::zero()) {
        return Err(Error::InvalidInput {
            what: "diffusivity",
            why: format!("need finite D >= 0, got {diffusivity}"),
        });
    }
    let k = JKO_KNOTS;
    let du = S::one() / cast::<S>(k as f64);
    let us: Vec<S> = (0..=k).map(|j| cast::<S>(j as f64 / k as f64)).collect();
    let x = rho_prev.quantiles(&us);
    for j in 0..k {
        if !(x[j + 1] - x[j] > S::zero()) {
            return Err(Error::DegenerateDensity {
                position: as_f64(x[j]),
            });
        }
    }
    // trapezoid weights over the quantile variable
    let half = S::one() / (S::one() + S::one());
    let mut w = vec![du; k + 1];
    w[0] = du * half;
    w[k] = du * half;

    let objective = |y: &[S]| -> S {
        let mut j_ent = S::zero();
        for i in 0..k {
            let dy = y[i + 1] - y[i];
            if !(dy > S::zero()) {
                return S::infinity();
            }
            j_ent = j_ent - (dy / (x[i + 1] - x[i])).ln() * du;
        }
        let mut j_pot = S::zero();
        let mut j_w2 = S::zero();
        for i in 0..=k {
            j_pot = j_pot + w[i] * pot.psi(y[i]);
            let d = y[i] - x[i];
            j_w2 = j_w2 + w[i] * d * d;
        }
        diffusivity * j_ent + j_pot + j_w2 / (tau + tau)
    };

    let mut y = x.clone();
    let mut obj = objective(&y);
    let start_obj = obj;
    let tol = cast::<S>(1e-8);
    let mut converged = false;
    let mut grad = vec![S::zero(); k + 1];
    let mut diag = vec![S::zero(); k + 1];
    let mut off = vec![S::zero(); k]; // off[i] couples y_i and y_{i+1}
    for _ in 0..JKO_MAX_ITER {
        // gradient and tridiagonal Hessian of the objective at y
        for j in 0..=k {
            let mut g = w[j] * pot.grad(y[j]) + w[j] * (y[j] - x[j]) / tau;
            let mut hd = w[j] * curvature(pot, y[j]).max(S::zero()) + w[j] / tau;
            if j < k {
                let dy = y[j + 1] - y[j];
                g = g + diffusivity * du / dy;
                hd = hd + diffusivity * du / (dy * dy);
                off[j] = -diffusivity * du / (dy * dy);
            }
            if j > 0 {
                let dy = y[j] - y[j - 1];
                g = g - diffusivity * du / dy;
                hd = hd + diffusivity * du / (dy * dy);
            }
            grad[j] = g;
            diag[j] = hd;
        }
        let step = thomas_solve(&diag, &off, &grad);
        let descent: S = grad
            .iter()
            .zip(&step)
            .map(|(&g, &p)| g * p)
            .fold(S::zero(), |a, b| a + b);
        // Newton direction of a positive-definite system descends; numerical
        // degeneracy shows up as a non-positive product and ends the loop
        if !(descent > S::zero()) || !descent.is_finite() {
            converged = true;
            break;
        }
        let mut t = S::one();
        let armijo = cast::<S>(1e-4);
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<S> = y
                .iter()
                .zip(&step)
                .map(|(&yi, &pi)| yi - t * pi)
                .collect();
            let trial_obj = objective(&trial);
            if trial_obj <= obj - armijo * t * descent {
                let rel = (obj - trial_obj).abs() / S::one().max(obj.abs());
                y = trial;
                obj = trial_obj;
                accepted = true;
                if rel <= tol {
                    converged = true;
                }
                break;
            }
            t = t * half;
        }
        if !accepted {
            // line-search stall: no further progress representable
            converged = true;
        }
        if converged {
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            iterations: JKO_MAX_ITER,
            last_objective: as_f64(obj),
        });
    }
    debug_assert!(obj <= start_obj + precision_floor::<S>(1e-12, 1.0));

    // resample the knot map to cell centers and push rho_prev through it
    let grid = rho_prev.grid();
    let (a, b) = (grid.lo(), grid.hi());
    for yi in &mut y {
        *yi = (*yi).max(a).min(b);
    }
    let map_values: Vec<S> = grid
        .centers()
        .iter()
        .map(|&c| interp_knots(&x, &y, c))
        .collect();
    let map = TransportMap1D::from_values(*grid, map_values)?;
    pushforward_density(rho_prev, &map)
}

/// Second derivative of the potential, exact for quadratic specs and by
/// centered differences of the gradient otherwise.
fn curvature<S: Scalar>(pot: &PotentialSpec<S>, yj: S) -> S {
    if let Some(beta) = pot.quadratic_coefficient() {
        return beta;
    }
    let delta = cast::<S>(1e-4) * (S::one() + yj.abs());
    (pot.grad(yj + delta) - pot.grad(yj - delta)) / (delta + delta)
}

/// Solves the symmetric tridiagonal system (diag, off) p = rhs.
fn thomas_solve<S: Scalar>(diag: &[S], off: &[S], rhs: &[S]) -> Vec<S> {
    let n = diag.len();
    let mut c = vec![S::zero(); n];
    let mut d = vec![S::zero(); n];
    c[0] = off[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - off[i - 1] * c[i - 1];
        if i < n - 1 {
            c[i] = off[i] / denom;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / denom;
    }
    let mut p = vec![S::zero(); n];
    p[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        p[i] = d[i] - c[i] * p[i + 1];
    }
    p
}

/// Piecewise-linear interpolation through strictly increasing knots `x`,
/// with linear extension beyond the ends.
fn interp_knots<S: Scalar>(x: &[S], y: &[S], q: S) -> S {
    let n = x.len();
    if q <= x[0] {
        let slope = (y[1] - y[0]) / (x[1] - x[0]);
        return y[0] + slope * (q - x[0]);
    }
    if q >= x[n - 1] {
        let slope = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
        return y[n - 1] + slope * (q - x[n - 1]);
    }
    let j = x.partition_point(|&xi| xi < q);
    let frac = (q - x[j - 1]) / (x[j] - x[j - 1]);
    y[j - 1] + (y[j] - y[j - 1]) * frac
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::density_moments;
    use approx::assert_relative_eq;

    fn grid() -> Grid1D<f64> {
        Grid1D::new(-8.0, 8.0, 1024).unwrap()
    }

    #[test]
    fn entropy_of_uniform_unit_density_is_zero() {
        let g = Grid1D::new(0.0f64, 1.0, 64).unwrap();
        let rho = Density1D::uniform(g, 0.0, 1.0).unwrap();
        assert_relative_eq!(entropy_term(&rho), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_of_standard_gaussian_matches_closed_form() {
        let rho = Density1D::gaussian(grid(), 0.0, 1.0).unwrap();
        // -(1/2) ln(2 pi e)
        assert_relative_eq!(entropy_term(&rho), -1.4189385332046727, epsilon = 1e-3);
    }

    #[test]
    fn entropy_decreases_with_narrowing() {
        let wide = Density1D::gaussian(grid(), 0.0, 1.0).unwrap();
        let narrow = Density1D::gaussian(grid(), 0.0, 0.5).unwrap();
        assert!(entropy_term(&narrow) > entropy_term(&wide));
    }

    #[test]
    fn free_energy_of_gaussian_in_quadratic_well() {
        let rho = Density1D::gaussian(grid(), 0.0, 1.0).unwrap();
        let pot = PotentialSpec::quadratic(1.0).unwrap();
        let e = free_energy(&rho, 1.0, &pot).unwrap();
        // -(1/2) ln(2 pi e) + 1/2 = -(1/2) ln(2 pi)
        assert_relative_eq!(e.total, -0.9189385332046727, epsilon = 1e-3);
        assert_relative_eq!(e.potential_term, 0.5, epsilon = 1e-3);
        assert_eq!(e.total, e.diffusivity * e.entropy_term + e.potential_term);
    }

    #[test]
    fn zero_potential_and_zero_diffusivity_limits() {
        let rho = Density1D::gaussian(grid(), 0.0, 1.0).unwrap();
        let zero = PotentialSpec::zero();
        let e = free_energy(&rho, 1.0, &zero).unwrap();
        assert_eq!(e.total, e.entropy_term);
        let pot = PotentialSpec::quadratic(1.0).unwrap();
        let e0 = free_energy(&rho, 0.0, &pot).unwrap();
        assert_eq!(e0.total, e0.potential_term);
    }

    #[test]
    fn partition_constant_matches_gaussian_integrals() {
        let g = grid();
        let pot = PotentialSpec::quadratic(1.0).unwrap();
        // sqrt(2 pi D / beta) at D = beta = 1
        assert_relative_eq!(
            partition_constant(&pot, 1.0, &g).unwrap(),
            2.5066282746310002,
            epsilon = 1e-4
        );
        let steep = PotentialSpec::custom(|x: f64| x * x, |x| 2.0 * x);
        assert_relative_eq!(
            partition_constant(&steep, 1.0, &g).unwrap(),
            std::f64::consts::PI.sqrt(),
            epsilon = 1e-4
        );
        let beta2 = PotentialSpec::quadratic(2.0).unwrap();
        assert_relative_eq!(
            partition_constant(&beta2, 1.0, &g).unwrap(),
            std::f64::consts::PI.sqrt(),
            epsilon = 1e-4
        );
    }

    #[test]
    fn stationary_density_has_boltzmann_moments() {
        let g = grid();
        let pot = PotentialSpec::quadratic(1.0).unwrap();
        let rho = stationary_density(&pot, 1.0, &g).unwrap();
        let (mean, var) = density_moments(&rho);
        assert_relative_eq!(mean, 0.0, epsilon = 1e-3);
        assert_relative_eq!(var, 1.0, epsilon = 1e-3);
        let cold = stationary_density(&pot, 0.5, &g).unwrap();
        let (_, var_cold) = density_moments(&cold);
        assert_relative_eq!(var_cold, 0.5, epsilon = 1e-3);
    }

    #[test]
    fn stationary_density_of_flat_potential_is_uniform() {
        let g = Grid1D::new(0.0f64, 1.0, 64).unwrap();
        let rho = stationary_density(&PotentialSpec::zero(), 1.0, &g).unwrap();
        for &v in rho.values() {
            assert_relative_eq!(v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn kl_divergence_matches_gaussian_closed_forms() {
        let g = grid();
        let p = Density1D::gaussian(g, 1.0, 1.0).unwrap();
        let q = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        assert_relative_eq!(kl_divergence(&p, &q).unwrap(), 0.5, epsilon = 1e-3);
        assert_relative_eq!(kl_divergence(&p, &p).unwrap(), 0.0, epsilon = 1e-12);
        // the sigma = 2 case needs a wider domain: truncating at 4 sigma
        // clips ~1.7e-3 of the divergence integral
        let gw = Grid1D::new(-16.0, 16.0, 2048).unwrap();
        let wide = Density1D::gaussian(gw, 0.0, 2.0).unwrap();
        let qw = Density1D::gaussian(gw, 0.0, 1.0).unwrap();
        // (1/2) (sigma^2 - 1 - ln sigma^2) with sigma^2 = 4
        let expect = 0.5 * (4.0 - 1.0 - 4.0f64.ln());
        assert_relative_eq!(kl_divergence(&wide, &qw).unwrap(), expect, epsilon = 1e-3);
    }

    #[test]
    fn kl_rejects_support_violations() {
        let g = Grid1D::new(0.0f64, 1.0, 16).unwrap();
        let p = Density1D::uniform(g, 0.0, 1.0).unwrap();
        let q = Density1D::uniform(g, 0.0, 0.5).unwrap();
        assert!(matches!(
            kl_divergence(&p, &q),
            Err(Error::SupportMismatch { .. })
        ));
        // the other direction is fine
        assert!(kl_divergence(&q, &p).is_ok());
    }

    #[test]
    fn scalar_product_matches_cosine_oracle() {
        let g = Grid1D::new(0.0f64, 1.0, 1024).unwrap();
        let rho = Density1D::uniform(g, 0.0, 1.0).unwrap();
        // s = phi'' with phi = cos(2 pi x)
        let two_pi = 2.0 * std::f64::consts::PI;
        let s_vals: Vec<f64> = g
            .centers()
            .iter()
            .map(|&x| -two_pi * two_pi * (two_pi * x).cos())
            .collect();
        let s = TangentVector1D::new(g, s_vals).unwrap();
        let got = wasserstein_scalar_product(&s, &s, &rho).unwrap();
        let expect = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
        assert_relative_eq!(got, expect, max_relative = 0.01);
    }

    #[test]
    fn heat_flow_tangent_norm_is_fisher_information() {
        let g = grid();
        let rho = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        // s = rho'' for the standard gaussian: rho * (x^2 - c), with c the
        // discrete second moment so the tangent sums to zero exactly without
        // pushing any flux through the vacuum tails
        let c = {
            let num: f64 = g
                .centers()
                .iter()
                .zip(rho.values())
                .map(|(&x, &p)| p * x * x)
                .sum();
            let den: f64 = rho.values().iter().sum();
            num / den
        };
        let s_vals: Vec<f64> = g
            .centers()
            .iter()
            .zip(rho.values())
            .map(|(&x, &p)| p * (x * x - c))
            .collect();
        let s = TangentVector1D::new(g, s_vals).unwrap();
        let got = tangent_norm_sq(&s, &rho).unwrap();
        assert_relative_eq!(got, 1.0, max_relative = 0.05);
    }

    #[test]
    fn scalar_product_is_symmetric_and_scales_quadratically() {
        let g = grid();
        let rho = Density1D::gaussian(g, 0.0, 2.0).unwrap();
        let s1_vals: Vec<f64> = g.centers().iter().map(|&x| x * rho_at(&rho, &g, x)).collect();
        let s1 = zero_sum_tangent(g, s1_vals);
        let s2_vals: Vec<f64> = g
            .centers()
            .iter()
            .map(|&x| (x * 0.7).sin() * rho_at(&rho, &g, x))
            .collect();
        let s2 = zero_sum_tangent(g, s2_vals);
        let a = wasserstein_scalar_product(&s1, &s2, &rho).unwrap();
        let b = wasserstein_scalar_product(&s2, &s1, &rho).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
        let doubled_vals: Vec<f64> = s1.values().iter().map(|v| 2.0 * v).collect();
        let doubled = TangentVector1D::new(g, doubled_vals).unwrap();
        let q = tangent_norm_sq(&doubled, &rho).unwrap();
        let base = tangent_norm_sq(&s1, &rho).unwrap();
        assert_relative_eq!(q, 4.0 * base, max_relative = 1e-10);
    }

    fn rho_at(rho: &Density1D<f64>, g: &Grid1D<f64>, x: f64) -> f64 {
        rho.values()[g.cell_of_clamped(x)]
    }

    fn zero_sum_tangent(g: Grid1D<f64>, mut vals: Vec<f64>) -> TangentVector1D<f64> {
        let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
        for v in &mut vals {
            *v -= mean;
        }
        TangentVector1D::new(g, vals).unwrap()
    }

    #[test]
    fn gradient_vanishes_at_the_stationary_state() {
        let g = grid();
        let pot = PotentialSpec::quadratic(1.0).unwrap();
        let rho = stationary_density(&pot, 1.0, &g).unwrap();
        let grad = wasserstein_gradient(&rho, 1.0, &pot).unwrap();
        let max = grad.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(max <= 1e-3, "max |gradient| = {max}");
    }

    #[test]
    fn gradient_of_heat_flow_is_negative_laplacian_scaled() {
        let g = grid();
        let rho = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let grad = wasserstein_gradient(&rho, 1.0, &PotentialSpec::zero()).unwrap();
        // -(rho')' at the origin = rho(0) for the standard gaussian
        let mid = g.cell_of_clamped(0.0);
        assert_relative_eq!(grad.values()[mid], 0.3989422804014327, epsilon = 1e-3);
        let grad2 = wasserstein_gradient(&rho, 2.0, &PotentialSpec::zero()).unwrap();
        for (a, b) in grad.values().iter().zip(grad2.values()) {
            assert_relative_eq!(2.0 * a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn gradient_sums_to_zero() {
        let g = grid();
        let rho = Density1D::gaussian(g, 1.0, 1.5).unwrap();
        let pot = PotentialSpec::quadratic(2.0).unwrap();
        let grad = wasserstein_gradient(&rho, 0.7, &pot).unwrap();
        let total: f64 = grad.values().iter().sum::<f64>() * g.h();
        assert!(total.abs() <= 1e-10, "sum = {total}");
    }

    #[test]
    fn dissipation_residual_needs_three_snapshots() {
        let g = grid();
        let rho = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let r = dissipation_residual(
            &[0.0, 0.1],
            &[rho.clone(), rho],
            1.0,
            &PotentialSpec::zero(),
        );
        assert!(matches!(r, Err(Error::InsufficientData { needed: 3, got: 2 })));
    }

    #[test]
    fn stationary_trajectory_has_zero_residual() {
        let g = grid();
        let pot = PotentialSpec::quadratic(1.0).unwrap();
        let rho = stationary_density(&pot, 1.0, &g).unwrap();
        let times = [0.0, 0.01, 0.02, 0.03];
        let densities = vec![rho.clone(), rho.clone(), rho.clone(), rho];
        let r = dissipation_residual(&times, &densities, 1.0, &pot).unwrap();
        for v in r {
            assert!(v.abs() <= 1e-10, "residual {v}");
        }
    }

    #[test]
    fn analytic_heat_flow_satisfies_the_identity() {
        // sigma^2(t) = 1 + 2t: dE/dt = -1/(1+2t), norm^2 = 1/(1+2t)
        let g = grid();
        let dt = 1e-3;
        let times: Vec<f64> = (0..5).map(|i| i as f64 * dt).collect();
        let densities: Vec<_> = times
            .iter()
            .map(|&t| Density1D::gaussian(g, 0.0, (1.0 + 2.0 * t).sqrt()).unwrap())
            .collect();
        let r = dissipation_residual(&times, &densities, 1.0, &PotentialSpec::zero()).unwrap();
        for v in r {
            assert!(v.abs() <= 0.05, "residual {v}");
        }
    }

    #[test]
    fn translation_under_continuity_is_not_a_gradient_flow() {
        // translate N(0,1) at unit speed: dE/dt = 0 but the metric speed is 1
        let g = grid();
        let dt = 1e-3;
        let times: Vec<f64> = (0..5).map(|i| i as f64 * dt).collect();
        let densities: Vec<_> = times
            .iter()
            .map(|&t| Density1D::gaussian(g, t, 1.0).unwrap())
            .collect();
        let r = dissipation_residual(&times, &densities, 1.0, &PotentialSpec::zero()).unwrap();
        for v in r {
            assert_relative_eq!(v, 1.0, epsilon = 0.05);
        }
    }

    #[test]
    fn jko_step_fixes_the_stationary_state() {
        let g = grid();
        let pot = PotentialSpec::quadratic(1.0).unwrap();
        let rho = stationary_density(&pot, 1.0, &g).unwrap();
        let next = jko_step(&rho, 0.01, 1.0, &pot).unwrap();
        let l1 = crate::measures::l1_distance(&next, &rho).unwrap();
        assert!(l1 <= 1e-3, "stationary JKO moved by L1 {l1}");
    }

    #[test]
    fn jko_heat_step_adds_variance() {
        let g = grid();
        let rho = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        let next = jko_step(&rho, 0.01, 1.0, &PotentialSpec::zero()).unwrap();
        let (_, var) = density_moments(&next);
        assert_relative_eq!(var, 1.02, epsilon = 5e-3);
    }

    #[test]
    fn jko_step_rejects_bad_tau() {
        let g = grid();
        let rho = Density1D::gaussian(g, 0.0, 1.0).unwrap();
        assert!(jko_step(&rho, 0.0, 1.0, &PotentialSpec::zero()).is_err());
        assert!(jko_step(&rho, -1.0, 1.0, &PotentialSpec::zero()).is_err());
    }
}
