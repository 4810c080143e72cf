//! The discrete noising chain
//!
//! ```text
//!     x_k = sqrt(1 - 2 beta_k) x_{k-1} + sqrt(2 beta_k) xi_k
//! ```
//!
//! whose small-step limit is the variance-preserving SDE. Step `k` of the
//! chain consumes the same keyed draw `(seed, particle, k)` as step `k` of
//! [`super::simulate_sde`], so a chain with `beta_k = beta(t_k) dt` and the
//! continuous simulator at the matching horizon see identical noise and can
//! be compared pathwise, not just in distribution.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::ParticleEnsemble;
use crate::rng;
use crate::scalar::Scalar;

/// Runs the noising recursion over the given `betas`, one chain step per
/// entry. Every `beta` must lie strictly inside `(0, 1/2)`; at `1/2` the
/// contraction factor degenerates to zero and beyond it the square root
/// leaves the reals. The chain is discrete, so the returned ensemble keeps
/// the input's time stamp.
pub fn ddpm_chain<S: Scalar>(
    ens0: &ParticleEnsemble<S>,
    betas: &[S],
    seed: u64,
) -> Result<ParticleEnsemble<S>> {
    let half = S::one() / (S::one() + S::one());
    for (k, &b) in betas.iter().enumerate() {
        if !b.is_finite() || b <= S::zero() || b >= half {
            return Err(Error::InvalidSchedule {
                why: format!("beta[{k}] = {b} is outside (0, 0.5)"),
            });
        }
    }
    let two = S::one() + S::one();
    let keep: Vec<S> = betas.iter().map(|&b| (S::one() - two * b).sqrt()).collect();
    let inject: Vec<S> = betas.iter().map(|&b| (two * b).sqrt()).collect();
    let positions: Vec<S> = ens0
        .positions()
        .par_iter()
        .enumerate()
        .map(|(p, &x0)| {
            let mut x = x0;
            for k in 0..betas.len() {
                let xi: S = rng::standard_normal(seed, p as u64, k as u64);
                x = keep[k] * x + inject[k] * xi;
            }
            x
        })
        .collect();
    ParticleEnsemble::new(positions, ens0.time())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{sample_from_density, Density1D, Grid1D};
    use approx::assert_relative_eq;

    #[test]
    fn one_step_from_a_point_mass_injects_two_beta() {
        let ens0 = ParticleEnsemble::new(vec![0.0f64; 100_000], 0.0).unwrap();
        let out = ddpm_chain(&ens0, &[0.1], 21).unwrap();
        let (mean, var) = out.moments();
        assert!(mean.abs() < 0.005, "mean {mean}");
        assert_relative_eq!(var, 0.2, epsilon = 0.2 * 0.02);
    }

    #[test]
    fn standard_normal_is_a_fixed_point_of_every_schedule() {
        let grid = Grid1D::new(-8.0, 8.0, 1024).unwrap();
        let rho = Density1D::gaussian(grid, 0.0, 1.0).unwrap();
        let ens0 = sample_from_density(&rho, 100_000, 9).unwrap();
        let betas = [0.3, 0.05, 0.2, 0.45, 0.01];
        // (1 - 2b) * 1 + 2b = 1 after each step, so check every prefix
        for k in 1..=betas.len() {
            let out = ddpm_chain(&ens0, &betas[..k], 4).unwrap();
            let (_, var) = out.moments();
            assert_relative_eq!(var, 1.0, epsilon = 0.02);
        }
    }

    #[test]
    fn mean_contracts_by_the_keep_factor_per_step() {
        let ens0 = ParticleEnsemble::new(vec![4.0; 100_000], 0.0).unwrap();
        let betas = vec![0.05; 100];
        let out = ddpm_chain(&ens0, &betas, 13).unwrap();
        let (mean, _) = out.moments();
        let expect = 4.0 * 0.9f64.powi(50);
        assert!((mean - expect).abs() <= 0.01, "mean {mean} vs {expect}");
    }

    #[test]
    fn betas_outside_the_open_interval_are_rejected() {
        let ens0 = ParticleEnsemble::new(vec![0.0], 0.0).unwrap();
        for bad in [0.0, 0.5, 0.7, -0.1, f64::NAN] {
            assert!(matches!(
                ddpm_chain(&ens0, &[0.1, bad], 0),
                Err(Error::InvalidSchedule { .. })
            ));
        }
    }

    #[test]
    fn empty_schedule_is_the_identity() {
        let ens0 = ParticleEnsemble::new(vec![1.0, -2.5], 0.75).unwrap();
        let out = ddpm_chain(&ens0, &[], 0).unwrap();
        assert_eq!(out.positions(), ens0.positions());
        assert_eq!(out.time(), 0.75);
    }

    #[test]
    fn fixed_seed_reproduces_bit_for_bit() {
        let ens0 = ParticleEnsemble::new(vec![0.3, -1.2, 0.0], 0.0).unwrap();
        let a = ddpm_chain(&ens0, &[0.1, 0.2], 11).unwrap();
        let b = ddpm_chain(&ens0, &[0.1, 0.2], 11).unwrap();
        assert_eq!(a.positions(), b.positions());
    }
}
