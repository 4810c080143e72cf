//! The solver and the energy module agree about what a gradient flow is:
//! the free energy decreases at the metric rate, stays a constant gap
//! above the relative entropy, and the minimizing-movement scheme tracks
//! the PDE at first order in its step.

use freeflow_core::energy::{
    dissipation_residual, free_energy, jko_step, kl_divergence, partition_constant,
    stationary_density,
};
use freeflow_core::eulerian::{fp_evolve, EvolveOptions};
use freeflow_core::measures::{l1_distance, Density1D, Grid1D, PotentialSpec};

#[test]
fn energy_sits_a_constant_gap_above_relative_entropy() {
    // E(rho) - D KL(rho || rho_inf) = -D log Z for every rho with the
    // right support, so the combination must stay flat along the flow
    let g = Grid1D::new(-8.0, 8.0, 512).unwrap();
    let d = 0.7;
    let pot: PotentialSpec<f64> = PotentialSpec::quadratic(1.0).unwrap();
    let rho0 = Density1D::gaussian(g, 1.0, 1.3).unwrap();
    let z = partition_constant(&pot, d, &g).unwrap();
    let pinned = -d * z.ln();
    let stat = stationary_density(&pot, d, &g).unwrap();
    let traj = fp_evolve(
        &rho0,
        |_| d,
        &pot,
        2.0,
        EvolveOptions {
            dt: None,
            snapshots: 9,
        },
    )
    .unwrap();
    for rho in traj.densities() {
        let e = free_energy(rho, d, &pot).unwrap().total;
        let kl = kl_divergence(rho, &stat).unwrap();
        assert!(
            (e - d * kl - pinned).abs() <= 1e-3,
            "gap {} drifted from -D log Z = {pinned}",
            e - d * kl
        );
    }
}

#[test]
fn heat_flow_dissipates_at_the_metric_rate() {
    // pure diffusion from N(0, 1): dE/dt = -||d rho/dt||^2 in the
    // Wasserstein metric, so the residual must be a small fraction of
    // the dissipation itself
    let g = Grid1D::new(-10.0, 10.0, 512).unwrap();
    let d = 1.0;
    let pot: PotentialSpec<f64> = PotentialSpec::zero();
    let rho0 = Density1D::gaussian(g, 0.0, 1.0).unwrap();
    let traj = fp_evolve(
        &rho0,
        |_| d,
        &pot,
        0.5,
        EvolveOptions {
            dt: None,
            snapshots: 41,
        },
    )
    .unwrap();
    let times = traj.times();
    let densities = traj.densities();
    let residuals = dissipation_residual(times, densities, d, &pot).unwrap();
    let dt2 = times[2] - times[0];
    for (k, r) in residuals.iter().enumerate() {
        let e_prev = free_energy(&densities[k], d, &pot).unwrap().total;
        let e_next = free_energy(&densities[k + 2], d, &pot).unwrap().total;
        let rate = (e_next - e_prev) / dt2;
        assert!(
            r.abs() <= 0.05 * rate.abs(),
            "snapshot {}: residual {r} exceeds 5% of dE/dt = {rate}",
            k + 1
        );
    }
}

#[test]
fn jko_steps_track_the_pde_and_refine_linearly() {
    // a start far from equilibrium keeps the O(tau) error of the scheme
    // well above the spatial floor of the knot parameterization, so the
    // halving of the gap under tau-halving is actually visible
    let g = Grid1D::new(-8.0, 8.0, 1024).unwrap();
    let d = 1.0;
    let pot: PotentialSpec<f64> = PotentialSpec::quadratic(1.0).unwrap();
    let rho0 = Density1D::gaussian(g, 2.0, 0.6).unwrap();
    let reference = fp_evolve(
        &rho0,
        |_| d,
        &pot,
        0.2,
        EvolveOptions {
            dt: None,
            snapshots: 2,
        },
    )
    .unwrap();
    let target = reference.final_density();

    let run = |tau: f64, steps: usize| -> f64 {
        let mut rho = rho0.clone();
        for _ in 0..steps {
            rho = jko_step(&rho, tau, d, &pot).unwrap();
        }
        l1_distance(&rho, target).unwrap()
    };
    let coarse = run(0.01, 20);
    assert!(coarse <= 0.02, "JKO vs FP gap {coarse} exceeds 0.02");

    // the scheme is first order in tau: halving tau halves the gap
    let fine = run(0.005, 40);
    let ratio = coarse / fine.max(1e-12);
    assert!(
        (1.4..=2.6).contains(&ratio),
        "gap ratio {ratio} not within 30% of 2 (coarse {coarse}, fine {fine})"
    );
}
