//! Strictly convex transport costs, their Legendre conjugates, and the
//! particle trajectories they induce.
//!
//! A cost is a convex function with `c(0) = 0`. The power family
//! `c(z) = |z|^p / p` gets closed-form conjugates
//! `c*(q) = |q|^{p'} / p'` with `1/p + 1/p' = 1`; any other convex cost is
//! conjugated numerically, by golden-section search on the concave
//! objective `q z - c(z)` after bracketing its maximum.

use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::{as_f64, cast, Scalar};

type CostFn<S> = Box<dyn Fn(S) -> S + Send + Sync>;

const CONVEXITY_SAMPLES: usize = 1024;
const CONVEXITY_RANGE: f64 = 16.0;
/// Bracketing gives up once the search interval reaches this half-width;
/// a maximum still unattained out there means the conjugate is infinite
/// for every practical purpose.
const BRACKET_LIMIT: f64 = 1e15;
const PERTURBATION_SEED: u64 = 0x5eed_c057;

/// A convex running cost `c` with `c(0) = 0`.
pub struct CostSpec<S: Scalar> {
    cost: CostFn<S>,
    power: Option<f64>,
}

impl<S: Scalar> CostSpec<S> {
    /// The power-family cost `c(z) = |z|^p / p`, strictly convex for
    /// `p > 1`, with closed-form conjugate.
    pub fn power(p: f64) -> Result<Self> {
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::InvalidInput {
                what: "cost exponent",
                why: format!("need p > 1 for strict convexity, got {p}"),
            });
        }
        let cost = move |z: S| z.abs().powf(cast(p)) / cast::<S>(p);
        Ok(CostSpec {
            cost: Box::new(cost),
            power: Some(p),
        })
    }

    /// The quadratic cost `z^2 / 2`, whose conjugate is itself.
    pub fn quadratic() -> Self {
        Self::power(2.0).expect("2 > 1")
    }

    /// Wraps an arbitrary cost after checking `c(0) = 0` and midpoint
    /// convexity on a uniform sample of 1024 points.
    pub fn custom(c: impl Fn(S) -> S + Send + Sync + 'static) -> Result<Self> {
        let at_zero = c(S::zero());
        if at_zero.abs() > cast(1e-12) {
            return Err(Error::InvalidInput {
                what: "cost",
                why: format!("c(0) = {at_zero}, must vanish"),
            });
        }
        let n = CONVEXITY_SAMPLES;
        let samples: Vec<S> = (0..n)
            .map(|i| {
                let z = cast::<S>(CONVEXITY_RANGE * (2.0 * i as f64 / (n - 1) as f64 - 1.0));
                c(z)
            })
            .collect();
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput {
                what: "cost",
                why: format!("non-finite value {bad} on the check range"),
            });
        }
        for i in 1..n - 1 {
            let mid = samples[i];
            let avg = (samples[i - 1] + samples[i + 1]) / cast(2.0);
            let scale = S::one().max(mid.abs());
            if mid > avg + cast::<S>(1e-9) * scale {
                return Err(Error::InvalidInput {
                    what: "cost",
                    why: format!("midpoint convexity fails near sample {i}"),
                });
            }
        }
        Ok(CostSpec {
            cost: Box::new(c),
            power: None,
        })
    }

    pub fn eval(&self, z: S) -> S {
        (self.cost)(z)
    }

    /// The exponent when this cost is in the power family.
    pub fn power_exponent(&self) -> Option<f64> {
        self.power
    }
}

impl<S: Scalar> std::fmt::Debug for CostSpec<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.power {
            Some(p) => write!(f, "CostSpec(|z|^{p} / {p})"),
            None => write!(f, "CostSpec(custom)"),
        }
    }
}

/// Legendre conjugate `c*(q) = sup_z (q z - c(z))`: closed form in the
/// power family, golden-section search otherwise.
pub fn legendre_transform<S: Scalar>(cost: &CostSpec<S>, q: S) -> Result<S> {
    if let Some(p) = cost.power {
        let dual = p / (p - 1.0);
        return Ok(q.abs().powf(cast(dual)) / cast::<S>(dual));
    }
    let objective = |z: S| q * z - cost.eval(z);
    let (lo, hi) = bracket_maximum(&objective, as_f64(q))?;
    Ok(golden_maximum(&objective, lo, hi))
}

/// Expands `[-1, 1]` until the concave objective decreases at both ends.
fn bracket_maximum<S: Scalar>(g: &impl Fn(S) -> S, slope: f64) -> Result<(S, S)> {
    let limit = cast::<S>(BRACKET_LIMIT);
    let mut hi = S::one();
    while rising_at(g, hi) {
        hi = hi + hi;
        if hi > limit {
            return Err(Error::UnboundedConjugate { slope });
        }
    }
    let mut lo = -S::one();
    while rising_at(g, lo) {
        lo = lo + lo;
        if lo < -limit {
            return Err(Error::UnboundedConjugate { slope });
        }
    }
    Ok((lo, hi))
}

/// True when the objective still grows moving outward past `z`.
fn rising_at<S: Scalar>(g: &impl Fn(S) -> S, z: S) -> bool {
    let step = cast::<S>(1e-6) * z.abs().max(S::one());
    let inner = if z > S::zero() { z - step } else { z + step };
    g(z) > g(inner)
}

/// Golden-section search for the maximum of a unimodal function.
fn golden_maximum<S: Scalar>(g: &impl Fn(S) -> S, mut lo: S, mut hi: S) -> S {
    let ratio = cast::<S>(0.618_033_988_749_894_9);
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut ga, mut gb) = (g(a), g(b));
    for _ in 0..200 {
        if ga >= gb {
            hi = b;
            b = a;
            gb = ga;
            a = hi - ratio * (hi - lo);
            ga = g(a);
        } else {
            lo = a;
            a = b;
            ga = gb;
            b = lo + ratio * (hi - lo);
            gb = g(b);
        }
        let scale = S::one().max(lo.abs()).max(hi.abs());
        if hi - lo <= cast::<S>(1e-13) * scale {
            break;
        }
    }
    ga.max(gb)
}

/// Derivative of the conjugate: closed form `sign(q) |q|^{1/(p-1)}` in the
/// power family, central difference on [`legendre_transform`] otherwise.
fn conjugate_prime<S: Scalar>(cost: &CostSpec<S>, q: S) -> Result<S> {
    if let Some(p) = cost.power {
        if q == S::zero() {
            return Ok(S::zero());
        }
        return Ok(q.signum() * q.abs().powf(cast(1.0 / (p - 1.0))));
    }
    let step = cast::<S>(1e-5) * q.abs().max(S::one());
    let plus = legendre_transform(cost, q + step)?;
    let minus = legendre_transform(cost, q - step)?;
    Ok((plus - minus) / (step + step))
}

/// Particle position of the convex-cost transport trajectory,
///
/// ```text
///     zeta_t(x) = x - t (c*)'(psi'(x)),
/// ```
///
/// where `psi'` is the potential gradient carried by the transport map.
/// For the quadratic cost `(c*)'` is the identity and the trajectory is
/// plain linear interpolation toward `x - psi'(x)`.
pub fn convex_cost_trajectory<S: Scalar>(
    x: S,
    psi_gradient: impl Fn(S) -> S,
    cost: &CostSpec<S>,
    t: S,
) -> Result<S> {
    if !(t >= S::zero() && t <= S::one()) {
        return Err(Error::InvalidInput {
            what: "trajectory parameter",
            why: format!("t = {t} is outside [0, 1]"),
        });
    }
    Ok(x - t * conjugate_prime(cost, psi_gradient(x))?)
}

/// Compares the straight path from `x` to `y` against 200 perturbed
/// piecewise-linear paths with the same endpoints, all discretized on `k`
/// knots. Returns the straight-line running cost and the cheapest
/// perturbed one; for a convex cost the line always wins (discrete Jensen),
/// so `best_perturbed >= line_cost - 1e-9` is the checked contract.
pub fn straight_line_cost_check<S: Scalar>(
    cost: &CostSpec<S>,
    x: S,
    y: S,
    k: usize,
) -> Result<(S, S)> {
    if k < 8 {
        return Err(Error::InvalidInput {
            what: "path knots",
            why: format!("need at least 8, got {k}"),
        });
    }
    let segments = k - 1;
    let dt = S::one() / cast::<S>(segments as f64);
    let path_cost = |knots: &[S]| -> S {
        knots
            .windows(2)
            .map(|w| cost.eval((w[1] - w[0]) / dt) * dt)
            .fold(S::zero(), |acc, c| acc + c)
    };
    let line: Vec<S> = (0..k)
        .map(|j| {
            let t = cast::<S>(j as f64 / segments as f64);
            x + t * (y - x)
        })
        .collect();
    let line_cost = path_cost(&line);

    let amplitude = cast::<S>(0.3) * ((y - x).abs() + S::one());
    let mut best = S::infinity();
    let mut knots = line.clone();
    for trial in 0..200u64 {
        for (j, slot) in knots.iter_mut().enumerate() {
            let frac = j as f64 / segments as f64;
            let bump = if trial % 2 == 0 {
                // sinusoidal bump, frequency cycling over 1..3 half-waves
                let m = (trial / 2) % 3 + 1;
                let a = rng::uniform::<f64>(PERTURBATION_SEED, trial, 0) - 0.5;
                cast::<S>(2.0 * a * (m as f64 * std::f64::consts::PI * frac).sin())
            } else {
                // independent random offsets at interior knots
                let u = rng::uniform::<f64>(PERTURBATION_SEED, trial, j as u64) - 0.5;
                if j == 0 || j == segments {
                    S::zero()
                } else {
                    cast::<S>(2.0 * u)
                }
            };
            *slot = line[j] + amplitude * bump;
        }
        let c = path_cost(&knots);
        if c < best {
            best = c;
        }
    }
    Ok((line_cost, best))
}
