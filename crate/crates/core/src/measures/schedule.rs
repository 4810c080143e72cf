//! Diffusion schedules for the particle simulators.
//!
//! A schedule bundles the time-dependent pieces of the forward dynamics
//!
//!   dx = -grad_psi(x, t) dt + sqrt(2 D(t)) dW
//!
//! under one of four patterns. The drift column: DDPM and VP use
//! `grad_psi = beta(t) x` (so particles drift by `-beta x`), VE has no drift,
//! ODE carries a caller-supplied deterministic field and `D = 0`.

use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

const VALIDATION_SAMPLES: usize = 257;

/// Which diffusion pattern a schedule describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Discrete denoising chain; continuous limit is VP.
    Ddpm,
    /// Variance-preserving SDE: `D(t) = beta(t)`, drift toward the origin.
    VpSde,
    /// Variance-exploding SDE: `D(t) = d(alpha)/dt`, no drift.
    VeSde,
    /// Deterministic flow: `D = 0`, drift from a given field.
    Ode,
}

impl Pattern {
    pub fn name(&self) -> &'static str {
        match self {
            Pattern::Ddpm => "ddpm",
            Pattern::VpSde => "vp-sde",
            Pattern::VeSde => "ve-sde",
            Pattern::Ode => "ode",
        }
    }
}

type TimeFn<S> = Box<dyn Fn(S) -> S + Send + Sync>;
type DriftFn<S> = Box<dyn Fn(S, S) -> S + Send + Sync>;

pub struct DiffusionSchedule<S: Scalar> {
    pattern: Pattern,
    diffusivity: TimeFn<S>,
    beta: TimeFn<S>,
    alpha: Option<TimeFn<S>>,
    drift: Option<DriftFn<S>>,
    horizon: S,
}

impl<S: Scalar> DiffusionSchedule<S> {
    /// Variance-preserving schedule: `D(t) = beta(t)`, `grad_psi = beta(t) x`.
    pub fn vp<F>(beta: F, horizon: S) -> Result<Self>
    where
        F: Fn(S) -> S + Send + Sync + Clone + 'static,
    {
        let d = beta.clone();
        Self::build(Pattern::VpSde, Box::new(d), Box::new(beta), None, None, horizon)
    }

    /// VP dynamics with an independently chosen diffusivity. The plain `vp`
    /// constructor ties `D = beta`; this one unties them (for instance a pure
    /// drift with `D = 0`).
    pub fn vp_with<F, G>(beta: F, diffusivity: G, horizon: S) -> Result<Self>
    where
        F: Fn(S) -> S + Send + Sync + 'static,
        G: Fn(S) -> S + Send + Sync + 'static,
    {
        Self::build(
            Pattern::VpSde,
            Box::new(diffusivity),
            Box::new(beta),
            None,
            None,
            horizon,
        )
    }

    /// Discrete-chain pattern; same continuous dynamics as `vp`.
    pub fn ddpm<F>(beta: F, horizon: S) -> Result<Self>
    where
        F: Fn(S) -> S + Send + Sync + Clone + 'static,
    {
        let d = beta.clone();
        Self::build(Pattern::Ddpm, Box::new(d), Box::new(beta), None, None, horizon)
    }

    /// Variance-exploding schedule: `alpha` is the accumulated variance and
    /// `alpha_rate` its derivative, which is the diffusivity.
    pub fn ve<F, G>(alpha: F, alpha_rate: G, horizon: S) -> Result<Self>
    where
        F: Fn(S) -> S + Send + Sync + 'static,
        G: Fn(S) -> S + Send + Sync + 'static,
    {
        // alpha must not decrease over the horizon.
        let n = VALIDATION_SAMPLES;
        let mut prev = alpha(S::zero());
        for k in 1..n {
            let t = horizon * cast(k as f64 / (n - 1) as f64);
            let a = alpha(t);
            if !a.is_finite() {
                return Err(Error::InvalidSchedule {
                    why: format!("alpha({t}) is not finite"),
                });
            }
            if a < prev - cast(1e-12) {
                return Err(Error::InvalidSchedule {
                    why: format!("alpha decreases near t = {t}"),
                });
            }
            prev = a;
        }
        Self::build(
            Pattern::VeSde,
            Box::new(alpha_rate),
            Box::new(|_| S::zero()),
            Some(Box::new(alpha)),
            None,
            horizon,
        )
    }

    /// Deterministic pattern: `D = 0`, drift is the given field `f(x, t)`.
    pub fn ode<F>(drift: F, horizon: S) -> Result<Self>
    where
        F: Fn(S, S) -> S + Send + Sync + 'static,
    {
        Self::build(
            Pattern::Ode,
            Box::new(|_| S::zero()),
            Box::new(|_| S::zero()),
            None,
            Some(Box::new(drift)),
            horizon,
        )
    }

    fn build(
        pattern: Pattern,
        diffusivity: TimeFn<S>,
        beta: TimeFn<S>,
        alpha: Option<TimeFn<S>>,
        drift: Option<DriftFn<S>>,
        horizon: S,
    ) -> Result<Self> {
        if !horizon.is_finite() || horizon <= S::zero() {
            return Err(Error::InvalidSchedule {
                why: format!("horizon must be positive and finite, got {horizon}"),
            });
        }
        let n = VALIDATION_SAMPLES;
        for k in 0..n {
            let t = horizon * cast(k as f64 / (n - 1) as f64);
            let d = diffusivity(t);
            if !d.is_finite() || d < S::zero() {
                return Err(Error::InvalidSchedule {
                    why: format!("diffusivity D({t}) = {d} must be finite and nonnegative"),
                });
            }
            let b = beta(t);
            if !b.is_finite() {
                return Err(Error::InvalidSchedule {
                    why: format!("beta({t}) is not finite"),
                });
            }
        }
        Ok(DiffusionSchedule {
            pattern,
            diffusivity,
            beta,
            alpha,
            drift,
            horizon,
        })
    }

    pub fn pattern(&self) -> Pattern {
        self.pattern
    }

    pub fn horizon(&self) -> S {
        self.horizon
    }

    pub fn diffusivity(&self, t: S) -> S {
        (self.diffusivity)(t)
    }

    /// Noise scale `sigma(t) = sqrt(2 D(t))`.
    pub fn sigma(&self, t: S) -> S {
        ((S::one() + S::one()) * self.diffusivity(t)).sqrt()
    }

    pub fn beta(&self, t: S) -> S {
        (self.beta)(t)
    }

    pub fn alpha(&self, t: S) -> Option<S> {
        self.alpha.as_ref().map(|a| a(t))
    }

    /// Gradient of the confining potential at `(x, t)` for this pattern.
    pub fn grad_potential(&self, x: S, t: S) -> S {
        match self.pattern {
            Pattern::Ddpm | Pattern::VpSde => (self.beta)(t) * x,
            Pattern::VeSde => S::zero(),
            Pattern::Ode => self.drift.as_ref().map(|f| f(x, t)).unwrap_or(S::zero()),
        }
    }
}

impl<S: Scalar> std::fmt::Debug for DiffusionSchedule<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "DiffusionSchedule({}, horizon = {})",
            self.pattern.name(),
            self.horizon
        )
    }
}
