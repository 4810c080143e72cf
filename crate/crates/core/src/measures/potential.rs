//! Confining potentials.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

type ScalarFn<S> = Box<dyn Fn(S) -> S + Send + Sync>;

/// Potential with its gradient, plus the quadratic coefficient when the
/// potential is `beta * x^2 / 2` so closed-form comparisons can use it.
pub struct PotentialSpec<S: Scalar> {
    psi: ScalarFn<S>,
    grad: ScalarFn<S>,
    quadratic: Option<S>,
}

impl<S: Scalar> PotentialSpec<S> {
    /// `psi(x) = beta * x^2 / 2`, the harmonic well.
    pub fn quadratic(beta: S) -> Result<Self> {
        if !beta.is_finite() || beta < S::zero() {
            return Err(Error::InvalidInput {
                what: "quadratic coefficient",
                why: format!("need finite beta >= 0, got {beta}"),
            });
        }
        let half = S::one() / (S::one() + S::one());
        Ok(PotentialSpec {
            psi: Box::new(move |x| beta * x * x * half),
            grad: Box::new(move |x| beta * x),
            quadratic: Some(beta),
        })
    }

    /// Identically zero potential (pure diffusion).
    pub fn zero() -> Self {
        PotentialSpec {
            psi: Box::new(|_| S::zero()),
            grad: Box::new(|_| S::zero()),
            quadratic: None,
        }
    }

    /// Arbitrary potential; the caller supplies a consistent gradient.
    pub fn custom(
        psi: impl Fn(S) -> S + Send + Sync + 'static,
        grad: impl Fn(S) -> S + Send + Sync + 'static,
    ) -> Self {
        PotentialSpec {
            psi: Box::new(psi),
            grad: Box::new(grad),
            quadratic: None,
        }
    }

    pub fn psi(&self, x: S) -> S {
        (self.psi)(x)
    }

    pub fn grad(&self, x: S) -> S {
        (self.grad)(x)
    }

    /// `Some(beta)` when the potential is the harmonic well `beta x^2 / 2`.
    pub fn quadratic_coefficient(&self) -> Option<S> {
        self.quadratic
    }
}

impl<S: Scalar> std::fmt::Debug for PotentialSpec<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.quadratic {
            Some(b) => write!(f, "PotentialSpec(quadratic, beta = {b})"),
            None => write!(f, "PotentialSpec(custom)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_gradient_is_beta_x() {
        let p = PotentialSpec::quadratic(2.0f64).unwrap();
        assert_relative_eq!(p.psi(3.0), 9.0);
        assert_relative_eq!(p.grad(3.0), 6.0);
        assert_eq!(p.quadratic_coefficient(), Some(2.0));
    }

    #[test]
    fn rejects_negative_beta() {
        assert!(PotentialSpec::quadratic(-1.0f64).is_err());
    }

    #[test]
    fn zero_potential_vanishes() {
        let p = PotentialSpec::<f64>::zero();
        assert_eq!(p.psi(5.0), 0.0);
        assert_eq!(p.grad(5.0), 0.0);
        assert_eq!(p.quadratic_coefficient(), None);
    }
}
