//! Scalar abstraction for all numerical kernels.
//!
//! Everything in this crate is generic over a floating-point scalar so the
//! same code runs in `f32` and `f64`. The crate root exports `f64` aliases,
//! which is what the command-line tool and the validation suites use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by the solvers.
///
/// `Send + Sync + 'static` is required so particle loops can run on a thread
/// pool; `Sum` so slices can be reduced without manual folds.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` constant into the working scalar type.
///
/// Panics only if the target type cannot represent any `f64` at all, which
/// does not happen for the provided impls (`f32` saturates instead).
#[inline]
pub fn cast<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("f64 constant must convert into the scalar type")
}

/// Lossy view of a scalar as `f64`, for error messages and reports.
#[inline]
pub fn as_f64<S: Scalar>(x: S) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Tolerance floor that adapts to the scalar's precision.
///
/// Returns `max(tol, scale * epsilon)`. In `f64` the stated tolerance wins;
/// in `f32` the floor grows so that construction checks remain usable.
#[inline]
pub fn precision_floor<S: Scalar>(tol: f64, scale: f64) -> S {
    let stated = cast::<S>(tol);
    let eps_floor = S::epsilon() * cast::<S>(scale);
    stated.max(eps_floor)
}
