//! Uniform 1-D grid.

use crate::error::{Error, Result};
use crate::scalar::{as_f64, cast, Scalar};

/// Uniform grid of `m` cells on `[a, b]`. Cell `i` spans
/// `[a + i*h, a + (i+1)*h]` with center `a + (i + 1/2)*h`, `h = (b-a)/m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D<S: Scalar> {
    a: S,
    b: S,
    m: usize,
}

impl<S: Scalar> Grid1D<S> {
    /// At least 8 cells and a finite nonempty interval.
    pub fn new(a: S, b: S, m: usize) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidInput {
                what: "grid bounds",
                why: format!("need finite a < b, got [{}, {}]", a, b),
            });
        }
        if m < 8 {
            return Err(Error::InvalidInput {
                what: "grid resolution",
                why: format!("need at least 8 cells, got {m}"),
            });
        }
        Ok(Grid1D { a, b, m })
    }

    pub fn lo(&self) -> S {
        self.a
    }

    pub fn hi(&self) -> S {
        self.b
    }

    pub fn cells(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> S {
        (self.b - self.a) / cast(self.m as f64)
    }

    /// Center of cell `i`.
    pub fn center(&self, i: usize) -> S {
        debug_assert!(i < self.m);
        self.a + self.h() * cast(i as f64 + 0.5)
    }

    /// Edge `k`, for `k` in `0..=m`. Edge 0 is `a`, edge `m` is `b`.
    pub fn edge(&self, k: usize) -> S {
        debug_assert!(k <= self.m);
        if k == self.m {
            self.b
        } else {
            self.a + self.h() * cast(k as f64)
        }
    }

    pub fn centers(&self) -> Vec<S> {
        (0..self.m).map(|i| self.center(i)).collect()
    }

    /// Cell containing `x`; positions exactly at `b` land in the last cell.
    pub fn cell_of(&self, x: S) -> Result<usize> {
        if !(x >= self.a && x <= self.b) {
            return Err(Error::OutOfDomain {
                value: as_f64(x),
                lo: as_f64(self.a),
                hi: as_f64(self.b),
            });
        }
        let i = ((x - self.a) / self.h()).floor();
        let i = i.to_usize().unwrap_or(0);
        Ok(i.min(self.m - 1))
    }

    /// Clamps `x` into the domain and returns the containing cell.
    pub fn cell_of_clamped(&self, x: S) -> usize {
        let x = x.max(self.a).min(self.b);
        self.cell_of(x).expect("clamped position is inside the grid")
    }
}
