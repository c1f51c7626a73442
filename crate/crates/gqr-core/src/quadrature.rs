//! Deterministic quadrature primitives: pairwise summation and composite
//! trapezoid rules on uniform grids.
//!
//! Summation order is fixed (recursive pairwise over a materialized term
//! list) so results are bit-stable and independent of thread count.

use crate::error::{CoreError, Result};

/// Recursive pairwise sum. Error grows like O(log n) in ulps instead of the
/// O(n) of naive left-to-right accumulation.
pub fn pairwise_sum(terms: &[f64]) -> f64 {
    const LEAF: usize = 32;
    match terms.len() {
        0 => 0.0,
        n if n <= LEAF => terms.iter().sum(),
        n => {
            let mid = n / 2;
            pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
        }
    }
}

/// Uniform 1-D grid with inclusive endpoints.
#[derive(Debug, Clone, Copy)]
pub struct UniformGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl UniformGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(CoreError::config(format!(
                "invalid grid interval [{lo}, {hi}]"
            )));
        }
        if n < 2 {
            return Err(CoreError::config(format!(
                "grid needs at least 2 points, got {n}"
            )));
        }
        Ok(UniformGrid { lo, hi, n })
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + self.step() * i as f64
    }

    /// Trapezoid weight for node `i` (half weight at the endpoints).
    pub fn weight(&self, i: usize) -> f64 {
        let h = self.step();
        if i == 0 || i == self.n - 1 {
            0.5 * h
        } else {
            h
        }
    }

    /// A grid over the same interval with roughly half the resolution.
    pub fn coarsened(&self) -> UniformGrid {
        UniformGrid {
            lo: self.lo,
            hi: self.hi,
            n: (self.n / 2).max(2),
        }
    }
}

/// Composite 2-D trapezoid rule over the tensor grid `gx` x `gy`.
///
/// Rows are summed pairwise, then combined pairwise, in a fixed order.
pub fn trapezoid_2d<F>(gx: &UniformGrid, gy: &UniformGrid, f: F) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let mut rows = Vec::with_capacity(gx.n);
    let mut row = vec![0.0; gy.n];
    for i in 0..gx.n {
        let x = gx.node(i);
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = f(x, gy.node(j)) * gy.weight(j);
        }
        rows.push(pairwise_sum(&row) * gx.weight(i));
    }
    pairwise_sum(&rows)
}

/// Value plus a Richardson error estimate from a half-resolution re-run.
#[derive(Debug, Clone, Copy)]
pub struct QuadEstimate {
    pub value: f64,
    /// |fine - coarse| / 3, the O(h^2) Richardson estimate of the fine-grid
    /// error (conservative for the exponentially convergent smooth case).
    pub error_estimate: f64,
}

impl QuadEstimate {
    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            self.error_estimate
        } else {
            (self.error_estimate / self.value).abs()
        }
    }
}

/// 2-D trapezoid with an attached error estimate.
pub fn trapezoid_2d_estimated<F>(gx: &UniformGrid, gy: &UniformGrid, f: F) -> QuadEstimate
where
    F: Fn(f64, f64) -> f64,
{
    let fine = trapezoid_2d(gx, gy, &f);
    let coarse = trapezoid_2d(&gx.coarsened(), &gy.coarsened(), &f);
    QuadEstimate {
        value: fine,
        error_estimate: (fine - coarse).abs() / 3.0,
    }
}
