//! Smoothness-priors detrending.

use crate::error::{Error, Result};

/// Smoothing parameter of the detrending operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetrendConfig {
    pub lambda: f64,
}

impl DetrendConfig {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid(format!("lambda must be >= 0, got {lambda}")));
        }
        Ok(Self { lambda })
    }
}

impl Default for DetrendConfig {
    fn default() -> Self {
        Self { lambda: 100.0 }
    }
}

/// Removes the slow trend `(I + lambda^2 D2' D2)^-1 x` from `x`.
///
/// `D2` is the `(n-2) x n` second-difference operator. The system matrix is
/// symmetric positive definite with half-bandwidth 2, so it is factored with
/// a banded Cholesky decomposition in O(n).
pub fn detrend_sp(x: &[f64], cfg: DetrendConfig) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 3 {
        return Err(Error::TooShort { needed: 3, got: n });
    }
    let lam2 = cfg.lambda * cfg.lambda;

    // Bands of I + lam2 * D2'D2: main diagonal, first and second sub-diagonals.
    let mut d0 = vec![1.0; n];
    let mut d1 = vec![0.0; n - 1];
    let mut d2 = vec![0.0; n - 2];
    const STENCIL: [f64; 3] = [1.0, -2.0, 1.0];
    for r in 0..n - 2 {
        for i in 0..3 {
            d0[r + i] += lam2 * STENCIL[i] * STENCIL[i];
            for j in 0..i {
                let v = lam2 * STENCIL[i] * STENCIL[j];
                match i - j {
                    1 => d1[r + j] += v,
                    _ => d2[r + j] += v,
                }
            }
        }
    }

    // L L' with L lower-triangular, bandwidth 2.
    let mut l0 = vec![0.0; n];
    let mut l1 = vec![0.0; n];
    let mut l2 = vec![0.0; n];
    for i in 0..n {
        if i >= 2 {
            l2[i] = d2[i - 2] / l0[i - 2];
        }
        if i >= 1 {
            let cross = if i >= 2 { l2[i] * l1[i - 1] } else { 0.0 };
            l1[i] = (d1[i - 1] - cross) / l0[i - 1];
        }
        let pivot = d0[i] - l1[i] * l1[i] - l2[i] * l2[i];
        if pivot <= 0.0 {
            return Err(Error::invalid("detrending system is not positive definite"));
        }
        l0[i] = pivot.sqrt();
    }

    let mut trend = vec![0.0; n];
    for i in 0..n {
        let mut s = x[i];
        if i >= 1 {
            s -= l1[i] * trend[i - 1];
        }
        if i >= 2 {
            s -= l2[i] * trend[i - 2];
        }
        trend[i] = s / l0[i];
    }
    for i in (0..n).rev() {
        let mut s = trend[i];
        if i + 1 < n {
            s -= l1[i + 1] * trend[i + 1];
        }
        if i + 2 < n {
            s -= l2[i + 2] * trend[i + 2];
        }
        trend[i] = s / l0[i];
    }

    Ok(x.iter().zip(&trend).map(|(v, t)| v - t).collect())
}
