//! JADE: joint approximate diagonalization of fourth-order cumulant matrices.

use nalgebra::DMatrix;

use super::{centered, dominant_entry, rows, shape, whiten, SourceSet};
use crate::dsp::stats::sample_std;
use crate::error::{Error, Result};

/// Stopping rule of the Jacobi sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JadeConfig {
    /// A sweep with no rotation angle above this (radians) ends the iteration.
    pub threshold: f64,
    pub max_sweeps: usize,
}

impl Default for JadeConfig {
    fn default() -> Self {
        Self {
            threshold: 1e-8,
            max_sweeps: 100,
        }
    }
}

/// Output of [`jade`]: the sources plus convergence bookkeeping.
///
/// When the sweep cap is reached the best iterate is still returned with
/// `converged == false`; [`Separation::check`] turns that into an error.
#[derive(Debug, Clone)]
pub struct Separation {
    pub sources: SourceSet,
    pub sweeps: usize,
    pub converged: bool,
}

impl Separation {
    pub fn check(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            Err(Error::NoConvergence {
                sweeps: self.sweeps,
            })
        }
    }
}

pub fn jade(x: &[Vec<f64>], fs: f64) -> Result<Separation> {
    jade_with(x, fs, JadeConfig::default())
}

/// Separates `K` (2 to 8) mixed channels into independent sources.
///
/// Sources are ordered by descending absolute excess kurtosis, scaled to unit
/// sample variance, and signed so that each source's largest-magnitude entry
/// in the mixing matrix is positive.
pub fn jade_with(x: &[Vec<f64>], fs: f64, cfg: JadeConfig) -> Result<Separation> {
    let (k, t) = shape(x)?;
    if !(2..=8).contains(&k) {
        return Err(Error::invalid(format!("JADE supports 2 to 8 channels, got {k}")));
    }
    if t < 10 * k * k {
        return Err(Error::TooShort {
            needed: 10 * k * k,
            got: t,
        });
    }
    let white = whiten(x)?;
    let z = DMatrix::from_fn(k, t, |i, j| white.data[i][j]);

    let mut cumulants = cumulant_matrices(&z);
    let energy: f64 = cumulants.iter().map(|m| m.norm_squared()).sum();

    let mut rotation = DMatrix::<f64>::identity(k, k);
    let mut sweeps = 0;
    let mut converged = false;
    // vanishing fourth cumulants leave nothing to diagonalize: the whitened
    // signals come back unrotated and flagged as not converged
    if energy > 1e-20 {
        while sweeps < cfg.max_sweeps {
            sweeps += 1;
            let mut rotated = false;
            for p in 0..k - 1 {
                for q in p + 1..k {
                    let (mut g11, mut g22, mut g12) = (0.0, 0.0, 0.0);
                    for m in &cumulants {
                        let on = m[(p, p)] - m[(q, q)];
                        let off = m[(p, q)] + m[(q, p)];
                        g11 += on * on;
                        g22 += off * off;
                        g12 += on * off;
                    }
                    let ton = g11 - g22;
                    let toff = 2.0 * g12;
                    let theta = 0.5 * toff.atan2(ton + ton.hypot(toff));
                    if theta.abs() > cfg.threshold {
                        rotated = true;
                        let (s, c) = theta.sin_cos();
                        givens_columns(&mut rotation, p, q, c, s);
                        for m in cumulants.iter_mut() {
                            givens_columns(m, p, q, c, s);
                            givens_rows(m, p, q, c, s);
                        }
                    }
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
    }

    let mut unmixing = rotation.transpose() * &white.sphering;
    let (xc, _) = centered(x);
    let mut sources = &unmixing * &xc;

    // order by descending |excess kurtosis|
    let kurt: Vec<f64> = (0..k)
        .map(|i| {
            let row: Vec<f64> = sources.row(i).iter().copied().collect();
            excess_kurtosis(&row).abs()
        })
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| kurt[b].total_cmp(&kurt[a]).then(a.cmp(&b)));
    unmixing = DMatrix::from_fn(k, k, |i, j| unmixing[(order[i], j)]);
    sources = DMatrix::from_fn(k, t, |i, j| sources[(order[i], j)]);

    let mixing = unmixing
        .clone()
        .try_inverse()
        .ok_or(Error::SingularCovariance)?;
    for i in 0..k {
        let row: Vec<f64> = sources.row(i).iter().copied().collect();
        let sd = sample_std(&row);
        let col: Vec<f64> = mixing.column(i).iter().copied().collect();
        let sign = if dominant_entry(&col) < 0.0 { -1.0 } else { 1.0 };
        let f = if sd > 0.0 { sign / sd } else { sign };
        unmixing.row_mut(i).scale_mut(f);
        sources.row_mut(i).scale_mut(f);
    }

    Ok(Separation {
        sources: SourceSet {
            sources: rows(&sources),
            unmixing,
            fs,
        },
        sweeps,
        converged,
    })
}

/// The `K(K+1)/2` cumulant matrices `Q(E_ij)` of whitened data, with
/// off-diagonal `i != j` terms weighted by `sqrt(2)`.
fn cumulant_matrices(z: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
    let (k, t) = z.shape();
    let tf = t as f64;
    let r = z * z.transpose() / tf;
    let mut out = Vec::with_capacity(k * (k + 1) / 2);
    for i in 0..k {
        for j in 0..=i {
            let weight = if i == j { 1.0 } else { std::f64::consts::SQRT_2 };
            let mut q = DMatrix::<f64>::zeros(k, k);
            for s in 0..t {
                let w = z[(i, s)] * z[(j, s)];
                for p in 0..k {
                    let wp = w * z[(p, s)];
                    for qq in 0..=p {
                        q[(p, qq)] += wp * z[(qq, s)];
                    }
                }
            }
            for p in 0..k {
                for qq in 0..=p {
                    let v = q[(p, qq)] / tf
                        - r[(i, j)] * r[(p, qq)]
                        - r[(i, p)] * r[(j, qq)]
                        - r[(i, qq)] * r[(j, p)];
                    q[(p, qq)] = weight * v;
                    q[(qq, p)] = weight * v;
                }
            }
            out.push(q);
        }
    }
    out
}

/// `M <- M G` restricted to columns `p`, `q` with `G = [c -s; s c]`.
fn givens_columns(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let (a, b) = (m[(r, p)], m[(r, q)]);
        m[(r, p)] = c * a + s * b;
        m[(r, q)] = -s * a + c * b;
    }
}

/// `M <- G' M` restricted to rows `p`, `q`.
fn givens_rows(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for col in 0..m.ncols() {
        let (a, b) = (m[(p, col)], m[(q, col)]);
        m[(p, col)] = c * a + s * b;
        m[(q, col)] = -s * a + c * b;
    }
}

fn excess_kurtosis(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    if m2 == 0.0 {
        return 0.0;
    }
    m4 / (m2 * m2) - 3.0
}
