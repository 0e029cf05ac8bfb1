use rayon::prelude::*;

use super::SIGMA_FLOOR;
use crate::domain::{window_iter, window_mean, Bvp, FreqBand, Method, RgbTrace, WindowPlan};
use crate::dsp::stats::sample_std;
use crate::dsp::{butter_bandpass, filtfilt, hann, overlap_add, IirCoeffs};
use crate::error::{Error, Result};

/// Intermediate signals of one CHROM window.
#[derive(Debug, Clone, PartialEq)]
pub struct ChromWindowState {
    pub y_r: Vec<f64>,
    pub y_g: Vec<f64>,
    pub y_b: Vec<f64>,
    /// `3 y_r - 2 y_g`
    pub a_sig: Vec<f64>,
    /// `1.5 y_r + y_g - 1.5 y_b`
    pub b_sig: Vec<f64>,
    /// `std(A) / std(B)`
    pub alpha: f64,
    pub s_win: Vec<f64>,
}

/// Chrominance combination of already filtered, normalized channel windows.
pub fn chrom_window(y_r: &[f64], y_g: &[f64], y_b: &[f64]) -> Result<ChromWindowState> {
    let n = y_r.len();
    if y_g.len() != n || y_b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n} samples per channel window"),
            got: format!("g={}, b={}", y_g.len(), y_b.len()),
        });
    }
    let a_sig: Vec<f64> = (0..n).map(|i| 3.0 * y_r[i] - 2.0 * y_g[i]).collect();
    let b_sig: Vec<f64> = (0..n)
        .map(|i| 1.5 * y_r[i] + y_g[i] - 1.5 * y_b[i])
        .collect();
    let sd_b = sample_std(&b_sig);
    if sd_b <= SIGMA_FLOOR {
        return Err(Error::AlphaUndefined);
    }
    let alpha = sample_std(&a_sig) / sd_b;
    let s_win = (0..n)
        .map(|i| {
            3.0 * (1.0 - alpha / 2.0) * y_r[i] - 2.0 * (1.0 + alpha / 2.0) * y_g[i]
                + 1.5 * alpha * y_b[i]
        })
        .collect();
    Ok(ChromWindowState {
        y_r: y_r.to_vec(),
        y_g: y_g.to_vec(),
        y_b: y_b.to_vec(),
        a_sig,
        b_sig,
        alpha,
        s_win,
    })
}

/// CHROM pulse signal.
///
/// The channels are band-passed over their full length. Each 1.6 s window
/// (0.8 s hop) of the filtered channels is divided by the mean of the raw
/// channel over the same window, band-passed again, combined by
/// [`chrom_window`], tapered with a Hann window and overlap-added.
pub fn chrom(x: &RgbTrace, band: FreqBand) -> Result<Bvp> {
    let fs = x.fs();
    let coeffs = butter_bandpass(3, band, fs)?;
    let windows = window_iter(x.len(), fs, WindowPlan::CHROM)?;
    let len = windows[0].1 - windows[0].0;
    let taper = hann(len)?;

    let raw = x.channels().map(|c| c.samples());
    let filtered = raw
        .iter()
        .map(|c| filtfilt(&coeffs, c))
        .collect::<Result<Vec<_>>>()?;

    let pieces = windows
        .par_iter()
        .map(|&(s, e)| {
            let state = window_state(&coeffs, &raw, &filtered, s, e)?;
            Ok(state.s_win.iter().zip(&taper).map(|(v, w)| v * w).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let starts: Vec<usize> = windows.iter().map(|w| w.0).collect();
    let out = overlap_add(&pieces, &starts, x.len())?;
    Bvp::new(out, fs, Method::Chrom)
}

fn window_state(
    coeffs: &IirCoeffs,
    raw: &[&[f64]; 3],
    filtered: &[Vec<f64>],
    s: usize,
    e: usize,
) -> Result<ChromWindowState> {
    let mut y: [Vec<f64>; 3] = Default::default();
    for c in 0..3 {
        let mean = window_mean(&raw[c][s..e])?;
        let scaled: Vec<f64> = filtered[c][s..e].iter().map(|v| v / mean).collect();
        y[c] = filtfilt(coeffs, &scaled)?;
    }
    chrom_window(&y[0], &y[1], &y[2])
}
