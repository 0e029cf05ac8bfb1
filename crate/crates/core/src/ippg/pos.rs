use rayon::prelude::*;

use super::SIGMA_FLOOR;
use crate::domain::{normalize_window, window_iter, Bvp, FreqBand, Method, RgbTrace, WindowPlan};
use crate::dsp::bandpass;
use crate::dsp::stats::{mean, sample_std};
use crate::error::{Error, Result};

/// Intermediate signals of one POS window.
#[derive(Debug, Clone, PartialEq)]
pub struct PosWindowState {
    /// `g - b` of the normalized channels
    pub x_s: Vec<f64>,
    /// `-2 r + g + b` of the normalized channels
    pub y_s: Vec<f64>,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub s_win: Vec<f64>,
}

/// Projection onto the plane orthogonal to the skin tone, for one window of
/// mean-normalized channels.
///
/// A window where both projections are flat contributes zeros.
pub fn pos_window(r: &[f64], g: &[f64], b: &[f64]) -> Result<PosWindowState> {
    let n = r.len();
    if g.len() != n || b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{n} samples per channel window"),
            got: format!("g={}, b={}", g.len(), b.len()),
        });
    }
    let x_s: Vec<f64> = (0..n).map(|i| g[i] - b[i]).collect();
    let y_s: Vec<f64> = (0..n).map(|i| -2.0 * r[i] + g[i] + b[i]).collect();
    let sigma_x = sample_std(&x_s);
    let sigma_y = sample_std(&y_s);
    let s_win = if sigma_y <= SIGMA_FLOOR {
        if sigma_x <= SIGMA_FLOOR {
            vec![0.0; n]
        } else {
            return Err(Error::SigmaUndefined);
        }
    } else {
        let ratio = sigma_x / sigma_y;
        x_s.iter().zip(&y_s).map(|(x, y)| x + ratio * y).collect()
    };
    Ok(PosWindowState {
        x_s,
        y_s,
        sigma_x,
        sigma_y,
        s_win,
    })
}

/// Overlap-adds per-window POS signals without any taper.
///
/// With `subtract_mean` each window's mean is removed before accumulation.
pub fn pos_reconstruct(x: &RgbTrace, plan: WindowPlan, subtract_mean: bool) -> Result<Vec<f64>> {
    let windows = window_iter(x.len(), x.fs(), plan)?;
    let [r, g, b] = x.channels().map(|c| c.samples());
    let pieces = windows
        .par_iter()
        .map(|&(s, e)| {
            let st = pos_window(
                &normalize_window(&r[s..e])?,
                &normalize_window(&g[s..e])?,
                &normalize_window(&b[s..e])?,
            )?;
            let mut h = st.s_win;
            if subtract_mean {
                let m = mean(&h);
                h.iter_mut().for_each(|v| *v -= m);
            }
            Ok(h)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = vec![0.0; x.len()];
    for (h, &(s, e)) in pieces.iter().zip(&windows) {
        for (o, v) in out[s..e].iter_mut().zip(h) {
            *o += v;
        }
    }
    Ok(out)
}

/// POS pulse signal: 1.6 s windows stepping one frame, mean-removed
/// rectangular overlap-add, then the standard band-pass.
pub fn pos(x: &RgbTrace, band: FreqBand) -> Result<Bvp> {
    let fs = x.fs();
    band.validate_for(fs)?;
    let h = pos_reconstruct(x, WindowPlan::pos(fs), true)?;
    Bvp::new(bandpass(&h, band, fs)?, fs, Method::Pos)
}
