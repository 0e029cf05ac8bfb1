//! FFT power spectrum and the Lomb-Scargle periodogram.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::domain::{FreqBand, Trace};
use crate::dsp::stats::{mean, sample_var};
use crate::error::{Error, Result};

/// Power over an ascending frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    pub freqs_hz: Vec<f64>,
    pub power: Vec<f64>,
}

impl SpectralEstimate {
    pub fn len(&self) -> usize {
        self.freqs_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs_hz.is_empty()
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    /// Index of the largest in-band bin; the lowest index wins ties.
    pub fn argmax_in_band(&self, band: FreqBand) -> Result<usize> {
        let mut best: Option<usize> = None;
        for (i, (&f, &p)) in self.freqs_hz.iter().zip(&self.power).enumerate() {
            if band.contains(f) && best.is_none_or(|b| p > self.power[b]) {
                best = Some(i);
            }
        }
        best.ok_or(Error::EmptyBand {
            low_hz: band.low_hz,
            high_hz: band.high_hz,
        })
    }

    /// Frequency of the largest bin overall.
    pub fn peak_hz(&self) -> Option<f64> {
        let mut best: Option<usize> = None;
        for (i, &p) in self.power.iter().enumerate() {
            if best.is_none_or(|b| p > self.power[b]) {
                best = Some(i);
            }
        }
        best.map(|i| self.freqs_hz[i])
    }
}

/// One-sided power spectrum of the mean-removed, zero-padded trace.
///
/// Bins are `k * fs / nfft` for `k = 0..=nfft/2`. Interior bins are doubled
/// so that the bins sum to the signal energy `sum((x - mean)^2)`.
pub fn power_spectrum(x: &Trace, nfft: usize) -> Result<SpectralEstimate> {
    power_spectrum_raw(x.samples(), x.fs(), nfft)
}

pub(crate) fn power_spectrum_raw(x: &[f64], fs: f64, nfft: usize) -> Result<SpectralEstimate> {
    if !nfft.is_power_of_two() || nfft < x.len() || nfft < 2 {
        return Err(Error::invalid(format!(
            "nfft must be a power of two >= signal length {}, got {nfft}",
            x.len()
        )));
    }
    let m = mean(x);
    let mut buf: Vec<Complex64> = x
        .iter()
        .map(|v| Complex64::new(v - m, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(nfft)
        .collect();
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);

    let half = nfft / 2;
    let scale = 1.0 / nfft as f64;
    let power = (0..=half)
        .map(|k| {
            let p = buf[k].norm_sqr() * scale;
            if k == 0 || k == half {
                p
            } else {
                2.0 * p
            }
        })
        .collect();
    let freqs_hz = (0..=half).map(|k| k as f64 * fs / nfft as f64).collect();
    Ok(SpectralEstimate { freqs_hz, power })
}

/// Smallest power of two that is at least `n` and at least `floor`.
pub fn nfft_for(n: usize, floor: usize) -> usize {
    n.max(floor).next_power_of_two()
}

/// Uniform frequency grid from `lo` to `hi` inclusive.
pub fn frequency_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step).round() as usize + 1;
    (0..count).map(|i| lo + i as f64 * step).collect()
}

/// Default periodogram grid: 0.01 Hz steps over 0.5-4 Hz.
pub fn default_lomb_grid() -> Vec<f64> {
    frequency_grid(0.5, 4.0, 0.01)
}

/// Classical normalized Lomb-Scargle periodogram.
///
/// Each frequency uses its own time offset `tau` with
/// `tan(2 w tau) = sum sin(2 w t) / sum cos(2 w t)`; power is divided by twice
/// the sample variance.
pub fn lomb(times: &[f64], x: &[f64], freqs_hz: &[f64]) -> Result<SpectralEstimate> {
    if times.len() != x.len() {
        return Err(Error::invalid("times and samples differ in length"));
    }
    if x.len() < 4 {
        return Err(Error::TooShort {
            needed: 4,
            got: x.len(),
        });
    }
    if freqs_hz.iter().any(|&f| !(f > 0.0 && f.is_finite())) {
        return Err(Error::invalid("periodogram frequencies must be positive"));
    }
    if freqs_hz.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("periodogram frequencies must be strictly ascending"));
    }
    let m = mean(x);
    let var = sample_var(x);
    let centered: Vec<f64> = x.iter().map(|v| v - m).collect();

    let power = freqs_hz
        .iter()
        .map(|&f| {
            if var == 0.0 {
                return 0.0;
            }
            let w = 2.0 * PI * f;
            let (s2, c2) = times.iter().fold((0.0, 0.0), |(s, c), &t| {
                let (sn, cs) = (2.0 * w * t).sin_cos();
                (s + sn, c + cs)
            });
            let tau = s2.atan2(c2) / (2.0 * w);
            let (mut yc, mut ys, mut cc, mut ss) = (0.0, 0.0, 0.0, 0.0);
            for (&t, &y) in times.iter().zip(&centered) {
                let (sn, cs) = (w * (t - tau)).sin_cos();
                yc += y * cs;
                ys += y * sn;
                cc += cs * cs;
                ss += sn * sn;
            }
            let cos_term = if cc > 0.0 { yc * yc / cc } else { 0.0 };
            let sin_term = if ss > 0.0 { ys * ys / ss } else { 0.0 };
            (cos_term + sin_term) / (2.0 * var)
        })
        .collect();
    Ok(SpectralEstimate {
        freqs_hz: freqs_hz.to_vec(),
        power,
    })
}
