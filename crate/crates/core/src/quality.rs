//! Heart-rate readout and signal-quality metrics.

use serde::Serialize;

use crate::domain::{window_iter, Bvp, FreqBand, WindowPlan};
use crate::dsp::{nfft_for, power_spectrum_raw, SpectralEstimate};
use crate::error::{Error, Result};

/// Shortest signal a heart-rate or SNR estimate is computed on.
pub const MIN_ANALYSIS_S: f64 = 10.0;

/// Heart-rate estimates at window-center times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HrSeries {
    pub t_s: Vec<f64>,
    pub bpm: Vec<f64>,
}

impl HrSeries {
    pub fn new(t_s: Vec<f64>, bpm: Vec<f64>) -> Result<Self> {
        if t_s.len() != bpm.len() {
            return Err(Error::invalid("time and BPM columns differ in length"));
        }
        Ok(Self { t_s, bpm })
    }

    pub fn len(&self) -> usize {
        self.t_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_s.is_empty()
    }

    pub fn mean_bpm(&self) -> Option<f64> {
        (!self.is_empty()).then(|| self.bpm.iter().sum::<f64>() / self.len() as f64)
    }

    /// Value of the sample nearest in time to `t` (earlier sample on ties).
    fn nearest(&self, t: f64) -> f64 {
        let i = self.t_s.partition_point(|&x| x < t);
        if i == 0 {
            return self.bpm[0];
        }
        if i == self.len() {
            return self.bpm[i - 1];
        }
        if (self.t_s[i] - t) < (t - self.t_s[i - 1]) {
            self.bpm[i]
        } else {
            self.bpm[i - 1]
        }
    }
}

/// BVP signal-to-noise ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrReport {
    /// Power near the pulse rate and its first harmonic over power in 0-240 BPM.
    pub fraction: f64,
    /// `10 log10(fraction / (1 - fraction))`
    pub db: f64,
    pub gold_bpm: f64,
}

fn require_duration(b: &Bvp) -> Result<()> {
    let needed = (MIN_ANALYSIS_S * b.fs()).ceil() as usize;
    if b.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: b.len(),
        });
    }
    Ok(())
}

fn spectrum(b: &Bvp, nfft: usize) -> Result<SpectralEstimate> {
    power_spectrum_raw(b.samples(), b.fs(), nfft_for(b.len(), nfft))
}

/// Pulse rate in BPM: 60 times the frequency of the strongest in-band bin.
///
/// `nfft` is raised to the next power of two covering the signal if needed.
pub fn estimate_hr(b: &Bvp, band: FreqBand, nfft: usize) -> Result<f64> {
    require_duration(b)?;
    let spec = spectrum(b, nfft)?;
    let k = spec.argmax_in_band(band)?;
    Ok(60.0 * spec.freqs_hz[k])
}

/// [`estimate_hr`] over sliding windows; times are window centers.
pub fn hr_series(
    b: &Bvp,
    band: FreqBand,
    window_s: f64,
    step_s: f64,
    nfft: usize,
) -> Result<HrSeries> {
    let plan = WindowPlan::new(window_s, step_s)?;
    let fs = b.fs();
    let windows = window_iter(b.len(), fs, plan)?;
    let mut t_s = Vec::with_capacity(windows.len());
    let mut bpm = Vec::with_capacity(windows.len());
    for (s, e) in windows {
        let piece = Bvp::new(b.samples()[s..e].to_vec(), fs, b.method)?;
        bpm.push(estimate_hr(&piece, band, nfft)?);
        t_s.push((s as f64 + (e - s) as f64 / 2.0) / fs);
    }
    HrSeries::new(t_s, bpm)
}

/// Fraction of 0-240 BPM power within 6 BPM of `gold_bpm` or 12 BPM of
/// twice `gold_bpm`. Overlapping masks are counted once.
pub fn snr(b: &Bvp, gold_bpm: f64, nfft: usize) -> Result<SnrReport> {
    if !(42.0..=120.0).contains(&gold_bpm) {
        return Err(Error::invalid(format!(
            "gold-standard rate must be within 42-120 BPM, got {gold_bpm}"
        )));
    }
    require_duration(b)?;
    let spec = spectrum(b, nfft)?;
    let mut signal = 0.0;
    let mut total = 0.0;
    for (&f, &p) in spec.freqs_hz.iter().zip(&spec.power) {
        let bpm = 60.0 * f;
        if bpm > 240.0 {
            break;
        }
        total += p;
        if (bpm - gold_bpm).abs() <= 6.0 || (bpm - 2.0 * gold_bpm).abs() <= 12.0 {
            signal += p;
        }
    }
    if total <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let fraction = (signal / total).clamp(0.0, 1.0);
    Ok(SnrReport {
        fraction,
        db: 10.0 * (fraction / (1.0 - fraction)).log10(),
        gold_bpm,
    })
}

fn paired(est: &HrSeries, reference: &HrSeries) -> Result<Vec<f64>> {
    if est.is_empty() || reference.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(est
        .t_s
        .iter()
        .zip(&est.bpm)
        .map(|(&t, &v)| v - reference.nearest(t))
        .collect())
}

/// Mean absolute error, reference resampled to the estimate's times by
/// nearest neighbor.
pub fn mae(est: &HrSeries, reference: &HrSeries) -> Result<f64> {
    let d = paired(est, reference)?;
    Ok(d.iter().map(|v| v.abs()).sum::<f64>() / d.len() as f64)
}

/// Root mean squared error, paired as in [`mae`].
pub fn rmse(est: &HrSeries, reference: &HrSeries) -> Result<f64> {
    let d = paired(est, reference)?;
    Ok((d.iter().map(|v| v * v).sum::<f64>() / d.len() as f64).sqrt())
}
