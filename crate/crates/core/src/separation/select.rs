use super::SourceSet;
use crate::domain::FreqBand;
use crate::dsp::{default_lomb_grid, lomb, nfft_for, power_spectrum_raw, SpectralEstimate};
use crate::error::{Error, Result};

/// Spectral estimator used to score candidate sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// Zero-padded FFT power, at least 2048 bins.
    Fft,
    /// Lomb-Scargle periodogram over 0.5-4 Hz in 0.01 Hz steps.
    Lomb,
}

/// The selected source and its score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceChoice {
    pub index: usize,
    /// In-band peak power divided by total power, in `[0, 1]`.
    pub score: f64,
    pub peak_hz: f64,
}

/// Minimum FFT length used when scoring sources.
const MIN_NFFT: usize = 2048;

pub(crate) fn spectrum_of(x: &[f64], fs: f64, kind: SpectrumKind) -> Result<SpectralEstimate> {
    match kind {
        SpectrumKind::Fft => power_spectrum_raw(x, fs, nfft_for(x.len(), MIN_NFFT)),
        SpectrumKind::Lomb => {
            let times: Vec<f64> = (0..x.len()).map(|i| i as f64 / fs).collect();
            lomb(&times, x, &default_lomb_grid())
        }
    }
}

/// Picks, among the first `top_k` sources, the one whose largest in-band
/// spectral bin holds the greatest share of that source's total power.
///
/// Ties go to the lower index.
pub fn select_source(
    s: &SourceSet,
    band: FreqBand,
    kind: SpectrumKind,
    top_k: usize,
) -> Result<SourceChoice> {
    if top_k == 0 || top_k > s.len() {
        return Err(Error::invalid(format!(
            "top_k must be in 1..={}, got {top_k}",
            s.len()
        )));
    }
    let mut best: Option<SourceChoice> = None;
    for (index, src) in s.sources.iter().take(top_k).enumerate() {
        let spec = spectrum_of(src, s.fs, kind)?;
        let peak = spec.argmax_in_band(band)?;
        let total = spec.total_power();
        let score = if total > 0.0 {
            (spec.power[peak] / total).clamp(0.0, 1.0)
        } else {
            0.0
        };
        if best.is_none_or(|b| score > b.score) {
            best = Some(SourceChoice {
                index,
                score,
                peak_hz: spec.freqs_hz[peak],
            });
        }
    }
    Ok(best.expect("top_k >= 1"))
}
