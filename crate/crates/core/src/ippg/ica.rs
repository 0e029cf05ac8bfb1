use crate::domain::{Bvp, FreqBand, Method, RgbTrace};
use crate::dsp::{butter_bandpass, detrend_sp, ensure_variance, filtfilt, zscore, DetrendConfig};
use crate::error::{Error, Result};
use crate::separation::{jade, select_source, SourceChoice, SourceSet, SpectrumKind};

/// Minimum recording length for a stable three-channel separation.
const MIN_SECONDS: f64 = 10.0;

/// Everything the ICA pipeline decided, for diagnostics.
#[derive(Debug, Clone)]
pub struct IcaOutcome {
    pub bvp: Bvp,
    pub choice: SourceChoice,
    /// Band-passed JADE sources, in separation order.
    pub filtered: SourceSet,
    pub converged: bool,
    pub sweeps: usize,
}

/// Detrend, standardize, separate with JADE, band-pass and select the source
/// with the most concentrated in-band FFT power.
pub fn ica_decompose(x: &RgbTrace, band: FreqBand, cfg: DetrendConfig) -> Result<IcaOutcome> {
    let fs = x.fs();
    let needed = (MIN_SECONDS * fs).ceil() as usize;
    if x.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: x.len(),
        });
    }
    band.validate_for(fs)?;

    let mut normalized = Vec::with_capacity(3);
    for ch in x.channels() {
        ensure_variance(ch.samples())?;
        normalized.push(zscore(&detrend_sp(ch.samples(), cfg)?)?);
    }
    let sep = jade(&normalized, fs)?;

    let coeffs = butter_bandpass(3, band, fs)?;
    let filtered = sep
        .sources
        .sources
        .iter()
        .map(|s| filtfilt(&coeffs, s))
        .collect::<Result<Vec<_>>>()?;
    let filtered = SourceSet {
        sources: filtered,
        unmixing: sep.sources.unmixing.clone(),
        fs,
    };
    let choice = select_source(&filtered, band, SpectrumKind::Fft, filtered.len())?;
    let bvp = Bvp::new(filtered.sources[choice.index].clone(), fs, Method::Ica)?;
    Ok(IcaOutcome {
        bvp,
        choice,
        filtered,
        converged: sep.converged,
        sweeps: sep.sweeps,
    })
}

pub fn ica_pulse(x: &RgbTrace, band: FreqBand, cfg: DetrendConfig) -> Result<Bvp> {
    ica_decompose(x, band, cfg).map(|o| o.bvp)
}
