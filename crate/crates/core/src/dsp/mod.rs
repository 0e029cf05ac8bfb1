//! Numerical primitives: band-pass filtering, detrending, standardization,
//! spectra and overlap-add windows.

mod detrend;
mod filter;
mod spectrum;
pub mod stats;
mod window;

pub use detrend::{detrend_sp, DetrendConfig};
pub use filter::{bandpass, butter_bandpass, filtfilt, IirCoeffs};
pub use spectrum::{
    default_lomb_grid, frequency_grid, lomb, nfft_for, power_spectrum, SpectralEstimate,
};
pub(crate) use spectrum::power_spectrum_raw;
pub use window::{hann, overlap_add};

use crate::error::{Error, Result};

/// Fails with `ZeroVariance` when `x` is constant to within rounding.
pub fn ensure_variance(x: &[f64]) -> Result<()> {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || stats::sample_std(x) <= 1e-12 * scale {
        return Err(Error::ZeroVariance);
    }
    Ok(())
}

/// Standardizes to zero mean and unit sample standard deviation.
pub fn zscore(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: x.len(),
        });
    }
    ensure_variance(x)?;
    let m = stats::mean(x);
    let s = stats::sample_std(x);
    Ok(x.iter().map(|v| (v - m) / s).collect())
}
