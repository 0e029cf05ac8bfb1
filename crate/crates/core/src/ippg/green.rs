use crate::domain::{Bvp, FreqBand, Method, RgbTrace};
use crate::dsp::bandpass;
use crate::error::Result;

/// Band-passed green channel.
pub fn green(x: &RgbTrace, band: FreqBand) -> Result<Bvp> {
    let fs = x.fs();
    let y = bandpass(x.g().samples(), band, fs)?;
    Bvp::new(y, fs, Method::Green)
}
