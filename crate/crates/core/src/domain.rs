//! Value types shared by every pipeline: traces, bands, window plans, ROIs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled real-valued signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    samples: Vec<f64>,
    fs: f64,
    label: String,
}

impl Trace {
    pub fn new(samples: Vec<f64>, fs: f64, label: impl Into<String>) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::invalid(format!("sampling rate must be positive, got {fs}")));
        }
        if samples.len() < 2 {
            return Err(Error::TooShort {
                needed: 2,
                got: samples.len(),
            });
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            samples,
            fs,
            label: label.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }
}

/// Per-frame spatial averages of the red, green and blue channels.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbTrace {
    r: Trace,
    g: Trace,
    b: Trace,
}

impl RgbTrace {
    pub fn new(r: Trace, g: Trace, b: Trace) -> Result<Self> {
        if r.len() != g.len() || r.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} samples per channel", r.len()),
                got: format!("g={}, b={}", g.len(), b.len()),
            });
        }
        if r.fs() != g.fs() || r.fs() != b.fs() {
            return Err(Error::DimensionMismatch {
                expected: format!("fs={} for every channel", r.fs()),
                got: format!("g={}, b={}", g.fs(), b.fs()),
            });
        }
        Ok(Self { r, g, b })
    }

    /// Builds the three channel traces from raw sample vectors.
    pub fn from_channels(r: Vec<f64>, g: Vec<f64>, b: Vec<f64>, fs: f64) -> Result<Self> {
        Self::new(
            Trace::new(r, fs, "r")?,
            Trace::new(g, fs, "g")?,
            Trace::new(b, fs, "b")?,
        )
    }

    pub fn r(&self) -> &Trace {
        &self.r
    }

    pub fn g(&self) -> &Trace {
        &self.g
    }

    pub fn b(&self) -> &Trace {
        &self.b
    }

    pub fn channels(&self) -> [&Trace; 3] {
        [&self.r, &self.g, &self.b]
    }

    pub fn fs(&self) -> f64 {
        self.r.fs()
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// A pass band in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreqBand {
    pub low_hz: f64,
    pub high_hz: f64,
}

impl FreqBand {
    /// Pass band shared by every method: 0.7-2.5 Hz (42-150 BPM).
    pub const PULSE: FreqBand = FreqBand {
        low_hz: 0.7,
        high_hz: 2.5,
    };

    pub fn new(low_hz: f64, high_hz: f64) -> Result<Self> {
        if !(low_hz.is_finite() && high_hz.is_finite() && 0.0 < low_hz && low_hz < high_hz) {
            return Err(Error::invalid(format!(
                "band must satisfy 0 < low < high, got {low_hz}-{high_hz} Hz"
            )));
        }
        Ok(Self { low_hz, high_hz })
    }

    /// Checks `0 < low < high < fs/2`.
    pub fn validate_for(&self, fs: f64) -> Result<()> {
        let nyquist_hz = fs / 2.0;
        if !(0.0 < self.low_hz && self.low_hz < self.high_hz && self.high_hz < nyquist_hz) {
            return Err(Error::BandOutOfRange {
                low_hz: self.low_hz,
                high_hz: self.high_hz,
                nyquist_hz,
            });
        }
        Ok(())
    }

    pub fn contains(&self, hz: f64) -> bool {
        self.low_hz <= hz && hz <= self.high_hz
    }
}

impl Default for FreqBand {
    fn default() -> Self {
        Self::PULSE
    }
}

/// Sliding-window geometry in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowPlan {
    pub length_s: f64,
    pub step_s: f64,
}

impl WindowPlan {
    /// 1.6 s windows with a 0.8 s hop (CHROM).
    pub const CHROM: WindowPlan = WindowPlan {
        length_s: 1.6,
        step_s: 0.8,
    };

    pub fn new(length_s: f64, step_s: f64) -> Result<Self> {
        if !(step_s.is_finite() && length_s.is_finite() && 0.0 < step_s && step_s <= length_s) {
            return Err(Error::invalid(format!(
                "window plan must satisfy 0 < step <= length, got length={length_s} step={step_s}"
            )));
        }
        Ok(Self { length_s, step_s })
    }

    /// 1.6 s windows advancing one frame at a time (POS).
    pub fn pos(fs: f64) -> Self {
        Self {
            length_s: 1.6,
            step_s: 1.0 / fs,
        }
    }

    /// Window length in samples, rounded half to even.
    pub fn length_samples(&self, fs: f64) -> usize {
        (self.length_s * fs).round_ties_even() as usize
    }

    pub fn step_samples(&self, fs: f64) -> usize {
        (self.step_s * fs).round_ties_even() as usize
    }
}

/// Region of interest inside a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Roi {
    WholeFrame,
    Rect { x: u32, y: u32, w: u32, h: u32 },
    SkinMask,
}

impl Roi {
    pub fn check_bounds(&self, width: u32, height: u32) -> Result<()> {
        if let Roi::Rect { x, y, w, h } = *self {
            let fits = w > 0
                && h > 0
                && x.checked_add(w).is_some_and(|r| r <= width)
                && y.checked_add(h).is_some_and(|b| b <= height);
            if !fits {
                return Err(Error::Config(format!(
                    "rectangle ROI {x},{y},{w},{h} is not inside a {width}x{height} frame"
                )));
            }
        }
        Ok(())
    }
}

impl FromStr for Roi {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whole" => Ok(Roi::WholeFrame),
            "skin" => Ok(Roi::SkinMask),
            _ => {
                let spec = s
                    .strip_prefix("rect:")
                    .ok_or_else(|| Error::Config(format!("unknown ROI `{s}`")))?;
                let parts = spec
                    .split(',')
                    .map(|p| p.trim().parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Config(format!("bad rectangle ROI `{s}`: {e}")))?;
                match parts[..] {
                    [x, y, w, h] => Ok(Roi::Rect { x, y, w, h }),
                    _ => Err(Error::Config(format!(
                        "rectangle ROI needs X,Y,W,H, got `{s}`"
                    ))),
                }
            }
        }
    }
}

/// Pulse-recovery method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Green,
    Ica,
    Chrom,
    Pos,
    Ibcg,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Green => "green",
            Method::Ica => "ica",
            Method::Chrom => "chrom",
            Method::Pos => "pos",
            Method::Ibcg => "ibcg",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "green" => Ok(Method::Green),
            "ica" => Ok(Method::Ica),
            "chrom" => Ok(Method::Chrom),
            "pos" => Ok(Method::Pos),
            "ibcg" => Ok(Method::Ibcg),
            _ => Err(Error::Config(format!("unknown method `{s}`"))),
        }
    }
}

/// A recovered blood volume pulse waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct Bvp {
    pub trace: Trace,
    pub method: Method,
}

impl Bvp {
    pub fn new(samples: Vec<f64>, fs: f64, method: Method) -> Result<Self> {
        Ok(Self {
            trace: Trace::new(samples, fs, method.as_str())?,
            method,
        })
    }

    pub fn samples(&self) -> &[f64] {
        self.trace.samples()
    }

    pub fn fs(&self) -> f64 {
        self.trace.fs()
    }

    pub fn len(&self) -> usize {
        self.trace.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trace.is_empty()
    }
}

/// Mean of a window, rejecting means that vanish relative to its peak.
pub fn window_mean(w: &[f64]) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    let peak = w.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 || mean.abs() < 1e-12 * peak {
        return Err(Error::ZeroMean);
    }
    Ok(mean)
}

/// Divides a window by its mean so that the result has mean one.
pub fn normalize_window(w: &[f64]) -> Result<Vec<f64>> {
    let mean = window_mean(w)?;
    Ok(w.iter().map(|v| v / mean).collect())
}

/// Half-open `[start, end)` index ranges of full windows over `n_samples`.
///
/// Trailing samples that do not fill a last window are dropped.
pub fn window_iter(n_samples: usize, fs: f64, plan: WindowPlan) -> Result<Vec<(usize, usize)>> {
    let len = plan.length_samples(fs);
    let step = plan.step_samples(fs);
    if len == 0 || step == 0 {
        return Err(Error::invalid(format!(
            "window plan {plan:?} rounds to zero samples at fs={fs}"
        )));
    }
    if n_samples < len {
        return Err(Error::TooShort {
            needed: len,
            got: n_samples,
        });
    }
    Ok((0..=n_samples - len)
        .step_by(step)
        .map(|start| (start, start + len))
        .collect())
}
