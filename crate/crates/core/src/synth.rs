//! Seeded synthetic recordings with a known pulse rate.
//!
//! Used by the test suites and by `pulseframe synth` to produce inputs whose
//! ground truth is known exactly.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::cli::frames::RgbFrame;
use crate::domain::{FreqBand, RgbTrace};
use crate::error::{Error, Result};
use crate::ibcg::TrajectorySet;

/// Color-trace generator: each channel is
/// `dc * (1 + depth * gain * sin(2 pi f t)) + drift * t + noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbSynth {
    pub fs: f64,
    pub duration_s: f64,
    pub pulse_hz: f64,
    /// Relative pulsatile strength per channel (r, g, b).
    pub gains: [f64; 3],
    /// Mean channel levels (8-bit scale).
    pub dc: [f64; 3],
    /// Fractional modulation depth of a unit-gain channel.
    pub depth: f64,
    /// Linear drift per second, as a fraction of each channel's level.
    pub drift_per_s: f64,
    /// Per-channel noise power relative to that channel's pulse power,
    /// measured inside `band`; `None` disables noise.
    pub in_band_snr_db: Option<f64>,
    pub band: FreqBand,
    pub seed: u64,
}

impl Default for RgbSynth {
    fn default() -> Self {
        Self {
            fs: 30.0,
            duration_s: 60.0,
            pulse_hz: 1.5,
            gains: [0.7, 1.0, 0.5],
            dc: [160.0, 110.0, 90.0],
            depth: 0.01,
            drift_per_s: 0.002,
            in_band_snr_db: Some(0.0),
            band: FreqBand::PULSE,
            seed: 0,
        }
    }
}

impl RgbSynth {
    pub fn generate(&self) -> Result<RgbTrace> {
        let n = (self.duration_s * self.fs).round() as usize;
        if n < 2 {
            return Err(Error::invalid("synthetic recording is shorter than two samples"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let nyquist = self.fs / 2.0;
        let in_band_fraction = (self.band.high_hz.min(nyquist) - self.band.low_hz) / nyquist;
        let mut channels: [Vec<f64>; 3] = Default::default();
        for (c, out) in channels.iter_mut().enumerate() {
            let amp = self.dc[c] * self.depth * self.gains[c];
            let sigma = match self.in_band_snr_db {
                Some(db) => {
                    let pulse_power = amp * amp / 2.0;
                    let in_band_noise = pulse_power / 10f64.powf(db / 10.0);
                    (in_band_noise / in_band_fraction).sqrt()
                }
                None => 0.0,
            };
            *out = (0..n)
                .map(|i| {
                    let t = i as f64 / self.fs;
                    let noise: f64 = if sigma > 0.0 {
                        sigma * { let v: f64 = StandardNormal.sample(&mut rng); v }
                    } else {
                        0.0
                    };
                    self.dc[c] * (1.0 + self.depth * self.gains[c] * (2.0 * PI * self.pulse_hz * t).sin())
                        + self.dc[c] * self.drift_per_s * t
                        + noise
                })
                .collect();
        }
        let [r, g, b] = channels;
        RgbTrace::from_channels(r, g, b, self.fs)
    }
}

/// Vertical feature-point trajectories sharing one oscillation.
///
/// Point `i` moves by `lever_i * amplitude * sin(2 pi f t)` plus white noise,
/// where the lever factors are drawn uniformly from `lever_range` (points at
/// different distances from the neck pivot move by different amounts).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySynth {
    pub n_points: usize,
    pub fs: f64,
    pub duration_s: f64,
    pub pulse_hz: f64,
    pub amplitude_px: f64,
    pub lever_range: (f64, f64),
    pub noise_px: f64,
    pub seed: u64,
}

impl Default for TrajectorySynth {
    fn default() -> Self {
        Self {
            n_points: 20,
            fs: 30.0,
            duration_s: 60.0,
            pulse_hz: 1.0,
            amplitude_px: 0.5,
            lever_range: (0.5, 1.5),
            noise_px: 0.1,
            seed: 0,
        }
    }
}

impl TrajectorySynth {
    pub fn generate(&self) -> Result<TrajectorySet> {
        let n = (self.duration_s * self.fs).round() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let noise = Normal::new(0.0, self.noise_px.max(0.0))
            .map_err(|e| Error::invalid(format!("noise level: {e}")))?;
        let (lo, hi) = self.lever_range;
        let mut y = Vec::with_capacity(self.n_points);
        for i in 0..self.n_points {
            let lever = if hi > lo { rng.random_range(lo..hi) } else { lo };
            let rest = 100.0 + 10.0 * i as f64;
            y.push(
                (0..n)
                    .map(|s| {
                        let t = s as f64 / self.fs;
                        rest + lever * self.amplitude_px * (2.0 * PI * self.pulse_hz * t).sin()
                            + noise.sample(&mut rng)
                    })
                    .collect(),
            );
        }
        let ids = (0..self.n_points).map(|i| format!("p{i}")).collect();
        TrajectorySet::new(y, self.fs, ids)
    }
}

/// Textured skin-colored video whose colors follow an [`RgbSynth`] trace
/// and whose texture moves vertically by `motion_px * sin(2 pi motion_hz t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoSynth {
    pub color: RgbSynth,
    pub width: usize,
    pub height: usize,
    pub motion_px: f64,
    pub motion_hz: f64,
}

impl Default for VideoSynth {
    fn default() -> Self {
        Self {
            color: RgbSynth::default(),
            width: 64,
            height: 64,
            motion_px: 0.0,
            motion_hz: 1.0,
        }
    }
}

impl VideoSynth {
    fn texture(x: f64, y: f64) -> f64 {
        let v = (2.0 * PI * (x / 17.0 + y / 23.0)).sin()
            + 0.8 * (2.0 * PI * (x / 11.0 - y / 13.0)).cos()
            + 0.6 * (2.0 * PI * y / 9.0).sin();
        v / 2.4
    }

    pub fn generate(&self) -> Result<Vec<RgbFrame>> {
        let trace = self.color.generate()?;
        let fs = trace.fs();
        let [r, g, b] = trace.channels().map(|c| c.samples());
        (0..trace.len())
            .map(|i| {
                let shift = self.motion_px * (2.0 * PI * self.motion_hz * i as f64 / fs).sin();
                let base = [r[i], g[i], b[i]];
                let mut data = Vec::with_capacity(self.width * self.height * 3);
                for y in 0..self.height {
                    for x in 0..self.width {
                        let t = 1.0 + 0.25 * Self::texture(x as f64, y as f64 - shift);
                        data.extend(base.map(|c| (c * t).round().clamp(0.0, 255.0) as u8));
                    }
                }
                RgbFrame::new(self.width, self.height, data)
            })
            .collect()
    }
}
