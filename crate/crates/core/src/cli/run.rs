//! End-to-end pipeline: ingest, recover the pulse, score it, write outputs.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::frames::{ingest_frames, roi_mean, skin_mask, FrameSource, RgbFrame};
use super::io::{csv_text, fmt_f64, load_hr_csv, load_trace_csv, write_atomic};
use super::plot;
use crate::domain::{Bvp, FreqBand, Method, RgbTrace, Roi};
use crate::dsp::{nfft_for, power_spectrum_raw, DetrendConfig};
use crate::error::{Error, Result};
use crate::ibcg::{detect_features, ibcg_pulse, GrayFrame, LkConfig, Point, Tracker, TrajectorySet};
use crate::ippg::{chrom, green, ica_pulse, pos};
use crate::quality::{hr_series, mae, rmse, snr, HrSeries};

/// How `--input` is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputKind {
    TraceCsv,
    Raw,
    PpmDir,
    TrajectoryCsv,
}

impl InputKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InputKind::TraceCsv => "trace-csv",
            InputKind::Raw => "raw",
            InputKind::PpmDir => "ppm-dir",
            InputKind::TrajectoryCsv => "trajectory-csv",
        }
    }

    fn is_frames(&self) -> bool {
        matches!(self, InputKind::Raw | InputKind::PpmDir)
    }
}

impl FromStr for InputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trace-csv" => Ok(InputKind::TraceCsv),
            "raw" | "raw-frames" => Ok(InputKind::Raw),
            "ppm-dir" => Ok(InputKind::PpmDir),
            "trajectory-csv" => Ok(InputKind::TrajectoryCsv),
            _ => Err(Error::Config(format!("unknown input kind `{s}`"))),
        }
    }
}

/// Feature detection settings for tracking on frame input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureConfig {
    pub max_points: usize,
    pub quality: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            max_points: 100,
            quality: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    pub input: PathBuf,
    pub input_kind: InputKind,
    pub width: Option<usize>,
    pub height: Option<usize>,
    /// Frame rate; required for frame and trajectory input.
    pub fps: Option<f64>,
    pub roi: Roi,
    pub band: FreqBand,
    pub nfft: usize,
    pub hr_window_s: f64,
    pub hr_step_s: f64,
    pub ref_hr: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// Reserved for stochastic steps; the run pipeline itself is deterministic.
    pub seed: u64,
    pub detrend: DetrendConfig,
    pub lk: LkConfig,
    pub features: FeatureConfig,
}

impl RunConfig {
    pub fn new(method: Method, input: impl Into<PathBuf>, input_kind: InputKind) -> Self {
        Self {
            method,
            input: input.into(),
            input_kind,
            width: None,
            height: None,
            fps: None,
            roi: Roi::WholeFrame,
            band: FreqBand::PULSE,
            nfft: 4096,
            hr_window_s: 20.0,
            hr_step_s: 10.0,
            ref_hr: None,
            out_dir: PathBuf::from("."),
            seed: 0,
            detrend: DetrendConfig::default(),
            lk: LkConfig::default(),
            features: FeatureConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.input_kind;
        let ok = if self.method == Method::Ibcg {
            kind.is_frames() || kind == InputKind::TrajectoryCsv
        } else {
            kind.is_frames() || kind == InputKind::TraceCsv
        };
        if !ok {
            return Err(Error::Config(format!(
                "method {} cannot use {} input",
                self.method,
                kind.as_str()
            )));
        }
        if kind != InputKind::TraceCsv && !self.fps.is_some_and(|f| f.is_finite() && f > 0.0) {
            return Err(Error::Config(format!("{} input needs a positive --fps", kind.as_str())));
        }
        if kind == InputKind::Raw && (self.width.is_none() || self.height.is_none()) {
            return Err(Error::Config("raw input needs --width and --height".into()));
        }
        if self.nfft < 2 {
            return Err(Error::Config(format!("--nfft must be at least 2, got {}", self.nfft)));
        }
        if !(self.hr_window_s > 0.0 && self.hr_step_s > 0.0) {
            return Err(Error::Config("HR window and step must be positive".into()));
        }
        if self.input_kind != InputKind::Raw && self.input.as_os_str() == "-" {
            return Err(Error::Config("only raw input can be read from stdin".into()));
        }
        Ok(())
    }
}

/// Contents of `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub method: Method,
    pub fs: f64,
    pub n_samples: usize,
    pub hr_mean_bpm: f64,
    /// Mean SNR fraction over HR windows whose gold rate lies in 42-120 BPM.
    pub snr_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mae_bpm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmse_bpm: Option<f64>,
}

/// Everything a run computed, as written to the output directory.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub bvp: Bvp,
    pub hr: HrSeries,
    pub metrics: Metrics,
}

pub const OUTPUT_FILES: [&str; 5] = ["bvp.csv", "hr.csv", "metrics.json", "spectrum.csv", "plot.svg"];

fn frames_source(cfg: &RunConfig) -> FrameSource {
    match cfg.input_kind {
        InputKind::PpmDir => FrameSource::PpmDir(cfg.input.clone()),
        _ => FrameSource::Raw(cfg.input.clone()),
    }
}

fn color_trace(cfg: &RunConfig) -> Result<RgbTrace> {
    if cfg.input_kind == InputKind::TraceCsv {
        return load_trace_csv(&cfg.input);
    }
    let frames = ingest_frames(&frames_source(cfg), cfg.width, cfg.height)?;
    let mut ch: [Vec<f64>; 3] = Default::default();
    for (i, f) in frames.enumerate() {
        let m = roi_mean(&f?, cfg.roi, i)?;
        for c in 0..3 {
            ch[c].push(m[c]);
        }
    }
    let [r, g, b] = ch;
    RgbTrace::from_channels(r, g, b, cfg.fps.unwrap_or_default())
}

/// Features of the first frame restricted to the ROI.
fn initial_points(first: &RgbFrame, gray: &GrayFrame, cfg: &RunConfig) -> Result<Vec<Point>> {
    cfg.roi.check_bounds(first.width as u32, first.height as u32)?;
    let all = detect_features(gray, usize::MAX, cfg.features.quality)?;
    let mask = (cfg.roi == Roi::SkinMask).then(|| skin_mask(first));
    let inside = |p: &Point| match cfg.roi {
        Roi::WholeFrame => true,
        Roi::Rect { x, y, w, h } => {
            p.x >= x as f64 && p.y >= y as f64 && p.x < (x + w) as f64 && p.y < (y + h) as f64
        }
        Roi::SkinMask => mask.as_ref().unwrap()[p.y as usize * first.width + p.x as usize],
    };
    let picked: Vec<Point> = all
        .into_iter()
        .filter(inside)
        .take(cfg.features.max_points)
        .collect();
    if picked.is_empty() {
        return Err(Error::NoFeatures);
    }
    Ok(picked)
}

fn trajectories(cfg: &RunConfig) -> Result<TrajectorySet> {
    let fps = cfg.fps.unwrap_or_default();
    if cfg.input_kind == InputKind::TrajectoryCsv {
        return TrajectorySet::load_csv(&cfg.input, fps);
    }
    let mut frames = ingest_frames(&frames_source(cfg), cfg.width, cfg.height)?;
    let first = frames.next().ok_or(Error::TooShort { needed: 2, got: 0 })??;
    let gray = |f: &RgbFrame| GrayFrame::from_rgb24(f.width, f.height, &f.data);
    let g0 = gray(&first)?;
    let points = initial_points(&first, &g0, cfg)?;
    let mut tracker = Tracker::new(&g0, &points, cfg.lk)?;
    for f in frames {
        tracker.push(&gray(&f?)?)?;
    }
    tracker.finish(fps)
}

fn recover(cfg: &RunConfig) -> Result<Bvp> {
    match cfg.method {
        Method::Ibcg => ibcg_pulse(&trajectories(cfg)?, cfg.band).map(|(b, _)| b),
        m => {
            let x = color_trace(cfg)?;
            match m {
                Method::Green => green(&x, cfg.band),
                Method::Ica => ica_pulse(&x, cfg.band, cfg.detrend),
                Method::Chrom => chrom(&x, cfg.band),
                Method::Pos => pos(&x, cfg.band),
                Method::Ibcg => unreachable!(),
            }
        }
    }
}

/// Mean of reference samples inside `[t0, t1)`, or the nearest sample.
fn reference_rate(r: &HrSeries, t0: f64, t1: f64) -> f64 {
    let inside: Vec<f64> = r
        .t_s
        .iter()
        .zip(&r.bpm)
        .filter(|(t, _)| **t >= t0 && **t < t1)
        .map(|(_, b)| *b)
        .collect();
    if !inside.is_empty() {
        return inside.iter().sum::<f64>() / inside.len() as f64;
    }
    let mid = 0.5 * (t0 + t1);
    let k = (0..r.len())
        .min_by(|&a, &b| (r.t_s[a] - mid).abs().total_cmp(&(r.t_s[b] - mid).abs()))
        .expect("reference series is not empty");
    r.bpm[k]
}

/// Per-window SNR against the reference (or the window's own estimate),
/// averaged over windows whose gold rate the mask can represent.
fn mean_snr(bvp: &Bvp, hr: &HrSeries, reference: Option<&HrSeries>, cfg: &RunConfig) -> Result<Option<f64>> {
    let fs = bvp.fs();
    let half = cfg.hr_window_s / 2.0;
    let mut fractions = Vec::new();
    for (&tc, &est) in hr.t_s.iter().zip(&hr.bpm) {
        let (t0, t1) = (tc - half, tc + half);
        let gold = reference.map_or(est, |r| reference_rate(r, t0, t1));
        if !(42.0..=120.0).contains(&gold) {
            continue;
        }
        let s = ((t0 * fs).round().max(0.0) as usize).min(bvp.len());
        let e = ((t1 * fs).round() as usize).min(bvp.len());
        let piece = Bvp::new(bvp.samples()[s..e].to_vec(), fs, bvp.method)?;
        match snr(&piece, gold, cfg.nfft) {
            Ok(r) => fractions.push(r.fraction),
            Err(Error::ZeroPower) => fractions.push(0.0),
            Err(e) => return Err(e),
        }
    }
    Ok((!fractions.is_empty()).then(|| fractions.iter().sum::<f64>() / fractions.len() as f64))
}

/// Runs the whole pipeline and writes the five output files.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    cfg.band.validate_for(cfg.fps.unwrap_or(f64::INFINITY))?;
    let reference = cfg.ref_hr.as_deref().map(load_hr_csv).transpose()?;
    if reference.as_ref().is_some_and(HrSeries::is_empty) {
        return Err(Error::EmptySeries);
    }
    let bvp = recover(cfg)?;
    let fs = bvp.fs();
    let hr = hr_series(&bvp, cfg.band, cfg.hr_window_s, cfg.hr_step_s, cfg.nfft)?;
    let spectrum = power_spectrum_raw(bvp.samples(), fs, nfft_for(bvp.len(), cfg.nfft))?;
    let snr_fraction = mean_snr(&bvp, &hr, reference.as_ref(), cfg)?;

    let (snr_db, mae_bpm, rmse_bpm) = match &reference {
        Some(r) => (
            snr_fraction.map(|f| 10.0 * (f / (1.0 - f)).log10()).filter(|v| v.is_finite()),
            Some(mae(&hr, r)?),
            Some(rmse(&hr, r)?),
        ),
        None => (None, None, None),
    };
    let metrics = Metrics {
        method: bvp.method,
        fs,
        n_samples: bvp.len(),
        hr_mean_bpm: hr.mean_bpm().ok_or(Error::EmptySeries)?,
        snr_fraction,
        snr_db,
        mae_bpm,
        rmse_bpm,
    };

    let out = &cfg.out_dir;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let bvp_csv = csv_text(
        &["t", "value"],
        bvp.samples().iter().enumerate().map(|(i, &v)| vec![i as f64 / fs, v]),
    );
    let hr_csv = csv_text(&["t", "bpm"], hr.t_s.iter().zip(&hr.bpm).map(|(&t, &b)| vec![t, b]));
    let spectrum_csv = csv_text(
        &["hz", "power"],
        spectrum.freqs_hz.iter().zip(&spectrum.power).map(|(&f, &p)| vec![f, p]),
    );
    let mut json = serde_json::to_string_pretty(&metrics).expect("metrics serialize");
    json.push('\n');
    let title = format!("{} pulse, mean {} BPM", bvp.method, fmt_f64((hr.mean_bpm().unwrap_or(0.0) * 10.0).round() / 10.0));
    let svg = plot::render(&bvp, &spectrum, cfg.band, &title);

    write(out, "bvp.csv", bvp_csv.as_bytes())?;
    write(out, "hr.csv", hr_csv.as_bytes())?;
    write(out, "spectrum.csv", spectrum_csv.as_bytes())?;
    write(out, "plot.svg", svg.as_bytes())?;
    write(out, "metrics.json", json.as_bytes())?;
    Ok(RunOutput { bvp, hr, metrics })
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    write_atomic(&dir.join(name), bytes)
}
