//! Command-line front end: ingestion, ROI averaging, method dispatch and
//! output files.

mod args;
pub mod frames;
pub mod io;
mod plot;
pub mod run;

pub use frames::{ingest_frames, is_skin, roi_mean, skin_mask, spatial_average, FrameSource, RgbFrame};
pub use io::{load_bvp_csv, load_hr_csv, load_trace_csv, read_trace_csv, write_atomic};
pub use run::{run, InputKind, Metrics, RunConfig, RunOutput, OUTPUT_FILES};

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::Parser;

use crate::dsp::DetrendConfig;
use crate::error::{Error, Result};
use crate::ibcg::LkConfig;
use crate::synth::{RgbSynth, TrajectorySynth, VideoSynth};
use crate::{FreqBand, Method, Roi};
use args::{Cli, Command, RunArgs, SynthArgs, SynthKind};

/// Environment variable capping the worker-thread count (0 = automatic).
pub const THREADS_ENV: &str = "PULSEFRAME_THREADS";

/// Single-line, machine-parsable error report.
pub fn error_line(e: &Error) -> String {
    let msg = serde_json::to_string(&e.to_string()).expect("string serializes");
    format!("error: kind={} code={} message={msg}", e.kind(), e.exit_code())
}

fn parse_band(s: &str) -> Result<FreqBand> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi] = parts[..] else {
        return Err(Error::Config(format!("band must be LO,HI, got `{s}`")));
    };
    let num = |v: &str| {
        v.parse::<f64>()
            .map_err(|_| Error::Config(format!("band edge `{v}` is not a number")))
    };
    FreqBand::new(num(lo)?, num(hi)?).map_err(|e| Error::Config(e.to_string()))
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")))?;
    if n > 0 {
        // a pool may already exist when called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn run_config(a: RunArgs) -> Result<RunConfig> {
    let method: Method = a.method.parse()?;
    let kind: InputKind = a.input_kind.parse()?;
    let mut cfg = RunConfig::new(method, a.input, kind);
    cfg.width = a.width;
    cfg.height = a.height;
    cfg.fps = a.fps;
    cfg.roi = a.roi.parse::<Roi>()?;
    cfg.band = parse_band(&a.band)?;
    cfg.nfft = a.nfft;
    cfg.hr_window_s = a.hr_window;
    cfg.hr_step_s = a.hr_step;
    cfg.ref_hr = a.ref_hr;
    cfg.out_dir = a.out;
    cfg.seed = a.seed;
    cfg.detrend = DetrendConfig::new(a.lambda).map_err(|e| Error::Config(e.to_string()))?;
    cfg.lk = LkConfig {
        pyramid_levels: a.pyramid_levels,
        win: a.lk_win,
        ..LkConfig::default()
    };
    cfg.features.max_points = a.max_points;
    Ok(cfg)
}

fn synth(a: SynthArgs) -> Result<String> {
    let color = RgbSynth {
        fs: a.fs,
        duration_s: a.duration,
        pulse_hz: a.pulse_hz.unwrap_or(1.5),
        in_band_snr_db: if a.no_noise { None } else { Some(a.snr_db.unwrap_or(0.0)) },
        seed: a.seed,
        ..RgbSynth::default()
    };
    let bytes = match a.kind {
        SynthKind::Trace => {
            let x = color.generate()?;
            let [r, g, b] = x.channels().map(|c| c.samples());
            io::csv_text(
                &["t", "r", "g", "b"],
                (0..x.len()).map(|i| vec![i as f64 / x.fs(), r[i], g[i], b[i]]),
            )
            .into_bytes()
        }
        SynthKind::Trajectories => {
            let t = TrajectorySynth {
                n_points: a.points,
                fs: a.fs,
                duration_s: a.duration,
                pulse_hz: a.pulse_hz.unwrap_or(1.0),
                seed: a.seed,
                ..TrajectorySynth::default()
            }
            .generate()?;
            let mut s = String::from("frame,point_id,y\n");
            for f in 0..t.frames() {
                for (id, y) in t.point_ids.iter().zip(&t.y) {
                    let _ = writeln!(s, "{f},{id},{}", io::fmt_f64(y[f]));
                }
            }
            s.into_bytes()
        }
        SynthKind::Raw | SynthKind::PpmDir => {
            let v = VideoSynth {
                color,
                width: a.width,
                height: a.height,
                motion_px: a.motion_px,
                motion_hz: a.pulse_hz.unwrap_or(1.5),
            };
            let frames = v.generate()?;
            if a.kind == SynthKind::PpmDir {
                std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
                for (i, f) in frames.iter().enumerate() {
                    write_atomic(&a.out.join(format!("frame{i:06}.ppm")), &frames::encode_ppm(f))?;
                }
                return Ok(format!("wrote {} frames to {}", frames.len(), a.out.display()));
            }
            frames.into_iter().flat_map(|f| f.data).collect()
        }
    };
    write_atomic(&a.out, &bytes)?;
    Ok(format!("wrote {}", a.out.display()))
}

fn dispatch(cli: Cli) -> Result<String> {
    configure_threads()?;
    match cli.command {
        Command::Run(a) => {
            let cfg = run_config(a)?;
            let out = run(&cfg)?;
            Ok(format!(
                "{}: {} samples at {} Hz, mean HR {:.1} BPM, outputs in {}",
                out.metrics.method,
                out.metrics.n_samples,
                io::fmt_f64(out.metrics.fs),
                out.metrics.hr_mean_bpm,
                cfg.out_dir.display()
            ))
        }
        Command::Synth(a) => synth(a),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
/// Errors are printed to stderr as one line (see [`error_line`]).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let summary: Vec<&str> = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect();
            let summary = summary.join(" ");
            let summary = summary.strip_prefix("error: ").unwrap_or(&summary);
            let err = Error::Config(summary.to_string());
            eprintln!("{}", error_line(&err));
            return err.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(msg) => {
            println!("{msg}");
            0
        }
        Err(e) => {
            eprintln!("{}", error_line(&e));
            e.exit_code()
        }
    }
}
