use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::EXIT_CODE_TABLE;

#[derive(Debug, Parser)]
#[command(
    name = "pulseframe",
    version,
    about = "Recover the pulse from video-derived color traces or head motion",
    after_help = EXIT_CODE_TABLE
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover the pulse, estimate heart rate and write the output files
    #[command(after_help = EXIT_CODE_TABLE)]
    Run(RunArgs),
    /// Write a seeded synthetic input with a known pulse rate
    #[command(after_help = EXIT_CODE_TABLE)]
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// green, ica, chrom, pos or ibcg
    #[arg(long)]
    pub method: String,
    /// Input file or directory; `-` reads raw frames from stdin
    #[arg(long)]
    pub input: PathBuf,
    /// trace-csv, raw, ppm-dir or trajectory-csv
    #[arg(long)]
    pub input_kind: String,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// Frame rate of frame or trajectory input
    #[arg(long)]
    pub fps: Option<f64>,
    /// whole, skin or rect:X,Y,W,H
    #[arg(long, default_value = "whole")]
    pub roi: String,
    /// Pass band in Hz as LO,HI
    #[arg(long, default_value = "0.7,2.5")]
    pub band: String,
    /// Minimum FFT length for heart-rate spectra
    #[arg(long, default_value_t = 4096)]
    pub nfft: usize,
    /// Heart-rate window length in seconds
    #[arg(long, default_value_t = 20.0)]
    pub hr_window: f64,
    /// Heart-rate window step in seconds
    #[arg(long, default_value_t = 10.0)]
    pub hr_step: f64,
    /// Reference heart rate CSV with header `t,bpm`
    #[arg(long)]
    pub ref_hr: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tracker pyramid levels (ibcg on frames)
    #[arg(long, default_value_t = 3)]
    pub pyramid_levels: usize,
    /// Tracker window side in pixels (ibcg on frames)
    #[arg(long, default_value_t = 15)]
    pub lk_win: usize,
    /// Most feature points tracked (ibcg on frames)
    #[arg(long, default_value_t = 100)]
    pub max_points: usize,
    /// Smoothness-priors detrending parameter (ica)
    #[arg(long, default_value_t = 100.0)]
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    /// `t,r,g,b` color trace
    Trace,
    /// `frame,point_id,y` trajectories
    Trajectories,
    /// Raw RGB24 frames
    Raw,
    /// Directory of PPM frames
    PpmDir,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    /// Output file (or directory for ppm-dir)
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampling or frame rate
    #[arg(long, default_value_t = 30.0)]
    pub fs: f64,
    #[arg(long, default_value_t = 60.0)]
    pub duration: f64,
    /// Pulse frequency in Hz (defaults: 1.5 for color, 1.0 for motion)
    #[arg(long)]
    pub pulse_hz: Option<f64>,
    /// In-band noise level of color traces in dB; omit for the default 0 dB
    #[arg(long)]
    pub snr_db: Option<f64>,
    /// Write noiseless color traces
    #[arg(long)]
    pub no_noise: bool,
    /// Number of trajectories
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// Frame width and height for frame output
    #[arg(long, default_value_t = 64)]
    pub width: usize,
    #[arg(long, default_value_t = 64)]
    pub height: usize,
    /// Vertical motion amplitude in pixels for frame output
    #[arg(long, default_value_t = 0.0)]
    pub motion_px: f64,
}
