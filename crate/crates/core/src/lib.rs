//! Pulse recovery from video-derived color traces and head-motion trajectories.
//!
//! Five methods share one pass band (0.7-2.5 Hz): green-channel filtering,
//! ICA (JADE), CHROM, POS and ballistocardiography from tracked feature
//! points. [`quality`] scores the recovered pulse against a reference.

pub mod cli;
pub mod domain;
pub mod dsp;
pub mod error;
pub mod ibcg;
pub mod ippg;
pub mod quality;
pub mod separation;
pub mod synth;

pub use domain::{normalize_window, window_iter, Bvp, FreqBand, Method, RgbTrace, Roi, Trace, WindowPlan};
pub use error::{Error, Result};
