//! Photoplethysmographic pulse recovery from spatially averaged RGB traces.

mod chrom;
mod green;
mod ica;
mod pos;

pub use chrom::{chrom, chrom_window, ChromWindowState};
pub use green::green;
pub use ica::{ica_decompose, ica_pulse, IcaOutcome};
pub use pos::{pos, pos_reconstruct, pos_window, PosWindowState};

/// Standard deviations at or below this (in window-normalized units) count
/// as zero.
pub(crate) const SIGMA_FLOOR: f64 = 1e-12;
