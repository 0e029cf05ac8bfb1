//! Pulse recovery from the vertical head motion of tracked feature points.

mod features;
mod image;
mod track;

pub use features::{detect_features, MIN_SEPARATION_PX};
pub use image::{GrayFrame, Point, MIN_SIDE};
pub use track::{track_lk, track_lk_with, LkConfig, Tracker};

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use crate::domain::{Bvp, FreqBand, Method};
use crate::dsp::bandpass;
use crate::error::{Error, Result};
use crate::separation::{pca, select_source, SourceChoice, SpectrumKind};

/// Fewest trajectories PCA is run on after pruning.
pub const MIN_TRAJECTORIES: usize = 3;
/// Number of leading principal components considered as the pulse.
pub const MAX_COMPONENTS: usize = 5;

/// Vertical positions (pixels) of `N` points over `T` frames.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySet {
    pub y: Vec<Vec<f64>>,
    pub fs: f64,
    pub point_ids: Vec<String>,
}

impl TrajectorySet {
    pub fn new(y: Vec<Vec<f64>>, fs: f64, point_ids: Vec<String>) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::TooFewTrajectories {
                needed: 2,
                got: y.len(),
            });
        }
        if point_ids.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} point ids", y.len()),
                got: format!("{}", point_ids.len()),
            });
        }
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::invalid(format!("sampling rate must be positive, got {fs}")));
        }
        let t = y[0].len();
        if let Some(bad) = y.iter().position(|s| s.len() != t) {
            return Err(Error::DimensionMismatch {
                expected: format!("{t} frames"),
                got: format!("{} frames for {}", y[bad].len(), point_ids[bad]),
            });
        }
        if y.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite trajectory sample"));
        }
        Ok(Self { y, fs, point_ids })
    }

    /// Number of trajectories.
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Number of frames per trajectory.
    pub fn frames(&self) -> usize {
        self.y[0].len()
    }

    /// Parses `frame,point_id,y` rows. Points keep their first-appearance
    /// order; frames must run from 0 without gaps and every point must have
    /// exactly one row per frame.
    pub fn from_csv<R: Read>(reader: R, fs: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::parse(e.to_string()))?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::parse(format!("missing column `{name}`")))
        };
        let (c_frame, c_id, c_y) = (col("frame")?, col("point_id")?, col("y")?);

        let mut order: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut samples: Vec<HashMap<usize, f64>> = Vec::new();
        let mut max_frame = 0usize;
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::parse(e.to_string()))?;
            let line = row + 2;
            let frame: usize = rec[c_frame]
                .parse()
                .map_err(|_| Error::parse(format!("line {line}: column `frame` is not a frame index")))?;
            let y: f64 = rec[c_y]
                .parse()
                .map_err(|_| Error::parse(format!("line {line}: column `y` is not a number")))?;
            if !y.is_finite() {
                return Err(Error::parse(format!("line {line}: column `y` is not finite")));
            }
            let id = rec[c_id].to_string();
            let k = *index.entry(id.clone()).or_insert_with(|| {
                order.push(id.clone());
                samples.push(HashMap::new());
                order.len() - 1
            });
            if samples[k].insert(frame, y).is_some() {
                return Err(Error::parse(format!("line {line}: duplicate row for point {id} frame {frame}")));
            }
            max_frame = max_frame.max(frame);
        }
        let frames = max_frame + 1;
        let mut y = Vec::with_capacity(order.len());
        for (id, s) in order.iter().zip(&samples) {
            let series: Option<Vec<f64>> = (0..frames).map(|f| s.get(&f).copied()).collect();
            y.push(series.ok_or_else(|| Error::DimensionMismatch {
                expected: format!("{frames} frames for every point"),
                got: format!("{} frames for point {id}", s.len()),
            })?);
        }
        Self::new(y, fs, order)
    }

    pub fn load_csv(path: &Path, fs: f64) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(std::io::BufReader::new(file), fs)
    }
}

/// Band-passed trajectories relative to the first point, after pruning.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    /// `z_i = filtered y_i - filtered y_1` for the kept trajectories.
    pub z: Vec<Vec<f64>>,
    /// Indices into the input set of the kept trajectories.
    pub kept: Vec<usize>,
    /// Indices removed for moving more than the 75th percentile.
    pub removed: Vec<usize>,
    /// Movement magnitude `sqrt(sum_t z_i(t)^2)` of every candidate, indexed
    /// like the input set (the reference trajectory has none).
    pub movement: Vec<Option<f64>>,
    pub threshold: f64,
}

/// Linear-interpolation quantile of unsorted values (`q` in `[0, 1]`).
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// Filters every trajectory, subtracts the first, and drops trajectories
/// that did not move at all or moved more than the 75th percentile.
pub fn normalize_and_prune(t: &TrajectorySet, band: FreqBand) -> Result<Normalized> {
    band.validate_for(t.fs)?;
    let filtered = t
        .y
        .iter()
        .map(|y| bandpass(y, band, t.fs))
        .collect::<Result<Vec<_>>>()?;
    let reference = &filtered[0];
    let z: Vec<Vec<f64>> = filtered[1..]
        .iter()
        .map(|f| f.iter().zip(reference).map(|(a, b)| a - b).collect())
        .collect();
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = filtered.iter().map(|f| norm(f)).fold(0.0, f64::max);

    let mut movement = vec![None];
    movement.extend(z.iter().map(|zi| Some(norm(zi))));
    // motion indistinguishable from rounding noise carries no information
    let moving: Vec<usize> = (1..t.len())
        .filter(|&i| movement[i].unwrap() > 1e-9 * scale)
        .collect();
    if moving.len() < MIN_TRAJECTORIES {
        return Err(Error::TooFewTrajectories {
            needed: MIN_TRAJECTORIES,
            got: moving.len(),
        });
    }
    let m: Vec<f64> = moving.iter().map(|&i| movement[i].unwrap()).collect();
    let threshold = quantile(&m, 0.75);
    let (kept, removed): (Vec<usize>, Vec<usize>) =
        moving.iter().partition(|&&i| movement[i].unwrap() <= threshold);
    if kept.len() < MIN_TRAJECTORIES {
        return Err(Error::TooFewTrajectories {
            needed: MIN_TRAJECTORIES,
            got: kept.len(),
        });
    }
    let mut z = z;
    let z_kept = kept.iter().map(|&i| std::mem::take(&mut z[i - 1])).collect();
    Ok(Normalized {
        z: z_kept,
        kept,
        removed,
        movement,
        threshold,
    })
}

/// Recovers the pulse as the principal component (among the first five) with
/// the most concentrated in-band Lomb-Scargle peak.
pub fn ibcg_pulse(t: &TrajectorySet, band: FreqBand) -> Result<(Bvp, SourceChoice)> {
    let n = normalize_and_prune(t, band)?;
    let k = MAX_COMPONENTS.min(n.z.len());
    let comps = pca(&n.z, k, t.fs)?;
    let choice = select_source(&comps, band, SpectrumKind::Lomb, k)?;
    let bvp = Bvp::new(comps.sources[choice.index].clone(), t.fs, Method::Ibcg)?;
    Ok((bvp, choice))
}
