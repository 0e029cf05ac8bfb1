use rayon::prelude::*;

use super::image::{GrayFrame, Plane, Point};
use super::TrajectorySet;
use crate::error::{Error, Result};

/// Pyramidal Lucas-Kanade settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LkConfig {
    /// Number of pyramid levels including full resolution.
    pub pyramid_levels: usize,
    /// Side of the square integration window, in pixels.
    pub win: usize,
    pub max_iters: usize,
    /// Stop iterating once an update moves less than this many pixels.
    pub epsilon_px: f64,
    /// Smallest accepted minimum eigenvalue of the window's gradient matrix,
    /// per window pixel.
    pub min_eigen: f64,
    /// Largest accepted mean absolute intensity difference after alignment
    /// (a uniform brightness change over the window is discounted).
    pub max_residual: f64,
}

impl Default for LkConfig {
    fn default() -> Self {
        Self {
            pyramid_levels: 3,
            win: 15,
            max_iters: 30,
            epsilon_px: 0.01,
            min_eigen: 1e-2,
            max_residual: 20.0,
        }
    }
}

impl LkConfig {
    fn validate(&self) -> Result<()> {
        if self.pyramid_levels == 0 {
            return Err(Error::invalid("pyramid needs at least one level"));
        }
        if self.win < 3 {
            return Err(Error::invalid(format!("window must be at least 3 px, got {}", self.win)));
        }
        Ok(())
    }
}

struct Level {
    img: Plane,
    gx: Plane,
    gy: Plane,
}

fn pyramid(frame: &GrayFrame, cfg: &LkConfig) -> Vec<Level> {
    let mut levels = Vec::with_capacity(cfg.pyramid_levels);
    let mut img = Plane::from_frame(frame);
    loop {
        let (gx, gy) = img.gradients();
        let next = (levels.len() + 1 < cfg.pyramid_levels
            && img.width / 2 >= cfg.win
            && img.height / 2 >= cfg.win)
            .then(|| img.blurred().half());
        levels.push(Level { img, gx, gy });
        match next {
            Some(n) => img = n,
            None => return levels,
        }
    }
}

/// Maps a full-resolution coordinate onto pyramid level `l` (the 2x2
/// reduction puts the center of pixel `k` at `2k + 0.5` one level down).
fn to_level(v: f64, l: usize) -> f64 {
    let s = (1usize << l) as f64;
    (v + 0.5) / s - 0.5
}

fn track_point(prev: &[Level], next: &[Level], p: Point, cfg: &LkConfig) -> Option<Point> {
    let r = (cfg.win / 2) as i64;
    let offsets: Vec<(f64, f64)> = (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| (dx as f64, dy as f64)))
        .collect();
    let npix = offsets.len() as f64;

    let (mut gx_guess, mut gy_guess) = (0.0, 0.0);
    for l in (0..prev.len()).rev() {
        let (a, b) = (&prev[l], &next[l].img);
        let (px, py) = (to_level(p.x, l), to_level(p.y, l));
        let patch: Vec<(f64, f64, f64)> = offsets
            .iter()
            .map(|&(dx, dy)| {
                let (x, y) = (px + dx, py + dy);
                (a.img.sample(x, y), a.gx.sample(x, y), a.gy.sample(x, y))
            })
            .collect();
        let mean_i = patch.iter().map(|p| p.0).sum::<f64>() / npix;
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for &(_, ix, iy) in &patch {
            sxx += ix * ix;
            syy += iy * iy;
            sxy += ix * iy;
        }
        let det = sxx * syy - sxy * sxy;
        let min_eig = 0.5 * (sxx + syy) - (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
        // coarse levels without enough structure are skipped, keeping the guess
        if min_eig / npix < cfg.min_eigen || det <= 0.0 {
            if l == 0 {
                return None;
            }
            gx_guess *= 2.0;
            gy_guess *= 2.0;
            continue;
        }
        let (mut vx, mut vy) = (0.0, 0.0);
        for _ in 0..cfg.max_iters {
            let warped: Vec<f64> = offsets
                .iter()
                .map(|&(dx, dy)| b.sample(px + gx_guess + vx + dx, py + gy_guess + vy + dy))
                .collect();
            let offset = warped.iter().sum::<f64>() / npix - mean_i;
            let (mut bx, mut by) = (0.0, 0.0);
            for (&j, &(i, ix, iy)) in warped.iter().zip(&patch) {
                let e = i - (j - offset);
                bx += e * ix;
                by += e * iy;
            }
            let ex = (syy * bx - sxy * by) / det;
            let ey = (sxx * by - sxy * bx) / det;
            vx += ex;
            vy += ey;
            if ex.hypot(ey) < cfg.epsilon_px {
                break;
            }
        }
        // an update larger than the window has left the basin of attraction
        if vx.hypot(vy) > r as f64 {
            if l == 0 {
                return None;
            }
            vx = 0.0;
            vy = 0.0;
        }
        if l > 0 {
            gx_guess = 2.0 * (gx_guess + vx);
            gy_guess = 2.0 * (gy_guess + vy);
        } else {
            gx_guess += vx;
            gy_guess += vy;
        }
    }

    let q = Point::new(p.x + gx_guess, p.y + gy_guess);
    let (w, h) = (prev[0].img.width as f64, prev[0].img.height as f64);
    if !(q.x >= 0.0 && q.y >= 0.0 && q.x <= w - 1.0 && q.y <= h - 1.0) {
        return None;
    }
    let before: Vec<f64> = offsets
        .iter()
        .map(|&(dx, dy)| prev[0].img.sample(p.x + dx, p.y + dy))
        .collect();
    let after: Vec<f64> = offsets
        .iter()
        .map(|&(dx, dy)| next[0].img.sample(q.x + dx, q.y + dy))
        .collect();
    let offset = (after.iter().sum::<f64>() - before.iter().sum::<f64>()) / npix;
    let residual = before
        .iter()
        .zip(&after)
        .map(|(a, b)| (a - (b - offset)).abs())
        .sum::<f64>()
        / npix;
    (residual <= cfg.max_residual).then_some(q)
}

/// Frame-by-frame point tracker that keeps only the current pyramid in
/// memory, so arbitrarily long sequences can be streamed through it.
pub struct Tracker {
    cfg: LkConfig,
    width: usize,
    height: usize,
    prev: Vec<Level>,
    current: Vec<Option<Point>>,
    ys: Vec<Vec<f64>>,
    frames: usize,
}

impl Tracker {
    pub fn new(first: &GrayFrame, points: &[Point], cfg: LkConfig) -> Result<Self> {
        cfg.validate()?;
        if points.is_empty() {
            return Err(Error::invalid("no points to track"));
        }
        let (w, h) = (first.width() as f64, first.height() as f64);
        for p in points {
            if !(p.x >= 0.0 && p.y >= 0.0 && p.x <= w - 1.0 && p.y <= h - 1.0) {
                return Err(Error::invalid(format!(
                    "point ({}, {}) lies outside the {}x{} frame",
                    p.x, p.y, w, h
                )));
            }
        }
        Ok(Self {
            cfg,
            width: first.width(),
            height: first.height(),
            prev: pyramid(first, &cfg),
            current: points.iter().copied().map(Some).collect(),
            ys: points.iter().map(|p| vec![p.y]).collect(),
            frames: 1,
        })
    }

    pub fn push(&mut self, frame: &GrayFrame) -> Result<()> {
        if frame.width() != self.width || frame.height() != self.height {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.width, self.height),
                got: format!("{}x{}", frame.width(), frame.height()),
            });
        }
        let next = pyramid(frame, &self.cfg);
        let (prev, cfg) = (&self.prev, &self.cfg);
        let moved: Vec<Option<Point>> = self
            .current
            .par_iter()
            .map(|p| p.and_then(|p| track_point(prev, &next, p, cfg)))
            .collect();
        for (y, p) in self.ys.iter_mut().zip(&moved) {
            if let Some(p) = p {
                y.push(p.y);
            }
        }
        self.current = moved;
        self.prev = next;
        self.frames += 1;
        Ok(())
    }

    /// Number of points still being tracked.
    pub fn alive(&self) -> usize {
        self.current.iter().filter(|p| p.is_some()).count()
    }

    pub fn finish(self, fs: f64) -> Result<TrajectorySet> {
        let frames = self.frames;
        if frames < 2 {
            return Err(Error::TooShort {
                needed: 2,
                got: frames,
            });
        }
        let mut y = Vec::new();
        let mut ids = Vec::new();
        for (i, (p, ys)) in self.current.iter().zip(self.ys).enumerate() {
            if p.is_some() {
                y.push(ys);
                ids.push(format!("p{i}"));
            }
        }
        match y.len() {
            0 => Err(Error::AllPointsLost),
            1 => Err(Error::TooFewTrajectories { needed: 2, got: 1 }),
            _ => TrajectorySet::new(y, fs, ids),
        }
    }
}

/// Tracks `points` through `frames` and returns the vertical position of
/// every point that survives the whole sequence. Point ids are `p<index>`
/// with indices into `points`.
pub fn track_lk(
    frames: &[GrayFrame],
    points: &[Point],
    pyramid_levels: usize,
    win: usize,
    fs: f64,
) -> Result<TrajectorySet> {
    let cfg = LkConfig {
        pyramid_levels,
        win,
        ..LkConfig::default()
    };
    track_lk_with(frames, points, cfg, fs)
}

pub fn track_lk_with(
    frames: &[GrayFrame],
    points: &[Point],
    cfg: LkConfig,
    fs: f64,
) -> Result<TrajectorySet> {
    if frames.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: frames.len(),
        });
    }
    let mut t = Tracker::new(&frames[0], points, cfg)?;
    for f in &frames[1..] {
        t.push(f)?;
    }
    t.finish(fs)
}
