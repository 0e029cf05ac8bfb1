use super::image::{GrayFrame, Plane, Point};
use crate::error::{Error, Result};

/// Minimum distance between two selected features, in pixels.
pub const MIN_SEPARATION_PX: f64 = 8.0;

/// Minimum eigenvalue of the 3x3 gradient structure tensor at every pixel
/// (zero within two pixels of the border).
fn min_eigen_map(p: &Plane) -> Vec<f64> {
    let (w, h) = (p.width, p.height);
    let (gx, gy) = p.gradients();
    let mut out = vec![0.0; w * h];
    for y in 2..h - 2 {
        for x in 2..w - 2 {
            let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
            for yy in y - 1..=y + 1 {
                for xx in x - 1..=x + 1 {
                    let (a, b) = (gx.at(xx, yy), gy.at(xx, yy));
                    sxx += a * a;
                    syy += b * b;
                    sxy += a * b;
                }
            }
            let half_trace = 0.5 * (sxx + syy);
            let disc = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
            out[y * w + x] = (half_trace - disc).max(0.0);
        }
    }
    out
}

/// Shi-Tomasi corners: local maxima of the minimum-eigenvalue score that
/// reach `quality` times the strongest score, taken strongest first while
/// keeping every pair at least [`MIN_SEPARATION_PX`] apart.
pub fn detect_features(frame: &GrayFrame, max_points: usize, quality: f64) -> Result<Vec<Point>> {
    if max_points == 0 {
        return Err(Error::invalid("max_points must be at least 1"));
    }
    if !(quality > 0.0 && quality <= 1.0) {
        return Err(Error::invalid(format!("quality must be in (0, 1], got {quality}")));
    }
    let plane = Plane::from_frame(frame);
    let (w, h) = (plane.width, plane.height);
    let score = min_eigen_map(&plane);
    let best = score.iter().copied().fold(0.0, f64::max);
    // gradients of an 8-bit image are multiples of 1/2; anything below this is flat
    if best <= 1e-9 {
        return Err(Error::NoFeatures);
    }
    let floor = quality * best;
    let mut candidates = Vec::new();
    for y in 2..h - 2 {
        for x in 2..w - 2 {
            let s = score[y * w + x];
            if s < floor || s <= 0.0 {
                continue;
            }
            let is_peak = (y - 1..=y + 1)
                .all(|yy| (x - 1..=x + 1).all(|xx| score[yy * w + xx] <= s));
            if is_peak {
                candidates.push((s, x, y));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.2, a.1).cmp(&(b.2, b.1))));

    let mut picked: Vec<Point> = Vec::new();
    for (_, x, y) in candidates {
        let p = Point::new(x as f64, y as f64);
        if picked.iter().all(|q| q.distance(&p) >= MIN_SEPARATION_PX) {
            picked.push(p);
            if picked.len() == max_points {
                break;
            }
        }
    }
    if picked.is_empty() {
        return Err(Error::NoFeatures);
    }
    Ok(picked)
}
