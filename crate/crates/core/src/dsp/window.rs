use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic Hann window `0.5 * (1 - cos(2 pi k / n))`.
pub fn hann(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    Ok((0..n)
        .map(|k| 0.5 * (1.0 - (2.0 * PI * k as f64 / n as f64).cos()))
        .collect())
}

/// Sums each window into a zero-initialized buffer at its start index.
pub fn overlap_add(windows: &[Vec<f64>], starts: &[usize], total_len: usize) -> Result<Vec<f64>> {
    if windows.len() != starts.len() {
        return Err(Error::invalid("one start index is required per window"));
    }
    let mut out = vec![0.0; total_len];
    for (w, &start) in windows.iter().zip(starts) {
        if start + w.len() > total_len {
            return Err(Error::OutOfBounds {
                start,
                len: w.len(),
                total: total_len,
            });
        }
        for (o, v) in out[start..start + w.len()].iter_mut().zip(w) {
            *o += v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hann_closed_form() {
        let w = hann(4).unwrap();
        let want = [0.0, 0.5, 1.0, 0.5];
        for (a, b) in w.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let w = hann(2).unwrap();
        assert!(w[0].abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
        assert!(hann(1).is_err());
    }

    #[test]
    fn hann_cola_identity() {
        for n in (2..100).step_by(2) {
            let w = hann(n).unwrap();
            for k in 0..n / 2 {
                assert!((w[k] + w[k + n / 2] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn overlap_add_examples() {
        let w = hann(4).unwrap();
        let out = overlap_add(&[w.clone(), w.clone()], &[0, 2], 6).unwrap();
        assert!((out[2] - 1.0).abs() < 1e-15 && (out[3] - 1.0).abs() < 1e-15);

        let out = overlap_add(&[vec![1.0, 2.0]], &[0], 4).unwrap();
        assert_eq!(out, vec![1.0, 2.0, 0.0, 0.0]);

        let ws = vec![vec![1.0, 2.0, 3.0], vec![10.0, 20.0], vec![100.0, 200.0, 300.0]];
        let starts = [0, 1, 2];
        let out = overlap_add(&ws, &starts, 6).unwrap();
        let mut brute = vec![0.0; 6];
        for i in 0..6 {
            for (w, &s) in ws.iter().zip(&starts) {
                if i >= s && i - s < w.len() {
                    brute[i] += w[i - s];
                }
            }
        }
        assert_eq!(out, brute);

        assert!(matches!(
            overlap_add(&[vec![1.0; 4]], &[3], 6),
            Err(Error::OutOfBounds { start: 3, len: 4, total: 6 })
        ));
    }
}
