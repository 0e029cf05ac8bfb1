//! Butterworth band-pass design and zero-phase forward-backward filtering.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;

use crate::domain::FreqBand;
use crate::error::{Error, Result};

/// Transfer-function coefficients of a digital IIR filter, `a[0] == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IirCoeffs {
    pub b: Vec<f64>,
    pub a: Vec<f64>,
}

impl IirCoeffs {
    /// Complex frequency response at `hz` for sampling rate `fs`.
    pub fn response(&self, hz: f64, fs: f64) -> Complex64 {
        let w = 2.0 * PI * hz / fs;
        let eval = |c: &[f64]| {
            c.iter()
                .enumerate()
                .map(|(k, &ck)| ck * Complex64::from_polar(1.0, -w * k as f64))
                .sum::<Complex64>()
        };
        eval(&self.b) / eval(&self.a)
    }

    /// Number of samples padded on each side by [`filtfilt`].
    pub fn padlen(&self) -> usize {
        3 * (self.a.len() - 1)
    }
}

/// Designs an `order`-th order Butterworth band-pass (`2 * order` poles).
///
/// The analog low-pass prototype is shifted to the band with the edges
/// pre-warped, then mapped with the bilinear transform.
pub fn butter_bandpass(order: usize, band: FreqBand, fs: f64) -> Result<IirCoeffs> {
    if order == 0 {
        return Err(Error::invalid("filter order must be at least 1"));
    }
    band.validate_for(fs)?;

    let fs2 = 2.0 * fs;
    let wl = fs2 * (PI * band.low_hz / fs).tan();
    let wh = fs2 * (PI * band.high_hz / fs).tan();
    let bw = wh - wl;
    let w0_sq = wl * wh;

    let n = order as f64;
    let mut analog_poles = Vec::with_capacity(2 * order);
    for k in 0..order {
        // left-half-plane prototype poles
        let theta = PI * (2.0 * k as f64 + 1.0 + n) / (2.0 * n);
        let p = Complex64::from_polar(1.0, theta);
        let half = p * (bw / 2.0);
        let disc = (half * half - w0_sq).sqrt();
        analog_poles.push(half + disc);
        analog_poles.push(half - disc);
    }

    // `order` zeros at s = 0 map to z = 1, the rest (at infinity) to z = -1.
    let fs2c = Complex64::new(fs2, 0.0);
    let poles: Vec<Complex64> = analog_poles
        .iter()
        .map(|&p| (fs2c + p) / (fs2c - p))
        .collect();
    let mut zeros = vec![Complex64::new(1.0, 0.0); order];
    zeros.extend(std::iter::repeat_n(Complex64::new(-1.0, 0.0), order));

    let denom: Complex64 = analog_poles.iter().map(|&p| fs2c - p).product();
    let gain = (bw.powi(order as i32) * fs2.powi(order as i32) / denom).re;

    for p in &poles {
        if p.norm() >= 1.0 {
            return Err(Error::UnstableFilter(p.norm()));
        }
    }

    let b = poly(&zeros).into_iter().map(|c| c.re * gain).collect();
    let a = poly(&poles).into_iter().map(|c| c.re).collect();
    Ok(IirCoeffs { b, a })
}

/// Monic polynomial coefficients (highest power first) from its roots.
fn poly(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i] += ci;
            next[i + 1] -= ci * r;
        }
        c = next;
    }
    c
}

/// Direct-form II transposed filter with initial state `zi`.
fn lfilter(c: &IirCoeffs, x: &[f64], zi: &[f64]) -> Vec<f64> {
    let m = c.a.len() - 1;
    let mut z = zi.to_vec();
    let mut y = Vec::with_capacity(x.len());
    for &xn in x {
        let yn = c.b[0] * xn + z[0];
        for i in 0..m {
            let next = if i + 1 < m { z[i + 1] } else { 0.0 };
            z[i] = c.b[i + 1] * xn + next - c.a[i + 1] * yn;
        }
        y.push(yn);
    }
    y
}

/// Steady-state filter state for a unit step input.
fn lfilter_zi(c: &IirCoeffs) -> Result<Vec<f64>> {
    let m = c.a.len() - 1;
    // I - companion(a)^T
    let mut lhs = DMatrix::<f64>::identity(m, m);
    for i in 0..m {
        lhs[(i, 0)] += c.a[i + 1];
        if i + 1 < m {
            lhs[(i, i + 1)] -= 1.0;
        }
    }
    let rhs = DVector::from_iterator(m, (0..m).map(|i| c.b[i + 1] - c.a[i + 1] * c.b[0]));
    lhs.lu()
        .solve(&rhs)
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::invalid("filter has a pole at z = 1"))
}

/// Zero-phase filtering with odd-reflection padding.
///
/// Both ends are extended by odd reflection of length `3 * (len(a) - 1)`.
/// A forward-then-backward pass and a backward-then-forward pass are each
/// started from the steady-state response to their first sample, and the two
/// results are averaged, so that filtering a reversed signal gives exactly the
/// reversed output.
pub fn filtfilt(c: &IirCoeffs, x: &[f64]) -> Result<Vec<f64>> {
    if c.a.is_empty() || c.a.len() != c.b.len() || c.a[0] != 1.0 {
        return Err(Error::invalid("coefficients must have equal length and a[0] = 1"));
    }
    let pad = c.padlen();
    let n = x.len();
    if n <= pad {
        return Err(Error::TooShort {
            needed: pad + 1,
            got: n,
        });
    }
    if c.a.len() == 1 {
        return Ok(x.iter().map(|v| v * c.b[0] * c.b[0]).collect());
    }

    let (first, last) = (x[0], x[n - 1]);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| 2.0 * first - x[i]));
    ext.extend_from_slice(x);
    ext.extend((1..=pad).map(|i| 2.0 * last - x[n - 1 - i]));

    let zi = lfilter_zi(c)?;
    let two_pass = |input: &[f64]| {
        let scaled = |s: f64| zi.iter().map(|z| z * s).collect::<Vec<_>>();
        let mut y = lfilter(c, input, &scaled(input[0]));
        y.reverse();
        let mut y = lfilter(c, &y, &scaled(y[0]));
        y.reverse();
        y
    };

    let fwd = two_pass(&ext);
    let mut rev_in = ext;
    rev_in.reverse();
    let mut bwd = two_pass(&rev_in);
    bwd.reverse();
    Ok(fwd[pad..pad + n]
        .iter()
        .zip(&bwd[pad..pad + n])
        .map(|(a, b)| 0.5 * (a + b))
        .collect())
}

/// Third-order band-pass filtfilt, the filter every method shares.
pub fn bandpass(x: &[f64], band: FreqBand, fs: f64) -> Result<Vec<f64>> {
    let c = butter_bandpass(3, band, fs)?;
    filtfilt(&c, x)
}
