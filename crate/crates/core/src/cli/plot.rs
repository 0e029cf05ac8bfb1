//! Static SVG figure: pulse waveform above its power spectrum.

use std::fmt::Write;

use crate::domain::{Bvp, FreqBand};
use crate::dsp::SpectralEstimate;

const WIDTH: f64 = 900.0;
const PANEL_H: f64 = 220.0;
const MARGIN: f64 = 50.0;
/// Highest frequency drawn in the spectrum panel.
const MAX_PLOT_HZ: f64 = 4.0;

fn polyline(points: impl Iterator<Item = (f64, f64)>) -> String {
    let mut s = String::new();
    for (i, (x, y)) in points.enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.2},{y:.2}");
    }
    s
}

fn range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if lo.is_finite() && hi > lo {
        (lo, hi)
    } else {
        (lo.min(0.0), lo.max(0.0) + 1.0)
    }
}

pub fn render(bvp: &Bvp, spec: &SpectralEstimate, band: FreqBand, title: &str) -> String {
    let plot_w = WIDTH - 2.0 * MARGIN;
    let height = 2.0 * PANEL_H + 3.0 * MARGIN;
    let top1 = MARGIN;
    let top2 = 2.0 * MARGIN + PANEL_H;

    let x = bvp.samples();
    let duration = x.len() as f64 / bvp.fs();
    let (lo, hi) = range(x.iter().copied());
    let wave = polyline(x.iter().enumerate().map(|(i, &v)| {
        let t = i as f64 / bvp.fs();
        (MARGIN + plot_w * t / duration, top1 + PANEL_H * (hi - v) / (hi - lo))
    }));

    let shown: Vec<(f64, f64)> = spec
        .freqs_hz
        .iter()
        .zip(&spec.power)
        .filter(|(f, _)| **f <= MAX_PLOT_HZ)
        .map(|(&f, &p)| (f, p))
        .collect();
    let (_, pmax) = range(shown.iter().map(|p| p.1).chain(std::iter::once(0.0)));
    let fx = |f: f64| MARGIN + plot_w * f / MAX_PLOT_HZ;
    let spectrum = polyline(shown.iter().map(|&(f, p)| (fx(f), top2 + PANEL_H * (1.0 - p / pmax))));
    let peak = spec.argmax_in_band(band).ok().map(|k| spec.freqs_hz[k]);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}" font-size="14">{title}</text>"#, MARGIN - 20.0);
    for top in [top1, top2] {
        let _ = writeln!(
            s,
            r##"<rect x="{MARGIN}" y="{top}" width="{plot_w}" height="{PANEL_H}" fill="none" stroke="#999"/>"##
        );
    }
    let _ = writeln!(
        s,
        r##"<rect x="{:.2}" y="{top2}" width="{:.2}" height="{PANEL_H}" fill="#e8f0fe"/>"##,
        fx(band.low_hz),
        fx(band.high_hz.min(MAX_PLOT_HZ)) - fx(band.low_hz)
    );
    let _ = writeln!(s, r##"<polyline fill="none" stroke="#c0392b" stroke-width="1" points="{wave}"/>"##);
    let _ = writeln!(s, r##"<polyline fill="none" stroke="#1f4e99" stroke-width="1.5" points="{spectrum}"/>"##);
    if let Some(p) = peak {
        let _ = writeln!(
            s,
            r##"<line x1="{0:.2}" y1="{top2}" x2="{0:.2}" y2="{1}" stroke="#555" stroke-dasharray="4 3"/>"##,
            fx(p),
            top2 + PANEL_H
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}">{:.1} BPM</text>"#,
            fx(p) + 4.0,
            top2 + 14.0,
            60.0 * p
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}">pulse signal, 0 to {duration:.1} s</text>"#,
        top1 + PANEL_H + 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="{}">power spectrum, 0 to {MAX_PLOT_HZ} Hz</text>"#,
        top2 + PANEL_H + 16.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Method;
    use crate::dsp::power_spectrum_raw;

    #[test]
    fn renders_both_panels() {
        let x: Vec<f64> = (0..300).map(|i| (i as f64 * 0.25).sin()).collect();
        let bvp = Bvp::new(x.clone(), 30.0, Method::Pos).unwrap();
        let spec = power_spectrum_raw(&x, 30.0, 512).unwrap();
        let svg = render(&bvp, &spec, FreqBand::PULSE, "pos");
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("BPM"));
        assert_eq!(svg, render(&bvp, &spec, FreqBand::PULSE, "pos"));
    }
}
