use crate::error::{Error, Result};

/// Smallest accepted frame side, in pixels.
pub const MIN_SIDE: usize = 32;

/// Single-channel image with intensities on the 0-255 scale.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayFrame {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

/// Sub-pixel image position, `x` to the right and `y` down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl GrayFrame {
    pub fn new(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        if width < MIN_SIDE || height < MIN_SIDE {
            return Err(Error::invalid(format!(
                "frame is {width}x{height}, needs at least {MIN_SIDE}x{MIN_SIDE}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: format!("{} pixels", width * height),
                got: format!("{} pixels", data.len()),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite pixel value"));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_u8(width: usize, height: usize, data: &[u8]) -> Result<Self> {
        Self::new(width, height, data.iter().map(|&v| v as f32).collect())
    }

    /// Luma (BT.601 weights) of a packed RGB24 image.
    pub fn from_rgb24(width: usize, height: usize, rgb: &[u8]) -> Result<Self> {
        if rgb.len() != width * height * 3 {
            return Err(Error::DimensionMismatch {
                expected: format!("{} bytes", width * height * 3),
                got: format!("{} bytes", rgb.len()),
            });
        }
        let data = rgb
            .chunks_exact(3)
            .map(|p| (0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64) as f32)
            .collect();
        Self::new(width, height, data)
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y) as f32);
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    pub fn same_size(&self, other: &GrayFrame) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Left-right mirror image.
    pub fn mirrored(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for row in self.data.chunks_exact(self.width) {
            data.extend(row.iter().rev());
        }
        Self { data, ..*self }
    }
}

/// Floating-point image used inside the tracker pyramid (no size floor).
#[derive(Debug, Clone)]
pub(crate) struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn from_frame(f: &GrayFrame) -> Self {
        Self {
            width: f.width,
            height: f.height,
            data: f.data.iter().map(|&v| v as f64).collect(),
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Bilinear sample with coordinates clamped to the border.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let x = x.clamp(0.0, (self.width - 1) as f64);
        let y = y.clamp(0.0, (self.height - 1) as f64);
        let x0 = (x.floor() as usize).min(self.width - 1);
        let y0 = (y.floor() as usize).min(self.height - 1);
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let (fx, fy) = (x - x0 as f64, y - y0 as f64);
        let top = self.at(x0, y0) * (1.0 - fx) + self.at(x1, y0) * fx;
        let bottom = self.at(x0, y1) * (1.0 - fx) + self.at(x1, y1) * fx;
        top * (1.0 - fy) + bottom * fy
    }

    /// Separable `[1 4 6 4 1] / 16` blur with replicated borders.
    pub fn blurred(&self) -> Self {
        const K: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];
        let (w, h) = (self.width, self.height);
        let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
        let mut tmp = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                tmp[y * w + x] = (0..5)
                    .map(|k| K[k] * self.at(clamp(x as isize + k as isize - 2, w), y))
                    .sum();
            }
        }
        let mut data = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                data[y * w + x] = (0..5)
                    .map(|k| K[k] * tmp[clamp(y as isize + k as isize - 2, h) * w + x])
                    .sum();
            }
        }
        Self {
            width: w,
            height: h,
            data,
        }
    }

    /// 2x2 box-average reduction (odd trailing row/column dropped).
    pub fn half(&self) -> Self {
        let (w, h) = (self.width / 2, self.height / 2);
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let s = self.at(2 * x, 2 * y)
                    + self.at(2 * x + 1, 2 * y)
                    + self.at(2 * x, 2 * y + 1)
                    + self.at(2 * x + 1, 2 * y + 1);
                data.push(s / 4.0);
            }
        }
        Self {
            width: w,
            height: h,
            data,
        }
    }

    /// Central-difference gradients (one-sided at the border).
    pub fn gradients(&self) -> (Plane, Plane) {
        let (w, h) = (self.width, self.height);
        let mut gx = vec![0.0; w * h];
        let mut gy = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let (xl, xr) = (x.saturating_sub(1), (x + 1).min(w - 1));
                let (yu, yd) = (y.saturating_sub(1), (y + 1).min(h - 1));
                gx[y * w + x] = (self.at(xr, y) - self.at(xl, y)) / (xr - xl).max(1) as f64;
                gy[y * w + x] = (self.at(x, yd) - self.at(x, yu)) / (yd - yu).max(1) as f64;
            }
        }
        let plane = |data| Plane {
            width: w,
            height: h,
            data,
        };
        (plane(gx), plane(gy))
    }
}
