//! Raw RGB24 and PPM frame ingestion, skin segmentation and ROI averaging.

use std::fs;
use std::io::{BufReader, Read};
use std::path::PathBuf;

use crate::domain::{RgbTrace, Roi};
use crate::error::{Error, Result};

/// Packed 8-bit RGB image, row-major without padding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbFrame {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbFrame {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("frame dimensions must be positive"));
        }
        if data.len() != width * height * 3 {
            return Err(Error::DimensionMismatch {
                expected: format!("{} bytes", width * height * 3),
                got: format!("{} bytes", data.len()),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        Self {
            width,
            height,
            data: rgb.repeat(width * height),
        }
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// Where frames come from.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameSource {
    /// Concatenated RGB24 frames in a file, or on stdin for `-`.
    Raw(PathBuf),
    /// Directory of binary PPM (P6) files, read in lexicographic order.
    PpmDir(PathBuf),
}

/// Streaming frame reader; yields frames in order and checks that every
/// frame has the same size.
pub struct Frames {
    inner: Inner,
    width: usize,
    height: usize,
    index: usize,
    done: bool,
}

enum Inner {
    Raw(Box<dyn Read>),
    Ppm(std::vec::IntoIter<PathBuf>),
}

/// Opens a frame stream. `width`/`height` are required for raw input; for
/// PPM input they are optional and, when given, checked against each file.
pub fn ingest_frames(
    source: &FrameSource,
    width: Option<usize>,
    height: Option<usize>,
) -> Result<Frames> {
    match source {
        FrameSource::Raw(path) => {
            let (w, h) = match (width, height) {
                (Some(w), Some(h)) if w > 0 && h > 0 => (w, h),
                _ => return Err(Error::Config("raw input needs --width and --height".into())),
            };
            let reader: Box<dyn Read> = if path.as_os_str() == "-" {
                Box::new(BufReader::new(std::io::stdin()))
            } else {
                Box::new(BufReader::new(fs::File::open(path).map_err(|e| Error::io(path, e))?))
            };
            Ok(Frames {
                inner: Inner::Raw(reader),
                width: w,
                height: h,
                index: 0,
                done: false,
            })
        }
        FrameSource::PpmDir(dir) => {
            let mut files: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(|e| Error::io(dir, e))?
                .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("ppm")))
                .collect();
            files.sort();
            Ok(Frames {
                inner: Inner::Ppm(files.into_iter()),
                width: width.unwrap_or(0),
                height: height.unwrap_or(0),
                index: 0,
                done: false,
            })
        }
    }
}

/// Fills `buf`, returning how many bytes were read before end of input.
fn read_full(r: &mut dyn Read, buf: &mut [u8]) -> std::io::Result<usize> {
    let mut got = 0;
    while got < buf.len() {
        match r.read(&mut buf[got..]) {
            Ok(0) => break,
            Ok(n) => got += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(got)
}

impl Frames {
    fn next_frame(&mut self) -> Result<Option<RgbFrame>> {
        let frame = match &mut self.inner {
            Inner::Raw(r) => {
                let mut buf = vec![0u8; self.width * self.height * 3];
                let got = read_full(r.as_mut(), &mut buf).map_err(|e| Error::io("<frames>", e))?;
                if got == 0 {
                    return Ok(None);
                }
                if got < buf.len() {
                    return Err(Error::TruncatedFrame { trailing: got });
                }
                RgbFrame::new(self.width, self.height, buf)?
            }
            Inner::Ppm(files) => {
                let Some(path) = files.next() else {
                    return Ok(None);
                };
                let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
                let f = parse_ppm(&bytes).map_err(|e| match e {
                    Error::Parse(m) => Error::parse(format!("{}: {m}", path.display())),
                    other => other,
                })?;
                if self.width == 0 {
                    self.width = f.width;
                    self.height = f.height;
                } else if (f.width, f.height) != (self.width, self.height) {
                    return Err(Error::DimensionMismatch {
                        expected: format!("{}x{}", self.width, self.height),
                        got: format!("{}x{} in {}", f.width, f.height, path.display()),
                    });
                }
                f
            }
        };
        self.index += 1;
        Ok(Some(frame))
    }
}

impl Iterator for Frames {
    type Item = Result<RgbFrame>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let r = self.next_frame().transpose();
        if !matches!(r, Some(Ok(_))) {
            self.done = true;
        }
        r
    }
}

/// Parses a binary PPM (P6) image with a maximum value of 255.
pub fn parse_ppm(bytes: &[u8]) -> Result<RgbFrame> {
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::parse("PPM header ends early"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P6" {
        return Err(Error::parse("not a binary PPM (P6) file"));
    }
    let mut number = |what: &str| -> Result<usize> {
        token()?
            .parse()
            .map_err(|_| Error::parse(format!("PPM {what} is not a number")))
    };
    let width = number("width")?;
    let height = number("height")?;
    let maxval = number("maximum value")?;
    if maxval != 255 {
        return Err(Error::parse(format!("PPM maximum value {maxval} is not 255")));
    }
    // exactly one whitespace byte separates the header from the raster
    let data_start = pos + 1;
    let need = width * height * 3;
    let raster = bytes.get(data_start..).unwrap_or(&[]);
    if raster.len() < need {
        return Err(Error::parse(format!(
            "PPM raster has {} bytes, expected {need}",
            raster.len()
        )));
    }
    RgbFrame::new(width, height, raster[..need].to_vec())
}

/// Encodes a frame as binary PPM.
pub fn encode_ppm(f: &RgbFrame) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", f.width, f.height).into_bytes();
    out.extend_from_slice(&f.data);
    out
}

/// Fixed RGB skin rule on 8-bit values.
pub fn is_skin([r, g, b]: [u8; 3]) -> bool {
    let (r, g, b) = (r as i32, g as i32, b as i32);
    let spread = r.max(g).max(b) - r.min(g).min(b);
    r > 95 && g > 40 && b > 20 && spread > 15 && (r - g).abs() > 15 && r > g && r > b
}

/// Per-pixel skin classification, row-major.
pub fn skin_mask(frame: &RgbFrame) -> Vec<bool> {
    frame
        .data
        .chunks_exact(3)
        .map(|p| is_skin([p[0], p[1], p[2]]))
        .collect()
}

/// Mean color over the ROI of one frame; `index` names the frame in errors.
pub fn roi_mean(frame: &RgbFrame, roi: Roi, index: usize) -> Result<[f64; 3]> {
    roi.check_bounds(frame.width as u32, frame.height as u32)?;
    let mut sum = [0u64; 3];
    let mut count = 0u64;
    let mut add = |p: &[u8]| {
        for c in 0..3 {
            sum[c] += p[c] as u64;
        }
        count += 1;
    };
    match roi {
        Roi::WholeFrame => frame.data.chunks_exact(3).for_each(&mut add),
        Roi::Rect { x, y, w, h } => {
            let (x, y, w, h) = (x as usize, y as usize, w as usize, h as usize);
            for row in y..y + h {
                let start = 3 * (row * frame.width + x);
                frame.data[start..start + 3 * w].chunks_exact(3).for_each(&mut add);
            }
        }
        Roi::SkinMask => frame
            .data
            .chunks_exact(3)
            .filter(|p| is_skin([p[0], p[1], p[2]]))
            .for_each(&mut add),
    }
    if count == 0 {
        return Err(Error::EmptyRoi { frame: index });
    }
    Ok(sum.map(|s| s as f64 / count as f64))
}

/// Per-frame, per-channel ROI means as a color trace sampled at `fs`.
pub fn spatial_average<I>(frames: I, roi: Roi, fs: f64) -> Result<RgbTrace>
where
    I: IntoIterator<Item = Result<RgbFrame>>,
{
    let mut ch: [Vec<f64>; 3] = Default::default();
    for (i, f) in frames.into_iter().enumerate() {
        let m = roi_mean(&f?, roi, i)?;
        for c in 0..3 {
            ch[c].push(m[c]);
        }
    }
    if ch[0].len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: ch[0].len(),
        });
    }
    let [r, g, b] = ch;
    RgbTrace::from_channels(r, g, b, fs)
}
