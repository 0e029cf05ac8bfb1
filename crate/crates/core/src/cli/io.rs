//! CSV ingestion and atomic output writing.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::domain::{Bvp, Method, RgbTrace};
use crate::error::{Error, Result};
use crate::quality::HrSeries;

/// Relative tolerance on sample spacing in time-stamped CSV input.
pub const UNIFORM_TOLERANCE: f64 = 1e-6;

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::io(path, e))
}

/// Reads the named numeric columns of a CSV file, in the order given.
fn read_columns<R: Read>(reader: R, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::parse(e.to_string()))?.clone();
    let idx = names
        .iter()
        .map(|n| {
            headers
                .iter()
                .position(|h| h == *n)
                .ok_or_else(|| Error::parse(format!("missing column `{n}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::parse(e.to_string()))?;
        for (k, &i) in idx.iter().enumerate() {
            let field = rec.get(i).unwrap_or("");
            let v: f64 = field.parse().map_err(|_| {
                Error::parse(format!(
                    "line {}: column `{}` has non-numeric value `{field}`",
                    row + 2,
                    names[k]
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::parse(format!(
                    "line {}: column `{}` is not finite",
                    row + 2,
                    names[k]
                )));
            }
            cols[k].push(v);
        }
    }
    Ok(cols)
}

/// Sampling rate of a uniformly sampled time column: the reciprocal of the
/// median step, rounded to nine significant digits.
pub fn infer_fs(t: &[f64]) -> Result<f64> {
    if t.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: t.len(),
        });
    }
    let mut dt: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    if let Some(i) = dt.iter().position(|&d| d <= 0.0) {
        return Err(Error::NonUniformSampling { row: i + 2 });
    }
    let mut sorted = dt.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    for (i, d) in dt.iter_mut().enumerate() {
        if (*d - median).abs() > UNIFORM_TOLERANCE * median {
            return Err(Error::NonUniformSampling { row: i + 2 });
        }
    }
    let fs: f64 = format!("{:.8e}", 1.0 / median)
        .parse()
        .expect("formatted float parses");
    Ok(fs)
}

/// Parses a `t,r,g,b` trace.
pub fn read_trace_csv<R: Read>(reader: R) -> Result<RgbTrace> {
    let mut cols = read_columns(reader, &["t", "r", "g", "b"])?;
    let fs = infer_fs(&cols[0])?;
    let b = cols.pop().unwrap();
    let g = cols.pop().unwrap();
    let r = cols.pop().unwrap();
    RgbTrace::from_channels(r, g, b, fs)
}

pub fn load_trace_csv(path: &Path) -> Result<RgbTrace> {
    read_trace_csv(open(path)?)
}

/// Parses a `t,value` pulse signal as written to `bvp.csv`.
pub fn read_bvp_csv<R: Read>(reader: R, method: Method) -> Result<Bvp> {
    let mut cols = read_columns(reader, &["t", "value"])?;
    let fs = infer_fs(&cols[0])?;
    Bvp::new(cols.pop().unwrap(), fs, method)
}

pub fn load_bvp_csv(path: &Path, method: Method) -> Result<Bvp> {
    read_bvp_csv(open(path)?, method)
}

/// Parses a `t,bpm` reference heart-rate series (times need not be uniform).
pub fn read_hr_csv<R: Read>(reader: R) -> Result<HrSeries> {
    let mut cols = read_columns(reader, &["t", "bpm"])?;
    let bpm = cols.pop().unwrap();
    let t = cols.pop().unwrap();
    if let Some(i) = t.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::parse(format!("line {}: column `t` is not increasing", i + 3)));
    }
    HrSeries::new(t, bpm)
}

pub fn load_hr_csv(path: &Path) -> Result<HrSeries> {
    read_hr_csv(open(path)?)
}

/// Renders rows of numbers as CSV text with shortest round-trip formatting.
pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Writes `contents` to a temporary file next to `path`, then renames it into
/// place so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp: PathBuf = dir.join(tmp_name);
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()
    };
    if let Err(e) = write() {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(&tmp, e));
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_rows_at_30_hz() {
        let text = "t,r,g,b\n0,1,2,3\n0.03333333333333333,1,2,3\n0.06666666666666667,1,2,3\n";
        let x = read_trace_csv(text.as_bytes()).unwrap();
        assert_eq!(x.fs(), 30.0);
        assert_eq!(x.len(), 3);
    }

    #[test]
    fn jitter_is_rejected() {
        let text = "t,r,g,b\n0,1,2,3\n0.1,1,2,3\n0.2001,1,2,3\n0.3,1,2,3\n";
        assert!(matches!(
            read_trace_csv(text.as_bytes()),
            Err(Error::NonUniformSampling { row: 3 })
        ));
        let text = "t,r,g,b\n0,1,2,3\n0,1,2,3\n";
        assert!(matches!(read_trace_csv(text.as_bytes()), Err(Error::NonUniformSampling { .. })));
    }

    #[test]
    fn missing_column_is_named() {
        match read_trace_csv("t,r,g\n0,1,2\n".as_bytes()) {
            Err(Error::Parse(m)) => assert!(m.contains("`b`"), "{m}"),
            other => panic!("{other:?}"),
        }
        match read_trace_csv("t,r,g,b\n0,1,x,3\n".as_bytes()) {
            Err(Error::Parse(m)) => assert!(m.contains("`g`"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn formatting_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5e17, 30.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(30.0), "30");
        assert_eq!(csv_text(&["a", "b"], [vec![1.0, 0.5]]), "a,b\n1,0.5\n");
    }

    #[test]
    fn fs_snaps_to_nine_digits() {
        let t: Vec<f64> = (0..100).map(|i| i as f64 / 29.97).collect();
        assert_eq!(infer_fs(&t).unwrap(), 29.97);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn reference_hr() {
        let s = read_hr_csv("t,bpm\n0,70\n5,72\n".as_bytes()).unwrap();
        assert_eq!(s.bpm, vec![70.0, 72.0]);
        assert!(read_hr_csv("t,bpm\n5,70\n1,72\n".as_bytes()).is_err());
    }
}
