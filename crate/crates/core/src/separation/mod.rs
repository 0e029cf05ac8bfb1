//! Blind source separation (JADE), PCA, and spectral source selection.

mod jade;
mod pca;
mod select;
mod whiten;

pub use jade::{jade, jade_with, JadeConfig, Separation};
pub use pca::pca;
pub use select::{select_source, SourceChoice, SpectrumKind};
pub use whiten::{whiten, Whitened};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Separated component time series and the matrix that produced them.
///
/// For ICA `unmixing` is `K x K`; for PCA it holds the `k x N` loadings. In
/// both cases `sources = unmixing * (x - mean(x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSet {
    pub sources: Vec<Vec<f64>>,
    pub unmixing: DMatrix<f64>,
    pub fs: f64,
}

impl SourceSet {
    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }
}

/// Checks equal lengths and returns `(channels, samples)`.
fn shape(x: &[Vec<f64>]) -> Result<(usize, usize)> {
    let k = x.len();
    let t = x.first().map_or(0, Vec::len);
    if x.iter().any(|s| s.len() != t) {
        return Err(Error::DimensionMismatch {
            expected: format!("{t} samples per channel"),
            got: "unequal channel lengths".into(),
        });
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite sample"));
    }
    Ok((k, t))
}

/// Row-major `K x T` matrix of mean-removed channels, and the means.
fn centered(x: &[Vec<f64>]) -> (DMatrix<f64>, Vec<f64>) {
    let k = x.len();
    let t = x[0].len();
    let means: Vec<f64> = x.iter().map(|s| crate::dsp::stats::mean(s)).collect();
    let m = DMatrix::from_fn(k, t, |i, j| x[i][j] - means[i]);
    (m, means)
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

/// Symmetric eigendecomposition with eigenvalues in descending order and
/// each eigenvector's largest-magnitude entry made positive.
fn sorted_eigen(cov: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = cov.nrows();
    let eig = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        if dominant_entry(col.as_slice()) < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    (values, vectors)
}

/// Entry of largest magnitude, first one on ties.
fn dominant_entry(v: &[f64]) -> f64 {
    v.iter()
        .copied()
        .fold(0.0, |best, x| if x.abs() > best.abs() { x } else { best })
}
