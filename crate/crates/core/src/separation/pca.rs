use nalgebra::DMatrix;

use super::{centered, rows, shape, sorted_eigen, SourceSet};
use crate::error::{Error, Result};

/// Principal component scores of `N` mean-centered sequences.
///
/// Components are ordered by descending eigenvalue of the sample covariance.
/// `unmixing` holds the orthonormal loadings as rows (`k x N`).
pub fn pca(x: &[Vec<f64>], k: usize, fs: f64) -> Result<SourceSet> {
    let (n, t) = shape(x)?;
    if n == 0 || t < 2 {
        return Err(Error::invalid("PCA needs at least one sequence of two samples"));
    }
    if k == 0 || k > n.min(t) {
        return Err(Error::invalid(format!(
            "component count {k} must be in 1..={}",
            n.min(t)
        )));
    }
    let (xc, _) = centered(x);
    let cov = &xc * xc.transpose() / (t - 1) as f64;
    let (_, vectors) = sorted_eigen(cov);
    let loadings: DMatrix<f64> = vectors.columns(0, k).transpose();
    let scores = &loadings * xc;
    Ok(SourceSet {
        sources: rows(&scores),
        unmixing: loadings,
        fs,
    })
}
