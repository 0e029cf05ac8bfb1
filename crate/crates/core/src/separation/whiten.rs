use nalgebra::DMatrix;

use super::{centered, rows, shape, sorted_eigen};
use crate::error::{Error, Result};

/// Whitened channels together with the transform that produced them.
#[derive(Debug, Clone)]
pub struct Whitened {
    pub data: Vec<Vec<f64>>,
    /// `K x K` matrix with `data = sphering * (x - mean)`.
    pub sphering: DMatrix<f64>,
    pub mean: Vec<f64>,
}

/// Decorrelates and scales `K` channels to identity sample covariance.
pub fn whiten(x: &[Vec<f64>]) -> Result<Whitened> {
    let (k, t) = shape(x)?;
    if k < 2 {
        return Err(Error::invalid(format!("whitening needs at least 2 channels, got {k}")));
    }
    if t <= k {
        return Err(Error::TooShort {
            needed: k + 1,
            got: t,
        });
    }
    let (xc, mean) = centered(x);
    let cov = &xc * xc.transpose() / (t - 1) as f64;
    let (values, vectors) = sorted_eigen(cov);
    let largest = values[0];
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(largest > 0.0) || values[k - 1] <= 1e-10 * largest {
        return Err(Error::SingularCovariance);
    }
    let mut sphering = vectors.transpose();
    for (i, v) in values.iter().enumerate() {
        sphering.row_mut(i).scale_mut(1.0 / v.sqrt());
    }
    let data = rows(&(&sphering * xc));
    Ok(Whitened {
        data,
        sphering,
        mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::stats::mean;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn covariance(x: &[Vec<f64>]) -> DMatrix<f64> {
        let k = x.len();
        let t = x[0].len();
        DMatrix::from_fn(k, k, |i, j| {
            let (mi, mj) = (mean(&x[i]), mean(&x[j]));
            (0..t).map(|s| (x[i][s] - mi) * (x[j][s] - mj)).sum::<f64>() / (t - 1) as f64
        })
    }

    fn gaussian(seed: u64, t: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..t).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn correlated_pair_becomes_white() {
        let a = gaussian(1, 2000);
        let b = gaussian(2, 2000);
        let x = vec![
            a.iter().map(|v| 3.0 * v + 1.0).collect::<Vec<_>>(),
            a.iter().zip(&b).map(|(u, v)| 0.8 * u + 0.3 * v - 2.0).collect(),
        ];
        let w = whiten(&x).unwrap();
        let c = covariance(&w.data);
        assert!((c - DMatrix::identity(2, 2)).abs().max() < 1e-8);
    }

    #[test]
    fn white_input_needs_only_rotation() {
        // exactly white: orthogonal centered rows with unit sample variance
        let t = 400;
        let raw = [gaussian(5, t), gaussian(6, t)];
        let w0 = whiten(&raw).unwrap();
        let w = whiten(&w0.data).unwrap();
        let c = covariance(&w.data);
        assert!((c - DMatrix::identity(2, 2)).abs().max() < 1e-8);
        // sphering is orthogonal
        let s = &w.sphering;
        assert!((s * s.transpose() - DMatrix::identity(2, 2)).abs().max() < 1e-8);
    }

    #[test]
    fn duplicated_channel_is_singular() {
        let a = gaussian(9, 300);
        let x = vec![a.clone(), a.iter().map(|v| 2.0 * v).collect()];
        assert!(matches!(whiten(&x), Err(Error::SingularCovariance)));
        let x = vec![a, vec![1.0; 300]];
        assert!(matches!(whiten(&x), Err(Error::SingularCovariance)));
    }
}
