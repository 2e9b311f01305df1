//! Order-independent summation and the sample statistics used by the
//! Monte Carlo reports.
//!
//! All reductions are pairwise (tree) sums over index order, so results do
//! not depend on how many workers produced the samples.

use alloc::vec;
use alloc::vec::Vec;

/// Pairwise (tree) summation; deterministic for a fixed slice, accurate to
/// O(log n) rounding growth.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Strided pairwise sum of column `col` of a row-major `n x k` matrix.
pub fn pairwise_sum_col(data: &[f64], k: usize, col: usize) -> f64 {
    fn go(data: &[f64], k: usize, col: usize, lo: usize, hi: usize) -> f64 {
        if hi - lo <= 32 {
            let mut s = 0.0;
            for r in lo..hi {
                s += data[r * k + col];
            }
            return s;
        }
        let mid = lo + (hi - lo) / 2;
        go(data, k, col, lo, mid) + go(data, k, col, mid, hi)
    }
    go(data, k, col, 0, data.len() / k)
}

/// Sample mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    assert!(n >= 2, "need at least two samples");
    let mean = pairwise_sum(xs) / n as f64;
    let devs: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&devs) / (n as f64 - 1.0);
    (mean, libm::sqrt(var / n as f64))
}

/// Column means of a row-major `n x k` sample matrix.
pub fn col_means(data: &[f64], k: usize) -> Vec<f64> {
    let n = data.len() / k;
    (0..k)
        .map(|c| pairwise_sum_col(data, k, c) / n as f64)
        .collect()
}

/// Sample covariance matrix (`k x k`, row-major) of a row-major `n x k`
/// sample matrix, together with the column means.
pub fn covariance(data: &[f64], k: usize) -> (Vec<f64>, Vec<f64>) {
    let n = data.len() / k;
    assert!(n >= 2, "need at least two samples");
    let means = col_means(data, k);
    let mut cov = vec![0.0; k * k];
    let mut scratch = vec![0.0; n];
    for a in 0..k {
        for b in a..k {
            for r in 0..n {
                scratch[r] = (data[r * k + a] - means[a]) * (data[r * k + b] - means[b]);
            }
            let c = pairwise_sum(&scratch) / (n as f64 - 1.0);
            cov[a * k + b] = c;
            cov[b * k + a] = c;
        }
    }
    (means, cov)
}

/// Standard error of a smooth function of sample means by the delta method:
/// `se^2 = grad^T Cov(means) grad`, with `Cov(means) = Cov / n`.
pub fn delta_se(cov: &[f64], grad: &[f64], n_samples: usize) -> f64 {
    let k = grad.len();
    let mut q = 0.0;
    for a in 0..k {
        for b in 0..k {
            q += grad[a] * cov[a * k + b] * grad[b];
        }
    }
    libm::sqrt(q.max(0.0) / n_samples as f64)
}
