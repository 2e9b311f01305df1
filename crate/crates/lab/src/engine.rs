//! Parallel Monte Carlo driver with deterministic, worker-count-independent
//! results.
//!
//! Paths are simulated from counter-based per-path streams and written into
//! an index-addressed sample matrix, so the contents never depend on the
//! rayon schedule. Reductions go through pairwise summation over path
//! order. Non-finite sample rows are excluded and counted; more than 0.1%
//! of them aborts the run.

use pathspace_core::geometry::ManifoldModel;
use pathspace_core::sde::{FramePath, TimeGrid};
use pathspace_core::stats;
use rayon::prelude::*;

use crate::report::{MCReport, Shape};
use crate::LabError;

/// Sample matrix from one Monte Carlo run: `n_finite` rows of `k` components
/// each, in path order.
pub struct SampleRun {
    pub k: usize,
    pub data: Vec<f64>,
    pub n_requested: usize,
    pub n_finite: usize,
    pub n_nonfinite: usize,
    pub seed: u64,
}

impl SampleRun {
    pub fn means(&self) -> Vec<f64> {
        stats::col_means(&self.data, self.k)
    }

    /// Column means together with the sample covariance matrix.
    pub fn means_cov(&self) -> (Vec<f64>, Vec<f64>) {
        stats::covariance(&self.data, self.k)
    }

    /// Mean and standard error of a single column.
    pub fn mean_se(&self, col: usize) -> (f64, f64) {
        let xs: Vec<f64> = (0..self.n_finite)
            .map(|r| self.data[r * self.k + col])
            .collect();
        stats::mean_se(&xs)
    }
}

/// Monte Carlo expectation of a path functional: mean and componentwise
/// standard errors, wrapped as a report. The wall time is informational
/// only and never enters the CSV contract.
pub fn mc_expect<F>(
    model: &ManifoldModel,
    base: &[f64],
    grid: TimeGrid,
    n_paths: usize,
    seed: u64,
    label: impl Into<String>,
    shape: Shape,
    eval: F,
) -> Result<MCReport, LabError>
where
    F: Fn(&FramePath, &mut [f64]) + Sync,
{
    let start = std::time::Instant::now();
    let run = sample_paths(model, base, grid, n_paths, seed, shape.len(), eval)?;
    let mut estimate = Vec::with_capacity(shape.len());
    let mut stderr = Vec::with_capacity(shape.len());
    for c in 0..shape.len() {
        let (m, se) = run.mean_se(c);
        estimate.push(m);
        stderr.push(se);
    }
    Ok(MCReport {
        label: label.into(),
        shape,
        estimate,
        stderr,
        n_paths: run.n_finite,
        n_nonfinite: run.n_nonfinite,
        seed,
        wall_ms: start.elapsed().as_millis(),
    })
}

/// Evaluate `eval` on `n_paths` independently simulated paths. The closure
/// fills one row of `k` sample components per path and must be pure.
pub fn sample_paths<F>(
    model: &ManifoldModel,
    base: &[f64],
    grid: TimeGrid,
    n_paths: usize,
    seed: u64,
    k: usize,
    eval: F,
) -> Result<SampleRun, LabError>
where
    F: Fn(&FramePath, &mut [f64]) + Sync,
{
    assert!(k > 0 && n_paths >= 2);
    let mut data = vec![0.0; n_paths * k];
    data.par_chunks_mut(k).enumerate().for_each(|(p, row)| {
        let path = FramePath::simulate(model, base, grid, seed, p as u64);
        eval(&path, row);
    });
    // Exclude non-finite rows in path order (deterministic).
    let mut kept = Vec::with_capacity(data.len());
    let mut n_nonfinite = 0usize;
    for row in data.chunks(k) {
        if row.iter().all(|x| x.is_finite()) {
            kept.extend_from_slice(row);
        } else {
            n_nonfinite += 1;
        }
    }
    if (n_nonfinite as f64) > 0.001 * n_paths as f64 {
        return Err(LabError::TooManyNonFinite {
            bad: n_nonfinite,
            total: n_paths,
        });
    }
    let n_finite = n_paths - n_nonfinite;
    if n_finite < 2 {
        return Err(LabError::TooManyNonFinite {
            bad: n_nonfinite,
            total: n_paths,
        });
    }
    Ok(SampleRun {
        k,
        data: kept,
        n_requested: n_paths,
        n_finite,
        n_nonfinite,
        seed,
    })
}
