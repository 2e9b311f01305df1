//! The verification estimators: one module per identity or inequality
//! family of the path-space calculus. Every check uses common random
//! numbers (both sides of an identity are evaluated on the same paths) and
//! reports the difference estimator's standard error.

pub mod cameron;
pub mod commutator;
pub mod convexity;
pub mod errnorms;
pub mod halfway;
pub mod harnack;
pub mod ibp;
pub mod liyau;
pub mod simulate;

use pathspace_core::geometry::ManifoldModel;
use pathspace_core::sde::TimeGrid;

use crate::report::{CsvRow, Verdict};

/// Shared experiment context handed to every estimator.
#[derive(Clone)]
pub struct Ctx {
    pub model: ManifoldModel,
    pub base: Vec<f64>,
    pub grid: TimeGrid,
    pub paths: usize,
    pub seed: u64,
    pub threshold: f64,
    pub experiment: String,
    pub model_label: String,
}

impl Ctx {
    pub fn row(
        &self,
        label: impl Into<String>,
        component: impl Into<String>,
        estimate: f64,
        stderr: f64,
        verdict: Verdict,
    ) -> CsvRow {
        CsvRow {
            experiment: self.experiment.clone(),
            label: label.into(),
            component: component.into(),
            estimate,
            stderr,
            n: self.paths,
            seed: self.seed,
            dt: self.grid.dt(),
            t: self.grid.horizon(),
            model: self.model_label.clone(),
            verdict,
        }
    }
}

/// Model label for CSV rows.
pub fn model_label(model: &ManifoldModel) -> String {
    match model {
        ManifoldModel::Euclidean { dim } => format!("euclidean{dim}"),
        ManifoldModel::FlatTorus { sides } => format!("torus{}", sides.len()),
        ManifoldModel::Sphere { dim, radius } => format!("sphere{dim}(r={radius})"),
        ManifoldModel::Hyperbolic { dim, radius } => format!("hyperbolic{dim}(r={radius})"),
        ManifoldModel::Product { factors } => {
            let parts: Vec<String> = factors.iter().map(model_label).collect();
            parts.join("x")
        }
    }
}
