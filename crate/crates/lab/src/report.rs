//! Report types produced by the verification estimators.

use serde::Serialize;

/// Shape of a reported estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Shape {
    Scalar,
    Vector(usize),
    Matrix(usize),
}

impl Shape {
    pub fn len(&self) -> usize {
        match self {
            Shape::Scalar => 1,
            Shape::Vector(n) => *n,
            Shape::Matrix(n) => n * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Component label for CSV rows: empty for scalars, `v_i` / `h_ij`
    /// (row-major) otherwise.
    pub fn component_label(&self, idx: usize) -> String {
        match self {
            Shape::Scalar => String::new(),
            Shape::Vector(_) => format!("v_{idx}"),
            Shape::Matrix(n) => format!("h_{}{}", idx / n, idx % n),
        }
    }
}

/// A Monte Carlo estimate with componentwise standard errors.
#[derive(Debug, Clone, Serialize)]
pub struct MCReport {
    pub label: String,
    pub shape: Shape,
    pub estimate: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_paths: usize,
    pub n_nonfinite: usize,
    pub seed: u64,
    pub wall_ms: u128,
}

impl MCReport {
    pub fn scalar(
        label: impl Into<String>,
        estimate: f64,
        stderr: f64,
        n: usize,
        seed: u64,
    ) -> Self {
        MCReport {
            label: label.into(),
            shape: Shape::Scalar,
            estimate: vec![estimate],
            stderr: vec![stderr],
            n_paths: n,
            n_nonfinite: 0,
            seed,
            wall_ms: 0,
        }
    }
}

/// Verdict of an inequality check at a configurable sigma threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds,
    HoldsWithinCi,
    Violated,
    /// Identity / reporting rows that carry no inequality.
    Info,
}

impl Verdict {
    /// Classify a quantity that must be nonnegative: `Holds` if the point
    /// estimate is already nonnegative, `HoldsWithinCi` if it is within
    /// `threshold` standard errors of zero, `Violated` below that.
    pub fn of_nonnegative(value: f64, stderr: f64, threshold: f64) -> Verdict {
        if value >= 0.0 {
            Verdict::Holds
        } else if value >= -threshold * stderr {
            Verdict::HoldsWithinCi
        } else {
            Verdict::Violated
        }
    }

    /// Classify an identity `|diff| <= threshold * stderr` (with a small
    /// absolute floor so exact identities at zero variance pass).
    pub fn of_identity(diff: f64, stderr: f64, threshold: f64) -> Verdict {
        if diff.abs() <= threshold * stderr + 1e-12 {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::HoldsWithinCi => "holds-within-ci",
            Verdict::Violated => "violated",
            Verdict::Info => "info",
        }
    }

    pub fn worst(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (HoldsWithinCi, _) | (_, HoldsWithinCi) => HoldsWithinCi,
            (Holds, _) | (_, Holds) => Holds,
            _ => Info,
        }
    }
}

/// Assembled differential-Harnack inequality: the raw terms, the combined
/// left-hand side, its standard error, and the verdict. The combined value
/// is always recomputable from the stored terms.
#[derive(Debug, Clone, Serialize)]
pub struct HarnackReport {
    pub label: String,
    pub e_lap: f64,
    pub e_grad: Vec<f64>,
    pub e_f: f64,
    pub e_f2: f64,
    pub phi_norm_sq: f64,
    pub dim: usize,
    pub lhs: f64,
    pub stderr: f64,
    pub verdict: Verdict,
    /// `E[F^2]^{1/2} / E[F]`, the driver of the non-explicit error terms on
    /// general manifolds.
    pub l2_ratio: f64,
}

impl HarnackReport {
    /// Recompute the combined left-hand side from the stored terms.
    pub fn recompute_lhs(&self) -> f64 {
        let grad_sq: f64 = self.e_grad.iter().map(|g| g * g).sum();
        self.e_lap / self.e_f - grad_sq / (self.e_f * self.e_f)
            + self.dim as f64 / 2.0 * self.phi_norm_sq
    }
}

/// One CSV row of the reporting contract. Matrix quantities emit one row
/// per component with row-major `h_ij` labels.
#[derive(Debug, Clone)]
pub struct CsvRow {
    pub experiment: String,
    pub label: String,
    pub component: String,
    pub estimate: f64,
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
    pub dt: f64,
    pub t: f64,
    pub model: String,
    pub verdict: Verdict,
}

/// Outcome of one named check: CSV rows, human-readable lines, and the
/// worst verdict encountered.
#[derive(Debug, Default)]
pub struct CheckOutcome {
    pub rows: Vec<CsvRow>,
    pub lines: Vec<String>,
    pub verdict: Option<Verdict>,
}

impl CheckOutcome {
    pub fn push_verdict(&mut self, v: Verdict) {
        self.verdict = Some(match self.verdict {
            None => v,
            Some(w) => w.worst(v),
        });
    }

    pub fn merge(&mut self, other: CheckOutcome) {
        self.rows.extend(other.rows);
        self.lines.extend(other.lines);
        if let Some(v) = other.verdict {
            self.push_verdict(v);
        }
    }

    pub fn final_verdict(&self) -> Verdict {
        self.verdict.unwrap_or(Verdict::Info)
    }
}
