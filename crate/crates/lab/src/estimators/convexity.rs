//! Convexity of `Phi_F(h) = ln E[F(gamma + h)] + ||h||^2 / 4` on Euclidean
//! path space: midpoint convexity defects must be nonpositive up to noise,
//! and second differences along `eps * phi v` reproduce the Matrix Harnack
//! values, exactly computable for Gaussian one-point functions.

use pathspace_core::geometry::ManifoldModel;
use pathspace_core::pathfunc::{CylinderFunction, VectorProfile};
use pathspace_core::stats;

use crate::engine::sample_paths;
use crate::report::{CheckOutcome, Verdict};
use crate::LabError;

use super::Ctx;

fn require_euclidean(ctx: &Ctx) -> Result<(), LabError> {
    if matches!(ctx.model, ManifoldModel::Euclidean { .. }) {
        Ok(())
    } else {
        Err(LabError::Config(
            "convexity runs on euclidean models only".into(),
        ))
    }
}

/// Midpoint convexity defect
/// `Phi(h_mid) - Phi(h1)/2 - Phi(h2)/2` with `h_mid = (h1 + h2)/2`;
/// convexity demands it be nonpositive, so `-defect` is checked as a
/// nonnegative quantity.
pub fn midpoint_defect(
    ctx: &Ctx,
    label: &str,
    f: &CylinderFunction,
    h1: &VectorProfile,
    h2: &VectorProfile,
) -> Result<CheckOutcome, LabError> {
    require_euclidean(ctx)?;
    let hm = h1.combine(0.5, h2, 0.5);
    let run = sample_paths(
        &ctx.model,
        &ctx.base,
        ctx.grid,
        ctx.paths,
        ctx.seed,
        3,
        |path, row| {
            row[0] = f.evaluate_translated(path, &hm).unwrap_or(f64::NAN);
            row[1] = f.evaluate_translated(path, h1).unwrap_or(f64::NAN);
            row[2] = f.evaluate_translated(path, h2).unwrap_or(f64::NAN);
        },
    )?;
    let (mu, cov) = run.means_cov();
    if mu.iter().any(|m| *m <= 0.0) {
        return Err(LabError::NonpositiveMass);
    }
    let defect = mu[0].ln() + 0.25 * hm.h_norm_sq()
        - 0.5 * (mu[1].ln() + 0.25 * h1.h_norm_sq())
        - 0.5 * (mu[2].ln() + 0.25 * h2.h_norm_sq());
    let grad = [1.0 / mu[0], -0.5 / mu[1], -0.5 / mu[2]];
    let se = stats::delta_se(&cov, &grad, run.n_finite);
    let verdict = Verdict::of_nonnegative(-defect, se, ctx.threshold);
    let mut out = CheckOutcome::default();
    out.rows
        .push(ctx.row(label, "midpoint-defect", defect, se, verdict));
    out.push_verdict(verdict);
    out.lines.push(format!(
        "convexity {label}: defect {defect:.5} +- {se:.1e} ({})",
        verdict.as_str()
    ));
    Ok(out)
}

/// Second difference of `eps -> Phi_F(h + eps d)`; for one-point Gaussian
/// functions with straight-line `h` this equals the Hamilton Matrix
/// Harnack value exactly, which the caller supplies as `analytic`.
pub fn second_difference(
    ctx: &Ctx,
    label: &str,
    f: &CylinderFunction,
    h: &VectorProfile,
    d: &VectorProfile,
    eps: f64,
    analytic: Option<f64>,
) -> Result<CheckOutcome, LabError> {
    require_euclidean(ctx)?;
    let hp = h.combine(1.0, d, eps);
    let hm = h.combine(1.0, d, -eps);
    let run = sample_paths(
        &ctx.model,
        &ctx.base,
        ctx.grid,
        ctx.paths,
        ctx.seed,
        3,
        |path, row| {
            row[0] = f.evaluate_translated(path, &hp).unwrap_or(f64::NAN);
            row[1] = f.evaluate_translated(path, h).unwrap_or(f64::NAN);
            row[2] = f.evaluate_translated(path, &hm).unwrap_or(f64::NAN);
        },
    )?;
    let (mu, cov) = run.means_cov();
    if mu.iter().any(|m| *m <= 0.0) {
        return Err(LabError::NonpositiveMass);
    }
    // The quadratic penalty differences are exact:
    // (||h+eps d||^2 - 2||h||^2 + ||h-eps d||^2) / 4 = eps^2 ||d||^2 / 2.
    let penalty = 0.5 * d.h_norm_sq();
    let second = (mu[0].ln() - 2.0 * mu[1].ln() + mu[2].ln()) / (eps * eps) + penalty;
    let grad = [
        1.0 / (mu[0] * eps * eps),
        -2.0 / (mu[1] * eps * eps),
        1.0 / (mu[2] * eps * eps),
    ];
    let se = stats::delta_se(&cov, &grad, run.n_finite);
    let mut out = CheckOutcome::default();
    let v_pos = Verdict::of_nonnegative(second, se, ctx.threshold);
    out.rows
        .push(ctx.row(label, "second-difference", second, se, v_pos));
    out.push_verdict(v_pos);
    if let Some(want) = analytic {
        let v_id = Verdict::of_identity(second - want, se, ctx.threshold);
        out.rows.push(ctx.row(label, "analytic", want, 0.0, v_id));
        out.push_verdict(v_id);
        out.lines.push(format!(
            "convexity {label}: second difference {second:.5} vs analytic {want:.5} ({})",
            v_id.as_str()
        ));
    } else {
        out.lines.push(format!(
            "convexity {label}: second difference {second:.5} +- {se:.1e} ({})",
            v_pos.as_str()
        ));
    }
    Ok(out)
}
