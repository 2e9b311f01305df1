//! Sampling sanity checks: the noise normalization, heat-flow consistency
//! against closed-form oracles, and the sphere second-moment comparison.

use pathspace_core::heatkernel::{self, FlowOracle};
use pathspace_core::pathfunc::CylinderFunction;
use pathspace_core::stats;

use crate::engine::sample_paths;
use crate::report::{CheckOutcome, Shape, Verdict};
use crate::LabError;

use super::Ctx;

/// Sample covariance of `W_T` must equal `2 T I` within the threshold.
pub fn covariance_check(ctx: &Ctx) -> Result<CheckOutcome, LabError> {
    let n = ctx.model.dim();
    let m = ctx.grid.steps();
    let k = n + n * (n + 1) / 2;
    let run = sample_paths(
        &ctx.model,
        &ctx.base,
        ctx.grid,
        ctx.paths,
        ctx.seed,
        k,
        |path, row| {
            let w = path.anti_development(m);
            row[..n].copy_from_slice(&w);
            let mut idx = n;
            for a in 0..n {
                for b in a..n {
                    row[idx] = w[a] * w[b];
                    idx += 1;
                }
            }
        },
    )?;
    let (means, cov) = run.means_cov();
    let mut out = CheckOutcome::default();
    let two_t = 2.0 * ctx.grid.horizon();
    let mut idx = n;
    for a in 0..n {
        for b in a..n {
            let est = means[idx] - means[a] * means[b];
            let mut grad = vec![0.0; k];
            grad[a] = -means[b];
            grad[b] += -means[a];
            grad[idx] = 1.0;
            let se = stats::delta_se(&cov, &grad, run.n_finite);
            let target = if a == b { two_t } else { 0.0 };
            let verdict = Verdict::of_identity(est - target, se, ctx.threshold);
            out.rows
                .push(ctx.row("noise-covariance", format!("h_{a}{b}"), est, se, verdict));
            out.push_verdict(verdict);
            idx += 1;
        }
    }
    out.lines.push(format!(
        "noise covariance of W_T vs 2T*I: worst verdict {}",
        out.final_verdict().as_str()
    ));
    Ok(out)
}

/// `E[f(gamma_t)]` against the heat-flow oracle at a set of times; the
/// tolerance is the larger of `threshold` standard errors and 1% relative.
pub fn heatflow_check(
    ctx: &Ctx,
    f: &CylinderFunction,
    oracle: &FlowOracle,
) -> Result<CheckOutcome, LabError> {
    let mut out = CheckOutcome::default();
    let t = f.times()[0];
    let report = crate::engine::mc_expect(
        &ctx.model,
        &ctx.base,
        ctx.grid,
        ctx.paths,
        ctx.seed,
        format!("heat-flow(t={t})"),
        Shape::Scalar,
        |path, row| {
            row[0] = f.evaluate(path).unwrap_or(f64::NAN);
        },
    )?;
    let (mean, se) = (report.estimate[0], report.stderr[0]);
    let want = oracle.eval(t, &ctx.base).value;
    let tol = (ctx.threshold * se).max(0.01 * want.abs());
    let verdict = if (mean - want).abs() <= tol {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    out.rows
        .push(ctx.row(format!("heat-flow(t={t})"), "mc", mean, se, verdict));
    out.rows.push(ctx.row(
        format!("heat-flow(t={t})"),
        "oracle",
        want,
        0.0,
        Verdict::Info,
    ));
    out.push_verdict(verdict);
    out.lines.push(format!(
        "E[f(gamma_{t})] = {mean:.6} vs oracle {want:.6} ({})",
        verdict.as_str()
    ));
    Ok(out)
}

/// Second moment of the distance to the start point on `S^2(r)` against
/// the spectral-series oracle.
pub fn sphere_moment_check(ctx: &Ctx, radius: f64) -> Result<CheckOutcome, LabError> {
    let m = ctx.grid.steps();
    let base = ctx.base.clone();
    let report = crate::engine::mc_expect(
        &ctx.model,
        &ctx.base,
        ctx.grid,
        ctx.paths,
        ctx.seed,
        "distance-sq-moment",
        Shape::Scalar,
        |path, row| {
            let d = path.model.distance(&base, path.point(m));
            row[0] = d * d;
        },
    )?;
    let (mean, se) = (report.estimate[0], report.stderr[0]);
    let want = heatkernel::sphere2_distance_sq_moment(radius, ctx.grid.horizon())?;
    let verdict = Verdict::of_identity(mean - want, se, ctx.threshold);
    let mut out = CheckOutcome::default();
    out.rows
        .push(ctx.row("distance-sq-moment", "mc", mean, se, verdict));
    out.rows
        .push(ctx.row("distance-sq-moment", "oracle", want, 0.0, Verdict::Info));
    out.push_verdict(verdict);
    out.lines.push(format!(
        "E[d(x, gamma_T)^2] = {mean:.6} vs spectral oracle {want:.6} ({})",
        verdict.as_str()
    ));
    Ok(out)
}
