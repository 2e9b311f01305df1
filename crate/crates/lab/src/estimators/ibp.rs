//! Integration by parts on path space:
//! `E[D_{Uv}F G] = E[-F D_{Uv}G + F G delta(V)]`,
//! checked with common random numbers; optionally against an exact value.

use pathspace_core::malliavin::{divergence, AdaptedProcess};
use pathspace_core::pathfunc::{CylinderFunction, VectorProfile};
use pathspace_core::stats;

use crate::engine::sample_paths;
use crate::report::{CheckOutcome, Verdict};
use crate::LabError;

use super::Ctx;

/// Run one IBP identity check. `exact_lhs` pins the closed-form value of
/// the left side when one is known.
pub fn check_ibp(
    ctx: &Ctx,
    label: &str,
    f: &CylinderFunction,
    g: &CylinderFunction,
    v: &VectorProfile,
    exact_lhs: Option<f64>,
) -> Result<CheckOutcome, LabError> {
    let proc = AdaptedProcess::from_profile(v);
    let run = sample_paths(
        &ctx.model,
        &ctx.base,
        ctx.grid,
        ctx.paths,
        ctx.seed,
        3,
        |path, row| {
            let (Ok(fv), Ok(gv)) = (f.evaluate(path), g.evaluate(path)) else {
                row[0] = f64::NAN;
                return;
            };
            let dvf = f.directional(path, proc.values()).unwrap_or(f64::NAN);
            let dvg = g.directional(path, proc.values()).unwrap_or(f64::NAN);
            let delta = divergence(&proc, path);
            row[0] = dvf * gv;
            row[1] = -fv * dvg + fv * gv * delta;
            row[2] = row[0] - row[1];
        },
    )?;
    let (lhs, lhs_se) = run.mean_se(0);
    let (rhs, rhs_se) = run.mean_se(1);
    let (diff, diff_se) = run.mean_se(2);
    let verdict = Verdict::of_identity(diff, diff_se, ctx.threshold);
    let mut out = CheckOutcome::default();
    out.rows
        .push(ctx.row(label, "lhs", lhs, lhs_se, Verdict::Info));
    out.rows
        .push(ctx.row(label, "rhs", rhs, rhs_se, Verdict::Info));
    out.rows
        .push(ctx.row(label, "diff", diff, diff_se, verdict));
    out.push_verdict(verdict);
    out.lines.push(format!(
        "ibp {label}: lhs {lhs:.6} rhs {rhs:.6} |diff| {:.2e} +- {diff_se:.2e} ({})",
        diff.abs(),
        verdict.as_str()
    ));
    if let Some(want) = exact_lhs {
        let v2 = Verdict::of_identity(rhs - want, rhs_se, ctx.threshold);
        out.rows.push(ctx.row(label, "exact", want, 0.0, v2));
        out.push_verdict(v2);
        out.lines.push(format!(
            "ibp {label}: rhs vs exact value {want}: {}",
            v2.as_str()
        ));
    }
    Ok(out)
}

/// Martingale sanity of the divergence for a deterministic direction:
/// `E[delta(V)] = 0` and the Ito isometry `E[delta(V)^2] = ||v-hat||^2 / 2`
/// (on deterministic-hat members, the energy is a constant).
pub fn divergence_moments(ctx: &Ctx, v: &VectorProfile) -> Result<CheckOutcome, LabError> {
    let proc = AdaptedProcess::from_profile(v);
    let run = sample_paths(
        &ctx.model,
        &ctx.base,
        ctx.grid,
        ctx.paths,
        ctx.seed,
        3,
        |path, row| {
            let d = divergence(&proc, path);
            let vh = pathspace_core::malliavin::hat(&proc, path);
            row[0] = d;
            row[1] = d * d;
            row[2] = 0.5 * vh.h_norm_sq();
        },
    )?;
    let (mean, se) = run.mean_se(0);
    let mut out = CheckOutcome::default();
    let v_mean = Verdict::of_identity(mean, se, ctx.threshold);
    out.rows
        .push(ctx.row("divergence", "mean", mean, se, v_mean));
    out.push_verdict(v_mean);
    // E[delta^2] - E[||v-hat||^2]/2 should vanish.
    let (_, cov) = run.means_cov();
    let means = run.means();
    let diff = means[1] - means[2];
    let se_diff = stats::delta_se(&cov, &[0.0, 1.0, -1.0], run.n_finite);
    let v_iso = Verdict::of_identity(diff, se_diff, ctx.threshold);
    out.rows
        .push(ctx.row("divergence", "isometry-diff", diff, se_diff, v_iso));
    out.push_verdict(v_iso);
    out.lines.push(format!(
        "divergence moments: mean {mean:.2e} ({}), isometry diff {diff:.2e} ({})",
        v_mean.as_str(),
        v_iso.as_str()
    ));
    Ok(out)
}
