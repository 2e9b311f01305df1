//! Monte Carlo means of the traced connection error norms
//! `E||sum_a nabla_{V_a} V_a||^2` and `E||sum_a nabla_{V_a} hat(V_a)||^2`.
//! Both vanish identically on flat members and shrink with curvature; the
//! radius sweep over spheres exercises that scaling.

use pathspace_core::malliavin::error_norms;
use pathspace_core::pathfunc::PhiProfile;

use crate::engine::sample_paths;
use crate::report::{CheckOutcome, Verdict};
use crate::LabError;

use super::Ctx;

pub fn error_norm_means(ctx: &Ctx, phi: &PhiProfile) -> Result<CheckOutcome, LabError> {
    let run = sample_paths(
        &ctx.model,
        &ctx.base,
        ctx.grid,
        ctx.paths,
        ctx.seed,
        2,
        |path, row| match error_norms(phi, path) {
            Ok((a, b)) => {
                row[0] = a;
                row[1] = b;
            }
            Err(_) => row[0] = f64::NAN,
        },
    )?;
    let (n1, se1) = run.mean_se(0);
    let (n2, se2) = run.mean_se(1);
    let mut out = CheckOutcome::default();
    // Flat members must give exactly zero, pathwise.
    let verdict = if ctx.model.is_flat() {
        if n1 == 0.0 && n2 == 0.0 {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    } else {
        Verdict::Info
    };
    out.rows
        .push(ctx.row("error-norms", "plain", n1, se1, verdict));
    out.rows
        .push(ctx.row("error-norms", "hatted", n2, se2, verdict));
    out.push_verdict(verdict);
    out.lines.push(format!(
        "error norms: plain {n1:.6e} +- {se1:.1e}, hatted {n2:.6e} +- {se2:.1e}"
    ));
    Ok(out)
}
