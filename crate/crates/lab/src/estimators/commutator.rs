//! Commutator formula in expectation form:
//! `D_V delta(W) = delta(nabla-mod_V W) + <V, W>_hat / 2`.
//! The left side contains the derivative of a stochastic integral, which is
//! not pathwise computable, so the outer derivative is eliminated by
//! integration by parts:
//! `E[F D_V delta(W)] = E[F delta(W) delta(V)] - E[D_V F delta(W)]`.

use pathspace_core::malliavin::{divergence, hat, modified_connection, AdaptedProcess};
use pathspace_core::pathfunc::{CylinderFunction, VectorProfile};
use pathspace_core::stats;

use crate::engine::sample_paths;
use crate::report::{CheckOutcome, Verdict};
use crate::LabError;

use super::Ctx;

pub fn check_commutator(
    ctx: &Ctx,
    label: &str,
    f: &CylinderFunction,
    v: &VectorProfile,
    w: &VectorProfile,
) -> Result<CheckOutcome, LabError> {
    let pv = AdaptedProcess::from_profile(v);
    let pw = AdaptedProcess::from_profile(w);
    let run = sample_paths(
        &ctx.model,
        &ctx.base,
        ctx.grid,
        ctx.paths,
        ctx.seed,
        5,
        |path, row| {
            let Ok(fv) = f.evaluate(path) else {
                row[0] = f64::NAN;
                return;
            };
            let dv = divergence(&pv, path);
            let dw = divergence(&pw, path);
            let dvf = f.directional(path, pv.values()).unwrap_or(f64::NAN);
            let modc = match modified_connection(&pv, &pw, path) {
                Ok(z) => z,
                Err(_) => {
                    row[0] = f64::NAN;
                    return;
                }
            };
            let hat_inner = hat(&pv, path).h_inner(&hat(&pw, path));
            row[0] = fv * dw * dv;
            row[1] = dvf * dw;
            row[2] = fv * divergence(&modc, path);
            row[3] = fv * hat_inner;
            row[4] = fv;
        },
    )?;
    let (mu, cov) = run.means_cov();
    let lhs = mu[0] - mu[1];
    let rhs = mu[2] + 0.5 * mu[3];
    let diff = lhs - rhs;
    let se = stats::delta_se(&cov, &[1.0, -1.0, -1.0, -0.5, 0.0], run.n_finite);
    let verdict = Verdict::of_identity(diff, se, ctx.threshold);
    let mut out = CheckOutcome::default();
    out.rows
        .push(ctx.row(label, "lhs", lhs, 0.0, Verdict::Info));
    out.rows
        .push(ctx.row(label, "rhs", rhs, 0.0, Verdict::Info));
    out.rows.push(ctx.row(label, "diff", diff, se, verdict));
    out.push_verdict(verdict);
    out.lines.push(format!(
        "commutator {label}: lhs {lhs:.6} rhs {rhs:.6} diff {diff:.2e} +- {se:.1e} ({})",
        verdict.as_str()
    ));
    Ok(out)
}
