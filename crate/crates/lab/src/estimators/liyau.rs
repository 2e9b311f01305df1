//! Li-Yau recovery: for one-point functions on Ricci-flat members with a
//! closed-form flow oracle, the path-space quantities reduce to the heat
//! flow at the base point,
//! `E[F] = f_t(x)`, `E[grad_phi F] = grad f_t(x)`, `E[Delta_phi F] =
//! Lap f_t(x)`, and the assembled left-hand side is the classical Li-Yau
//! expression `Lap f/f - |grad f|^2/f^2 + n/(2t)`.

use pathspace_core::heatkernel::FlowOracle;
use pathspace_core::pathfunc::{CylinderFunction, PhiProfile};
use pathspace_core::stats;

use crate::engine::sample_paths;
use crate::report::{CheckOutcome, Verdict};
use crate::LabError;

use super::Ctx;

pub fn liyau_recovery(
    ctx: &Ctx,
    f: &CylinderFunction,
    oracle: &FlowOracle,
) -> Result<CheckOutcome, LabError> {
    if !ctx.model.is_ricci_flat() {
        return Err(LabError::Config(
            "liyau needs a Ricci-flat model with a flow oracle (euclidean/torus)".into(),
        ));
    }
    let n = ctx.model.dim();
    let t0 = f.times()[0];
    let phi = PhiProfile::ramp(ctx.grid, t0)?;
    let k = n + 2;
    let run = sample_paths(
        &ctx.model,
        &ctx.base,
        ctx.grid,
        ctx.paths,
        ctx.seed,
        k,
        |path, row| {
            let Ok(fv) = f.evaluate(path) else {
                row[0] = f64::NAN;
                return;
            };
            row[0] = fv;
            row[1] = f.phi_laplacian(path, &phi).unwrap_or(f64::NAN);
            let grad = f.phi_gradient(path, &phi).unwrap_or_default();
            row[2..2 + n].copy_from_slice(&grad);
        },
    )?;
    let (mu, cov) = run.means_cov();
    if mu[0] <= 0.0 {
        return Err(LabError::NonpositiveMass);
    }
    let want = oracle.eval(t0, &ctx.base);
    let m0 = mu[0];
    let col_se = |c: usize| (cov[c * k + c] / run.n_finite as f64).sqrt();

    let mut out = CheckOutcome::default();
    // E[F] vs f_t(x): threshold or 1% relative, whichever is looser.
    let se0 = col_se(0);
    let tol0 = (ctx.threshold * se0).max(0.01 * want.value.abs());
    let v0 = if (m0 - want.value).abs() <= tol0 {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    out.rows.push(ctx.row("liyau", "e-f", m0, se0, v0));
    out.rows
        .push(ctx.row("liyau", "oracle-f", want.value, 0.0, Verdict::Info));
    out.push_verdict(v0);

    // E[grad_phi F] vs grad f_t(x) componentwise.
    for a in 0..n {
        let se = col_se(2 + a);
        let va = Verdict::of_identity(mu[2 + a] - want.grad[a], se, ctx.threshold);
        out.rows
            .push(ctx.row("liyau", format!("e-grad-{a}"), mu[2 + a], se, va));
        out.rows.push(ctx.row(
            "liyau",
            format!("oracle-grad-{a}"),
            want.grad[a],
            0.0,
            Verdict::Info,
        ));
        out.push_verdict(va);
    }

    // Assembled Li-Yau left-hand sides, path space vs oracle.
    let grad_sq: f64 = (0..n).map(|a| mu[2 + a] * mu[2 + a]).sum();
    let lhs_path = mu[1] / m0 - grad_sq / (m0 * m0) + n as f64 / (2.0 * t0);
    let mut g = vec![0.0; k];
    g[0] = -mu[1] / (m0 * m0) + 2.0 * grad_sq / (m0 * m0 * m0);
    g[1] = 1.0 / m0;
    for a in 0..n {
        g[2 + a] = -2.0 * mu[2 + a] / (m0 * m0);
    }
    let se_lhs = stats::delta_se(&cov, &g, run.n_finite);
    let og2: f64 = want.grad.iter().map(|x| x * x).sum();
    let lhs_oracle =
        want.laplacian / want.value - og2 / (want.value * want.value) + n as f64 / (2.0 * t0);
    let tol = (ctx.threshold * se_lhs).max(0.02 * lhs_oracle.abs());
    let v_lhs = if (lhs_path - lhs_oracle).abs() <= tol {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    out.rows
        .push(ctx.row("liyau", "lhs-path", lhs_path, se_lhs, v_lhs));
    out.rows
        .push(ctx.row("liyau", "lhs-oracle", lhs_oracle, 0.0, Verdict::Info));
    out.push_verdict(v_lhs);
    // Li-Yau itself: the oracle side must be nonnegative on Ricci-flat
    // members, and so must the Monte Carlo side within noise.
    let v_pos = Verdict::of_nonnegative(lhs_path, se_lhs, ctx.threshold);
    out.push_verdict(v_pos);
    out.lines.push(format!(
        "liyau: E[F] {m0:.6} vs {:.6} ({}), lhs path {lhs_path:.5} vs oracle {lhs_oracle:.5} ({})",
        want.value,
        v0.as_str(),
        v_lhs.as_str()
    ));
    Ok(out)
}
