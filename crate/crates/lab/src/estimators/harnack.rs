//! Differential Harnack inequalities:
//! the traced form
//! `E[Delta_phi F]/E[F] - |E[grad_phi F]|^2/E[F]^2 + (n/2)||phi||^2 >= 0`
//! (exact on Ricci-flat members; on general members the residual is
//! reported together with the `E[F^2]^{1/2}/E[F]` error driver), and the
//! matrix form whose assembled matrix must have nonnegative eigenvalues.

use pathspace_core::linalg;
use pathspace_core::pathfunc::{CylinderFunction, PhiProfile};
use pathspace_core::stats;

use crate::engine::sample_paths;
use crate::report::{CheckOutcome, HarnackReport, Verdict};
use crate::LabError;

use super::Ctx;

/// Traced differential Harnack; returns the report for further use.
pub fn differential_harnack(
    ctx: &Ctx,
    label: &str,
    f: &CylinderFunction,
    phi: &PhiProfile,
) -> Result<(CheckOutcome, HarnackReport), LabError> {
    let n = ctx.model.dim();
    let k = n + 3;
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
            let lap = f.phi_laplacian(path, phi).unwrap_or(f64::NAN);
            let grad = f.phi_gradient(path, phi).unwrap_or_default();
            row[0] = fv;
            row[1] = lap;
            row[2..2 + n].copy_from_slice(&grad);
            row[2 + n] = fv * fv;
        },
    )?;
    let (mu, cov) = run.means_cov();
    if mu[0] <= 0.0 {
        return Err(LabError::NonpositiveMass);
    }
    let m0 = mu[0];
    let grad_sq: f64 = (0..n).map(|a| mu[2 + a] * mu[2 + a]).sum();
    let phi_sq = phi.h_norm_sq();
    let lhs = mu[1] / m0 - grad_sq / (m0 * m0) + n as f64 / 2.0 * phi_sq;
    let mut g = vec![0.0; k];
    g[0] = -mu[1] / (m0 * m0) + 2.0 * grad_sq / (m0 * m0 * m0);
    g[1] = 1.0 / m0;
    for a in 0..n {
        g[2 + a] = -2.0 * mu[2 + a] / (m0 * m0);
    }
    let se = stats::delta_se(&cov, &g, run.n_finite);
    // The inequality is exact only on Ricci-flat members and is asserted
    // there. Elsewhere the residual is informational, together with the L2
    // ratio that drives the curvature-dependent error terms.
    let verdict = if ctx.model.is_ricci_flat() {
        Verdict::of_nonnegative(lhs, se, ctx.threshold)
    } else {
        Verdict::Info
    };
    let report = HarnackReport {
        label: label.to_string(),
        e_lap: mu[1],
        e_grad: mu[2..2 + n].to_vec(),
        e_f: m0,
        e_f2: mu[2 + n],
        phi_norm_sq: phi_sq,
        dim: n,
        lhs,
        stderr: se,
        verdict,
        l2_ratio: mu[2 + n].max(0.0).sqrt() / m0,
    };
    let col_se = |c: usize| (cov[c * k + c] / run.n_finite as f64).sqrt();
    let mut out = CheckOutcome::default();
    out.rows.push(ctx.row(label, "lhs", lhs, se, verdict));
    out.rows
        .push(ctx.row(label, "e-f", m0, col_se(0), Verdict::Info));
    out.rows
        .push(ctx.row(label, "e-lap", mu[1], col_se(1), Verdict::Info));
    for a in 0..n {
        out.rows.push(ctx.row(
            label,
            format!("e-grad-{a}"),
            mu[2 + a],
            col_se(2 + a),
            Verdict::Info,
        ));
    }
    out.rows
        .push(ctx.row(label, "phi-norm-sq", phi_sq, 0.0, Verdict::Info));
    out.rows
        .push(ctx.row(label, "l2-ratio", report.l2_ratio, 0.0, Verdict::Info));
    out.push_verdict(verdict);
    out.lines.push(format!(
        "harnack {label}: lhs {lhs:.5} +- {se:.1e} ({})",
        verdict.as_str()
    ));
    Ok((out, report))
}

/// Matrix differential Harnack: minimum eigenvalue of
/// `E[Hess_phi F]/E[F] - E[grad]xE[grad]/E[F]^2 + ||phi||^2/2 I`.
pub fn matrix_harnack(
    ctx: &Ctx,
    label: &str,
    f: &CylinderFunction,
    phi: &PhiProfile,
) -> Result<CheckOutcome, LabError> {
    let n = ctx.model.dim();
    // Samples: F, F^2, grad (n), upper-triangle Hessian entries.
    let n_h = n * (n + 1) / 2;
    let k = 2 + n + n_h;
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
            row[1] = fv * fv;
            let grad = f.phi_gradient(path, phi).unwrap_or_default();
            row[2..2 + n].copy_from_slice(&grad);
            let mut idx = 2 + n;
            let mut ea = vec![0.0; n];
            let mut eb = vec![0.0; n];
            for a in 0..n {
                for b in a..n {
                    ea.fill(0.0);
                    eb.fill(0.0);
                    ea[a] = 1.0;
                    eb[b] = 1.0;
                    row[idx] = f
                        .markovian_phi_hessian(path, phi, &ea, &eb)
                        .unwrap_or(f64::NAN);
                    idx += 1;
                }
            }
        },
    )?;
    let (mu, cov) = run.means_cov();
    if mu[0] <= 0.0 {
        return Err(LabError::NonpositiveMass);
    }
    let m0 = mu[0];
    let phi_sq = phi.h_norm_sq();
    // Assemble the matrix and the entrywise delta-method errors.
    let mut mat = vec![0.0; n * n];
    let mut se_mat = vec![0.0; n * n];
    let mut idx = 2 + n;
    for a in 0..n {
        for b in a..n {
            let val = mu[idx] / m0 - mu[2 + a] * mu[2 + b] / (m0 * m0)
                + if a == b { 0.5 * phi_sq } else { 0.0 };
            let mut g = vec![0.0; k];
            g[0] = -mu[idx] / (m0 * m0) + 2.0 * mu[2 + a] * mu[2 + b] / (m0 * m0 * m0);
            g[idx] = 1.0 / m0;
            g[2 + a] += -mu[2 + b] / (m0 * m0);
            g[2 + b] += -mu[2 + a] / (m0 * m0);
            let se = stats::delta_se(&cov, &g, run.n_finite);
            mat[a * n + b] = val;
            mat[b * n + a] = val;
            se_mat[a * n + b] = se;
            se_mat[b * n + a] = se;
            idx += 1;
        }
    }
    let eigs = linalg::sym_eigenvalues(&mat, n);
    let min_eig = eigs[0];
    // A 1-sigma Frobenius bound on the eigenvalue perturbation.
    let se_bound = se_mat.iter().map(|s| s * s).sum::<f64>().sqrt();
    let verdict = if ctx.model.is_flat() {
        Verdict::of_nonnegative(min_eig, se_bound, ctx.threshold)
    } else {
        Verdict::Info
    };
    let mut out = CheckOutcome::default();
    for a in 0..n {
        for b in 0..n {
            out.rows.push(ctx.row(
                label,
                format!("h_{a}{b}"),
                mat[a * n + b],
                se_mat[a * n + b],
                Verdict::Info,
            ));
        }
    }
    out.rows
        .push(ctx.row(label, "min-eigenvalue", min_eig, se_bound, verdict));
    out.rows.push(ctx.row(
        label,
        "l2-ratio",
        mu[1].max(0.0).sqrt() / m0,
        0.0,
        Verdict::Info,
    ));
    out.push_verdict(verdict);
    out.lines.push(format!(
        "matrix-harnack {label}: min eig {min_eig:.5} +- {se_bound:.1e} ({})",
        verdict.as_str()
    ));
    Ok(out)
}
