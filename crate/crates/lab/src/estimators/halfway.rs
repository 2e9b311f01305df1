//! The Halfway Harnack quadratic form, assembled two ways on shared paths:
//! the four-term form
//! `Q_F = E[D_V D_V F]/E[F] - E[D_V F]^2/E[F]^2 + E[F delta(nabla-mod_V V)]/E[F]
//!        + E[F |V|^2_hat]/(2 E[F])`
//! and its proof identity, the weighted variance
//! `Q_F = E[F delta(V)^2]/E[F] - (E[F delta(V)]/E[F])^2`.

use pathspace_core::malliavin::{divergence, hat, modified_connection, AdaptedProcess};
use pathspace_core::pathfunc::{CylinderFunction, PhiProfile};
use pathspace_core::stats;

use crate::engine::sample_paths;
use crate::report::{CheckOutcome, Verdict};
use crate::LabError;

use super::Ctx;

pub fn halfway_harnack(
    ctx: &Ctx,
    label: &str,
    f: &CylinderFunction,
    phi: &PhiProfile,
    dir: &[f64],
) -> Result<CheckOutcome, LabError> {
    let proc = AdaptedProcess::from_values(
        phi.times_vector(dir),
        dir.len(),
        ctx.grid.dt(),
        pathspace_core::malliavin::Provenance::Deterministic,
    );
    let run = sample_paths(
        &ctx.model,
        &ctx.base,
        ctx.grid,
        ctx.paths,
        ctx.seed,
        8,
        |path, row| {
            let Ok(fv) = f.evaluate(path) else {
                row[0] = f64::NAN;
                return;
            };
            let dvdv = f
                .second_directional_diag(path, phi, dir)
                .unwrap_or(f64::NAN);
            let dvf = f.directional(path, proc.values()).unwrap_or(f64::NAN);
            let modc = match modified_connection(&proc, &proc, path) {
                Ok(z) => z,
                Err(_) => {
                    row[0] = f64::NAN;
                    return;
                }
            };
            let delta_mod = divergence(&modc, path);
            let vhat = hat(&proc, path);
            let delta = divergence(&proc, path);
            row[0] = fv;
            row[1] = dvdv;
            row[2] = dvf;
            row[3] = fv * delta_mod;
            row[4] = fv * vhat.h_norm_sq();
            row[5] = fv * delta;
            row[6] = fv * delta * delta;
            row[7] = fv * fv;
        },
    )?;
    let (mu, cov) = run.means_cov();
    if mu[0] <= 0.0 {
        return Err(LabError::NonpositiveMass);
    }
    let m0 = mu[0];
    let q4 = mu[1] / m0 - (mu[2] / m0) * (mu[2] / m0) + mu[3] / m0 + 0.5 * mu[4] / m0;
    let qv = mu[6] / m0 - (mu[5] / m0) * (mu[5] / m0);

    let mut g4 = vec![0.0; 8];
    g4[0] = -mu[1] / (m0 * m0) + 2.0 * mu[2] * mu[2] / (m0 * m0 * m0)
        - mu[3] / (m0 * m0)
        - 0.5 * mu[4] / (m0 * m0);
    g4[1] = 1.0 / m0;
    g4[2] = -2.0 * mu[2] / (m0 * m0);
    g4[3] = 1.0 / m0;
    g4[4] = 0.5 / m0;
    let mut gv = vec![0.0; 8];
    gv[0] = -mu[6] / (m0 * m0) + 2.0 * mu[5] * mu[5] / (m0 * m0 * m0);
    gv[5] = -2.0 * mu[5] / (m0 * m0);
    gv[6] = 1.0 / m0;
    let se4 = stats::delta_se(&cov, &g4, run.n_finite);
    let sev = stats::delta_se(&cov, &gv, run.n_finite);
    let gdiff: Vec<f64> = g4.iter().zip(gv.iter()).map(|(a, b)| a - b).collect();
    let sediff = stats::delta_se(&cov, &gdiff, run.n_finite);

    let v4 = Verdict::of_nonnegative(q4, se4, ctx.threshold);
    // The variance form is a weighted sample variance, nonnegative by
    // construction; still classify it for the report.
    let vv = Verdict::of_nonnegative(qv, sev, ctx.threshold);
    let vid = Verdict::of_identity(q4 - qv, sediff, ctx.threshold);

    let mut out = CheckOutcome::default();
    out.rows.push(ctx.row(label, "q-four-term", q4, se4, v4));
    out.rows
        .push(ctx.row(label, "q-variance-form", qv, sev, vv));
    out.rows
        .push(ctx.row(label, "assembly-diff", q4 - qv, sediff, vid));
    out.push_verdict(v4);
    out.push_verdict(vv);
    out.push_verdict(vid);
    out.lines.push(format!(
        "halfway {label}: Q4 {q4:.5} +- {se4:.1e} ({}), Qvar {qv:.5} +- {sev:.1e} ({}), diff {:.2e} ({})",
        v4.as_str(),
        vv.as_str(),
        q4 - qv,
        vid.as_str()
    ));
    Ok(out)
}
