//! Cameron-Martin change of variables on Euclidean path space:
//! `E[F(gamma + h)] = E[F(gamma) exp(<h, gamma>/2 - ||h||^2/4)]`
//! with `<h, gamma> = int <h', dW>`, both sides on the same paths.

use pathspace_core::geometry::ManifoldModel;
use pathspace_core::pathfunc::{CylinderFunction, VectorProfile};

use crate::engine::sample_paths;
use crate::report::{CheckOutcome, Verdict};
use crate::LabError;

use super::Ctx;

pub fn check_cameron_martin(
    ctx: &Ctx,
    label: &str,
    f: &CylinderFunction,
    h: &VectorProfile,
) -> Result<CheckOutcome, LabError> {
    if !matches!(ctx.model, ManifoldModel::Euclidean { .. }) {
        return Err(LabError::Config(
            "cameron-martin runs on euclidean models only".into(),
        ));
    }
    let n = ctx.model.dim();
    let dt = ctx.grid.dt();
    let h_norm_sq = h.h_norm_sq();
    let run = sample_paths(
        &ctx.model,
        &ctx.base,
        ctx.grid,
        ctx.paths,
        ctx.seed,
        3,
        |path, row| {
            let Ok(shifted) = f.evaluate_translated(path, h) else {
                row[0] = f64::NAN;
                return;
            };
            let Ok(plain) = f.evaluate(path) else {
                row[0] = f64::NAN;
                return;
            };
            let pairing = path.ito_vector(|i, out| {
                for c in 0..n {
                    out[c] = (h.value(i + 1)[c] - h.value(i)[c]) / dt;
                }
            });
            let weight = (0.5 * pairing - 0.25 * h_norm_sq).exp();
            row[0] = shifted;
            row[1] = plain * weight;
            row[2] = weight;
        },
    )?;
    let (lhs, lhs_se) = run.mean_se(0);
    let (rhs, rhs_se) = run.mean_se(1);
    // Common random numbers: difference of the per-path samples.
    let diffs: Vec<f64> = (0..run.n_finite)
        .map(|r| run.data[r * 3] - run.data[r * 3 + 1])
        .collect();
    let (diff, diff_se) = pathspace_core::stats::mean_se(&diffs);
    let verdict = Verdict::of_identity(diff, diff_se, ctx.threshold);
    let mut out = CheckOutcome::default();
    out.rows
        .push(ctx.row(label, "lhs-shifted", lhs, lhs_se, Verdict::Info));
    out.rows
        .push(ctx.row(label, "rhs-reweighted", rhs, rhs_se, Verdict::Info));
    out.rows
        .push(ctx.row(label, "diff", diff, diff_se, verdict));
    out.push_verdict(verdict);
    // The reweighting factor itself integrates to one (Gaussian m.g.f.
    // under the 2t covariation).
    let (wmean, wse) = run.mean_se(2);
    let vw = Verdict::of_identity(wmean - 1.0, wse, ctx.threshold);
    out.rows.push(ctx.row(label, "weight-mean", wmean, wse, vw));
    out.push_verdict(vw);
    out.lines.push(format!(
        "cameron-martin {label}: lhs {lhs:.6} rhs {rhs:.6} diff {diff:.2e} ({}), weight mean {wmean:.5} ({})",
        verdict.as_str(),
        vw.as_str()
    ));
    Ok(out)
}
