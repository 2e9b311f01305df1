//! Batch experiment runner: resolve a config, dispatch the estimator
//! suite, assemble CSV and a human-readable summary, and map verdicts to
//! exit codes (0 verified, 2 violated; usage errors are reported as
//! `LabError` and exit 1 in the binary).

use std::path::Path;

use pathspace_core::geometry::ManifoldModel;
use pathspace_core::pathfunc::{CylinderFunction, PhiProfile, VectorProfile};
use pathspace_core::sde::TimeGrid;

use crate::config::{ExperimentConfig, ExperimentKind, FunctionSpec};
use crate::csvout;
use crate::estimators::{self, Ctx};
use crate::functions;
use crate::report::{CheckOutcome, CsvRow, Verdict};
use crate::LabError;

pub struct RunResult {
    pub rows: Vec<CsvRow>,
    pub summary: String,
    pub csv: String,
    pub verdict: Verdict,
    pub exit_code: i32,
}

fn fspec(name: &str, times: Vec<f64>) -> FunctionSpec {
    FunctionSpec {
        name: name.into(),
        times: Some(times),
        center: None,
        width: None,
        s0: None,
        coeffs: None,
    }
}

fn build_ctx(config: &ExperimentConfig) -> Result<(Ctx, TimeGrid), LabError> {
    let model = functions::build_model(&config.model)?;
    let base = functions::base_point(&model, &config.base_point)?;
    let grid = TimeGrid::new(config.t_max, config.steps)?;
    let ctx = Ctx {
        model_label: estimators::model_label(&model),
        model,
        base,
        grid,
        paths: config.paths,
        seed: config.seed,
        threshold: config.threshold,
        experiment: config.experiment.clone(),
    };
    Ok((ctx, grid))
}

fn has_flow_oracle(model: &ManifoldModel) -> bool {
    matches!(
        model,
        ManifoldModel::Euclidean { .. } | ManifoldModel::FlatTorus { .. }
    )
}

/// Default one-point test function for a model: a Gaussian bump, periodized
/// on the torus.
fn default_function(ctx: &Ctx, config: &ExperimentConfig) -> Result<CylinderFunction, LabError> {
    let spec = config
        .function
        .clone()
        .unwrap_or_else(|| fspec("gaussian-bump", vec![ctx.grid.horizon()]));
    functions::build_function(&ctx.model, &ctx.grid, &spec, config.function2.as_ref())
}

fn default_phi(ctx: &Ctx, config: &ExperimentConfig) -> Result<PhiProfile, LabError> {
    match &config.profile {
        Some(p) => functions::build_phi(ctx.grid, p),
        None => Ok(PhiProfile::ramp(ctx.grid, ctx.grid.horizon())?),
    }
}

fn ramp_dir(ctx: &Ctx, t0: f64, dir: &[f64]) -> Result<VectorProfile, LabError> {
    let phi = PhiProfile::ramp(ctx.grid, t0)?;
    Ok(VectorProfile::from_phi(&phi, dir))
}

fn basis_dir(n: usize, a: usize) -> Vec<f64> {
    let mut d = vec![0.0; n];
    d[a] = 1.0;
    d
}

pub fn simulate_suite(ctx: &Ctx, config: &ExperimentConfig) -> Result<CheckOutcome, LabError> {
    let mut out = estimators::simulate::covariance_check(ctx)?;
    if has_flow_oracle(&ctx.model) {
        let spec = config
            .function
            .clone()
            .unwrap_or_else(|| fspec("gaussian-bump", vec![ctx.grid.horizon()]));
        let f = functions::build_function(&ctx.model, &ctx.grid, &spec, None)?;
        let oracle = functions::flow_oracle(&ctx.model, &spec)?;
        out.merge(estimators::simulate::heatflow_check(ctx, &f, &oracle)?);
    }
    if let ManifoldModel::Sphere { dim: 2, radius } = ctx.model {
        out.merge(estimators::simulate::sphere_moment_check(ctx, radius)?);
    }
    Ok(out)
}

pub fn ibp_suite(ctx: &Ctx, config: &ExperimentConfig) -> Result<CheckOutcome, LabError> {
    let n = ctx.model.dim();
    let t = ctx.grid.horizon();
    let mut out = CheckOutcome::default();
    // If the user pinned a function, run a single identity with it.
    if let Some(spec) = &config.function {
        let f = functions::build_function(&ctx.model, &ctx.grid, spec, config.function2.as_ref())?;
        let g = functions::build_function(
            &ctx.model,
            &ctx.grid,
            &fspec("constant-one", vec![t]),
            None,
        )?;
        let v = match &config.profile {
            Some(p) => functions::build_direction(ctx.grid, n, p)?,
            None => ramp_dir(ctx, t, &basis_dir(n, 0))?,
        };
        return estimators::ibp::check_ibp(ctx, "custom", &f, &g, &v, None);
    }
    let one =
        functions::build_function(&ctx.model, &ctx.grid, &fspec("constant-one", vec![t]), None)?;
    let bump = functions::build_function(
        &ctx.model,
        &ctx.grid,
        &fspec("gaussian-bump", vec![t]),
        None,
    )?;
    let bump2 = {
        let mut s = fspec("gaussian-bump", vec![t / 2.0]);
        s.width = Some(0.8);
        functions::build_function(&ctx.model, &ctx.grid, &s, None)?
    };
    // Combo 1: the exact Euclidean case F = gamma^1_{t0}, v = ramp(t0) e1
    // has E[D_V F G] = 1; elsewhere it is bump-vs-one.
    if matches!(ctx.model, ManifoldModel::Euclidean { .. }) {
        let lin = functions::build_function(
            &ctx.model,
            &ctx.grid,
            &fspec("coordinate-linear", vec![t / 2.0]),
            None,
        )?;
        let v = ramp_dir(ctx, t / 2.0, &basis_dir(n, 0))?;
        out.merge(estimators::ibp::check_ibp(
            ctx,
            "linear-vs-one",
            &lin,
            &one,
            &v,
            Some(1.0),
        )?);
    } else {
        let v = ramp_dir(ctx, t, &basis_dir(n, 0))?;
        out.merge(estimators::ibp::check_ibp(
            ctx,
            "bump-vs-one",
            &bump,
            &one,
            &v,
            None,
        )?);
    }
    // Combo 2: two bumps, second basis direction.
    let v2 = ramp_dir(ctx, t, &basis_dir(n, n.min(2) - 1))?;
    out.merge(estimators::ibp::check_ibp(
        ctx,
        "bump-vs-bump",
        &bump,
        &bump2,
        &v2,
        None,
    )?);
    // Combo 3: mixed direction, shorter ramp.
    let mut dir = vec![0.0; n];
    let inv = 1.0 / (2.0f64).sqrt();
    dir[0] = inv;
    dir[n.min(2) - 1] = if n > 1 { inv } else { dir[0] };
    let v3 = ramp_dir(ctx, t / 2.0, &dir)?;
    let f3 = {
        let mut s = fspec("gaussian-bump", vec![t / 4.0, t]);
        s.name = "product-of-two".into();
        functions::build_function(&ctx.model, &ctx.grid, &s, None)?
    };
    out.merge(estimators::ibp::check_ibp(
        ctx,
        "product-vs-bump",
        &f3,
        &bump2,
        &v3,
        None,
    )?);
    // Martingale and isometry sanity for the divergence itself.
    out.merge(estimators::ibp::divergence_moments(
        ctx,
        &ramp_dir(ctx, t / 2.0, &basis_dir(n, 0))?,
    )?);
    Ok(out)
}

pub fn halfway_suite(ctx: &Ctx, config: &ExperimentConfig) -> Result<CheckOutcome, LabError> {
    let f = default_function(ctx, config)?;
    let phi = default_phi(ctx, config)?;
    let n = ctx.model.dim();
    let mut out = CheckOutcome::default();
    out.merge(estimators::halfway::halfway_harnack(
        ctx,
        "dir-e0",
        &f,
        &phi,
        &basis_dir(n, 0),
    )?);
    if n > 1 {
        out.merge(estimators::halfway::halfway_harnack(
            ctx,
            "dir-e1",
            &f,
            &phi,
            &basis_dir(n, 1),
        )?);
    }
    // F = 1 reduces the four-term form to ||v||^2/2 and the variance form
    // to E[delta^2].
    let one = functions::build_function(
        &ctx.model,
        &ctx.grid,
        &fspec("constant-one", vec![ctx.grid.horizon()]),
        None,
    )?;
    out.merge(estimators::halfway::halfway_harnack(
        ctx,
        "constant-one",
        &one,
        &phi,
        &basis_dir(n, 0),
    )?);
    Ok(out)
}

/// The battery of nonnegative catalog functions for Harnack inequalities.
fn harnack_battery(ctx: &Ctx) -> Vec<(String, FunctionSpec)> {
    let t = ctx.grid.horizon();
    let mut specs = Vec::new();
    let mut bump = fspec("gaussian-bump", vec![t]);
    bump.width = Some(0.5);
    specs.push(("bump".to_string(), bump));
    let mut bump_wide = fspec("gaussian-bump", vec![t / 2.0]);
    bump_wide.width = Some(0.9);
    specs.push(("bump-wide".to_string(), bump_wide));
    let mut heat = fspec("heat-kernel", vec![t]);
    heat.s0 = Some(0.5);
    specs.push(("heat-kernel".to_string(), heat));
    let mut prod = fspec("product-of-two", vec![t / 2.0, t]);
    prod.width = Some(0.6);
    specs.push(("product".to_string(), prod));
    let mut bump_early = fspec("gaussian-bump", vec![t / 4.0]);
    bump_early.width = Some(0.7);
    specs.push(("bump-early".to_string(), bump_early));
    specs.retain(|(_, s)| {
        // heat-kernel base functions only exist on oracle models.
        s.name != "heat-kernel" || has_flow_oracle(&ctx.model)
    });
    specs
}

pub fn harnack_suite(ctx: &Ctx, config: &ExperimentConfig) -> Result<CheckOutcome, LabError> {
    let phi = default_phi(ctx, config)?;
    let mut out = CheckOutcome::default();
    if let Some(spec) = &config.function {
        let f = functions::build_function(&ctx.model, &ctx.grid, spec, config.function2.as_ref())?;
        let (o, _) = estimators::harnack::differential_harnack(ctx, &spec.name, &f, &phi)?;
        out.merge(o);
        return Ok(out);
    }
    for (name, spec) in harnack_battery(ctx) {
        let f = functions::build_function(&ctx.model, &ctx.grid, &spec, None)?;
        let (o, _) = estimators::harnack::differential_harnack(ctx, &name, &f, &phi)?;
        out.merge(o);
    }
    // F = 1: the left side is exactly (n/2) ||phi||^2.
    let one = functions::build_function(
        &ctx.model,
        &ctx.grid,
        &fspec("constant-one", vec![ctx.grid.horizon()]),
        None,
    )?;
    let (o, rep) = estimators::harnack::differential_harnack(ctx, "constant-one", &one, &phi)?;
    out.merge(o);
    let want = ctx.model.dim() as f64 / 2.0 * phi.h_norm_sq();
    let v = Verdict::of_identity(rep.lhs - want, rep.stderr, ctx.threshold);
    out.rows
        .push(ctx.row("constant-one", "lhs-exact", want, 0.0, v));
    out.push_verdict(v);
    Ok(out)
}

pub fn matrix_harnack_suite(
    ctx: &Ctx,
    config: &ExperimentConfig,
) -> Result<CheckOutcome, LabError> {
    let phi = default_phi(ctx, config)?;
    let mut out = CheckOutcome::default();
    if let Some(spec) = &config.function {
        let f = functions::build_function(&ctx.model, &ctx.grid, spec, config.function2.as_ref())?;
        return estimators::harnack::matrix_harnack(ctx, &spec.name, &f, &phi);
    }
    let mut battery = harnack_battery(ctx);
    if !matches!(ctx.model, ManifoldModel::FlatTorus { .. }) {
        let quad = FunctionSpec {
            name: "coordinate-quadratic".into(),
            times: Some(vec![ctx.grid.horizon()]),
            center: None,
            width: None,
            s0: None,
            coeffs: None,
        };
        battery.push(("quadratic".to_string(), quad));
    }
    for (name, spec) in battery {
        let f = functions::build_function(&ctx.model, &ctx.grid, &spec, None)?;
        out.merge(estimators::harnack::matrix_harnack(ctx, &name, &f, &phi)?);
    }
    Ok(out)
}

pub fn liyau_suite(ctx: &Ctx, config: &ExperimentConfig) -> Result<CheckOutcome, LabError> {
    let spec = config.function.clone().unwrap_or_else(|| {
        let mut s = fspec("heat-kernel", vec![ctx.grid.horizon()]);
        s.s0 = Some(1.0);
        s
    });
    let f = functions::build_function(&ctx.model, &ctx.grid, &spec, None)?;
    let oracle = functions::flow_oracle(&ctx.model, &spec)?;
    estimators::liyau::liyau_recovery(ctx, &f, &oracle)
}

pub fn cameron_suite(ctx: &Ctx, config: &ExperimentConfig) -> Result<CheckOutcome, LabError> {
    let n = ctx.model.dim();
    let t = ctx.grid.horizon();
    let mut out = CheckOutcome::default();
    if let Some(spec) = &config.function {
        let f = functions::build_function(&ctx.model, &ctx.grid, spec, config.function2.as_ref())?;
        let h = match &config.profile {
            Some(p) => functions::build_direction(ctx.grid, n, p)?,
            None => ramp_dir(ctx, t, &basis_dir(n, 0))?,
        };
        return estimators::cameron::check_cameron_martin(ctx, "custom", &f, &h);
    }
    let bump = functions::build_function(
        &ctx.model,
        &ctx.grid,
        &fspec("gaussian-bump", vec![t]),
        None,
    )?;
    out.merge(estimators::cameron::check_cameron_martin(
        ctx,
        "bump-ramp",
        &bump,
        &ramp_dir(ctx, t, &basis_dir(n, 0))?,
    )?);
    let heat = {
        let mut s = fspec("heat-kernel", vec![t / 2.0]);
        s.s0 = Some(0.5);
        functions::build_function(&ctx.model, &ctx.grid, &s, None)?
    };
    let poly = VectorProfile::polyline(
        ctx.grid,
        n,
        &[t / 2.0, t],
        &[
            basis_dir(n, 0).iter().map(|x| 0.4 * x).collect(),
            vec![-0.2; n],
        ],
    )?;
    out.merge(estimators::cameron::check_cameron_martin(
        ctx,
        "heat-polyline",
        &heat,
        &poly,
    )?);
    let prod = functions::build_function(
        &ctx.model,
        &ctx.grid,
        &fspec("product-of-two", vec![t / 2.0, t]),
        None,
    )?;
    let mut dir = vec![0.3; n];
    dir[0] = -0.5;
    out.merge(estimators::cameron::check_cameron_martin(
        ctx,
        "product-mixed",
        &prod,
        &ramp_dir(ctx, t / 2.0, &dir)?,
    )?);
    // F = 1: the reweighting must integrate to one.
    let one =
        functions::build_function(&ctx.model, &ctx.grid, &fspec("constant-one", vec![t]), None)?;
    out.merge(estimators::cameron::check_cameron_martin(
        ctx,
        "constant-one",
        &one,
        &ramp_dir(ctx, t, &basis_dir(n, 0))?,
    )?);
    Ok(out)
}

pub fn convexity_suite(ctx: &Ctx, _config: &ExperimentConfig) -> Result<CheckOutcome, LabError> {
    let n = ctx.model.dim();
    let t = ctx.grid.horizon();
    let mut out = CheckOutcome::default();
    // 10 seeded catalog triples (F, h1, h2).
    let mut state = ctx.seed ^ 0xC0FFEE;
    let mut rnd = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for trial in 0..10 {
        let f = if trial % 2 == 0 {
            let mut s = fspec("gaussian-bump", vec![t]);
            s.width = Some(0.4 + 0.6 * rnd());
            functions::build_function(&ctx.model, &ctx.grid, &s, None)?
        } else {
            let mut s = fspec("heat-kernel", vec![t / 2.0]);
            s.s0 = Some(0.3 + 0.7 * rnd());
            functions::build_function(&ctx.model, &ctx.grid, &s, None)?
        };
        let mk = |rnd: &mut dyn FnMut() -> f64| -> Result<VectorProfile, LabError> {
            let p1: Vec<f64> = (0..n).map(|_| rnd() - 0.5).collect();
            let p2: Vec<f64> = (0..n).map(|_| rnd() - 0.5).collect();
            Ok(VectorProfile::polyline(
                ctx.grid,
                n,
                &[t / 2.0, t],
                &[p1, p2],
            )?)
        };
        let h1 = mk(&mut rnd)?;
        let h2 = mk(&mut rnd)?;
        out.merge(estimators::convexity::midpoint_defect(
            ctx,
            &format!("triple-{trial}"),
            &f,
            &h1,
            &h2,
        )?);
    }
    // F = 1 has the exactly quadratic functional ||h||^2 / 4, whose
    // midpoint defect is -||h1 - h2||^2 / 16 with zero variance.
    {
        let one = functions::build_function(
            &ctx.model,
            &ctx.grid,
            &fspec("constant-one", vec![t]),
            None,
        )?;
        let h1 = ramp_dir(ctx, t, &basis_dir(n, 0))?;
        let h2 = ramp_dir(ctx, t / 2.0, &basis_dir(n, n.min(2) - 1))?;
        let quad = estimators::convexity::midpoint_defect(ctx, "constant-one", &one, &h1, &h2)?;
        let got = quad
            .rows
            .iter()
            .find(|r| r.component == "midpoint-defect")
            .map(|r| r.estimate)
            .unwrap();
        let want = -h1.combine(1.0, &h2, -1.0).h_norm_sq() / 16.0;
        let v = Verdict::of_identity(got - want, 0.0, ctx.threshold);
        out.merge(quad);
        out.rows.push(ctx.row("constant-one", "defect-exact", want, 0.0, v));
        out.push_verdict(v);
    }

    // One-point second difference against the analytic Gaussian value.
    let s0 = 1.0;
    let t1 = t;
    let f = {
        let mut s = fspec("heat-kernel", vec![t1]);
        s.s0 = Some(s0);
        functions::build_function(&ctx.model, &ctx.grid, &s, None)?
    };
    let x_line = {
        let mut p = vec![0.0; n];
        p[0] = 0.6;
        VectorProfile::polyline(ctx.grid, n, &[t1], &[p])?
    };
    let dir = ramp_dir(ctx, t1, &basis_dir(n, 0))?;
    let analytic = 1.0 / (2.0 * t1) - 1.0 / (2.0 * (t1 + s0));
    out.merge(estimators::convexity::second_difference(
        ctx,
        "gaussian-second-difference",
        &f,
        &x_line,
        &dir,
        0.5,
        Some(analytic),
    )?);
    Ok(out)
}

pub fn commutator_suite(ctx: &Ctx, config: &ExperimentConfig) -> Result<CheckOutcome, LabError> {
    let n = ctx.model.dim();
    let t = ctx.grid.horizon();
    let f = default_function(ctx, config)?;
    let mut out = CheckOutcome::default();
    let v = ramp_dir(ctx, t, &basis_dir(n, 0))?;
    out.merge(estimators::commutator::check_commutator(
        ctx,
        "same-ramp",
        &f,
        &v,
        &v,
    )?);
    let w = ramp_dir(ctx, t / 2.0, &basis_dir(n, n.min(2) - 1))?;
    out.merge(estimators::commutator::check_commutator(
        ctx,
        "mixed-ramps",
        &f,
        &v,
        &w,
    )?);
    // F = 1: the identity reduces to E[delta(W) delta(V)] = <V,W>_hat / 2.
    let one =
        functions::build_function(&ctx.model, &ctx.grid, &fspec("constant-one", vec![t]), None)?;
    out.merge(estimators::commutator::check_commutator(
        ctx,
        "constant-one",
        &one,
        &v,
        &w,
    )?);
    Ok(out)
}

pub fn errnorm_suite(ctx: &Ctx, config: &ExperimentConfig) -> Result<CheckOutcome, LabError> {
    let phi = default_phi(ctx, config)?;
    estimators::errnorms::error_norm_means(ctx, &phi)
}

fn dispatch(
    kind: ExperimentKind,
    ctx: &Ctx,
    config: &ExperimentConfig,
) -> Result<CheckOutcome, LabError> {
    match kind {
        ExperimentKind::Simulate => simulate_suite(ctx, config),
        ExperimentKind::Ibp => ibp_suite(ctx, config),
        ExperimentKind::Halfway => halfway_suite(ctx, config),
        ExperimentKind::Harnack => harnack_suite(ctx, config),
        ExperimentKind::MatrixHarnack => matrix_harnack_suite(ctx, config),
        ExperimentKind::Liyau => liyau_suite(ctx, config),
        ExperimentKind::CameronMartin => cameron_suite(ctx, config),
        ExperimentKind::Convexity => convexity_suite(ctx, config),
        ExperimentKind::Commutator => commutator_suite(ctx, config),
        ExperimentKind::ErrorNorms => errnorm_suite(ctx, config),
        ExperimentKind::All => {
            let mut out = CheckOutcome::default();
            out.merge(simulate_suite(ctx, config)?);
            out.merge(ibp_suite(ctx, config)?);
            out.merge(halfway_suite(ctx, config)?);
            out.merge(harnack_suite(ctx, config)?);
            out.merge(matrix_harnack_suite(ctx, config)?);
            if has_flow_oracle(&ctx.model) {
                out.merge(liyau_suite(ctx, config)?);
            }
            if matches!(ctx.model, ManifoldModel::Euclidean { .. }) {
                out.merge(cameron_suite(ctx, config)?);
                out.merge(convexity_suite(ctx, config)?);
            }
            out.merge(commutator_suite(ctx, config)?);
            out.merge(errnorm_suite(ctx, config)?);
            Ok(out)
        }
    }
}

/// Run one experiment config end to end.
pub fn run(config: &ExperimentConfig) -> Result<RunResult, LabError> {
    let kind = config.validate()?;
    let (ctx, _) = build_ctx(config)?;
    let outcome = dispatch(kind, &ctx, config)?;
    let verdict = outcome.final_verdict();
    let csv = csvout::to_csv(&outcome.rows);
    let mut summary = String::new();
    summary.push_str(&format!("experiment: {}\n", config.experiment));
    summary.push_str(&format!("model: {}\n", ctx.model_label));
    summary.push_str(&format!(
        "grid: T={} steps={} dt={}\npaths: {}\nseed: {}\nthreshold: {} sigma\n",
        ctx.grid.horizon(),
        ctx.grid.steps(),
        ctx.grid.dt(),
        ctx.paths,
        ctx.seed,
        ctx.threshold
    ));
    summary.push_str("\nresults:\n");
    for line in &outcome.lines {
        summary.push_str("  ");
        summary.push_str(line);
        summary.push('\n');
    }
    summary.push_str(&format!("\noverall: {}\n", verdict.as_str()));
    summary.push_str("\neffective config (re-run reproduces the CSV byte-for-byte):\n");
    summary.push_str(&config.to_json());
    summary.push('\n');
    let exit_code = if verdict == Verdict::Violated { 2 } else { 0 };
    Ok(RunResult {
        rows: outcome.rows,
        summary,
        csv,
        verdict,
        exit_code,
    })
}

/// Run a parameter sweep; emits one combined CSV with a leading sweep
/// column.
pub fn sweep(
    config: &ExperimentConfig,
    param: &str,
    values: &[String],
) -> Result<RunResult, LabError> {
    if values.is_empty() {
        return Err(LabError::Config("sweep needs at least one value".into()));
    }
    let mut rows = Vec::new();
    let mut summary = String::new();
    let mut verdict = Verdict::Info;
    for value in values {
        let mut c = config.clone();
        match param {
            "r" | "radius" => {
                let r: f64 = value
                    .parse()
                    .map_err(|_| LabError::Config(format!("bad radius '{value}'")))?;
                c.model.radius = Some(r);
            }
            "dt" => {
                let dt: f64 = value
                    .parse()
                    .map_err(|_| LabError::Config(format!("bad dt '{value}'")))?;
                if !(dt > 0.0) {
                    return Err(LabError::Config("dt must be positive".into()));
                }
                let steps = (c.t_max / dt).round() as usize;
                if steps < 2 || ((steps as f64) * dt - c.t_max).abs() > 1e-9 * c.t_max {
                    return Err(LabError::Config(format!(
                        "dt {dt} does not divide the horizon {}",
                        c.t_max
                    )));
                }
                c.steps = steps;
            }
            "seed" => {
                c.seed = value
                    .parse()
                    .map_err(|_| LabError::Config(format!("bad seed '{value}'")))?;
            }
            "paths" => {
                c.paths = value
                    .parse()
                    .map_err(|_| LabError::Config(format!("bad paths '{value}'")))?;
            }
            other => {
                return Err(LabError::Config(format!(
                    "unknown sweep parameter '{other}' (r, dt, seed, paths)"
                )))
            }
        }
        let res = run(&c)?;
        verdict = verdict.worst(res.verdict);
        summary.push_str(&format!("--- {param} = {value} ---\n"));
        summary.push_str(&res.summary);
        summary.push('\n');
        for row in res.rows {
            rows.push((value.clone(), row));
        }
    }
    let csv = csvout::to_sweep_csv(&rows);
    let exit_code = if verdict == Verdict::Violated { 2 } else { 0 };
    Ok(RunResult {
        rows: rows.into_iter().map(|(_, r)| r).collect(),
        summary,
        csv,
        verdict,
        exit_code,
    })
}

/// Write CSV and summary into the output directory.
pub fn write_outputs(result: &RunResult, out_dir: &Path) -> Result<(), LabError> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("report.csv"), &result.csv)?;
    std::fs::write(out_dir.join("summary.txt"), &result.summary)?;
    Ok(())
}
