//! Seed batteries and short-horizon oracle checks: every identity-check
//! family must stay inside its confidence band across a battery of seeds
//! (common random numbers make the difference estimators tight), and the
//! sphere sampler must match the spectral oracle at short horizons too.

use pathspace_lab::config::ExperimentConfig;
use pathspace_lab::estimators::{self, model_label, Ctx};
use pathspace_lab::report::Verdict;
use pathspace_lab::runner;

use pathspace_core::geometry::ManifoldModel;
use pathspace_core::sde::TimeGrid;

fn battery(config_json: &str, component: &str) -> (usize, usize) {
    let config = ExperimentConfig::from_json(config_json).unwrap();
    let seeds: Vec<String> = (1..=20).map(|s| (s * 7919).to_string()).collect();
    let result = runner::sweep(&config, "seed", &seeds).unwrap();
    let rows: Vec<_> = result.rows.iter().filter(|r| r.component == component).collect();
    let ok = rows.iter().filter(|r| r.verdict != Verdict::Violated).count();
    (ok, rows.len())
}

#[test]
fn ibp_battery_20_seeds() {
    let (ok, total) = battery(
        r#"{"experiment": "ibp", "paths": 20000, "steps": 100, "seed": 0}"#,
        "diff",
    );
    // Three identity rows per seed.
    assert_eq!(total, 60);
    assert!(ok * 100 >= total * 95, "ibp battery: {ok}/{total} within band");
}

#[test]
fn halfway_battery_20_seeds() {
    let (ok, total) = battery(
        r#"{"experiment": "halfway", "model": {"kind": "torus"}, "base_point": [3.0, 3.0],
            "paths": 10000, "steps": 100, "seed": 0,
            "function": {"name": "gaussian-bump", "times": [1.0], "center": [3.0, 3.0], "width": 0.8}}"#,
        "assembly-diff",
    );
    // Two basis directions plus the constant-one case per seed.
    assert_eq!(total, 60);
    assert!(ok * 100 >= total * 95, "halfway battery: {ok}/{total} within band");
}

#[test]
fn commutator_battery_20_seeds() {
    let (ok, total) = battery(
        r#"{"experiment": "commutator", "paths": 10000, "steps": 100, "seed": 0}"#,
        "diff",
    );
    assert_eq!(total, 60);
    assert!(ok * 100 >= total * 95, "commutator battery: {ok}/{total} within band");
}

#[test]
fn cameron_martin_battery_20_seeds() {
    let (ok, total) = battery(
        r#"{"experiment": "cameron-martin", "paths": 10000, "steps": 100, "seed": 0}"#,
        "diff",
    );
    assert_eq!(total, 80);
    assert!(ok * 100 >= total * 95, "cameron-martin battery: {ok}/{total} within band");
}

#[test]
fn sphere_short_horizon_moment_matches_spectral_oracle() {
    // E[d(x, gamma_T)^2] on S^2(1) at T = 0.05 with dt = 1e-3.
    let model = ManifoldModel::Sphere { dim: 2, radius: 1.0 };
    let ctx = Ctx {
        model_label: model_label(&model),
        base: model.base_point(),
        model,
        grid: TimeGrid::new(0.05, 50).unwrap(),
        paths: 100_000,
        seed: 31337,
        threshold: 3.0,
        experiment: "simulate".into(),
    };
    let out = estimators::simulate::sphere_moment_check(&ctx, 1.0).unwrap();
    for row in &out.rows {
        assert_ne!(row.verdict, Verdict::Violated, "short-horizon moment violated");
    }
}
