//! Pathwise identities tying the Hessian assemblies together: the
//! Markovian-vs-L2 correction has two independent evaluation orders that
//! must agree to rounding on every sampled path, and on flat members the
//! correction vanishes identically.

use std::sync::Arc;

use pathspace_core::geometry::ManifoldModel;
use pathspace_core::malliavin::{self, AdaptedProcess};
use pathspace_core::pathfunc::catalog::{GaussBump, OnManifold};
use pathspace_core::pathfunc::{CylinderFunction, PhiProfile};
use pathspace_core::sde::{FramePath, TimeGrid};

fn sphere_setup() -> (ManifoldModel, TimeGrid, CylinderFunction, PhiProfile) {
    let model = ManifoldModel::Sphere {
        dim: 2,
        radius: 1.0,
    };
    let grid = TimeGrid::new(1.0, 500).unwrap();
    let f = CylinderFunction::new(
        vec![0.5],
        Arc::new(OnManifold {
            model: model.clone(),
            inner: GaussBump {
                center: vec![0.2, -0.4, 0.8],
                width: 0.9,
            },
        }),
    )
    .unwrap();
    let phi = PhiProfile::ramp(grid, 0.5).unwrap();
    (model, grid, f, phi)
}

#[test]
fn sphere_correction_has_two_matching_assemblies_per_path() {
    let (model, grid, f, phi) = sphere_setup();
    let base = model.base_point();
    let v = [0.6, -0.8];
    for p in 0..30 {
        let path = FramePath::simulate(&model, &base, grid, 2024, p);
        let markov = f.markovian_phi_hessian(&path, &phi, &v, &v).unwrap();
        let l2 = f.l2_phi_hessian(&path, &phi, &v, &v).unwrap();
        let strat = f.markovian_correction_strat_route(&path, &phi, &v).unwrap();
        assert!(
            ((markov - l2) - strat).abs() < 1e-10,
            "path {p}: split {} vs strat {strat}",
            markov - l2
        );
    }
}

#[test]
fn torus_laplacians_agree_pathwise() {
    let model = ManifoldModel::FlatTorus {
        sides: vec![1.0, 1.0],
    };
    let grid = TimeGrid::new(1.0, 300).unwrap();
    let f = CylinderFunction::new(
        vec![0.25, 1.0],
        Arc::new(pathspace_core::pathfunc::catalog::ProductOfTwo {
            model: model.clone(),
            f1: Arc::new(OnManifold {
                model: model.clone(),
                inner: pathspace_core::pathfunc::catalog::TorusSeparable {
                    sides: vec![1.0, 1.0],
                    center: vec![0.5, 0.5],
                    factor: pathspace_core::pathfunc::catalog::bump1d,
                    param: 0.3,
                },
            }),
            f2: Arc::new(OnManifold {
                model: model.clone(),
                inner: pathspace_core::pathfunc::catalog::TorusSeparable {
                    sides: vec![1.0, 1.0],
                    center: vec![0.2, 0.8],
                    factor: pathspace_core::pathfunc::catalog::bump1d,
                    param: 0.4,
                },
            }),
        }),
    )
    .unwrap();
    let phi = PhiProfile::ramp(grid, 1.0).unwrap();
    for p in 0..20 {
        let path = FramePath::simulate(&model, &[0.0, 0.0], grid, 99, p);
        let lap = f.phi_laplacian(&path, &phi).unwrap();
        let lap_l2 = f.l2_phi_laplacian(&path, &phi).unwrap();
        assert!((lap - lap_l2).abs() < 1e-10, "path {p}: {lap} vs {lap_l2}");
    }
}

#[test]
fn polarized_hessian_is_symmetric_on_the_sphere() {
    let (model, grid, f, phi) = sphere_setup();
    let base = model.base_point();
    let path = FramePath::simulate(&model, &base, grid, 5, 0);
    let v = [0.3, 0.7];
    let w = [-0.5, 0.2];
    let hvw = f.markovian_phi_hessian(&path, &phi, &v, &w).unwrap();
    let hwv = f.markovian_phi_hessian(&path, &phi, &w, &v).unwrap();
    assert!((hvw - hwv).abs() < 1e-9);
    // The diagonal of the polarized form recovers the direct diagonal.
    let hvv = f.markovian_phi_hessian(&path, &phi, &v, &v).unwrap();
    let quarter = {
        let two_v = [2.0 * v[0], 2.0 * v[1]];
        f.markovian_phi_hessian(&path, &phi, &two_v, &two_v)
            .unwrap()
            / 4.0
    };
    assert!((hvv - quarter).abs() < 1e-9);
}

#[test]
fn connection_trace_contraction_matches_hessian_assembly() {
    // The D_{nabla_V V} F part used inside the Hessian equals the
    // directional derivative along the separately assembled Markovian
    // connection process, summed over a basis.
    let (model, grid, f, phi) = sphere_setup();
    let base = model.base_point();
    for p in 0..10 {
        let path = FramePath::simulate(&model, &base, grid, 7331, p);
        let mut lap_corr = 0.0;
        for a in 0..2 {
            let mut e = [0.0, 0.0];
            e[a] = 1.0;
            let markov = f.markovian_phi_hessian(&path, &phi, &e, &e).unwrap();
            let l2 = f.l2_phi_hessian(&path, &phi, &e, &e).unwrap();
            lap_corr += markov - l2;
        }
        // Route through malliavin: finite sum minus D_{Uq}F with q the
        // connection process of each basis field.
        let mut by_connection = 0.0;
        for a in 0..2 {
            let va = malliavin::basis_process(&phi, 2, a);
            let q = malliavin::markovian_connection(&va, &va, &path).unwrap();
            let s_mats = malliavin::running_curvature(&path, va.values());
            let finite_sum = {
                let sd = f.slot_derivs(&path).unwrap();
                let n = 2;
                let mut acc = 0.0;
                for (j, &i) in sd.knots.iter().enumerate() {
                    let mut sh = [0.0, 0.0];
                    for r in 0..n {
                        sh[r] = (0..n)
                            .map(|c| s_mats[i * n * n + r * n + c] * va.value(i)[c])
                            .sum();
                    }
                    acc += sd.grads[j][0] * sh[0] + sd.grads[j][1] * sh[1];
                }
                acc
            };
            by_connection += finite_sum - f.directional(&path, q.values()).unwrap();
        }
        assert!(
            (lap_corr - by_connection).abs() < 1e-10,
            "path {p}: {lap_corr} vs {by_connection}"
        );
    }
}

#[test]
fn einstein_modified_connection_avoids_the_hat_derivative() {
    // On an Einstein member the hat derivative vanishes, so the modified
    // connection is exactly hat_inverse(markovian(v, hat(v))).
    let model = ManifoldModel::Sphere {
        dim: 2,
        radius: 1.0,
    };
    let grid = TimeGrid::new(1.0, 200).unwrap();
    let path = FramePath::simulate(&model, &model.base_point(), grid, 13, 2);
    let phi = PhiProfile::ramp(grid, 1.0).unwrap();
    let v = malliavin::basis_process(&phi, 2, 0);
    let modc = malliavin::modified_connection(&v, &v, &path).unwrap();
    // Hand assembly without the derivative oracle path.
    let v_hat = malliavin::hat(&v, &path);
    let v_hat_plain = AdaptedProcess::from_values(
        v_hat.values().to_vec(),
        2,
        grid.dt(),
        malliavin::Provenance::Deterministic,
    );
    let z = malliavin::markovian_connection(&v, &v_hat_plain, &path).unwrap();
    let by_hand = malliavin::hat_inverse(&z, &path);
    for (a, b) in modc.values().iter().zip(by_hand.values().iter()) {
        assert!((a - b).abs() < 1e-12);
    }
}
