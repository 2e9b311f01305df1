//! Constructors turning config specs into models, cylinder functions,
//! profiles, and (where they exist) closed-form heat-flow oracles.

use std::sync::Arc;

use pathspace_core::geometry::ManifoldModel;
use pathspace_core::heatkernel::FlowOracle;
use pathspace_core::pathfunc::catalog::{
    bump1d, heat1d, CoordLinear, CoordQuadratic, EuclideanHeatKernelFn, GaussBump, OnManifold,
    ProductOfTwo, TorusSeparable,
};
use pathspace_core::pathfunc::{CylinderBase, CylinderFunction, PhiProfile, VectorProfile};
use pathspace_core::sde::TimeGrid;

use crate::config::{FunctionSpec, ModelSpec, ProfileSpec};
use crate::LabError;

pub fn build_model(spec: &ModelSpec) -> Result<ManifoldModel, LabError> {
    let model = match spec.kind.as_str() {
        "euclidean" => ManifoldModel::Euclidean {
            dim: spec.dim.unwrap_or(2),
        },
        "torus" => ManifoldModel::FlatTorus {
            sides: spec
                .sides
                .clone()
                .unwrap_or_else(|| vec![1.0; spec.dim.unwrap_or(2)]),
        },
        "sphere" => ManifoldModel::Sphere {
            dim: spec.dim.unwrap_or(2),
            radius: spec.radius.unwrap_or(1.0),
        },
        "hyperbolic" => ManifoldModel::Hyperbolic {
            dim: spec.dim.unwrap_or(2),
            radius: spec.radius.unwrap_or(1.0),
        },
        "sphere-x-line" => ManifoldModel::Product {
            factors: vec![
                ManifoldModel::Sphere {
                    dim: 2,
                    radius: spec.radius.unwrap_or(1.0),
                },
                ManifoldModel::Euclidean { dim: 1 },
            ],
        },
        other => return Err(LabError::Config(format!("unknown model kind '{other}'"))),
    };
    match &model {
        ManifoldModel::Sphere { dim, radius } | ManifoldModel::Hyperbolic { dim, radius } => {
            if *dim < 1 || !(*radius > 0.0) {
                return Err(LabError::Config(
                    "model needs dim >= 1 and radius > 0".into(),
                ));
            }
        }
        ManifoldModel::FlatTorus { sides } => {
            if sides.is_empty() || sides.iter().any(|l| !(*l > 0.0)) {
                return Err(LabError::Config("torus sides must be positive".into()));
            }
        }
        ManifoldModel::Euclidean { dim } if *dim == 0 => {
            return Err(LabError::Config("dimension must be positive".into()));
        }
        _ => {}
    }
    Ok(model)
}

/// Resolve the base point: the model's canonical base unless overridden.
pub fn base_point(model: &ManifoldModel, cfg: &Option<Vec<f64>>) -> Result<Vec<f64>, LabError> {
    match cfg {
        None => Ok(model.base_point()),
        Some(p) => {
            if p.len() != model.ambient_dim() {
                return Err(LabError::Config(format!(
                    "base point needs {} coordinates",
                    model.ambient_dim()
                )));
            }
            Ok(p.clone())
        }
    }
}

/// Constant-one base function, usable on every model.
pub struct ConstantOne;

impl CylinderBase for ConstantOne {
    fn arity(&self) -> usize {
        1
    }
    fn value(&self, _pts: &[&[f64]]) -> f64 {
        1.0
    }
    fn gradient(&self, _slot: usize, _pts: &[&[f64]], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn hessian(&self, _i: usize, _j: usize, _p: &[&[f64]], _x: &[f64], _y: &[f64]) -> f64 {
        0.0
    }
}

fn default_center(model: &ManifoldModel) -> Vec<f64> {
    match model {
        // Centering bumps on the torus midpoint keeps them well inside the
        // fundamental domain.
        ManifoldModel::FlatTorus { sides } => sides.iter().map(|l| l / 2.0).collect(),
        _ => model.base_point(),
    }
}

fn one_slot_base(
    model: &ManifoldModel,
    spec: &FunctionSpec,
) -> Result<Arc<dyn CylinderBase>, LabError> {
    let amb = model.ambient_dim();
    let center = spec.center.clone().unwrap_or_else(|| default_center(model));
    if center.len() != amb && spec.name != "constant-one" {
        return Err(LabError::Config(format!(
            "function center needs {amb} coordinates"
        )));
    }
    Ok(match spec.name.as_str() {
        "constant-one" => Arc::new(ConstantOne),
        "gaussian-bump" => {
            let width = spec.width.unwrap_or(0.5);
            match model {
                ManifoldModel::FlatTorus { sides } => Arc::new(OnManifold {
                    model: model.clone(),
                    inner: TorusSeparable {
                        sides: sides.clone(),
                        center,
                        factor: bump1d,
                        param: width,
                    },
                }),
                _ => Arc::new(OnManifold {
                    model: model.clone(),
                    inner: GaussBump { center, width },
                }),
            }
        }
        "coordinate-linear" => {
            if matches!(model, ManifoldModel::FlatTorus { .. }) {
                return Err(LabError::Config(
                    "coordinate-linear is not periodic; not usable on the torus".into(),
                ));
            }
            let a = spec.coeffs.clone().unwrap_or_else(|| {
                let mut a = vec![0.0; amb];
                a[0] = 1.0;
                a
            });
            Arc::new(OnManifold {
                model: model.clone(),
                inner: CoordLinear { a, b: 0.0 },
            })
        }
        "coordinate-quadratic" => {
            if matches!(model, ManifoldModel::FlatTorus { .. }) {
                return Err(LabError::Config(
                    "coordinate-quadratic is not periodic; not usable on the torus".into(),
                ));
            }
            // Positive semidefinite by construction: diagonal coefficients.
            let diag = spec.coeffs.clone().unwrap_or_else(|| vec![1.0; amb]);
            if diag.iter().any(|d| *d < 0.0) {
                return Err(LabError::Config(
                    "quadratic diagonal must be nonnegative".into(),
                ));
            }
            let mut q = vec![0.0; amb * amb];
            for i in 0..amb.min(diag.len()) {
                q[i * amb + i] = diag[i];
            }
            Arc::new(OnManifold {
                model: model.clone(),
                inner: CoordQuadratic {
                    q,
                    a: vec![0.0; amb],
                    c: 0.0,
                },
            })
        }
        "heat-kernel" => {
            let s0 = spec.s0.unwrap_or(1.0);
            if !(s0 > 0.0) {
                return Err(LabError::Config("heat-kernel function needs s0 > 0".into()));
            }
            match model {
                ManifoldModel::Euclidean { .. } => Arc::new(OnManifold {
                    model: model.clone(),
                    inner: EuclideanHeatKernelFn { center, s0 },
                }),
                ManifoldModel::FlatTorus { sides } => Arc::new(OnManifold {
                    model: model.clone(),
                    inner: TorusSeparable {
                        sides: sides.clone(),
                        center,
                        factor: heat1d,
                        param: s0,
                    },
                }),
                _ => {
                    return Err(LabError::Config(
                        "heat-kernel base function is only available on euclidean/torus".into(),
                    ))
                }
            }
        }
        other => return Err(LabError::Config(format!("unknown base function '{other}'"))),
    })
}

/// Build a cylinder function from its spec (plus the second factor for
/// `product-of-two`). Times default to `[t_max]`.
pub fn build_function(
    model: &ManifoldModel,
    grid: &TimeGrid,
    spec: &FunctionSpec,
    second: Option<&FunctionSpec>,
) -> Result<CylinderFunction, LabError> {
    let times = spec.times.clone().unwrap_or_else(|| vec![grid.horizon()]);
    for t in &times {
        grid.index_of(*t)?;
    }
    let base: Arc<dyn CylinderBase> = if spec.name == "product-of-two" {
        if times.len() != 2 {
            return Err(LabError::Config(
                "product-of-two needs exactly 2 times".into(),
            ));
        }
        let default_second = FunctionSpec {
            name: "gaussian-bump".into(),
            times: None,
            center: None,
            width: Some(0.8),
            s0: None,
            coeffs: None,
        };
        let f1_spec = FunctionSpec {
            name: "gaussian-bump".into(),
            ..spec.clone()
        };
        let f1 = one_slot_base(model, &f1_spec)?;
        let f2 = one_slot_base(model, second.unwrap_or(&default_second))?;
        Arc::new(ProductOfTwo {
            model: model.clone(),
            f1,
            f2,
        })
    } else {
        if times.len() != 1 {
            return Err(LabError::Config(format!(
                "{} is a one-point function; give exactly 1 time",
                spec.name
            )));
        }
        one_slot_base(model, spec)?
    };
    Ok(CylinderFunction::new(times, base)?)
}

/// Closed-form heat-flow oracle for 1-point catalog functions on models
/// that have one (Euclidean and torus).
pub fn flow_oracle(model: &ManifoldModel, spec: &FunctionSpec) -> Result<FlowOracle, LabError> {
    let center = spec.center.clone().unwrap_or_else(|| default_center(model));
    match (model, spec.name.as_str()) {
        (ManifoldModel::Euclidean { .. }, "gaussian-bump") => Ok(FlowOracle::EuclideanBump {
            center,
            width: spec.width.unwrap_or(0.5),
        }),
        (ManifoldModel::Euclidean { .. }, "heat-kernel") => Ok(FlowOracle::EuclideanHeatKernel {
            center,
            s0: spec.s0.unwrap_or(1.0),
        }),
        (ManifoldModel::FlatTorus { sides }, "gaussian-bump") => Ok(FlowOracle::TorusBump {
            sides: sides.clone(),
            center,
            width: spec.width.unwrap_or(0.5),
        }),
        (ManifoldModel::FlatTorus { sides }, "heat-kernel") => Ok(FlowOracle::TorusHeatKernel {
            sides: sides.clone(),
            center,
            s0: spec.s0.unwrap_or(1.0),
        }),
        _ => Err(LabError::Config(format!(
            "no closed-form heat-flow oracle for '{}' on this model",
            spec.name
        ))),
    }
}

/// Scalar test-function profile; `ramp` is the only scalar kind.
pub fn build_phi(grid: TimeGrid, spec: &ProfileSpec) -> Result<PhiProfile, LabError> {
    match spec.name.as_str() {
        "ramp" => Ok(PhiProfile::ramp(grid, spec.t0.unwrap_or(grid.horizon()))?),
        other => Err(LabError::Config(format!(
            "unknown scalar profile '{other}'"
        ))),
    }
}

/// Vector direction profile: `ramp` with a direction, or `polyline`.
pub fn build_direction(
    grid: TimeGrid,
    dim: usize,
    spec: &ProfileSpec,
) -> Result<VectorProfile, LabError> {
    match spec.name.as_str() {
        "ramp" => {
            let mut dir = spec.direction.clone().unwrap_or_else(|| {
                let mut d = vec![0.0; dim];
                d[0] = 1.0;
                d
            });
            dir.resize(dim, 0.0);
            let phi = PhiProfile::ramp(grid, spec.t0.unwrap_or(grid.horizon()))?;
            Ok(VectorProfile::from_phi(&phi, &dir))
        }
        "polyline" => {
            let times = spec
                .times
                .clone()
                .ok_or_else(|| LabError::Config("polyline needs times".into()))?;
            let points = spec
                .points
                .clone()
                .ok_or_else(|| LabError::Config("polyline needs points".into()))?;
            Ok(VectorProfile::polyline(grid, dim, &times, &points)?)
        }
        other => Err(LabError::Config(format!(
            "unknown direction profile '{other}'"
        ))),
    }
}

/// Names listed by `--list-catalog`.
pub fn catalog_text() -> String {
    let mut s = String::new();
    s.push_str("experiments:\n");
    for k in crate::config::ExperimentKind::all_kinds() {
        s.push_str(&format!("  {k}\n"));
    }
    s.push_str("models (model.kind):\n");
    s.push_str("  euclidean {dim}\n  torus {sides}\n  sphere {dim, radius}\n");
    s.push_str("  hyperbolic {dim, radius}   (no heat-kernel oracle)\n");
    s.push_str("  sphere-x-line {radius}\n");
    s.push_str("base functions (function.name):\n");
    s.push_str("  gaussian-bump {times, center, width}   (periodized on the torus)\n");
    s.push_str("  coordinate-linear {times, coeffs}      (not on the torus)\n");
    s.push_str("  coordinate-quadratic {times, coeffs}   (diagonal psd; not on the torus)\n");
    s.push_str("  heat-kernel {times, center, s0}        (euclidean/torus)\n");
    s.push_str("  product-of-two {times=[t1,t2], ...} with optional function2\n");
    s.push_str("  constant-one {times}\n");
    s.push_str("profiles (profile.name):\n");
    s.push_str("  ramp {t0, direction}\n  polyline {times, points}\n");
    s
}
