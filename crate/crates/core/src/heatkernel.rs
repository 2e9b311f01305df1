//! Closed-form heat-kernel oracles for the catalog, under the convention
//! that the generator is the full Laplacian (kernel variance `2t` per
//! coordinate on flat space).
//!
//! Euclidean kernels are Gaussians, torus kernels are image sums truncated
//! below an absolute tail of 1e-14, sphere kernels are spectral zonal
//! series truncated below 1e-12 with a hard cap of 500 modes (times below
//! roughly 1e-4 at unit radius fail the cap and are reported as
//! unsupported). Hyperbolic space has no oracle here. Products multiply
//! their factor kernels.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::geometry::ManifoldModel;
use crate::linalg;

const SPHERE_MODE_CAP: usize = 500;
const SPHERE_TAIL: f64 = 1e-12;
const IMAGE_TAIL: f64 = 1e-16;

/// 1-d Gaussian kernel with variance `2t`: value, d/dx, d2/dx2.
fn gauss1(x: f64, t: f64) -> (f64, f64, f64) {
    let v = libm::exp(-x * x / (4.0 * t)) / libm::sqrt(4.0 * core::f64::consts::PI * t);
    let d1 = v * (-x / (2.0 * t));
    let d2 = v * (x * x / (4.0 * t * t) - 1.0 / (2.0 * t));
    (v, d1, d2)
}

/// Sum `f(x + k L)` over all images until the tail is negligible.
fn periodic_sum1(x: f64, l: f64, f: impl Fn(f64) -> (f64, f64, f64)) -> (f64, f64, f64) {
    let (mut v, mut d1, mut d2) = f(x);
    let mut k = 1i64;
    loop {
        let (vp, dp, sp) = f(x + k as f64 * l);
        let (vm, dm, sm) = f(x - k as f64 * l);
        v += vp + vm;
        d1 += dp + dm;
        d2 += sp + sm;
        if vp.abs() + vm.abs() + dp.abs() + dm.abs() + sp.abs() + sm.abs() < IMAGE_TAIL || k > 64 {
            break;
        }
        k += 1;
    }
    (v, d1, d2)
}

/// Euclidean heat kernel `rho_t(x, y)`.
pub fn euclidean_density(t: f64, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut d2 = 0.0;
    for i in 0..n {
        d2 += (x[i] - y[i]) * (x[i] - y[i]);
    }
    libm::exp(-d2 / (4.0 * t)) / libm::pow(4.0 * core::f64::consts::PI * t, n as f64 / 2.0)
}

/// Flat-torus heat kernel by per-coordinate image sums.
pub fn torus_density(sides: &[f64], t: f64, x: &[f64], y: &[f64]) -> f64 {
    let mut v = 1.0;
    for i in 0..sides.len() {
        let (vi, _, _) = periodic_sum1(x[i] - y[i], sides[i], |d| gauss1(d, t));
        v *= vi;
    }
    v
}

/// Zonal spectral series on `S^n(r)` evaluated at `cos(theta)`.
pub fn sphere_density(n: usize, r: f64, t: f64, cos_theta: f64) -> Result<f64, CoreError> {
    if n < 2 {
        return Err(CoreError::UnsupportedOracle {
            what: "sphere oracle needs n >= 2".into(),
        });
    }
    let vol = (ManifoldModel::Sphere { dim: n, radius: r })
        .volume()
        .unwrap();
    let nu = (n as f64 - 1.0) / 2.0;
    let u = cos_theta.clamp(-1.0, 1.0);
    // Gegenbauer values at u and at 1 by the three-term recurrence.
    let (mut c_prev_u, mut c_curr_u) = (1.0, 2.0 * nu * u);
    let (mut c_prev_1, mut c_curr_1) = (1.0, 2.0 * nu);
    let mut acc = 1.0 / vol; // l = 0 term: multiplicity 1, eigenvalue 0.
    let mut l = 1usize;
    loop {
        let lf = l as f64;
        let mult = (2.0 * lf + n as f64 - 1.0) / (n as f64 - 1.0) * binomial(l + n - 2, n - 2);
        let lambda = lf * (lf + n as f64 - 1.0) / (r * r);
        let term = mult * libm::exp(-lambda * t) * (c_curr_u / c_curr_1);
        acc += term / vol;
        let bound = mult * libm::exp(-lambda * t) / vol;
        if bound < SPHERE_TAIL && l > 4 {
            break;
        }
        if l >= SPHERE_MODE_CAP {
            return Err(CoreError::UnsupportedOracle {
                what: format!("sphere series needs more than {SPHERE_MODE_CAP} modes at t={t}"),
            });
        }
        // Advance the recurrences to degree l + 1.
        let next_u =
            (2.0 * (lf + nu) * u * c_curr_u - (lf + 2.0 * nu - 1.0) * c_prev_u) / (lf + 1.0);
        let next_1 = (2.0 * (lf + nu) * c_curr_1 - (lf + 2.0 * nu - 1.0) * c_prev_1) / (lf + 1.0);
        c_prev_u = c_curr_u;
        c_curr_u = next_u;
        c_prev_1 = c_curr_1;
        c_curr_1 = next_1;
        l += 1;
    }
    Ok(acc)
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v *= (n - i) as f64 / (k - i) as f64;
    }
    v
}

/// Heat-kernel density `rho_t(x, y)` for any supported catalog member.
pub fn density(model: &ManifoldModel, t: f64, x: &[f64], y: &[f64]) -> Result<f64, CoreError> {
    if !(t > 0.0) {
        return Err(CoreError::InvalidParameter {
            what: "heat kernel needs t > 0".into(),
        });
    }
    match model {
        ManifoldModel::Euclidean { .. } => Ok(euclidean_density(t, x, y)),
        ManifoldModel::FlatTorus { sides } => Ok(torus_density(sides, t, x, y)),
        ManifoldModel::Sphere { dim, radius } => {
            let c = linalg::dot(x, y) / (radius * radius);
            sphere_density(*dim, *radius, t, c)
        }
        ManifoldModel::Hyperbolic { .. } => Err(CoreError::UnsupportedOracle {
            what: "no closed-form heat kernel shipped for hyperbolic space".into(),
        }),
        ManifoldModel::Product { factors } => {
            let mut v = 1.0;
            let mut off = 0;
            for f in factors {
                let a = f.ambient_dim();
                v *= density(f, t, &x[off..off + a], &y[off..off + a])?;
                off += a;
            }
            Ok(v)
        }
    }
}

/// Heat-flow values of a 1-point base function at `(t, x)`: the flowed
/// value, its Riemannian gradient (ambient representation), and its
/// Laplacian. Everything is closed form; these are the oracles the
/// verification layer compares Monte Carlo estimates against.
#[derive(Debug, Clone)]
pub enum FlowOracle {
    /// `f(y) = exp(-|y - c|^2 / (2 w^2))` on Euclidean space.
    EuclideanBump { center: Vec<f64>, width: f64 },
    /// `f(y) = rho_{s0}(c, y)` on Euclidean space.
    EuclideanHeatKernel { center: Vec<f64>, s0: f64 },
    /// Periodized bump on the torus.
    TorusBump {
        sides: Vec<f64>,
        center: Vec<f64>,
        width: f64,
    },
    /// `f(y) = rho_{s0}(c, y)` on the torus.
    TorusHeatKernel {
        sides: Vec<f64>,
        center: Vec<f64>,
        s0: f64,
    },
}

/// Value, gradient, Laplacian triple of a heat flow at one point.
#[derive(Debug, Clone)]
pub struct FlowValues {
    pub value: f64,
    pub grad: Vec<f64>,
    pub laplacian: f64,
}

impl FlowOracle {
    /// Evaluate the heat flow of the base function at time `t >= 0`.
    pub fn eval(&self, t: f64, x: &[f64]) -> FlowValues {
        match self {
            FlowOracle::EuclideanBump { center, width } => {
                let n = center.len();
                let s = width * width + 2.0 * t;
                let mut d2 = 0.0;
                for i in 0..n {
                    d2 += (x[i] - center[i]) * (x[i] - center[i]);
                }
                let value =
                    libm::pow(width * width / s, n as f64 / 2.0) * libm::exp(-d2 / (2.0 * s));
                let grad: Vec<f64> = (0..n).map(|i| value * (center[i] - x[i]) / s).collect();
                let laplacian = value * (d2 / (s * s) - n as f64 / s);
                FlowValues {
                    value,
                    grad,
                    laplacian,
                }
            }
            FlowOracle::EuclideanHeatKernel { center, s0 } => {
                let n = center.len();
                let tau = s0 + t;
                let mut d2 = 0.0;
                for i in 0..n {
                    d2 += (x[i] - center[i]) * (x[i] - center[i]);
                }
                let value = libm::exp(-d2 / (4.0 * tau))
                    / libm::pow(4.0 * core::f64::consts::PI * tau, n as f64 / 2.0);
                let grad: Vec<f64> = (0..n)
                    .map(|i| value * (center[i] - x[i]) / (2.0 * tau))
                    .collect();
                let laplacian = value * (d2 / (4.0 * tau * tau) - n as f64 / (2.0 * tau));
                FlowValues {
                    value,
                    grad,
                    laplacian,
                }
            }
            FlowOracle::TorusBump {
                sides,
                center,
                width,
            } => {
                let s = width * width + 2.0 * t;
                let amp = libm::sqrt(width * width / s);
                per_dim_flow(sides, center, x, |d| {
                    let v = amp * libm::exp(-d * d / (2.0 * s));
                    (v, v * (-d / s), v * (d * d / (s * s) - 1.0 / s))
                })
            }
            FlowOracle::TorusHeatKernel { sides, center, s0 } => {
                let tau = s0 + t;
                per_dim_flow(sides, center, x, |d| gauss1(d, tau))
            }
        }
    }
}

/// Assemble value/gradient/Laplacian of a product of periodized 1-d flows.
fn per_dim_flow(
    sides: &[f64],
    center: &[f64],
    x: &[f64],
    f1d: impl Fn(f64) -> (f64, f64, f64),
) -> FlowValues {
    let n = sides.len();
    let mut vals = vec![0.0; n];
    let mut d1s = vec![0.0; n];
    let mut d2s = vec![0.0; n];
    for i in 0..n {
        let (v, d1, d2) = periodic_sum1(x[i] - center[i], sides[i], &f1d);
        vals[i] = v;
        d1s[i] = d1;
        d2s[i] = d2;
    }
    let value: f64 = vals.iter().product();
    let mut grad = vec![0.0; n];
    let mut laplacian = 0.0;
    for i in 0..n {
        let rest: f64 = (0..n).filter(|j| *j != i).map(|j| vals[j]).product();
        grad[i] = d1s[i] * rest;
        laplacian += d2s[i] * rest;
    }
    FlowValues {
        value,
        grad,
        laplacian,
    }
}

/// Simpson quadrature on `[a, b]` with `2 m` panels.
pub fn simpson(a: f64, b: f64, m: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Zonal integral over `S^2(r)`: `int f(theta) 2 pi r^2 sin(theta) dtheta`.
pub fn sphere2_zonal_integral(r: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    simpson(0.0, core::f64::consts::PI, 2000, |theta| {
        f(theta) * 2.0 * core::f64::consts::PI * r * r * libm::sin(theta)
    })
}

/// `E[d(x, gamma_t)^2]` on `S^2(r)` from the spectral kernel.
pub fn sphere2_distance_sq_moment(r: f64, t: f64) -> Result<f64, CoreError> {
    let mut er = Ok(());
    let v = sphere2_zonal_integral(r, |theta| match sphere_density(2, r, t, libm::cos(theta)) {
        Ok(d) => (r * theta) * (r * theta) * d,
        Err(e) => {
            er = Err(e);
            0.0
        }
    });
    er.map(|_| v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_normalization_at_coincidence() {
        // n = 1, x = y, t = 1/(4 pi): density is exactly 1.
        let t = 1.0 / (4.0 * core::f64::consts::PI);
        let d = euclidean_density(t, &[0.3], &[0.3]);
        assert!((d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn torus_kernel_integrates_to_one() {
        let sides = vec![1.0, 2.0];
        let t = 0.15;
        let x = [0.2, 0.7];
        // Tensor-product Simpson over the fundamental domain.
        let inner = |u: f64| simpson(0.0, 2.0, 200, |v| torus_density(&sides, t, &x, &[u, v]));
        let total = simpson(0.0, 1.0, 200, inner);
        assert!((total - 1.0).abs() < 1e-8, "total {total}");
    }

    #[test]
    fn sphere_kernel_integrates_to_one() {
        for (r, t) in [(1.0, 0.05), (1.0, 0.5), (2.0, 0.3)] {
            let total = sphere2_zonal_integral(r, |theta| {
                sphere_density(2, r, t, libm::cos(theta)).unwrap()
            });
            assert!((total - 1.0).abs() < 1e-8, "r={r} t={t} total {total}");
        }
    }

    #[test]
    fn sphere_semigroup_property() {
        // rho_{t+s}(x, z) = int rho_t(x, y) rho_s(y, z) dA(y) on S^2(1),
        // with x the pole and z at polar angle alpha.
        let (t, s, alpha) = (0.2, 0.3, 0.9f64);
        let direct = sphere_density(2, 1.0, t + s, libm::cos(alpha)).unwrap();
        let two_pi = core::f64::consts::TAU;
        let integrated = simpson(0.0, core::f64::consts::PI, 300, |theta| {
            let inner = simpson(0.0, two_pi, 300, |phi| {
                let cos_d = libm::cos(theta) * libm::cos(alpha)
                    + libm::sin(theta) * libm::sin(alpha) * libm::cos(phi);
                sphere_density(2, 1.0, s, cos_d).unwrap()
            });
            sphere_density(2, 1.0, t, libm::cos(theta)).unwrap() * libm::sin(theta) * inner
        });
        assert!(
            (integrated - direct).abs() < 1e-6,
            "{integrated} vs {direct}"
        );
    }

    #[test]
    fn sphere_series_rejects_tiny_times() {
        assert!(matches!(
            sphere_density(2, 1.0, 5e-5, 0.3),
            Err(CoreError::UnsupportedOracle { .. })
        ));
    }

    #[test]
    fn hyperbolic_oracle_is_flagged_unsupported() {
        let m = ManifoldModel::Hyperbolic {
            dim: 2,
            radius: 1.0,
        };
        let p = m.base_point();
        assert!(matches!(
            density(&m, 0.5, &p, &p),
            Err(CoreError::UnsupportedOracle { .. })
        ));
    }

    #[test]
    fn product_kernel_multiplies_factors() {
        let m = ManifoldModel::Product {
            factors: vec![
                ManifoldModel::Euclidean { dim: 1 },
                ManifoldModel::FlatTorus { sides: vec![1.0] },
            ],
        };
        let d = density(&m, 0.2, &[0.0, 0.1], &[0.5, 0.4]).unwrap();
        let d1 = euclidean_density(0.2, &[0.0], &[0.5]);
        let d2 = torus_density(&[1.0], 0.2, &[0.1], &[0.4]);
        assert!((d - d1 * d2).abs() < 1e-15);
    }

    #[test]
    fn flow_oracles_satisfy_the_heat_equation() {
        // d/dt f_t = Laplacian f_t, checked by central differences in t.
        let cases: Vec<(FlowOracle, Vec<f64>)> = vec![
            (
                FlowOracle::EuclideanBump {
                    center: vec![0.1, -0.2],
                    width: 0.8,
                },
                vec![0.3, 0.4],
            ),
            (
                FlowOracle::EuclideanHeatKernel {
                    center: vec![0.0, 0.0],
                    s0: 0.7,
                },
                vec![0.5, -0.1],
            ),
            (
                FlowOracle::TorusBump {
                    sides: vec![1.0, 1.0],
                    center: vec![0.3, 0.6],
                    width: 0.25,
                },
                vec![0.1, 0.9],
            ),
            (
                FlowOracle::TorusHeatKernel {
                    sides: vec![1.0, 1.0],
                    center: vec![0.5, 0.5],
                    s0: 0.4,
                },
                vec![0.2, 0.8],
            ),
        ];
        for (oracle, x) in cases {
            let t = 0.3;
            let eps = 1e-5;
            let fp = oracle.eval(t + eps, &x).value;
            let fm = oracle.eval(t - eps, &x).value;
            let mid = oracle.eval(t, &x);
            let dt = (fp - fm) / (2.0 * eps);
            assert!(
                (dt - mid.laplacian).abs() < 1e-6 * (1.0 + mid.laplacian.abs()),
                "heat equation residual for {oracle:?}"
            );
            // Gradient consistency by spatial central differences.
            for i in 0..x.len() {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += eps;
                xm[i] -= eps;
                let g = (oracle.eval(t, &xp).value - oracle.eval(t, &xm).value) / (2.0 * eps);
                assert!((g - mid.grad[i]).abs() < 1e-6 * (1.0 + g.abs()));
            }
        }
    }

    #[test]
    fn sphere_second_moment_is_near_flat_value_for_short_times() {
        // For t -> 0, E d^2 ~ 2 n t = 4 t on S^2.
        let t = 0.01;
        let m2 = sphere2_distance_sq_moment(1.0, t).unwrap();
        assert!((m2 - 4.0 * t).abs() < 0.1 * 4.0 * t, "m2 {m2}");
    }
}
