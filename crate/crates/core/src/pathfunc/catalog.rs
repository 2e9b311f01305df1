//! Built-in base functions for cylinder functionals, with analytic
//! derivative oracles, plus a geodesic finite-difference fallback for
//! value-only functions.
//!
//! Scalar entries are written as smooth ambient extensions; the Riemannian
//! gradient and Hessian on embedded members come from the space-form
//! corrections
//!     grad f = P(grad-ambient f),
//!     Hess f(X, Y) = X^T D2f Y - kappa <X, Y> df(x),
//! applied blockwise on products. Torus entries are periodized image sums,
//! so they are honest functions on the torus.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::ManifoldModel;
use crate::linalg;
use crate::pathfunc::CylinderBase;

/// Smooth scalar on the ambient coordinate space: value, coordinate
/// gradient, and coordinate Hessian as a bilinear form.
pub trait AmbientScalar: Send + Sync {
    fn value(&self, y: &[f64]) -> f64;
    fn gradient(&self, y: &[f64], out: &mut [f64]);
    fn hessian_bilinear(&self, y: &[f64], x: &[f64], z: &[f64]) -> f64;
}

/// Riemannian gradient from a coordinate gradient: raise the index where
/// the ambient metric is not Euclidean (hyperbolic leaves), then project to
/// the tangent space.
pub fn riemannian_gradient(
    model: &ManifoldModel,
    point: &[f64],
    coord_grad: &[f64],
    out: &mut [f64],
) {
    match model {
        ManifoldModel::Hyperbolic { dim, .. } => {
            out.copy_from_slice(coord_grad);
            out[*dim] = -out[*dim];
            let mut v = out.to_vec();
            model.project_tangent(point, &mut v);
            out.copy_from_slice(&v);
        }
        ManifoldModel::Product { factors } => {
            let mut off = 0;
            for f in factors {
                let a = f.ambient_dim();
                let mut sub = vec![0.0; a];
                riemannian_gradient(f, &point[off..off + a], &coord_grad[off..off + a], &mut sub);
                out[off..off + a].copy_from_slice(&sub);
                off += a;
            }
        }
        _ => {
            out.copy_from_slice(coord_grad);
            let mut v = out.to_vec();
            model.project_tangent(point, &mut v);
            out.copy_from_slice(&v);
        }
    }
}

/// Second-fundamental-form correction turning the coordinate Hessian into
/// the Riemannian one: `- kappa <X, Y>_g * (coord_grad . point)` per
/// space-form block (zero on flat blocks).
pub fn hessian_correction(
    model: &ManifoldModel,
    point: &[f64],
    coord_grad: &[f64],
    x: &[f64],
    y: &[f64],
) -> f64 {
    match model {
        ManifoldModel::Euclidean { .. } | ManifoldModel::FlatTorus { .. } => 0.0,
        ManifoldModel::Sphere { radius, .. } => {
            let kappa = 1.0 / (radius * radius);
            -kappa * linalg::dot(x, y) * linalg::dot(coord_grad, point)
        }
        ManifoldModel::Hyperbolic { radius, .. } => {
            let kappa = -1.0 / (radius * radius);
            -kappa * model.metric_dot(x, y) * linalg::dot(coord_grad, point)
        }
        ManifoldModel::Product { factors } => {
            let mut s = 0.0;
            let mut off = 0;
            for f in factors {
                let a = f.ambient_dim();
                s += hessian_correction(
                    f,
                    &point[off..off + a],
                    &coord_grad[off..off + a],
                    &x[off..off + a],
                    &y[off..off + a],
                );
                off += a;
            }
            s
        }
    }
}

/// One-slot cylinder base from an ambient scalar on a given manifold.
pub struct OnManifold<S> {
    pub model: ManifoldModel,
    pub inner: S,
}

impl<S: AmbientScalar> CylinderBase for OnManifold<S> {
    fn arity(&self) -> usize {
        1
    }

    fn value(&self, pts: &[&[f64]]) -> f64 {
        self.inner.value(pts[0])
    }

    fn gradient(&self, _slot: usize, pts: &[&[f64]], out: &mut [f64]) {
        let amb = self.model.ambient_dim();
        let mut cg = vec![0.0; amb];
        self.inner.gradient(pts[0], &mut cg);
        riemannian_gradient(&self.model, pts[0], &cg, out);
    }

    fn hessian(&self, _i: usize, _j: usize, pts: &[&[f64]], x: &[f64], y: &[f64]) -> f64 {
        let amb = self.model.ambient_dim();
        let mut cg = vec![0.0; amb];
        self.inner.gradient(pts[0], &mut cg);
        self.inner.hessian_bilinear(pts[0], x, y)
            + hessian_correction(&self.model, pts[0], &cg, x, y)
    }
}

/// `exp(-|y - c|^2 / (2 w^2))` in ambient coordinates.
pub struct GaussBump {
    pub center: Vec<f64>,
    pub width: f64,
}

impl AmbientScalar for GaussBump {
    fn value(&self, y: &[f64]) -> f64 {
        let mut d2 = 0.0;
        for i in 0..y.len() {
            d2 += (y[i] - self.center[i]) * (y[i] - self.center[i]);
        }
        libm::exp(-d2 / (2.0 * self.width * self.width))
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) {
        let v = self.value(y);
        let w2 = self.width * self.width;
        for i in 0..y.len() {
            out[i] = v * (self.center[i] - y[i]) / w2;
        }
    }

    fn hessian_bilinear(&self, y: &[f64], x: &[f64], z: &[f64]) -> f64 {
        let v = self.value(y);
        let w2 = self.width * self.width;
        let mut dx = 0.0;
        let mut dz = 0.0;
        for i in 0..y.len() {
            dx += (y[i] - self.center[i]) * x[i];
            dz += (y[i] - self.center[i]) * z[i];
        }
        v * (dx * dz / (w2 * w2) - linalg::dot(x, z) / w2)
    }
}

/// `<a, y> + b`.
pub struct CoordLinear {
    pub a: Vec<f64>,
    pub b: f64,
}

impl AmbientScalar for CoordLinear {
    fn value(&self, y: &[f64]) -> f64 {
        linalg::dot(&self.a, y) + self.b
    }

    fn gradient(&self, _y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.a);
    }

    fn hessian_bilinear(&self, _y: &[f64], _x: &[f64], _z: &[f64]) -> f64 {
        0.0
    }
}

/// `y^T Q y / 2 + <a, y> + c` with symmetric `Q`.
pub struct CoordQuadratic {
    pub q: Vec<f64>,
    pub a: Vec<f64>,
    pub c: f64,
}

impl AmbientScalar for CoordQuadratic {
    fn value(&self, y: &[f64]) -> f64 {
        let n = y.len();
        let mut qy = vec![0.0; n];
        linalg::mat_vec(&self.q, n, n, y, &mut qy);
        0.5 * linalg::dot(y, &qy) + linalg::dot(&self.a, y) + self.c
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) {
        let n = y.len();
        linalg::mat_vec(&self.q, n, n, y, out);
        linalg::axpy(1.0, &self.a, out);
    }

    fn hessian_bilinear(&self, _y: &[f64], x: &[f64], z: &[f64]) -> f64 {
        let n = x.len();
        let mut qz = vec![0.0; n];
        linalg::mat_vec(&self.q, n, n, z, &mut qz);
        linalg::dot(x, &qz)
    }
}

/// Euclidean heat-kernel slice `rho_{s0}(c, y)`.
pub struct EuclideanHeatKernelFn {
    pub center: Vec<f64>,
    pub s0: f64,
}

impl AmbientScalar for EuclideanHeatKernelFn {
    fn value(&self, y: &[f64]) -> f64 {
        crate::heatkernel::euclidean_density(self.s0, &self.center, y)
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) {
        let v = self.value(y);
        for i in 0..y.len() {
            out[i] = v * (self.center[i] - y[i]) / (2.0 * self.s0);
        }
    }

    fn hessian_bilinear(&self, y: &[f64], x: &[f64], z: &[f64]) -> f64 {
        let v = self.value(y);
        let mut dx = 0.0;
        let mut dz = 0.0;
        for i in 0..y.len() {
            dx += (y[i] - self.center[i]) * x[i];
            dz += (y[i] - self.center[i]) * z[i];
        }
        v * (dx * dz / (4.0 * self.s0 * self.s0) - linalg::dot(x, z) / (2.0 * self.s0))
    }
}

/// Periodized 1-d factors on a torus: `prod_a s_a(y_a - c_a)` where each
/// `s_a` is an image sum. Used for both the periodic bump and the torus
/// heat kernel, which share this separable structure.
pub struct TorusSeparable {
    pub sides: Vec<f64>,
    pub center: Vec<f64>,
    /// 1-d profile with derivatives: `d -> (s, s', s'')`.
    pub factor: fn(f64, f64) -> (f64, f64, f64),
    /// Parameter forwarded to `factor` (width or kernel time).
    pub param: f64,
}

fn torus_factor_sums(t: &TorusSeparable, y: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = t.sides.len();
    let mut v = vec![0.0; n];
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        let (mut sv, mut s1, mut s2) = (0.0, 0.0, 0.0);
        let mut k = 0i64;
        loop {
            let offs: &[f64] = if k == 0 {
                &[0.0]
            } else {
                &[k as f64, -(k as f64)]
            };
            let mut small = true;
            for o in offs {
                let d = y[i] - t.center[i] + o * t.sides[i];
                let (a, b, c) = (t.factor)(d, t.param);
                sv += a;
                s1 += b;
                s2 += c;
                if a.abs() + b.abs() + c.abs() > 1e-16 {
                    small = false;
                }
            }
            if (small && k > 0) || k > 64 {
                break;
            }
            k += 1;
        }
        v[i] = sv;
        d1[i] = s1;
        d2[i] = s2;
    }
    (v, d1, d2)
}

pub fn bump1d(d: f64, w: f64) -> (f64, f64, f64) {
    let v = libm::exp(-d * d / (2.0 * w * w));
    (
        v,
        v * (-d / (w * w)),
        v * (d * d / (w * w * w * w) - 1.0 / (w * w)),
    )
}

pub fn heat1d(d: f64, s0: f64) -> (f64, f64, f64) {
    let v = libm::exp(-d * d / (4.0 * s0)) / libm::sqrt(4.0 * core::f64::consts::PI * s0);
    (
        v,
        v * (-d / (2.0 * s0)),
        v * (d * d / (4.0 * s0 * s0) - 1.0 / (2.0 * s0)),
    )
}

impl AmbientScalar for TorusSeparable {
    fn value(&self, y: &[f64]) -> f64 {
        let (v, _, _) = torus_factor_sums(self, y);
        v.iter().product()
    }

    fn gradient(&self, y: &[f64], out: &mut [f64]) {
        let n = self.sides.len();
        let (v, d1, _) = torus_factor_sums(self, y);
        for i in 0..n {
            let rest: f64 = (0..n).filter(|j| *j != i).map(|j| v[j]).product();
            out[i] = d1[i] * rest;
        }
    }

    fn hessian_bilinear(&self, y: &[f64], x: &[f64], z: &[f64]) -> f64 {
        let n = self.sides.len();
        let (v, d1, d2) = torus_factor_sums(self, y);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let h = if i == j {
                    let rest: f64 = (0..n).filter(|k| *k != i).map(|k| v[k]).product();
                    d2[i] * rest
                } else {
                    let rest: f64 = (0..n)
                        .filter(|k| *k != i && *k != j)
                        .map(|k| v[k])
                        .product();
                    d1[i] * d1[j] * rest
                };
                acc += h * x[i] * z[j];
            }
        }
        acc
    }
}

/// Product of two one-slot bases evaluated at two cylinder times:
/// `f(y1, y2) = f1(y1) f2(y2)`. Cross Hessians are products of the slot
/// gradients, paired with the manifold metric.
pub struct ProductOfTwo {
    pub model: ManifoldModel,
    pub f1: Arc<dyn CylinderBase>,
    pub f2: Arc<dyn CylinderBase>,
}

impl CylinderBase for ProductOfTwo {
    fn arity(&self) -> usize {
        2
    }

    fn value(&self, pts: &[&[f64]]) -> f64 {
        self.f1.value(&pts[..1]) * self.f2.value(&pts[1..])
    }

    fn gradient(&self, slot: usize, pts: &[&[f64]], out: &mut [f64]) {
        if slot == 0 {
            self.f1.gradient(0, &pts[..1], out);
            linalg::scale(self.f2.value(&pts[1..]), out);
        } else {
            self.f2.gradient(0, &pts[1..], out);
            linalg::scale(self.f1.value(&pts[..1]), out);
        }
    }

    fn hessian(&self, i: usize, j: usize, pts: &[&[f64]], x: &[f64], y: &[f64]) -> f64 {
        match (i, j) {
            (0, 0) => self.f1.hessian(0, 0, &pts[..1], x, y) * self.f2.value(&pts[1..]),
            (1, 1) => self.f2.hessian(0, 0, &pts[1..], x, y) * self.f1.value(&pts[..1]),
            (0, 1) => {
                let amb = self.model.ambient_dim();
                let mut g1 = vec![0.0; amb];
                let mut g2 = vec![0.0; amb];
                self.f1.gradient(0, &pts[..1], &mut g1);
                self.f2.gradient(0, &pts[1..], &mut g2);
                self.model.metric_dot(&g1, x) * self.model.metric_dot(&g2, y)
            }
            (1, 0) => {
                let amb = self.model.ambient_dim();
                let mut g1 = vec![0.0; amb];
                let mut g2 = vec![0.0; amb];
                self.f1.gradient(0, &pts[..1], &mut g1);
                self.f2.gradient(0, &pts[1..], &mut g2);
                self.model.metric_dot(&g1, y) * self.model.metric_dot(&g2, x)
            }
            _ => unreachable!("two-slot function"),
        }
    }
}

/// Geodesic central-difference fallback for value-only base functions.
/// Gradient steps are `1e-5 (1 + |y|)`, Hessian steps `1e-4 (1 + |y|)`.
pub struct NumericalBase<V> {
    pub model: ManifoldModel,
    pub arity: usize,
    pub value_fn: V,
}

impl<V: Fn(&[&[f64]]) -> f64 + Send + Sync> NumericalBase<V> {
    /// Move slot `slot` of the point tuple along `exp(eps * u e_dir)`.
    fn shifted(&self, pts: &[&[f64]], slot: usize, dir: &[f64], eps: f64) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vec()).collect();
        let frame = self.model.canonical_frame(pts[slot]);
        let mut xi = dir.to_vec();
        linalg::scale(eps, &mut xi);
        let moved = self.model.exp_map(
            &crate::geometry::PointFrame {
                point: pts[slot].to_vec(),
                frame,
            },
            &xi,
        );
        out[slot] = moved.point;
        out
    }

    fn eval(&self, pts: &[Vec<f64>]) -> f64 {
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        (self.value_fn)(&refs)
    }
}

impl<V: Fn(&[&[f64]]) -> f64 + Send + Sync> CylinderBase for NumericalBase<V> {
    fn arity(&self) -> usize {
        self.arity
    }

    fn value(&self, pts: &[&[f64]]) -> f64 {
        (self.value_fn)(pts)
    }

    fn gradient(&self, slot: usize, pts: &[&[f64]], out: &mut [f64]) {
        let n = self.model.dim();
        let eps = 1e-5 * (1.0 + linalg::norm(pts[slot]));
        let frame = self.model.canonical_frame(pts[slot]);
        let mut coeffs = vec![0.0; n];
        let mut e = vec![0.0; n];
        for a in 0..n {
            e.fill(0.0);
            e[a] = 1.0;
            let fp = self.eval(&self.shifted(pts, slot, &e, eps));
            let fm = self.eval(&self.shifted(pts, slot, &e, -eps));
            coeffs[a] = (fp - fm) / (2.0 * eps);
        }
        self.model.tangent_from_coeffs(&frame, &coeffs, out);
    }

    fn hessian(&self, i: usize, j: usize, pts: &[&[f64]], x: &[f64], y: &[f64]) -> f64 {
        let n = self.model.dim();
        // Express the ambient directions in canonical frames; differences
        // run along geodesics so this is the Riemannian Hessian.
        let fi = self.model.canonical_frame(pts[i]);
        let fj = self.model.canonical_frame(pts[j]);
        let mut cx = vec![0.0; n];
        let mut cy = vec![0.0; n];
        self.model.frame_coeffs(&fi, x, &mut cx);
        self.model.frame_coeffs(&fj, y, &mut cy);
        let eps_i = 1e-4 * (1.0 + linalg::norm(pts[i]));
        let eps_j = 1e-4 * (1.0 + linalg::norm(pts[j]));
        if i == j {
            // Second difference along x, y via the symmetric 4-point rule:
            // Hess(x, y) = [Q(x+y) - Q(x-y)] / 4 with Q the pure second
            // difference.
            let q = |dir: &[f64], eps: f64| {
                let fp = self.eval(&self.shifted(pts, i, dir, eps));
                let f0 = (self.value_fn)(pts);
                let fm = self.eval(&self.shifted(pts, i, dir, -eps));
                (fp - 2.0 * f0 + fm) / (eps * eps)
            };
            let mut plus = vec![0.0; n];
            let mut minus = vec![0.0; n];
            for a in 0..n {
                plus[a] = cx[a] + cy[a];
                minus[a] = cx[a] - cy[a];
            }
            (q(&plus, eps_i) - q(&minus, eps_i)) / 4.0
        } else {
            let mut val = 0.0;
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let once = self.shifted(pts, i, &cx, si * eps_i);
                let refs: Vec<&[f64]> = once.iter().map(|p| p.as_slice()).collect();
                let twice = self.shifted(&refs, j, &cy, sj * eps_j);
                val += si * sj * self.eval(&twice);
            }
            val / (4.0 * eps_i * eps_j)
        }
    }
}
