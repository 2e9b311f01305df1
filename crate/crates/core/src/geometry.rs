//! Closed-form geometry oracles for the manifold catalog.
//!
//! The catalog is Euclidean space, flat tori, round spheres, hyperbolic
//! spaces, and finite products of those. Every member has closed-form
//! geodesics, parallel transport, and curvature, so the rolling construction
//! of horizontal Brownian motion never needs chart integration.
//!
//! All downstream calculus happens in frame components: a state is a point
//! together with an orthonormal frame `u: R^n -> T_pM`, and tensors are
//! pulled back through `u`. On this catalog the frame curvature operator
//! `R(x, y)` and the Ricci transform are constant matrices, because space
//! forms look identical in every orthonormal frame.
//!
//! Sign convention, fixed once for the whole workspace:
//! `<R(x,y)w, z> = kappa * (<x,z><y,w> - <x,w><y,z>)` on a space form of
//! curvature `kappa`, so that `<R(e1,e2)e2, e1> = kappa` (sectional
//! curvature) and the frame trace `sum_a R(x, e_a) e_a = Ric x` is the
//! Ricci transform, positive on spheres: `Ric = ((n-1)/r^2) I`.
//!
//! Torus points live in the fundamental domain `[0, L_a)`. Functions of
//! torus coordinates must be periodic; that is the caller's contract.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg;

/// Gram drift beyond which a transported frame is re-orthonormalized.
pub const FRAME_DRIFT_TOL: f64 = 1e-9;

/// Wrap a coordinate into the fundamental domain `[0, l)`.
#[inline]
fn wrap_coord(x: f64, l: f64) -> f64 {
    let w = x - l * libm::floor(x / l);
    if w >= l {
        0.0
    } else {
        w
    }
}

/// A point on the manifold together with an orthonormal frame of its
/// tangent space, stored column-major (`ambient_dim x dim`).
#[derive(Debug, Clone, PartialEq)]
pub struct PointFrame {
    pub point: Vec<f64>,
    pub frame: Vec<f64>,
}

/// Immutable geometry oracle for one catalog member.
#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldModel {
    Euclidean {
        dim: usize,
    },
    /// Flat torus `R^n / (L_1 Z x ... x L_n Z)`.
    FlatTorus {
        sides: Vec<f64>,
    },
    /// Round sphere `S^n(r)` embedded in `R^{n+1}`.
    Sphere {
        dim: usize,
        radius: f64,
    },
    /// Hyperbolic space of curvature `-1/radius^2`, hyperboloid model in
    /// Minkowski space with the timelike coordinate last.
    Hyperbolic {
        dim: usize,
        radius: f64,
    },
    Product {
        factors: Vec<ManifoldModel>,
    },
}

impl ManifoldModel {
    /// Manifold dimension `n`.
    pub fn dim(&self) -> usize {
        match self {
            ManifoldModel::Euclidean { dim } => *dim,
            ManifoldModel::FlatTorus { sides } => sides.len(),
            ManifoldModel::Sphere { dim, .. } => *dim,
            ManifoldModel::Hyperbolic { dim, .. } => *dim,
            ManifoldModel::Product { factors } => factors.iter().map(|f| f.dim()).sum(),
        }
    }

    /// Dimension of the canonical coordinate representation of points.
    pub fn ambient_dim(&self) -> usize {
        match self {
            ManifoldModel::Euclidean { dim } => *dim,
            ManifoldModel::FlatTorus { sides } => sides.len(),
            ManifoldModel::Sphere { dim, .. } => dim + 1,
            ManifoldModel::Hyperbolic { dim, .. } => dim + 1,
            ManifoldModel::Product { factors } => factors.iter().map(|f| f.ambient_dim()).sum(),
        }
    }

    /// Constant sectional curvature of a space-form leaf.
    fn leaf_curvature(&self) -> f64 {
        match self {
            ManifoldModel::Euclidean { .. } | ManifoldModel::FlatTorus { .. } => 0.0,
            ManifoldModel::Sphere { radius, .. } => 1.0 / (radius * radius),
            ManifoldModel::Hyperbolic { radius, .. } => -1.0 / (radius * radius),
            ManifoldModel::Product { .. } => unreachable!("product is not a leaf"),
        }
    }

    /// Canonical base point: the origin for flat members, the pole
    /// `(0, ..., 0, r)` for spheres and hyperbolic spaces.
    pub fn base_point(&self) -> Vec<f64> {
        match self {
            ManifoldModel::Euclidean { .. } | ManifoldModel::FlatTorus { .. } => {
                vec![0.0; self.ambient_dim()]
            }
            ManifoldModel::Sphere { dim, radius } | ManifoldModel::Hyperbolic { dim, radius } => {
                let mut p = vec![0.0; dim + 1];
                p[*dim] = *radius;
                p
            }
            ManifoldModel::Product { factors } => {
                let mut p = Vec::with_capacity(self.ambient_dim());
                for f in factors {
                    p.extend_from_slice(&f.base_point());
                }
                p
            }
        }
    }

    /// Riemannian inner product of two tangent vectors in ambient
    /// representation. Minkowski for hyperbolic leaves, Euclidean otherwise.
    pub fn metric_dot(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            ManifoldModel::Hyperbolic { dim, .. } => {
                let mut s = 0.0;
                for i in 0..*dim {
                    s += x[i] * y[i];
                }
                s - x[*dim] * y[*dim]
            }
            ManifoldModel::Product { factors } => {
                let mut s = 0.0;
                let mut off = 0;
                for f in factors {
                    let a = f.ambient_dim();
                    s += f.metric_dot(&x[off..off + a], &y[off..off + a]);
                    off += a;
                }
                s
            }
            _ => linalg::dot(x, y),
        }
    }

    /// Project an ambient vector onto the tangent space at `point`.
    pub fn project_tangent(&self, point: &[f64], w: &mut [f64]) {
        match self {
            ManifoldModel::Euclidean { .. } | ManifoldModel::FlatTorus { .. } => {}
            ManifoldModel::Sphere { radius, .. } => {
                let c = linalg::dot(w, point) / (radius * radius);
                linalg::axpy(-c, point, w);
            }
            ManifoldModel::Hyperbolic { radius, .. } => {
                // <x,x>_L = -R^2, so the tangent projection adds the normal part.
                let c = self.metric_dot(w, point) / (radius * radius);
                linalg::axpy(c, point, w);
            }
            ManifoldModel::Product { factors } => {
                let mut off = 0;
                for f in factors {
                    let a = f.ambient_dim();
                    f.project_tangent(&point[off..off + a], &mut w[off..off + a]);
                    off += a;
                }
            }
        }
    }

    /// Deterministic orthonormal frame at `point`: ambient axes projected to
    /// the tangent space, then modified Gram-Schmidt, keeping the first
    /// `dim` independent directions. At the canonical base point this is the
    /// identity block, the "identity frame".
    pub fn canonical_frame(&self, point: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let amb = self.ambient_dim();
        match self {
            ManifoldModel::Euclidean { .. } | ManifoldModel::FlatTorus { .. } => {
                let mut f = vec![0.0; amb * n];
                for a in 0..n {
                    f[a * amb + a] = 1.0;
                }
                f
            }
            ManifoldModel::Sphere { .. } | ManifoldModel::Hyperbolic { .. } => {
                let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
                for axis in 0..amb {
                    if cols.len() == n {
                        break;
                    }
                    let mut v = vec![0.0; amb];
                    v[axis] = 1.0;
                    self.project_tangent(point, &mut v);
                    for c in cols.iter() {
                        let proj = self.metric_dot(c, &v);
                        linalg::axpy(-proj, c, &mut v);
                    }
                    let nrm2 = self.metric_dot(&v, &v);
                    if nrm2 > 1e-12 {
                        linalg::scale(1.0 / libm::sqrt(nrm2), &mut v);
                        cols.push(v);
                    }
                }
                assert_eq!(cols.len(), n, "degenerate point for canonical frame");
                let mut f = vec![0.0; amb * n];
                for (a, c) in cols.iter().enumerate() {
                    f[a * amb..(a + 1) * amb].copy_from_slice(c);
                }
                f
            }
            ManifoldModel::Product { factors } => {
                let mut f = vec![0.0; amb * n];
                let mut amb_off = 0;
                let mut coeff_off = 0;
                for fac in factors {
                    let (fa, fnn) = (fac.ambient_dim(), fac.dim());
                    let sub = fac.canonical_frame(&point[amb_off..amb_off + fa]);
                    for a in 0..fnn {
                        let col = &mut f[(coeff_off + a) * amb..(coeff_off + a + 1) * amb];
                        col[amb_off..amb_off + fa].copy_from_slice(&sub[a * fa..(a + 1) * fa]);
                    }
                    amb_off += fa;
                    coeff_off += fnn;
                }
                f
            }
        }
    }

    /// Canonical base state `(x, u_0)`.
    pub fn base_state(&self) -> PointFrame {
        let point = self.base_point();
        let frame = self.canonical_frame(&point);
        PointFrame { point, frame }
    }

    /// Frame components of an ambient tangent vector: `c_a = g(w, u e_a)`.
    pub fn frame_coeffs(&self, frame: &[f64], w: &[f64], out: &mut [f64]) {
        let n = self.dim();
        let amb = self.ambient_dim();
        for a in 0..n {
            out[a] = self.metric_dot(&frame[a * amb..(a + 1) * amb], w);
        }
    }

    /// Ambient tangent vector from frame components: `u * coeffs`.
    pub fn tangent_from_coeffs(&self, frame: &[f64], coeffs: &[f64], out: &mut [f64]) {
        linalg::frame_apply(frame, self.ambient_dim(), self.dim(), coeffs, out);
    }

    /// One geodesic step of the rolling construction: move from `(point,
    /// frame)` along the geodesic with initial velocity `u * xi` for unit
    /// time, and parallel-transport the frame along it. Writes the endpoint
    /// and transported frame into `out_point` / `out_frame`.
    pub fn exp_step(
        &self,
        point: &[f64],
        frame: &[f64],
        xi: &[f64],
        out_point: &mut [f64],
        out_frame: &mut [f64],
    ) {
        let n = self.dim();
        let amb = self.ambient_dim();
        match self {
            ManifoldModel::Euclidean { .. } => {
                out_point.copy_from_slice(point);
                for a in 0..n {
                    linalg::axpy(xi[a], &frame[a * amb..(a + 1) * amb], out_point);
                }
                out_frame.copy_from_slice(frame);
            }
            ManifoldModel::FlatTorus { sides } => {
                out_point.copy_from_slice(point);
                for a in 0..n {
                    linalg::axpy(xi[a], &frame[a * amb..(a + 1) * amb], out_point);
                }
                for (x, l) in out_point.iter_mut().zip(sides.iter()) {
                    *x = wrap_coord(*x, *l);
                }
                out_frame.copy_from_slice(frame);
            }
            ManifoldModel::Sphere { radius, .. } => {
                let r = *radius;
                let mut t = [0.0; 8];
                let t = &mut t[..amb];
                linalg::frame_apply(frame, amb, n, xi, t);
                let speed = linalg::norm(t);
                if speed < 1e-14 {
                    out_point.copy_from_slice(point);
                    out_frame.copy_from_slice(frame);
                    return;
                }
                linalg::scale(1.0 / speed, t);
                let theta = speed / r;
                let (s, c) = libm::sincos(theta);
                for i in 0..amb {
                    out_point[i] = c * point[i] + s * r * t[i];
                }
                // Renormalize to the sphere to stop radial drift.
                let scale = r / linalg::norm(out_point);
                linalg::scale(scale, out_point);
                for a in 0..n {
                    let col = &frame[a * amb..(a + 1) * amb];
                    let along = linalg::dot(col, t);
                    let out = &mut out_frame[a * amb..(a + 1) * amb];
                    for i in 0..amb {
                        out[i] = col[i] - along * t[i] + along * (c * t[i] - s * point[i] / r);
                    }
                }
                self.settle_frame(out_point, out_frame);
            }
            ManifoldModel::Hyperbolic { radius, .. } => {
                let r = *radius;
                let mut t = [0.0; 8];
                let t = &mut t[..amb];
                linalg::frame_apply(frame, amb, n, xi, t);
                let speed = libm::sqrt(self.metric_dot(t, t));
                if speed < 1e-14 {
                    out_point.copy_from_slice(point);
                    out_frame.copy_from_slice(frame);
                    return;
                }
                linalg::scale(1.0 / speed, t);
                let theta = speed / r;
                let (ch, sh) = (libm::cosh(theta), libm::sinh(theta));
                for i in 0..amb {
                    out_point[i] = ch * point[i] + sh * r * t[i];
                }
                // Renormalize onto the hyperboloid <x,x>_L = -R^2.
                let q = -self.metric_dot(out_point, out_point);
                let scale = r / libm::sqrt(q);
                linalg::scale(scale, out_point);
                for a in 0..n {
                    let col = &frame[a * amb..(a + 1) * amb];
                    let along = self.metric_dot(col, t);
                    let out = &mut out_frame[a * amb..(a + 1) * amb];
                    for i in 0..amb {
                        out[i] = col[i] - along * t[i] + along * (ch * t[i] + sh * point[i] / r);
                    }
                }
                self.settle_frame(out_point, out_frame);
            }
            ManifoldModel::Product { factors } => {
                out_frame.fill(0.0);
                let mut amb_off = 0;
                let mut coeff_off = 0;
                for fac in factors {
                    let (fa, fnn) = (fac.ambient_dim(), fac.dim());
                    let mut sub_frame = vec![0.0; fa * fnn];
                    for a in 0..fnn {
                        sub_frame[a * fa..(a + 1) * fa].copy_from_slice(
                            &frame[(coeff_off + a) * amb + amb_off
                                ..(coeff_off + a) * amb + amb_off + fa],
                        );
                    }
                    let mut sub_out_p = vec![0.0; fa];
                    let mut sub_out_f = vec![0.0; fa * fnn];
                    fac.exp_step(
                        &point[amb_off..amb_off + fa],
                        &sub_frame,
                        &xi[coeff_off..coeff_off + fnn],
                        &mut sub_out_p,
                        &mut sub_out_f,
                    );
                    out_point[amb_off..amb_off + fa].copy_from_slice(&sub_out_p);
                    for a in 0..fnn {
                        out_frame
                            [(coeff_off + a) * amb + amb_off..(coeff_off + a) * amb + amb_off + fa]
                            .copy_from_slice(&sub_out_f[a * fa..(a + 1) * fa]);
                    }
                    amb_off += fa;
                    coeff_off += fnn;
                }
            }
        }
    }

    /// Re-project and re-orthonormalize a frame when rounding drift exceeds
    /// the tolerance.
    fn settle_frame(&self, point: &[f64], frame: &mut [f64]) {
        let n = self.dim();
        let amb = self.ambient_dim();
        let drift = linalg::gram_drift(frame, amb, n, |x, y| self.metric_dot(x, y));
        if drift > FRAME_DRIFT_TOL {
            for a in 0..n {
                let mut col = frame[a * amb..(a + 1) * amb].to_vec();
                self.project_tangent(point, &mut col);
                frame[a * amb..(a + 1) * amb].copy_from_slice(&col);
            }
            linalg::orthonormalize(frame, amb, n, |x, y| self.metric_dot(x, y));
        }
    }

    /// Geodesic step as a whole-value operation.
    pub fn exp_map(&self, pf: &PointFrame, xi: &[f64]) -> PointFrame {
        let mut out = PointFrame {
            point: vec![0.0; self.ambient_dim()],
            frame: vec![0.0; self.ambient_dim() * self.dim()],
        };
        self.exp_step(&pf.point, &pf.frame, xi, &mut out.point, &mut out.frame);
        out
    }

    /// Frame curvature operator `R(x, y)` as an `n x n` matrix acting on
    /// frame components of the third argument:
    /// `<R(x,y)w, z> = kappa (<x,z><y,w> - <x,w><y,z>)` blockwise.
    /// Constant over the manifold for the space-form catalog, so no point is
    /// needed; `curvature_r` below takes a state for the general contract.
    pub fn curvature_op(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let n = self.dim();
        debug_assert_eq!(out.len(), n * n);
        out.fill(0.0);
        self.curvature_op_block(x, y, 0, n, out);
    }

    fn curvature_op_block(
        &self,
        x: &[f64],
        y: &[f64],
        coeff_off: usize,
        n: usize,
        out: &mut [f64],
    ) {
        match self {
            ManifoldModel::Product { factors } => {
                let mut off = coeff_off;
                for fac in factors {
                    fac.curvature_op_block(x, y, off, n, out);
                    off += fac.dim();
                }
            }
            _ => {
                let kappa = self.leaf_curvature();
                if kappa == 0.0 {
                    return;
                }
                let nf = self.dim();
                // R(x,y) = kappa (x y^T - y x^T) on the factor's block.
                for i in 0..nf {
                    for j in 0..nf {
                        let (gi, gj) = (coeff_off + i, coeff_off + j);
                        out[gi * n + gj] += kappa * (x[gi] * y[gj] - y[gi] * x[gj]);
                    }
                }
            }
        }
    }

    /// `<R(x,y)w, z>` in frame components.
    pub fn rm_scalar(&self, x: &[f64], y: &[f64], w: &[f64], z: &[f64]) -> f64 {
        let n = self.dim();
        let mut op = vec![0.0; n * n];
        self.curvature_op(x, y, &mut op);
        let mut rw = vec![0.0; n];
        linalg::mat_vec(&op, n, n, w, &mut rw);
        linalg::dot(&rw, z)
    }

    /// Curvature oracle taking a state; space forms are frame-homogeneous,
    /// so the state only matters for future non-homogeneous members.
    pub fn curvature_r(&self, _pf: &PointFrame, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n * n];
        self.curvature_op(x, y, &mut out);
        out
    }

    /// Ricci transform in frame components, `Ric = sum_a R(., e_a) e_a`.
    /// Constant block-diagonal matrix `(n_f - 1) kappa_f I` on this catalog.
    pub fn ricci_matrix(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n * n];
        self.ricci_block(0, n, &mut out);
        out
    }

    fn ricci_block(&self, coeff_off: usize, n: usize, out: &mut [f64]) {
        match self {
            ManifoldModel::Product { factors } => {
                let mut off = coeff_off;
                for fac in factors {
                    fac.ricci_block(off, n, out);
                    off += fac.dim();
                }
            }
            _ => {
                let nf = self.dim();
                let lam = (nf as f64 - 1.0) * self.leaf_curvature();
                for i in 0..nf {
                    out[(coeff_off + i) * n + (coeff_off + i)] = lam;
                }
            }
        }
    }

    /// Ricci oracle taking a state; constant on this catalog.
    pub fn ricci_transform(&self, _pf: &PointFrame) -> Vec<f64> {
        self.ricci_matrix()
    }

    /// Largest `|Ric|` eigenvalue over the catalog member; used for bound
    /// checks like the hat-map norm inequality.
    pub fn ricci_bound(&self) -> f64 {
        let n = self.dim();
        let ric = self.ricci_matrix();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            worst = worst.max(libm::fabs(ric[i * n + i]));
        }
        worst
    }

    /// Covariant derivative of Ricci as a rank-3 frame tensor
    /// `T[a][b][c] = (nabla_{e_a} Ric)(e_b, e_c)`. Identically zero on this
    /// catalog (every member is flat or Einstein with parallel Ricci).
    pub fn nabla_ricci(&self, _pf: &PointFrame) -> Vec<f64> {
        let n = self.dim();
        vec![0.0; n * n * n]
    }

    /// Frame gradient of scalar curvature; zero on the catalog.
    pub fn nabla_scalar(&self, _pf: &PointFrame) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    /// Contraction `(nabla Ric)(v, v)` as a frame vector, the pairing used
    /// by the derivative of the hat process: output index in the first slot.
    pub fn nabla_ricci_pair(&self, pf: &PointFrame, v: &[f64], w: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let t = self.nabla_ricci(pf);
        let mut out = vec![0.0; n];
        for a in 0..n {
            let mut s = 0.0;
            for b in 0..n {
                for c in 0..n {
                    s += t[(a * n + b) * n + c] * v[b] * w[c];
                }
            }
            out[a] = s;
        }
        out
    }

    /// Geodesic distance between two points in canonical coordinates.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            ManifoldModel::Euclidean { .. } => {
                let mut s = 0.0;
                for i in 0..x.len() {
                    s += (x[i] - y[i]) * (x[i] - y[i]);
                }
                libm::sqrt(s)
            }
            ManifoldModel::FlatTorus { sides } => {
                let mut s = 0.0;
                for i in 0..x.len() {
                    let mut d = wrap_coord(x[i] - y[i], sides[i]);
                    if d > sides[i] / 2.0 {
                        d = sides[i] - d;
                    }
                    s += d * d;
                }
                libm::sqrt(s)
            }
            ManifoldModel::Sphere { radius, .. } => {
                let c = linalg::dot(x, y) / (radius * radius);
                radius * libm::acos(c.clamp(-1.0, 1.0))
            }
            ManifoldModel::Hyperbolic { radius, .. } => {
                let c = -self.metric_dot(x, y) / (radius * radius);
                radius * libm::acosh(c.max(1.0))
            }
            ManifoldModel::Product { factors } => {
                let mut s = 0.0;
                let mut off = 0;
                for f in factors {
                    let a = f.ambient_dim();
                    let d = f.distance(&x[off..off + a], &y[off..off + a]);
                    s += d * d;
                    off += a;
                }
                libm::sqrt(s)
            }
        }
    }

    /// Whether the Ricci transform vanishes identically (flat members and
    /// their products).
    pub fn is_ricci_flat(&self) -> bool {
        match self {
            ManifoldModel::Euclidean { .. } | ManifoldModel::FlatTorus { .. } => true,
            ManifoldModel::Sphere { .. } | ManifoldModel::Hyperbolic { .. } => self.dim() < 2,
            ManifoldModel::Product { factors } => factors.iter().all(|f| f.is_ricci_flat()),
        }
    }

    /// Whether the full curvature tensor vanishes.
    pub fn is_flat(&self) -> bool {
        match self {
            ManifoldModel::Euclidean { .. } | ManifoldModel::FlatTorus { .. } => true,
            ManifoldModel::Sphere { .. } | ManifoldModel::Hyperbolic { .. } => self.dim() < 2,
            ManifoldModel::Product { factors } => factors.iter().all(|f| f.is_flat()),
        }
    }

    /// Riemannian volume of a compact member (torus or sphere), used by the
    /// heat-kernel oracles.
    pub fn volume(&self) -> Option<f64> {
        match self {
            ManifoldModel::FlatTorus { sides } => Some(sides.iter().product()),
            ManifoldModel::Sphere { dim, radius } => {
                let n = *dim as f64;
                let area = 2.0 * libm::pow(core::f64::consts::PI, (n + 1.0) / 2.0)
                    / libm::tgamma((n + 1.0) / 2.0);
                Some(area * libm::pow(*radius, n))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;

    fn models() -> Vec<ManifoldModel> {
        vec![
            ManifoldModel::Euclidean { dim: 2 },
            ManifoldModel::FlatTorus {
                sides: vec![1.0, 2.0],
            },
            ManifoldModel::Sphere {
                dim: 2,
                radius: 1.0,
            },
            ManifoldModel::Sphere {
                dim: 3,
                radius: 2.0,
            },
            ManifoldModel::Hyperbolic {
                dim: 2,
                radius: 1.0,
            },
            ManifoldModel::Product {
                factors: vec![
                    ManifoldModel::Sphere {
                        dim: 2,
                        radius: 1.0,
                    },
                    ManifoldModel::Euclidean { dim: 1 },
                ],
            },
        ]
    }

    fn pseudo(v: &mut u64) -> f64 {
        *v = v
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*v >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn euclidean_exp_is_translation() {
        let m = ManifoldModel::Euclidean { dim: 2 };
        let pf = m.base_state();
        let out = m.exp_map(&pf, &[1.0, 0.0]);
        assert_eq!(out.point, vec![1.0, 0.0]);
        assert_eq!(out.frame, pf.frame);
    }

    #[test]
    fn torus_wraps_into_fundamental_domain() {
        let m = ManifoldModel::FlatTorus { sides: vec![1.0] };
        let pf = PointFrame {
            point: vec![0.9],
            frame: vec![1.0],
        };
        let out = m.exp_map(&pf, &[0.2]);
        assert!((out.point[0] - 0.1).abs() < 1e-12);
        assert_eq!(out.frame, vec![1.0]);
    }

    #[test]
    fn sphere_exp_reaches_antipode_and_reverses_direction() {
        let m = ManifoldModel::Sphere {
            dim: 2,
            radius: 1.0,
        };
        let pf = m.base_state();
        let out = m.exp_map(&pf, &[core::f64::consts::PI, 0.0]);
        // Antipode of the pole.
        assert!((out.point[2] + 1.0).abs() < 1e-10);
        assert!(out.point[0].abs() < 1e-10 && out.point[1].abs() < 1e-10);
        // The frame vector along the geodesic direction is reversed in its
        // tangential component; the orthogonal one is untouched.
        assert!((dot(&out.frame[0..3], &[1.0, 0.0, 0.0]) + 1.0).abs() < 1e-10);
        assert!((dot(&out.frame[3..6], &[0.0, 1.0, 0.0]) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exp_round_trip_on_curved_members() {
        for m in [
            ManifoldModel::Sphere {
                dim: 2,
                radius: 1.0,
            },
            ManifoldModel::Sphere {
                dim: 3,
                radius: 2.0,
            },
            ManifoldModel::Hyperbolic {
                dim: 2,
                radius: 1.0,
            },
        ] {
            let n = m.dim();
            let mut state = 7u64;
            for _ in 0..100 {
                let pf = m.base_state();
                let xi: Vec<f64> = (0..n).map(|_| 0.7 * pseudo(&mut state)).collect();
                let fwd = m.exp_map(&pf, &xi);
                let back: Vec<f64> = xi.iter().map(|x| -x).collect();
                let ret = m.exp_map(&fwd, &back);
                for i in 0..m.ambient_dim() {
                    assert!((ret.point[i] - pf.point[i]).abs() < 1e-8, "{m:?}");
                }
                for i in 0..m.ambient_dim() * n {
                    assert!((ret.frame[i] - pf.frame[i]).abs() < 1e-8, "{m:?}");
                }
            }
        }
    }

    #[test]
    fn transported_frames_stay_orthonormal() {
        let mut state = 3u64;
        for m in models() {
            let n = m.dim();
            let amb = m.ambient_dim();
            let mut pf = m.base_state();
            for _ in 0..100 {
                let xi: Vec<f64> = (0..n).map(|_| 0.3 * pseudo(&mut state)).collect();
                pf = m.exp_map(&pf, &xi);
                let drift = linalg::gram_drift(&pf.frame, amb, n, |x, y| m.metric_dot(x, y));
                assert!(drift < 1e-9, "{m:?} drift {drift}");
            }
        }
    }

    #[test]
    fn curvature_symmetries_hold_at_random_arguments() {
        let mut state = 11u64;
        for m in models() {
            let n = m.dim();
            for _ in 0..20 {
                let x: Vec<f64> = (0..n).map(|_| pseudo(&mut state)).collect();
                let y: Vec<f64> = (0..n).map(|_| pseudo(&mut state)).collect();
                let z: Vec<f64> = (0..n).map(|_| pseudo(&mut state)).collect();
                let w: Vec<f64> = (0..n).map(|_| pseudo(&mut state)).collect();
                let r = |a: &[f64], b: &[f64], c: &[f64], d: &[f64]| m.rm_scalar(a, b, c, d);
                // Antisymmetry in both pairs, pair symmetry, first Bianchi.
                assert!((r(&x, &y, &w, &z) + r(&y, &x, &w, &z)).abs() < 1e-10);
                assert!((r(&x, &y, &w, &z) + r(&x, &y, &z, &w)).abs() < 1e-10);
                assert!((r(&x, &y, &w, &z) - r(&w, &z, &x, &y)).abs() < 1e-10);
                let bianchi = m.rm_scalar(&x, &y, &z, &w)
                    + m.rm_scalar(&y, &z, &x, &w)
                    + m.rm_scalar(&z, &x, &y, &w);
                assert!(bianchi.abs() < 1e-10, "{m:?}");
            }
        }
    }

    #[test]
    fn ricci_is_the_frame_trace_of_curvature() {
        let mut state = 23u64;
        for m in models() {
            let n = m.dim();
            let ric = m.ricci_matrix();
            for _ in 0..10 {
                let v: Vec<f64> = (0..n).map(|_| pseudo(&mut state)).collect();
                let w: Vec<f64> = (0..n).map(|_| pseudo(&mut state)).collect();
                // sum_a <R(v, e_a) e_a, w> = <Ric v, w>
                let mut tr = 0.0;
                for a in 0..n {
                    let mut ea = vec![0.0; n];
                    ea[a] = 1.0;
                    tr += m.rm_scalar(&v, &ea, &ea, &w);
                }
                let mut rv = vec![0.0; n];
                linalg::mat_vec(&ric, n, n, &v, &mut rv);
                assert!((tr - dot(&rv, &w)).abs() < 1e-10, "{m:?}");
            }
        }
    }

    #[test]
    fn sign_convention_on_spheres() {
        // S^2(1): sectional curvature +1, Ric = I.
        let s2 = ManifoldModel::Sphere {
            dim: 2,
            radius: 1.0,
        };
        assert!(
            (s2.rm_scalar(&[1.0, 0.0], &[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]) - 1.0).abs() < 1e-14
        );
        let ric = s2.ricci_matrix();
        assert_eq!(ric, vec![1.0, 0.0, 0.0, 1.0]);
        // S^3(2): Ric = 0.5 I.
        let s3 = ManifoldModel::Sphere {
            dim: 3,
            radius: 2.0,
        };
        let ric = s3.ricci_matrix();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 0.5 } else { 0.0 };
                assert!((ric[i * 3 + j] - want).abs() < 1e-14);
            }
        }
        // Hyperbolic plane: sectional curvature -1.
        let h2 = ManifoldModel::Hyperbolic {
            dim: 2,
            radius: 1.0,
        };
        assert!(
            (h2.rm_scalar(&[1.0, 0.0], &[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]) + 1.0).abs() < 1e-14
        );
    }

    #[test]
    fn euclidean_curvature_vanishes() {
        let m = ManifoldModel::Euclidean { dim: 2 };
        let pf = m.base_state();
        let op = m.curvature_r(&pf, &[1.0, 0.0], &[0.0, 1.0]);
        assert!(op.iter().all(|v| *v == 0.0));
        assert!(m.ricci_matrix().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn product_of_einstein_factors_has_parallel_ricci_and_block_curvature() {
        let m = ManifoldModel::Product {
            factors: vec![
                ManifoldModel::Sphere {
                    dim: 2,
                    radius: 1.0,
                },
                ManifoldModel::Euclidean { dim: 1 },
            ],
        };
        let pf = m.base_state();
        assert!(m.nabla_ricci(&pf).iter().all(|v| *v == 0.0));
        assert!(m.nabla_scalar(&pf).iter().all(|v| *v == 0.0));
        let ric = m.ricci_matrix();
        assert_eq!(ric[0], 1.0);
        assert_eq!(ric[4], 1.0);
        assert_eq!(ric[8], 0.0);
        // Mixed-block planes are flat.
        assert_eq!(
            m.rm_scalar(
                &[1.0, 0.0, 0.0],
                &[0.0, 0.0, 1.0],
                &[0.0, 0.0, 1.0],
                &[1.0, 0.0, 0.0]
            ),
            0.0
        );
    }

    #[test]
    fn holonomy_around_right_angled_spherical_triangle() {
        // Octant triangle on S^2(1): three geodesic quarter-turns. Parallel
        // transport around it rotates the frame by the spherical excess pi/2.
        let m = ManifoldModel::Sphere {
            dim: 2,
            radius: 1.0,
        };
        let quarter = core::f64::consts::FRAC_PI_2;
        let mut pf = m.base_state();
        pf = m.exp_map(&pf, &[quarter, 0.0]);
        pf = m.exp_map(&pf, &[0.0, quarter]);
        // After two legs, the direction back to the pole is -col0.
        pf = m.exp_map(&pf, &[-quarter, 0.0]);
        let base = m.base_state();
        for i in 0..3 {
            assert!((pf.point[i] - base.point[i]).abs() < 1e-10);
        }
        // Comparison matrix u0^T u_T in the base frame.
        let mut rot = [0.0; 4];
        for a in 0..2 {
            for b in 0..2 {
                rot[a * 2 + b] = dot(&base.frame[a * 3..a * 3 + 3], &pf.frame[b * 3..b * 3 + 3]);
            }
        }
        let want = [0.0, -1.0, 1.0, 0.0];
        for i in 0..4 {
            assert!((rot[i] - want[i]).abs() < 1e-10, "rot {rot:?}");
        }
    }

    #[test]
    fn distances_and_volumes() {
        let s2 = ManifoldModel::Sphere {
            dim: 2,
            radius: 1.0,
        };
        let base = s2.base_point();
        let anti = vec![0.0, 0.0, -1.0];
        assert!((s2.distance(&base, &anti) - core::f64::consts::PI).abs() < 1e-12);
        assert!((s2.volume().unwrap() - 4.0 * core::f64::consts::PI).abs() < 1e-12);
        let t = ManifoldModel::FlatTorus {
            sides: vec![1.0, 2.0],
        };
        assert!((t.distance(&[0.1, 0.0], &[0.9, 0.0]) - 0.2).abs() < 1e-12);
        assert_eq!(t.volume().unwrap(), 2.0);
        let h2 = ManifoldModel::Hyperbolic {
            dim: 2,
            radius: 1.0,
        };
        let pf = h2.base_state();
        let out = h2.exp_map(&pf, &[0.8, 0.0]);
        assert!((h2.distance(&pf.point, &out.point) - 0.8).abs() < 1e-10);
    }
}
