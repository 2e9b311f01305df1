//! Cylinder functions `F(gamma) = f(gamma_{t_1}, ..., gamma_{t_k})` and
//! their pathwise derivatives: parallel gradients, test-function gradients,
//! and the Hessians induced by the L2 and Markovian connections.
//!
//! All derivative values live in base-frame components (`R^n` at the base
//! point), obtained by pulling ambient gradients back through the frames of
//! a sampled path. The anticipating curvature integral in the Markovian
//! Hessian is always reduced to finite sums over the cylinder times; no
//! general anticipating integration is performed.

pub mod catalog;

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::linalg;
use crate::malliavin;
use crate::sde::{FramePath, TimeGrid};

/// Scalar H^1_0 test function on `[0, T]`, piecewise linear on the grid,
/// with `phi(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiProfile {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl PhiProfile {
    pub fn from_fn<F: Fn(f64) -> f64>(grid: TimeGrid, f: F) -> Result<Self, CoreError> {
        let values: Vec<f64> = (0..=grid.steps()).map(|i| f(grid.knot(i))).collect();
        if values[0] != 0.0 {
            return Err(CoreError::InvalidParameter {
                what: "phi(0) must be 0".into(),
            });
        }
        Ok(PhiProfile { grid, values })
    }

    /// The profile of the Li-Yau example: `phi(s) = s / t0` for `s <= t0`,
    /// then constant 1. Its energy is exactly `1 / t0`.
    pub fn ramp(grid: TimeGrid, t0: f64) -> Result<Self, CoreError> {
        if !(t0 > 0.0) {
            return Err(CoreError::InvalidParameter {
                what: "ramp time must be positive".into(),
            });
        }
        Self::from_fn(grid, |s| (s / t0).min(1.0))
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn value(&self, knot: usize) -> f64 {
        self.values[knot]
    }

    /// Energy `int |phi'|^2 dt`, exact for the piecewise-linear profile.
    pub fn h_norm_sq(&self) -> f64 {
        let dt = self.grid.dt();
        let mut s = 0.0;
        for i in 0..self.grid.steps() {
            let d = self.values[i + 1] - self.values[i];
            s += d * d / dt;
        }
        s
    }

    /// Knot values of the vector process `phi * v`, laid out one row per knot.
    pub fn times_vector(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut out = vec![0.0; self.values.len() * n];
        for (i, phi) in self.values.iter().enumerate() {
            for a in 0..n {
                out[i * n + a] = phi * v[a];
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        PhiProfile {
            grid: self.grid,
            values: self.values.iter().map(|x| c * x).collect(),
        }
    }
}

/// Piecewise-linear `R^n`-valued Cameron-Martin direction with `h(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorProfile {
    grid: TimeGrid,
    dim: usize,
    values: Vec<f64>,
}

impl VectorProfile {
    pub fn from_fn<F: Fn(f64, &mut [f64])>(
        grid: TimeGrid,
        dim: usize,
        f: F,
    ) -> Result<Self, CoreError> {
        let mut values = vec![0.0; (grid.steps() + 1) * dim];
        for i in 0..=grid.steps() {
            f(grid.knot(i), &mut values[i * dim..(i + 1) * dim]);
        }
        if values[..dim].iter().any(|v| *v != 0.0) {
            return Err(CoreError::InvalidParameter {
                what: "h(0) must be 0".into(),
            });
        }
        Ok(VectorProfile { grid, dim, values })
    }

    /// `phi(t) * v` as a vector profile.
    pub fn from_phi(phi: &PhiProfile, v: &[f64]) -> Self {
        VectorProfile {
            grid: phi.grid(),
            dim: v.len(),
            values: phi.times_vector(v),
        }
    }

    /// The piecewise-linear curve through `(t_j, x_j)`, constant after the
    /// last time; times must lie on the grid. This is the `k`-point
    /// interpolation used to turn point tuples into path directions.
    pub fn polyline(
        grid: TimeGrid,
        dim: usize,
        times: &[f64],
        points: &[Vec<f64>],
    ) -> Result<Self, CoreError> {
        if times.len() != points.len() || times.is_empty() {
            return Err(CoreError::Mismatch {
                what: "polyline times/points".into(),
            });
        }
        let mut idx = Vec::with_capacity(times.len());
        for t in times {
            idx.push(grid.index_of(*t)?);
        }
        let mut values = vec![0.0; (grid.steps() + 1) * dim];
        let mut prev_i = 0usize;
        let mut prev_x = vec![0.0; dim];
        for (seg, &i) in idx.iter().enumerate() {
            let x = &points[seg];
            for k in prev_i..=i {
                let frac = if i == prev_i {
                    1.0
                } else {
                    (k - prev_i) as f64 / (i - prev_i) as f64
                };
                for a in 0..dim {
                    values[k * dim + a] = prev_x[a] + frac * (x[a] - prev_x[a]);
                }
            }
            prev_i = i;
            prev_x = x.clone();
        }
        for k in prev_i..=grid.steps() {
            values[k * dim..(k + 1) * dim].copy_from_slice(&prev_x);
        }
        Ok(VectorProfile { grid, dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn value(&self, knot: usize) -> &[f64] {
        &self.values[knot * self.dim..(knot + 1) * self.dim]
    }

    /// All knot values, one row per knot.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn h_norm_sq(&self) -> f64 {
        malliavin::h_norm_sq(&self.values, self.dim, self.grid.dt())
    }

    /// Pointwise linear combination `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(x, y)| a * x + b * y)
            .collect();
        VectorProfile {
            grid: self.grid,
            dim: self.dim,
            values,
        }
    }
}

/// Base function of a cylinder function: a `k`-point function on `M^k` with
/// value, per-slot Riemannian gradients, and per-slot-pair Hessians.
///
/// Gradients are returned in ambient representation (tangent to the slot
/// point); Hessians are evaluated as bilinear forms on ambient tangent
/// vectors. Implementations must be re-entrant.
pub trait CylinderBase: Send + Sync {
    fn arity(&self) -> usize;
    fn value(&self, pts: &[&[f64]]) -> f64;
    fn gradient(&self, slot: usize, pts: &[&[f64]], out: &mut [f64]);
    fn hessian(&self, i: usize, j: usize, pts: &[&[f64]], x: &[f64], y: &[f64]) -> f64;
}

/// `F(gamma) = f(gamma_{t_1}, ..., gamma_{t_k})` with strictly increasing
/// evaluation times that must land on grid knots.
#[derive(Clone)]
pub struct CylinderFunction {
    times: Vec<f64>,
    base: Arc<dyn CylinderBase>,
}

/// Per-path slot data: knot indices, slot points, and the base-frame
/// components `p_j` of the parallel-transported slot gradients.
pub struct SlotDerivs {
    pub knots: Vec<usize>,
    pub grads: Vec<Vec<f64>>,
}

impl CylinderFunction {
    pub fn new(times: Vec<f64>, base: Arc<dyn CylinderBase>) -> Result<Self, CoreError> {
        if times.is_empty() || times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::InvalidParameter {
                what: "cylinder times must be strictly increasing and nonempty".into(),
            });
        }
        if times.len() != base.arity() {
            return Err(CoreError::Mismatch {
                what: "cylinder times vs base arity".into(),
            });
        }
        Ok(CylinderFunction { times, base })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn knot_indices(&self, grid: &TimeGrid) -> Result<Vec<usize>, CoreError> {
        self.times.iter().map(|t| grid.index_of(*t)).collect()
    }

    fn slot_points<'p>(&self, path: &'p FramePath, knots: &[usize]) -> Vec<&'p [f64]> {
        knots.iter().map(|&i| path.point(i)).collect()
    }

    pub fn evaluate(&self, path: &FramePath) -> Result<f64, CoreError> {
        let knots = self.knot_indices(&path.grid)?;
        Ok(self.base.value(&self.slot_points(path, &knots)))
    }

    /// Evaluate at the translated points `gamma_{t_j} + h(t_j)`. Only
    /// meaningful on flat models whose points add coordinatewise; this is
    /// the shifted evaluation of the Cameron-Martin change of variables.
    pub fn evaluate_translated(
        &self,
        path: &FramePath,
        shift: &VectorProfile,
    ) -> Result<f64, CoreError> {
        let knots = self.knot_indices(&path.grid)?;
        let amb = path.model.ambient_dim();
        if shift.dim() != amb {
            return Err(CoreError::Mismatch {
                what: "shift dimension vs ambient".into(),
            });
        }
        let shifted: Vec<Vec<f64>> = knots
            .iter()
            .map(|&i| {
                let mut p = path.point(i).to_vec();
                for (c, s) in p.iter_mut().zip(shift.value(i)) {
                    *c += s;
                }
                p
            })
            .collect();
        let refs: Vec<&[f64]> = shifted.iter().map(|p| p.as_slice()).collect();
        Ok(self.base.value(&refs))
    }

    /// Slot gradients pulled back to the base frame.
    pub fn slot_derivs(&self, path: &FramePath) -> Result<SlotDerivs, CoreError> {
        let knots = self.knot_indices(&path.grid)?;
        let pts = self.slot_points(path, &knots);
        let amb = path.model.ambient_dim();
        let mut grads = Vec::with_capacity(knots.len());
        let mut g = vec![0.0; amb];
        for (j, &i) in knots.iter().enumerate() {
            self.base.gradient(j, &pts, &mut g);
            grads.push(path.transport_to_base(i, &g));
        }
        Ok(SlotDerivs { knots, grads })
    }

    /// Parallel gradient at a knot: the transported slot gradients of the
    /// strictly later cylinder times.
    pub fn parallel_gradient(&self, path: &FramePath, knot: usize) -> Result<Vec<f64>, CoreError> {
        let sd = self.slot_derivs(path)?;
        Ok(parallel_gradient_from(&sd, path.dim(), knot))
    }

    /// Test-function gradient `sum_j phi(t_j) p_j`.
    pub fn phi_gradient(&self, path: &FramePath, phi: &PhiProfile) -> Result<Vec<f64>, CoreError> {
        let sd = self.slot_derivs(path)?;
        let mut out = vec![0.0; path.dim()];
        for (j, &i) in sd.knots.iter().enumerate() {
            linalg::axpy(phi.value(i), &sd.grads[j], &mut out);
        }
        Ok(out)
    }

    /// Directional derivative along a knot-indexed process of base-frame
    /// values (one row per knot): `D_{Uv} F = sum_j <p_j, v_{t_j}>`.
    pub fn directional(&self, path: &FramePath, process_values: &[f64]) -> Result<f64, CoreError> {
        let n = path.dim();
        let sd = self.slot_derivs(path)?;
        let mut acc = 0.0;
        for (j, &i) in sd.knots.iter().enumerate() {
            acc += linalg::dot(&sd.grads[j], &process_values[i * n..(i + 1) * n]);
        }
        Ok(acc)
    }

    /// Hessian under the L2 connection in the `phi`-directions:
    /// `sum_{i,j} phi(t_i) phi(t_j) <grad_i grad_j f, (U_{t_i} v) x (U_{t_j} w)>`.
    pub fn l2_phi_hessian(
        &self,
        path: &FramePath,
        phi: &PhiProfile,
        v: &[f64],
        w: &[f64],
    ) -> Result<f64, CoreError> {
        let knots = self.knot_indices(&path.grid)?;
        let pts = self.slot_points(path, &knots);
        let amb = path.model.ambient_dim();
        let mut xv = vec![0.0; amb];
        let mut yw = vec![0.0; amb];
        let mut acc = 0.0;
        for (i, &ki) in knots.iter().enumerate() {
            path.model.tangent_from_coeffs(path.frame(ki), v, &mut xv);
            for (j, &kj) in knots.iter().enumerate() {
                path.model.tangent_from_coeffs(path.frame(kj), w, &mut yw);
                acc += phi.value(ki) * phi.value(kj) * self.base.hessian(i, j, &pts, &xv, &yw);
            }
        }
        Ok(acc)
    }

    /// The two curvature sums of the Hessian comparison for `h = phi v`:
    /// the finite sum `sum_i <p_i, S(t_i) h(t_i)>` (the anticipating
    /// integral reduced over cylinder times) and the connection part
    /// `D_{nabla_V V} F` (the running matrix coupled to `dh` by the
    /// trapezoid rule), where `S` is the running Stratonovich curvature
    /// matrix of `h`.
    fn curvature_sums_diag(
        &self,
        path: &FramePath,
        phi: &PhiProfile,
        v: &[f64],
    ) -> Result<(f64, f64), CoreError> {
        if path.model.is_flat() {
            return Ok((0.0, 0.0));
        }
        let n = path.dim();
        let sd = self.slot_derivs(path)?;
        let h = phi.times_vector(v);
        let s_mats = malliavin::running_curvature(path, &h);
        let conn = malliavin::integrate_matrix_against(&s_mats, &h, n);
        let mut finite = 0.0;
        let mut connection = 0.0;
        let mut sh = vec![0.0; n];
        for (j, &i) in sd.knots.iter().enumerate() {
            linalg::mat_vec(
                &s_mats[i * n * n..(i + 1) * n * n],
                n,
                n,
                &h[i * n..(i + 1) * n],
                &mut sh,
            );
            finite += linalg::dot(&sd.grads[j], &sh);
            connection += linalg::dot(&sd.grads[j], &conn[i * n..(i + 1) * n]);
        }
        Ok((finite, connection))
    }

    /// Markovian curvature correction on the diagonal: finite sum minus the
    /// connection term.
    fn markovian_correction_diag(
        &self,
        path: &FramePath,
        phi: &PhiProfile,
        v: &[f64],
    ) -> Result<f64, CoreError> {
        let (finite, connection) = self.curvature_sums_diag(path, phi, v)?;
        Ok(finite - connection)
    }

    /// Raw second directional derivative `D_V(D_V F)` along `V = U(phi v)`:
    /// the L2 Hessian plus the full anticipating finite sum, before the
    /// connection term is subtracted off. This is the quantity the Halfway
    /// Harnack quadratic form is built from.
    pub fn second_directional_diag(
        &self,
        path: &FramePath,
        phi: &PhiProfile,
        v: &[f64],
    ) -> Result<f64, CoreError> {
        let (finite, _) = self.curvature_sums_diag(path, phi, v)?;
        Ok(self.l2_phi_hessian(path, phi, v, v)? + finite)
    }

    /// Markovian Hessian in the `phi`-directions. Off-diagonal entries are
    /// obtained by polarization of the diagonal, which keeps the bilinear
    /// form symmetric.
    pub fn markovian_phi_hessian(
        &self,
        path: &FramePath,
        phi: &PhiProfile,
        v: &[f64],
        w: &[f64],
    ) -> Result<f64, CoreError> {
        let same = v == w;
        if same {
            Ok(self.l2_phi_hessian(path, phi, v, v)?
                + self.markovian_correction_diag(path, phi, v)?)
        } else {
            let n = v.len();
            let mut plus = vec![0.0; n];
            let mut minus = vec![0.0; n];
            for a in 0..n {
                plus[a] = v[a] + w[a];
                minus[a] = v[a] - w[a];
            }
            let hp = self.l2_phi_hessian(path, phi, &plus, &plus)?
                + self.markovian_correction_diag(path, phi, &plus)?;
            let hm = self.l2_phi_hessian(path, phi, &minus, &minus)?
                + self.markovian_correction_diag(path, phi, &minus)?;
            Ok(0.25 * (hp - hm))
        }
    }

    /// `Delta_phi F`: trace of the Markovian `phi`-Hessian over an
    /// orthonormal basis.
    pub fn phi_laplacian(&self, path: &FramePath, phi: &PhiProfile) -> Result<f64, CoreError> {
        let n = path.dim();
        let mut acc = 0.0;
        let mut e = vec![0.0; n];
        for a in 0..n {
            e.fill(0.0);
            e[a] = 1.0;
            acc += self.markovian_phi_hessian(path, phi, &e, &e)?;
        }
        Ok(acc)
    }

    /// Trace of the L2 `phi`-Hessian.
    pub fn l2_phi_laplacian(&self, path: &FramePath, phi: &PhiProfile) -> Result<f64, CoreError> {
        let n = path.dim();
        let mut acc = 0.0;
        let mut e = vec![0.0; n];
        for a in 0..n {
            e.fill(0.0);
            e[a] = 1.0;
            acc += self.l2_phi_hessian(path, phi, &e, &e)?;
        }
        Ok(acc)
    }

    /// Independent assembly of the Markovian-minus-L2 correction: the
    /// Stratonovich accumulation `int_0^{t_i} R(odW, h) h` applied inside
    /// the integral, then paired with the slot gradients. Exactly rearranges
    /// the sums of `markovian_correction_diag`; used as its per-path oracle.
    pub fn markovian_correction_strat_route(
        &self,
        path: &FramePath,
        phi: &PhiProfile,
        v: &[f64],
    ) -> Result<f64, CoreError> {
        let n = path.dim();
        let sd = self.slot_derivs(path)?;
        let h = phi.times_vector(v);
        let c = malliavin::curvature_integral_applied(path, &h, &h);
        let mut acc = 0.0;
        for (j, &i) in sd.knots.iter().enumerate() {
            acc += linalg::dot(&sd.grads[j], &c[i * n..(i + 1) * n]);
        }
        Ok(acc)
    }
}

/// `nabla_t^par F` from precomputed slot derivatives: sum of `p_j` over
/// strictly later cylinder knots.
pub fn parallel_gradient_from(sd: &SlotDerivs, dim: usize, knot: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (j, &i) in sd.knots.iter().enumerate() {
        if i > knot {
            linalg::axpy(1.0, &sd.grads[j], &mut out);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ManifoldModel;
    use crate::sde::TimeGrid;

    /// f(y) = <a, y> on Euclidean space.
    struct Linear {
        a: Vec<f64>,
    }

    impl CylinderBase for Linear {
        fn arity(&self) -> usize {
            1
        }
        fn value(&self, pts: &[&[f64]]) -> f64 {
            linalg::dot(&self.a, pts[0])
        }
        fn gradient(&self, _slot: usize, _pts: &[&[f64]], out: &mut [f64]) {
            out.copy_from_slice(&self.a);
        }
        fn hessian(&self, _i: usize, _j: usize, _p: &[&[f64]], _x: &[f64], _y: &[f64]) -> f64 {
            0.0
        }
    }

    /// f(y) = |y|^2 / 2 on Euclidean space.
    struct HalfSq;

    impl CylinderBase for HalfSq {
        fn arity(&self) -> usize {
            1
        }
        fn value(&self, pts: &[&[f64]]) -> f64 {
            0.5 * linalg::dot(pts[0], pts[0])
        }
        fn gradient(&self, _slot: usize, pts: &[&[f64]], out: &mut [f64]) {
            out.copy_from_slice(pts[0]);
        }
        fn hessian(&self, _i: usize, _j: usize, _p: &[&[f64]], x: &[f64], y: &[f64]) -> f64 {
            linalg::dot(x, y)
        }
    }

    fn grid() -> TimeGrid {
        TimeGrid::new(1.0, 100).unwrap()
    }

    #[test]
    fn ramp_energy_is_inverse_time() {
        let phi = PhiProfile::ramp(grid(), 0.25).unwrap();
        assert!((phi.h_norm_sq() - 4.0).abs() < 1e-10);
        let full = PhiProfile::ramp(grid(), 1.0).unwrap();
        assert!((full.h_norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn off_grid_times_are_rejected() {
        let m = ManifoldModel::Euclidean { dim: 2 };
        let path = FramePath::simulate(&m, &[0.0, 0.0], grid(), 1, 0);
        let f = CylinderFunction::new(vec![0.333], Arc::new(Linear { a: vec![1.0, 0.0] })).unwrap();
        assert!(matches!(
            f.evaluate(&path),
            Err(CoreError::TimeOffGrid { .. })
        ));
    }

    #[test]
    fn parallel_gradient_is_zero_after_last_time_and_full_before() {
        let m = ManifoldModel::Euclidean { dim: 2 };
        let path = FramePath::simulate(&m, &[0.0, 0.0], grid(), 1, 0);
        let f = CylinderFunction::new(vec![0.5], Arc::new(Linear { a: vec![2.0, -1.0] })).unwrap();
        let before = f.parallel_gradient(&path, 10).unwrap();
        assert!((before[0] - 2.0).abs() < 1e-12 && (before[1] + 1.0).abs() < 1e-12);
        let at = f.parallel_gradient(&path, 50).unwrap();
        assert_eq!(at, vec![0.0, 0.0]);
    }

    #[test]
    fn phi_gradient_matches_quadrature_of_parallel_gradient() {
        // sum_steps phi' * par_grad * dt telescopes exactly to
        // sum_j phi(t_j) p_j on the grid.
        let m = ManifoldModel::Euclidean { dim: 2 };
        let path = FramePath::simulate(&m, &[0.0, 0.0], grid(), 5, 2);
        let f = CylinderFunction::new(vec![0.3, 0.8], Arc::new(TwoSlot)).unwrap();
        let phi = PhiProfile::ramp(grid(), 0.8).unwrap();
        let direct = f.phi_gradient(&path, &phi).unwrap();
        let sd = f.slot_derivs(&path).unwrap();
        let mut quad = vec![0.0; 2];
        for step in 0..grid().steps() {
            let dphi = phi.value(step + 1) - phi.value(step);
            let pg = parallel_gradient_from(&sd, 2, step);
            linalg::axpy(dphi, &pg, &mut quad);
        }
        for a in 0..2 {
            assert!((direct[a] - quad[a]).abs() < 1e-10);
        }
    }

    /// f(y1, y2) = <y1, y2> exercises cross-slot Hessians.
    struct TwoSlot;

    impl CylinderBase for TwoSlot {
        fn arity(&self) -> usize {
            2
        }
        fn value(&self, pts: &[&[f64]]) -> f64 {
            linalg::dot(pts[0], pts[1])
        }
        fn gradient(&self, slot: usize, pts: &[&[f64]], out: &mut [f64]) {
            out.copy_from_slice(pts[1 - slot]);
        }
        fn hessian(&self, i: usize, j: usize, _p: &[&[f64]], x: &[f64], y: &[f64]) -> f64 {
            if i == j {
                0.0
            } else {
                linalg::dot(x, y)
            }
        }
    }

    #[test]
    fn example_profile_reduces_phi_gradient_to_transport() {
        // k = 1 with the ramp profile hitting 1 at the cylinder time.
        let m = ManifoldModel::Euclidean { dim: 2 };
        let path = FramePath::simulate(&m, &[0.0, 0.0], grid(), 9, 4);
        let f = CylinderFunction::new(vec![0.5], Arc::new(HalfSq)).unwrap();
        let phi = PhiProfile::ramp(grid(), 0.5).unwrap();
        let pg = f.phi_gradient(&path, &phi).unwrap();
        let expect = path.point(50);
        for a in 0..2 {
            assert!((pg[a] - expect[a]).abs() < 1e-12);
        }
    }

    #[test]
    fn pathwise_finite_difference_matches_parallel_gradient_on_flat_space() {
        // Perturb the flat path by eps * (step profile) * v: F changes by
        // eps <par_grad, v> to first order.
        let m = ManifoldModel::Euclidean { dim: 2 };
        let g = grid();
        let path = FramePath::simulate(&m, &[0.0, 0.0], g, 31, 1);
        let f = CylinderFunction::new(vec![0.5, 0.9], Arc::new(TwoSlot)).unwrap();
        let knot = 40;
        let v = [0.7, -0.3];
        let eps = 1e-6;
        // Shift every evaluation point after `knot` by eps * v.
        let shifted_val = |sign: f64| {
            let pts: Vec<Vec<f64>> = f
                .knot_indices(&g)
                .unwrap()
                .iter()
                .map(|&i| {
                    let mut p = path.point(i).to_vec();
                    if i > knot {
                        for a in 0..2 {
                            p[a] += sign * eps * v[a];
                        }
                    }
                    p
                })
                .collect();
            let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
            TwoSlot.value(&refs)
        };
        let fd = (shifted_val(1.0) - shifted_val(-1.0)) / (2.0 * eps);
        let pg = f.parallel_gradient(&path, knot).unwrap();
        assert!((fd - (pg[0] * v[0] + pg[1] * v[1])).abs() < 1e-6);
    }

    #[test]
    fn l2_hessian_is_symmetric_and_matches_one_point_form() {
        let m = ManifoldModel::Euclidean { dim: 2 };
        let path = FramePath::simulate(&m, &[0.0, 0.0], grid(), 3, 8);
        let f = CylinderFunction::new(vec![0.5], Arc::new(HalfSq)).unwrap();
        let phi = PhiProfile::ramp(grid(), 0.5).unwrap();
        let v = [0.3, 0.4];
        let w = [-1.0, 0.2];
        let hvw = f.l2_phi_hessian(&path, &phi, &v, &w).unwrap();
        let hwv = f.l2_phi_hessian(&path, &phi, &w, &v).unwrap();
        assert!((hvw - hwv).abs() < 1e-12);
        // For f = |y|^2/2, Hess = I, phi(t1) = 1: value is <v, w>.
        assert!((hvw - (v[0] * w[0] + v[1] * w[1])).abs() < 1e-12);
    }

    #[test]
    fn markovian_equals_l2_on_flat_models() {
        let m = ManifoldModel::FlatTorus {
            sides: vec![1.0, 1.0],
        };
        let path = FramePath::simulate(&m, &[0.0, 0.0], grid(), 17, 0);
        let f = CylinderFunction::new(vec![0.5], Arc::new(PeriodicCos)).unwrap();
        let phi = PhiProfile::ramp(grid(), 0.5).unwrap();
        let lap = f.phi_laplacian(&path, &phi).unwrap();
        let lap_l2 = f.l2_phi_laplacian(&path, &phi).unwrap();
        assert!((lap - lap_l2).abs() < 1e-12);
    }

    /// Periodic test function on the unit torus.
    struct PeriodicCos;

    impl CylinderBase for PeriodicCos {
        fn arity(&self) -> usize {
            1
        }
        fn value(&self, pts: &[&[f64]]) -> f64 {
            libm::cos(core::f64::consts::TAU * pts[0][0]) + 2.0
        }
        fn gradient(&self, _slot: usize, pts: &[&[f64]], out: &mut [f64]) {
            out[0] = -core::f64::consts::TAU * libm::sin(core::f64::consts::TAU * pts[0][0]);
            out[1] = 0.0;
        }
        fn hessian(&self, _i: usize, _j: usize, pts: &[&[f64]], x: &[f64], y: &[f64]) -> f64 {
            let c = -core::f64::consts::TAU
                * core::f64::consts::TAU
                * libm::cos(core::f64::consts::TAU * pts[0][0]);
            c * x[0] * y[0]
        }
    }

    #[test]
    fn phi_gradient_is_linear_in_phi_and_f() {
        let m = ManifoldModel::Euclidean { dim: 2 };
        let path = FramePath::simulate(&m, &[0.0, 0.0], grid(), 23, 5);
        let f = CylinderFunction::new(vec![0.5], Arc::new(Linear { a: vec![1.0, 2.0] })).unwrap();
        let phi = PhiProfile::ramp(grid(), 0.5).unwrap();
        let g1 = f.phi_gradient(&path, &phi).unwrap();
        let g2 = f.phi_gradient(&path, &phi.scaled(2.5)).unwrap();
        for a in 0..2 {
            assert!((g2[a] - 2.5 * g1[a]).abs() < 1e-10);
        }
    }
}
