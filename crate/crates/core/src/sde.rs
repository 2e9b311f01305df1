//! Horizontal Brownian motion on the frame bundle, sampled as a geodesic
//! random walk, plus the discrete stochastic integrals taken against the
//! driving noise.
//!
//! Each step draws a Gaussian increment `dW ~ N(0, 2*dt*I)` (the covariation
//! normalization `[W^a, W^b] = 2t delta_ab`) and rolls the manifold along
//! the geodesic with initial velocity `u * dW`, transporting the frame. The
//! frame state is therefore the stochastic parallel transport of the initial
//! frame, and the increments are the anti-development of the path.
//!
//! Ito integrals use the left-endpoint rule, Stratonovich integrals the
//! midpoint-in-integrand rule; both are evaluated against the stored
//! increments of a path, so identities can be checked with common random
//! numbers.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::geometry::{ManifoldModel, PointFrame};
use crate::linalg;
use crate::rng::PathRng;

/// Uniform partition of `[0, horizon]` into `steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self, CoreError> {
        if !(horizon > 0.0) {
            return Err(CoreError::InvalidParameter {
                what: "horizon must be positive".into(),
            });
        }
        if steps < 2 {
            return Err(CoreError::InvalidParameter {
                what: "need at least 2 steps".into(),
            });
        }
        Ok(TimeGrid { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn knot(&self, i: usize) -> f64 {
        self.horizon * i as f64 / self.steps as f64
    }

    /// Knot index of an evaluation time. Times that do not land on a knot
    /// are rejected, not interpolated.
    pub fn index_of(&self, t: f64) -> Result<usize, CoreError> {
        let raw = t / self.dt();
        let idx = libm::round(raw);
        if libm::fabs(raw - idx) > 1e-6 || idx < 0.0 || idx > self.steps as f64 {
            return Err(CoreError::TimeOffGrid { t });
        }
        Ok(idx as usize)
    }
}

/// One sampled path of horizontal Brownian motion: points, frames, and the
/// driving increments, all knot-indexed. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FramePath {
    pub model: ManifoldModel,
    pub grid: TimeGrid,
    pub seed: u64,
    pub path_index: u64,
    points: Vec<f64>,
    frames: Vec<f64>,
    noise: Vec<f64>,
}

impl FramePath {
    /// Sample one path. Deterministic in `(model, base, grid, seed,
    /// path_index)` regardless of the caller's threading.
    pub fn simulate(
        model: &ManifoldModel,
        base: &[f64],
        grid: TimeGrid,
        seed: u64,
        path_index: u64,
    ) -> FramePath {
        let n = model.dim();
        let m = grid.steps();
        let rng = PathRng::new(seed, path_index, n);
        let sigma = libm::sqrt(2.0 * grid.dt());
        let mut noise = vec![0.0; m * n];
        for step in 0..m {
            rng.step_normals(step as u64, &mut noise[step * n..(step + 1) * n]);
        }
        for z in noise.iter_mut() {
            *z *= sigma;
        }
        let mut path = Self::from_increments(model, base, grid, noise);
        path.seed = seed;
        path.path_index = path_index;
        path
    }

    /// Build a path from externally supplied increments (deterministic
    /// drivers in tests, replayed noise, ...).
    pub fn from_increments(
        model: &ManifoldModel,
        base: &[f64],
        grid: TimeGrid,
        noise: Vec<f64>,
    ) -> FramePath {
        let n = model.dim();
        let amb = model.ambient_dim();
        let m = grid.steps();
        assert_eq!(noise.len(), m * n, "noise length must be steps * dim");
        assert_eq!(base.len(), amb, "base point dimension mismatch");
        let mut points = vec![0.0; (m + 1) * amb];
        let mut frames = vec![0.0; (m + 1) * amb * n];
        points[..amb].copy_from_slice(base);
        frames[..amb * n].copy_from_slice(&model.canonical_frame(base));
        for i in 0..m {
            let (done_p, rest_p) = points.split_at_mut((i + 1) * amb);
            let (done_f, rest_f) = frames.split_at_mut((i + 1) * amb * n);
            model.exp_step(
                &done_p[i * amb..],
                &done_f[i * amb * n..],
                &noise[i * n..(i + 1) * n],
                &mut rest_p[..amb],
                &mut rest_f[..amb * n],
            );
        }
        FramePath {
            model: model.clone(),
            grid,
            seed: 0,
            path_index: 0,
            points,
            frames,
            noise,
        }
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn steps(&self) -> usize {
        self.grid.steps()
    }

    /// Base-manifold point at knot `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        let amb = self.model.ambient_dim();
        &self.points[i * amb..(i + 1) * amb]
    }

    /// Orthonormal frame at knot `i` (column-major `amb x n`).
    pub fn frame(&self, i: usize) -> &[f64] {
        let fs = self.model.ambient_dim() * self.model.dim();
        &self.frames[i * fs..(i + 1) * fs]
    }

    pub fn state(&self, i: usize) -> PointFrame {
        PointFrame {
            point: self.point(i).to_vec(),
            frame: self.frame(i).to_vec(),
        }
    }

    /// Driving increment `dW_i` over `[t_i, t_{i+1})`.
    pub fn increment(&self, i: usize) -> &[f64] {
        let n = self.model.dim();
        &self.noise[i * n..(i + 1) * n]
    }

    /// Anti-development value `W_{t_i}` (cumulative increments).
    pub fn anti_development(&self, i: usize) -> Vec<f64> {
        let n = self.model.dim();
        let mut w = vec![0.0; n];
        for step in 0..i {
            linalg::axpy(1.0, self.increment(step), &mut w);
        }
        w
    }

    /// Base-frame components of the stochastic parallel transport of an
    /// ambient tangent vector at knot `i`, i.e. the coordinates of
    /// `P_{t_i} w` in the initial frame. In frame calculus this is just the
    /// pullback through the frame at knot `i`.
    pub fn transport_to_base(&self, i: usize, w_ambient: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.model.dim()];
        self.model.frame_coeffs(self.frame(i), w_ambient, &mut out);
        out
    }

    /// Matrix of the transport `P_{t_i}` in the initial frame, comparing the
    /// transported frame with the base frame through the ambient
    /// coordinates: `M[a][b] = g(u_{t_i} e_a, u_0 e_b)`. Exactly the
    /// transport matrix on flat members and whenever the path has returned
    /// to the base point (holonomy); at other points of a curved member the
    /// two tangent spaces differ and this is their ambient comparison.
    pub fn transport_matrix_to_base(&self, i: usize) -> Vec<f64> {
        let n = self.model.dim();
        let amb = self.model.ambient_dim();
        let fi = self.frame(i);
        let f0 = self.frame(0);
        let mut m = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                m[a * n + b] = self
                    .model
                    .metric_dot(&fi[a * amb..(a + 1) * amb], &f0[b * amb..(b + 1) * amb]);
            }
        }
        m
    }

    /// Left-endpoint Ito integral of a vector integrand: the closure writes
    /// the integrand value at knot `i` (adapted: it must only look at the
    /// path up to knot `i`) and the integral is `sum_i <a_i, dW_i>`.
    pub fn ito_vector<F: FnMut(usize, &mut [f64])>(&self, mut at: F) -> f64 {
        let n = self.model.dim();
        let mut buf = vec![0.0; n];
        let mut acc = 0.0;
        for i in 0..self.steps() {
            at(i, &mut buf);
            acc += linalg::dot(&buf, self.increment(i));
        }
        acc
    }

    /// Midpoint-rule Stratonovich integral of a vector integrand defined at
    /// every knot: `sum_i <(a_i + a_{i+1})/2, dW_i>`.
    pub fn stratonovich_vector<F: FnMut(usize, &mut [f64])>(&self, mut at: F) -> f64 {
        let n = self.model.dim();
        let mut left = vec![0.0; n];
        let mut right = vec![0.0; n];
        let mut acc = 0.0;
        at(0, &mut left);
        for i in 0..self.steps() {
            at(i + 1, &mut right);
            for a in 0..n {
                acc += 0.5 * (left[a] + right[a]) * self.increment(i)[a];
            }
            core::mem::swap(&mut left, &mut right);
        }
        acc
    }

    /// Ito integral of a matrix integrand (`n x n`, row-major), producing
    /// the vector `sum_i A_i dW_i`.
    pub fn ito_matrix<F: FnMut(usize, &mut [f64])>(&self, mut at: F) -> Vec<f64> {
        let n = self.model.dim();
        let mut buf = vec![0.0; n * n];
        let mut tmp = vec![0.0; n];
        let mut acc = vec![0.0; n];
        for i in 0..self.steps() {
            at(i, &mut buf);
            linalg::mat_vec(&buf, n, n, self.increment(i), &mut tmp);
            linalg::axpy(1.0, &tmp, &mut acc);
        }
        acc
    }

    /// Stratonovich integral of a matrix integrand, producing
    /// `sum_i (A_i + A_{i+1})/2 dW_i`.
    pub fn stratonovich_matrix<F: FnMut(usize, &mut [f64])>(&self, mut at: F) -> Vec<f64> {
        let n = self.model.dim();
        let mut left = vec![0.0; n * n];
        let mut right = vec![0.0; n * n];
        let mut mid = vec![0.0; n * n];
        let mut tmp = vec![0.0; n];
        let mut acc = vec![0.0; n];
        at(0, &mut left);
        for i in 0..self.steps() {
            at(i + 1, &mut right);
            for k in 0..n * n {
                mid[k] = 0.5 * (left[k] + right[k]);
            }
            linalg::mat_vec(&mid, n, n, self.increment(i), &mut tmp);
            linalg::axpy(1.0, &tmp, &mut acc);
            core::mem::swap(&mut left, &mut right);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;

    fn grid(t: f64, m: usize) -> TimeGrid {
        TimeGrid::new(t, m).unwrap()
    }

    #[test]
    fn grid_rejects_off_knot_times() {
        let g = grid(1.0, 1000);
        assert_eq!(g.index_of(0.25).unwrap(), 250);
        assert!(matches!(
            g.index_of(0.33333),
            Err(CoreError::TimeOffGrid { .. })
        ));
    }

    #[test]
    fn euclidean_path_is_cumulative_noise_with_identity_frames() {
        let m = ManifoldModel::Euclidean { dim: 2 };
        let path = FramePath::simulate(&m, &[0.0, 0.0], grid(1.0, 64), 7, 3);
        let mut acc = [0.0, 0.0];
        for i in 0..=64 {
            assert!((path.point(i)[0] - acc[0]).abs() < 1e-12);
            assert!((path.point(i)[1] - acc[1]).abs() < 1e-12);
            assert_eq!(path.frame(i), &[1.0, 0.0, 0.0, 1.0]);
            if i < 64 {
                acc[0] += path.increment(i)[0];
                acc[1] += path.increment(i)[1];
            }
        }
    }

    #[test]
    fn simulation_is_reproducible() {
        let m = ManifoldModel::Sphere {
            dim: 2,
            radius: 1.0,
        };
        let base = m.base_point();
        let a = FramePath::simulate(&m, &base, grid(1.0, 100), 42, 5);
        let b = FramePath::simulate(&m, &base, grid(1.0, 100), 42, 5);
        assert_eq!(a.points, b.points);
        assert_eq!(a.frames, b.frames);
        assert_eq!(a.noise, b.noise);
    }

    #[test]
    fn noise_covariance_matches_2t() {
        let m = ManifoldModel::Euclidean { dim: 2 };
        let g = grid(1.0, 50);
        let n_paths = 20_000;
        let mut w1w1 = Vec::with_capacity(n_paths);
        let mut w1w2 = Vec::with_capacity(n_paths);
        for p in 0..n_paths {
            let path = FramePath::simulate(&m, &[0.0, 0.0], g, 1234, p as u64);
            let w = path.anti_development(50);
            w1w1.push(w[0] * w[0]);
            w1w2.push(w[0] * w[1]);
        }
        let (m11, se11) = stats::mean_se(&w1w1);
        let (m12, se12) = stats::mean_se(&w1w2);
        assert!((m11 - 2.0).abs() < 3.0 * se11, "var {m11} +- {se11}");
        assert!(m12.abs() < 3.0 * se12, "cov {m12} +- {se12}");
    }

    #[test]
    fn ito_of_constant_telescopes_and_matches_stratonovich() {
        let m = ManifoldModel::Euclidean { dim: 2 };
        let path = FramePath::simulate(&m, &[0.0, 0.0], grid(1.0, 128), 9, 0);
        let ito = path.ito_vector(|_, out| out.copy_from_slice(&[1.0, 0.0]));
        let strat = path.stratonovich_vector(|_, out| out.copy_from_slice(&[1.0, 0.0]));
        let w = path.anti_development(128);
        assert!((ito - w[0]).abs() < 1e-12);
        assert!((strat - ito).abs() < 1e-12);
    }

    #[test]
    fn ito_isometry_and_martingale_property() {
        let m = ManifoldModel::Euclidean { dim: 1 };
        let g = grid(1.0, 40);
        let t0 = 0.5;
        let i0 = g.index_of(t0).unwrap();
        let n_paths = 30_000;
        let mut vals = Vec::with_capacity(n_paths);
        for p in 0..n_paths {
            let path = FramePath::simulate(&m, &[0.0], g, 77, p as u64);
            let v = path.ito_vector(|i, out| out[0] = if i < i0 { 1.0 / t0 } else { 0.0 });
            vals.push(v);
        }
        let (mean, se) = stats::mean_se(&vals);
        assert!(mean.abs() < 3.0 * se);
        let sq: Vec<f64> = vals.iter().map(|v| v * v).collect();
        let (var, vse) = stats::mean_se(&sq);
        // Ito isometry with covariation 2t: E I^2 = 2 * t0 / t0^2.
        assert!((var - 2.0 / t0).abs() < 3.0 * vse, "var {var} +- {vse}");
    }

    #[test]
    fn stratonovich_midpoint_sees_the_quadratic_covariation() {
        // Integrand W^1 against dW^1: Stratonovich minus Ito converges to
        // half the covariation, here T under the 2t normalization.
        let m = ManifoldModel::Euclidean { dim: 1 };
        let g = grid(1.0, 400);
        let n_paths = 4000;
        let mut diffs = Vec::with_capacity(n_paths);
        for p in 0..n_paths {
            let path = FramePath::simulate(&m, &[0.0], g, 5150, p as u64);
            let mut w = vec![0.0; g.steps() + 1];
            for i in 0..g.steps() {
                w[i + 1] = w[i] + path.increment(i)[0];
            }
            let strat = path.stratonovich_vector(|i, out| out[0] = w[i]);
            let ito = path.ito_vector(|i, out| out[0] = w[i]);
            diffs.push(strat - ito);
        }
        let (mean, se) = stats::mean_se(&diffs);
        assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean} +- {se}");
    }

    #[test]
    fn transport_matrix_is_identity_on_flat_members_and_at_zero() {
        let m = ManifoldModel::FlatTorus {
            sides: vec![1.0, 1.0],
        };
        let path = FramePath::simulate(&m, &[0.0, 0.0], grid(1.0, 32), 3, 1);
        for i in [0, 7, 32] {
            let t = path.transport_matrix_to_base(i);
            assert!((t[0] - 1.0).abs() < 1e-12 && (t[3] - 1.0).abs() < 1e-12);
            assert!(t[1].abs() < 1e-12 && t[2].abs() < 1e-12);
        }
    }

    #[test]
    fn holonomy_of_injected_triangle_driver() {
        // Drive the walk around the right-angled octant triangle on S^2(1)
        // by injecting the increments; the transport matrix at the closing
        // knot is the rotation by the spherical excess pi/2.
        let m = ManifoldModel::Sphere {
            dim: 2,
            radius: 1.0,
        };
        let g = grid(3.0, 3);
        let q = core::f64::consts::FRAC_PI_2;
        let noise = vec![q, 0.0, 0.0, q, -q, 0.0];
        let path = FramePath::from_increments(&m, &m.base_point(), g, noise);
        let base = m.base_point();
        for i in 0..3 {
            assert!((path.point(3)[i] - base[i]).abs() < 1e-10);
        }
        let t = path.transport_matrix_to_base(3);
        // Rotation by pi/2 (orientation fixed by the chosen driver).
        let want = [0.0, 1.0, -1.0, 0.0];
        for i in 0..4 {
            assert!((t[i] - want[i]).abs() < 1e-10, "t {t:?}");
        }
    }
}
