//! Vector fields on path space and their calculus: the hat-map and its
//! inverse, the divergence, the Markovian / modified / Cartan connections
//! applied to catalog fields, and the derivative of the hat process.
//!
//! A vector field is carried as its base-frame process `v_t` (one `R^n` row
//! per knot, `v_0 = 0`); the realized field on the manifold is `U_t v_t`.
//! Connections need the derivative `D_V w'` of the coefficient process; the
//! shipped catalog provides it for deterministic profiles and for hats of
//! deterministic profiles (through the closed-form derivative of the hat
//! process). Anything else is rejected rather than silently approximated.
//!
//! Quadrature choices: time integrals are trapezoidal, the Stratonovich
//! curvature accumulations use the midpoint rule, and the divergence uses
//! the left-endpoint Ito rule, so it stays adapted.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::linalg;
use crate::pathfunc::VectorProfile;
use crate::sde::FramePath;

/// How a process was constructed; decides which derivative oracles exist.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Same coefficients on every path: `D_V w' = 0`.
    Deterministic,
    /// `hat` of a deterministic profile; `D_V w'` comes from the derivative
    /// of the hat process, so the original coefficients are kept.
    HatOfDeterministic { base: Vec<f64> },
    /// Constructed from the path with no derivative oracle.
    Pathwise,
}

/// Knot-indexed adapted process `v_i` in base-frame components, `v_0 = 0`.
///
/// Processes built by connections additionally carry the left-endpoint rate
/// `d/dt hat(v)` at every knot: the values are integrated with midpoint and
/// trapezoid rules (good for pathwise contractions), but an Ito integral
/// against the increments must see the adapted instantaneous rate, not a
/// difference of midpoint-integrated values, or it picks up a covariation
/// bias.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedProcess {
    dim: usize,
    dt: f64,
    values: Vec<f64>,
    provenance: Provenance,
    hat_rate: Option<Vec<f64>>,
}

impl AdaptedProcess {
    pub fn from_profile(p: &VectorProfile) -> Self {
        AdaptedProcess {
            dim: p.dim(),
            dt: p.grid().dt(),
            values: p.values().to_vec(),
            provenance: Provenance::Deterministic,
            hat_rate: None,
        }
    }

    pub fn from_values(values: Vec<f64>, dim: usize, dt: f64, provenance: Provenance) -> Self {
        debug_assert_eq!(values.len() % dim, 0);
        AdaptedProcess {
            dim,
            dt,
            values,
            provenance,
            hat_rate: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn knots(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn value(&self, knot: usize) -> &[f64] {
        &self.values[knot * self.dim..(knot + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self.provenance, Provenance::Deterministic)
    }

    /// Cameron-Martin energy of the piecewise-linear interpolation.
    pub fn h_norm_sq(&self) -> f64 {
        h_norm_sq(&self.values, self.dim, self.dt)
    }

    pub fn h_inner(&self, other: &Self) -> f64 {
        h_inner(&self.values, &other.values, self.dim, self.dt)
    }

    /// Pointwise sum, used to trace connections over a basis.
    pub fn add(&self, other: &Self) -> Self {
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a + b)
            .collect();
        let hat_rate = match (&self.hat_rate, &other.hat_rate) {
            (Some(a), Some(b)) => Some(a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()),
            _ => None,
        };
        AdaptedProcess {
            dim: self.dim,
            dt: self.dt,
            values,
            provenance: Provenance::Pathwise,
            hat_rate,
        }
    }

    /// Left-endpoint instantaneous rate of the hatted process, when the
    /// constructor supplied one.
    pub fn hat_rate(&self) -> Option<&[f64]> {
        self.hat_rate.as_deref()
    }

    pub fn with_hat_rate(mut self, rate: Vec<f64>) -> Self {
        debug_assert_eq!(rate.len(), self.values.len());
        self.hat_rate = Some(rate);
        self
    }
}

/// `int |v'|^2 dt` for knot values laid out one row per knot.
pub fn h_norm_sq(values: &[f64], dim: usize, dt: f64) -> f64 {
    h_inner(values, values, dim, dt)
}

/// `int <v', w'> dt` for two knot-value arrays.
pub fn h_inner(a: &[f64], b: &[f64], dim: usize, dt: f64) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let knots = a.len() / dim;
    let mut s = 0.0;
    for i in 0..knots - 1 {
        for c in 0..dim {
            let da = a[(i + 1) * dim + c] - a[i * dim + c];
            let db = b[(i + 1) * dim + c] - b[i * dim + c];
            s += da * db;
        }
    }
    s / dt
}

/// The hat-map `v -> v + int_0^t Ric v ds` (trapezoidal cumulative
/// integral). Identity on Ricci-flat members; keeps adaptedness.
pub fn hat(v: &AdaptedProcess, path: &FramePath) -> AdaptedProcess {
    let n = v.dim();
    let dt = v.dt;
    let ric = path.model.ricci_matrix();
    let knots = v.knots();
    let mut out = vec![0.0; knots * n];
    let mut acc = vec![0.0; n];
    let mut rv_prev = vec![0.0; n];
    let mut rv_next = vec![0.0; n];
    linalg::mat_vec(&ric, n, n, v.value(0), &mut rv_prev);
    out[..n].copy_from_slice(v.value(0));
    for i in 0..knots - 1 {
        linalg::mat_vec(&ric, n, n, v.value(i + 1), &mut rv_next);
        for c in 0..n {
            acc[c] += 0.5 * dt * (rv_prev[c] + rv_next[c]);
            out[(i + 1) * n + c] = v.value(i + 1)[c] + acc[c];
        }
        core::mem::swap(&mut rv_prev, &mut rv_next);
    }
    let provenance = match &v.provenance {
        Provenance::Deterministic => Provenance::HatOfDeterministic {
            base: v.values.clone(),
        },
        _ => Provenance::Pathwise,
    };
    AdaptedProcess {
        dim: n,
        dt,
        values: out,
        provenance,
        hat_rate: None,
    }
}

/// Inverse of the hat-map: solves `v' + Ric v = w'`, `v_0 = 0`, by the
/// implicit trapezoid rule, which telescopes exactly against `hat`.
pub fn hat_inverse(w: &AdaptedProcess, path: &FramePath) -> AdaptedProcess {
    let n = w.dim();
    let dt = w.dt;
    let ric = path.model.ricci_matrix();
    let knots = w.knots();
    let mut out = vec![0.0; knots * n];
    let mut rhs = vec![0.0; n];
    let mut rv = vec![0.0; n];
    let mut lhs = vec![0.0; n * n];
    for i in 0..knots - 1 {
        let v_i = out[i * n..(i + 1) * n].to_vec();
        linalg::mat_vec(&ric, n, n, &v_i, &mut rv);
        for c in 0..n {
            rhs[c] = v_i[c] - 0.5 * dt * rv[c] + (w.value(i + 1)[c] - w.value(i)[c]);
        }
        for r in 0..n {
            for c in 0..n {
                lhs[r * n + c] = 0.5 * dt * ric[r * n + c] + if r == c { 1.0 } else { 0.0 };
            }
        }
        linalg::solve_in_place(&mut lhs, &mut rhs);
        out[(i + 1) * n..(i + 2) * n].copy_from_slice(&rhs);
    }
    AdaptedProcess {
        dim: n,
        dt,
        values: out,
        provenance: Provenance::Pathwise,
        hat_rate: None,
    }
}

/// Path-space divergence `delta(V) = 1/2 int <v' + Ric v, dW>` with the
/// left-endpoint (adapted) Ito rule. Connection outputs carry an explicit
/// hat-rate and are integrated through it; otherwise the rate comes from
/// forward differences of the knot values plus the Ricci term, which is
/// adapted for the deterministic catalog (and remains the caller's
/// adaptedness contract for hand-built pathwise processes).
pub fn divergence(v: &AdaptedProcess, path: &FramePath) -> f64 {
    let n = v.dim();
    if let Some(rate) = v.hat_rate() {
        return 0.5 * path.ito_vector(|i, out| out.copy_from_slice(&rate[i * n..(i + 1) * n]));
    }
    let dt = v.dt;
    let ric = path.model.ricci_matrix();
    let mut rv = vec![0.0; n];
    0.5 * path.ito_vector(|i, out| {
        linalg::mat_vec(&ric, n, n, v.value(i), &mut rv);
        for c in 0..n {
            out[c] = (v.value(i + 1)[c] - v.value(i)[c]) / dt + rv[c];
        }
    })
}

/// Running Stratonovich curvature matrix `A_t = int_0^t R(odW_s, k_s)`,
/// stored at every knot (row-major `n x n` per knot). Three downstream
/// formulas reuse it: connections, Hessian corrections, and the hat
/// derivative.
pub fn running_curvature(path: &FramePath, k_values: &[f64]) -> Vec<f64> {
    let n = path.dim();
    let m = path.steps();
    debug_assert_eq!(k_values.len(), (m + 1) * n);
    let mut mats = vec![0.0; (m + 1) * n * n];
    if path.model.is_flat() {
        return mats;
    }
    let mut step_l = vec![0.0; n * n];
    let mut step_r = vec![0.0; n * n];
    for i in 0..m {
        let dw = path.increment(i);
        path.model
            .curvature_op(dw, &k_values[i * n..(i + 1) * n], &mut step_l);
        path.model
            .curvature_op(dw, &k_values[(i + 1) * n..(i + 2) * n], &mut step_r);
        let (done, rest) = mats.split_at_mut((i + 1) * n * n);
        let prev = &done[i * n * n..];
        for c in 0..n * n {
            rest[c] = prev[c] + 0.5 * (step_l[c] + step_r[c]);
        }
    }
    mats
}

/// Trapezoidal coupling of a knot-indexed matrix process against the
/// increments of a knot-indexed vector process:
/// `q_{i+1} = q_i + (S_i + S_{i+1})/2 (h_{i+1} - h_i)`, `q_0 = 0`.
pub fn integrate_matrix_against(s_mats: &[f64], h_values: &[f64], n: usize) -> Vec<f64> {
    let knots = h_values.len() / n;
    debug_assert_eq!(s_mats.len(), knots * n * n);
    let mut out = vec![0.0; knots * n];
    let mut dh = vec![0.0; n];
    let mut mid = vec![0.0; n * n];
    let mut push = vec![0.0; n];
    for i in 0..knots - 1 {
        for c in 0..n {
            dh[c] = h_values[(i + 1) * n + c] - h_values[i * n + c];
        }
        for c in 0..n * n {
            mid[c] = 0.5 * (s_mats[i * n * n + c] + s_mats[(i + 1) * n * n + c]);
        }
        linalg::mat_vec(&mid, n, n, &dh, &mut push);
        for c in 0..n {
            out[(i + 1) * n + c] = out[i * n + c] + push[c];
        }
    }
    out
}

/// Cumulative Stratonovich integral `int_0^t R(odW_s, k_s) b_s` with the
/// argument inside the integral: matrix steps applied to the midpoint of
/// `b`. Exact discrete rearrangement of
/// `A_t b_t - int_0^t A db` by the product rule; used as the second
/// assembly route in Hessian identity checks.
pub fn curvature_integral_applied(
    path: &FramePath,
    k_values: &[f64],
    b_values: &[f64],
) -> Vec<f64> {
    let n = path.dim();
    let m = path.steps();
    let mut out = vec![0.0; (m + 1) * n];
    let mut step_l = vec![0.0; n * n];
    let mut step_r = vec![0.0; n * n];
    let mut mid_b = vec![0.0; n];
    let mut push = vec![0.0; n];
    let mut dsmat = vec![0.0; n * n];
    for i in 0..m {
        let dw = path.increment(i);
        path.model
            .curvature_op(dw, &k_values[i * n..(i + 1) * n], &mut step_l);
        path.model
            .curvature_op(dw, &k_values[(i + 1) * n..(i + 2) * n], &mut step_r);
        for c in 0..n * n {
            dsmat[c] = 0.5 * (step_l[c] + step_r[c]);
        }
        for c in 0..n {
            mid_b[c] = 0.5 * (b_values[i * n + c] + b_values[(i + 1) * n + c]);
        }
        linalg::mat_vec(&dsmat, n, n, &mid_b, &mut push);
        for c in 0..n {
            out[(i + 1) * n + c] = out[i * n + c] + push[c];
        }
    }
    out
}

/// Derivative of the hat process along a deterministic direction:
/// `D_V w-hat' = (nabla Ric)(v, w) + Ric(A_t(v) w) - A_t(v) (Ric w)`,
/// returned at every knot. Vanishes identically on Einstein members.
pub fn dv_hat_dot(
    v: &AdaptedProcess,
    w: &AdaptedProcess,
    path: &FramePath,
) -> Result<Vec<f64>, CoreError> {
    if !v.is_deterministic() || !w.is_deterministic() {
        return Err(CoreError::MissingDerivativeOracle);
    }
    let n = path.dim();
    let knots = v.knots();
    let ric = path.model.ricci_matrix();
    let a_mats = running_curvature(path, v.values());
    let mut out = vec![0.0; knots * n];
    let mut aw = vec![0.0; n];
    let mut raw = vec![0.0; n];
    let mut rw = vec![0.0; n];
    let mut arw = vec![0.0; n];
    for i in 0..knots {
        let a = &a_mats[i * n * n..(i + 1) * n * n];
        let wv = w.value(i);
        linalg::mat_vec(a, n, n, wv, &mut aw);
        linalg::mat_vec(&ric, n, n, &aw, &mut raw);
        linalg::mat_vec(&ric, n, n, wv, &mut rw);
        linalg::mat_vec(a, n, n, &rw, &mut arw);
        let nr = path.model.nabla_ricci_pair(&path.state(i), v.value(i), wv);
        for c in 0..n {
            out[i * n + c] = nr[c] + raw[c] - arw[c];
        }
    }
    Ok(out)
}

/// Left-endpoint derivative of the coefficients of `h`, together with its
/// derivative term `D_{Uk} h'` at every knot. Deterministic profiles have
/// forward-difference derivatives and no `D` term; hats of deterministic
/// profiles differentiate analytically (`d/dt w-hat = w' + Ric w`) and
/// bring in the closed-form hat derivative. Other pathwise fields have no
/// oracle.
fn h_rate_and_derivative(
    k: &AdaptedProcess,
    h: &AdaptedProcess,
    path: &FramePath,
) -> Result<(Vec<f64>, Vec<f64>), CoreError> {
    let n = path.dim();
    let dt = h.dt;
    let knots = h.knots();
    let mut hdot = vec![0.0; knots * n];
    match h.provenance() {
        Provenance::Deterministic => {
            for i in 0..knots - 1 {
                for c in 0..n {
                    hdot[i * n + c] = (h.value(i + 1)[c] - h.value(i)[c]) / dt;
                }
            }
            Ok((hdot, vec![0.0; knots * n]))
        }
        Provenance::HatOfDeterministic { base } => {
            let ric = path.model.ricci_matrix();
            let mut rw = vec![0.0; n];
            for i in 0..knots - 1 {
                linalg::mat_vec(&ric, n, n, &base[i * n..(i + 1) * n], &mut rw);
                for c in 0..n {
                    hdot[i * n + c] = (base[(i + 1) * n + c] - base[i * n + c]) / dt + rw[c];
                }
            }
            let base_proc =
                AdaptedProcess::from_values(base.clone(), n, dt, Provenance::Deterministic);
            let d = dv_hat_dot(k, &base_proc, path)?;
            Ok((hdot, d))
        }
        Provenance::Pathwise => Err(CoreError::MissingDerivativeOracle),
    }
}

/// Markovian connection `nabla_{Uk} Uh` as a base-frame process:
/// `d/dt U^-1 (nabla_{Uk} Uh) = D_{Uk} h' + A_t(k) h'`. The returned
/// process carries the adapted rate of its hatted version, so divergences
/// of connection fields stay unbiased.
pub fn markovian_connection(
    k: &AdaptedProcess,
    h: &AdaptedProcess,
    path: &FramePath,
) -> Result<AdaptedProcess, CoreError> {
    if !k.is_deterministic() {
        return Err(CoreError::MissingDerivativeOracle);
    }
    let n = path.dim();
    let dt = k.dt;
    let (hdot, dterm) = h_rate_and_derivative(k, h, path)?;
    let a_mats = running_curvature(path, k.values());
    let mut values = integrate_matrix_against(&a_mats, h.values(), n);
    if matches!(h.provenance(), Provenance::HatOfDeterministic { .. }) {
        add_trapezoid_cumsum(&mut values, &dterm, n, dt);
    }
    // Adapted rate of hat(q): q' + Ric q at the left endpoint.
    let ric = path.model.ricci_matrix();
    let knots = h.knots();
    let mut rate = vec![0.0; knots * n];
    let mut ah = vec![0.0; n];
    let mut rq = vec![0.0; n];
    for i in 0..knots {
        linalg::mat_vec(
            &a_mats[i * n * n..(i + 1) * n * n],
            n,
            n,
            &hdot[i * n..(i + 1) * n],
            &mut ah,
        );
        linalg::mat_vec(&ric, n, n, &values[i * n..(i + 1) * n], &mut rq);
        for c in 0..n {
            rate[i * n + c] = ah[c] + dterm[i * n + c] + rq[c];
        }
    }
    Ok(AdaptedProcess {
        dim: n,
        dt,
        values,
        provenance: Provenance::Pathwise,
        hat_rate: Some(rate),
    })
}

/// Cartan connection: fields `phi V` are parallel, so only the derivative
/// of the coefficients survives: `d/dt P (nabla^C_{Uk} Uh) = D_{Uk} h'`.
pub fn cartan_connection(
    k: &AdaptedProcess,
    h: &AdaptedProcess,
    path: &FramePath,
) -> Result<AdaptedProcess, CoreError> {
    if !k.is_deterministic() {
        return Err(CoreError::MissingDerivativeOracle);
    }
    let n = path.dim();
    let dt = k.dt;
    let (_, dterm) = h_rate_and_derivative(k, h, path)?;
    let mut values = vec![0.0; h.values().len()];
    add_trapezoid_cumsum(&mut values, &dterm, n, dt);
    let ric = path.model.ricci_matrix();
    let knots = h.knots();
    let mut rate = vec![0.0; knots * n];
    let mut rq = vec![0.0; n];
    for i in 0..knots {
        linalg::mat_vec(&ric, n, n, &values[i * n..(i + 1) * n], &mut rq);
        for c in 0..n {
            rate[i * n + c] = dterm[i * n + c] + rq[c];
        }
    }
    Ok(AdaptedProcess {
        dim: n,
        dt,
        values,
        provenance: Provenance::Pathwise,
        hat_rate: Some(rate),
    })
}

/// Modified Markovian connection, defined through the hat-map:
/// `hat(nabla-mod_V W) = nabla_V hat(W)`. Since hatting the result recovers
/// the Markovian connection of `hat(W)` exactly, its adapted hat-rate is
/// the raw rate `d/dt [nabla_V hat(W)]` without an extra Ricci term.
pub fn modified_connection(
    v: &AdaptedProcess,
    w: &AdaptedProcess,
    path: &FramePath,
) -> Result<AdaptedProcess, CoreError> {
    if !v.is_deterministic() {
        return Err(CoreError::MissingDerivativeOracle);
    }
    let n = path.dim();
    let dt = v.dt;
    let w_hat = hat(w, path);
    let (hdot, dterm) = h_rate_and_derivative(v, &w_hat, path)?;
    let a_mats = running_curvature(path, v.values());
    let mut q_values = integrate_matrix_against(&a_mats, w_hat.values(), n);
    if matches!(w_hat.provenance(), Provenance::HatOfDeterministic { .. }) {
        add_trapezoid_cumsum(&mut q_values, &dterm, n, dt);
    }
    let knots = w_hat.knots();
    let mut rate = vec![0.0; knots * n];
    let mut ah = vec![0.0; n];
    for i in 0..knots {
        linalg::mat_vec(
            &a_mats[i * n * n..(i + 1) * n * n],
            n,
            n,
            &hdot[i * n..(i + 1) * n],
            &mut ah,
        );
        for c in 0..n {
            rate[i * n + c] = ah[c] + dterm[i * n + c];
        }
    }
    let q = AdaptedProcess {
        dim: n,
        dt,
        values: q_values,
        provenance: Provenance::Pathwise,
        hat_rate: None,
    };
    Ok(hat_inverse(&q, path).with_hat_rate(rate))
}

/// Deterministic process `phi * e_a` for a basis direction.
pub fn basis_process(phi: &crate::pathfunc::PhiProfile, dim: usize, a: usize) -> AdaptedProcess {
    let mut e = vec![0.0; dim];
    e[a] = 1.0;
    AdaptedProcess::from_values(
        phi.times_vector(&e),
        dim,
        phi.grid().dt(),
        Provenance::Deterministic,
    )
}

/// Pathwise squared Cameron-Martin norms of the traced connection fields
/// `sum_a nabla_{V_a} V_a` and `sum_a nabla_{V_a} hat(V_a)` for
/// `V_a = U(phi e_a)`; the Monte Carlo layer averages them.
pub fn error_norms(
    phi: &crate::pathfunc::PhiProfile,
    path: &FramePath,
) -> Result<(f64, f64), CoreError> {
    let n = path.dim();
    let mut sum_plain: Option<AdaptedProcess> = None;
    let mut sum_hat: Option<AdaptedProcess> = None;
    for a in 0..n {
        let va = basis_process(phi, n, a);
        let plain = markovian_connection(&va, &va, path)?;
        let hat_of = hat(&va, path);
        let hatted = markovian_connection(&va, &hat_of, path)?;
        sum_plain = Some(match sum_plain {
            None => plain,
            Some(acc) => acc.add(&plain),
        });
        sum_hat = Some(match sum_hat {
            None => hatted,
            Some(acc) => acc.add(&hatted),
        });
    }
    Ok((sum_plain.unwrap().h_norm_sq(), sum_hat.unwrap().h_norm_sq()))
}

fn add_trapezoid_cumsum(values: &mut [f64], rate: &[f64], n: usize, dt: f64) {
    let knots = values.len() / n;
    let mut acc = vec![0.0; n];
    for i in 0..knots - 1 {
        for c in 0..n {
            acc[c] += 0.5 * dt * (rate[i * n + c] + rate[(i + 1) * n + c]);
            values[(i + 1) * n + c] += acc[c];
        }
    }
}
