//! Dense helpers for the tiny vectors and matrices of the frame calculus.
//!
//! Manifold dimensions in the catalog are at most 4 (ambient at most 6 for
//! products), so everything here is written for clarity over blocking.
//! Matrices are row-major slices; orthonormal frames are stored column-major
//! as `amb * n` slices (column `a` is the ambient representation of the
//! frame vector `u e_a`).

use alloc::vec;
use alloc::vec::Vec;

/// Euclidean dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for i in 0..x.len() {
        y[i] += alpha * x[i];
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    for v in x.iter_mut() {
        *v *= alpha;
    }
}

/// Row-major matrix-vector product: `out = A x` with `A` of shape `rows x cols`.
pub fn mat_vec(a: &[f64], rows: usize, cols: usize, x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(a.len(), rows * cols);
    debug_assert_eq!(x.len(), cols);
    debug_assert_eq!(out.len(), rows);
    for r in 0..rows {
        let row = &a[r * cols..(r + 1) * cols];
        out[r] = dot(row, x);
    }
}

/// Row-major product `C = A B`, shapes `(m x k) (k x n)`.
pub fn mat_mul(a: &[f64], b: &[f64], m: usize, k: usize, n: usize, out: &mut [f64]) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), m * n);
    for r in 0..m {
        for c in 0..n {
            let mut s = 0.0;
            for j in 0..k {
                s += a[r * k + j] * b[j * n + c];
            }
            out[r * n + c] = s;
        }
    }
}

/// Apply a column-major frame (`amb x n`) to coefficients: `out = sum_a c[a] * col_a`.
pub fn frame_apply(frame: &[f64], amb: usize, n: usize, coeffs: &[f64], out: &mut [f64]) {
    debug_assert_eq!(frame.len(), amb * n);
    debug_assert_eq!(coeffs.len(), n);
    debug_assert_eq!(out.len(), amb);
    out.fill(0.0);
    for a in 0..n {
        axpy(coeffs[a], &frame[a * amb..(a + 1) * amb], out);
    }
}

/// Solve the small linear system `A x = b` in place by Gaussian elimination
/// with partial pivoting. `A` is row-major `n x n` and is destroyed.
pub fn solve_in_place(a: &mut [f64], b: &mut [f64]) {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if libm::fabs(a[r * n + col]) > libm::fabs(a[piv * n + col]) {
                piv = r;
            }
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= f * a[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for c in col + 1..n {
            s -= a[col * n + c] * b[c];
        }
        b[col] = s / a[col * n + col];
    }
}

/// Maximum absolute deviation of the frame Gram matrix from the identity,
/// under the inner product `g`.
pub fn gram_drift<G: Fn(&[f64], &[f64]) -> f64>(frame: &[f64], amb: usize, n: usize, g: G) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in a..n {
            let v = g(
                &frame[a * amb..(a + 1) * amb],
                &frame[b * amb..(b + 1) * amb],
            );
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max(libm::fabs(v - target));
        }
    }
    worst
}

/// Modified Gram-Schmidt on the frame columns under the inner product `g`.
pub fn orthonormalize<G: Fn(&[f64], &[f64]) -> f64>(frame: &mut [f64], amb: usize, n: usize, g: G) {
    for a in 0..n {
        for b in 0..a {
            let proj = {
                let (head, tail) = frame.split_at(a * amb);
                let col_b = &head[b * amb..(b + 1) * amb];
                let col_a = &tail[..amb];
                g(col_b, col_a)
            };
            let col_b = frame[b * amb..(b + 1) * amb].to_vec();
            axpy(-proj, &col_b, &mut frame[a * amb..(a + 1) * amb]);
        }
        let nrm = {
            let col = &frame[a * amb..(a + 1) * amb];
            libm::sqrt(g(col, col))
        };
        scale(1.0 / nrm, &mut frame[a * amb..(a + 1) * amb]);
    }
}

/// Eigenvalues of a small symmetric matrix by the cyclic Jacobi method.
/// Returns them sorted ascending.
pub fn sym_eigenvalues(m: &[f64], n: usize) -> Vec<f64> {
    debug_assert_eq!(m.len(), n * n);
    let mut a = m.to_vec();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if libm::fabs(apq) < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Identity matrix, row-major.
pub fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}
