//! Small dense linear algebra for the normal-equation solves in this crate.
//!
//! Systems here are symmetric positive semi-definite Gram matrices of side
//! `d + 1` for desk-scale `d`, so a pivoted LU solve covers the regular case
//! and a Jacobi eigendecomposition provides the pseudo-inverse (minimum-norm)
//! fallback for singular systems. Everything is deterministic.

// Index loops below mirror textbook matrix notation; iterator forms obscure
// the row/column symmetry.
#![allow(clippy::needless_range_loop)]

/// Solves `A x = b` by LU with partial pivoting. Returns `None` when a pivot
/// falls below `rel_tol` times the largest absolute entry of `A`, which the
/// callers treat as "singular, use the pseudo-inverse".
pub(crate) fn solve_lu(a: &[Vec<f64>], b: &[f64], rel_tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let floor = rel_tol * scale;

    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut x: Vec<f64> = b.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[pivot_row][col].abs() <= floor {
            return None;
        }
        m.swap(col, pivot_row);
        x.swap(col, pivot_row);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        x[col] /= m[col][col];
        for row in 0..col {
            let f = m[row][col];
            x[row] -= f * x[col];
        }
    }
    Some(x)
}

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns:
/// `A = V diag(w) V^T`. Deterministic; converges quadratically for the small
/// matrices used here.
pub(crate) fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let off = |m: &[Vec<f64>]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += m[i][j] * m[i][j];
            }
        }
        s
    };
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        if off(&m) <= (1e-30 * scale * scale).max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let w: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    (w, v)
}

/// Minimum-norm solution of the symmetric PSD system `A x = b` via the
/// eigendecomposition pseudo-inverse: eigenvalues below `rel_tol` times the
/// largest eigenvalue magnitude are treated as zero.
pub(crate) fn pinv_solve_symmetric(a: &[Vec<f64>], b: &[f64], rel_tol: f64) -> Vec<f64> {
    let n = b.len();
    let (w, v) = jacobi_eigen(a);
    let wmax = w.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let cut = rel_tol * wmax;
    // x = V diag(1/w) V^T b, skipping near-zero eigenvalues.
    let mut vtb = vec![0.0; n];
    for (j, vtb_j) in vtb.iter_mut().enumerate() {
        for i in 0..n {
            *vtb_j += v[i][j] * b[i];
        }
    }
    let mut x = vec![0.0; n];
    for j in 0..n {
        if w[j].abs() <= cut || wmax == 0.0 {
            continue;
        }
        let f = vtb[j] / w[j];
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += v[i][j] * f;
        }
    }
    x
}
