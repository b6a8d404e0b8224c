//! Householder QR, plain and with Businger–Golub column pivoting.
//!
//! Both factorizations return the economy form and normalize signs so that
//! the diagonal of `R` is non-negative; with that convention the QR of a full
//! column rank matrix is unique, which lets tests compare factors directly.

use super::matrix::{axpy, dot, norm2, DenseMatrix};
use crate::error::{LowRankError, Result};

/// Economy QR factors: `q` is `m x p` with orthonormal columns and `r` is
/// `p x n` upper triangular (square when `m >= n`), `p = min(m, n)`.
#[derive(Debug, Clone)]
pub struct QrFactors {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
}

/// Column-pivoted QR: `a.select_columns(&perm) == q * r`.
#[derive(Debug, Clone)]
pub struct CpqrFactors {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
    /// Column `j` of `A P` is column `perm[j]` of `A`.
    pub perm: Vec<usize>,
}

impl CpqrFactors {
    /// The permutation as an explicit `n x n` matrix `P` with `A P = Q R`.
    pub fn perm_matrix(&self) -> DenseMatrix {
        let n = self.perm.len();
        let mut p = DenseMatrix::zeros(n, n);
        for (j, &src) in self.perm.iter().enumerate() {
            p[(src, j)] = 1.0;
        }
        p
    }
}

fn check_input(a: &DenseMatrix) -> Result<()> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(LowRankError::InvalidInput(format!(
            "QR of an empty {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    a.ensure_finite("QR input")
}

/// Turns `x` into the Householder vector (implicit leading 1) and returns
/// `(tau, beta)` with `(I - tau v v^T) x = beta e_1`.
fn make_reflector(x: &mut [f64]) -> (f64, f64) {
    let alpha = x[0];
    let xnorm = norm2(&x[1..]);
    if xnorm == 0.0 {
        return (0.0, alpha);
    }
    let beta = -alpha.signum() * alpha.hypot(xnorm);
    let tau = (beta - alpha) / beta;
    let inv = 1.0 / (alpha - beta);
    x[1..].iter_mut().for_each(|v| *v *= inv);
    x[0] = beta;
    (tau, beta)
}

/// Applies `I - tau v v^T` to `target`, where `v = [1, v_tail]`.
#[inline]
fn apply_reflector(v_tail: &[f64], tau: f64, target: &mut [f64]) {
    if tau == 0.0 {
        return;
    }
    let (head, tail) = target.split_first_mut().expect("non-empty target");
    let s = tau * (*head + dot(v_tail, tail));
    *head -= s;
    axpy(-s, v_tail, tail);
}

/// Reflectors stored LAPACK-style below the diagonal of `w`.
struct Householder {
    w: DenseMatrix,
    tau: Vec<f64>,
}

impl Householder {
    /// Applies `H_k` (rows `k..`) to column `j > k` of the working matrix.
    fn reflect_column(&mut self, k: usize, j: usize) {
        let m = self.w.rows();
        let data = self.w.as_mut_slice();
        let (left, right) = data.split_at_mut(j * m);
        let v_tail = &left[k * m + k + 1..(k + 1) * m];
        apply_reflector(v_tail, self.tau[k], &mut right[k..m]);
    }

    fn reflect(&mut self, k: usize) -> f64 {
        let m = self.w.rows();
        let (tau, beta) = make_reflector(&mut self.w.col_mut(k)[k..m]);
        self.tau[k] = tau;
        beta
    }

    /// Upper-triangular factor from the first `p` rows.
    fn r_factor(&self) -> DenseMatrix {
        let p = self.tau.len();
        let n = self.w.cols();
        DenseMatrix::from_fn(p, n, |i, j| if i <= j { self.w[(i, j)] } else { 0.0 })
    }

    /// Explicit `m x p` orthonormal factor, accumulated backwards.
    fn q_factor(&self) -> DenseMatrix {
        let m = self.w.rows();
        let p = self.tau.len();
        let mut q = DenseMatrix::zeros(m, p);
        for i in 0..p {
            q[(i, i)] = 1.0;
        }
        for k in (0..p).rev() {
            let v_tail = &self.w.col(k)[k + 1..m];
            let tau = self.tau[k];
            for j in k..p {
                apply_reflector(v_tail, tau, &mut q.col_mut(j)[k..m]);
            }
        }
        q
    }
}

/// Flips signs so every diagonal entry of `r` is non-negative.
fn normalize_signs(q: &mut DenseMatrix, r: &mut DenseMatrix) {
    for k in 0..r.rows().min(r.cols()) {
        if r[(k, k)] < 0.0 {
            for j in k..r.cols() {
                r[(k, j)] = -r[(k, j)];
            }
            q.col_mut(k).iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Economy Householder QR with non-negative `R` diagonal.
pub fn qr_decompose(a: &DenseMatrix) -> Result<QrFactors> {
    check_input(a)?;
    let (m, n) = a.shape();
    let p = m.min(n);
    let mut h = Householder {
        w: a.clone(),
        tau: vec![0.0; p],
    };
    for k in 0..p {
        h.reflect(k);
        for j in (k + 1)..n {
            h.reflect_column(k, j);
        }
    }
    let mut r = h.r_factor();
    let mut q = h.q_factor();
    normalize_signs(&mut q, &mut r);
    Ok(QrFactors { q, r })
}

/// Orthonormal basis of `range(a)` (the `Q` of an economy QR).
pub fn orth(a: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(qr_decompose(a)?.q)
}

/// Column-pivoted Householder QR. At step `k` the remaining column with the
/// largest trailing norm is moved into position `k`, so `|R(k,k)|` is
/// non-increasing. Trailing norms are recomputed rather than downdated.
pub fn cpqr_decompose(a: &DenseMatrix) -> Result<CpqrFactors> {
    check_input(a)?;
    let (m, n) = a.shape();
    let p = m.min(n);
    let mut h = Householder {
        w: a.clone(),
        tau: vec![0.0; p],
    };
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..p {
        let mut best = k;
        let mut best_norm = -1.0;
        for j in k..n {
            let nrm = norm2(&h.w.col(j)[k..m]);
            if nrm > best_norm {
                best_norm = nrm;
                best = j;
            }
        }
        if best != k {
            swap_columns(&mut h.w, k, best);
            perm.swap(k, best);
        }
        h.reflect(k);
        for j in (k + 1)..n {
            h.reflect_column(k, j);
        }
    }
    let mut r = h.r_factor();
    let mut q = h.q_factor();
    normalize_signs(&mut q, &mut r);
    Ok(CpqrFactors { q, r, perm })
}

fn swap_columns(w: &mut DenseMatrix, a: usize, b: usize) {
    let m = w.rows();
    let (lo, hi) = (a.min(b), a.max(b));
    let data = w.as_mut_slice();
    let (left, right) = data.split_at_mut(hi * m);
    left[lo * m..(lo + 1) * m].swap_with_slice(&mut right[..m]);
}
