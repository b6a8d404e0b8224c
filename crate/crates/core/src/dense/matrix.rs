use std::fmt;
use std::ops::{Index, IndexMut, Range};

use crate::error::{LowRankError, Result};

/// Dense real matrix stored column-major.
///
/// Zero-sized shapes are allowed (a rank-0 decomposition carries `m x 0`
/// factors); every other constructor keeps `data.len() == rows * cols`.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Rectangular matrix with `diag` on the main diagonal.
    pub fn from_diag(rows: usize, cols: usize, diag: &[f64]) -> Self {
        assert!(diag.len() <= rows.min(cols), "diagonal longer than matrix");
        let mut m = Self::zeros(rows, cols);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LowRankError::InvalidInput(format!(
                "buffer of length {} cannot hold a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Builds a matrix from row slices; handy for small literals.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n), "ragged rows");
        Self::from_fn(m, n, |i, j| rows[i][j])
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Stacks equally long column vectors side by side.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Self {
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            assert_eq!(c.len(), rows, "column length mismatch");
            data.extend_from_slice(c);
        }
        DenseMatrix {
            rows,
            cols: columns.len(),
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        let m = self.rows;
        &mut self.data[j * m..(j + 1) * m]
    }

    /// Copy of columns `range`.
    pub fn columns(&self, range: Range<usize>) -> DenseMatrix {
        assert!(range.end <= self.cols, "column range out of bounds");
        DenseMatrix {
            rows: self.rows,
            cols: range.len(),
            data: self.data[range.start * self.rows..range.end * self.rows].to_vec(),
        }
    }

    /// Copy of the leading `rows x cols` block.
    pub fn top_left(&self, rows: usize, cols: usize) -> DenseMatrix {
        assert!(rows <= self.rows && cols <= self.cols);
        DenseMatrix::from_fn(rows, cols, |i, j| self[(i, j)])
    }

    /// Columns reordered so that column `j` of the result is column
    /// `order[j]` of `self`.
    pub fn select_columns(&self, order: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(self.rows * order.len());
        for &j in order {
            data.extend_from_slice(self.col(j));
        }
        DenseMatrix {
            rows: self.rows,
            cols: order.len(),
            data,
        }
    }

    /// Appends the columns of `other` on the right.
    pub fn append_columns(&mut self, other: &DenseMatrix) {
        assert_eq!(self.rows, other.rows, "row count mismatch");
        self.data.extend_from_slice(&other.data);
        self.cols += other.cols;
    }

    pub fn push_column(&mut self, column: &[f64]) {
        assert_eq!(self.rows, column.len(), "column length mismatch");
        self.data.extend_from_slice(column);
        self.cols += 1;
    }

    pub fn transpose(&self) -> DenseMatrix {
        let (m, n) = self.shape();
        let mut out = DenseMatrix::zeros(n, m);
        const B: usize = 32;
        for jb in (0..n).step_by(B) {
            for ib in (0..m).step_by(B) {
                for j in jb..(jb + B).min(n) {
                    for i in ib..(ib + B).min(m) {
                        out.data[i * n + j] = self.data[j * m + i];
                    }
                }
            }
        }
        out
    }

    /// `self * rhs`. Panics on inner-dimension mismatch.
    pub fn mul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, rhs.rows, "mul: {:?} x {:?}", self.shape(), rhs.shape());
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        gemm_acc(self, rhs, &mut out);
        out
    }

    /// `self^T * rhs` without forming the transpose.
    pub fn tr_mul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.rows, rhs.rows, "tr_mul: {:?} x {:?}", self.shape(), rhs.shape());
        let (k, n) = (self.cols, rhs.cols);
        let mut out = DenseMatrix::zeros(k, n);
        let mut j = 0;
        while j + 4 <= n {
            let (b0, b1, b2, b3) = (rhs.col(j), rhs.col(j + 1), rhs.col(j + 2), rhs.col(j + 3));
            for i in 0..k {
                let a = self.col(i);
                let d = dot4(a, b0, b1, b2, b3);
                out.data[j * k + i] = d[0];
                out.data[(j + 1) * k + i] = d[1];
                out.data[(j + 2) * k + i] = d[2];
                out.data[(j + 3) * k + i] = d[3];
            }
            j += 4;
        }
        for j in j..n {
            let b = rhs.col(j);
            for i in 0..k {
                out.data[j * k + i] = dot(self.col(i), b);
            }
        }
        out
    }

    /// `self * rhs^T`.
    pub fn mul_tr(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, rhs.cols, "mul_tr: {:?} x {:?}", self.shape(), rhs.shape());
        self.mul(&rhs.transpose())
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub: shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn add(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add: shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn scale_in_place(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    /// Multiplies column `j` by `diag[j]`.
    pub fn scale_columns(&mut self, diag: &[f64]) {
        assert_eq!(diag.len(), self.cols);
        let m = self.rows;
        for (j, &s) in diag.iter().enumerate() {
            self.data[j * m..(j + 1) * m].iter_mut().for_each(|x| *x *= s);
        }
    }

    /// `self -= q * (q^T * self)`, the projection onto the orthogonal
    /// complement of `range(q)` for orthonormal `q`.
    pub fn project_out(&mut self, q: &DenseMatrix) {
        if q.cols == 0 || self.cols == 0 {
            return;
        }
        let coeffs = q.tr_mul(self);
        gemm_acc_scaled(q, &coeffs, self, -1.0);
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub(crate) fn ensure_finite(&self, what: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(LowRankError::InvalidInput(format!(
                "{what} contains non-finite entries"
            )))
        }
    }

    /// `max |Q^T Q - I|`, the orthonormality defect of the columns.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.tr_mul(self);
        let mut worst: f64 = 0.0;
        for j in 0..g.cols {
            for i in 0..g.rows {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Largest magnitude strictly below the main diagonal.
    pub fn max_below_diagonal(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.cols {
            for i in (j + 1)..self.rows {
                worst = worst.max(self[(i, j)].abs());
            }
        }
        worst
    }

    /// Largest magnitude strictly above the main diagonal.
    pub fn max_above_diagonal(&self) -> f64 {
        self.transpose().max_below_diagonal()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        let show_rows = self.rows.min(8);
        let show_cols = self.cols.min(8);
        for i in 0..show_rows {
            write!(f, "  ")?;
            for j in 0..show_cols {
                write!(f, "{:>12.5e} ", self[(i, j)])?;
            }
            if show_cols < self.cols {
                write!(f, "...")?;
            }
            writeln!(f)?;
        }
        if show_rows < self.rows {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
fn dot4(a: &[f64], b0: &[f64], b1: &[f64], b2: &[f64], b3: &[f64]) -> [f64; 4] {
    let n = a.len();
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    let (mut t0, mut t1, mut t2, mut t3) = (0.0, 0.0, 0.0, 0.0);
    let mut i = 0;
    while i + 2 <= n {
        let x = a[i];
        let y = a[i + 1];
        s0 += x * b0[i];
        s1 += x * b1[i];
        s2 += x * b2[i];
        s3 += x * b3[i];
        t0 += y * b0[i + 1];
        t1 += y * b1[i + 1];
        t2 += y * b2[i + 1];
        t3 += y * b3[i + 1];
        i += 2;
    }
    if i < n {
        let x = a[i];
        s0 += x * b0[i];
        s1 += x * b1[i];
        s2 += x * b2[i];
        s3 += x * b3[i];
    }
    [s0 + t0, s1 + t1, s2 + t2, s3 + t3]
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Euclidean norm with scaling to avoid overflow/underflow.
pub(crate) fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let inv = 1.0 / scale;
    let mut acc = [0.0f64; 4];
    let mut chunks = x.chunks_exact(4);
    for c in &mut chunks {
        for k in 0..4 {
            let v = c[k] * inv;
            acc[k] += v * v;
        }
    }
    let mut tail = 0.0;
    for v in chunks.remainder() {
        let v = v * inv;
        tail += v * v;
    }
    scale * ((acc[0] + acc[1]) + (acc[2] + acc[3]) + tail).sqrt()
}

fn gemm_acc(a: &DenseMatrix, b: &DenseMatrix, c: &mut DenseMatrix) {
    gemm_acc_scaled(a, b, c, 1.0);
}

/// `c += alpha * a * b`, blocked over the inner dimension so a panel of `a`
/// stays in cache across groups of four output columns.
fn gemm_acc_scaled(a: &DenseMatrix, b: &DenseMatrix, c: &mut DenseMatrix, alpha: f64) {
    let (m, k) = a.shape();
    let n = b.cols;
    debug_assert_eq!(b.rows, k);
    debug_assert_eq!(c.shape(), (m, n));
    if m == 0 || n == 0 || k == 0 {
        return;
    }
    let panel = (32_768 / m.max(1)).clamp(8, 256);
    for p0 in (0..k).step_by(panel) {
        let p1 = (p0 + panel).min(k);
        let mut j = 0;
        while j + 4 <= n {
            let (left, right) = c.data[j * m..(j + 4) * m].split_at_mut(2 * m);
            let (c0, c1) = left.split_at_mut(m);
            let (c2, c3) = right.split_at_mut(m);
            for p in p0..p1 {
                let ap = &a.data[p * m..(p + 1) * m];
                let w0 = alpha * b.data[j * k + p];
                let w1 = alpha * b.data[(j + 1) * k + p];
                let w2 = alpha * b.data[(j + 2) * k + p];
                let w3 = alpha * b.data[(j + 3) * k + p];
                for i in 0..m {
                    let x = ap[i];
                    c0[i] += w0 * x;
                    c1[i] += w1 * x;
                    c2[i] += w2 * x;
                    c3[i] += w3 * x;
                }
            }
            j += 4;
        }
        for j in j..n {
            let cj = &mut c.data[j * m..(j + 1) * m];
            for p in p0..p1 {
                let w = alpha * b.data[j * k + p];
                if w != 0.0 {
                    axpy(w, &a.data[p * m..(p + 1) * m], cj);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_mul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            (0..a.cols()).map(|p| a[(i, p)] * b[(p, j)]).sum()
        })
    }

    fn lcg_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        DenseMatrix::from_fn(rows, cols, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
    }

    #[test]
    fn products_match_naive_loops() {
        for &(m, k, n) in &[(1, 1, 1), (5, 3, 7), (13, 9, 4), (33, 70, 11), (2, 300, 9)] {
            let a = lcg_matrix(m, k, 1);
            let b = lcg_matrix(k, n, 2);
            let expect = naive_mul(&a, &b);
            assert!(a.mul(&b).sub(&expect).max_abs() < 1e-12);
            let at = a.transpose();
            assert!(at.tr_mul(&b).sub(&expect).max_abs() < 1e-12);
            let bt = b.transpose();
            assert!(a.mul_tr(&bt).sub(&expect).max_abs() < 1e-12);
        }
    }

    #[test]
    fn column_major_layout() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]);
        assert_eq!(m.as_slice(), &[1.0, 3.0, 5.0, 2.0, 4.0, 6.0]);
        assert_eq!(m.col(1), &[2.0, 4.0, 6.0]);
        assert_eq!(m.transpose().shape(), (2, 3));
        assert_eq!(m.transpose()[(1, 2)], 6.0);
    }

    #[test]
    fn buffer_length_is_checked() {
        assert!(DenseMatrix::from_col_major(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn norm2_handles_extreme_scales() {
        let v = [3e200, 4e200];
        assert!((norm2(&v) / 5e200 - 1.0).abs() < 1e-15);
        let w = [3e-200, 4e-200];
        assert!((norm2(&w) / 5e-200 - 1.0).abs() < 1e-15);
        assert_eq!(norm2(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn project_out_removes_range() {
        let q = DenseMatrix::from_rows(&[&[1.0], &[0.0], &[0.0]]);
        let mut y = DenseMatrix::from_rows(&[&[2.0, 1.0], &[3.0, 0.0], &[4.0, 5.0]]);
        y.project_out(&q);
        assert_eq!(y.as_slice(), &[0.0, 3.0, 4.0, 0.0, 0.0, 5.0]);
    }
}
