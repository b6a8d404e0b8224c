//! Blocked randomized range finder with automatic rank detection.
//!
//! Blocks of Gaussian test vectors are applied to `A`, the already accepted
//! basis is projected out, and the block is orthonormalized by Householder
//! QR. The first diagonal entry of a block's `R` that falls below the
//! threshold marks the numerical rank: the columns before it are kept and
//! extraction stops.

use crate::dense::{qr_decompose, DenseMatrix, GaussianSampler};
use crate::error::{LowRankError, Result};

pub const DEFAULT_BLOCKSIZE: usize = 32;

/// How `|R_j(l,l)|` is compared against `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdMode {
    /// Raw diagonal magnitude against `epsilon`.
    #[default]
    Absolute,
    /// Diagonal divided by the largest diagonal seen so far.
    Relative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisConfig {
    pub epsilon: f64,
    pub blocksize: usize,
    pub threshold_mode: ThresholdMode,
    /// Hard cap on the number of basis columns.
    pub max_cols: Option<usize>,
}

impl Default for BasisConfig {
    fn default() -> Self {
        BasisConfig {
            epsilon: 1e-10,
            blocksize: DEFAULT_BLOCKSIZE,
            threshold_mode: ThresholdMode::Absolute,
            max_cols: None,
        }
    }
}

impl BasisConfig {
    pub fn new(epsilon: f64, blocksize: usize) -> Self {
        BasisConfig {
            epsilon,
            blocksize,
            ..Default::default()
        }
    }

    pub fn relative(mut self) -> Self {
        self.threshold_mode = ThresholdMode::Relative;
        self
    }

    pub fn with_max_cols(mut self, max_cols: usize) -> Self {
        self.max_cols = Some(max_cols);
        self
    }

    /// Validates against a matrix with `n` columns.
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(LowRankError::config(format!(
                "epsilon must be positive and finite, got {}",
                self.epsilon
            )));
        }
        if self.blocksize == 0 || self.blocksize > n {
            return Err(LowRankError::config(format!(
                "blocksize must lie in 1..={n}, got {}",
                self.blocksize
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ThresholdHit,
    ExhaustedAllBlocks,
    MaxColsHit,
}

#[derive(Debug, Clone)]
pub struct BasisResult {
    /// `m x r` with orthonormal columns.
    pub q: DenseMatrix,
    pub detected_rank: usize,
    /// Every `|R_j(l,l)|` examined, in order.
    pub r_diagonals: Vec<f64>,
    pub terminated_by: Termination,
}

/// Extracts an orthonormal basis of the numerical range of `a`.
///
/// Each block is projected against the accepted basis twice before its QR;
/// a single pass loses orthogonality once many blocks have accumulated.
/// When `n` is not a multiple of the blocksize the last block is narrower.
pub fn basis_extract(a: &DenseMatrix, sampler: &mut GaussianSampler, cfg: &BasisConfig) -> Result<BasisResult> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(LowRankError::InvalidInput("empty matrix".into()));
    }
    cfg.validate(n)?;
    a.ensure_finite("basis extraction input")?;

    let cap = cfg.max_cols.unwrap_or(usize::MAX);
    let mut q = DenseMatrix::zeros(m, 0);
    let mut r_diagonals = Vec::new();
    let mut largest = 0.0f64;
    let mut start = 0;

    while start < n {
        let width = cfg.blocksize.min(n - start);
        start += width;
        let omega = sampler.sample(n, width);
        let mut y = a.mul(&omega);
        y.project_out(&q);
        y.project_out(&q);
        let block = qr_decompose(&y)?;
        for l in 0..block.r.rows() {
            if q.cols() >= m {
                break;
            }
            if q.cols() >= cap {
                return Ok(finish(q, r_diagonals, Termination::MaxColsHit));
            }
            let diag = block.r[(l, l)].abs();
            r_diagonals.push(diag);
            let test = match cfg.threshold_mode {
                ThresholdMode::Absolute => diag,
                ThresholdMode::Relative => {
                    largest = largest.max(diag);
                    if largest > 0.0 {
                        diag / largest
                    } else {
                        0.0
                    }
                }
            };
            if test < cfg.epsilon {
                return Ok(finish(q, r_diagonals, Termination::ThresholdHit));
            }
            // a column whose diagonal is small next to |y| inherits y's
            // rounding-level overlap with q, amplified by |y| / diag
            let mut v = DenseMatrix::from_columns(m, &[block.q.col(l).to_vec()]);
            v.project_out(&q);
            v.project_out(&q);
            q.push_column(v.scale(1.0 / v.frobenius_norm()).as_slice());
        }
        if q.cols() >= m {
            // range of A is already spanned; further blocks would be noise
            break;
        }
    }
    Ok(finish(q, r_diagonals, Termination::ExhaustedAllBlocks))
}

fn finish(q: DenseMatrix, r_diagonals: Vec<f64>, terminated_by: Termination) -> BasisResult {
    BasisResult {
        detected_rank: q.cols(),
        q,
        r_diagonals,
        terminated_by,
    }
}

/// `||A - Q (Q^T A)||_F` for orthonormal `q`.
pub fn residual_norm(a: &DenseMatrix, q: &DenseMatrix) -> Result<f64> {
    if a.rows() != q.rows() {
        return Err(LowRankError::ShapeMismatch {
            op: "residual_norm",
            left: a.shape(),
            right: q.shape(),
        });
    }
    let mut resid = a.clone();
    resid.project_out(q);
    Ok(resid.frobenius_norm())
}
