//! Dense column-major storage and the numerical kernels built on it.

mod matrix;
mod norms;
mod qr;
mod sampler;
mod svd;

pub use matrix::DenseMatrix;
pub use norms::{frobenius_norm, spectral_norm_est};
pub use qr::{cpqr_decompose, orth, qr_decompose, CpqrFactors, QrFactors};
pub use sampler::{sample_gaussian, GaussianSampler};
pub use svd::{numerical_rank, singular_values, svd_small, svd_small_with_cap, SvdFactors, SMALL_SVD_CAP};

/// Largest principal angle (radians) between `range(a)` and `range(b)` for
/// matrices with orthonormal columns.
pub fn max_principal_angle(a: &DenseMatrix, b: &DenseMatrix) -> crate::Result<f64> {
    let k = a.cols().min(b.cols());
    if k == 0 {
        return Ok(0.0);
    }
    let cosines = singular_values(&a.tr_mul(b))?;
    let smallest = cosines[k - 1].clamp(-1.0, 1.0);
    // sin form is accurate for small angles
    let mut resid = b.clone();
    resid.project_out(a);
    resid.project_out(a);
    let sines = singular_values(&resid)?;
    let s = sines[0].min(1.0);
    Ok(if smallest > 0.7 { s.asin() } else { smallest.acos() })
}
