use super::matrix::{norm2, DenseMatrix};
use super::sampler::GaussianSampler;

pub fn frobenius_norm(a: &DenseMatrix) -> f64 {
    a.frobenius_norm()
}

/// Power-method estimate of the largest singular value. The start vector is
/// drawn from a fixed-seed sampler, so the estimate is deterministic.
pub fn spectral_norm_est(a: &DenseMatrix, iters: usize) -> f64 {
    let (_, n) = a.shape();
    if a.is_empty() {
        return 0.0;
    }
    let mut x = GaussianSampler::new(0x5eed_5eed).sample(n, 1);
    let mut estimate = 0.0;
    for _ in 0..iters.max(1) {
        let nx = norm2(x.as_slice());
        if nx == 0.0 {
            return 0.0;
        }
        x.scale_in_place(1.0 / nx);
        let y = a.mul(&x);
        estimate = norm2(y.as_slice());
        x = a.tr_mul(&y);
    }
    estimate
}
