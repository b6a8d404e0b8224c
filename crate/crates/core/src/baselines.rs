//! Fixed-sampling-size randomized decompositions used as comparison points.
//!
//! Every method takes the sketch width `d` up front. With `tau > 0` the
//! first sketch is replaced by its subspace-iterated version, with a QR
//! after every multiplication by `A` or `A^T`.

use crate::decomposition::{Algorithm, Decomposition, MiddleShape, Provenance, SizeControl};
use crate::dense::{cpqr_decompose, orth, qr_decompose, svd_small, DenseMatrix, GaussianSampler};
use crate::eod::MAX_TAU;
use crate::error::{LowRankError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaselineConfig {
    pub d: usize,
    pub tau: usize,
    pub seed: u64,
}

impl BaselineConfig {
    pub fn new(d: usize, tau: usize, seed: u64) -> Self {
        BaselineConfig { d, tau, seed }
    }

    fn validate(&self, a: &DenseMatrix) -> Result<()> {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Err(LowRankError::InvalidInput("empty matrix".into()));
        }
        if self.d == 0 || self.d > n {
            return Err(LowRankError::config(format!(
                "sampling size d must lie in 1..={n}, got {}",
                self.d
            )));
        }
        if self.tau > MAX_TAU {
            return Err(LowRankError::config(format!(
                "tau must be at most {MAX_TAU}, got {}",
                self.tau
            )));
        }
        a.ensure_finite("baseline input")
    }

    fn provenance(&self, algorithm: Algorithm) -> Provenance {
        Provenance {
            algorithm,
            size: SizeControl::SamplingSize(self.d),
            tau: self.tau,
            seed: self.seed,
            blocksize: None,
        }
    }
}

/// Orthonormal basis of `(A A^T)^tau A omega`.
fn column_range(a: &DenseMatrix, omega: &DenseMatrix, tau: usize) -> Result<DenseMatrix> {
    let mut q = orth(&a.mul(omega))?;
    for _ in 0..tau {
        let w = orth(&a.tr_mul(&q))?;
        q = orth(&a.mul(&w))?;
    }
    Ok(q)
}

/// Orthonormal basis of `(A^T A)^tau A^T omega`.
fn row_range(a: &DenseMatrix, omega: &DenseMatrix, tau: usize) -> Result<DenseMatrix> {
    let mut q = orth(&a.tr_mul(omega))?;
    for _ in 0..tau {
        let w = orth(&a.mul(&q))?;
        q = orth(&a.tr_mul(&w))?;
    }
    Ok(q)
}

fn assemble(
    u: DenseMatrix,
    d: DenseMatrix,
    v: DenseMatrix,
    shape: MiddleShape,
    provenance: Provenance,
) -> Decomposition {
    Decomposition {
        rank: d.rows(),
        u,
        d,
        v,
        shape,
        provenance,
    }
}

/// Range finder followed by an SVD of the projected matrix `Q^T A`.
pub fn randomized_svd(a: &DenseMatrix, cfg: &BaselineConfig) -> Result<Decomposition> {
    cfg.validate(a)?;
    let mut sampler = GaussianSampler::new(cfg.seed);
    let omega = sampler.sample(a.cols(), cfg.d);
    let q = column_range(a, &omega, cfg.tau)?;
    let f = svd_small(&q.tr_mul(a))?;
    let k = f.sigma.len();
    Ok(assemble(
        q.mul(&f.u),
        DenseMatrix::from_diag(k, k, &f.sigma),
        f.v,
        MiddleShape::Diagonal,
        cfg.provenance(Algorithm::RandomizedSvd),
    ))
}

/// Independent column and row sketches, SVD of the core `Q1^T A Q2`.
pub fn tsr_svd(a: &DenseMatrix, cfg: &BaselineConfig) -> Result<Decomposition> {
    cfg.validate(a)?;
    let (m, n) = a.shape();
    // separate streams keep each sketch a column prefix across d
    let omega1 = GaussianSampler::stream(cfg.seed, 0).sample(n, cfg.d);
    let omega2 = GaussianSampler::stream(cfg.seed, 1).sample(m, cfg.d);
    let q1 = column_range(a, &omega1, cfg.tau)?;
    let q2 = orth(&a.tr_mul(&omega2))?;
    let core = q1.tr_mul(&a.mul(&q2));
    let f = svd_small(&core)?;
    let k = f.sigma.len();
    Ok(assemble(
        q1.mul(&f.u),
        DenseMatrix::from_diag(k, k, &f.sigma),
        q2.mul(&f.v),
        MiddleShape::Diagonal,
        cfg.provenance(Algorithm::TsrSvd),
    ))
}

/// Compressed randomized UTV: the row sketch is `A^T Q1`, and the core is
/// split by column-pivoted QR.
pub fn cor_utv(a: &DenseMatrix, cfg: &BaselineConfig) -> Result<Decomposition> {
    cfg.validate(a)?;
    let omega = GaussianSampler::new(cfg.seed).sample(a.cols(), cfg.d);
    let q1 = column_range(a, &omega, cfg.tau)?;
    let q2 = orth(&a.tr_mul(&q1))?;
    let core = q1.tr_mul(&a.mul(&q2));
    let f = cpqr_decompose(&core)?;
    Ok(assemble(
        q1.mul(&f.q),
        f.r,
        q2.select_columns(&f.perm),
        MiddleShape::Upper,
        cfg.provenance(Algorithm::CorUtv),
    ))
}

/// Row sketch `Omega A`, then two column-pivoted QRs on `C = A Q`.
pub fn rp_tsod(a: &DenseMatrix, cfg: &BaselineConfig) -> Result<Decomposition> {
    cfg.validate(a)?;
    // Omega is d x m; its transpose is drawn directly as m x d
    let omega_t = GaussianSampler::new(cfg.seed).sample(a.rows(), cfg.d);
    let q = row_range(a, &omega_t, cfg.tau)?;
    let c = a.mul(&q);
    let outer = cpqr_decompose(&c)?;
    let inner = cpqr_decompose(&outer.r.transpose())?;
    // C P_bar = Q_bar R_bar and R_bar^T P_hat = Q_hat R_hat give
    // A Q = Q_bar P_hat R_hat^T Q_hat^T P_bar^T
    let u = outer.q.select_columns(&inner.perm);
    let v = q.select_columns(&outer.perm).mul(&inner.q);
    Ok(assemble(
        u,
        inner.r.transpose(),
        v,
        MiddleShape::Lower,
        cfg.provenance(Algorithm::RpTsod),
    ))
}

/// Projection-based partial QLP.
pub fn pbp_qlp(a: &DenseMatrix, cfg: &BaselineConfig) -> Result<Decomposition> {
    cfg.validate(a)?;
    let omega = GaussianSampler::new(cfg.seed).sample(a.rows(), cfg.d);
    let q_tilde = row_range(a, &omega, cfg.tau)?;
    let c = a.mul(&q_tilde);
    let first = qr_decompose(&c)?;
    let second = qr_decompose(&first.r.transpose())?;
    Ok(assemble(
        first.q,
        second.r.transpose(),
        q_tilde.mul(&second.q),
        MiddleShape::Lower,
        cfg.provenance(Algorithm::PbpQlp),
    ))
}

pub fn run_baseline(algorithm: Algorithm, a: &DenseMatrix, cfg: &BaselineConfig) -> Result<Decomposition> {
    match algorithm {
        Algorithm::RandomizedSvd => randomized_svd(a, cfg),
        Algorithm::TsrSvd => tsr_svd(a, cfg),
        Algorithm::CorUtv => cor_utv(a, cfg),
        Algorithm::RpTsod => rp_tsod(a, cfg),
        Algorithm::PbpQlp => pbp_qlp(a, cfg),
        other => Err(LowRankError::config(format!("{other} is not a fixed-size baseline"))),
    }
}
