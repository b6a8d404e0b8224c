//! Orthogonal decomposition from an extracted basis.
//!
//! Given orthonormal `Q0` with `A ~ Q0 Q0^T A`, two QR factorizations turn
//! the projection into `U D V^T`:
//!
//! ```text
//! C = Q0^T A,   C^T = Q R,   R^T = Q^ R^,   U = Q0 Q^,  D = R^,  V = Q
//! ```
//!
//! which is an exact refactoring of `Q0 Q0^T A` with upper-triangular `D`.

use crate::basis::{basis_extract, BasisConfig, BasisResult};
use crate::decomposition::{Algorithm, Decomposition, MiddleShape, Provenance, SizeControl};
use crate::dense::{orth, qr_decompose, DenseMatrix, GaussianSampler};
use crate::error::{LowRankError, Result};

pub const MAX_TAU: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PowerConfig {
    pub tau: usize,
}

impl PowerConfig {
    pub fn new(tau: usize) -> Self {
        PowerConfig { tau }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau > MAX_TAU {
            return Err(LowRankError::config(format!(
                "tau must be at most {MAX_TAU}, got {}",
                self.tau
            )));
        }
        Ok(())
    }
}

/// Refactors `Q0 Q0^T A` as `U D V^T`. A basis with no columns yields a
/// rank-0 decomposition with empty factors.
pub fn decompose_from_basis(a: &DenseMatrix, q0: &DenseMatrix, provenance: Provenance) -> Result<Decomposition> {
    let (m, n) = a.shape();
    if q0.rows() != m {
        return Err(LowRankError::ShapeMismatch {
            op: "decompose_from_basis",
            left: a.shape(),
            right: q0.shape(),
        });
    }
    let r = q0.cols();
    if r == 0 {
        return Ok(Decomposition {
            u: DenseMatrix::zeros(m, 0),
            d: DenseMatrix::zeros(0, 0),
            v: DenseMatrix::zeros(n, 0),
            rank: 0,
            shape: MiddleShape::Upper,
            provenance,
        });
    }
    if r > n {
        return Err(LowRankError::InvalidInput(format!(
            "basis has {r} columns but the matrix only {n}"
        )));
    }
    // C^T = A^T Q0, formed directly
    let ct = a.tr_mul(q0);
    let first = qr_decompose(&ct)?;
    let second = qr_decompose(&first.r.transpose())?;
    let dec = Decomposition {
        u: q0.mul(&second.q),
        d: second.r,
        v: first.q,
        rank: r,
        shape: MiddleShape::Upper,
        provenance,
    };
    #[cfg(debug_assertions)]
    check::refactoring(a, q0, &dec);
    Ok(dec)
}

/// Debug-build verification that every decomposition is an exact
/// refactoring of its projection.
#[doc(hidden)]
pub mod check {
    use std::cell::Cell;
    use std::sync::atomic::{AtomicUsize, Ordering};

    use super::*;

    pub const TOLERANCE: f64 = 1e-12;

    static PERFORMED: AtomicUsize = AtomicUsize::new(0);

    thread_local! {
        static ENABLED: Cell<bool> = const { Cell::new(true) };
    }

    /// Number of refactoring checks run so far in this process.
    pub fn performed() -> usize {
        PERFORMED.load(Ordering::Relaxed)
    }

    /// Runs `f` on this thread without the check, for timing measurements.
    pub fn suspended<T>(f: impl FnOnce() -> T) -> T {
        let before = ENABLED.with(|e| e.replace(false));
        let out = f();
        ENABLED.with(|e| e.set(before));
        out
    }

    pub(crate) fn refactoring(a: &DenseMatrix, q0: &DenseMatrix, dec: &Decomposition) {
        if !ENABLED.with(Cell::get) {
            return;
        }
        let gap = refactoring_gap(a, q0, dec).expect("factor shapes are consistent");
        let bound = TOLERANCE * a.frobenius_norm();
        assert!(
            gap <= bound,
            "UDV^T differs from Q0 Q0^T A by {gap:e} (limit {bound:e})"
        );
        PERFORMED.fetch_add(1, Ordering::Relaxed);
    }
}

/// `||U D V^T - Q0 (Q0^T A)||_F`: zero up to rounding for decompositions
/// built by [`decompose_from_basis`].
pub fn refactoring_gap(a: &DenseMatrix, q0: &DenseMatrix, dec: &Decomposition) -> Result<f64> {
    let approx = crate::decomposition::reconstruct(dec)?;
    let projected = q0.mul(&q0.tr_mul(a));
    if approx.shape() != projected.shape() {
        return Err(LowRankError::ShapeMismatch {
            op: "refactoring_gap",
            left: approx.shape(),
            right: projected.shape(),
        });
    }
    Ok(approx.sub(&projected).frobenius_norm())
}

/// Basis extraction followed by `tau` rounds of re-orthogonalized subspace
/// iteration. The rank is fixed by the initial extraction; the iterations
/// only rotate the basis toward the dominant singular subspace.
pub fn power_basis(
    a: &DenseMatrix,
    sampler: &mut GaussianSampler,
    cfg: &BasisConfig,
    p: PowerConfig,
) -> Result<BasisResult> {
    p.validate()?;
    let mut res = basis_extract(a, sampler, cfg)?;
    if res.detected_rank == 0 {
        return Ok(res);
    }
    for _ in 0..p.tau {
        let q_tilde = orth(&a.tr_mul(&res.q))?;
        res.q = orth(&a.mul(&q_tilde))?;
    }
    Ok(res)
}

fn provenance(sampler: &GaussianSampler, cfg: &BasisConfig, tau: usize) -> Provenance {
    Provenance {
        algorithm: Algorithm::EodAbe,
        size: SizeControl::Epsilon(cfg.epsilon),
        tau,
        seed: sampler.seed(),
        blocksize: Some(cfg.blocksize),
    }
}

pub fn eod_abe(a: &DenseMatrix, sampler: &mut GaussianSampler, cfg: &BasisConfig) -> Result<Decomposition> {
    Ok(eod_abe_with_basis(a, sampler, cfg)?.0)
}

/// Like [`eod_abe`], also returning the extracted basis.
pub fn eod_abe_with_basis(
    a: &DenseMatrix,
    sampler: &mut GaussianSampler,
    cfg: &BasisConfig,
) -> Result<(Decomposition, BasisResult)> {
    eod_abe_power_with_basis(a, sampler, cfg, PowerConfig::default())
}

pub fn eod_abe_power(
    a: &DenseMatrix,
    sampler: &mut GaussianSampler,
    cfg: &BasisConfig,
    p: PowerConfig,
) -> Result<Decomposition> {
    Ok(eod_abe_power_with_basis(a, sampler, cfg, p)?.0)
}

pub fn eod_abe_power_with_basis(
    a: &DenseMatrix,
    sampler: &mut GaussianSampler,
    cfg: &BasisConfig,
    p: PowerConfig,
) -> Result<(Decomposition, BasisResult)> {
    let prov = provenance(sampler, cfg, p.tau);
    let basis = power_basis(a, sampler, cfg, p)?;
    let dec = decompose_from_basis(a, &basis.q, prov)?;
    Ok((dec, basis))
}
