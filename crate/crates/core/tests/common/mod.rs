#![allow(dead_code)]

pub mod images;
pub mod laws;

use lowrank::dense::{cpqr_decompose, qr_decompose, svd_small};
use lowrank::matgen::{generate, GeneratedMatrix, SpectrumKind, SpectrumSpec};
use lowrank::{DenseMatrix, GaussianSampler};

pub fn eq7(n: usize, r: usize, seed: u64) -> GeneratedMatrix {
    generate(&SpectrumSpec::strict_rank_deficient(n, r, seed)).unwrap()
}

pub fn family(kind: SpectrumKind, n: usize, seed: u64) -> GeneratedMatrix {
    generate(&SpectrumSpec::new(kind, n, seed)).unwrap()
}

/// Matrices 1 (both noise levels), 2, 3 and 4.
pub fn families() -> Vec<(&'static str, SpectrumKind)> {
    vec![
        ("matrix1_a0.005", SpectrumKind::low_rank_plus_noise(20, 0.005)),
        ("matrix1_a0.02", SpectrumKind::low_rank_plus_noise(20, 0.02)),
        ("matrix2", SpectrumKind::devils_stairs()),
        ("matrix3", SpectrumKind::FastDecay),
        ("matrix4", SpectrumKind::SlowDecay),
    ]
}

pub fn rel_frob(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.sub(b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

/// Largest relative deviation of `est[i]` from `truth[i]` over the first `k`.
pub fn max_rel_dev(est: &[f64], truth: &[f64], k: usize) -> f64 {
    est.iter()
        .zip(truth)
        .take(k)
        .map(|(e, t)| (e - t).abs() / t)
        .fold(0.0, f64::max)
}

/// Shape and entries for one kernel-suite case: both dimensions in 1..=200,
/// entries Gaussian with a seed-dependent scale up to 1e3.
pub fn kernel_input(seed: u64) -> DenseMatrix {
    let mut s = GaussianSampler::new(seed);
    let u = s.uniform(3);
    let m = 1 + (u[0] * 200.0) as usize;
    let n = 1 + (u[1] * 200.0) as usize;
    s.sample(m, n).scale(10f64.powf(3.0 * u[2]))
}

/// QR, CPQR and SVD contracts on one matrix; `Err` names the first breach.
pub fn kernel_contracts(a: &DenseMatrix) -> Result<(), String> {
    let (m, n) = a.shape();
    let tag = |what: &str, v: f64| format!("{m}x{n}: {what} = {v:e}");

    let qr = qr_decompose(a).map_err(|e| e.to_string())?;
    let e = rel_frob(&qr.q.mul(&qr.r), a);
    if e > 1e-12 {
        return Err(tag("QR reconstruction", e));
    }
    let e = qr.q.orthogonality_defect();
    if e > 1e-12 {
        return Err(tag("QR orthogonality", e));
    }
    if qr.r.max_below_diagonal() != 0.0 {
        return Err(tag("QR below-diagonal", qr.r.max_below_diagonal()));
    }
    if let Some(d) = qr.r.diagonal().into_iter().find(|d| *d < 0.0) {
        return Err(tag("negative R diagonal", d));
    }

    let cp = cpqr_decompose(a).map_err(|e| e.to_string())?;
    let e = rel_frob(&cp.q.mul(&cp.r), &a.select_columns(&cp.perm));
    if e > 1e-10 {
        return Err(tag("CPQR reconstruction", e));
    }
    let e = cp.q.orthogonality_defect();
    if e > 1e-12 {
        return Err(tag("CPQR orthogonality", e));
    }
    let diag: Vec<f64> = cp.r.diagonal().iter().map(|d| d.abs()).collect();
    if let Some(w) = diag.windows(2).find(|w| w[1] > w[0]) {
        return Err(tag("CPQR diagonal increase", w[1] - w[0]));
    }

    let svd = svd_small(a).map_err(|e| e.to_string())?;
    let mut us = svd.u.clone();
    us.scale_columns(&svd.sigma);
    let e = rel_frob(&us.mul_tr(&svd.v), a);
    if e > 1e-12 {
        return Err(tag("SVD reconstruction", e));
    }
    let e = svd.u.orthogonality_defect().max(svd.v.orthogonality_defect());
    if e > 1e-12 {
        return Err(tag("SVD orthogonality", e));
    }
    if svd.sigma.windows(2).any(|w| w[1] > w[0]) || svd.sigma.iter().any(|s| *s < 0.0) {
        return Err(format!("{m}x{n}: singular values not sorted non-negative"));
    }
    Ok(())
}
