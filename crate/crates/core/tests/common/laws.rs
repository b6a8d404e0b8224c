//! Subspace and rank laws of blocked basis extraction.

use lowrank::dense::{max_principal_angle, numerical_rank, qr_decompose, singular_values};
use lowrank::matgen::SpectrumKind;
use lowrank::{basis_extract, residual_norm, BasisConfig, DenseMatrix, GaussianSampler, Termination};

use super::{eq7, family};

type Check = Result<(), String>;

/// The concatenated Gaussian blocks a sampler seeded alike would hand out.
fn stacked_omega(seed: u64, n: usize, k: usize) -> DenseMatrix {
    let mut s = GaussianSampler::new(seed);
    let mut omega = DenseMatrix::zeros(n, 0);
    let mut start = 0;
    while start < n {
        let w = k.min(n - start);
        omega.append_columns(&s.sample(n, w));
        start += w;
    }
    omega
}

/// Spans after every block boundary agree with one QR of `A [Omega_1 .. Omega_j]`.
pub fn block_equivalence() -> Check {
    for (seed, m, n, k) in [(1u64, 64, 64, 8), (2, 60, 48, 10), (3, 50, 45, 16), (4, 64, 40, 7)] {
        let a = GaussianSampler::new(100 + seed).sample(m, n);
        let res = basis_extract(&a, &mut GaussianSampler::new(seed), &BasisConfig::new(1e-12, k)).unwrap();
        if res.detected_rank != n.min(m) {
            return Err(format!("seed {seed}: rank {} of full-rank {m}x{n}", res.detected_rank));
        }
        let mono = qr_decompose(&a.mul(&stacked_omega(seed, n, k))).unwrap().q;
        let mut j = k;
        while j < res.detected_rank {
            let angle = max_principal_angle(&res.q.columns(0..j), &mono.columns(0..j)).unwrap();
            if angle > 1e-8 {
                return Err(format!("seed {seed}, {j} columns: angle {angle:e}"));
            }
            j += k;
        }
    }
    Ok(())
}

/// `rank(A Omega[:, :l]) = min(r, l)` for `l` in `{r/2, r, r+10}`.
pub fn rank_law(seeds: u64) -> Check {
    let (n, r) = (120, 30);
    for seed in 1..=seeds {
        let a = eq7(n, r, seed).a;
        let omega = GaussianSampler::new(seed + 1000).sample(n, r + 10);
        for l in [r / 2, r, r + 10] {
            let sigma = singular_values(&a.mul(&omega.columns(0..l))).unwrap();
            let rank = numerical_rank(&sigma, 1e-10 * sigma[0]);
            if rank != l.min(r) {
                return Err(format!("seed {seed}, l {l}: rank {rank}"));
            }
        }
    }
    Ok(())
}

/// Sketch QR diagonals beyond the rank vanish to `1e-9 sigma_1`.
pub fn diagonal_zero_law(seeds: u64) -> Check {
    let (n, r, l) = (120, 30, 45);
    for seed in 1..=seeds {
        let a = eq7(n, r, seed).a;
        let sigma1 = singular_values(&a).unwrap()[0];
        let qr = qr_decompose(&a.mul(&GaussianSampler::new(seed).sample(n, l))).unwrap();
        for i in r..l {
            let d = qr.r[(i, i)].abs();
            if d > 1e-9 * sigma1 {
                return Err(format!("seed {seed}: |R({i},{i})| = {d:e}"));
            }
        }
    }
    Ok(())
}

/// Residual never grows as blocks are appended.
pub fn monotone_residual() -> Check {
    for seed in 1..=5u64 {
        let a = family(SpectrumKind::FastDecay, 150, seed).a;
        let k = 10;
        let res = basis_extract(&a, &mut GaussianSampler::new(seed), &BasisConfig::new(1e-12, k)).unwrap();
        let mut last = a.frobenius_norm();
        let mut j = k;
        while j <= res.detected_rank {
            let now = residual_norm(&a, &res.q.columns(0..j)).unwrap();
            if now > last {
                return Err(format!("seed {seed}, {j} columns: {now:e} > {last:e}"));
            }
            last = now;
            j += k;
        }
    }
    Ok(())
}

/// A second extraction on the projected residual finds nothing.
pub fn idempotent_extension() -> Check {
    let eps = 1e-10;
    for seed in 1..=10u64 {
        let a = eq7(100, 25, seed).a;
        let first = basis_extract(&a, &mut GaussianSampler::new(seed), &BasisConfig::new(eps, 8)).unwrap();
        if first.terminated_by != Termination::ThresholdHit {
            return Err(format!("seed {seed}: first pass ended by {:?}", first.terminated_by));
        }
        let stop = *first.r_diagonals.last().unwrap();
        let kept = first.r_diagonals[..first.detected_rank]
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if stop * 10.0 > eps || kept < 10.0 * eps {
            return Err(format!(
                "seed {seed}: no 10x margin around eps (stop {stop:e}, kept {kept:e})"
            ));
        }
        let mut resid = a.clone();
        resid.project_out(&first.q);
        resid.project_out(&first.q);
        let again = basis_extract(&resid, &mut GaussianSampler::new(seed + 1), &BasisConfig::new(eps, 8)).unwrap();
        if again.detected_rank != 0 {
            return Err(format!("seed {seed}: second pass found rank {}", again.detected_rank));
        }
    }
    Ok(())
}
