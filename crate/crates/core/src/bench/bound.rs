//! Monte Carlo check of the expected-error bound for the powered range
//! finder with `d` samples:
//!
//! ```text
//! E ||A - Q Q^T A||_F <= (1 + r alpha^(2 tau) / (d - r - 1))^(1/2) * tail,
//! alpha = sigma_{r+1} / sigma_r,   tail = (sum_{j>r} sigma_j^2)^(1/2)
//! ```

use crate::basis::{residual_norm, BasisConfig};
use crate::dense::GaussianSampler;
use crate::eod::{power_basis, PowerConfig};
use crate::error::{LowRankError, Result};
use crate::matgen::{generate, SpectrumSpec};

/// Slack on the mean covering Monte Carlo sampling error.
pub const BOUND_SLACK: f64 = 1.05;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub r: usize,
    pub d: usize,
    pub tau: usize,
    pub alpha: f64,
    pub tail_energy: f64,
    pub bound_value: f64,
    pub mean_observed_err: f64,
    pub n_trials: usize,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.mean_observed_err <= BOUND_SLACK * self.bound_value
    }
}

/// The right-hand side of the bound for a given spectrum.
pub fn bound_value(sigma: &[f64], r: usize, d: usize, tau: usize) -> Result<(f64, f64, f64)> {
    if r < 2 || d < r + 2 || d > sigma.len() || r >= sigma.len() {
        return Err(LowRankError::config(format!(
            "bound needs r >= 2 and d - r >= 2 within the spectrum, got r={r}, d={d}, n={}",
            sigma.len()
        )));
    }
    let alpha = sigma[r] / sigma[r - 1];
    let tail = sigma[r..].iter().map(|s| s * s).sum::<f64>().sqrt();
    let factor = 1.0 + r as f64 * alpha.powi(2 * tau as i32) / (d - r - 1) as f64;
    Ok((alpha, tail, factor.sqrt() * tail))
}

/// Averages `||(I - Q Q^T) A||_F` over `n_trials` independent test matrices
/// for one fixed generated `A`; `Q` is the `d`-column powered basis with
/// early stopping disabled.
pub fn check_bound(
    spec: &SpectrumSpec,
    r: usize,
    d: usize,
    tau: usize,
    n_trials: usize,
    seed: u64,
) -> Result<BoundCheck> {
    if n_trials == 0 {
        return Err(LowRankError::config("n_trials must be positive"));
    }
    let g = generate(spec)?;
    let (alpha, tail_energy, bound) = bound_value(&g.true_sigma, r, d, tau)?;
    if tail_energy == 0.0 {
        return Err(LowRankError::config("spectrum has no tail beyond r"));
    }
    // smallest positive threshold: extraction never stops before d columns
    let cfg = BasisConfig::new(f64::MIN_POSITIVE, d).with_max_cols(d);
    let mut total = 0.0;
    for t in 0..n_trials {
        let mut sampler = GaussianSampler::stream(seed, t as u64);
        let basis = power_basis(&g.a, &mut sampler, &cfg, PowerConfig::new(tau))?;
        total += residual_norm(&g.a, &basis.q)?;
    }
    Ok(BoundCheck {
        r,
        d,
        tau,
        alpha,
        tail_energy,
        bound_value: bound,
        mean_observed_err: total / n_trials as f64,
        n_trials,
    })
}
