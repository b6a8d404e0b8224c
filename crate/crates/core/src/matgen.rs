//! Seeded test-matrix families with known spectra.
//!
//! Every family is `U diag(sigma) V^T` with orthonormal `U`, `V` drawn by QR
//! of Gaussian matrices; the low-rank-plus-noise family adds a scaled
//! Gaussian perturbation on top. Specs round-trip through a plain
//! `key = value` text form used by the command line.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::dense::{orth, DenseMatrix, GaussianSampler};
use crate::error::{LowRankError, Result};

/// Where the linear decay of the low-rank-plus-noise spectrum ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearDecay {
    /// Line from 1 at `i = 1` to 1e-25 at `i = n`, truncated after `r`.
    #[default]
    OverOrder,
    /// Line from 1 at `i = 1` to 1e-25 at `i = r`.
    OverRank,
}

/// Normalization of the Gaussian noise term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseScale {
    /// `E / (sqrt(m) + sqrt(n))`, so `||E||_2 ~ 1` and the spectral gap at
    /// `r` is about `1 / alpha`.
    #[default]
    UnitSpectral,
    /// Raw standard Gaussian entries.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumKind {
    LowRankPlusNoise {
        r: usize,
        alpha_noise: f64,
        decay: LinearDecay,
        noise: NoiseScale,
    },
    /// Flat steps of `step_len` equal values, each `10^-step_decades` below
    /// the previous one.
    DevilsStairs { step_len: usize, step_decades: f64 },
    /// `sigma_i = exp(-i / 6)`.
    FastDecay,
    /// `sigma_i = i^-2`.
    SlowDecay,
    /// `r` sorted Uniform(0, 1) values, zero beyond.
    StrictRankDeficient { r: usize },
}

impl SpectrumKind {
    pub fn low_rank_plus_noise(r: usize, alpha_noise: f64) -> Self {
        SpectrumKind::LowRankPlusNoise {
            r,
            alpha_noise,
            decay: LinearDecay::default(),
            noise: NoiseScale::default(),
        }
    }

    pub fn devils_stairs() -> Self {
        SpectrumKind::DevilsStairs {
            step_len: 15,
            step_decades: 0.6,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SpectrumKind::LowRankPlusNoise { .. } => "low_rank_plus_noise",
            SpectrumKind::DevilsStairs { .. } => "devils_stairs",
            SpectrumKind::FastDecay => "fast_decay",
            SpectrumKind::SlowDecay => "slow_decay",
            SpectrumKind::StrictRankDeficient { .. } => "strict_rank_deficient",
        }
    }
}

impl FromStr for SpectrumKind {
    type Err = LowRankError;

    /// Parses a family name with its default parameters.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "low_rank_plus_noise" => SpectrumKind::low_rank_plus_noise(20, 0.005),
            "devils_stairs" => SpectrumKind::devils_stairs(),
            "fast_decay" => SpectrumKind::FastDecay,
            "slow_decay" => SpectrumKind::SlowDecay,
            "strict_rank_deficient" => SpectrumKind::StrictRankDeficient { r: 0 },
            other => return Err(LowRankError::config(format!("unknown matrix family '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSpec {
    pub kind: SpectrumKind,
    pub n: usize,
    pub seed: u64,
}

impl SpectrumSpec {
    pub fn new(kind: SpectrumKind, n: usize, seed: u64) -> Self {
        SpectrumSpec { kind, n, seed }
    }

    pub fn strict_rank_deficient(n: usize, r: usize, seed: u64) -> Self {
        SpectrumSpec::new(SpectrumKind::StrictRankDeficient { r }, n, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(LowRankError::config(format!("n must be at least 4, got {}", self.n)));
        }
        let check_r = |r: usize| {
            if r == 0 || r > self.n {
                Err(LowRankError::config(format!(
                    "rank r must lie in 1..={}, got {r}",
                    self.n
                )))
            } else {
                Ok(())
            }
        };
        match self.kind {
            SpectrumKind::LowRankPlusNoise { r, alpha_noise, .. } => {
                check_r(r)?;
                if !(alpha_noise >= 0.0 && alpha_noise.is_finite()) {
                    return Err(LowRankError::config(format!(
                        "alpha_noise must be finite and non-negative, got {alpha_noise}"
                    )));
                }
            }
            SpectrumKind::DevilsStairs { step_len, step_decades } => {
                if step_len == 0 {
                    return Err(LowRankError::config("step_len must be positive"));
                }
                if !(step_decades >= 0.0 && step_decades.is_finite()) {
                    return Err(LowRankError::config(format!(
                        "step_decades must be finite and non-negative, got {step_decades}"
                    )));
                }
            }
            SpectrumKind::StrictRankDeficient { r } => check_r(r)?,
            SpectrumKind::FastDecay | SpectrumKind::SlowDecay => {}
        }
        Ok(())
    }

    /// Noiseless singular values, length `n`, non-increasing.
    pub fn spectrum(&self) -> Vec<f64> {
        let n = self.n;
        match self.kind {
            SpectrumKind::LowRankPlusNoise { r, decay, .. } => {
                let end = match decay {
                    LinearDecay::OverOrder => n,
                    LinearDecay::OverRank => r,
                };
                let slope = if end > 1 { (1.0 - 1e-25) / (end - 1) as f64 } else { 0.0 };
                (0..n)
                    .map(|i| if i < r { 1.0 - i as f64 * slope } else { 0.0 })
                    .collect()
            }
            SpectrumKind::DevilsStairs { step_len, step_decades } => (0..n)
                .map(|i| 10f64.powf(-step_decades * (i / step_len) as f64))
                .collect(),
            SpectrumKind::FastDecay => (1..=n).map(|i| (-(i as f64) / 6.0).exp()).collect(),
            SpectrumKind::SlowDecay => (1..=n).map(|i| (i as f64).powi(-2)).collect(),
            // random values are drawn in `generate`
            SpectrumKind::StrictRankDeficient { .. } => vec![0.0; n],
        }
    }

    /// Serializes as `key = value` lines.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kind = {}", self.kind.name());
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "seed = {}", self.seed);
        match self.kind {
            SpectrumKind::LowRankPlusNoise {
                r,
                alpha_noise,
                decay,
                noise,
            } => {
                let _ = writeln!(out, "r = {r}");
                let _ = writeln!(out, "alpha_noise = {alpha_noise:?}");
                let decay = match decay {
                    LinearDecay::OverOrder => "order",
                    LinearDecay::OverRank => "rank",
                };
                let _ = writeln!(out, "linear_decay = {decay}");
                let noise = match noise {
                    NoiseScale::UnitSpectral => "unit_spectral",
                    NoiseScale::Raw => "raw",
                };
                let _ = writeln!(out, "noise_scale = {noise}");
            }
            SpectrumKind::DevilsStairs { step_len, step_decades } => {
                let _ = writeln!(out, "step_len = {step_len}");
                let _ = writeln!(out, "step_decades = {step_decades:?}");
            }
            SpectrumKind::StrictRankDeficient { r } => {
                let _ = writeln!(out, "r = {r}");
            }
            SpectrumKind::FastDecay | SpectrumKind::SlowDecay => {}
        }
        out
    }

    /// Parses the `key = value` form. Blank lines and `#` comments are
    /// ignored; keys not given take the family defaults.
    pub fn from_config(text: &str) -> Result<SpectrumSpec> {
        let mut kind = None;
        let mut n = None;
        let mut seed = 0u64;
        let mut extra = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| LowRankError::config(format!("line {}: expected key = value", lineno + 1)))?;
            match key {
                "kind" => kind = Some(value.parse::<SpectrumKind>()?),
                "n" => n = Some(parse_value(key, value)?),
                "seed" => seed = parse_value(key, value)?,
                _ => extra.push((key.to_string(), value.to_string())),
            }
        }
        let mut kind = kind.ok_or_else(|| LowRankError::config("missing key 'kind'"))?;
        let n = n.ok_or_else(|| LowRankError::config("missing key 'n'"))?;
        for (key, value) in &extra {
            apply_key(&mut kind, key, value)?;
        }
        let spec = SpectrumSpec { kind, n, seed };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| LowRankError::config(format!("bad value '{value}' for '{key}'")))
}

fn apply_key(kind: &mut SpectrumKind, key: &str, value: &str) -> Result<()> {
    let family = kind.name();
    let unknown = || LowRankError::config(format!("key '{key}' does not apply to {family}"));
    match kind {
        SpectrumKind::LowRankPlusNoise {
            r,
            alpha_noise,
            decay,
            noise,
        } => match key {
            "r" => *r = parse_value(key, value)?,
            "alpha_noise" => *alpha_noise = parse_value(key, value)?,
            "linear_decay" => {
                *decay = match value {
                    "order" => LinearDecay::OverOrder,
                    "rank" => LinearDecay::OverRank,
                    _ => return Err(LowRankError::config(format!("bad linear_decay '{value}'"))),
                }
            }
            "noise_scale" => {
                *noise = match value {
                    "unit_spectral" => NoiseScale::UnitSpectral,
                    "raw" => NoiseScale::Raw,
                    _ => return Err(LowRankError::config(format!("bad noise_scale '{value}'"))),
                }
            }
            _ => return Err(unknown()),
        },
        SpectrumKind::DevilsStairs { step_len, step_decades } => match key {
            "step_len" => *step_len = parse_value(key, value)?,
            "step_decades" => *step_decades = parse_value(key, value)?,
            _ => return Err(unknown()),
        },
        SpectrumKind::StrictRankDeficient { r } => match key {
            "r" => *r = parse_value(key, value)?,
            _ => return Err(unknown()),
        },
        SpectrumKind::FastDecay | SpectrumKind::SlowDecay => return Err(unknown()),
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct GeneratedMatrix {
    pub a: DenseMatrix,
    /// Singular values of the noiseless part, length `n`.
    pub true_sigma: Vec<f64>,
    /// Exact rank, or `None` when noise makes it only numerical.
    pub true_rank: Option<usize>,
    /// Left singular vectors of the noiseless part (`n x k`).
    pub left: DenseMatrix,
    /// Right singular vectors of the noiseless part (`n x k`).
    pub right: DenseMatrix,
}

// kept apart from stream 0, which algorithm samplers seeded alike draw from
const STREAM_BASE: u64 = 0x6d61_7467 << 32;
const STREAM_U: u64 = STREAM_BASE;
const STREAM_V: u64 = STREAM_BASE + 1;
const STREAM_NOISE: u64 = STREAM_BASE + 2;
const STREAM_SIGMA: u64 = STREAM_BASE + 3;

pub fn generate(spec: &SpectrumSpec) -> Result<GeneratedMatrix> {
    spec.validate()?;
    let n = spec.n;
    let mut sigma = spec.spectrum();
    // only the columns carrying nonzero singular values are materialized
    let k = match spec.kind {
        SpectrumKind::LowRankPlusNoise { r, .. } | SpectrumKind::StrictRankDeficient { r } => r,
        _ => n,
    };
    if let SpectrumKind::StrictRankDeficient { r } = spec.kind {
        let mut draws: Vec<f64> = GaussianSampler::stream(spec.seed, STREAM_SIGMA)
            .uniform(r)
            .into_iter()
            .map(|u| 1.0 - u) // (0, 1]
            .collect();
        draws.sort_by(|a, b| b.total_cmp(a));
        sigma[..r].copy_from_slice(&draws);
    }
    let left = orth(&GaussianSampler::stream(spec.seed, STREAM_U).sample(n, k))?;
    let right = orth(&GaussianSampler::stream(spec.seed, STREAM_V).sample(n, k))?;
    let mut scaled = left.clone();
    scaled.scale_columns(&sigma[..k]);
    let mut a = scaled.mul_tr(&right);

    let true_rank = match spec.kind {
        SpectrumKind::LowRankPlusNoise {
            r, alpha_noise, noise, ..
        } => {
            let mut e = GaussianSampler::stream(spec.seed, STREAM_NOISE).sample(n, n);
            let norm = match noise {
                NoiseScale::UnitSpectral => 2.0 * (n as f64).sqrt(),
                NoiseScale::Raw => 1.0,
            };
            e.scale_in_place(alpha_noise * sigma[r - 1] / norm);
            a = a.add(&e);
            if alpha_noise == 0.0 {
                Some(r)
            } else {
                None
            }
        }
        SpectrumKind::StrictRankDeficient { r } => Some(r),
        _ => Some(n),
    };
    Ok(GeneratedMatrix {
        a,
        true_sigma: sigma,
        true_rank,
        left,
        right,
    })
}
