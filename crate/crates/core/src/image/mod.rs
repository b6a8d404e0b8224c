//! Low-rank reconstruction of grayscale images.
//!
//! Pixels are scaled to `[0, 1]`, the adaptive decomposition runs with a
//! relative threshold (so `epsilon` means the same thing for every image),
//! and the reconstruction is rounded half-to-even and clamped back to 8 bits.

mod pgm;
pub mod synth;

use std::time::Instant;

pub use pgm::{decode_pgm, encode_pgm, read_pgm, write_pgm};

use crate::baselines::{run_baseline, BaselineConfig};
use crate::basis::{BasisConfig, DEFAULT_BLOCKSIZE};
use crate::bench::{reference_svd, rel_err, BenchRecord};
use crate::decomposition::{reconstruct, Algorithm, Decomposition};
use crate::dense::{DenseMatrix, GaussianSampler};
use crate::eod::{eod_abe_power, PowerConfig};
use crate::error::{LowRankError, Result};

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(LowRankError::InvalidInput(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(LowRankError::InvalidInput(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// `height x width` matrix with entries in `[0, 1]`.
    pub fn to_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.height, self.width, |y, x| self.get(x, y) as f64 / 255.0)
    }

    /// Inverse of [`GrayImage::to_matrix`], rounding half-to-even and
    /// clamping to `[0, 255]`.
    pub fn from_matrix(a: &DenseMatrix) -> Result<Self> {
        let (height, width) = a.shape();
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let v = (a[(y, x)] * 255.0).round_ties_even();
                pixels.push(if v.is_nan() { 0 } else { v.clamp(0.0, 255.0) as u8 });
            }
        }
        GrayImage::new(width, height, pixels)
    }
}

/// Peak signal-to-noise ratio in dB; infinite for identical images.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> f64 {
    assert_eq!((a.width, a.height), (b.width, b.height), "psnr needs equal sizes");
    let mse = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .map(|(&p, &q)| (p as f64 - q as f64).powi(2))
        .sum::<f64>()
        / a.pixels.len() as f64;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0f64 * 255.0 / mse).log10()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconReport {
    pub epsilon: f64,
    pub tau: usize,
    /// Detected rank, used as the sampling size for comparisons.
    pub selected_d: usize,
    /// Relative error of the unquantized reconstruction.
    pub rel_err: f64,
    pub psnr: f64,
    pub wall_time_s: f64,
}

fn image_rel_err(a: &DenseMatrix, dec: &Decomposition) -> Result<f64> {
    match rel_err(a, dec) {
        // a black image is reproduced exactly by the empty decomposition
        Err(LowRankError::UndefinedRatio) => Ok(0.0),
        other => other,
    }
}

fn basis_config(epsilon: f64, width: usize) -> BasisConfig {
    BasisConfig::new(epsilon, DEFAULT_BLOCKSIZE.min(width)).relative()
}

pub fn reconstruct_image(img: &GrayImage, epsilon: f64, tau: usize, seed: u64) -> Result<(GrayImage, ReconReport)> {
    let a = img.to_matrix();
    let cfg = basis_config(epsilon, img.width);
    let start = Instant::now();
    let dec = eod_abe_power(&a, &mut GaussianSampler::new(seed), &cfg, PowerConfig::new(tau))?;
    let wall = start.elapsed().as_secs_f64().max(1e-9);
    let out = GrayImage::from_matrix(&reconstruct(&dec)?)?;
    let report = ReconReport {
        epsilon,
        tau,
        selected_d: dec.rank,
        rel_err: image_rel_err(&a, &dec)?,
        psnr: psnr(img, &out),
        wall_time_s: wall,
    };
    Ok((out, report))
}

/// Inclusive `d_min..=d_max` grid with the given step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sweep {
    pub d_min: usize,
    pub d_max: usize,
    pub step: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<usize> {
        (self.d_min..=self.d_max).step_by(self.step.max(1)).collect()
    }
}

impl std::str::FromStr for Sweep {
    type Err = LowRankError;

    /// Parses `d_min:d_max:step`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || LowRankError::config(format!("expected d_min:d_max:step, got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let p = |i: usize| parts[i].trim().parse::<usize>().map_err(|_| bad());
        let sweep = Sweep {
            d_min: p(0)?,
            d_max: p(1)?,
            step: p(2)?,
        };
        if sweep.d_min == 0 || sweep.step == 0 || sweep.d_max < sweep.d_min {
            return Err(bad());
        }
        Ok(sweep)
    }
}

struct Row {
    algorithm: Algorithm,
    d: Option<usize>,
    epsilon: Option<f64>,
    tau: usize,
}

fn image_record(
    img: &GrayImage,
    a: &DenseMatrix,
    seed: u64,
    row: Row,
    run: impl FnOnce() -> Result<Decomposition>,
) -> BenchRecord {
    let start = Instant::now();
    let outcome = run();
    let wall = start.elapsed().as_secs_f64().max(1e-9);
    let mut rec = BenchRecord {
        algorithm: row.algorithm,
        n: img.width.max(img.height),
        r_true: None,
        d: row.d,
        epsilon: row.epsilon,
        tau: row.tau,
        seed,
        rel_err: None,
        wall_time_s: wall,
        detected_rank: None,
        psnr: None,
        status: "ok".into(),
    };
    let scored = outcome.and_then(|dec| {
        let e = image_rel_err(a, &dec)?;
        let out = GrayImage::from_matrix(&reconstruct(&dec)?)?;
        Ok((e, psnr(img, &out), dec.rank))
    });
    match scored {
        Ok((e, p, rank)) => {
            rec.rel_err = Some(e);
            rec.psnr = Some(p);
            if row.algorithm == Algorithm::EodAbe {
                rec.detected_rank = Some(rank);
            }
        }
        Err(e) => rec.status = format!("error: {e}"),
    }
    rec
}

/// Runs the adaptive method to choose `d`, then every baseline and the
/// reference SVD at that `d`, for each `tau`. With a sweep, every method is
/// additionally run at each grid value of `d` (the adaptive method capped
/// at `d` columns).
pub fn compare_methods(
    img: &GrayImage,
    epsilon: f64,
    taus: &[usize],
    seed: u64,
    sweep: Option<Sweep>,
) -> Result<Vec<BenchRecord>> {
    if taus.is_empty() {
        return Err(LowRankError::config("at least one tau is required"));
    }
    let a = img.to_matrix();
    let cfg = basis_config(epsilon, img.width);
    let mut out = Vec::new();
    let mut selected = None;
    for &tau in taus {
        let row = Row {
            algorithm: Algorithm::EodAbe,
            d: None,
            epsilon: Some(epsilon),
            tau,
        };
        let rec = image_record(img, &a, seed, row, || {
            eod_abe_power(&a, &mut GaussianSampler::new(seed), &cfg, PowerConfig::new(tau))
        });
        selected = selected.or(rec.detected_rank);
        out.push(rec);
    }
    let d = selected.ok_or_else(|| LowRankError::InvalidInput("adaptive run failed; no d to compare at".into()))?;
    let mut grid: Vec<(usize, bool)> = vec![(d, false)];
    if let Some(s) = sweep {
        grid.extend(s.values().into_iter().map(|v| (v, true)));
    }
    for (d, swept) in grid {
        for &tau in taus {
            if swept {
                let capped = cfg.clone().with_max_cols(d);
                let row = Row {
                    algorithm: Algorithm::EodAbe,
                    d: Some(d),
                    epsilon: Some(epsilon),
                    tau,
                };
                out.push(image_record(img, &a, seed, row, || {
                    eod_abe_power(&a, &mut GaussianSampler::new(seed), &capped, PowerConfig::new(tau))
                }));
            }
            for alg in Algorithm::BASELINES {
                let row = Row {
                    algorithm: alg,
                    d: Some(d),
                    epsilon: None,
                    tau,
                };
                out.push(image_record(img, &a, seed, row, || {
                    run_baseline(alg, &a, &BaselineConfig::new(d, tau, seed))
                }));
            }
        }
        let row = Row {
            algorithm: Algorithm::ReferenceSvd,
            d: Some(d),
            epsilon: None,
            tau: 0,
        };
        out.push(image_record(img, &a, seed, row, || reference_svd(&a, d)));
    }
    Ok(out)
}
