use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use super::record::{csv_error, rel_err, BenchRecord};
use crate::baselines::{run_baseline, BaselineConfig};
use crate::basis::{BasisConfig, DEFAULT_BLOCKSIZE};
use crate::decomposition::{Algorithm, Decomposition, MiddleShape, Provenance, SizeControl};
use crate::dense::{svd_small, DenseMatrix, GaussianSampler};
use crate::eod::{eod_abe_power, PowerConfig};
use crate::error::{LowRankError, Result};
use crate::matgen::{generate, SpectrumSpec};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "LOWRANK_THREADS";

/// Truncated SVD of `a` at rank `k`, packaged as a decomposition.
pub fn reference_svd(a: &DenseMatrix, k: usize) -> Result<Decomposition> {
    let f = svd_small(a)?;
    let k = k.min(f.sigma.len());
    Ok(Decomposition {
        u: f.u.columns(0..k),
        d: DenseMatrix::from_diag(k, k, &f.sigma[..k]),
        v: f.v.columns(0..k),
        rank: k,
        shape: MiddleShape::Diagonal,
        provenance: Provenance {
            algorithm: Algorithm::ReferenceSvd,
            size: SizeControl::SamplingSize(k),
            tau: 0,
            seed: 0,
            blocksize: None,
        },
    })
}

/// Runs `f` on a pool sized by `LOWRANK_THREADS` (default: all cores).
pub(crate) fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t > 0);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableStudy {
    pub sizes: Vec<usize>,
    pub rank_ratio: f64,
    pub d_ratio: f64,
    pub taus: Vec<usize>,
    pub seeds: Vec<u64>,
    pub epsilon: f64,
    pub blocksize: usize,
}

impl TableStudy {
    pub fn new(sizes: Vec<usize>, rank_ratio: f64, d_ratio: f64, taus: Vec<usize>, seeds: Vec<u64>) -> Self {
        TableStudy {
            sizes,
            rank_ratio,
            d_ratio,
            taus,
            seeds,
            epsilon: 1e-10,
            blocksize: DEFAULT_BLOCKSIZE,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, x) in [("rank_ratio", self.rank_ratio), ("d_ratio", self.d_ratio)] {
            if !(x > 0.0 && x <= 1.0) {
                return Err(LowRankError::config(format!("{name} must lie in (0, 1], got {x}")));
            }
        }
        if self.sizes.is_empty() || self.taus.is_empty() || self.seeds.is_empty() {
            return Err(LowRankError::config("sizes, taus and seeds must be non-empty"));
        }
        Ok(())
    }
}

fn scaled(n: usize, ratio: f64) -> usize {
    ((n as f64 * ratio).round() as usize).clamp(1, n)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    algorithm: Algorithm,
    n: usize,
    r: usize,
    d: usize,
    tau: usize,
    seed: u64,
}

/// Times `run` and turns its outcome into a record.
fn timed(
    cell: &Cell,
    a: &DenseMatrix,
    epsilon: Option<f64>,
    run: impl FnOnce() -> Result<Decomposition>,
) -> BenchRecord {
    let start = Instant::now();
    let outcome = run();
    let wall = start.elapsed().as_secs_f64().max(1e-9);
    let mut rec = BenchRecord {
        algorithm: cell.algorithm,
        n: cell.n,
        r_true: Some(cell.r),
        d: epsilon.is_none().then_some(cell.d),
        epsilon,
        tau: cell.tau,
        seed: cell.seed,
        rel_err: None,
        wall_time_s: wall,
        detected_rank: None,
        psnr: None,
        status: "ok".into(),
    };
    match outcome.and_then(|dec| rel_err(a, &dec).map(|e| (e, dec.rank))) {
        Ok((e, rank)) => {
            rec.rel_err = Some(e);
            if cell.algorithm == Algorithm::EodAbe {
                rec.detected_rank = Some(rank);
            }
        }
        Err(e) => rec.status = format!("error: {e}"),
    }
    rec
}

/// Accuracy/timing comparison on strictly rank-deficient matrices.
///
/// Per (size, seed) the matrix has rank `rank_ratio * n`; baselines sample
/// `d_ratio * n` columns, the adaptive method stops at `epsilon`. One
/// reference-SVD row at `d = r` is added per (size, seed). Failing runs are
/// recorded with an error status instead of aborting the study.
pub fn run_table_study(study: &TableStudy) -> Result<Vec<BenchRecord>> {
    study.validate()?;
    let mut out = Vec::new();
    for &n in &study.sizes {
        let r = scaled(n, study.rank_ratio);
        let d = scaled(n, study.d_ratio);
        for &seed in &study.seeds {
            let a = generate(&SpectrumSpec::strict_rank_deficient(n, r, seed))?.a;
            let mut cells = Vec::new();
            for &tau in &study.taus {
                for algorithm in std::iter::once(Algorithm::EodAbe).chain(Algorithm::BASELINES) {
                    cells.push(Cell {
                        algorithm,
                        n,
                        r,
                        d,
                        tau,
                        seed,
                    });
                }
            }
            let cfg = BasisConfig::new(study.epsilon, study.blocksize.min(n));
            let mut rows: Vec<BenchRecord> = with_pool(|| {
                cells
                    .par_iter()
                    .map(|cell| match cell.algorithm {
                        Algorithm::EodAbe => timed(cell, &a, Some(study.epsilon), || {
                            eod_abe_power(&a, &mut GaussianSampler::new(seed), &cfg, PowerConfig::new(cell.tau))
                        }),
                        alg => timed(cell, &a, None, || {
                            run_baseline(alg, &a, &BaselineConfig::new(d, cell.tau, seed))
                        }),
                    })
                    .collect()
            });
            let reference = Cell {
                algorithm: Algorithm::ReferenceSvd,
                n,
                r,
                d: r,
                tau: 0,
                seed,
            };
            rows.push(timed(&reference, &a, None, || reference_svd(&a, r)));
            out.extend(rows);
        }
    }
    Ok(out)
}

/// One plotted singular-value estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct SvalPoint {
    /// 1-based index.
    pub index: usize,
    pub algorithm: Algorithm,
    pub tau: usize,
    pub sigma_est: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvalOptions {
    pub taus: Vec<usize>,
    /// Baseline sampling size; also caps the adaptive basis.
    pub d: usize,
    pub epsilon: f64,
    pub blocksize: usize,
    pub seed: u64,
}

impl SvalOptions {
    pub fn new(taus: Vec<usize>, d: usize) -> Self {
        SvalOptions {
            taus,
            d,
            epsilon: 1e-10,
            blocksize: DEFAULT_BLOCKSIZE,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvalStudy {
    pub points: Vec<SvalPoint>,
    /// Detected rank of the adaptive method per tau.
    pub eod_ranks: Vec<(usize, usize)>,
}

impl SvalStudy {
    pub fn estimates(&self, algorithm: Algorithm, tau: usize) -> Vec<f64> {
        self.points
            .iter()
            .filter(|p| p.algorithm == algorithm && p.tau == tau)
            .map(|p| p.sigma_est)
            .collect()
    }

    /// Plot data with columns `index,algorithm,tau,sigma_est`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# lowrank-svals csv v1")?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["index", "algorithm", "tau", "sigma_est"])
            .map_err(csv_error)?;
        for p in &self.points {
            out.write_record([
                p.index.to_string(),
                p.algorithm.name().to_string(),
                p.tau.to_string(),
                format!("{:e}", p.sigma_est),
            ])
            .map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn run_sval_study(spec: &SpectrumSpec, opts: &SvalOptions) -> Result<SvalStudy> {
    run_sval_study_on(&generate(spec)?.a, opts)
}

/// Diagonal magnitudes of every method for each tau, plus the full
/// reference spectrum (emitted once, with tau 0).
pub fn run_sval_study_on(a: &DenseMatrix, opts: &SvalOptions) -> Result<SvalStudy> {
    let n = a.cols();
    if opts.d == 0 || opts.d > n {
        return Err(LowRankError::config(format!("d must lie in 1..={n}, got {}", opts.d)));
    }
    let mut points = Vec::new();
    let mut eod_ranks = Vec::new();
    let mut push = |algorithm, tau, values: Vec<f64>| {
        points.extend(values.into_iter().enumerate().map(|(i, sigma_est)| SvalPoint {
            index: i + 1,
            algorithm,
            tau,
            sigma_est,
        }));
    };
    let cfg = BasisConfig::new(opts.epsilon, opts.blocksize.min(n)).with_max_cols(opts.d);
    for &tau in &opts.taus {
        let dec = eod_abe_power(a, &mut GaussianSampler::new(opts.seed), &cfg, PowerConfig::new(tau))?;
        eod_ranks.push((tau, dec.rank));
        push(Algorithm::EodAbe, tau, dec.diag_magnitudes());
        for alg in Algorithm::BASELINES {
            let dec = run_baseline(alg, a, &BaselineConfig::new(opts.d, tau, opts.seed))?;
            push(alg, tau, dec.diag_magnitudes());
        }
    }
    push(Algorithm::ReferenceSvd, 0, crate::dense::singular_values(a)?);
    Ok(SvalStudy { points, eod_ranks })
}
