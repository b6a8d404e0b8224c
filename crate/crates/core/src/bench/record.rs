use std::collections::BTreeMap;
use std::io::Write;

use crate::decomposition::{reconstruct, Algorithm, Decomposition};
use crate::dense::DenseMatrix;
use crate::error::{LowRankError, Result};

/// First line of every CSV report; bump when columns change.
pub const CSV_VERSION_LINE: &str = "# lowrank-bench csv v1";

pub const CSV_COLUMNS: [&str; 12] = [
    "algorithm",
    "n",
    "r_true",
    "d",
    "epsilon",
    "tau",
    "seed",
    "rel_err",
    "wall_time_s",
    "detected_rank",
    "psnr",
    "status",
];

/// One timed run of one algorithm on one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    pub n: usize,
    pub r_true: Option<usize>,
    /// Sampling size for fixed-size methods.
    pub d: Option<usize>,
    /// Stopping precision for the adaptive method.
    pub epsilon: Option<f64>,
    pub tau: usize,
    pub seed: u64,
    /// `None` when the run failed.
    pub rel_err: Option<f64>,
    pub wall_time_s: f64,
    pub detected_rank: Option<usize>,
    pub psnr: Option<f64>,
    /// `ok`, or `error: <message>` for failure rows.
    pub status: String,
}

impl BenchRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    fn fields(&self) -> [String; 12] {
        fn opt<T: ToString>(x: &Option<T>) -> String {
            x.as_ref().map(T::to_string).unwrap_or_default()
        }
        let sci = |x: &Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        [
            self.algorithm.name().to_string(),
            self.n.to_string(),
            opt(&self.r_true),
            opt(&self.d),
            sci(&self.epsilon),
            self.tau.to_string(),
            self.seed.to_string(),
            sci(&self.rel_err),
            format!("{:e}", self.wall_time_s),
            opt(&self.detected_rank),
            self.psnr.map(|v| format!("{v:.4}")).unwrap_or_default(),
            self.status.clone(),
        ]
    }
}

/// Writes the version line, the header row and one row per record.
pub fn write_csv<W: Write>(mut w: W, records: &[BenchRecord]) -> Result<()> {
    writeln!(w, "{CSV_VERSION_LINE}")?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_COLUMNS).map_err(csv_error)?;
    for rec in records {
        out.write_record(rec.fields()).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

pub(crate) fn csv_error(e: csv::Error) -> LowRankError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => LowRankError::Io(io),
        other => LowRankError::format("CSV", format!("{other:?}")),
    }
}

/// `||A - U D V^T||_F / ||A||_F`, formed explicitly.
pub fn rel_err(a: &DenseMatrix, dec: &Decomposition) -> Result<f64> {
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Err(LowRankError::UndefinedRatio);
    }
    let approx = reconstruct(dec)?;
    if approx.shape() != a.shape() {
        return Err(LowRankError::ShapeMismatch {
            op: "rel_err",
            left: a.shape(),
            right: approx.shape(),
        });
    }
    Ok(a.sub(&approx).frobenius_norm() / norm)
}

/// Relative error of the projection `Q Q^T A` by the energy identity
/// `||A - Q Q^T A||_F^2 = ||A||_F^2 - ||Q^T A||_F^2`, without forming the
/// approximation. Cancellation limits it to errors well above `sqrt(eps)`.
pub fn projection_rel_err(a: &DenseMatrix, q: &DenseMatrix) -> Result<f64> {
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Err(LowRankError::UndefinedRatio);
    }
    if q.rows() != a.rows() {
        return Err(LowRankError::ShapeMismatch {
            op: "projection_rel_err",
            left: a.shape(),
            right: q.shape(),
        });
    }
    let kept = q.tr_mul(a).frobenius_norm() / norm;
    Ok((1.0 - kept * kept).max(0.0).sqrt())
}

/// Median of a non-empty sample (mean of the middle pair for even sizes).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

/// Median and range of `rel_err` and wall time across seeds for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub algorithm: Algorithm,
    pub n: usize,
    pub d: Option<usize>,
    pub tau: usize,
    pub runs: usize,
    pub failures: usize,
    pub median_rel_err: Option<f64>,
    pub min_rel_err: Option<f64>,
    pub max_rel_err: Option<f64>,
    pub median_wall_time_s: Option<f64>,
}

/// Groups records by (algorithm, n, d, tau).
pub fn summarize(records: &[BenchRecord]) -> Vec<CellSummary> {
    let mut cells: BTreeMap<(usize, usize, Option<usize>, usize), Vec<&BenchRecord>> = BTreeMap::new();
    for rec in records {
        let alg = Algorithm::ALL.iter().position(|a| *a == rec.algorithm).unwrap_or(0);
        cells.entry((alg, rec.n, rec.d, rec.tau)).or_default().push(rec);
    }
    cells
        .into_iter()
        .map(|((alg, n, d, tau), recs)| {
            let errs: Vec<f64> = recs.iter().filter_map(|r| r.rel_err).collect();
            let times: Vec<f64> = recs.iter().filter(|r| r.is_ok()).map(|r| r.wall_time_s).collect();
            CellSummary {
                algorithm: Algorithm::ALL[alg],
                n,
                d,
                tau,
                runs: recs.len(),
                failures: recs.iter().filter(|r| !r.is_ok()).count(),
                median_rel_err: median(&errs),
                min_rel_err: errs.iter().copied().reduce(f64::min),
                max_rel_err: errs.iter().copied().reduce(f64::max),
                median_wall_time_s: median(&times),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{MiddleShape, Provenance, SizeControl};

    fn dec(u: DenseMatrix, d: DenseMatrix, v: DenseMatrix) -> Decomposition {
        Decomposition {
            rank: d.rows(),
            u,
            d,
            v,
            shape: MiddleShape::Diagonal,
            provenance: Provenance {
                algorithm: Algorithm::ReferenceSvd,
                size: SizeControl::SamplingSize(1),
                tau: 0,
                seed: 0,
                blocksize: None,
            },
        }
    }

    fn record(algorithm: Algorithm, tau: usize, rel: Option<f64>) -> BenchRecord {
        BenchRecord {
            algorithm,
            n: 10,
            r_true: Some(4),
            d: Some(4),
            epsilon: None,
            tau,
            seed: 1,
            rel_err: rel,
            wall_time_s: 0.5,
            detected_rank: None,
            psnr: None,
            status: if rel.is_some() {
                "ok".into()
            } else {
                "error: boom, badly".into()
            },
        }
    }

    #[test]
    fn exact_and_rank_zero_errors() {
        let a = DenseMatrix::from_diag(3, 3, &[2.0, 1.0, 0.0]);
        let e = DenseMatrix::identity(3).columns(0..2);
        let exact = dec(e.clone(), DenseMatrix::from_diag(2, 2, &[2.0, 1.0]), e);
        assert!(rel_err(&a, &exact).unwrap() <= 1e-14);
        let empty = dec(
            DenseMatrix::zeros(3, 0),
            DenseMatrix::zeros(0, 0),
            DenseMatrix::zeros(3, 0),
        );
        assert_eq!(rel_err(&a, &empty).unwrap(), 1.0);
        assert!(matches!(
            rel_err(&DenseMatrix::zeros(3, 3), &empty),
            Err(LowRankError::UndefinedRatio)
        ));
    }

    #[test]
    fn projection_identity_agrees_at_moderate_error() {
        let a = DenseMatrix::from_diag(3, 3, &[3.0, 2.0, 1.0]);
        let q = DenseMatrix::identity(3).columns(0..2);
        let expect = 1.0 / 14f64.sqrt();
        assert!((projection_rel_err(&a, &q).unwrap() - expect).abs() <= 1e-15);
    }

    #[test]
    fn csv_layout() {
        let recs = vec![
            record(Algorithm::TsrSvd, 1, Some(1.5e-3)),
            record(Algorithm::CorUtv, 0, None),
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_VERSION_LINE));
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(lines.next().unwrap(), "tsr_svd,10,4,4,,1,1,1.5e-3,5e-1,,,ok");
        // the comma in the message is quoted
        assert_eq!(
            lines.next().unwrap(),
            "cor_utv,10,4,4,,0,1,,5e-1,,,\"error: boom, badly\""
        );
    }

    #[test]
    fn medians_and_summaries() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
        let recs = vec![
            record(Algorithm::TsrSvd, 0, Some(1.0)),
            record(Algorithm::TsrSvd, 0, Some(3.0)),
            record(Algorithm::TsrSvd, 0, None),
            record(Algorithm::EodAbe, 0, Some(1e-12)),
        ];
        let s = summarize(&recs);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].algorithm, Algorithm::EodAbe);
        assert_eq!(s[1].runs, 3);
        assert_eq!(s[1].failures, 1);
        assert_eq!(s[1].median_rel_err, Some(2.0));
    }
}
