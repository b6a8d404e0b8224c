use std::fmt;

use crate::dense::DenseMatrix;
use crate::error::{LowRankError, Result};

/// Which algorithm produced a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    EodAbe,
    RandomizedSvd,
    TsrSvd,
    CorUtv,
    RpTsod,
    PbpQlp,
    ReferenceSvd,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::EodAbe,
        Algorithm::RandomizedSvd,
        Algorithm::TsrSvd,
        Algorithm::CorUtv,
        Algorithm::RpTsod,
        Algorithm::PbpQlp,
        Algorithm::ReferenceSvd,
    ];

    pub const BASELINES: [Algorithm; 5] = [
        Algorithm::RandomizedSvd,
        Algorithm::TsrSvd,
        Algorithm::CorUtv,
        Algorithm::RpTsod,
        Algorithm::PbpQlp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::EodAbe => "eod_abe",
            Algorithm::RandomizedSvd => "randomized_svd",
            Algorithm::TsrSvd => "tsr_svd",
            Algorithm::CorUtv => "cor_utv",
            Algorithm::RpTsod => "rp_tsod",
            Algorithm::PbpQlp => "pbp_qlp",
            Algorithm::ReferenceSvd => "reference_svd",
        }
    }

    pub fn from_name(name: &str) -> Option<Algorithm> {
        Algorithm::ALL.into_iter().find(|a| a.name() == name)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Structure of the middle factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiddleShape {
    Diagonal,
    Upper,
    Lower,
}

/// What controlled the size of the factorization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SizeControl {
    Epsilon(f64),
    SamplingSize(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub algorithm: Algorithm,
    pub size: SizeControl,
    pub tau: usize,
    pub seed: u64,
    pub blocksize: Option<usize>,
}

/// `A ~ U D V^T` with orthonormal `U` (m x r), `V` (n x r) and an r x r
/// middle factor whose structure is recorded in `shape`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub u: DenseMatrix,
    pub d: DenseMatrix,
    pub v: DenseMatrix,
    pub rank: usize,
    pub shape: MiddleShape,
    pub provenance: Provenance,
}

impl Decomposition {
    /// Magnitudes of the middle factor's diagonal.
    pub fn diag_magnitudes(&self) -> Vec<f64> {
        self.d.diagonal().into_iter().map(f64::abs).collect()
    }

    pub fn check_shapes(&self) -> Result<()> {
        let r = self.d.rows();
        let mismatch = |left, right| LowRankError::ShapeMismatch {
            op: "decomposition",
            left,
            right,
        };
        if self.d.cols() != r || self.rank != r {
            return Err(mismatch(self.d.shape(), (self.rank, self.rank)));
        }
        if self.u.cols() != r {
            return Err(mismatch(self.u.shape(), self.d.shape()));
        }
        if self.v.cols() != r {
            return Err(mismatch(self.v.shape(), self.d.shape()));
        }
        Ok(())
    }
}

/// Forms `U D V^T`.
pub fn reconstruct(dec: &Decomposition) -> Result<DenseMatrix> {
    dec.check_shapes()?;
    Ok(dec.u.mul(&dec.d).mul_tr(&dec.v))
}
