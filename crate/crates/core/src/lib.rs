//! Randomized rank-revealing low-rank decompositions.
//!
//! The centerpiece is [`eod_abe`]: a blocked range finder that discovers the
//! numerical rank on its own, followed by a two-QR refactoring into
//! `A ~ U D V^T` with `D` upper triangular. Fixed-sampling-size competitors
//! live in [`baselines`], test-matrix families in [`matgen`], and the
//! experiment runner in [`bench`].

pub mod baselines;
pub mod basis;
pub mod bench;
pub mod decomposition;
pub mod dense;
pub mod eod;
mod error;
pub mod image;
pub mod matgen;

pub use basis::{basis_extract, residual_norm, BasisConfig, BasisResult, Termination, ThresholdMode};
pub use decomposition::{reconstruct, Algorithm, Decomposition, MiddleShape, Provenance, SizeControl};
pub use dense::{DenseMatrix, GaussianSampler};
pub use eod::{eod_abe, eod_abe_power, power_basis, PowerConfig};
pub use error::{LowRankError, Result};
