//! Statistical verification: closed-form error probabilities, Monte Carlo
//! harnesses, chi-square tests and orbit diagnostics.
//!
//! Every chi-square verdict is taken at the fixed 1% level, but the raw
//! statistic and p-value are always reported alongside it.

pub mod diagnostics;
pub mod montecarlo;
pub mod report;
pub mod stats;
pub mod theory;

use thiserror::Error;

use crate::chaos::ChaosError;
use crate::cipher::CipherError;
use crate::key::KeyError;

pub use diagnostics::{autocorrelation, histogram, mask_independence_audit, occupancy, orbit, MaskAudit, Occupancy};
pub use montecarlo::{
    coarse_uniformity, count_distribution_test, count_samples, error_rate_experiment, interval_hit_probability,
    masked_error_rate, single_character_units, ErrorRun,
};
pub use report::{AnalysisReport, PositionRate};
pub use stats::{chi_square_test, chi_square_uniform, BinomialEstimate, ChiSquare, SIGNIFICANCE};
pub use theory::{pc_first, pc_first_with_p, pc_position, pc_single, random_guess_crossover};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error(transparent)]
    Key(#[from] KeyError),
    #[error("csv output failed: {0}")]
    Csv(String),
}

impl From<ChaosError> for AnalysisError {
    fn from(e: ChaosError) -> Self {
        Self::Cipher(CipherError::Chaos(e))
    }
}

impl From<csv::Error> for AnalysisError {
    fn from(e: csv::Error) -> Self {
        Self::Csv(e.to_string())
    }
}
