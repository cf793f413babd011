//! Chi-square tests and binomial intervals.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::AnalysisError;

/// Significance level of every verdict in this module.
pub const SIGNIFICANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub significance: f64,
    /// `p_value >= significance`.
    pub pass: bool,
}

impl ChiSquare {
    pub fn from_statistic(statistic: f64, dof: usize) -> Result<Self, AnalysisError> {
        if dof == 0 {
            return Err(AnalysisError::Degenerate("chi-square with zero degrees of freedom".into()));
        }
        let dist = ChiSquared::new(dof as f64).map_err(|e| AnalysisError::Degenerate(e.to_string()))?;
        let p_value = dist.sf(statistic);
        Ok(Self { statistic, dof, p_value, significance: SIGNIFICANCE, pass: p_value >= SIGNIFICANCE })
    }
}

/// Pearson statistic `Σ (O - E)² / E` with `bins - 1 - estimated` degrees
/// of freedom.
pub fn chi_square_test(observed: &[u64], expected: &[f64], estimated: usize) -> Result<ChiSquare, AnalysisError> {
    assert_eq!(observed.len(), expected.len(), "bin count mismatch");
    if let Some(e) = expected.iter().find(|&&e| e.is_nan() || e <= 0.0) {
        return Err(AnalysisError::Degenerate(format!("expected bin count {e}")));
    }
    let statistic = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let dof = observed.len().saturating_sub(1 + estimated);
    ChiSquare::from_statistic(statistic, dof)
}

pub fn chi_square_uniform(observed: &[u64]) -> Result<ChiSquare, AnalysisError> {
    let total: u64 = observed.iter().sum();
    let e = total as f64 / observed.len() as f64;
    chi_square_test(observed, &vec![e; observed.len()], 0)
}

/// Success proportion with a 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialEstimate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl BinomialEstimate {
    const Z95: f64 = 1.959_963_984_540_054;

    pub fn new(successes: u64, trials: u64) -> Self {
        assert!(successes <= trials && trials > 0, "{successes} of {trials}");
        let n = trials as f64;
        let rate = successes as f64 / n;
        let z2 = Self::Z95 * Self::Z95;
        let centre = (rate + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = Self::Z95 * (rate * (1.0 - rate) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
        let lower = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
        let upper = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
        Self { successes, trials, rate, lower, upper }
    }

    /// Binomial standard deviation of the proportion under success
    /// probability `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Distance from `p` in units of [`sigma_at`](Self::sigma_at)`(p)`.
    pub fn z_score(&self, p: f64) -> f64 {
        let s = self.sigma_at(p);
        if s == 0.0 {
            if self.rate == p { 0.0 } else { f64::INFINITY }
        } else {
            (self.rate - p) / s
        }
    }
}
