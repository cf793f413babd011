//! Plain-text and CSV rendering of analysis results.

use std::fmt;
use std::io::Write;

use super::stats::{BinomialEstimate, ChiSquare};
use super::AnalysisError;

#[derive(Debug, Clone, PartialEq)]
pub struct PositionRate {
    /// 1-based character position.
    pub position: u32,
    pub estimate: BinomialEstimate,
    pub theory: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalysisReport {
    pub title: String,
    /// Number of samples behind `histogram`; the bins always sum to it.
    pub samples: u64,
    pub histogram: Vec<u64>,
    pub chi_square: Option<ChiSquare>,
    pub error_rates: Vec<PositionRate>,
    /// Closed-form correct-decryption probability for positions `1..`.
    pub theory_curve: Vec<f64>,
    pub summary: Vec<(String, String)>,
}

impl AnalysisReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self { title: title.into(), ..Default::default() }
    }

    pub fn note(&mut self, name: impl Into<String>, value: impl fmt::Display) {
        self.summary.push((name.into(), value.to_string()));
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.summary.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_str())
    }

    pub fn rate_at(&self, position: u32) -> Option<&PositionRate> {
        self.error_rates.iter().find(|r| r.position == position)
    }

    /// Checks the structural invariants: bins sum to the sample count and
    /// every probability lies in `[0, 1]`.
    pub fn check(&self) -> Result<(), AnalysisError> {
        let total: u64 = self.histogram.iter().sum();
        if !self.histogram.is_empty() && total != self.samples {
            return Err(AnalysisError::Degenerate(format!("histogram holds {total} of {} samples", self.samples)));
        }
        let probs = self
            .error_rates
            .iter()
            .flat_map(|r| [r.estimate.rate, r.estimate.lower, r.estimate.upper].into_iter().chain(r.theory))
            .chain(self.theory_curve.iter().copied())
            .chain(self.chi_square.map(|c| c.p_value));
        for p in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(AnalysisError::Degenerate(format!("probability {p} outside [0, 1]")));
            }
        }
        if self.chi_square.is_some_and(|c| c.statistic < 0.0) {
            return Err(AnalysisError::Degenerate("negative chi-square statistic".into()));
        }
        Ok(())
    }

    /// One row per datum: `section,index,value,lower,upper,theory`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), AnalysisError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["section", "index", "value", "lower", "upper", "theory"])?;
        let empty = String::new();
        for (name, value) in &self.summary {
            w.write_record(["summary", name, value, "", "", ""])?;
        }
        if let Some(c) = &self.chi_square {
            w.write_record(["chi_square", "statistic", &c.statistic.to_string(), "", "", ""])?;
            w.write_record(["chi_square", "dof", &c.dof.to_string(), "", "", ""])?;
            w.write_record(["chi_square", "p_value", &c.p_value.to_string(), "", "", ""])?;
        }
        for (i, c) in self.histogram.iter().enumerate() {
            w.write_record(["histogram", &i.to_string(), &c.to_string(), "", "", ""])?;
        }
        for r in &self.error_rates {
            let theory = r.theory.map(|t| t.to_string()).unwrap_or_else(|| empty.clone());
            w.write_record([
                "error_rate",
                &r.position.to_string(),
                &r.estimate.rate.to_string(),
                &r.estimate.lower.to_string(),
                &r.estimate.upper.to_string(),
                &theory,
            ])?;
        }
        for (i, t) in self.theory_curve.iter().enumerate() {
            w.write_record(["theory", &(i + 1).to_string(), "", "", "", &t.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {} ==", self.title)?;
        let width = self.summary.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        for (name, value) in &self.summary {
            writeln!(f, "{name:<width$}  {value}")?;
        }
        if let Some(c) = &self.chi_square {
            writeln!(
                f,
                "chi-square {:.3} on {} dof, p = {:.4} -> {} at {}%",
                c.statistic,
                c.dof,
                c.p_value,
                if c.pass { "pass" } else { "fail" },
                c.significance * 100.0
            )?;
        }
        if !self.error_rates.is_empty() {
            writeln!(f, "{:>8} {:>10} {:>10} {:>10} {:>10} {:>10}", "position", "correct", "rate", "lower", "upper", "theory")?;
            for r in &self.error_rates {
                let theory = r.theory.map(|t| format!("{t:.6}")).unwrap_or_else(|| "-".into());
                writeln!(
                    f,
                    "{:>8} {:>10} {:>10.6} {:>10.6} {:>10.6} {:>10}",
                    r.position, r.estimate.successes, r.estimate.rate, r.estimate.lower, r.estimate.upper, theory
                )?;
            }
        }
        if !self.histogram.is_empty() {
            let (min, max) = (self.histogram.iter().min().unwrap(), self.histogram.iter().max().unwrap());
            writeln!(f, "histogram: {} bins, {} samples, min {min}, max {max}", self.histogram.len(), self.samples)?;
        }
        Ok(())
    }
}
