//! Deterministic experiment reports.
//!
//! A report is a pure function of the experiment's flag set: per-replicate
//! rows in replicate order, then summary lines each reducible from the rows.
//! The CSV rendering never includes wall-clock data, so repeat runs are
//! byte-identical.

use std::io::{self, Write};
use std::time::Duration;

/// One per-replicate statistic value.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRow {
    pub replicate: u64,
    pub statistic: String,
    pub value: f64,
}

/// One reduced summary line: a point estimate with optional standard error,
/// theory value, and pass/fail verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryEntry {
    pub statistic: String,
    pub estimate: f64,
    pub std_error: Option<f64>,
    pub theory: Option<f64>,
    pub pass: Option<bool>,
}

impl SummaryEntry {
    pub fn plain(statistic: impl Into<String>, estimate: f64) -> Self {
        Self {
            statistic: statistic.into(),
            estimate,
            std_error: None,
            theory: None,
            pass: None,
        }
    }
}

/// Deterministic record of one Monte Carlo experiment.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub experiment_name: String,
    pub master_seed: u64,
    pub rows: Vec<ReplicateRow>,
    pub summary: Vec<SummaryEntry>,
    /// Diagnostic only; never serialized into the CSV.
    pub wall_time: Duration,
}

impl ExperimentReport {
    /// True when every summary line that carries a verdict passes.
    pub fn all_pass(&self) -> bool {
        self.summary.iter().all(|s| s.pass != Some(false))
    }

    /// Flat CSV rendering: a uniform
    /// `section,replicate,statistic,value,std_error,theory,pass` table with
    /// `meta`, `row` and `summary` sections (UTF-8, LF, header row).
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "section,replicate,statistic,value,std_error,theory,pass")?;
        writeln!(w, "meta,,experiment,{},,,", self.experiment_name)?;
        writeln!(w, "meta,,master_seed,{},,,", self.master_seed)?;
        writeln!(
            w,
            "meta,,defaults_version,{},,,",
            super::defaults::DEFAULTS_VERSION
        )?;
        for row in &self.rows {
            writeln!(w, "row,{},{},{},,,", row.replicate, row.statistic, row.value)?;
        }
        for s in &self.summary {
            let se = s.std_error.map(|v| v.to_string()).unwrap_or_default();
            let theory = s.theory.map(|v| v.to_string()).unwrap_or_default();
            let pass = s.pass.map(|p| p.to_string()).unwrap_or_default();
            writeln!(
                w,
                "summary,,{},{},{},{},{}",
                s.statistic, s.estimate, se, theory, pass
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

/// Left-fold mean in row order; summaries and any external recomputation use
/// this exact reduction so results match bitwise.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance about the left-fold mean.
pub fn sample_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64
}

/// Standard error of the mean.
pub fn standard_error(values: &[f64]) -> f64 {
    (sample_variance(values) / values.len() as f64).sqrt()
}

/// Standard error of the unbiased sample variance, from the fourth central
/// moment: `se^2 = (m4 - s^4 (R-3)/(R-1)) / R`.
pub fn variance_standard_error(values: &[f64]) -> f64 {
    let r = values.len() as f64;
    let m = mean(values);
    let m4 = values.iter().map(|v| (v - m).powi(4)).sum::<f64>() / r;
    let s2 = sample_variance(values);
    ((m4 - s2 * s2 * (r - 3.0) / (r - 1.0)) / r).max(0.0).sqrt()
}

/// Median of a sample (average of middle pair for even length).
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Pearson correlation of two equal-length samples.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let (mut num, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        num += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    num / (va.sqrt() * vb.sqrt())
}
