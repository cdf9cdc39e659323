//! Goodness-of-fit tests and summaries used to check simulated laws.

use std::fmt;

mod cells;
mod ks;
mod poisson;
mod summary;

pub use cells::{scaling_check, scaling_check_with_exponent, typical_cell_samples, SCALING_MIN_REPS};
pub use ks::{kolmogorov_survival, ks_test, ks_two_sample, Reference, KS_MIN_N};
pub use poisson::{chi_square_independence, poisson_count_test};
pub use summary::{cv_report, summarize, SampleSummary, BOOTSTRAP_RESAMPLES, CV_MIN_N};

/// Significance level used when none is given.
pub const DEFAULT_LEVEL: f64 = 0.01;

/// Outcome of one statistical test.
#[derive(Debug, Clone, PartialEq)]
pub struct GoFResult {
    pub test: String,
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub level: f64,
    /// `p_value > level`, unless the test combines several p-values.
    pub passed: bool,
    pub note: String,
}

impl GoFResult {
    pub fn new(test: impl Into<String>, statistic: f64, p_value: f64, n: usize, level: f64) -> Self {
        GoFResult {
            test: test.into(),
            statistic,
            p_value,
            n,
            level,
            passed: p_value > level,
            note: String::new(),
        }
    }

    /// Re-evaluates `passed` at another level.
    pub fn at_level(mut self, level: f64) -> Self {
        self.level = level;
        self.passed = self.p_value > level;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

impl fmt::Display for GoFResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: statistic={} p={:.4} n={} level={} {}",
            self.test,
            self.statistic,
            self.p_value,
            self.n,
            self.level,
            if self.passed { "PASS" } else { "FAIL" }
        )?;
        if !self.note.is_empty() {
            write!(f, " ({})", self.note)?;
        }
        Ok(())
    }
}
