//! Outcome of a single numerical or algebraic check.

use std::time::Instant;

/// One check: passes when `max_error ≤ tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
    /// Set when the check could not be evaluated at all.
    pub error: Option<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, max_error: f64, tolerance: f64, samples: usize) -> Self {
        Self { check: check.into(), max_error, tolerance, samples, passed: max_error <= tolerance, error: None }
    }

    pub fn failed(check: impl Into<String>, tolerance: f64, error: impl ToString) -> Self {
        Self {
            check: check.into(),
            max_error: f64::INFINITY,
            tolerance,
            samples: 0,
            passed: false,
            error: Some(error.to_string()),
        }
    }

    /// Builds a report from a fallible measurement of `(max_error, samples)`.
    pub fn measure<E: ToString>(check: impl Into<String>, tolerance: f64, result: Result<(f64, usize), E>) -> Self {
        match result {
            Ok((e, n)) => Self::new(check, e, tolerance, n),
            Err(e) => Self::failed(check, tolerance, e),
        }
    }

    /// Re-evaluates the verdict against a different tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.error.is_none() && self.max_error <= tolerance;
        self
    }

    /// `"pass"`, `"fail"` or `"error"`.
    pub fn status(&self) -> &'static str {
        match (&self.error, self.passed) {
            (Some(_), _) => "error",
            (None, true) => "pass",
            (None, false) => "fail",
        }
    }
}

/// Runs `f` and returns its value with the elapsed wall time in milliseconds.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, u128) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_millis())
}
