//! Configuration loading, the verification suite, CSV tabulation and the
//! commutator calculator behind the `aqft1d` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod report;
pub mod scenario;
pub mod suite;

use std::path::Path;

use aqft1d::geometry::{inverse_proper_time, FieldConfiguration, Section, SupportClass};
use aqft1d::quantize::{parse_element, Parent, QuantizeError};
use aqft1d::report::timed;
use rayon::prelude::*;
use thiserror::Error;

use config::{invalid, ConfigError, GreenKind, RunConfig};
use report::{CheckEntry, VerificationReport};
use scenario::Setup;

/// Caps the worker threads used by `verify`.
pub const THREADS_ENV: &str = "AQFT1D_THREADS";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Syntax(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl HarnessError {
    /// `2` for usage, configuration, syntax and I/O errors, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Numeric(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Record per-job wall time; reports are then no longer reproducible.
    pub timings: bool,
}

fn thread_count() -> Result<usize, ConfigError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(invalid(THREADS_ENV, format!("`{v}` is not a positive integer"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Runs every check of the scenario and assembles the sorted report.
pub fn run_verify(config: &RunConfig, options: VerifyOptions) -> Result<VerificationReport, HarnessError> {
    let setup = Setup::new(config)?;
    let jobs = suite::jobs(config, setup);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| HarnessError::Numeric(e.to_string()))?;
    let results: Vec<_> = pool.install(|| jobs.par_iter().map(|j| timed(|| (j.run)())).collect());
    let mut reports = Vec::new();
    let mut runtimes = Vec::new();
    for (rs, ms) in results {
        for r in rs {
            reports.push(r);
            runtimes.push(ms as u64);
        }
    }
    let reports = suite::apply_tolerances(reports, config)?;
    let entries = reports
        .iter()
        .zip(runtimes)
        .map(|(r, ms)| CheckEntry::new(r, options.timings.then_some(ms)))
        .collect();
    Ok(VerificationReport::new(config.clone(), entries))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

/// Tabulates the configured Green operator applied to a test field at
/// `samples` uniform proper times, anchored at `t = 0` (clamped into the
/// fiber). Returns the number of rows written.
pub fn run_propagate(config: &RunConfig, csv_path: &Path, samples: usize) -> Result<usize, HarnessError> {
    if samples == 0 {
        return Err(invalid("--samples", "must be at least 1").into());
    }
    let setup = Setup::new(config)?;
    let spec = &config.propagate;
    let x = spec.x.clone().map_or_else(|| setup.centre.clone(), |v| v.into());
    let (lo, hi) = setup.family.fiber(&x);
    let anchor = Section::constant(0.0f64.clamp(lo, hi));
    let numeric = |e: &dyn std::fmt::Display| HarnessError::Numeric(e.to_string());

    let source = if spec.zero {
        let n = setup.operator.components();
        let kind = setup.tests[0].kind();
        let (a, b) = (0.75 * lo.max(-1e3) + 0.25 * hi.min(1e3), 0.25 * lo.max(-1e3) + 0.75 * hi.min(1e3));
        FieldConfiguration::zero(setup.family.clone(), n, kind, SupportClass::compact(a, b)).map_err(|e| numeric(&e))?
    } else {
        setup.tests[spec.field].clone()
    };
    let out = match spec.operator {
        GreenKind::Retarded => setup.operator.retarded(&source),
        GreenKind::Advanced => setup.operator.advanced(&source),
        GreenKind::Causal => setup.operator.causal(&source),
    }
    .map_err(|e| numeric(&e))?;

    let file = std::fs::File::create(csv_path).map_err(|source| HarnessError::Io { path: csv_path.display().to_string(), source })?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let io = |e: csv::Error| HarnessError::Io { path: csv_path.display().to_string(), source: e.into() };
    let complex = setup.operator.components() > 1 || source.kind() == aqft1d::geometry::ScalarKind::Complex;
    let mut header = vec!["T".to_string()];
    header.extend((0..x.len()).map(|k| format!("x{k}")));
    for c in 0..source.components() {
        if complex {
            header.push(format!("re{c}"));
            header.push(format!("im{c}"));
        } else {
            header.push(format!("value{c}"));
        }
    }
    w.write_record(&header).map_err(io)?;
    for k in 0..samples {
        let big_t = if samples == 1 { spec.lo } else { spec.lo + (spec.hi - spec.lo) * k as f64 / (samples - 1) as f64 };
        let t = inverse_proper_time(&setup.family, big_t, &x, &anchor).map_err(|e| numeric(&e))?;
        let v = out.eval(t, &x).map_err(|e| numeric(&e))?;
        let mut row = vec![format!("{big_t:.16e}")];
        row.extend(x.iter().map(|c| format!("{c:.16e}")));
        for z in v.components() {
            row.push(format!("{:.16e}", z.re));
            if complex {
                row.push(format!("{:.16e}", z.im));
            }
        }
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|source| HarnessError::Io { path: csv_path.display().to_string(), source })?;
    Ok(samples)
}

/// The commutator (scalar) or anticommutator (Dirac) of two expressions in
/// the generators, rendered in normal form.
pub fn run_commutator(config: &RunConfig, a: &str, b: &str) -> Result<String, HarnessError> {
    let setup = Setup::new(config)?;
    let x = config.propagate.x.clone().map_or_else(|| setup.centre.clone(), |v| v.into());
    let parent = setup.model.algebra(&x).map_err(|e| HarnessError::Numeric(e.to_string()))?;
    let parse = |s: &str| {
        parse_element(&parent, s).map_err(|e| match e {
            QuantizeError::Parse { position, message } => HarnessError::Syntax(format!("syntax error in `{s}` at position {position}: {message}")),
            other => HarnessError::Syntax(other.to_string()),
        })
    };
    let (u, v) = (parse(a)?, parse(b)?);
    let out = match &*parent {
        Parent::Ccr(_) => u.commutator(&v),
        Parent::Car(_) => u.anticommutator(&v),
    }
    .map_err(|e| HarnessError::Numeric(e.to_string()))?;
    Ok(out.to_string())
}
