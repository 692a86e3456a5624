//! Command-line harness for `heisenphase`: verification suites over the
//! operator identities, and file-based commands wrapping the FSB transform,
//! cross-Toeplitz operators and their doubled symbols.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 I/O or parse error,
//! 3 precondition failure (invalid configuration, size caps, membership).

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

pub use config::{ScenarioConfig, Suite, Tier};
pub use report::{Report, SuiteOutcome, SuiteStatus, VerificationReport};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "HEISENPHASE_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Lib(#[from] heisenphase::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use heisenphase::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Io(_) => 2,
            CliError::Lib(E::Io(_) | E::Parse { .. } | E::Json(_)) => 2,
            CliError::Config(_) | CliError::Precondition(_) | CliError::Lib(_) => 3,
        }
    }
}

/// Runs `f` on a pool sized by [`THREADS_ENV`] (all cores when unset).
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?,
        Err(_) => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(pool.install(f))
}

fn run_one(suite: Suite, ctx: &suites::Context, tier: Tier) -> SuiteOutcome {
    let start = Instant::now();
    let result = suites::run_suite(suite, ctx);
    let ms = start.elapsed().as_millis() as u64;
    match result {
        Ok(checks) => SuiteOutcome {
            suite,
            status: SuiteStatus::Ran,
            runtime_ms: Some(ms),
            checks: checks
                .into_iter()
                .map(|c| {
                    let tol = c.tolerance_for(tier);
                    let mut r = VerificationReport::new(suite, c.name, c.residual, tol);
                    r.runtime_ms = Some(ms);
                    r
                })
                .collect(),
        },
        Err(e) => SuiteOutcome {
            suite,
            status: SuiteStatus::Error { message: e.to_string() },
            runtime_ms: Some(ms),
            checks: Vec::new(),
        },
    }
}

/// Runs the configured suites in parallel. Suites over a size cap are
/// reported as skipped. The report is a function of the configuration
/// alone, apart from the `runtime_ms` fields.
pub fn run_verify(cfg: &ScenarioConfig) -> Result<Report, CliError> {
    let skipped = cfg.validate()?;
    let ctx = suites::Context::new(cfg)?;
    let outcomes = with_pool(|| {
        cfg.suites
            .par_iter()
            .map(|&suite| match skipped.iter().find(|(s, _)| *s == suite) {
                Some((_, reason)) => SuiteOutcome {
                    suite,
                    status: SuiteStatus::Skipped { reason: reason.clone() },
                    runtime_ms: None,
                    checks: Vec::new(),
                },
                None => run_one(suite, &ctx, cfg.tolerance_tier),
            })
            .collect::<Vec<_>>()
    })?;
    Ok(Report::new(cfg.clone(), outcomes))
}
