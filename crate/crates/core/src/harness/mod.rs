//! Experiment configuration, Monte Carlo orchestration, persistence,
//! aggregation and the self-test battery.

mod analysis;
mod config;
mod manifest;
mod run;
mod selftest;

pub use analysis::{cmd_fit, cmd_norms, cmd_report, parse_norms, quantile, FitOutcome, NormsOutcome, FIT_HEADER, NORMS_HEADER};
pub use config::{output_root, ExperimentConfig, ExperimentKind, InitialCondition, OUTPUT_ROOT_ENV};
pub use manifest::{digest_file, sha256_hex, PathEntry, PathStatus, RunManifest, MANIFEST_FILE};
pub use run::{
    build_stepper, cmd_run, initial_velocity, parse_increments, parse_series, path_dir_name, render_increments,
    render_series, simulate, simulate_path, stored_lags, FinalState, PathResult, Quantity, RunOutcome,
    INCREMENTS_HEADER, SERIES_HEADER,
};
pub use selftest::{run_selftest, CheckResult, Corruption, SelftestOptions, SelftestReport};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_TEST_FAILURE: i32 = 3;

/// Exit status for an error: bad input is a validation failure, everything
/// else a runtime failure.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::Parse { .. }
        | Error::Domain(_)
        | Error::InvalidGrid(_)
        | Error::GridMismatch { .. } => EXIT_VALIDATION,
        _ => EXIT_RUNTIME,
    }
}
