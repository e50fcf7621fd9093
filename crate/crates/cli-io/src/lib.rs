//! Configuration, experiment orchestration, and deterministic output
//! artifacts for the `g2` command-line tool.
//!
//! The tool wraps the solver stack behind six subcommands:
//!
//! * `selftest` — operator identity suite on random fields;
//! * `simulate` — one deterministic and one stochastic path, with
//!   trajectory tables and field snapshots;
//! * `clt-gap` — scaling of `E[sup |u^eps - u0|_V^p]` against the
//!   intensity, fitted in log-log coordinates;
//! * `clt-limit` — decay of the centered fluctuation against its
//!   Gaussian limit;
//! * `mdp-check` — continuity of controlled deviations toward the
//!   skeleton image plus the uniform W-moment audit;
//! * `rate` — minimum-energy control and rate value for a terminal
//!   target, with unreachability as a first-class verdict.
//!
//! Configuration is sectioned key-value text where every key has a
//! default, unknown keys are hard errors, and range violations carry the
//! offending line.  Every run writes its artifacts (CSV tables, JSON
//! reports, binary field snapshots) under one directory together with a
//! manifest listing each file's SHA-256, the config hash, the seeds, and
//! the crate versions.  Runs are bitwise reproducible: the worker count
//! (environment variable `G2_THREADS`) changes wall time, never bytes.

mod artifacts;
mod config;
mod error;
mod runner;
mod selftest;

pub use artifacts::{crate_versions, fmt_f64, FileRecord, Manifest, OutputWriter, MANIFEST_NAME};
pub use config::{
    parse_config, parse_config_str, sha256_hex, EnsembleConfig, ForcingConfig, ForcingKind,
    GridConfig, InitialConfig, MdpConfig, NoiseConfig, NoiseKind, RateConfig, RunConfig,
    SimulateConfig, TimeConfig,
};
pub use error::{CliError, EXIT_CONFIG_ERROR, EXIT_GATE_FAILURE, EXIT_NUMERICS};
pub use runner::{
    read_control_csv, run_command, Command, RunOutcome, CONDITION_A_DECAY, GAP_SLOPE_BAND,
    LIMIT_SLOPE_FLOOR, SELFTEST_FIELDS,
};
pub use selftest::{operator_identity_suite, Check};

/// Crate version, recorded in output manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
