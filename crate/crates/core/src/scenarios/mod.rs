//! Batch runner: a JSON config names a scenario, a family, symbols and a
//! window; the run writes one CSV row per evaluated pairing plus a JSON
//! summary.

mod config;
mod report;
mod runner;

pub use config::{
    default_time_grid, ConfigError, OracleParams, OutputPaths, PacketParams, ScenarioConfig, ScenarioKind, SymbolEntry,
    SCHEMA_VERSION,
};
pub use report::{fmt_float, passes, write_atomic, Report, ReportRow, RowTime, Summary, CSV_HEADER};
pub use runner::{
    egorov_invariant_check, execute, invariance_residual, run_scenario, threads_from_env, ResidualRow, RunError,
    THREADS_ENV,
};
