//! Scenario runner, Monte Carlo validation and benchmarks for `circrisk`.

pub mod bench;
pub mod error;
pub mod run;
pub mod scenario;
pub mod series;

pub use error::{CliError, CliResult};
pub use run::{run_scenario, run_with, validate, Run};
pub use scenario::Scenario;
pub use series::RiskTimeSeries;

/// The five built-in cases: file stem and contents.
pub const CASES: [(&str, &str); 5] = [
    (
        "case_1_head_on",
        include_str!("../scenarios/case_1_head_on.toml"),
    ),
    (
        "case_2_rear_end",
        include_str!("../scenarios/case_2_rear_end.toml"),
    ),
    (
        "case_3_side_front",
        include_str!("../scenarios/case_3_side_front.toml"),
    ),
    (
        "case_4_side_center",
        include_str!("../scenarios/case_4_side_center.toml"),
    ),
    (
        "case_5_side_rear",
        include_str!("../scenarios/case_5_side_rear.toml"),
    ),
];

/// Applies `RISK_THREADS` (0 or unset: one thread per core) to the global
/// worker pool.
pub fn init_threads() -> CliResult<()> {
    let n = match std::env::var("RISK_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            CliError::Config(format!(
                "RISK_THREADS must be a nonnegative integer, got '{v}'"
            ))
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}
