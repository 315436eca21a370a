//! Time-series evaluation of a scenario and its Monte Carlo cross-check.

use std::time::{Duration, Instant};

use circrisk::geometry::cover_rectangle;
use circrisk::oracle::{mc_circ, mc_rect, McEstimate, McMode};
use circrisk::RiskEstimator;

use crate::error::{CliError, CliResult};
use crate::scenario::Scenario;
use crate::series::RiskTimeSeries;

/// Validation needs at least this many samples per oracle run.
pub const MIN_VALIDATION_SAMPLES: u64 = 10_000;

#[derive(Debug, Clone)]
pub struct Run {
    /// Times are shifted so that 0 is the first contact of the mean
    /// footprints (unshifted if they never touch).
    pub series: RiskTimeSeries,
    pub contact: Option<f64>,
    pub init_time: Duration,
}

pub fn run_scenario(s: &Scenario) -> CliResult<Run> {
    let start = Instant::now();
    let est = s.estimator()?;
    let init_time = start.elapsed();
    let mut run = run_with(s, &est)?;
    run.init_time = init_time;
    Ok(run)
}

/// Evaluates the scenario with an already initialized estimator.
pub fn run_with(s: &Scenario, est: &RiskEstimator) -> CliResult<Run> {
    let contact = s.contact_time()?;
    let shift = contact.unwrap_or(0.0);
    let mut series = RiskTimeSeries::default();
    for t in s.times() {
        let belief = s.belief_at(t)?;
        let risk = est.estimate_risk(&belief)?;
        let poc = est.estimate_poc(&belief)?;
        series.push(t - shift, risk, poc);
    }
    series.validate()?;
    Ok(Run {
        series,
        contact,
        init_time: Duration::ZERO,
    })
}

/// An estimate over-approximates an oracle if it is at least the oracle
/// mean minus three standard errors.
pub fn over_approximates(estimate: f64, mc: &McEstimate) -> bool {
    estimate >= mc.mean - 3.0 * mc.std_error
}

/// An estimate agrees with an oracle within 2% of the oracle mean or three
/// standard errors, whichever is wider.
pub fn agrees(estimate: f64, mc: &McEstimate) -> bool {
    (estimate - mc.mean).abs() <= (0.02 * mc.mean.abs()).max(3.0 * mc.std_error)
}

#[derive(Debug, Clone, Copy)]
pub struct Check {
    /// Shifted time, as in the time series.
    pub t: f64,
    pub poc: f64,
    pub risk: f64,
    pub circ_poc: McEstimate,
    pub circ_risk: McEstimate,
    pub rect_poc: McEstimate,
    pub rect_risk: McEstimate,
}

impl Check {
    pub fn over_ok(&self) -> bool {
        over_approximates(self.poc, &self.rect_poc) && over_approximates(self.risk, &self.rect_risk)
    }

    pub fn agree_ok(&self) -> bool {
        agrees(self.poc, &self.circ_poc) && agrees(self.risk, &self.circ_risk)
    }
}

/// Compares the estimates with both oracles at shifted times `times`.
pub fn validate(s: &Scenario, samples: u64, seed: u64, times: &[f64]) -> CliResult<Vec<Check>> {
    if samples < MIN_VALIDATION_SAMPLES {
        return Err(CliError::Config(format!(
            "validation needs at least {MIN_VALIDATION_SAMPLES} samples, got {samples}"
        )));
    }
    let est = s.estimator()?;
    let (ego_spec, obj_spec) = (s.ego_spec()?, s.obj_spec()?);
    let ego = cover_rectangle(&ego_spec, s.ego.circles)?;
    let obj = cover_rectangle(&obj_spec, s.object.circles)?;
    let model = est.severity();
    let shift = s.contact_time()?.unwrap_or(0.0);
    times
        .iter()
        .map(|&t| {
            let b = s.belief_at(t + shift)?;
            let circ = |mode| mc_circ(&b, &ego, &obj, model, samples, seed, mode);
            let rect = |mode| mc_rect(&b, &ego_spec, &obj_spec, model, samples, seed, mode);
            Ok(Check {
                t,
                poc: est.estimate_poc(&b)?,
                risk: est.estimate_risk(&b)?,
                circ_poc: circ(McMode::Poc)?,
                circ_risk: circ(McMode::Risk)?,
                rect_poc: rect(McMode::Poc)?,
                rect_risk: rect(McMode::Risk)?,
            })
        })
        .collect()
}
