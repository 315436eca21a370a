//! Initialization and per-call estimation timings with randomized inputs.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use circrisk::geometry::cover_rectangle;
use circrisk::{
    FootprintSpec, Gaussian1D, GridResolution, RelativeBelief, RiskEstimator, SeverityModel,
    VelocityWindow, WrappedGaussian,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};

pub const MAX_CIRCLES: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub n_circles: usize,
    pub init_ms: f64,
    pub risk_ms: f64,
    pub poc_ms: f64,
    /// Mean extra time a risk call takes over a collision probability call.
    pub poc_minus_risk_ms: f64,
}

/// Raw per-call durations for one circle count.
#[derive(Debug, Clone, Default)]
pub struct Timings {
    pub init: Vec<Duration>,
    pub risk: Vec<Duration>,
    pub poc: Vec<Duration>,
}

fn ms(d: &[Duration]) -> f64 {
    d.iter().map(Duration::as_secs_f64).sum::<f64>() * 1e3 / d.len().max(1) as f64
}

pub fn median_ms(d: &[Duration]) -> f64 {
    let mut v: Vec<f64> = d.iter().map(|x| x.as_secs_f64() * 1e3).collect();
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => v[n / 2],
        n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

impl Timings {
    pub fn row(&self, n_circles: usize) -> BenchRow {
        let (risk_ms, poc_ms) = (ms(&self.risk), ms(&self.poc));
        BenchRow {
            n_circles,
            init_ms: ms(&self.init),
            risk_ms,
            poc_ms,
            poc_minus_risk_ms: risk_ms - poc_ms,
        }
    }
}

fn random_spec(rng: &mut ChaCha8Rng) -> FootprintSpec {
    FootprintSpec {
        length: rng.gen_range(3.5..6.0),
        width: rng.gen_range(1.6..2.5),
        mass: rng.gen_range(800.0..2500.0),
    }
}

fn random_estimator(
    rng: &mut ChaCha8Rng,
    n: usize,
    resolution: GridResolution,
) -> CliResult<RiskEstimator> {
    let (ego, obj) = (random_spec(rng), random_spec(rng));
    let weights = (0..n * n).map(|_| rng.gen_range(1.0..20.0)).collect();
    let model = SeverityModel::with_default_cases(
        ego.mass,
        obj.mass,
        &cover_rectangle(&ego, n)?,
        &cover_rectangle(&obj, n)?,
        weights,
    )?;
    Ok(RiskEstimator::initialize(
        &ego, &obj, n, n, model, resolution,
    )?)
}

/// Random belief with its mean within `1.5·reach` of the ego.
pub fn random_belief(rng: &mut ChaCha8Rng, reach: f64) -> RelativeBelief {
    let d = rng.gen_range(0.0..1.5 * reach);
    let a = rng.gen_range(-PI..PI);
    let v = rng.gen_range(0.0..20.0);
    let b = RelativeBelief {
        pos_x: Gaussian1D {
            mean: d * a.cos(),
            std: rng.gen_range(0.3..3.0),
        },
        pos_y: Gaussian1D {
            mean: d * a.sin(),
            std: rng.gen_range(0.3..3.0),
        },
        heading: WrappedGaussian::new(rng.gen_range(-PI..PI), rng.gen_range(0.1..PI))
            .expect("valid heading belief"),
        speed: Gaussian1D {
            mean: v,
            std: rng.gen_range(0.5..3.0),
        },
        window: VelocityWindow {
            lo: 0.0,
            hi: v + rng.gen_range(1.0..10.0),
        },
        ego_speed: rng.gen_range(0.0..20.0),
    };
    debug_assert!(b.validate().is_ok());
    b
}

/// Times `init_trials` initializations with random footprints and weights,
/// then `est_trials` risk and collision probability calls on random beliefs,
/// alternating which of the two runs first.
pub fn time_circles(
    n: usize,
    init_trials: usize,
    est_trials: usize,
    seed: u64,
    resolution: GridResolution,
) -> CliResult<Timings> {
    if !(1..=MAX_CIRCLES).contains(&n) {
        return Err(CliError::Config(format!(
            "circle counts must lie in 1..={MAX_CIRCLES}, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
    let mut t = Timings::default();
    for _ in 0..init_trials {
        let start = Instant::now();
        let est = random_estimator(&mut rng, n, resolution)?;
        t.init.push(start.elapsed());
        drop(est);
    }
    let est = random_estimator(&mut rng, n, resolution)?;
    for k in 0..est_trials {
        let b = random_belief(&mut rng, est.rho_bar());
        let time_risk = || -> CliResult<Duration> {
            let start = Instant::now();
            std::hint::black_box(est.estimate_risk(std::hint::black_box(&b))?);
            Ok(start.elapsed())
        };
        let time_poc = || -> CliResult<Duration> {
            let start = Instant::now();
            std::hint::black_box(est.estimate_poc(std::hint::black_box(&b))?);
            Ok(start.elapsed())
        };
        if k % 2 == 0 {
            t.risk.push(time_risk()?);
            t.poc.push(time_poc()?);
        } else {
            t.poc.push(time_poc()?);
            t.risk.push(time_risk()?);
        }
    }
    Ok(t)
}

pub fn bench(
    circles: &[usize],
    init_trials: usize,
    est_trials: usize,
    seed: u64,
) -> CliResult<Vec<BenchRow>> {
    circles
        .iter()
        .map(|&n| {
            time_circles(n, init_trials, est_trials, seed, GridResolution::default())
                .map(|t| t.row(n))
        })
        .collect()
}
