//! Monte Carlo references for the rectangular and multi-circle collision
//! events. Slow and independent of the grid; used only for validation.
//!
//! Samples are drawn in chunks, each from a ChaCha8 stream keyed by the seed
//! and the chunk index, so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::engine::RelativeBelief;
use crate::error::{config, usage, Result};
use crate::geometry::{wrap_angle, FootprintSpec, MultiCircleApprox};
use crate::intervals::CirclePair;
use crate::severity::{CollisionCase, SeverityModel};

pub const MIN_SAMPLES: u64 = 1000;
const CHUNK: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McMode {
    Poc,
    Risk,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Rectangle with its center, heading and extents in a common frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox {
    pub center: (f64, f64),
    pub heading: f64,
    pub length: f64,
    pub width: f64,
}

impl OrientedBox {
    pub fn new(center: (f64, f64), heading: f64, length: f64, width: f64) -> Result<Self> {
        if !(length > 0.0 && width > 0.0 && length.is_finite() && width.is_finite()) {
            return config(format!(
                "box needs positive extents, got {length} x {width}"
            ));
        }
        Ok(Self {
            center,
            heading,
            length,
            width,
        })
    }

    fn axes(&self) -> [(f64, f64); 2] {
        let (s, c) = self.heading.sin_cos();
        [(c, s), (-s, c)]
    }

    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [(f64, f64); 4] {
        let [(ux, uy), (vx, vy)] = self.axes();
        let (hl, hw) = (0.5 * self.length, 0.5 * self.width);
        let (cx, cy) = self.center;
        [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)]
            .map(|(a, b)| (cx + a * ux + b * vx, cy + a * uy + b * vy))
    }

    /// Point in this box's body frame.
    fn body_coords(self, p: (f64, f64)) -> (f64, f64) {
        let [(ux, uy), (vx, vy)] = self.axes();
        let (dx, dy) = (p.0 - self.center.0, p.1 - self.center.1);
        (dx * ux + dy * uy, dx * vx + dy * vy)
    }

    /// Half-extent of the box projected onto a unit axis.
    fn radius_along(&self, axis: (f64, f64)) -> f64 {
        let [(ux, uy), (vx, vy)] = self.axes();
        0.5 * self.length * (axis.0 * ux + axis.1 * uy).abs()
            + 0.5 * self.width * (axis.0 * vx + axis.1 * vy).abs()
    }
}

/// Closed-set overlap by separating axes; touching boxes intersect.
pub fn obb_intersects(a: &OrientedBox, b: &OrientedBox) -> bool {
    let d = (b.center.0 - a.center.0, b.center.1 - a.center.1);
    a.axes().into_iter().chain(b.axes()).all(|axis| {
        (d.0 * axis.0 + d.1 * axis.1).abs() <= a.radius_along(axis) + b.radius_along(axis)
    })
}

/// Innermost point of the overlap region: the point farthest from its
/// boundary, found as the best vertex of the linear program over the eight
/// half-planes bounding both boxes. Ties (a segment of centers) resolve to
/// the mean of the optimal vertices. `None` if the boxes are apart.
pub fn deepest_point(a: &OrientedBox, b: &OrientedBox) -> Option<(f64, f64)> {
    if !obb_intersects(a, b) {
        return None;
    }
    // n · p <= c for unit outward normals n
    let mut planes: Vec<((f64, f64), f64)> = Vec::with_capacity(8);
    for bx in [a, b] {
        for (k, (ux, uy)) in bx.axes().into_iter().enumerate() {
            let half = if k == 0 {
                0.5 * bx.length
            } else {
                0.5 * bx.width
            };
            let along = bx.center.0 * ux + bx.center.1 * uy;
            planes.push(((ux, uy), along + half));
            planes.push(((-ux, -uy), half - along));
        }
    }
    let depth = |p: (f64, f64)| {
        planes
            .iter()
            .map(|(n, c)| c - n.0 * p.0 - n.1 * p.1)
            .fold(f64::INFINITY, f64::min)
    };
    let scale = a.length + a.width + b.length + b.width;
    let mut best = f64::NEG_INFINITY;
    let mut optima: Vec<(f64, f64)> = Vec::new();
    for i in 0..8 {
        for j in i + 1..8 {
            for k in j + 1..8 {
                // n · p + r = c on three planes
                let rows = [planes[i], planes[j], planes[k]];
                let det3 = |m: [[f64; 3]; 3]| {
                    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
                };
                let m = rows.map(|((nx, ny), _)| [nx, ny, 1.0]);
                let det = det3(m);
                if det.abs() < 1e-12 {
                    continue;
                }
                let c = rows.map(|(_, c)| c);
                let col = |k: usize| {
                    let mut mk = m;
                    for r in 0..3 {
                        mk[r][k] = c[r];
                    }
                    det3(mk) / det
                };
                let p = (col(0), col(1));
                let r = depth(p);
                if r > best + 1e-12 * scale {
                    best = r;
                    optima.clear();
                }
                if r >= best - 1e-12 * scale
                    && !optima
                        .iter()
                        .any(|q| (q.0 - p.0).abs() + (q.1 - p.1).abs() < 1e-9 * scale)
                {
                    optima.push(p);
                }
            }
        }
    }
    let k = optima.len() as f64;
    Some((
        optima.iter().map(|p| p.0).sum::<f64>() / k,
        optima.iter().map(|p| p.1).sum::<f64>() / k,
    ))
}

/// Index of the longitudinal segment holding body-frame coordinate `x`,
/// rear segment first.
fn segment_of(x: f64, length: f64, count: usize) -> usize {
    let s = ((x + 0.5 * length) / length * count as f64).floor();
    (s.max(0.0) as usize).min(count - 1)
}

/// One drawn relative configuration and speed.
#[derive(Debug, Clone, Copy)]
struct Draw {
    x: f64,
    y: f64,
    theta: f64,
    speed: f64,
}

fn draw(rng: &mut ChaCha8Rng, b: &RelativeBelief) -> Draw {
    let mut n = || -> f64 { rng.sample(StandardNormal) };
    let x = b.pos_x.mean + b.pos_x.std * n();
    let y = b.pos_y.mean + b.pos_y.std * n();
    let theta = wrap_angle(b.heading.mean + b.heading.std * n());
    let speed = b.speed.mean + b.speed.std * n();
    Draw { x, y, theta, speed }
}

/// Running sums over samples: collision count, and per case the sums of
/// `coef · case(ego term, obj term)` and their cross products.
#[derive(Debug, Clone, Default)]
struct Tally {
    n: u64,
    hits: u64,
    ego_term: f64,
    obj_term: f64,
    by_case: [f64; 5],
    cross: [[f64; 5]; 5],
}

impl Tally {
    fn merge(mut self, o: &Tally) -> Tally {
        self.n += o.n;
        self.hits += o.hits;
        self.ego_term += o.ego_term;
        self.obj_term += o.obj_term;
        for i in 0..5 {
            self.by_case[i] += o.by_case[i];
            for j in 0..5 {
                self.cross[i][j] += o.cross[i][j];
            }
        }
        self
    }

    fn finish(&self, model: &SeverityModel, mode: McMode) -> McEstimate {
        let n = self.n as f64;
        let (mean, var) = match mode {
            McMode::Poc => {
                let p = self.hits as f64 / n;
                (p, p * (1.0 - p) * n / (n - 1.0))
            }
            McMode::Risk => {
                // expected severity is clamped per case on the estimated
                // speed integrals, as the analytic estimator does
                let (i_e, i_o) = (self.ego_term / n, self.obj_term / n);
                let active: Vec<f64> = CollisionCase::ALL
                    .iter()
                    .map(|c| {
                        if model.clamp(c.combine(i_e, i_o)) > 0.0 || !model.clamps() {
                            1.0
                        } else {
                            0.0
                        }
                    })
                    .collect();
                let sum: f64 = (0..5).map(|i| active[i] * self.by_case[i]).sum();
                let sq: f64 = (0..5)
                    .flat_map(|i| (0..5).map(move |j| (i, j)))
                    .map(|(i, j)| active[i] * active[j] * self.cross[i][j])
                    .sum();
                let mean = sum / n;
                (mean, ((sq / n - mean * mean) * n / (n - 1.0)).max(0.0))
            }
        };
        McEstimate {
            mean,
            std_error: (var / n).sqrt(),
            samples: self.n,
        }
    }
}

/// Draws `samples` configurations in deterministic chunks; `coefficients`
/// returns the per-case severity coefficients of a colliding draw.
fn run<F>(
    b: &RelativeBelief,
    model: &SeverityModel,
    samples: u64,
    seed: u64,
    mode: McMode,
    coefficients: F,
) -> Result<McEstimate>
where
    F: Fn(&Draw) -> Option<[f64; 5]> + Sync,
{
    b.validate()?;
    if samples < MIN_SAMPLES {
        return usage(format!(
            "at least {MIN_SAMPLES} samples are required, got {samples}"
        ));
    }
    let v_e2 = b.ego_speed * b.ego_speed;
    let chunks = samples.div_ceil(CHUNK);
    let total = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut t = Tally {
                n: count,
                ..Tally::default()
            };
            for _ in 0..count {
                let d = draw(&mut rng, b);
                // speeds outside the window carry no severity
                let inside = b.window.contains(d.speed);
                let (e, o) = if inside {
                    (v_e2, d.speed * d.speed)
                } else {
                    (0.0, 0.0)
                };
                t.ego_term += e;
                t.obj_term += o;
                let Some(coef) = coefficients(&d) else {
                    continue;
                };
                t.hits += 1;
                if mode == McMode::Poc {
                    continue;
                }
                let s = CollisionCase::ALL.map(|c| coef[c.index()] * c.combine(e, o));
                for i in 0..5 {
                    t.by_case[i] += s[i];
                    for j in 0..5 {
                        t.cross[i][j] += s[i] * s[j];
                    }
                }
            }
            t
        })
        .collect::<Vec<_>>()
        .iter()
        .fold(Tally::default(), |acc, t| acc.merge(t));
    Ok(total.finish(model, mode))
}

fn check_model(model: &SeverityModel, n_ego: usize, n_obj: usize) -> Result<()> {
    if model.n_ego() != n_ego || model.n_obj() != n_obj {
        return config(format!(
            "severity model is {}x{} but the footprints have {}x{} sections",
            model.n_ego(),
            model.n_obj(),
            n_ego,
            n_obj
        ));
    }
    Ok(())
}

/// Risk or collision probability of the rectangular footprints.
///
/// A contact is assigned the case and weight of the longitudinal segments
/// (one per circle of the severity model) of each body holding the
/// innermost point of the overlap region.
pub fn mc_rect(
    belief: &RelativeBelief,
    ego_spec: &FootprintSpec,
    obj_spec: &FootprintSpec,
    severity: &SeverityModel,
    samples: u64,
    seed: u64,
    mode: McMode,
) -> Result<McEstimate> {
    ego_spec.validate()?;
    obj_spec.validate()?;
    let ego = OrientedBox::new((0.0, 0.0), 0.0, ego_spec.length, ego_spec.width)?;
    let (n_e, n_o) = (severity.n_ego(), severity.n_obj());
    run(belief, severity, samples, seed, mode, |d| {
        let obj = OrientedBox {
            center: (d.x, d.y),
            heading: d.theta,
            length: obj_spec.length,
            width: obj_spec.width,
        };
        let p = deepest_point(&ego, &obj)?;
        let pair = CirclePair::new(
            segment_of(ego.body_coords(p).0, ego_spec.length, n_e),
            segment_of(obj.body_coords(p).0, obj_spec.length, n_o),
        );
        let mut coef = [0.0; 5];
        coef[severity.case(pair).index()] = severity.c1(pair);
        Some(coef)
    })
}

/// Risk or collision probability of the multi-circle footprints. A contact
/// averages the severity coefficients of exactly the touching circle pairs.
pub fn mc_circ(
    belief: &RelativeBelief,
    ego: &MultiCircleApprox,
    obj: &MultiCircleApprox,
    severity: &SeverityModel,
    samples: u64,
    seed: u64,
    mode: McMode,
) -> Result<McEstimate> {
    check_model(severity, ego.count(), obj.count())?;
    let reach = (ego.radius() + obj.radius()).powi(2);
    run(belief, severity, samples, seed, mode, |d| {
        let (s, c) = d.theta.sin_cos();
        let mut coef = [0.0; 5];
        let mut touching = 0usize;
        for (j, &oe) in ego.offsets().iter().enumerate() {
            for (l, &oo) in obj.offsets().iter().enumerate() {
                let dx = d.x + oo * c - oe;
                let dy = d.y + oo * s;
                if dx * dx + dy * dy <= reach {
                    let pair = CirclePair::new(j, l);
                    coef[severity.case(pair).index()] += severity.c1(pair);
                    touching += 1;
                }
            }
        }
        (touching > 0).then(|| coef.map(|x| x / touching as f64))
    })
}
