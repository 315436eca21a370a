//! Scenario files: two actors under constant velocity, the object's belief in
//! world coordinates, severity weights and the simulated time span.

use std::f64::consts::PI;
use std::path::Path;

use circrisk::geometry::{cover_rectangle, wrap_signed};
use circrisk::oracle::{obb_intersects, OrientedBox};
use circrisk::{
    CollisionCase, FootprintSpec, Gaussian1D, GridResolution, RelativeBelief, RiskEstimator,
    SeverityModel, VelocityWindow, WrappedGaussian,
};
use serde::{Deserialize, Deserializer};

use crate::error::{CliError, CliResult};

/// Contact times are resolved to this many seconds.
const CONTACT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub ego: EgoConfig,
    pub object: ObjectConfig,
    pub severity: SeverityConfig,
    pub sim: SimConfig,
    #[serde(default)]
    pub grid: Option<GridConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgoConfig {
    pub x: f64,
    pub y: f64,
    #[serde(deserialize_with = "angle")]
    pub heading: f64,
    pub speed: f64,
    pub length: f64,
    pub width: f64,
    pub mass: f64,
    pub circles: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectConfig {
    pub x: f64,
    pub y: f64,
    #[serde(deserialize_with = "angle")]
    pub heading: f64,
    pub speed: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    #[serde(deserialize_with = "angle")]
    pub sigma_heading: f64,
    pub sigma_speed: f64,
    pub speed_window: [f64; 2],
    pub length: f64,
    pub width: f64,
    pub mass: f64,
    pub circles: usize,
}

/// Matrices are written with rows for ego circles and columns for object
/// circles, both ordered front to rear.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeverityConfig {
    pub weights: Vec<Vec<f64>>,
    #[serde(default)]
    pub cases: Option<Vec<Vec<String>>>,
    #[serde(default = "yes")]
    pub clamp: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_phi: usize,
    pub n_rho: usize,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AngleRepr {
    Number(f64),
    Text(String),
}

fn angle<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    match AngleRepr::deserialize(d)? {
        AngleRepr::Number(v) => Ok(v),
        AngleRepr::Text(s) => parse_angle(&s).map_err(serde::de::Error::custom),
    }
}

/// Parses `[-][k][*]pi[/d]` or a plain number, e.g. "pi", "-pi/2", "3*pi/4".
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let bad = || format!("cannot parse angle '{text}'");
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.as_str()),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (body, 1.0),
    };
    let coef = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(k) => k
            .strip_suffix('*')
            .unwrap_or(k)
            .parse::<f64>()
            .map_err(|_| bad())?,
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let coef = if num.ends_with("pi") { coef * PI } else { coef };
    let v = sign * coef / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

impl Scenario {
    pub fn parse(text: &str) -> CliResult<Self> {
        let s: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> CliResult<()> {
        let sim = &self.sim;
        if !(sim.dt > 0.0 && sim.dt.is_finite()) {
            return Err(CliError::Config(format!(
                "dt must be positive, got {}",
                sim.dt
            )));
        }
        if !(sim.t_start < sim.t_end && sim.t_start.is_finite() && sim.t_end.is_finite()) {
            return Err(CliError::Config(format!(
                "t_start must be below t_end, got {} and {}",
                sim.t_start, sim.t_end
            )));
        }
        let finite = [self.ego.x, self.ego.y, self.ego.heading, self.ego.speed]
            .into_iter()
            .chain([self.object.x, self.object.y, self.object.heading])
            .all(f64::is_finite);
        if !finite {
            return Err(CliError::Config("poses and speeds must be finite".into()));
        }
        self.belief_at(sim.t_start)?;
        self.severity_model()?;
        self.resolution()?;
        Ok(())
    }

    pub fn ego_spec(&self) -> CliResult<FootprintSpec> {
        Ok(FootprintSpec::new(
            self.ego.length,
            self.ego.width,
            self.ego.mass,
        )?)
    }

    pub fn obj_spec(&self) -> CliResult<FootprintSpec> {
        Ok(FootprintSpec::new(
            self.object.length,
            self.object.width,
            self.object.mass,
        )?)
    }

    pub fn resolution(&self) -> CliResult<GridResolution> {
        match self.grid {
            Some(g) => Ok(GridResolution::new(g.n_phi, g.n_rho)?),
            None => Ok(GridResolution::default()),
        }
    }

    /// Severity model in rear-first circle order.
    pub fn severity_model(&self) -> CliResult<SeverityModel> {
        let (n_e, n_o) = (self.ego.circles, self.object.circles);
        let weights = rear_first(&self.severity.weights, n_e, n_o, "weights")?;
        let model = match &self.severity.cases {
            Some(names) => {
                let cases = rear_first(names, n_e, n_o, "cases")?
                    .iter()
                    .map(|n| n.parse::<CollisionCase>())
                    .collect::<circrisk::Result<Vec<_>>>()?;
                SeverityModel::new(self.ego.mass, self.object.mass, n_e, n_o, weights, cases)?
            }
            None => {
                let ego = cover_rectangle(&self.ego_spec()?, n_e)?;
                let obj = cover_rectangle(&self.obj_spec()?, n_o)?;
                SeverityModel::with_default_cases(
                    self.ego.mass,
                    self.object.mass,
                    &ego,
                    &obj,
                    weights,
                )?
            }
        };
        Ok(model.with_clamp(self.severity.clamp))
    }

    pub fn estimator(&self) -> CliResult<RiskEstimator> {
        self.estimator_at(self.resolution()?)
    }

    pub fn estimator_at(&self, resolution: GridResolution) -> CliResult<RiskEstimator> {
        Ok(RiskEstimator::initialize(
            &self.ego_spec()?,
            &self.obj_spec()?,
            self.ego.circles,
            self.object.circles,
            self.severity_model()?,
            resolution,
        )?)
    }

    /// Mean world poses `(x, y, heading)` of ego and object at time `t`.
    pub fn mean_poses(&self, t: f64) -> ((f64, f64, f64), (f64, f64, f64)) {
        let e = &self.ego;
        let o = &self.object;
        let (se, ce) = e.heading.sin_cos();
        let (so, co) = o.heading.sin_cos();
        (
            (e.x + e.speed * ce * t, e.y + e.speed * se * t, e.heading),
            (o.x + o.speed * co * t, o.y + o.speed * so * t, o.heading),
        )
    }

    /// Object belief relative to the ego at time `t`. Position and heading
    /// sigmas are taken as ego-frame values at every step.
    pub fn belief_at(&self, t: f64) -> CliResult<RelativeBelief> {
        let ((ex, ey, eh), (ox, oy, oh)) = self.mean_poses(t);
        let (s, c) = eh.sin_cos();
        let (dx, dy) = (ox - ex, oy - ey);
        let o = &self.object;
        let belief = RelativeBelief {
            pos_x: Gaussian1D::new(c * dx + s * dy, o.sigma_x)?,
            pos_y: Gaussian1D::new(-s * dx + c * dy, o.sigma_y)?,
            heading: WrappedGaussian::new(wrap_signed(oh - eh), o.sigma_heading)?,
            speed: Gaussian1D::new(o.speed, o.sigma_speed)?,
            window: VelocityWindow::new(o.speed_window[0], o.speed_window[1])?,
            ego_speed: self.ego.speed,
        };
        belief.validate()?;
        Ok(belief)
    }

    fn boxes_at(&self, t: f64) -> CliResult<(OrientedBox, OrientedBox)> {
        let ((ex, ey, eh), (ox, oy, oh)) = self.mean_poses(t);
        Ok((
            OrientedBox::new((ex, ey), eh, self.ego.length, self.ego.width)?,
            OrientedBox::new((ox, oy), oh, self.object.length, self.object.width)?,
        ))
    }

    fn touching(&self, t: f64) -> CliResult<bool> {
        let (a, b) = self.boxes_at(t)?;
        Ok(obb_intersects(&a, &b))
    }

    /// First time within the simulated span at which the mean rectangular
    /// footprints touch, or `None` if they never do.
    pub fn contact_time(&self) -> CliResult<Option<f64>> {
        let (t0, t1, dt) = (self.sim.t_start, self.sim.t_end, self.sim.dt);
        if self.touching(t0)? {
            return Ok(Some(t0));
        }
        let steps = ((t1 - t0) / dt).ceil() as usize;
        let mut lo = t0;
        for k in 1..=steps {
            let hi = (t0 + k as f64 * dt).min(t1);
            if self.touching(hi)? {
                let mut hi = hi;
                while hi - lo > CONTACT_TOL {
                    let mid = 0.5 * (lo + hi);
                    if self.touching(mid)? {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Ok(Some(hi));
            }
            lo = hi;
        }
        Ok(None)
    }

    /// Simulation times `t_start + k·dt` up to `t_end` inclusive.
    pub fn times(&self) -> Vec<f64> {
        let (t0, t1, dt) = (self.sim.t_start, self.sim.t_end, self.sim.dt);
        let n = ((t1 - t0) / dt + 1e-9).floor() as usize;
        (0..=n).map(|k| t0 + k as f64 * dt).collect()
    }
}

/// Converts a front-to-rear matrix to a rear-first, row-major vector.
fn rear_first<T: Clone>(rows: &[Vec<T>], n_e: usize, n_o: usize, what: &str) -> CliResult<Vec<T>> {
    if rows.len() != n_e || rows.iter().any(|r| r.len() != n_o) {
        return Err(CliError::Config(format!(
            "severity {what} must be a {n_e}x{n_o} matrix"
        )));
    }
    Ok(rows
        .iter()
        .rev()
        .flat_map(|r| r.iter().rev().cloned())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD_ON: &str = include_str!("../scenarios/case_1_head_on.toml");

    #[test]
    fn angle_expressions() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle(" 1.5 ").unwrap(), 1.5);
        assert_eq!(parse_angle("1/4").unwrap(), 0.25);
        assert!(parse_angle("tau").is_err());
        assert!(parse_angle("pi/0").is_err());
    }

    #[test]
    fn relative_belief_in_ego_frame() {
        let s = Scenario::parse(HEAD_ON).unwrap();
        let b = s.belief_at(0.0).unwrap();
        assert!((b.pos_x.mean - 30.0).abs() < 1e-12);
        assert!(b.pos_y.mean.abs() < 1e-12);
        assert!((b.heading.mean.abs() - PI).abs() < 1e-12);
        let later = s.belief_at(0.5).unwrap();
        assert!((b.pos_x.mean - later.pos_x.mean - 10.0).abs() < 1e-12);

        let mut same = s.clone();
        same.object.x = same.ego.x;
        same.object.y = same.ego.y;
        same.object.heading = same.ego.heading;
        same.object.speed = same.ego.speed;
        let b = same.belief_at(1.0).unwrap();
        assert_eq!(
            (b.pos_x.mean, b.pos_y.mean, b.heading.mean),
            (0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn rotated_pose_maps_into_ego_axes() {
        let mut s = Scenario::parse(HEAD_ON).unwrap();
        s.ego = EgoConfig {
            x: 1.0,
            y: 2.0,
            heading: PI / 2.0,
            speed: 0.0,
            ..s.ego
        };
        s.object.x = 1.0;
        s.object.y = 7.0;
        s.object.heading = 0.0;
        let b = s.belief_at(0.0).unwrap();
        assert!((b.pos_x.mean - 5.0).abs() < 1e-12);
        assert!(b.pos_y.mean.abs() < 1e-12);
        assert!((b.heading.mean + PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn weights_are_reversed_to_rear_first() {
        let s = Scenario::parse(HEAD_ON).unwrap();
        let m = s.severity_model().unwrap();
        use circrisk::CirclePair;
        assert_eq!(m.weight(CirclePair::new(2, 2)), 5.0);
        assert_eq!(m.weight(CirclePair::new(2, 1)), 20.0);
        assert_eq!(m.weight(CirclePair::new(1, 2)), 20.0);
        assert_eq!(m.weight(CirclePair::new(0, 0)), 1.0);
        assert_eq!(m.case(CirclePair::new(2, 2)), CollisionCase::HeadOn);
    }

    #[test]
    fn head_on_contact_time() {
        let s = Scenario::parse(HEAD_ON).unwrap();
        let t = s.contact_time().unwrap().unwrap();
        assert!((t - 1.25).abs() < 1e-8, "{t}");
    }

    #[test]
    fn rejects_bad_config() {
        let swap = |from: &str, to: &str| Scenario::parse(&HEAD_ON.replacen(from, to, 1));
        assert!(matches!(
            swap("dt = 0.01", "dt = 0.0"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            swap("t_end = 4.0", "t_end = -1.0"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            swap("sigma_x = 1.5", "sigma_x = -1.5"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            swap("circles = 3", "circles = 2"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            swap("heading = 0.0", "heading = \"up\""),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            swap("[sim]", "[simulation]"),
            Err(CliError::Config(_))
        ));
    }
}
