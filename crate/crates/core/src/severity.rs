//! Kinetic-energy severity of circle-to-circle contacts and its expectation
//! over the object's speed.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::distributions::{standard_normal_mass, velocity_mass, Gaussian1D, VelocityWindow};
use crate::error::{config, usage, Result, RiskError};
use crate::geometry::MultiCircleApprox;
use crate::intervals::CirclePair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollisionCase {
    HeadOn,
    EgoToObjSide,
    ObjToEgoSide,
    EgoRearEnd,
    ObjRearEnd,
}

impl CollisionCase {
    pub const ALL: [Self; 5] = [
        Self::HeadOn,
        Self::EgoToObjSide,
        Self::ObjToEgoSide,
        Self::EgoRearEnd,
        Self::ObjRearEnd,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::HeadOn => "head_on",
            Self::EgoToObjSide => "ego_to_obj_side",
            Self::ObjToEgoSide => "obj_to_ego_side",
            Self::EgoRearEnd => "ego_rear_end",
            Self::ObjRearEnd => "obj_rear_end",
        }
    }

    /// Speed-squared combination for this case: ego, object, or a sum or
    /// difference of both.
    pub fn combine(self, ego_term: f64, obj_term: f64) -> f64 {
        match self {
            Self::HeadOn => ego_term + obj_term,
            Self::EgoToObjSide => ego_term,
            Self::ObjToEgoSide => obj_term,
            Self::EgoRearEnd => ego_term - obj_term,
            Self::ObjRearEnd => obj_term - ego_term,
        }
    }
}

impl fmt::Display for CollisionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CollisionCase {
    type Err = RiskError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| RiskError::Config(format!("unknown collision case '{s}'")))
    }
}

/// Longitudinal section of a vehicle a circle belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Front,
    Center,
    Rear,
}

impl Section {
    pub fn of_offset(offset: f64) -> Self {
        if offset > 1e-12 {
            Self::Front
        } else if offset < -1e-12 {
            Self::Rear
        } else {
            Self::Center
        }
    }
}

/// Case assignment used when a scenario does not override it.
pub fn default_case(ego: Section, obj: Section) -> CollisionCase {
    use CollisionCase::*;
    use Section::*;
    match (ego, obj) {
        (Front, Front) | (Center, Center) | (Rear, Rear) => HeadOn,
        (Front, Center) | (Rear, Center) => EgoToObjSide,
        (Front, Rear) => EgoRearEnd,
        (Center, Front) | (Center, Rear) => ObjToEgoSide,
        (Rear, Front) => ObjRearEnd,
    }
}

/// Per-pair weights and cases, indexed by circle index (rear circle first).
#[derive(Debug, Clone, PartialEq)]
pub struct SeverityModel {
    ego_mass: f64,
    obj_mass: f64,
    n_ego: usize,
    n_obj: usize,
    weights: Vec<f64>,
    case_map: Vec<CollisionCase>,
    clamp_nonnegative: bool,
}

impl SeverityModel {
    /// `weights` and `case_map` are row-major, one row per ego circle.
    pub fn new(
        ego_mass: f64,
        obj_mass: f64,
        n_ego: usize,
        n_obj: usize,
        weights: Vec<f64>,
        case_map: Vec<CollisionCase>,
    ) -> Result<Self> {
        if !(ego_mass > 0.0 && obj_mass > 0.0 && ego_mass.is_finite() && obj_mass.is_finite()) {
            return config(format!(
                "masses must be positive, got {ego_mass} and {obj_mass}"
            ));
        }
        if n_ego == 0 || n_obj == 0 {
            return config("circle counts must be positive");
        }
        if weights.len() != n_ego * n_obj || case_map.len() != n_ego * n_obj {
            return config(format!(
                "weights and case map must both have {n_ego}x{n_obj} entries, got {} and {}",
                weights.len(),
                case_map.len()
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return config(format!("weights must be finite and nonnegative, got {w}"));
        }
        Ok(Self {
            ego_mass,
            obj_mass,
            n_ego,
            n_obj,
            weights,
            case_map,
            clamp_nonnegative: true,
        })
    }

    /// Cases assigned from the section of each circle.
    pub fn with_default_cases(
        ego_mass: f64,
        obj_mass: f64,
        ego: &MultiCircleApprox,
        obj: &MultiCircleApprox,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let case_map = ego
            .offsets()
            .iter()
            .flat_map(|&e| {
                obj.offsets()
                    .iter()
                    .map(move |&o| default_case(Section::of_offset(e), Section::of_offset(o)))
            })
            .collect();
        Self::new(
            ego_mass,
            obj_mass,
            ego.count(),
            obj.count(),
            weights,
            case_map,
        )
    }

    pub fn with_clamp(mut self, clamp_nonnegative: bool) -> Self {
        self.clamp_nonnegative = clamp_nonnegative;
        self
    }

    pub fn n_ego(&self) -> usize {
        self.n_ego
    }

    pub fn n_obj(&self) -> usize {
        self.n_obj
    }

    pub fn ego_mass(&self) -> f64 {
        self.ego_mass
    }

    pub fn obj_mass(&self) -> f64 {
        self.obj_mass
    }

    pub fn clamps(&self) -> bool {
        self.clamp_nonnegative
    }

    pub fn weight(&self, pair: CirclePair) -> f64 {
        self.weights[self.index(pair)]
    }

    pub fn case(&self, pair: CirclePair) -> CollisionCase {
        self.case_map[self.index(pair)]
    }

    /// Reduced-mass energy factor of a pair, including its weight.
    pub fn c1(&self, pair: CirclePair) -> f64 {
        self.weight(pair) * self.ego_mass * self.obj_mass / (2.0 * (self.ego_mass + self.obj_mass))
    }

    pub(crate) fn check_pair(&self, pair: CirclePair) -> Result<()> {
        if pair.ego >= self.n_ego || pair.obj >= self.n_obj {
            return usage(format!(
                "circle pair ({}, {}) out of range for {}x{} model",
                pair.ego, pair.obj, self.n_ego, self.n_obj
            ));
        }
        Ok(())
    }

    pub(crate) fn clamp(&self, x: f64) -> f64 {
        if self.clamp_nonnegative {
            x.max(0.0)
        } else {
            x
        }
    }

    fn index(&self, pair: CirclePair) -> usize {
        pair.ego * self.n_obj + pair.obj
    }
}

/// Severity of a contact between the given circles at known speeds.
pub fn severity_value(model: &SeverityModel, pair: CirclePair, v_e: f64, v_o: f64) -> Result<f64> {
    model.check_pair(pair)?;
    let raw = model.case(pair).combine(v_e * v_e, v_o * v_o);
    Ok(model.c1(pair) * model.clamp(raw))
}

/// The two speed integrals over the velocity window: `I_e = v_e² P(window)`
/// and `I_o = ∫ v² p(v) dv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityMoments {
    pub i_e: f64,
    pub i_o: f64,
}

impl VelocityMoments {
    pub fn new(v_e: f64, vdist: &Gaussian1D, window: &VelocityWindow) -> Result<Self> {
        vdist.validate()?;
        window.validate()?;
        let i_e = v_e * v_e * velocity_mass(vdist, window);
        let c2 = -vdist.mean / vdist.std;
        let c3 = 1.0 / vdist.std;
        let z_hi = c2 + c3 * window.hi;
        let z_lo = c2 + c3 * window.lo;
        // the erf difference is evaluated as a normal mass to survive far tails
        let bracket = (c2 * c2 + 1.0) * standard_normal_mass(z_lo, z_hi)
            + ((c2 - c3 * window.hi) * (-0.5 * z_hi * z_hi).exp()
                - (c2 - c3 * window.lo) * (-0.5 * z_lo * z_lo).exp())
                / (2.0 * PI).sqrt();
        let i_o = (bracket / (vdist.std * c3 * c3 * c3)).max(0.0);
        Ok(Self { i_e, i_o })
    }

    /// Unscaled, unclamped expectation for a case.
    pub fn case_value(&self, case: CollisionCase) -> f64 {
        case.combine(self.i_e, self.i_o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExpectedPairSeverity {
    pub value: f64,
}

fn pair_expectation(model: &SeverityModel, pair: CirclePair, m: &VelocityMoments) -> f64 {
    model.c1(pair) * model.clamp(m.case_value(model.case(pair)))
}

/// Severity of a pair's contact, in expectation over object speeds inside
/// the window (speeds outside contribute nothing).
pub fn expected_pair_severity(
    model: &SeverityModel,
    pair: CirclePair,
    v_e: f64,
    vdist: &Gaussian1D,
    window: &VelocityWindow,
) -> Result<ExpectedPairSeverity> {
    model.check_pair(pair)?;
    let m = VelocityMoments::new(v_e, vdist, window)?;
    Ok(ExpectedPairSeverity {
        value: pair_expectation(model, pair, &m),
    })
}

/// Mean expected severity over all pairs in contact on one heading piece.
pub fn averaged_entry_severity(
    model: &SeverityModel,
    labels: &[CirclePair],
    v_e: f64,
    vdist: &Gaussian1D,
    window: &VelocityWindow,
) -> Result<ExpectedPairSeverity> {
    if labels.is_empty() {
        return usage("cannot average severity over an empty label set");
    }
    for &p in labels {
        model.check_pair(p)?;
    }
    let m = VelocityMoments::new(v_e, vdist, window)?;
    let sum: f64 = labels.iter().map(|&p| pair_expectation(model, p, &m)).sum();
    Ok(ExpectedPairSeverity {
        value: sum / labels.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single(case: CollisionCase) -> SeverityModel {
        SeverityModel::new(1000.0, 1000.0, 1, 1, vec![1.0], vec![case]).unwrap()
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    fn second_moment_oracle(d: &Gaussian1D, w: &VelocityWindow) -> f64 {
        simpson(|v| v * v * d.pdf(v), w.lo, w.hi, 20_000)
    }

    const P00: CirclePair = CirclePair { ego: 0, obj: 0 };

    #[test]
    fn head_on_by_hand() {
        let v = severity_value(&single(CollisionCase::HeadOn), P00, 15.0, 5.0).unwrap();
        assert!((v - 62_500.0).abs() < 1e-9);
    }

    #[test]
    fn rear_end_cancels_and_clamps() {
        let m = single(CollisionCase::EgoRearEnd);
        assert_eq!(severity_value(&m, P00, 7.0, 7.0).unwrap(), 0.0);
        assert_eq!(severity_value(&m, P00, 5.0, 15.0).unwrap(), 0.0);
        let raw = severity_value(&m.clone().with_clamp(false), P00, 5.0, 15.0).unwrap();
        assert!((raw + 50_000.0).abs() < 1e-9);
    }

    #[test]
    fn speed_integrals_case_one() {
        let d = Gaussian1D::new(5.0, 1.5).unwrap();
        let w = VelocityWindow::new(0.0, 10.0).unwrap();
        let m = VelocityMoments::new(15.0, &d, &w).unwrap();
        assert!((m.i_e - 225.0 * velocity_mass(&d, &w)).abs() < 1e-12);
        assert!((m.i_e - 224.81).abs() < 0.01);
        let oracle = second_moment_oracle(&d, &w);
        assert!(((m.i_o - oracle) / oracle).abs() < 1e-6);
    }

    #[test]
    fn point_mass_limit() {
        let d = Gaussian1D::new(6.0, 1e-3).unwrap();
        let w = VelocityWindow::new(5.0, 7.0).unwrap();
        let model = single(CollisionCase::HeadOn);
        let e = expected_pair_severity(&model, P00, 12.0, &d, &w)
            .unwrap()
            .value;
        let exact = model.c1(P00) * (144.0 + 36.0);
        assert!(((e - exact) / exact).abs() < 1e-4);
    }

    #[test]
    fn entry_averages() {
        let d = Gaussian1D::new(5.0, 1.5).unwrap();
        let w = VelocityWindow::new(0.0, 10.0).unwrap();
        let model = SeverityModel::new(
            1000.0,
            1000.0,
            2,
            2,
            vec![1.0, 2.0, 3.0, 4.0],
            vec![CollisionCase::HeadOn; 4],
        )
        .unwrap();
        let each = |p: CirclePair| {
            expected_pair_severity(&model, p, 15.0, &d, &w)
                .unwrap()
                .value
        };
        let (a, b, c) = (
            CirclePair::new(0, 0),
            CirclePair::new(1, 0),
            CirclePair::new(1, 1),
        );
        let one = averaged_entry_severity(&model, &[a], 15.0, &d, &w)
            .unwrap()
            .value;
        assert_eq!(one, each(a));
        let two = averaged_entry_severity(&model, &[a, b], 15.0, &d, &w)
            .unwrap()
            .value;
        assert!((two - 0.5 * (each(a) + each(b))).abs() < 1e-9);
        let three = averaged_entry_severity(&model, &[a, b, c], 15.0, &d, &w)
            .unwrap()
            .value;
        assert!((three - (each(a) + each(b) + each(c)) / 3.0).abs() < 1e-9);
        assert!(averaged_entry_severity(&model, &[], 15.0, &d, &w).is_err());
    }

    #[test]
    fn side_cases_follow_their_own_speed() {
        let d = Gaussian1D::new(5.0, 1.5).unwrap();
        let w = VelocityWindow::new(0.0, 10.0).unwrap();
        let m = VelocityMoments::new(15.0, &d, &w).unwrap();
        assert_eq!(m.case_value(CollisionCase::EgoToObjSide), m.i_e);
        assert_eq!(m.case_value(CollisionCase::ObjToEgoSide), m.i_o);
    }

    #[test]
    fn default_cases_by_section() {
        let c = MultiCircleApprox::new(1.38, 5.0 / 3.0, 3).unwrap();
        let model =
            SeverityModel::with_default_cases(1000.0, 1000.0, &c, &c, vec![1.0; 9]).unwrap();
        // index 0 is the rear circle, index 2 the front one
        assert_eq!(model.case(CirclePair::new(2, 0)), CollisionCase::EgoRearEnd);
        assert_eq!(model.case(CirclePair::new(0, 2)), CollisionCase::ObjRearEnd);
        assert_eq!(
            model.case(CirclePair::new(2, 1)),
            CollisionCase::EgoToObjSide
        );
        assert_eq!(
            model.case(CirclePair::new(1, 2)),
            CollisionCase::ObjToEgoSide
        );
        assert_eq!(model.case(CirclePair::new(1, 1)), CollisionCase::HeadOn);
        let two = MultiCircleApprox::new(1.0, 2.0, 2).unwrap();
        let m2 = SeverityModel::with_default_cases(1.0, 1.0, &two, &two, vec![1.0; 4]).unwrap();
        assert_eq!(m2.case(CirclePair::new(1, 0)), CollisionCase::EgoRearEnd);
    }

    #[test]
    fn case_names_round_trip() {
        for c in CollisionCase::ALL {
            assert_eq!(c.name().parse::<CollisionCase>().unwrap(), c);
        }
        assert!("sideways".parse::<CollisionCase>().is_err());
    }

    #[test]
    fn invalid_models() {
        assert!(
            SeverityModel::new(0.0, 1.0, 1, 1, vec![1.0], vec![CollisionCase::HeadOn]).is_err()
        );
        assert!(
            SeverityModel::new(1.0, 1.0, 1, 1, vec![-1.0], vec![CollisionCase::HeadOn]).is_err()
        );
        assert!(
            SeverityModel::new(1.0, 1.0, 2, 1, vec![1.0], vec![CollisionCase::HeadOn]).is_err()
        );
        let d = Gaussian1D {
            mean: 1.0,
            std: 0.0,
        };
        let w = VelocityWindow::new(0.0, 1.0).unwrap();
        assert!(expected_pair_severity(&single(CollisionCase::HeadOn), P00, 1.0, &d, &w).is_err());
    }

    proptest! {
        #[test]
        fn second_moment_matches_quadrature(mu in -5.0..25.0f64, sigma in 0.2..5.0f64, lo in -5.0..20.0f64, width in 0.1..20.0f64) {
            let d = Gaussian1D::new(mu, sigma).unwrap();
            let w = VelocityWindow::new(lo, lo + width).unwrap();
            let m = VelocityMoments::new(0.0, &d, &w).unwrap();
            let oracle = second_moment_oracle(&d, &w);
            prop_assume!(oracle > 1e-12);
            prop_assert!(((m.i_o - oracle) / oracle).abs() <= 1e-6, "{} vs {}", m.i_o, oracle);
        }

        #[test]
        fn weight_is_linear(w in 0.0..50.0f64, v_e in 0.0..30.0f64, mu in 0.0..20.0f64) {
            let d = Gaussian1D::new(mu, 1.5).unwrap();
            let win = VelocityWindow::new(0.0, 25.0).unwrap();
            let a = SeverityModel::new(900.0, 1400.0, 1, 1, vec![w], vec![CollisionCase::HeadOn]).unwrap();
            let b = SeverityModel::new(900.0, 1400.0, 1, 1, vec![2.0 * w], vec![CollisionCase::HeadOn]).unwrap();
            let ea = expected_pair_severity(&a, P00, v_e, &d, &win).unwrap().value;
            let eb = expected_pair_severity(&b, P00, v_e, &d, &win).unwrap().value;
            prop_assert_eq!(eb, 2.0 * ea);
        }

        #[test]
        fn near_delta_speed_matches_deterministic(v_e in 0.0..30.0f64, mu in 0.5..30.0f64, k in 0usize..5) {
            let case = CollisionCase::ALL[k];
            let model = single(case);
            let d = Gaussian1D::new(mu, 1e-4).unwrap();
            let win = VelocityWindow::new(mu - 1e-3, mu + 1e-3).unwrap();
            let e = expected_pair_severity(&model, P00, v_e, &d, &win).unwrap().value;
            let exact = severity_value(&model, P00, v_e, mu).unwrap();
            let scale = model.c1(P00) * (v_e * v_e + mu * mu);
            prop_assert!((e - exact).abs() <= 1e-3 * exact.abs().max(1e-3 * scale));
        }

        #[test]
        fn average_is_bounded(ws in proptest::collection::vec(0.0..30.0f64, 9), cases in proptest::collection::vec(0usize..5, 9), mask in 1u32..512) {
            let model = SeverityModel::new(1000.0, 1500.0, 3, 3, ws, cases.iter().map(|&k| CollisionCase::ALL[k]).collect()).unwrap();
            let d = Gaussian1D::new(8.0, 2.0).unwrap();
            let win = VelocityWindow::new(0.0, 15.0).unwrap();
            let labels: Vec<CirclePair> = (0..9).filter(|b| mask >> b & 1 == 1).map(|b| CirclePair::new(b / 3, b % 3)).collect();
            let vals: Vec<f64> = labels.iter().map(|&p| expected_pair_severity(&model, p, 10.0, &d, &win).unwrap().value).collect();
            let avg = averaged_entry_severity(&model, &labels, 10.0, &d, &win).unwrap().value;
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(avg >= lo * (1.0 - 1e-12) && avg <= hi * (1.0 + 1e-12));
        }

        #[test]
        fn masses_are_symmetric(me in 100.0..5000.0f64, mo in 100.0..5000.0f64) {
            let a = SeverityModel::new(me, mo, 1, 1, vec![1.0], vec![CollisionCase::HeadOn]).unwrap();
            let b = SeverityModel::new(mo, me, 1, 1, vec![1.0], vec![CollisionCase::HeadOn]).unwrap();
            prop_assert!((a.c1(P00) - b.c1(P00)).abs() <= 1e-12 * a.c1(P00));
        }
    }
}
