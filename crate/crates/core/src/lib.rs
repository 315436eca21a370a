//! Collision risk between two vehicles under position, heading and speed
//! uncertainty, using multi-circle footprints and analytic heading intervals.
//!
//! [`engine::RiskEstimator`] is the entry point: initialize it once per pair
//! of footprints, then call `estimate_risk` / `estimate_poc` per belief.
//! [`oracle`] holds Monte Carlo references for validation.

pub mod distributions;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod intervals;
pub mod oracle;
pub mod severity;
pub mod special;

pub use distributions::{Gaussian1D, VelocityWindow, WrappedGaussian};
pub use engine::{GridResolution, QuadratureGrid, RelativeBelief, RiskEstimator};
pub use error::{Result, RiskError};
pub use geometry::{FootprintSpec, MultiCircleApprox, PolarPoint};
pub use intervals::{AngleInterval, CirclePair, LabeledInterval, LabeledIntervalSet};
pub use severity::{CollisionCase, SeverityModel};
