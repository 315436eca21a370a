//! Vehicle footprints, their multi-circle coverings and polar coordinates.
//!
//! Every vehicle is described in its own body frame: the longitudinal axis
//! is `+x`, the front of the vehicle points to `+x`. Circle centers lie on the
//! longitudinal axis at signed offsets, sorted from rear to front.

use std::f64::consts::TAU;

use crate::error::{config, Result};

/// Rectangular vehicle footprint and mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootprintSpec {
    pub length: f64,
    pub width: f64,
    pub mass: f64,
}

impl FootprintSpec {
    pub fn new(length: f64, width: f64, mass: f64) -> Result<Self> {
        let spec = Self {
            length,
            width,
            mass,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("length", self.length),
            ("width", self.width),
            ("mass", self.mass),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return config(format!(
                    "footprint {name} must be positive and finite, got {v}"
                ));
            }
        }
        if self.length < self.width {
            return config(format!(
                "footprint length {} is smaller than its width {}",
                self.length, self.width
            ));
        }
        Ok(())
    }
}

/// Equal-radius circles placed equidistantly on the longitudinal axis.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiCircleApprox {
    radius: f64,
    spacing: f64,
    offsets: Vec<f64>,
}

impl MultiCircleApprox {
    /// Circles of `radius` spaced `spacing` apart, centered on the body origin.
    pub fn new(radius: f64, spacing: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return config("a circle covering needs at least one circle");
        }
        if !(radius.is_finite() && radius > 0.0) {
            return config(format!("circle radius must be positive, got {radius}"));
        }
        if !(spacing.is_finite() && spacing >= 0.0) {
            return config(format!(
                "circle spacing must be non-negative, got {spacing}"
            ));
        }
        let spacing = if count == 1 { 0.0 } else { spacing };
        let half_span = 0.5 * spacing * (count - 1) as f64;
        let offsets = (0..count)
            .map(|i| -half_span + spacing * i as f64)
            .collect();
        Ok(Self {
            radius,
            spacing,
            offsets,
        })
    }

    pub fn count(&self) -> usize {
        self.offsets.len()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Signed longitudinal offsets, ascending (rear circle first).
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Whether the point `(x, y)` in the body frame lies in some circle.
    pub fn covers(&self, x: f64, y: f64) -> bool {
        let r2 = self.radius * self.radius;
        self.offsets.iter().any(|&o| (x - o).powi(2) + y * y <= r2)
    }
}

/// Covers a footprint with `count` circles, one circumscribing each of
/// `count` equal longitudinal segments of the rectangle.
pub fn cover_rectangle(spec: &FootprintSpec, count: usize) -> Result<MultiCircleApprox> {
    spec.validate()?;
    if count == 0 {
        return config("a circle covering needs at least one circle");
    }
    let segment = spec.length / count as f64;
    let radius = (0.5 * segment).hypot(0.5 * spec.width);
    let offsets = (0..count)
        .map(|i| -0.5 * spec.length + (i as f64 + 0.5) * segment)
        .collect();
    Ok(MultiCircleApprox {
        radius,
        spacing: if count == 1 { 0.0 } else { segment },
        offsets,
    })
}

/// Largest center-to-center distance at which any ego circle can touch any
/// object circle.
pub fn radial_bound(ego: &MultiCircleApprox, obj: &MultiCircleApprox) -> f64 {
    ego.radius
        + obj.radius
        + 0.5 * obj.spacing * (obj.count() - 1) as f64
        + 0.5 * ego.spacing * (ego.count() - 1) as f64
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_signed(a: f64) -> f64 {
    use std::f64::consts::PI;
    let w = (a + PI).rem_euclid(TAU);
    if w >= TAU {
        -PI
    } else {
        w - PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub rho: f64,
    pub phi: f64,
}

impl PolarPoint {
    /// Builds a polar point, wrapping `phi` into `[0, 2π)`.
    pub fn new(rho: f64, phi: f64) -> Self {
        debug_assert!(rho >= 0.0);
        Self {
            rho,
            phi: wrap_angle(phi),
        }
    }
}

pub fn to_polar(x: f64, y: f64) -> PolarPoint {
    let rho = x.hypot(y);
    if rho == 0.0 {
        return PolarPoint { rho: 0.0, phi: 0.0 };
    }
    PolarPoint {
        rho,
        phi: wrap_angle(y.atan2(x)),
    }
}

pub fn from_polar(p: PolarPoint) -> (f64, f64) {
    let (s, c) = p.phi.sin_cos();
    (p.rho * c, p.rho * s)
}
