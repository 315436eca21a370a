//! Belief distributions over the object's relative position, heading and speed.

use std::f64::consts::{PI, SQRT_2, TAU};

use crate::error::{config, Result};
use crate::geometry::{from_polar, wrap_signed, PolarPoint};
use crate::intervals::AngleInterval;
use crate::special::{erf, erfc};

const INV_SQRT_TAU: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian1D {
    pub mean: f64,
    pub std: f64,
}

impl Gaussian1D {
    pub fn new(mean: f64, std: f64) -> Result<Self> {
        let g = Self { mean, std };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() || !(self.std > 0.0) || !self.std.is_finite() {
            return config(format!(
                "gaussian needs finite mean and std > 0, got {self:?}"
            ));
        }
        Ok(())
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.std;
        INV_SQRT_TAU / self.std * (-0.5 * z * z).exp()
    }
}

/// Normal distribution on the circle, truncated to `2 n_beta + 1` images.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrappedGaussian {
    pub mean: f64,
    pub std: f64,
    pub n_beta: u32,
}

impl WrappedGaussian {
    pub const DEFAULT_TERMS: u32 = 3;

    pub fn new(mean: f64, std: f64) -> Result<Self> {
        Self::with_terms(mean, std, Self::DEFAULT_TERMS)
    }

    pub fn with_terms(mean: f64, std: f64, n_beta: u32) -> Result<Self> {
        let d = Self { mean, std, n_beta };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() || !(self.std > 0.0) || !self.std.is_finite() {
            return config(format!(
                "wrapped gaussian needs finite mean and std > 0, got {self:?}"
            ));
        }
        if self.n_beta < 3 {
            return config(format!("n_beta must be at least 3, got {}", self.n_beta));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityWindow {
    pub lo: f64,
    pub hi: f64,
}

impl VelocityWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let w = Self { lo, hi };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo <= self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return config(format!(
                "velocity window needs finite lo <= hi, got {self:?}"
            ));
        }
        Ok(())
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

/// Image sum of the error function, shared by every mass evaluation of one
/// heading belief.
///
/// Offsets are always reduced to `[-π, π)` around the mean before the image
/// sum, so the truncated density is exactly periodic.
#[derive(Debug, Clone, Copy)]
pub(crate) struct HeadingKernel {
    mean: f64,
    inv_scale: f64,
    n_beta: i32,
    half_total: f64,
}

impl HeadingKernel {
    pub(crate) fn new(d: &WrappedGaussian) -> Self {
        let mut k = Self {
            mean: d.mean,
            inv_scale: 1.0 / (d.std * SQRT_2),
            n_beta: d.n_beta as i32,
            half_total: 0.0,
        };
        k.half_total = k.image_sum(PI);
        k
    }

    /// `Σ_β erf((x + 2πβ) / (σ√2))` for an offset `x` from the mean.
    #[inline]
    pub(crate) fn image_sum(&self, x: f64) -> f64 {
        let mut s = 0.0;
        for beta in -self.n_beta..=self.n_beta {
            let z = (x + TAU * beta as f64) * self.inv_scale;
            s += if z >= 6.0 {
                1.0
            } else if z <= -6.0 {
                -1.0
            } else {
                erf(z)
            };
        }
        s
    }

    /// Offset of an angle from the mean, in `[-π, π)`.
    #[inline]
    pub(crate) fn offset(&self, theta: f64) -> f64 {
        wrap_signed(theta - self.mean)
    }

    /// Total mass of the truncated density, `≈ 1`.
    #[inline]
    pub(crate) fn total(&self) -> f64 {
        self.half_total
    }

    /// Mass of the arc from offset `a` to offset `b` (both image sums
    /// already evaluated), given whether the arc passes the antipode of the
    /// mean.
    #[inline]
    pub(crate) fn arc_mass(&self, s_a: f64, s_b: f64, crosses_antipode: bool) -> f64 {
        let m = 0.5 * (s_b - s_a);
        if crosses_antipode {
            m + self.half_total
        } else {
            m
        }
    }

    /// `d/dx` of [`image_sum`](Self::image_sum).
    fn image_slope(&self, x: f64) -> f64 {
        let c = 2.0 / PI.sqrt() * self.inv_scale;
        let mut s = 0.0;
        for beta in -self.n_beta..=self.n_beta {
            let z = (x + TAU * beta as f64) * self.inv_scale;
            if z.abs() < 6.0 {
                s += c * (-z * z).exp();
            }
        }
        s
    }

    /// Cubic Hermite table of the image sum over `[-π, π]`, with spacing
    /// at most `σ / 100`.
    pub(crate) fn tabulate(&self) -> HeadingTable {
        let sigma = 1.0 / (self.inv_scale * SQRT_2);
        let n = ((TAU * 100.0 / sigma).ceil() as usize).clamp(256, 1 << 13);
        let step = TAU / n as f64;
        let knots: Vec<[f64; 2]> = (0..=n)
            .map(|i| {
                let x = -PI + i as f64 * step;
                [self.image_sum(x), step * self.image_slope(x)]
            })
            .collect();
        let cells = knots
            .windows(2)
            .map(|w| {
                let ([p0, m0], [p1, m1]) = (w[0], w[1]);
                [
                    p0,
                    m0,
                    3.0 * (p1 - p0) - 2.0 * m0 - m1,
                    2.0 * (p0 - p1) + m0 + m1,
                ]
            })
            .collect();
        HeadingTable {
            inv_step: 1.0 / step,
            last: n - 1,
            cells,
        }
    }

    pub(crate) fn mass(&self, iv: &AngleInterval) -> f64 {
        match *iv {
            AngleInterval::Empty => 0.0,
            AngleInterval::Full => self.half_total,
            AngleInterval::Arc { lo, hi } => {
                let a = self.offset(lo);
                let b = a + (hi - lo);
                if b <= PI {
                    self.arc_mass(self.image_sum(a), self.image_sum(b), false)
                } else {
                    self.arc_mass(self.image_sum(a), self.image_sum(b - TAU), true)
                }
            }
        }
    }
}

/// Tabulated image sum of one heading belief.
pub(crate) struct HeadingTable {
    inv_step: f64,
    last: usize,
    /// Power-basis coefficients of the cubic on each cell, in the cell's
    /// unit coordinate.
    cells: Vec<[f64; 4]>,
}

impl HeadingTable {
    /// Image sum at an offset in `[-π, π]`.
    #[inline]
    pub(crate) fn eval(&self, x: f64) -> f64 {
        let t = (x + PI) * self.inv_step;
        let i = (t as usize).min(self.last);
        let u = t - i as f64;
        let [c0, c1, c2, c3] = self.cells[i];
        c0 + u * (c1 + u * (c2 + u * c3))
    }
}

pub fn wrapped_pdf(d: &WrappedGaussian, theta: f64) -> f64 {
    let x = wrap_signed(theta - d.mean);
    let n = d.n_beta as i32;
    let sum: f64 = (-n..=n)
        .map(|beta| {
            let z = (x + TAU * beta as f64) / d.std;
            (-0.5 * z * z).exp()
        })
        .sum();
    INV_SQRT_TAU / d.std * sum
}

/// Probability that the heading falls in `iv`.
pub fn wrapped_mass(d: &WrappedGaussian, iv: &AngleInterval) -> f64 {
    HeadingKernel::new(d).mass(iv).clamp(0.0, 1.0)
}

/// Density of the relative position in polar coordinates, including the
/// Jacobian `ρ`.
pub fn polar_position_pdf(px: &Gaussian1D, py: &Gaussian1D, p: PolarPoint) -> f64 {
    let (x, y) = from_polar(p);
    let zx = (x - px.mean) / px.std;
    let zy = (y - py.mean) / py.std;
    p.rho / (TAU * px.std * py.std) * (-0.5 * (zx * zx + zy * zy)).exp()
}

/// Probability that the speed falls in the window.
pub fn velocity_mass(d: &Gaussian1D, w: &VelocityWindow) -> f64 {
    standard_normal_mass((w.lo - d.mean) / d.std, (w.hi - d.mean) / d.std)
}

/// `Φ(z_hi) - Φ(z_lo)`, keeping relative accuracy when both ends sit in the
/// same tail.
pub(crate) fn standard_normal_mass(z_lo: f64, z_hi: f64) -> f64 {
    let m = if z_lo >= 0.0 {
        0.5 * (erfc(z_lo / SQRT_2) - erfc(z_hi / SQRT_2))
    } else if z_hi <= 0.0 {
        0.5 * (erfc(-z_hi / SQRT_2) - erfc(-z_lo / SQRT_2))
    } else {
        0.5 * (erf(z_hi / SQRT_2) - erf(z_lo / SQRT_2))
    };
    m.max(0.0)
}
