//! Two-phase risk estimator.
//!
//! Initialization decomposes the heading set of every node of a polar grid
//! over the relative position; it depends only on geometry. Estimation then
//! weighs the stored pieces by the heading, position and speed belief.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::distributions::{Gaussian1D, HeadingKernel, VelocityWindow, WrappedGaussian};
use crate::error::{config, Result, RiskError};
use crate::geometry::{
    cover_rectangle, radial_bound, to_polar, wrap_angle, FootprintSpec, MultiCircleApprox,
    PolarPoint,
};
use crate::intervals::{
    disjoint_decomposition, AngleInterval, CirclePair, LabeledInterval, LabeledIntervalSet,
    PairIntervals, MAX_PAIRS,
};
use crate::severity::{CollisionCase, SeverityModel, VelocityMoments};

/// Belief over the object's state relative to the ego, in the ego frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeBelief {
    pub pos_x: Gaussian1D,
    pub pos_y: Gaussian1D,
    pub heading: WrappedGaussian,
    pub speed: Gaussian1D,
    pub window: VelocityWindow,
    pub ego_speed: f64,
}

impl RelativeBelief {
    pub fn validate(&self) -> Result<()> {
        self.pos_x.validate()?;
        self.pos_y.validate()?;
        self.heading.validate()?;
        self.speed.validate()?;
        self.window.validate()?;
        if !self.ego_speed.is_finite() {
            return config("ego speed must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridResolution {
    pub n_phi: usize,
    pub n_rho: usize,
}

impl GridResolution {
    pub const MIN: usize = 8;
    pub const MAX: usize = 4096;

    pub fn new(n_phi: usize, n_rho: usize) -> Result<Self> {
        let r = Self { n_phi, n_rho };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("phi", self.n_phi), ("rho", self.n_rho)] {
            if !(Self::MIN..=Self::MAX).contains(&n) {
                return config(format!(
                    "{name} resolution {n} outside [{}, {}]",
                    Self::MIN,
                    Self::MAX
                ));
            }
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Self {
            n_phi: 2 * self.n_phi,
            n_rho: 2 * self.n_rho,
        }
    }
}

/// Radial resolution limits accuracy: pair contacts switch on and off along
/// each ray, so the default spends more nodes on `ρ` than on `φ`.
impl Default for GridResolution {
    fn default() -> Self {
        Self {
            n_phi: 192,
            n_rho: 128,
        }
    }
}

/// Composite Simpson weights for `n` equally spaced nodes on `[a, b]`. An
/// even node count closes with a three-eighths panel.
fn simpson_weights(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (b - a) / (n - 1) as f64;
    let nodes: Vec<f64> = (0..n).map(|i| a + i as f64 * h).collect();
    let mut w = vec![0.0; n];
    let simpson_panels = if (n - 1).is_multiple_of(2) { n - 1 } else { n - 4 };
    for p in (0..simpson_panels).step_by(2) {
        w[p] += h / 3.0;
        w[p + 1] += 4.0 * h / 3.0;
        w[p + 2] += h / 3.0;
    }
    if simpson_panels != n - 1 {
        let s = simpson_panels;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    (nodes, w)
}

/// Gauss-Legendre nodes and weights for `n` points on `[a, b]`. The polar
/// Jacobian makes the radial integrand smooth but not flat at `ρ = 0`, where
/// composite rules lose accuracy for narrow beliefs; Gauss-Legendre has no
/// node at the ends and no endpoint error term.
fn gauss_legendre(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n(x) and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
            }
            let p = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = mid - half * x;
        nodes[n - 1 - i] = mid + half * x;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    (nodes, weights)
}

/// Trapezoid weights for `n` nodes on a full period, exact for
/// trigonometric polynomials of degree below `n`.
fn periodic_weights(n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = TAU / n as f64;
    ((0..n).map(|i| i as f64 * h).collect(), vec![h; n])
}

const FULL: u16 = u16::MAX;

/// One heading piece of a node: endpoints as indices into the node's
/// endpoint list, and the coefficient row of its label set.
#[derive(Debug, Clone, Copy)]
struct PackedArc {
    lo: u16,
    hi: u16,
    len: f64,
    row: u32,
}

#[derive(Debug, Clone, Copy, Default)]
struct NodeSpan {
    endpoints: (u32, u32),
    arcs: (u32, u32),
}

/// Per-label-set severity coefficients, `Σ c₁` of member pairs by case,
/// divided by the set size.
#[derive(Debug, Clone)]
struct CoefficientRow {
    mask: u64,
    by_case: [f64; 5],
}

/// Polar grid over the relative position with the labeled heading
/// decomposition of every node.
///
/// Both coverings lie on their longitudinal axes, so the node at `-φ` holds
/// the decomposition at `φ` reflected through `θ = 0`. Only rows with
/// `i <= n_phi / 2` are stored.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    phi: Vec<f64>,
    n_stored: usize,
    phi_weights: Vec<f64>,
    rho: Vec<f64>,
    rho_weights: Vec<f64>,
    n_obj: usize,
    spans: Vec<NodeSpan>,
    endpoints: Vec<f64>,
    arcs: Vec<PackedArc>,
    rows: Vec<CoefficientRow>,
}

/// Decomposition of one node before coefficient rows are shared.
struct LocalNode {
    endpoints: Vec<f64>,
    arcs: Vec<(u16, u16, f64, u64)>,
}

fn pack_node(set: &LabeledIntervalSet, n_obj: usize) -> LocalNode {
    let mut endpoints: Vec<f64> = Vec::new();
    let index_of = |angle: f64, endpoints: &mut Vec<f64>| -> u16 {
        let a = wrap_angle(angle);
        match endpoints.iter().position(|&e| (e - a).abs() <= 1e-12) {
            Some(i) => i as u16,
            None => {
                endpoints.push(a);
                (endpoints.len() - 1) as u16
            }
        }
    };
    let mut arcs = Vec::with_capacity(set.len());
    for e in &set.entries {
        let mask = e
            .labels
            .iter()
            .fold(0u64, |m, p| m | 1 << (p.ego * n_obj + p.obj));
        match e.interval {
            AngleInterval::Full => arcs.push((FULL, FULL, TAU, mask)),
            AngleInterval::Arc { lo, hi } => {
                let a = index_of(lo, &mut endpoints);
                let b = index_of(hi, &mut endpoints);
                arcs.push((a, b, hi - lo, mask));
            }
            AngleInterval::Empty => {}
        }
    }
    LocalNode { endpoints, arcs }
}

impl QuadratureGrid {
    fn build(
        ego: &MultiCircleApprox,
        obj: &MultiCircleApprox,
        rho_bar: f64,
        res: GridResolution,
    ) -> Self {
        let (phi, phi_weights) = periodic_weights(res.n_phi);
        let (rho, rho_weights) = gauss_legendre(0.0, rho_bar, res.n_rho);
        let n_stored = res.n_phi / 2 + 1;
        let local: Vec<Vec<LocalNode>> = phi[..n_stored]
            .par_iter()
            .map(|&p| {
                rho.iter()
                    .map(|&r| {
                        let raw = PairIntervals::compute(PolarPoint { rho: r, phi: p }, ego, obj);
                        pack_node(&disjoint_decomposition(&raw), obj.count())
                    })
                    .collect()
            })
            .collect();

        let mut grid = Self {
            phi,
            n_stored,
            phi_weights,
            rho,
            rho_weights,
            n_obj: obj.count(),
            spans: Vec::with_capacity(n_stored * res.n_rho),
            endpoints: Vec::new(),
            arcs: Vec::new(),
            rows: Vec::new(),
        };
        let mut row_of: HashMap<u64, u32> = HashMap::new();
        for node in local.into_iter().flatten() {
            let ep_start = grid.endpoints.len() as u32;
            let arc_start = grid.arcs.len() as u32;
            grid.endpoints.extend_from_slice(&node.endpoints);
            for (lo, hi, len, mask) in node.arcs {
                let next = row_of.len() as u32;
                let row = *row_of.entry(mask).or_insert_with(|| {
                    grid.rows.push(CoefficientRow {
                        mask,
                        by_case: [0.0; 5],
                    });
                    next
                });
                grid.arcs.push(PackedArc { lo, hi, len, row });
            }
            grid.spans.push(NodeSpan {
                endpoints: (ep_start, grid.endpoints.len() as u32),
                arcs: (arc_start, grid.arcs.len() as u32),
            });
        }
        grid
    }

    fn set_coefficients(&mut self, model: &SeverityModel) {
        let n_obj = self.n_obj;
        for row in &mut self.rows {
            let tau = row.mask.count_ones() as f64;
            row.by_case = [0.0; 5];
            for b in (0..MAX_PAIRS).filter(|b| row.mask >> b & 1 == 1) {
                let pair = CirclePair::new(b / n_obj, b % n_obj);
                row.by_case[model.case(pair).index()] += model.c1(pair) / tau;
            }
        }
    }

    /// Row `i` mirrored onto its stored row.
    fn stored_row(&self, i: usize) -> usize {
        let n = self.phi.len();
        if i < self.n_stored {
            i
        } else {
            n - i
        }
    }

    /// The unstored row reflecting stored row `s`, if any.
    fn mirror_row(&self, s: usize) -> Option<usize> {
        let m = (self.phi.len() - s) % self.phi.len();
        (m != s).then_some(m)
    }

    pub fn phi_nodes(&self) -> &[f64] {
        &self.phi
    }

    pub fn phi_weights(&self) -> &[f64] {
        &self.phi_weights
    }

    pub fn rho_nodes(&self) -> &[f64] {
        &self.rho
    }

    pub fn rho_weights(&self) -> &[f64] {
        &self.rho_weights
    }

    /// Number of distinct label sets across all nodes.
    pub fn label_set_count(&self) -> usize {
        self.rows.len()
    }

    /// Stored decomposition at node `(i_phi, i_rho)`.
    pub fn node_set(&self, i_phi: usize, i_rho: usize) -> LabeledIntervalSet {
        let s = self.stored_row(i_phi);
        let mirrored = s != i_phi;
        let span = self.spans[s * self.rho.len() + i_rho];
        let eps = &self.endpoints[span.endpoints.0 as usize..span.endpoints.1 as usize];
        let mut entries: Vec<LabeledInterval> = self.arcs
            [span.arcs.0 as usize..span.arcs.1 as usize]
            .iter()
            .map(|a| {
                let interval = if a.lo == FULL {
                    AngleInterval::Full
                } else if mirrored {
                    let hi = wrap_angle(-eps[a.hi as usize]);
                    AngleInterval::arc(hi, hi + a.len)
                } else {
                    let lo = eps[a.lo as usize];
                    AngleInterval::arc(lo, lo + a.len)
                };
                let mask = self.rows[a.row as usize].mask;
                let labels = (0..MAX_PAIRS)
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| CirclePair::new(b / self.n_obj, b % self.n_obj))
                    .collect();
                LabeledInterval { interval, labels }
            })
            .collect();
        if mirrored {
            let start = |e: &LabeledInterval| match e.interval {
                AngleInterval::Arc { lo, .. } => lo,
                _ => 0.0,
            };
            entries.sort_by(|a, b| {
                b.labels
                    .len()
                    .cmp(&a.labels.len())
                    .then_with(|| a.labels.cmp(&b.labels))
                    .then_with(|| start(a).total_cmp(&start(b)))
            });
        }
        LabeledIntervalSet { entries }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quantity {
    Risk,
    Poc,
}

/// Position densities below `exp(-CUTOFF)` times their peak are skipped.
const DENSITY_CUTOFF: f64 = 36.0;

/// Collision risk and probability estimator for one pair of footprints.
#[derive(Debug, Clone)]
pub struct RiskEstimator {
    ego: MultiCircleApprox,
    obj: MultiCircleApprox,
    severity: SeverityModel,
    grid: QuadratureGrid,
    rho_bar: f64,
}

impl RiskEstimator {
    pub fn initialize(
        ego_spec: &FootprintSpec,
        obj_spec: &FootprintSpec,
        n_ego: usize,
        n_obj: usize,
        severity: SeverityModel,
        resolution: GridResolution,
    ) -> Result<Self> {
        let ego = cover_rectangle(ego_spec, n_ego)?;
        let obj = cover_rectangle(obj_spec, n_obj)?;
        Self::from_circles(ego, obj, severity, resolution)
    }

    pub fn from_circles(
        ego: MultiCircleApprox,
        obj: MultiCircleApprox,
        severity: SeverityModel,
        resolution: GridResolution,
    ) -> Result<Self> {
        resolution.validate()?;
        if severity.n_ego() != ego.count() || severity.n_obj() != obj.count() {
            return config(format!(
                "severity model is {}x{} but the coverings have {}x{} circles",
                severity.n_ego(),
                severity.n_obj(),
                ego.count(),
                obj.count()
            ));
        }
        if ego.count() * obj.count() > MAX_PAIRS {
            return config(format!("at most {MAX_PAIRS} circle pairs are supported"));
        }
        let rho_bar = radial_bound(&ego, &obj);
        let mut grid = QuadratureGrid::build(&ego, &obj, rho_bar, resolution);
        grid.set_coefficients(&severity);
        Ok(Self {
            ego,
            obj,
            severity,
            grid,
            rho_bar,
        })
    }

    pub fn ego(&self) -> &MultiCircleApprox {
        &self.ego
    }

    pub fn obj(&self) -> &MultiCircleApprox {
        &self.obj
    }

    pub fn severity(&self) -> &SeverityModel {
        &self.severity
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn rho_bar(&self) -> f64 {
        self.rho_bar
    }

    /// Expected collision severity under the belief.
    pub fn estimate_risk(&self, belief: &RelativeBelief) -> Result<f64> {
        belief.validate()?;
        self.integrate(belief, Quantity::Risk)
    }

    /// Probability that the multi-circle footprints intersect.
    pub fn estimate_poc(&self, belief: &RelativeBelief) -> Result<f64> {
        belief.validate()?;
        let poc = self.integrate(belief, Quantity::Poc)?;
        clamp_probability(poc)
    }

    /// Per-call severity of every stored label set.
    fn row_weights(&self, b: &RelativeBelief) -> Result<Vec<f64>> {
        let m = VelocityMoments::new(b.ego_speed, &b.speed, &b.window)?;
        let by_case: Vec<f64> = CollisionCase::ALL
            .iter()
            .map(|&c| self.severity.clamp(m.case_value(c)))
            .collect();
        Ok(self
            .grid
            .rows
            .iter()
            .map(|r| r.by_case.iter().zip(&by_case).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Largest position-grid spacing, against which the belief's spread is
    /// compared.
    fn grid_spacing(&self) -> f64 {
        let d_rho = self
            .grid
            .rho
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max);
        let d_phi = self.grid.phi[1] - self.grid.phi[0];
        d_rho.max(self.rho_bar * d_phi)
    }

    fn integrate(&self, b: &RelativeBelief, q: Quantity) -> Result<f64> {
        if b.pos_x.std.min(b.pos_y.std) < self.grid_spacing() {
            return Ok(self.integrate_narrow(b, q));
        }
        let row_weights = match q {
            Quantity::Risk => self.row_weights(b)?,
            Quantity::Poc => Vec::new(),
        };
        Ok(self.integrate_endpoints(b, q, &row_weights))
    }

    /// Position quadrature over the stored decompositions, with the heading
    /// mass of every piece read from a per-call table of the image sum.
    fn integrate_endpoints(&self, b: &RelativeBelief, q: Quantity, row_weights: &[f64]) -> f64 {
        let kernel = HeadingKernel::new(&b.heading);
        let table = kernel.tabulate();
        let mean = wrap_angle(b.heading.mean);
        let g = &self.grid;
        let n_rho = g.rho.len();
        let (sx, sy) = (b.pos_x.std, b.pos_y.std);
        let norm = 1.0 / (TAU * sx * sy);
        let row_sum = |i: usize, stored: usize, mirrored: bool| -> f64 {
            let (s, c) = g.phi[i].sin_cos();
            let mut offsets = [0.0; 2 * MAX_PAIRS];
            let mut sums = [0.0; 2 * MAX_PAIRS];
            let mut acc = 0.0;
            for k in 0..n_rho {
                let span = g.spans[stored * n_rho + k];
                if span.arcs.0 == span.arcs.1 {
                    continue;
                }
                let r = g.rho[k];
                let zx = (r * c - b.pos_x.mean) / sx;
                let zy = (r * s - b.pos_y.mean) / sy;
                let expo = 0.5 * (zx * zx + zy * zy);
                if expo > DENSITY_CUTOFF {
                    continue;
                }
                let density = norm * r * (-expo).exp();
                let eps = &g.endpoints[span.endpoints.0 as usize..span.endpoints.1 as usize];
                for (j, &e) in eps.iter().enumerate() {
                    // stored endpoints lie in [0, 2π)
                    let mut off = if mirrored { -e - mean } else { e - mean };
                    if off < -PI {
                        off += TAU;
                    }
                    if off < -PI {
                        off += TAU;
                    }
                    if off >= PI {
                        off -= TAU;
                    }
                    offsets[j] = off;
                    sums[j] = table.eval(off);
                }
                let mut inner = 0.0;
                for a in &g.arcs[span.arcs.0 as usize..span.arcs.1 as usize] {
                    let mass = if a.lo == FULL {
                        kernel.total()
                    } else {
                        let (lo, hi) = if mirrored {
                            (a.hi as usize, a.lo as usize)
                        } else {
                            (a.lo as usize, a.hi as usize)
                        };
                        // offsets wrap at the antipode of the mean, so an
                        // arc passing it ends below its start
                        let crosses = offsets[hi] < offsets[lo];
                        kernel.arc_mass(sums[lo], sums[hi], crosses)
                    };
                    inner += match q {
                        Quantity::Poc => mass,
                        Quantity::Risk => mass * row_weights[a.row as usize],
                    };
                }
                acc += g.rho_weights[k] * density * inner;
            }
            g.phi_weights[i] * acc
        };
        let rows: Vec<f64> = (0..g.n_stored)
            .into_par_iter()
            .map(|i| row_sum(i, i, false) + g.mirror_row(i).map_or(0.0, |m| row_sum(m, i, true)))
            .collect();
        rows.iter().sum()
    }

    /// Cartesian Simpson integration over ±6σ around the mean, decomposing
    /// heading sets on the fly. Used when the position belief is too narrow
    /// for the stored grid to resolve.
    fn integrate_narrow(&self, b: &RelativeBelief, q: Quantity) -> f64 {
        const NODES: usize = 41;
        let kernel = HeadingKernel::new(&b.heading);
        let moments = VelocityMoments::new(b.ego_speed, &b.speed, &b.window);
        let by_case: Vec<f64> = match moments {
            Ok(m) => CollisionCase::ALL
                .iter()
                .map(|&c| self.severity.clamp(m.case_value(c)))
                .collect(),
            Err(_) => vec![0.0; 5],
        };
        let (xs, wx) = simpson_weights(
            b.pos_x.mean - 6.0 * b.pos_x.std,
            b.pos_x.mean + 6.0 * b.pos_x.std,
            NODES,
        );
        let (ys, wy) = simpson_weights(
            b.pos_y.mean - 6.0 * b.pos_y.std,
            b.pos_y.mean + 6.0 * b.pos_y.std,
            NODES,
        );
        let rows: Vec<f64> = (0..NODES)
            .into_par_iter()
            .map(|i| {
                let mut acc = 0.0;
                for k in 0..NODES {
                    let p = to_polar(xs[i], ys[k]);
                    if p.rho > self.rho_bar {
                        continue;
                    }
                    let set =
                        disjoint_decomposition(&PairIntervals::compute(p, &self.ego, &self.obj));
                    let inner: f64 = set
                        .entries
                        .iter()
                        .map(|e| {
                            let mass = kernel.mass(&e.interval);
                            match q {
                                Quantity::Poc => mass,
                                Quantity::Risk => {
                                    let sev: f64 = e
                                        .labels
                                        .iter()
                                        .map(|&pair| {
                                            self.severity.c1(pair)
                                                * by_case[self.severity.case(pair).index()]
                                        })
                                        .sum();
                                    mass * sev / e.labels.len() as f64
                                }
                            }
                        })
                        .sum();
                    acc += wy[k] * b.pos_x.pdf(xs[i]) * b.pos_y.pdf(ys[k]) * inner;
                }
                wx[i] * acc
            })
            .collect();
        rows.iter().sum()
    }
}

fn clamp_probability(p: f64) -> Result<f64> {
    if p > 1.0 + 1e-6 || p.is_nan() {
        return Err(RiskError::Consistency(format!(
            "collision probability {p} exceeds 1"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}
