//! Heading-angle intervals on the circle.
//!
//! For a fixed relative position of the object, each (ego circle, object
//! circle) pair touches for a set of object headings that is a single arc of
//! the circle (or empty, or everything). This module computes those arcs,
//! merges them, and splits their union into disjoint pieces, each tagged with
//! exactly the set of circle pairs in contact on that piece.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use itertools::Itertools;

use crate::error::{usage, Result};
use crate::geometry::{from_polar, wrap_angle, MultiCircleApprox, PolarPoint};

/// Endpoints closer than this are the same angle; pieces shorter than this
/// are dropped.
/// Circle pairs representable in a label mask.
pub const MAX_PAIRS: usize = 64;

pub const ANGLE_TOL: f64 = 1e-12;

/// A closed subset of the circle `[0, 2π)` that is connected.
///
/// An `Arc` has `lo` in `[0, 2π)` and `lo < hi < lo + 2π`; when `hi > 2π` the
/// arc passes through angle 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleInterval {
    Empty,
    Full,
    Arc { lo: f64, hi: f64 },
}

impl AngleInterval {
    /// Normalized arc from `lo` counter-clockwise to `hi` (`hi` measured on
    /// the unwrapped real line, so `hi - lo` is the arc length).
    pub fn arc(lo: f64, hi: f64) -> Self {
        let len = hi - lo;
        if !(len > ANGLE_TOL) {
            return Self::Empty;
        }
        if len >= TAU - ANGLE_TOL {
            return Self::Full;
        }
        let lo = wrap_angle(lo);
        Self::Arc { lo, hi: lo + len }
    }

    pub fn measure(&self) -> f64 {
        match *self {
            Self::Empty => 0.0,
            Self::Full => TAU,
            Self::Arc { lo, hi } => hi - lo,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Self::Empty)
    }

    pub fn contains(&self, theta: f64) -> bool {
        match *self {
            Self::Empty => false,
            Self::Full => true,
            Self::Arc { lo, hi } => {
                let t = wrap_angle(theta);
                (t >= lo && t <= hi) || t + TAU <= hi
            }
        }
    }
}

/// Index pair of an ego circle and an object circle, both zero-based and
/// counted from the rear of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CirclePair {
    pub ego: usize,
    pub obj: usize,
}

impl CirclePair {
    pub fn new(ego: usize, obj: usize) -> Self {
        Self { ego, obj }
    }
}

/// One disjoint piece of the collision heading set.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledInterval {
    pub interval: AngleInterval,
    /// Circle pairs in contact everywhere on `interval`, sorted.
    pub labels: Vec<CirclePair>,
}

impl LabeledInterval {
    /// Number of pairs sharing this piece.
    pub fn weight_count(&self) -> usize {
        self.labels.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledIntervalSet {
    pub entries: Vec<LabeledInterval>,
}

impl LabeledIntervalSet {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn measure(&self) -> f64 {
        self.entries.iter().map(|e| e.interval.measure()).sum()
    }

    /// The piece containing `theta`, if any.
    pub fn entry_at(&self, theta: f64) -> Option<&LabeledInterval> {
        self.entries.iter().find(|e| e.interval.contains(theta))
    }
}

/// The heading interval of every circle pair at one relative position,
/// stored row-major by ego circle.
#[derive(Debug, Clone, PartialEq)]
pub struct PairIntervals {
    n_ego: usize,
    n_obj: usize,
    intervals: Vec<AngleInterval>,
}

impl PairIntervals {
    pub fn new(n_ego: usize, n_obj: usize, intervals: Vec<AngleInterval>) -> Result<Self> {
        if n_ego == 0 || n_obj == 0 || intervals.len() != n_ego * n_obj {
            return usage(format!(
                "expected {n_ego}x{n_obj} pair intervals, got {}",
                intervals.len()
            ));
        }
        if n_ego * n_obj > MAX_PAIRS {
            return usage(format!("at most {MAX_PAIRS} circle pairs are supported"));
        }
        Ok(Self {
            n_ego,
            n_obj,
            intervals,
        })
    }

    /// Intervals of all pairs for the object centered at `pos`.
    pub fn compute(pos: PolarPoint, ego: &MultiCircleApprox, obj: &MultiCircleApprox) -> Self {
        let (x, y) = from_polar(pos);
        let reach = ego.radius() + obj.radius();
        let intervals = ego
            .offsets()
            .iter()
            .flat_map(|&e| {
                obj.offsets()
                    .iter()
                    .map(move |&a| heading_interval(x - e, y, a, reach))
            })
            .collect();
        Self {
            n_ego: ego.count(),
            n_obj: obj.count(),
            intervals,
        }
    }

    pub fn n_ego(&self) -> usize {
        self.n_ego
    }

    pub fn n_obj(&self) -> usize {
        self.n_obj
    }

    pub fn get(&self, pair: CirclePair) -> AngleInterval {
        self.intervals[pair.ego * self.n_obj + pair.obj]
    }

    pub fn as_slice(&self) -> &[AngleInterval] {
        &self.intervals
    }

    fn pair(&self, index: usize) -> CirclePair {
        CirclePair::new(index / self.n_obj, index % self.n_obj)
    }
}

/// Headings at which object circle `l` touches ego circle `j` when the
/// object's center is at `pos` in the ego frame.
pub fn pair_interval(
    j: usize,
    l: usize,
    pos: PolarPoint,
    ego: &MultiCircleApprox,
    obj: &MultiCircleApprox,
) -> Result<AngleInterval> {
    if j >= ego.count() || l >= obj.count() {
        return usage(format!(
            "circle pair ({j}, {l}) out of range for {}x{} circles",
            ego.count(),
            obj.count()
        ));
    }
    let (x, y) = from_polar(pos);
    Ok(heading_interval(
        x - ego.offsets()[j],
        y,
        obj.offsets()[l],
        ego.radius() + obj.radius(),
    ))
}

/// Solves `|v + a (cos θ, sin θ)| <= reach` for θ.
///
/// Expanding the square gives `2 a |v| cos(θ - ψ) <= reach² - |v|² - a²`
/// with `ψ = atan2(v)`.
pub(crate) fn heading_interval(vx: f64, vy: f64, a: f64, reach: f64) -> AngleInterval {
    let v2 = vx * vx + vy * vy;
    let vn = v2.sqrt();
    let r2 = reach * reach;
    if a.abs() * vn <= 1e-15 {
        return if v2 + a * a <= r2 {
            AngleInterval::Full
        } else {
            AngleInterval::Empty
        };
    }
    let c = (r2 - v2 - a * a) / (2.0 * a * vn);
    let psi = vy.atan2(vx);
    if a > 0.0 {
        // cos(θ - ψ) <= c
        if c >= 1.0 {
            AngleInterval::Full
        } else if c < -1.0 {
            AngleInterval::Empty
        } else {
            let h = c.acos();
            AngleInterval::arc(psi + h, psi + TAU - h)
        }
    } else {
        // cos(θ - ψ) >= c
        if c <= -1.0 {
            AngleInterval::Full
        } else if c > 1.0 {
            AngleInterval::Empty
        } else {
            let h = c.acos();
            AngleInterval::arc(psi - h, psi + h)
        }
    }
}

/// Finite union of closed segments of `[0, 2π]`, sorted and disjoint.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct ArcSet {
    segs: Vec<(f64, f64)>,
}

impl ArcSet {
    pub(crate) fn from_interval(iv: &AngleInterval) -> Self {
        let segs = match *iv {
            AngleInterval::Empty => vec![],
            AngleInterval::Full => vec![(0.0, TAU)],
            AngleInterval::Arc { lo, hi } if hi <= TAU => vec![(lo, hi)],
            AngleInterval::Arc { lo, hi } => vec![(0.0, hi - TAU), (lo, TAU)],
        };
        Self::normalized(segs)
    }

    fn normalized(mut segs: Vec<(f64, f64)>) -> Self {
        segs.retain(|s| s.1 - s.0 > ANGLE_TOL);
        segs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(segs.len());
        for s in segs {
            match out.last_mut() {
                Some(last) if s.0 <= last.1 + ANGLE_TOL => last.1 = last.1.max(s.1),
                _ => out.push(s),
            }
        }
        Self { segs: out }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub(crate) fn measure(&self) -> f64 {
        self.segs.iter().map(|s| s.1 - s.0).sum()
    }

    pub(crate) fn contains(&self, x: f64) -> bool {
        self.segs.iter().any(|s| x >= s.0 && x <= s.1)
    }

    pub(crate) fn union(&self, other: &Self) -> Self {
        Self::normalized(self.segs.iter().chain(&other.segs).copied().collect())
    }

    pub(crate) fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut k) = (0, 0);
        while i < self.segs.len() && k < other.segs.len() {
            let (a, b) = (self.segs[i], other.segs[k]);
            let lo = a.0.max(b.0);
            let hi = a.1.min(b.1);
            if hi - lo > ANGLE_TOL {
                out.push((lo, hi));
            }
            if a.1 < b.1 {
                i += 1;
            } else {
                k += 1;
            }
        }
        Self::normalized(out)
    }

    pub(crate) fn difference(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for &(lo, hi) in &self.segs {
            let mut start = lo;
            for &(olo, ohi) in &other.segs {
                if ohi <= start || olo >= hi {
                    continue;
                }
                if olo > start {
                    out.push((start, olo));
                }
                start = start.max(ohi);
                if start >= hi {
                    break;
                }
            }
            if start < hi {
                out.push((start, hi));
            }
        }
        Self::normalized(out)
    }

    /// Connected components as intervals; segments touching 0 and 2π are
    /// joined into one arc through angle 0.
    pub(crate) fn to_intervals(&self) -> Vec<AngleInterval> {
        let n = self.segs.len();
        if n == 0 {
            return vec![];
        }
        let first = self.segs[0];
        let last = self.segs[n - 1];
        let starts_at_zero = first.0 <= ANGLE_TOL;
        let ends_at_tau = last.1 >= TAU - ANGLE_TOL;
        if n == 1 && starts_at_zero && ends_at_tau {
            return vec![AngleInterval::Full];
        }
        if n >= 2 && starts_at_zero && ends_at_tau {
            let mut out: Vec<_> = self.segs[1..n - 1]
                .iter()
                .map(|s| AngleInterval::arc(s.0, s.1))
                .collect();
            out.push(AngleInterval::arc(last.0, first.1 + TAU));
            return out;
        }
        self.segs
            .iter()
            .map(|s| AngleInterval::arc(s.0, s.1))
            .collect()
    }
}

/// Merges intervals into disjoint connected components of their union.
pub fn union_intervals(raw: &[AngleInterval]) -> Vec<AngleInterval> {
    raw.iter()
        .fold(ArcSet::default(), |acc, iv| {
            acc.union(&ArcSet::from_interval(iv))
        })
        .to_intervals()
}

/// Order in which label sets are visited: larger sets first, then
/// lexicographic on the sorted pair indices.
fn label_order(a: u64, b: u64) -> Ordering {
    let by_size = b.count_ones().cmp(&a.count_ones());
    if by_size != Ordering::Equal || a == b {
        return by_size;
    }
    // the set holding the lowest differing index sorts first
    let lowest = (a ^ b).trailing_zeros();
    if a >> lowest & 1 == 1 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn interval_start(iv: &AngleInterval) -> f64 {
    match *iv {
        AngleInterval::Arc { lo, .. } => lo,
        _ => 0.0,
    }
}

fn labeled(raw: &PairIntervals, mut pieces: Vec<(u64, AngleInterval)>) -> LabeledIntervalSet {
    pieces.sort_by(|a, b| {
        label_order(a.0, b.0).then(interval_start(&a.1).total_cmp(&interval_start(&b.1)))
    });
    let entries = pieces
        .into_iter()
        .map(|(mask, interval)| LabeledInterval {
            interval,
            labels: (0..MAX_PAIRS)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| raw.pair(b))
                .collect(),
        })
        .collect();
    LabeledIntervalSet { entries }
}

/// Splits the union of all pair intervals into disjoint pieces labeled with
/// the exact set of pairs in contact on each piece.
///
/// Sweeps the circle once over all interval endpoints. The result equals
/// [`disjoint_decomposition_enumerated`], including entry order, at a cost
/// linear in the number of endpoints rather than in the number of pair
/// subsets.
pub fn disjoint_decomposition(raw: &PairIntervals) -> LabeledIntervalSet {
    let sets: Vec<ArcSet> = raw.intervals.iter().map(ArcSet::from_interval).collect();
    let mut cuts: Vec<f64> = vec![0.0, TAU];
    for s in &sets {
        for &(lo, hi) in &s.segs {
            cuts.push(lo);
            cuts.push(hi);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|b, a| *b - *a <= ANGLE_TOL);

    // runs of constant label mask, as (mask, start, end)
    let mut runs: Vec<(u64, f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= ANGLE_TOL {
            continue;
        }
        let mid = 0.5 * (a + b);
        let mask = sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(mid))
            .fold(0u64, |m, (i, _)| m | 1 << i);
        match runs.last_mut() {
            Some(last) if last.0 == mask => last.2 = b,
            _ => runs.push((mask, a, b)),
        }
    }
    let mut pieces: Vec<(u64, AngleInterval)> = Vec::with_capacity(runs.len());
    let wraps = runs.len() >= 2 && runs[0].0 == runs[runs.len() - 1].0 && runs[0].0 != 0;
    let inner = if wraps {
        &runs[1..runs.len() - 1]
    } else {
        &runs[..]
    };
    for &(mask, a, b) in inner {
        if mask != 0 {
            pieces.push((mask, AngleInterval::arc(a, b)));
        }
    }
    if wraps {
        let (first, last) = (runs[0], runs[runs.len() - 1]);
        pieces.push((first.0, AngleInterval::arc(last.1, first.2 + TAU)));
    }
    labeled(raw, pieces)
}

/// Literal subset enumeration: visit label sets from the largest size down,
/// intersect their intervals, subtract everything already emitted, and emit
/// what remains.
///
/// Exponential in the number of non-empty pairs; kept as the reference
/// against which [`disjoint_decomposition`] is checked.
pub fn disjoint_decomposition_enumerated(raw: &PairIntervals) -> LabeledIntervalSet {
    let sets: Vec<ArcSet> = raw.intervals.iter().map(ArcSet::from_interval).collect();
    let active: Vec<usize> = (0..sets.len()).filter(|&i| !sets[i].is_empty()).collect();
    let mut covered = ArcSet::default();
    let mut pieces = Vec::new();
    for size in (1..=active.len()).rev() {
        for subset in active.iter().copied().combinations(size) {
            let mut common = sets[subset[0]].clone();
            for &p in &subset[1..] {
                common = common.intersect(&sets[p]);
                if common.is_empty() {
                    break;
                }
            }
            if common.is_empty() {
                continue;
            }
            let rest = common.difference(&covered);
            if rest.measure() <= ANGLE_TOL {
                continue;
            }
            let mask = subset.iter().fold(0u64, |m, &p| m | 1 << p);
            pieces.extend(rest.to_intervals().into_iter().map(|iv| (mask, iv)));
            covered = covered.union(&rest);
        }
    }
    labeled(raw, pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn arc(lo: f64, hi: f64) -> AngleInterval {
        AngleInterval::arc(lo, hi)
    }

    #[test]
    fn beyond_radial_bound_is_empty() {
        let ego = MultiCircleApprox::new(1.38, 5.0 / 3.0, 3).unwrap();
        let obj = ego.clone();
        let bound = crate::geometry::radial_bound(&ego, &obj);
        for k in 0..16 {
            let pos = PolarPoint::new(bound + 1e-6, k as f64 * TAU / 16.0);
            for j in 0..3 {
                for l in 0..3 {
                    assert!(pair_interval(j, l, pos, &ego, &obj).unwrap().is_empty());
                }
            }
        }
    }

    #[test]
    fn center_circle_is_heading_independent() {
        let ego = MultiCircleApprox::new(1.0, 0.0, 1).unwrap();
        let obj = MultiCircleApprox::new(1.0, 2.0, 3).unwrap();
        let near = PolarPoint::new(1.5, 0.3);
        assert_eq!(
            pair_interval(0, 1, near, &ego, &obj).unwrap(),
            AngleInterval::Full
        );
        let far = PolarPoint::new(2.5, 0.3);
        assert_eq!(
            pair_interval(0, 1, far, &ego, &obj).unwrap(),
            AngleInterval::Empty
        );
    }

    #[test]
    fn generic_pair_interval_matches_sweep() {
        let ego = MultiCircleApprox::new(1.0, 0.0, 1).unwrap();
        let obj = MultiCircleApprox::new(1.0, 2.0, 2).unwrap();
        let pos = PolarPoint::new(2.5, 0.0);
        let iv = pair_interval(0, 1, pos, &ego, &obj).unwrap();
        let h = (-0.65f64).acos();
        match iv {
            AngleInterval::Arc { lo, hi } => {
                assert!((lo - h).abs() < 1e-12 && (hi - (TAU - h)).abs() < 1e-12);
            }
            other => panic!("expected an arc, got {other:?}"),
        }
        // dense sweep of the contact condition
        let mut t = 0.0;
        while t < TAU {
            let d = ((2.5 + t.cos()).powi(2) + t.sin().powi(2)).sqrt();
            if (d - 2.0).abs() > 1e-9 {
                assert_eq!(iv.contains(t), d <= 2.0, "theta = {t}");
            }
            t += 1e-4;
        }
    }

    #[test]
    fn pair_index_out_of_range() {
        let c = MultiCircleApprox::new(1.0, 1.0, 2).unwrap();
        assert!(pair_interval(2, 0, PolarPoint::new(1.0, 0.0), &c, &c).is_err());
        assert!(pair_interval(0, 5, PolarPoint::new(1.0, 0.0), &c, &c).is_err());
    }

    #[test]
    fn union_merges_overlaps() {
        assert_eq!(
            union_intervals(&[arc(0.0, 1.0), arc(0.5, 2.0)]),
            vec![arc(0.0, 2.0)]
        );
        assert_eq!(
            union_intervals(&[AngleInterval::Empty, AngleInterval::Full]),
            vec![AngleInterval::Full]
        );
        assert!(union_intervals(&[AngleInterval::Empty]).is_empty());
    }

    #[test]
    fn union_joins_across_zero() {
        let input = [arc(5.5, TAU), arc(0.0, 0.5)];
        let out = union_intervals(&input);
        assert_eq!(out.len(), 1);
        match out[0] {
            AngleInterval::Arc { lo, hi } => {
                assert!((lo - 5.5).abs() < 1e-15 && (hi - (TAU + 0.5)).abs() < 1e-12)
            }
            other => panic!("expected an arc, got {other:?}"),
        }
        for i in 0..1000 {
            let t = TAU * i as f64 / 1000.0;
            let expect = input.iter().any(|iv| iv.contains(t));
            assert_eq!(out[0].contains(t), expect, "theta = {t}");
        }
    }

    #[test]
    fn arc_normalization() {
        assert_eq!(arc(1.0, 1.0), AngleInterval::Empty);
        assert_eq!(arc(-1.0, 7.0), AngleInterval::Full);
        match arc(-0.5, 0.5) {
            AngleInterval::Arc { lo, hi } => {
                assert!((lo - (TAU - 0.5)).abs() < 1e-15);
                assert!((hi - lo - 1.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(arc(-0.5, 0.5).contains(0.0));
        assert!(arc(-0.5, 0.5).contains(TAU - 0.25));
        assert!(!arc(-0.5, 0.5).contains(PI));
    }

    fn two_by_two(
        i11: AngleInterval,
        i12: AngleInterval,
        i21: AngleInterval,
        i22: AngleInterval,
    ) -> PairIntervals {
        PairIntervals::new(2, 2, vec![i11, i12, i21, i22]).unwrap()
    }

    #[test]
    fn algorithm_table_example() {
        // (1,1), (2,1), (2,2) overlap in a common stretch; (1,2) stands apart
        let raw = two_by_two(arc(1.0, 3.0), arc(5.0, 5.5), arc(1.5, 3.5), arc(2.0, 4.0));
        let set = disjoint_decomposition(&raw);
        let first = &set.entries[0];
        assert_eq!(
            first.labels,
            vec![
                CirclePair::new(0, 0),
                CirclePair::new(1, 0),
                CirclePair::new(1, 1)
            ]
        );
        // [lower end of (2,2), upper end of (1,1)]
        assert_eq!(first.interval, arc(2.0, 3.0));
        assert_eq!(first.weight_count(), 3);
        let second = &set.entries[1];
        assert_eq!(
            second.labels,
            vec![CirclePair::new(0, 0), CirclePair::new(1, 0)]
        );
        assert_eq!(second.interval, arc(1.5, 2.0));
        assert_eq!(set, disjoint_decomposition_enumerated(&raw));
        assert!((set.measure() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn all_empty_decomposes_to_nothing() {
        let e = AngleInterval::Empty;
        assert!(disjoint_decomposition(&two_by_two(e, e, e, e)).is_empty());
        assert!(disjoint_decomposition_enumerated(&two_by_two(e, e, e, e)).is_empty());
    }

    #[test]
    fn disjoint_raw_intervals_stay_single() {
        let e = AngleInterval::Empty;
        let raw = two_by_two(arc(0.0, 1.0), e, e, arc(2.0, 3.0));
        let set = disjoint_decomposition(&raw);
        assert_eq!(set.len(), 2);
        assert_eq!(set.entries[0].labels, vec![CirclePair::new(0, 0)]);
        assert_eq!(set.entries[0].interval, arc(0.0, 1.0));
        assert_eq!(set.entries[1].labels, vec![CirclePair::new(1, 1)]);
        assert_eq!(set.entries[1].interval, arc(2.0, 3.0));
    }

    #[test]
    fn full_and_wrapping_pieces() {
        let e = AngleInterval::Empty;
        let raw = two_by_two(AngleInterval::Full, arc(-0.5, 0.5), e, e);
        let set = disjoint_decomposition(&raw);
        assert_eq!(set, disjoint_decomposition_enumerated(&raw));
        assert_eq!(set.len(), 2);
        assert_eq!(set.entries[0].labels.len(), 2);
        assert!((set.entries[0].interval.measure() - 1.0).abs() < 1e-12);
        assert!(set.entries[0].interval.contains(0.0));
        assert!((set.entries[1].interval.measure() - (TAU - 1.0)).abs() < 1e-12);
        assert!((set.measure() - TAU).abs() < 1e-12);
    }

    #[test]
    fn arcset_operations() {
        let a = ArcSet::from_interval(&arc(1.0, 3.0));
        let b = ArcSet::from_interval(&arc(2.0, 4.0));
        assert!((a.intersect(&b).measure() - 1.0).abs() < 1e-15);
        assert!((a.union(&b).measure() - 3.0).abs() < 1e-15);
        assert!((a.difference(&b).measure() - 1.0).abs() < 1e-15);
        let wrap = ArcSet::from_interval(&arc(6.0, 7.0));
        assert_eq!(wrap.segs.len(), 2);
        assert_eq!(wrap.to_intervals().len(), 1);
    }

    use proptest::prelude::*;

    fn same_decomposition(a: &LabeledIntervalSet, b: &LabeledIntervalSet) -> bool {
        a.len() == b.len()
            && a.entries.iter().zip(&b.entries).all(|(x, y)| {
                x.labels == y.labels
                    && match (x.interval, y.interval) {
                        (
                            AngleInterval::Arc { lo: l1, hi: h1 },
                            AngleInterval::Arc { lo: l2, hi: h2 },
                        ) => (l1 - l2).abs() < 1e-9 && (h1 - h2).abs() < 1e-9,
                        (p, q) => p == q,
                    }
            })
    }

    fn raw_interval() -> impl Strategy<Value = AngleInterval> {
        prop_oneof![
            1 => Just(AngleInterval::Empty),
            1 => Just(AngleInterval::Full),
            6 => (0.0..TAU, 0.01..6.0).prop_map(|(lo, len)| AngleInterval::arc(lo, lo + len)),
        ]
    }

    fn is_disjoint(set: &LabeledIntervalSet) -> bool {
        let sets: Vec<ArcSet> = set
            .entries
            .iter()
            .map(|e| ArcSet::from_interval(&e.interval))
            .collect();
        (0..sets.len())
            .all(|i| (i + 1..sets.len()).all(|k| sets[i].intersect(&sets[k]).measure() < 1e-12))
    }

    proptest! {
        #[test]
        fn sweep_matches_enumeration(
            n_ego in 1usize..4, n_obj in 1usize..4,
            pool in proptest::collection::vec(raw_interval(), 9),
        ) {
            let raw = PairIntervals::new(n_ego, n_obj, pool[..n_ego * n_obj].to_vec()).unwrap();
            let fast = disjoint_decomposition(&raw);
            let slow = disjoint_decomposition_enumerated(&raw);
            prop_assert!(same_decomposition(&fast, &slow), "{fast:?}\n{slow:?}");
            prop_assert!(is_disjoint(&fast));
            let union: f64 = union_intervals(raw.as_slice()).iter().map(|iv| iv.measure()).sum();
            prop_assert!((fast.measure() - union).abs() <= 1e-9);
        }

        #[test]
        fn labels_match_circle_contacts(
            n_ego in 1usize..5, n_obj in 1usize..5,
            r_ego in 0.3..2.0f64, r_obj in 0.3..2.0f64,
            d_ego in 0.2..2.5f64, d_obj in 0.2..2.5f64,
            frac in 0.0..1.1f64, phi in 0.0..TAU,
            thetas in proptest::collection::vec(0.0..TAU, 64),
        ) {
            let ego = MultiCircleApprox::new(r_ego, d_ego, n_ego).unwrap();
            let obj = MultiCircleApprox::new(r_obj, d_obj, n_obj).unwrap();
            let pos = PolarPoint::new(frac * crate::geometry::radial_bound(&ego, &obj), phi);
            let raw = PairIntervals::compute(pos, &ego, &obj);
            let set = disjoint_decomposition(&raw);
            prop_assert!(is_disjoint(&set));
            let (x, y) = from_polar(pos);
            let reach = r_ego + r_obj;
            for &t in &thetas {
                let mut expected = Vec::new();
                let mut ambiguous = false;
                for (j, &e) in ego.offsets().iter().enumerate() {
                    for (l, &a) in obj.offsets().iter().enumerate() {
                        let d = (x - e + a * t.cos()).hypot(y + a * t.sin());
                        ambiguous |= (d - reach).abs() < 1e-9;
                        if d <= reach {
                            expected.push(CirclePair::new(j, l));
                        }
                    }
                }
                if ambiguous {
                    continue;
                }
                let got = set.entry_at(t).map(|e| e.labels.clone()).unwrap_or_default();
                prop_assert_eq!(got, expected, "theta = {}", t);
            }
        }
    }
}
