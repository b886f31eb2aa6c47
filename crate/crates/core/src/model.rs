//! Cultural identities and the attitude functions evaluated between them.
//!
//! An agent holds one [`AcceptanceSegment`] per worldview: a most acceptable
//! position `a` and the bounds `b <= a <= B` of the positions it still finds
//! acceptable. Attitudes are built in three layers:
//!
//! * [`attitude_to_position`]: 1 strictly inside the segment, 0 on a bound,
//!   then `tanh(y / 2)` falling toward -1 with a slope set by the margin width
//!   on the side that was exited;
//! * [`attitude_to_segment`]: the observer's mean attitude over the grid
//!   points strictly inside the target's segment, scaled by
//!   [`ModelParams::eq2_normalizer`];
//! * [`attitude_to_identity`]: the mean of the per-worldview attitudes.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a worldview inside a [`Worldviews`] registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WorldviewId(pub usize);

impl WorldviewId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// The ordered set of worldview labels a model works with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Worldviews {
    labels: Vec<String>,
}

impl TryFrom<Vec<String>> for Worldviews {
    type Error = Error;
    fn try_from(labels: Vec<String>) -> Result<Self> {
        Worldviews::new(labels)
    }
}

impl From<Worldviews> for Vec<String> {
    fn from(w: Worldviews) -> Self {
        w.labels
    }
}

impl Worldviews {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "at least 2 worldviews are required, got {}",
                labels.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.contains([',', '_', ' ']) {
                return Err(Error::InvalidParameter(format!("bad worldview label {l:?}")));
            }
            if labels[..i].contains(l) {
                return Err(Error::InvalidParameter(format!("duplicate worldview label {l:?}")));
            }
        }
        Ok(Worldviews { labels })
    }

    /// Muslim, Christian and areligious worldviews, in that index order.
    pub fn mca() -> Self {
        Worldviews {
            labels: vec!["M".into(), "C".into(), "A".into()],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, id: WorldviewId) -> &str {
        &self.labels[id.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn id(&self, label: &str) -> Result<WorldviewId> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(WorldviewId)
            .ok_or_else(|| Error::UnknownWorldview(label.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = WorldviewId> + '_ {
        (0..self.labels.len()).map(WorldviewId)
    }
}

/// One worldview's latitude of acceptance.
///
/// Always satisfies `-1 <= lower <= position <= upper <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSegment", into = "RawSegment")]
pub struct AcceptanceSegment {
    position: f64,
    lower: f64,
    upper: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSegment {
    a: f64,
    b: f64,
    #[serde(rename = "B")]
    upper: f64,
}

impl TryFrom<RawSegment> for AcceptanceSegment {
    type Error = Error;
    fn try_from(r: RawSegment) -> Result<Self> {
        AcceptanceSegment::new(r.a, r.b, r.upper)
    }
}

impl From<AcceptanceSegment> for RawSegment {
    fn from(s: AcceptanceSegment) -> Self {
        RawSegment {
            a: s.position,
            b: s.lower,
            upper: s.upper,
        }
    }
}

impl AcceptanceSegment {
    pub fn new(position: f64, lower: f64, upper: f64) -> Result<Self> {
        let err = |reason| Error::InvalidSegment {
            position,
            lower,
            upper,
            reason,
        };
        if !(position.is_finite() && lower.is_finite() && upper.is_finite()) {
            return Err(err("non-finite value"));
        }
        if lower < -1.0 || upper > 1.0 {
            return Err(err("bounds outside [-1, 1]"));
        }
        if lower > position || position > upper {
            return Err(err("bounds must satisfy b <= a <= B"));
        }
        Ok(AcceptanceSegment {
            position,
            lower,
            upper,
        })
    }

    /// Segment with the given position and margin widths, clamped into [-1, 1].
    pub fn from_widths(position: f64, lower_width: f64, upper_width: f64) -> Result<Self> {
        Self::new(
            position,
            (position - lower_width).max(-1.0),
            (position + upper_width).min(1.0),
        )
    }

    pub(crate) fn new_unchecked(position: f64, lower: f64, upper: f64) -> Self {
        debug_assert!(Self::new(position, lower, upper).is_ok());
        AcceptanceSegment {
            position,
            lower,
            upper,
        }
    }

    pub fn position(&self) -> f64 {
        self.position
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// margin(l): `a - b`.
    pub fn lower_width(&self) -> f64 {
        self.position - self.lower
    }

    /// margin(h): `B - a`.
    pub fn upper_width(&self) -> f64 {
        self.upper - self.position
    }

    pub fn min_width(&self) -> f64 {
        self.lower_width().min(self.upper_width())
    }

    pub fn contains_strictly(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }

    pub(crate) fn with_lower(self, lower: f64) -> Self {
        Self::new_unchecked(self.position, lower, self.upper)
    }

    pub(crate) fn with_upper(self, upper: f64) -> Self {
        Self::new_unchecked(self.position, self.lower, upper)
    }
}

impl fmt::Display for AcceptanceSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} <= {} <= {}]", self.lower, self.position, self.upper)
    }
}

/// K acceptance segments, one per worldview.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<AcceptanceSegment>", into = "Vec<AcceptanceSegment>")]
pub struct CulturalIdentity {
    segments: Vec<AcceptanceSegment>,
}

impl TryFrom<Vec<AcceptanceSegment>> for CulturalIdentity {
    type Error = Error;
    fn try_from(v: Vec<AcceptanceSegment>) -> Result<Self> {
        CulturalIdentity::new(v)
    }
}

impl From<CulturalIdentity> for Vec<AcceptanceSegment> {
    fn from(c: CulturalIdentity) -> Self {
        c.segments
    }
}

impl CulturalIdentity {
    pub fn new(segments: Vec<AcceptanceSegment>) -> Result<Self> {
        if segments.len() < 2 {
            return Err(Error::InvalidIdentity(format!(
                "need one segment per worldview (K >= 2), got {}",
                segments.len()
            )));
        }
        Ok(CulturalIdentity { segments })
    }

    /// Build from `(a, b, B)` triples.
    pub fn from_triples(triples: &[(f64, f64, f64)]) -> Result<Self> {
        let segments = triples
            .iter()
            .map(|&(a, b, upper)| AcceptanceSegment::new(a, b, upper))
            .collect::<Result<Vec<_>>>()?;
        Self::new(segments)
    }

    pub fn k(&self) -> usize {
        self.segments.len()
    }

    pub fn segments(&self) -> &[AcceptanceSegment] {
        &self.segments
    }

    pub fn segment(&self, id: WorldviewId) -> &AcceptanceSegment {
        &self.segments[id.0]
    }

    pub(crate) fn set_segment(&mut self, id: WorldviewId, seg: AcceptanceSegment) {
        self.segments[id.0] = seg;
    }

    pub fn min_width(&self) -> f64 {
        self.segments
            .iter()
            .map(AcceptanceSegment::min_width)
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks the invariants of a simulated (non-terrorist) agent: some
    /// position is positive and every margin is at least `epsilon` wide.
    pub fn validate_agent(&self, epsilon: f64) -> Result<()> {
        if !self.segments.iter().any(|s| s.position > 0.0) {
            return Err(Error::InvalidIdentity(
                "no worldview has a positive most acceptable position".into(),
            ));
        }
        // Widths computed as a - b can lose one ulp against a value built as a - eps.
        let tol = 1e-12;
        if let Some((k, s)) = self
            .segments
            .iter()
            .enumerate()
            .find(|(_, s)| s.min_width() < epsilon - tol)
        {
            return Err(Error::InvalidIdentity(format!(
                "worldview {k} margin narrower than epsilon={epsilon}: {s}"
            )));
        }
        Ok(())
    }
}

/// Regular discretization of [-1, 1] into `d` points, endpoints included.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("grid needs d >= 2, got {d}")));
        }
        let step = (d - 1) as f64;
        let points = (0..d).map(|p| -1.0 + 2.0 * p as f64 / step).collect();
        Ok(Grid { points })
    }

    pub fn d(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Indices of the points lying strictly inside `(lower, upper)`.
    pub fn interior(&self, lower: f64, upper: f64) -> Range<usize> {
        let lo = self.points.partition_point(|&x| x <= lower);
        let hi = self.points.partition_point(|&x| x < upper);
        lo..hi.max(lo)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    /// Reaction strength, in (0, 1].
    pub alpha: f64,
    /// Smallest attainable margin width.
    pub epsilon: f64,
    /// Grid size per worldview axis.
    pub d: usize,
    /// Factor applied to the segment attitude. 1 keeps self-attitude at 1;
    /// 2 reproduces the literal published factor.
    pub eq2_normalizer: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            alpha: 0.5,
            epsilon: 0.05,
            d: 400,
            eq2_normalizer: 1.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha out of (0,1]: {}",
                self.alpha
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon out of (0,1): {}",
                self.epsilon
            )));
        }
        if self.d < 2 {
            return Err(Error::InvalidParameter(format!("d must be >= 2: {}", self.d)));
        }
        if !(self.eq2_normalizer > 0.0 && self.eq2_normalizer.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eq2_normalizer must be > 0: {}",
                self.eq2_normalizer
            )));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.d)
    }
}

/// `(e^y - 1) / (e^y + 1)`, written as `tanh(y / 2)` to stay exact for large |y|.
#[inline]
pub(crate) fn squash(y: f64) -> f64 {
    (0.5 * y).tanh()
}

/// Observer's attitude toward a single position on one worldview axis.
pub fn attitude_to_position(seg: &AcceptanceSegment, a: f64) -> f64 {
    if seg.contains_strictly(a) {
        return 1.0;
    }
    if a == seg.lower || a == seg.upper {
        return 0.0;
    }
    let (distance, width) = if a < seg.lower {
        (seg.position - a, seg.lower_width())
    } else {
        (a - seg.position, seg.upper_width())
    };
    if width <= 0.0 {
        return -1.0;
    }
    squash(1.0 - distance / width)
}

/// Observer's attitude toward a target segment: mean of the observer's
/// position attitude over the grid points strictly inside the target.
pub fn attitude_to_segment(
    observer: &AcceptanceSegment,
    target: &AcceptanceSegment,
    grid: &Grid,
    params: &ModelParams,
) -> Result<f64> {
    let range = grid.interior(target.lower, target.upper);
    if range.is_empty() {
        return Err(Error::DegenerateTargetSegment {
            lower: target.lower,
            upper: target.upper,
        });
    }
    let n = range.len() as f64;
    let sum: f64 = grid.points()[range]
        .iter()
        .map(|&x| attitude_to_position(observer, x))
        .sum();
    Ok(params.eq2_normalizer * sum / n)
}

/// Mean segment attitude over all worldviews.
pub fn attitude_to_identity(
    observer: &CulturalIdentity,
    target: &CulturalIdentity,
    grid: &Grid,
    params: &ModelParams,
) -> Result<f64> {
    if observer.k() != target.k() {
        return Err(Error::WorldviewMismatch {
            observer: observer.k(),
            target: target.k(),
        });
    }
    let mut total = 0.0;
    for (o, t) in observer.segments.iter().zip(&target.segments) {
        total += attitude_to_segment(o, t, grid, params)?;
    }
    Ok(total / observer.k() as f64)
}

/// Worldview with the highest most acceptable position; ties go to the
/// lowest index.
pub fn group_of(identity: &CulturalIdentity) -> WorldviewId {
    let mut best = 0;
    for (k, s) in identity.segments.iter().enumerate().skip(1) {
        if s.position > identity.segments[best].position {
            best = k;
        }
    }
    WorldviewId(best)
}

/// Precomputed prefix sums of one identity's position attitudes over the
/// grid, so a segment attitude becomes two lookups instead of a scan.
///
/// Prefix sums are accumulated with Neumaier compensation; the result agrees
/// with [`attitude_to_segment`] to a few ulps of the grid size.
#[derive(Clone, Debug)]
pub struct AttitudeProfile {
    prefix: Vec<Vec<f64>>,
}

impl AttitudeProfile {
    pub fn new(observer: &CulturalIdentity, grid: &Grid) -> Self {
        let prefix = observer
            .segments
            .iter()
            .map(|seg| {
                let mut out = Vec::with_capacity(grid.d() + 1);
                out.push(0.0);
                let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
                for &x in grid.points() {
                    let v = attitude_to_position(seg, x);
                    let t = sum + v;
                    if sum.abs() >= v.abs() {
                        comp += (sum - t) + v;
                    } else {
                        comp += (v - t) + sum;
                    }
                    sum = t;
                    out.push(sum + comp);
                }
                out
            })
            .collect();
        AttitudeProfile { prefix }
    }

    pub fn k(&self) -> usize {
        self.prefix.len()
    }

    /// Same value as [`attitude_to_segment`] for this observer's worldview `k`.
    pub fn segment_attitude(
        &self,
        k: WorldviewId,
        target: &AcceptanceSegment,
        grid: &Grid,
        params: &ModelParams,
    ) -> Result<f64> {
        let range = grid.interior(target.lower, target.upper);
        if range.is_empty() {
            return Err(Error::DegenerateTargetSegment {
                lower: target.lower,
                upper: target.upper,
            });
        }
        let p = &self.prefix[k.0];
        let n = range.len() as f64;
        Ok(params.eq2_normalizer * (p[range.end] - p[range.start]) / n)
    }

    /// [`Self::identity_attitude`] with the target's grid ranges precomputed.
    pub fn identity_attitude_with(&self, target: &TargetRanges, params: &ModelParams) -> Result<f64> {
        if self.k() != target.ranges.len() {
            return Err(Error::WorldviewMismatch {
                observer: self.k(),
                target: target.ranges.len(),
            });
        }
        let mut total = 0.0;
        for (p, r) in self.prefix.iter().zip(&target.ranges) {
            total += params.eq2_normalizer * (p[r.end] - p[r.start]) / r.len() as f64;
        }
        Ok(total / self.k() as f64)
    }

    pub fn identity_attitude(
        &self,
        target: &CulturalIdentity,
        grid: &Grid,
        params: &ModelParams,
    ) -> Result<f64> {
        if self.k() != target.k() {
            return Err(Error::WorldviewMismatch {
                observer: self.k(),
                target: target.k(),
            });
        }
        let mut total = 0.0;
        for (k, t) in target.segments.iter().enumerate() {
            total += self.segment_attitude(WorldviewId(k), t, grid, params)?;
        }
        Ok(total / self.k() as f64)
    }
}

/// Interior grid ranges of a target identity's segments, shared by every
/// observer that evaluates it.
#[derive(Clone, Debug)]
pub struct TargetRanges {
    ranges: Vec<Range<usize>>,
}

impl TargetRanges {
    pub fn new(target: &CulturalIdentity, grid: &Grid) -> Result<Self> {
        let ranges = target
            .segments
            .iter()
            .map(|t| {
                let r = grid.interior(t.lower, t.upper);
                if r.is_empty() {
                    Err(Error::DegenerateTargetSegment {
                        lower: t.lower,
                        upper: t.upper,
                    })
                } else {
                    Ok(r)
                }
            })
            .collect::<Result<_>>()?;
        Ok(TargetRanges { ranges })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn seg(a: f64, b: f64, upper: f64) -> AcceptanceSegment {
        AcceptanceSegment::new(a, b, upper).unwrap()
    }

    fn unit() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn position_attitude_worked_values() {
        let s = seg(0.5, 0.3, 0.7);
        assert_eq!(attitude_to_position(&s, 0.5), 1.0);
        assert_eq!(attitude_to_position(&s, 0.3), 0.0);
        assert_eq!(attitude_to_position(&s, 0.7), 0.0);
        // (e^-1 - 1) / (e^-1 + 1)
        assert_abs_diff_eq!(attitude_to_position(&s, 0.1), -0.462_117_157_260_009_8, epsilon = 1e-15);
        assert_abs_diff_eq!(attitude_to_position(&s, 0.9), -0.462_117_157_260_009_8, epsilon = 1e-15);
    }

    #[test]
    fn zero_width_margin_falls_to_minus_one() {
        let s = seg(1.0, 0.95, 1.0);
        assert_eq!(attitude_to_position(&s, 1.0), 0.0);
        let s = seg(-1.0, -1.0, -0.95);
        assert_eq!(attitude_to_position(&s, -1.0), 0.0);
        let s = seg(0.2, 0.2, 0.4);
        assert_eq!(attitude_to_position(&s, 0.1), -1.0);
        assert_eq!(attitude_to_position(&s, 0.2), 0.0);
    }

    #[test]
    fn invalid_segments_rejected() {
        assert!(AcceptanceSegment::new(0.5, 0.6, 0.7).is_err());
        assert!(AcceptanceSegment::new(0.5, 0.3, 0.4).is_err());
        assert!(AcceptanceSegment::new(0.5, -1.1, 0.7).is_err());
        assert!(AcceptanceSegment::new(f64::NAN, 0.0, 0.7).is_err());
        assert!(CulturalIdentity::new(vec![seg(0.0, -0.1, 0.1)]).is_err());
    }

    #[test]
    fn grid_points() {
        let g = Grid::new(5).unwrap();
        assert_eq!(g.points(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.interior(-0.1, 0.6), 2..4);
        assert_eq!(g.interior(-0.5, 0.5), 2..3);
        assert_eq!(g.interior(0.1, 0.2), 3..3);
        assert!(Grid::new(1).is_err());
        let g = Grid::new(400).unwrap();
        assert_eq!(g.points()[0], -1.0);
        assert_eq!(g.points()[399], 1.0);
    }

    #[test]
    fn segment_attitude_worked_values() {
        let g = Grid::new(5).unwrap();
        let obs = seg(0.5, 0.3, 0.7);
        let tgt = seg(0.25, -0.1, 0.6);
        let v = attitude_to_segment(&obs, &tgt, &g, &unit()).unwrap();
        assert_abs_diff_eq!(v, 0.182_42, epsilon = 1e-5);
        let literal = ModelParams {
            eq2_normalizer: 2.0,
            ..unit()
        };
        let v2 = attitude_to_segment(&obs, &tgt, &g, &literal).unwrap();
        assert_abs_diff_eq!(v2, 0.364_85, epsilon = 1e-5);
        assert_eq!(attitude_to_segment(&obs, &obs, &g, &unit()).unwrap(), 1.0);
    }

    #[test]
    fn degenerate_target_is_an_error() {
        let g = Grid::new(5).unwrap();
        let obs = seg(0.5, 0.3, 0.7);
        let narrow = seg(0.15, 0.1, 0.2);
        assert!(matches!(
            attitude_to_segment(&obs, &narrow, &g, &unit()),
            Err(Error::DegenerateTargetSegment { .. })
        ));
    }

    #[test]
    fn identity_attitude_mean_and_mismatch() {
        let g = Grid::new(5).unwrap();
        let obs = CulturalIdentity::new(vec![seg(0.5, 0.3, 0.7), seg(0.0, -0.6, 0.6)]).unwrap();
        let tgt = CulturalIdentity::new(vec![seg(0.25, -0.1, 0.6), seg(0.0, -0.6, 0.6)]).unwrap();
        let v = attitude_to_identity(&obs, &tgt, &g, &unit()).unwrap();
        assert_abs_diff_eq!(v, 0.591_21, epsilon = 1e-5);
        assert_eq!(attitude_to_identity(&obs, &obs, &g, &unit()).unwrap(), 1.0);

        let three = CulturalIdentity::new(vec![seg(0.0, -0.6, 0.6); 3]).unwrap();
        assert!(matches!(
            attitude_to_identity(&obs, &three, &g, &unit()),
            Err(Error::WorldviewMismatch { .. })
        ));
    }

    #[test]
    fn group_of_tie_breaks_low() {
        let id = |m: f64, c: f64, a: f64| {
            CulturalIdentity::new(vec![
                AcceptanceSegment::from_widths(m, 0.0, 0.0).unwrap(),
                AcceptanceSegment::from_widths(c, 0.0, 0.0).unwrap(),
                AcceptanceSegment::from_widths(a, 0.0, 0.0).unwrap(),
            ])
            .unwrap()
        };
        assert_eq!(group_of(&id(0.8, -0.2, 0.1)), WorldviewId(0));
        assert_eq!(group_of(&id(0.5, 0.5, -1.0)), WorldviewId(0));
        assert_eq!(group_of(&id(0.1, 0.1, 0.1)), WorldviewId(0));
        assert_eq!(group_of(&id(-0.1, 0.3, 0.6)), WorldviewId(2));
    }

    #[test]
    fn profile_matches_direct_evaluation() {
        let g = Grid::new(400).unwrap();
        let p = unit();
        let obs = CulturalIdentity::from_triples(&[(0.3, -0.2, 0.5), (-0.4, -0.9, -0.1), (0.9, 0.6, 1.0)])
            .unwrap();
        let tgt = CulturalIdentity::from_triples(&[(0.6, 0.2, 0.95), (-0.1, -0.2, 0.4), (0.0, -1.0, 1.0)])
            .unwrap();
        let prof = AttitudeProfile::new(&obs, &g);
        let direct = attitude_to_identity(&obs, &tgt, &g, &p).unwrap();
        let fast = prof.identity_attitude(&tgt, &g, &p).unwrap();
        assert_abs_diff_eq!(direct, fast, epsilon = 1e-13);
        let ranges = TargetRanges::new(&tgt, &g).unwrap();
        assert_eq!(prof.identity_attitude_with(&ranges, &p).unwrap(), fast);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::default().validate().is_ok());
        let bad = ModelParams {
            alpha: 1.5,
            ..ModelParams::default()
        };
        let msg = bad.validate().unwrap_err().to_string();
        assert!(msg.contains("alpha out of (0,1]"), "{msg}");
        assert!(ModelParams { epsilon: 0.0, ..Default::default() }.validate().is_err());
        assert!(ModelParams { d: 1, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn worldview_registry() {
        let w = Worldviews::mca();
        assert_eq!(w.id("C").unwrap(), WorldviewId(1));
        assert!(w.id("X").is_err());
        assert!(Worldviews::new(["M"]).is_err());
        assert!(Worldviews::new(["M", "M"]).is_err());
    }
}
