//! Virtual populations built from inclusive/exclusive prototypes, the
//! survey-style indicators computed on them, and calibration of the
//! prototypes and mixture proportions against reference indicators.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    group_of, AcceptanceSegment, CulturalIdentity, Grid, ModelParams, WorldviewId, Worldviews,
};
use crate::pairwise::PairwiseAttitudes;
use crate::population::{Agent, Kind, Population};
use crate::rng::{stream, Stream};

/// Lowest position an inclusive prototype may hold on another group's worldview.
pub const INCLUSIVE_OTHER_MIN: f64 = -0.25;
/// Gap by which a prototype's own position must exceed every other position.
pub const OWN_POSITION_LEAD: f64 = 0.01;
/// Floor on the reference magnitude in relative errors.
pub const RELATIVE_ERROR_FLOOR: f64 = 0.1;

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prototype {
    pub group: WorldviewId,
    pub kind: Kind,
    pub identity: CulturalIdentity,
}

impl Prototype {
    pub fn new(group: WorldviewId, kind: Kind, triples: &[(f64, f64, f64)]) -> Result<Self> {
        Ok(Prototype {
            group,
            kind,
            identity: CulturalIdentity::from_triples(triples)?,
        })
    }

    pub fn label(&self, worldviews: &Worldviews) -> String {
        format!("{}-{}", worldviews.label(self.group), self.kind)
    }

    /// Checks the shape constraints of the prototype's kind.
    pub fn validate(&self, worldviews: &Worldviews, epsilon: f64) -> Result<()> {
        let fail = |reason: String| Error::InvalidPrototype {
            label: self.label(worldviews),
            reason,
        };
        if self.identity.k() != worldviews.len() {
            return Err(fail(format!(
                "{} segments for {} worldviews",
                self.identity.k(),
                worldviews.len()
            )));
        }
        self.identity
            .validate_agent(epsilon)
            .map_err(|e| fail(e.to_string()))?;
        if group_of(&self.identity) != self.group {
            return Err(fail("own worldview is not the highest position".into()));
        }
        let own = self.identity.segment(self.group);
        for (k, seg) in self.identity.segments().iter().enumerate() {
            let name = worldviews.label(WorldviewId(k));
            let is_own = k == self.group.0;
            match (self.kind, is_own) {
                (Kind::Exclusive, true) if seg.lower() < -TOL => {
                    return Err(fail(format!("own segment on {name} must lie in [0, 1]")))
                }
                (Kind::Exclusive, false) if seg.upper() > TOL => {
                    return Err(fail(format!("segment on {name} must lie in [-1, 0]")))
                }
                (Kind::Inclusive, true) if seg.position() <= 0.0 => {
                    return Err(fail(format!("own position on {name} must be positive")))
                }
                (Kind::Inclusive, false) => {
                    if seg.position() < INCLUSIVE_OTHER_MIN - TOL {
                        return Err(fail(format!(
                            "position on {name} below {INCLUSIVE_OTHER_MIN}"
                        )));
                    }
                    if seg.lower() + seg.upper() < -TOL {
                        return Err(fail(format!(
                            "segment on {name} lies mostly on the negative side"
                        )));
                    }
                }
                _ => {}
            }
            if !is_own && seg.position() > own.position() - OWN_POSITION_LEAD + TOL {
                return Err(fail(format!("position on {name} too close to own position")));
            }
        }
        Ok(())
    }
}

/// Built-in illustrative prototypes for the M, C, A worldviews.
pub fn default_prototypes() -> Vec<Prototype> {
    let (m, c, a) = (WorldviewId(0), WorldviewId(1), WorldviewId(2));
    let p = |g, k, t: &[(f64, f64, f64)]| Prototype::new(g, k, t).expect("valid built-in prototype");
    vec![
        p(m, Kind::Inclusive, &[(0.5, -0.2, 0.9), (0.1, -0.2, 0.5), (0.0, -0.3, 0.4)]),
        p(m, Kind::Exclusive, &[(0.8, 0.5, 1.0), (-0.6, -0.9, -0.3), (-0.7, -1.0, -0.4)]),
        p(c, Kind::Inclusive, &[(0.1, -0.3, 0.4), (0.6, 0.2, 0.9), (0.0, -0.2, 0.3)]),
        p(c, Kind::Exclusive, &[(-0.6, -0.9, -0.2), (0.7, 0.4, 1.0), (-0.5, -0.8, -0.2)]),
        p(a, Kind::Inclusive, &[(0.0, -0.3, 0.4), (0.1, -0.2, 0.5), (0.6, 0.2, 0.9)]),
        p(a, Kind::Exclusive, &[(-0.7, -1.0, -0.4), (-0.5, -0.8, -0.2), (0.7, 0.4, 1.0)]),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    pub worldviews: Worldviews,
    pub n: usize,
    /// Share of each group, indexed by worldview; sums to 1.
    pub shares: Vec<f64>,
    /// Fraction of inclusive agents within each group.
    pub inclusive_fraction: Vec<f64>,
    /// Half-width of the uniform noise added to every position and bound.
    pub jitter: f64,
    pub seed: u64,
    /// One prototype per (group, kind).
    pub prototypes: Vec<Prototype>,
}

impl PopulationSpec {
    /// 1000 agents, equal shares, half inclusive, built-in prototypes.
    pub fn mca_default() -> Self {
        PopulationSpec {
            worldviews: Worldviews::mca(),
            n: 1000,
            shares: vec![1.0 / 3.0; 3],
            inclusive_fraction: vec![0.5; 3],
            jitter: 0.0,
            seed: 0,
            prototypes: default_prototypes(),
        }
    }

    pub fn prototype(&self, group: WorldviewId, kind: Kind) -> Option<&Prototype> {
        self.prototypes.iter().find(|p| p.group == group && p.kind == kind)
    }

    pub fn validate(&self, epsilon: f64) -> Result<()> {
        let k = self.worldviews.len();
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.shares.len() != k || self.inclusive_fraction.len() != k {
            return bad(format!("shares and inclusive_fraction need {k} entries"));
        }
        if self.shares.iter().any(|s| !(*s >= 0.0)) || (self.shares.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("group shares must be non-negative and sum to 1".into());
        }
        if self.inclusive_fraction.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return bad("inclusive fractions must lie in [0, 1]".into());
        }
        if !(self.jitter >= 0.0 && self.jitter.is_finite()) {
            return bad(format!("jitter must be >= 0: {}", self.jitter));
        }
        if self.prototypes.len() != 2 * k {
            return bad(format!("expected {} prototypes, got {}", 2 * k, self.prototypes.len()));
        }
        for g in self.worldviews.ids() {
            for kind in Kind::ALL {
                let matches = self
                    .prototypes
                    .iter()
                    .filter(|p| p.group == g && p.kind == kind)
                    .count();
                if matches != 1 {
                    return bad(format!(
                        "need exactly one {kind} prototype for group {}",
                        self.worldviews.label(g)
                    ));
                }
            }
        }
        for p in &self.prototypes {
            p.validate(&self.worldviews, epsilon)?;
        }
        Ok(())
    }

    /// Agent counts per `(group, kind)`, as `counts[group] = [inclusive, exclusive]`.
    pub fn counts(&self) -> Vec<[usize; 2]> {
        largest_remainder(self.n, &self.shares)
            .into_iter()
            .zip(&self.inclusive_fraction)
            .map(|(n_g, &x)| {
                let split = largest_remainder(n_g, &[x, 1.0 - x]);
                [split[0], split[1]]
            })
            .collect()
    }
}

/// Apportions `total` by `weights` (summing to 1) with the largest-remainder
/// method; equal remainders favour the lower index.
pub fn largest_remainder(total: usize, weights: &[f64]) -> Vec<usize> {
    let quotas: Vec<f64> = weights.iter().map(|w| w * total as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = quotas[i] - quotas[i].floor();
        let rj = quotas[j] - quotas[j].floor();
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    for &i in order.iter().cycle().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

fn jitter_identity(
    proto: &Prototype,
    sigma: f64,
    epsilon: f64,
    rng: &mut impl Rng,
) -> CulturalIdentity {
    let own_floor = proto.identity.segment(proto.group).position().min(epsilon);
    let mut noise = || rng.random_range(-sigma..=sigma);
    let segments = proto
        .identity
        .segments()
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let floor = if k == proto.group.0 { own_floor } else { -1.0 + epsilon };
            let a = (s.position() + noise()).clamp(floor, 1.0 - epsilon);
            let b = (s.lower() + noise()).clamp(-1.0, a - epsilon);
            let upper = (s.upper() + noise()).clamp(a + epsilon, 1.0);
            AcceptanceSegment::new_unchecked(a, b, upper)
        })
        .collect();
    CulturalIdentity::new(segments).expect("K >= 2 preserved")
}

/// Expands a spec into agents: groups in worldview order, inclusive agents
/// before exclusive ones inside a group.
pub fn build_population(spec: &PopulationSpec, params: &ModelParams) -> Result<Population> {
    spec.validate(params.epsilon)?;
    let mut rng = stream(spec.seed, Stream::Jitter, 0);
    let mut agents = Vec::with_capacity(spec.n);
    for (g, per_kind) in spec.counts().into_iter().enumerate() {
        let group = WorldviewId(g);
        for (kind, count) in Kind::ALL.into_iter().zip(per_kind) {
            let proto = spec.prototype(group, kind).expect("validated");
            for _ in 0..count {
                let identity = if spec.jitter > 0.0 {
                    jitter_identity(proto, spec.jitter, params.epsilon, &mut rng)
                } else {
                    proto.identity.clone()
                };
                agents.push(Agent {
                    id: agents.len(),
                    group,
                    kind,
                    identity,
                });
            }
        }
    }
    Population::new(spec.worldviews.clone(), agents)
}

/// Mean and standard deviation of attitudes for each ordered group pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatorMatrix {
    pub worldviews: Worldviews,
    /// `mean[g][h]`: observers in group `g` about targets in group `h`.
    pub mean: Vec<Vec<f64>>,
    pub std: Vec<Vec<f64>>,
}

impl IndicatorMatrix {
    pub fn new(worldviews: Worldviews, mean: Vec<Vec<f64>>, std: Vec<Vec<f64>>) -> Result<Self> {
        let k = worldviews.len();
        let square = |m: &Vec<Vec<f64>>| m.len() == k && m.iter().all(|r| r.len() == k);
        if !square(&mean) || !square(&std) {
            return Err(Error::InvalidParameter(format!("indicator matrices must be {k}x{k}")));
        }
        if mean.iter().chain(&std).flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("indicator values must be finite".into()));
        }
        Ok(IndicatorMatrix { worldviews, mean, std })
    }

    /// Survey references are normalized attitudes: every value in [-1, 1].
    pub fn validate_reference(&self) -> Result<()> {
        if self.mean.iter().chain(&self.std).flatten().any(|v| !(-1.0..=1.0).contains(v)) {
            return Err(Error::InvalidParameter("indicator values must lie in [-1, 1]".into()));
        }
        Ok(())
    }

    /// Indicators in `(g, h, mean), (g, h, std)` order, row-major.
    pub fn values(&self) -> Vec<f64> {
        let k = self.worldviews.len();
        let mut out = Vec::with_capacity(2 * k * k);
        for g in 0..k {
            for h in 0..k {
                out.push(self.mean[g][h]);
                out.push(self.std[g][h]);
            }
        }
        out
    }
}

pub fn compute_indicators(
    population: &Population,
    grid: &Grid,
    params: &ModelParams,
) -> Result<IndicatorMatrix> {
    let pairs = PairwiseAttitudes::compute(population, grid, params)?;
    indicators_from_pairs(population, &pairs)
}

pub(crate) fn indicators_from_pairs(
    population: &Population,
    pairs: &PairwiseAttitudes,
) -> Result<IndicatorMatrix> {
    let wv = population.worldviews();
    let agents = population.agents();
    let k = wv.len();
    let mut mean = vec![vec![0.0; k]; k];
    let mut std = vec![vec![0.0; k]; k];
    for g in wv.ids() {
        if population.group_size(g) == 0 {
            return Err(Error::EmptyGroup(wv.label(g).to_string()));
        }
    }
    for g in wv.ids() {
        for h in wv.ids() {
            // A singleton group has no in-group pair; its in-group cell stays 0.
            if let Some(s) = pairs.pair_stats(|i| agents[i].group == g, |j| agents[j].group == h) {
                mean[g.0][h.0] = s.mean;
                std[g.0][h.0] = s.std;
            }
        }
    }
    IndicatorMatrix::new(wv.clone(), mean, std)
}

/// Distance between a candidate's indicators and the reference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub l1: f64,
    pub avg_rel: f64,
    pub max_rel: f64,
}

pub fn objective(candidate: &IndicatorMatrix, reference: &IndicatorMatrix) -> Objective {
    let c = candidate.values();
    let r = reference.values();
    debug_assert_eq!(c.len(), r.len());
    let mut l1 = 0.0;
    let mut rel_sum = 0.0;
    let mut max_rel: f64 = 0.0;
    for (ci, ri) in c.iter().zip(&r) {
        let diff = (ci - ri).abs();
        // The floor is applied to both sides so the measure stays symmetric.
        let rel = diff / ri.abs().max(ci.abs()).max(RELATIVE_ERROR_FLOOR);
        l1 += diff;
        rel_sum += rel;
        max_rel = max_rel.max(rel);
    }
    Objective {
        l1,
        avg_rel: rel_sum / c.len() as f64,
        max_rel,
    }
}

// ---------------------------------------------------------------------------
// Calibration

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    /// Population size used while fitting (the prototype-level population).
    pub fit_n: usize,
    pub shares: Vec<f64>,
    /// Random feasible starting points.
    pub n_starts: usize,
    /// Hill-climbing evaluations shared among the climbers, on top of the starts.
    pub budget: usize,
    /// Number of best starts that are refined by hill climbing.
    pub climbers: usize,
    pub initial_step: f64,
    pub min_step: f64,
    /// Number of ranked candidates to keep.
    pub top: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            fit_n: 60,
            shares: vec![1.0 / 3.0; 3],
            n_starts: 200,
            budget: 20_000,
            climbers: 8,
            initial_step: 0.2,
            min_step: 1e-3,
            top: 120,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitCandidate {
    pub spec: PopulationSpec,
    pub objective: Objective,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub seed: u64,
    pub evaluations: usize,
    /// Ascending by `objective.l1`.
    pub candidates: Vec<FitCandidate>,
}

impl FitResult {
    pub fn best(&self) -> Option<&FitCandidate> {
        self.candidates.first()
    }
}

/// The search problem: map unit-cube points to feasible population specs
/// and score them against the reference.
pub struct FitProblem<'a> {
    pub reference: &'a IndicatorMatrix,
    pub config: &'a FitConfig,
    pub grid: &'a Grid,
    pub params: &'a ModelParams,
}

impl FitProblem<'_> {
    /// Dimension of the search space: `(a, upper width, lower width)` per
    /// prototype and worldview, then one inclusive fraction per group.
    pub fn dim(&self) -> usize {
        let k = self.reference.worldviews.len();
        2 * k * k * 3 + k
    }

    /// Decodes a point of `[0, 1]^dim` into a spec. Each coordinate is mapped
    /// into the range left feasible by the coordinates decoded before it, so
    /// every point of the cube yields valid prototypes.
    pub fn decode(&self, u: &[f64]) -> PopulationSpec {
        let wv = &self.reference.worldviews;
        let k = wv.len();
        let eps = self.params.epsilon;
        let lerp = |t: f64, lo: f64, hi: f64| lo + t.clamp(0.0, 1.0) * (hi - lo).max(0.0);
        let mut coords = u.iter().copied();
        let mut next = || coords.next().expect("point has the problem dimension");
        let mut prototypes = Vec::with_capacity(2 * k);
        for g in 0..k {
            for kind in Kind::ALL {
                let mut seg = vec![None; k];
                let own_a = match kind {
                    Kind::Exclusive => lerp(next(), eps, 1.0 - eps),
                    Kind::Inclusive => lerp(next(), OWN_POSITION_LEAD, 1.0 - eps),
                };
                let wh = lerp(next(), eps, 1.0 - own_a);
                let wl = match kind {
                    Kind::Exclusive => lerp(next(), eps, own_a),
                    Kind::Inclusive => lerp(next(), eps, own_a + 1.0),
                };
                seg[g] = Some(segment(own_a, wl, wh));
                for (h, slot) in seg.iter_mut().enumerate() {
                    if h == g {
                        continue;
                    }
                    *slot = Some(match kind {
                        Kind::Exclusive => {
                            let a = lerp(next(), -1.0 + eps, -eps);
                            let wh = lerp(next(), eps, -a);
                            let wl = lerp(next(), eps, a + 1.0);
                            segment(a, wl, wh)
                        }
                        Kind::Inclusive => {
                            let a = lerp(next(), INCLUSIVE_OTHER_MIN, own_a - OWN_POSITION_LEAD);
                            let wh = lerp(next(), eps.max(eps - 2.0 * a), 1.0 - a);
                            let wl = lerp(next(), eps, (a + 1.0).min(2.0 * a + wh));
                            segment(a, wl, wh)
                        }
                    });
                }
                let identity = CulturalIdentity::new(seg.into_iter().map(Option::unwrap).collect())
                    .expect("K >= 2");
                prototypes.push(Prototype {
                    group: WorldviewId(g),
                    kind,
                    identity,
                });
            }
        }
        let inclusive_fraction = (0..k).map(|_| next().clamp(0.0, 1.0)).collect();
        PopulationSpec {
            worldviews: wv.clone(),
            n: self.config.fit_n,
            shares: self.config.shares.clone(),
            inclusive_fraction,
            jitter: 0.0,
            seed: 0,
            prototypes,
        }
    }

    pub fn evaluate(&self, spec: &PopulationSpec) -> Result<Objective> {
        let pop = build_population(spec, self.params)?;
        let ind = compute_indicators(&pop, self.grid, self.params)?;
        Ok(objective(&ind, self.reference))
    }
}

/// Builds a segment from a position and margin widths, keeping the bounds
/// inside [-1, 1] and never crossing the position.
fn segment(a: f64, lower_width: f64, upper_width: f64) -> AcceptanceSegment {
    let b = (a - lower_width).clamp(-1.0, a);
    let upper = (a + upper_width).clamp(a, 1.0);
    AcceptanceSegment::new_unchecked(a, b, upper)
}

/// A derivative-free optimizer over the unit cube of a [`FitProblem`].
pub trait Calibrator {
    fn calibrate(&self, problem: &FitProblem<'_>, seed: u64) -> Result<FitResult>;
}

/// Multi-start random sampling followed by coordinate-wise stochastic hill
/// climbing with adaptive (mostly shrinking) per-coordinate steps.
#[derive(Clone, Copy, Debug, Default)]
pub struct MultiStartHillClimb;

#[derive(Clone)]
struct Scored {
    u: Vec<f64>,
    l1: f64,
}

/// Keeps the `cap` lowest-scoring points seen, ties resolved by arrival.
struct Archive {
    cap: usize,
    items: Vec<Scored>,
}

impl Archive {
    fn new(cap: usize) -> Self {
        Archive { cap, items: Vec::new() }
    }

    fn offer(&mut self, s: Scored) {
        if self.cap == 0 {
            return;
        }
        if self.items.len() == self.cap && s.l1 >= self.items[self.cap - 1].l1 {
            return;
        }
        let at = self.items.partition_point(|x| x.l1 <= s.l1);
        self.items.insert(at, s);
        self.items.truncate(self.cap);
    }
}

impl MultiStartHillClimb {
    fn climb(
        problem: &FitProblem<'_>,
        start: &Scored,
        evals: usize,
        seed: u64,
        index: u64,
    ) -> Result<Archive> {
        let cfg = problem.config;
        let dim = problem.dim();
        let mut rng = stream(seed, Stream::FitClimb, index);
        let mut archive = Archive::new(cfg.top);
        let mut current = start.clone();
        let mut steps = vec![cfg.initial_step; dim];
        for _ in 0..evals {
            let c = rng.random_range(0..dim);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let scale: f64 = rng.random_range(0.5..1.5);
            let mut u = current.u.clone();
            u[c] = (u[c] + sign * steps[c] * scale).clamp(0.0, 1.0);
            let l1 = problem.evaluate(&problem.decode(&u))?.l1;
            let cand = Scored { u, l1 };
            if l1 < current.l1 {
                steps[c] = (steps[c] * 1.5).min(0.5);
                current = cand.clone();
                archive.offer(cand);
            } else {
                steps[c] *= 0.6;
                if steps[c] < cfg.min_step {
                    steps[c] = cfg.initial_step;
                }
            }
        }
        Ok(archive)
    }
}

impl Calibrator for MultiStartHillClimb {
    fn calibrate(&self, problem: &FitProblem<'_>, seed: u64) -> Result<FitResult> {
        let cfg = problem.config;
        let dim = problem.dim();
        let starts: Vec<Scored> = (0..cfg.n_starts)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(seed, Stream::FitStart, i as u64);
                let u: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
                let l1 = problem.evaluate(&problem.decode(&u))?.l1;
                Ok(Scored { u, l1 })
            })
            .collect::<Result<_>>()?;

        let mut ranked_starts: Vec<usize> = (0..starts.len()).collect();
        ranked_starts.sort_by(|&i, &j| starts[i].l1.total_cmp(&starts[j].l1).then(i.cmp(&j)));
        let climbers = cfg.climbers.min(starts.len()).max(usize::from(!starts.is_empty()));
        let share = |c: usize| cfg.budget / climbers + usize::from(c < cfg.budget % climbers);
        let climbs: Vec<Archive> = if climbers == 0 || cfg.budget == 0 {
            Vec::new()
        } else {
            (0..climbers)
                .into_par_iter()
                .map(|c| Self::climb(problem, &starts[ranked_starts[c]], share(c), seed, c as u64))
                .collect::<Result<_>>()?
        };

        let mut all = Archive::new(cfg.top);
        for &i in &ranked_starts {
            all.offer(starts[i].clone());
        }
        for a in climbs {
            for s in a.items {
                all.offer(s);
            }
        }
        let candidates = all
            .items
            .iter()
            .map(|s| {
                let spec = problem.decode(&s.u);
                let objective = problem.evaluate(&spec)?;
                Ok(FitCandidate { spec, objective })
            })
            .collect::<Result<_>>()?;
        Ok(FitResult {
            seed,
            evaluations: starts.len() + if climbers == 0 { 0 } else { cfg.budget },
            candidates,
        })
    }
}

/// Fits prototypes and inclusive fractions to `reference` with the default
/// calibrator.
pub fn fit(
    reference: &IndicatorMatrix,
    config: &FitConfig,
    grid: &Grid,
    params: &ModelParams,
    seed: u64,
) -> Result<FitResult> {
    fit_with(&MultiStartHillClimb, reference, config, grid, params, seed)
}

pub fn fit_with(
    calibrator: &dyn Calibrator,
    reference: &IndicatorMatrix,
    config: &FitConfig,
    grid: &Grid,
    params: &ModelParams,
    seed: u64,
) -> Result<FitResult> {
    let k = reference.worldviews.len();
    if config.shares.len() != k {
        return Err(Error::InvalidParameter(format!("fit shares need {k} entries")));
    }
    if config.fit_n < k {
        return Err(Error::InvalidParameter("fit_n must give every group an agent".into()));
    }
    let problem = FitProblem {
        reference,
        config,
        grid,
        params,
    };
    calibrator.calibrate(&problem, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::attitude_to_identity;
    use approx::assert_abs_diff_eq;

    fn params() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn default_prototypes_are_valid() {
        let spec = PopulationSpec::mca_default();
        spec.validate(0.05).unwrap();
    }

    #[test]
    fn prototype_shape_violations() {
        let wv = Worldviews::mca();
        let m = WorldviewId(0);
        let leaky = Prototype::new(m, Kind::Exclusive, &[(0.8, 0.5, 1.0), (-0.1, -0.4, 0.2), (-0.7, -1.0, -0.4)])
            .unwrap();
        assert!(leaky.validate(&wv, 0.05).is_err());
        let wrong_group = Prototype::new(m, Kind::Inclusive, &[(0.2, -0.2, 0.5), (0.4, 0.0, 0.8), (0.0, -0.3, 0.4)])
            .unwrap();
        assert!(wrong_group.validate(&wv, 0.05).is_err());
        let negative_side =
            Prototype::new(m, Kind::Inclusive, &[(0.5, -0.2, 0.9), (-0.2, -0.8, -0.1), (0.0, -0.3, 0.4)]).unwrap();
        assert!(negative_side.validate(&wv, 0.05).is_err());
    }

    #[test]
    fn largest_remainder_rounding() {
        assert_eq!(largest_remainder(1000, &[1.0 / 3.0; 3]), vec![334, 333, 333]);
        assert_eq!(largest_remainder(334, &[0.4, 0.6]), vec![134, 200]);
        assert_eq!(largest_remainder(1, &[0.5, 0.5]), vec![1, 0]);
        assert_eq!(largest_remainder(0, &[0.5, 0.5]), vec![0, 0]);
    }

    #[test]
    fn six_agents_are_the_prototypes() {
        let spec = PopulationSpec {
            n: 6,
            ..PopulationSpec::mca_default()
        };
        let pop = build_population(&spec, &params()).unwrap();
        assert_eq!(pop.len(), 6);
        for (agent, proto) in pop.agents().iter().zip(&spec.prototypes) {
            assert_eq!(agent.identity, proto.identity);
            assert_eq!((agent.group, agent.kind), (proto.group, proto.kind));
        }
    }

    #[test]
    fn thousand_agents_rounding() {
        let mut spec = PopulationSpec::mca_default();
        spec.inclusive_fraction[0] = 0.4;
        let pop = build_population(&spec, &params()).unwrap();
        let m: Vec<_> = pop.agents().iter().filter(|a| a.group == WorldviewId(0)).collect();
        assert_eq!(m.len(), 334);
        assert_eq!(m.iter().filter(|a| a.kind == Kind::Inclusive).count(), 134);
        assert_eq!(pop.len(), 1000);
    }

    #[test]
    fn jitter_keeps_invariants_and_is_seeded() {
        let spec = PopulationSpec {
            n: 300,
            jitter: 0.3,
            seed: 11,
            ..PopulationSpec::mca_default()
        };
        let a = build_population(&spec, &params()).unwrap();
        a.validate_agents(0.05).unwrap();
        assert_eq!(a, build_population(&spec, &params()).unwrap());
        let other = build_population(&PopulationSpec { seed: 12, ..spec }, &params()).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn identical_agents_give_unit_indicators() {
        let proto = default_prototypes();
        let spec = PopulationSpec {
            n: 30,
            prototypes: proto.clone(),
            ..PopulationSpec::mca_default()
        };
        let mut pop = build_population(&spec, &params()).unwrap();
        for a in pop.agents_mut() {
            a.identity = proto[0].identity.clone();
        }
        let grid = Grid::new(400).unwrap();
        let ind = compute_indicators(&pop, &grid, &params()).unwrap();
        for v in ind.mean.iter().flatten() {
            assert_eq!(*v, 1.0);
        }
        for v in ind.std.iter().flatten() {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn one_agent_per_group_indicators() {
        let proto = default_prototypes();
        let agents: Vec<Agent> = [0, 2, 4]
            .iter()
            .enumerate()
            .map(|(i, &p)| Agent {
                id: i,
                group: proto[p].group,
                kind: proto[p].kind,
                identity: proto[p].identity.clone(),
            })
            .collect();
        let pop = Population::new(Worldviews::mca(), agents).unwrap();
        let grid = Grid::new(400).unwrap();
        let ind = compute_indicators(&pop, &grid, &params()).unwrap();
        let direct = attitude_to_identity(&proto[0].identity, &proto[2].identity, &grid, &params()).unwrap();
        assert_abs_diff_eq!(ind.mean[0][1], direct, epsilon = 1e-12);
        assert_eq!(ind.std[0][1], 0.0);
    }

    #[test]
    fn empty_group_is_an_error() {
        let proto = default_prototypes();
        let agents = vec![Agent {
            id: 0,
            group: proto[0].group,
            kind: proto[0].kind,
            identity: proto[0].identity.clone(),
        }];
        let pop = Population::new(Worldviews::mca(), agents).unwrap();
        let grid = Grid::new(400).unwrap();
        assert!(matches!(
            compute_indicators(&pop, &grid, &params()),
            Err(Error::EmptyGroup(_))
        ));
    }

    fn flat(v: f64) -> IndicatorMatrix {
        IndicatorMatrix::new(Worldviews::mca(), vec![vec![v; 3]; 3], vec![vec![0.2; 3]; 3]).unwrap()
    }

    #[test]
    fn objective_worked_values() {
        let r = flat(0.5);
        assert_eq!(objective(&r, &r), Objective { l1: 0.0, avg_rel: 0.0, max_rel: 0.0 });
        let mut c = r.clone();
        c.mean[1][2] = 0.4;
        let o = objective(&c, &r);
        assert_abs_diff_eq!(o.l1, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(o.avg_rel, 0.2 / 18.0, epsilon = 1e-15);
        assert_abs_diff_eq!(o.max_rel, 0.2, epsilon = 1e-15);
        assert_eq!(objective(&r, &c), o);
    }

    #[test]
    fn decode_always_yields_valid_specs() {
        let reference = flat(0.3);
        let cfg = FitConfig::default();
        let grid = Grid::new(400).unwrap();
        let p = params();
        let problem = FitProblem {
            reference: &reference,
            config: &cfg,
            grid: &grid,
            params: &p,
        };
        let corners = [0.0, 1.0, 0.5];
        for c in corners {
            let spec = problem.decode(&vec![c; problem.dim()]);
            spec.validate(p.epsilon).unwrap();
        }
        let mut rng = stream(3, Stream::FitStart, 0);
        for _ in 0..200 {
            let u: Vec<f64> = (0..problem.dim()).map(|_| rng.random::<f64>()).collect();
            problem.decode(&u).validate(p.epsilon).unwrap();
        }
    }

    #[test]
    fn zero_budget_ranks_the_starts() {
        let grid = Grid::new(100).unwrap();
        let p = ModelParams { d: 100, ..params() };
        let reference = compute_indicators(
            &build_population(&PopulationSpec { n: 30, ..PopulationSpec::mca_default() }, &p).unwrap(),
            &grid,
            &p,
        )
        .unwrap();
        let cfg = FitConfig {
            fit_n: 30,
            n_starts: 10,
            budget: 0,
            ..FitConfig::default()
        };
        let r = fit(&reference, &cfg, &grid, &p, 5).unwrap();
        assert_eq!(r.candidates.len(), 10);
        assert_eq!(r.evaluations, 10);
        assert!(r.candidates.windows(2).all(|w| w[0].objective.l1 <= w[1].objective.l1));
        assert_eq!(r, fit(&reference, &cfg, &grid, &p, 5).unwrap());
    }
}
