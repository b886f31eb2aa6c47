//! Threat messages and the margin contraction they trigger.
//!
//! A message broadcasts the terrorist's identity. Every agent that the
//! terrorist evaluates negatively reacts with intensity
//! `mu = alpha * tanh(w / 2)` and pulls the bound of its main-worldview
//! segment facing the terrorist toward its own position, so that
//! `width' - eps = (1 + mu) * (width - eps)`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    group_of, squash, AcceptanceSegment, AttitudeProfile, CulturalIdentity, Grid, ModelParams,
    WorldviewId,
};
use crate::pairwise::PairwiseAttitudes;
use crate::population::{Kind, Population};

#[derive(Clone, Debug, PartialEq)]
pub struct TerroristProfile {
    identity: CulturalIdentity,
    main_worldview: WorldviewId,
}

impl TerroristProfile {
    /// Position `main_position` on the main worldview, `other_position`
    /// elsewhere, every margin `width` wide and clamped to [-1, 1].
    pub fn new(
        k: usize,
        main: WorldviewId,
        main_position: f64,
        other_position: f64,
        width: f64,
    ) -> Result<Self> {
        if main.0 >= k {
            return Err(Error::InvalidParameter(format!(
                "terrorist main worldview {} out of range for K={k}",
                main.0
            )));
        }
        if !(width >= 0.0) || !(-1.0..=1.0).contains(&main_position) || !(-1.0..=1.0).contains(&other_position)
        {
            return Err(Error::InvalidParameter(
                "terrorist positions must lie in [-1, 1] and width must be >= 0".into(),
            ));
        }
        let segments = (0..k)
            .map(|i| {
                let a = if i == main.0 { main_position } else { other_position };
                AcceptanceSegment::from_widths(a, width, width)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_identity(CulturalIdentity::new(segments)?)
    }

    /// Extreme profile: +1 on the main worldview, -1 elsewhere, margins `epsilon`.
    pub fn extreme(k: usize, main: WorldviewId, epsilon: f64) -> Result<Self> {
        Self::new(k, main, 1.0, -1.0, epsilon)
    }

    pub fn from_identity(identity: CulturalIdentity) -> Result<Self> {
        let main_worldview = group_of(&identity);
        Ok(TerroristProfile {
            identity,
            main_worldview,
        })
    }

    pub fn identity(&self) -> &CulturalIdentity {
        &self.identity
    }

    pub fn main_worldview(&self) -> WorldviewId {
        self.main_worldview
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    Lower,
    Upper,
}

impl fmt::Display for BoundSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundSide::Lower => "lower",
            BoundSide::Upper => "upper",
        })
    }
}

/// One bound moved by one reaction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundChange {
    pub worldview: WorldviewId,
    pub side: BoundSide,
    pub before: f64,
    pub after: f64,
}

/// An agent's reaction to one message.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreatReaction {
    /// Terrorist's attitude about the agent.
    pub omega_qi: f64,
    pub mu: f64,
    pub changes: Vec<BoundChange>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreatUpdateRecord {
    pub t: usize,
    pub agent_id: usize,
    pub group: WorldviewId,
    pub kind: Kind,
    pub omega_qi: f64,
    pub mu: f64,
    pub worldview: WorldviewId,
    pub side: BoundSide,
    pub bound_before: f64,
    pub bound_after: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub n_messages: usize,
    pub terrorist: TerroristProfile,
    pub record_trace: bool,
    /// Also contract the margins of the terrorist's non-main worldviews.
    pub all_worldviews: bool,
}

impl ScenarioSpec {
    pub fn new(terrorist: TerroristProfile) -> Self {
        ScenarioSpec {
            n_messages: 7,
            terrorist,
            record_trace: true,
            all_worldviews: false,
        }
    }
}

/// Reaction intensity: 0 for a non-negative attitude, otherwise
/// `alpha * (e^w - 1) / (e^w + 1)`, in `(-alpha * tanh(1/2), 0)` for `w` in `[-1, 0)`.
pub fn reaction_intensity(omega_qi: f64, alpha: f64) -> f64 {
    if omega_qi >= 0.0 {
        0.0
    } else {
        alpha * squash(omega_qi)
    }
}

/// Moves `bound` toward `position`, stopping `epsilon` short of it.
fn contract(bound: f64, position: f64, mu: f64, epsilon: f64) -> f64 {
    let offset = bound - position;
    if offset == 0.0 {
        return bound;
    }
    bound + mu * (offset - epsilon * offset.signum())
}

fn contract_toward(
    seg: &AcceptanceSegment,
    threat_position: f64,
    mu: f64,
    epsilon: f64,
    worldview: WorldviewId,
) -> (AcceptanceSegment, BoundChange) {
    let to_lower = (seg.lower() - threat_position).abs();
    let to_upper = (seg.upper() - threat_position).abs();
    if to_upper <= to_lower {
        let after = contract(seg.upper(), seg.position(), mu, epsilon).clamp(seg.position(), 1.0);
        (
            seg.with_upper(after),
            BoundChange {
                worldview,
                side: BoundSide::Upper,
                before: seg.upper(),
                after,
            },
        )
    } else {
        let after = contract(seg.lower(), seg.position(), mu, epsilon).clamp(-1.0, seg.position());
        (
            seg.with_lower(after),
            BoundChange {
                worldview,
                side: BoundSide::Lower,
                before: seg.lower(),
                after,
            },
        )
    }
}

fn check_widths(identity: &CulturalIdentity, epsilon: f64) -> Result<()> {
    if identity.min_width() < epsilon - 1e-12 {
        return Err(Error::InvalidIdentity(format!(
            "margin narrower than epsilon={epsilon} (min width {})",
            identity.min_width()
        )));
    }
    Ok(())
}

fn react(
    identity: &CulturalIdentity,
    omega_qi: f64,
    terrorist: &TerroristProfile,
    all_worldviews: bool,
    params: &ModelParams,
) -> Option<(CulturalIdentity, ThreatReaction)> {
    if omega_qi >= 0.0 {
        return None;
    }
    let mu = reaction_intensity(omega_qi, params.alpha);
    let mut updated = identity.clone();
    let mut changes = Vec::new();
    for (k, tseg) in terrorist.identity.segments().iter().enumerate() {
        let k = WorldviewId(k);
        if k != terrorist.main_worldview && !all_worldviews {
            continue;
        }
        let (seg, change) = contract_toward(identity.segment(k), tseg.position(), mu, params.epsilon, k);
        updated.set_segment(k, seg);
        changes.push(change);
    }
    Some((
        updated,
        ThreatReaction {
            omega_qi,
            mu,
            changes,
        },
    ))
}

/// Applies one message to one identity. Returns the identity unchanged and
/// no reaction when the terrorist's attitude about it is non-negative.
pub fn apply_threat(
    identity: &CulturalIdentity,
    terrorist: &TerroristProfile,
    grid: &Grid,
    params: &ModelParams,
) -> Result<(CulturalIdentity, Option<ThreatReaction>)> {
    apply_threat_with(identity, terrorist, false, grid, params)
}

/// [`apply_threat`] with the optional extension to every worldview.
pub fn apply_threat_with(
    identity: &CulturalIdentity,
    terrorist: &TerroristProfile,
    all_worldviews: bool,
    grid: &Grid,
    params: &ModelParams,
) -> Result<(CulturalIdentity, Option<ThreatReaction>)> {
    check_widths(identity, params.epsilon)?;
    let omega_qi = crate::model::attitude_to_identity(&terrorist.identity, identity, grid, params)?;
    Ok(match react(identity, omega_qi, terrorist, all_worldviews, params) {
        Some((id, r)) => (id, Some(r)),
        None => (identity.clone(), None),
    })
}

/// One broadcast message. Every agent is evaluated against the pre-step
/// state; updates are committed afterwards.
pub fn scenario_step(
    population: &Population,
    spec: &ScenarioSpec,
    t: usize,
    grid: &Grid,
    params: &ModelParams,
) -> Result<(Population, Vec<ThreatUpdateRecord>)> {
    let terrorist = &spec.terrorist;
    if terrorist.identity.k() != population.worldviews().len() {
        return Err(Error::WorldviewMismatch {
            observer: terrorist.identity.k(),
            target: population.worldviews().len(),
        });
    }
    let profile = AttitudeProfile::new(&terrorist.identity, grid);
    let reactions: Vec<Option<(CulturalIdentity, ThreatReaction)>> = population
        .agents()
        .par_iter()
        .map(|agent| {
            check_widths(&agent.identity, params.epsilon)?;
            let omega_qi = profile.identity_attitude(&agent.identity, grid, params)?;
            Ok(react(&agent.identity, omega_qi, terrorist, spec.all_worldviews, params))
        })
        .collect::<Result<_>>()?;

    let mut next = population.clone();
    let mut trace = Vec::new();
    for (agent, reaction) in next.agents_mut().iter_mut().zip(reactions) {
        let Some((identity, r)) = reaction else { continue };
        agent.identity = identity;
        if spec.record_trace {
            trace.extend(r.changes.iter().map(|c| ThreatUpdateRecord {
                t,
                agent_id: agent.id,
                group: agent.group,
                kind: agent.kind,
                omega_qi: r.omega_qi,
                mu: r.mu,
                worldview: c.worldview,
                side: c.side,
                bound_before: c.before,
                bound_after: c.after,
            }));
        }
    }
    Ok((next, trace))
}

/// Group-level summary of one snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub t: usize,
    /// Agents that reacted to the message leading to this snapshot (0 at t=0).
    pub reacting: usize,
    /// `group_means[g][h]`: mean attitude of group `g` agents about group `h` agents.
    pub group_means: Vec<Vec<Option<f64>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioResult {
    /// Populations at t = 0..=n_messages.
    pub snapshots: Vec<Population>,
    /// `traces[t - 1]` holds the records of message `t`.
    pub traces: Vec<Vec<ThreatUpdateRecord>>,
    pub summaries: Vec<StepSummary>,
}

pub(crate) fn group_means(
    population: &Population,
    pairs: &PairwiseAttitudes,
) -> Vec<Vec<Option<f64>>> {
    let agents = population.agents();
    population
        .worldviews()
        .ids()
        .map(|g| {
            population
                .worldviews()
                .ids()
                .map(|h| {
                    pairs
                        .pair_stats(|i| agents[i].group == g, |j| agents[j].group == h)
                        .map(|s| s.mean)
                })
                .collect()
        })
        .collect()
}

fn summarize(
    population: &Population,
    t: usize,
    reacting: usize,
    grid: &Grid,
    params: &ModelParams,
) -> Result<StepSummary> {
    let pairs = PairwiseAttitudes::compute(population, grid, params)?;
    Ok(StepSummary {
        t,
        reacting,
        group_means: group_means(population, &pairs),
    })
}

pub fn run_scenario(
    population: &Population,
    spec: &ScenarioSpec,
    grid: &Grid,
    params: &ModelParams,
) -> Result<ScenarioResult> {
    let mut snapshots = vec![population.clone()];
    let mut traces = Vec::with_capacity(spec.n_messages);
    let mut summaries = vec![summarize(population, 0, 0, grid, params)?];
    for t in 1..=spec.n_messages {
        let recording = ScenarioSpec {
            record_trace: true,
            ..spec.clone()
        };
        let (next, trace) = scenario_step(snapshots.last().expect("initial snapshot"), &recording, t, grid, params)?;
        let reacting = {
            let mut ids: Vec<usize> = trace.iter().map(|r| r.agent_id).collect();
            ids.dedup();
            ids.len()
        };
        summaries.push(summarize(&next, t, reacting, grid, params)?);
        traces.push(if spec.record_trace { trace } else { Vec::new() });
        snapshots.push(next);
    }
    Ok(ScenarioResult {
        snapshots,
        traces,
        summaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Worldviews, WorldviewId};
    use crate::population::Agent;
    use approx::assert_abs_diff_eq;

    const M: WorldviewId = WorldviewId(0);

    fn params() -> ModelParams {
        ModelParams::default()
    }

    fn fanatic() -> CulturalIdentity {
        CulturalIdentity::from_triples(&[(0.95, 0.9, 1.0), (-0.95, -1.0, -0.9), (-0.95, -1.0, -0.9)]).unwrap()
    }

    fn agent_identity(upper_m: f64) -> CulturalIdentity {
        CulturalIdentity::from_triples(&[(0.5, 0.3, upper_m), (-0.5, -0.8, -0.2), (0.2, 0.0, 0.4)]).unwrap()
    }

    #[test]
    fn intensity_values() {
        assert_eq!(reaction_intensity(0.3, 0.5), 0.0);
        assert_eq!(reaction_intensity(0.0, 0.5), 0.0);
        // 0.5 * (e^-1 - 1) / (e^-1 + 1)
        assert_abs_diff_eq!(reaction_intensity(-1.0, 0.5), -0.231_058_578_630_004_9, epsilon = 1e-15);
        assert_abs_diff_eq!(reaction_intensity(-0.5, 0.5), -0.122_459_331_201_854_6, epsilon = 1e-15);
    }

    #[test]
    fn extreme_terrorist_is_clamped() {
        let t = TerroristProfile::extreme(3, M, 0.05).unwrap();
        let m = t.identity().segment(M);
        assert_eq!((m.position(), m.lower(), m.upper()), (1.0, 0.95, 1.0));
        let c = t.identity().segment(WorldviewId(1));
        assert_eq!((c.position(), c.lower(), c.upper()), (-1.0, -1.0, -0.95));
        assert_eq!(t.main_worldview(), M);
        assert!(TerroristProfile::extreme(3, WorldviewId(3), 0.05).is_err());
    }

    #[test]
    fn worked_bound_update() {
        // The update rule itself, at the worked reaction intensity for w = -1.
        let seg = AcceptanceSegment::new(0.5, 0.3, 0.7).unwrap();
        let mu = reaction_intensity(-1.0, 0.5);
        let (out, change) = contract_toward(&seg, 1.0, mu, 0.05, M);
        assert_eq!(change.side, BoundSide::Upper);
        assert_abs_diff_eq!(out.upper(), 0.665_34, epsilon = 1e-5);
        assert!(out.upper_width() >= 0.05);
        assert_eq!(out.lower(), 0.3);
    }

    #[test]
    fn equidistant_bounds_shrink_upper() {
        let seg = AcceptanceSegment::new(0.0, -0.4, 0.4).unwrap();
        let (_, change) = contract_toward(&seg, 0.0, -0.2, 0.05, M);
        assert_eq!(change.side, BoundSide::Upper);
    }

    #[test]
    fn epsilon_width_is_a_fixed_point() {
        let seg = AcceptanceSegment::new(0.5, 0.3, 0.5 + 0.05).unwrap();
        let (out, _) = contract_toward(&seg, 1.0, -0.23, 0.05, M);
        assert_eq!(out.upper().to_bits(), seg.upper().to_bits());
    }

    #[test]
    fn threatened_agent_contracts_main_worldview_only() {
        let g = Grid::new(400).unwrap();
        let t = TerroristProfile::extreme(3, M, 0.05).unwrap();
        let id = agent_identity(0.7);
        let (out, r) = apply_threat(&id, &t, &g, &params()).unwrap();
        let r = r.expect("agent is threatened");
        assert!(r.omega_qi < 0.0);
        assert!(r.mu < 0.0 && r.mu > -0.5 * 0.5f64.tanh());
        assert_eq!(r.changes.len(), 1);
        assert_eq!(out.segment(M).position(), 0.5);
        assert!(out.segment(M).upper() < 0.7);
        assert_eq!(out.segments()[1..], id.segments()[1..]);
    }

    #[test]
    fn non_threatened_agent_is_untouched() {
        let g = Grid::new(400).unwrap();
        let t = TerroristProfile::extreme(3, M, 0.05).unwrap();
        let id = fanatic();
        let (out, r) = apply_threat(&id, &t, &g, &params()).unwrap();
        assert!(r.is_none());
        assert_eq!(out, id);
    }

    #[test]
    fn narrow_identity_is_rejected() {
        let g = Grid::new(400).unwrap();
        let t = TerroristProfile::extreme(3, M, 0.05).unwrap();
        let id = agent_identity(0.51);
        assert!(apply_threat(&id, &t, &g, &params()).is_err());
    }

    #[test]
    fn all_worldviews_extension() {
        let g = Grid::new(400).unwrap();
        let t = TerroristProfile::extreme(3, M, 0.05).unwrap();
        let id = agent_identity(0.7);
        let (out, r) = apply_threat_with(&id, &t, true, &g, &params()).unwrap();
        let r = r.unwrap();
        assert_eq!(r.changes.len(), 3);
        assert_eq!(r.changes[1].side, BoundSide::Lower);
        assert!(out.segment(WorldviewId(1)).lower() > -0.8);
    }

    fn pop(ids: Vec<CulturalIdentity>) -> Population {
        let agents = ids
            .into_iter()
            .enumerate()
            .map(|(i, identity)| Agent {
                id: i,
                group: group_of(&identity),
                kind: Kind::Inclusive,
                identity,
            })
            .collect();
        Population::new(Worldviews::mca(), agents).unwrap()
    }

    #[test]
    fn step_is_symmetric_and_synchronous() {
        let g = Grid::new(400).unwrap();
        let spec = ScenarioSpec::new(TerroristProfile::extreme(3, M, 0.05).unwrap());
        let p = pop(vec![agent_identity(0.7), agent_identity(0.7)]);
        let (next, trace) = scenario_step(&p, &spec, 1, &g, &params()).unwrap();
        assert_eq!(trace.len(), 2);
        assert_eq!(next.agents()[0].identity, next.agents()[1].identity);
        assert_eq!(trace[0].bound_after, trace[1].bound_after);

        let lone = pop(vec![fanatic()]);
        let (same, trace) = scenario_step(&lone, &spec, 1, &g, &params()).unwrap();
        assert!(trace.is_empty());
        assert_eq!(same, lone);
    }

    #[test]
    fn scenario_snapshots_and_determinism() {
        let g = Grid::new(400).unwrap();
        let mut spec = ScenarioSpec::new(TerroristProfile::extreme(3, M, 0.05).unwrap());
        let p = pop(vec![agent_identity(0.9), agent_identity(0.7)]);
        let r = run_scenario(&p, &spec, &g, &params()).unwrap();
        assert_eq!(r.snapshots.len(), 8);
        assert_eq!(r.summaries.len(), 8);
        let widths: Vec<f64> = r.snapshots.iter().map(|s| s.agents()[0].identity.segment(M).upper_width()).collect();
        assert!(widths.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r, run_scenario(&p, &spec, &g, &params()).unwrap());

        spec.n_messages = 0;
        let r = run_scenario(&p, &spec, &g, &params()).unwrap();
        assert_eq!(r.snapshots.len(), 1);
        assert!(r.traces.is_empty());
    }
}
