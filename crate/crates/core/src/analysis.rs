//! Post-hoc analyses of scenario results: attitude matrices, attitude
//! trajectories toward a group, per-agent change classes and the margin
//! conditions that predict an attitude increase toward the terrorists' group.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AttitudeProfile, Grid, ModelParams, WorldviewId, Worldviews};
use crate::pairwise::PairwiseAttitudes;
use crate::population::{Kind, Population};
use crate::threat::ScenarioResult;

/// Default sign-detection tolerance for [`classify_changes`].
pub const DEFAULT_TAU: f64 = 1e-9;

/// Tolerance of the "than the population mean" comparisons.
const MEAN_CMP_TOL: f64 = 1e-12;

/// Mean attitudes by observer group and target group, overall and per
/// target kind. `None` marks a cell without any `i != j` pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttitudeMatrix {
    pub worldviews: Worldviews,
    /// `group[g][h]`
    pub group: Vec<Vec<Option<f64>>>,
    /// `by_kind[g][h][kind]`, kinds in [`Kind::ALL`] order.
    pub by_kind: Vec<Vec<[Option<f64>; 2]>>,
}

pub fn attitude_matrix(
    population: &Population,
    grid: &Grid,
    params: &ModelParams,
) -> Result<AttitudeMatrix> {
    let pairs = PairwiseAttitudes::compute(population, grid, params)?;
    Ok(matrix_from_pairs(population, &pairs))
}

pub(crate) fn matrix_from_pairs(population: &Population, pairs: &PairwiseAttitudes) -> AttitudeMatrix {
    let wv = population.worldviews();
    let agents = population.agents();
    let mean = |g: WorldviewId, h: WorldviewId, kind: Option<Kind>| {
        pairs
            .pair_stats(
                |i| agents[i].group == g,
                |j| agents[j].group == h && kind.is_none_or(|k| agents[j].kind == k),
            )
            .map(|s| s.mean)
    };
    let group = wv
        .ids()
        .map(|g| wv.ids().map(|h| mean(g, h, None)).collect())
        .collect();
    let by_kind = wv
        .ids()
        .map(|g| {
            wv.ids()
                .map(|h| Kind::ALL.map(|k| mean(g, h, Some(k))))
                .collect()
        })
        .collect();
    AttitudeMatrix {
        worldviews: wv.clone(),
        group,
        by_kind,
    }
}

fn mean_of_present(values: &[Option<f64>]) -> Option<f64> {
    let (sum, n) = values
        .iter()
        .flatten()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Mean over all agents `i` of `i`'s mean attitude about the agents of
/// `target` (excluding itself), at one snapshot.
pub fn mean_attitude_toward(
    population: &Population,
    target: WorldviewId,
    grid: &Grid,
    params: &ModelParams,
) -> Result<f64> {
    let pairs = PairwiseAttitudes::compute(population, grid, params)?;
    mean_toward_from_pairs(population, &pairs, target)
        .ok_or_else(|| Error::EmptyGroup(population.worldviews().label(target).to_string()))
}

pub(crate) fn mean_toward_from_pairs(
    population: &Population,
    pairs: &PairwiseAttitudes,
    target: WorldviewId,
) -> Option<f64> {
    let agents = population.agents();
    mean_of_present(&pairs.mean_toward(|j| agents[j].group == target))
}

/// [`mean_attitude_toward`] for every snapshot of a scenario.
pub fn mean_attitude_toward_group(
    result: &ScenarioResult,
    target: WorldviewId,
    grid: &Grid,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    result
        .snapshots
        .iter()
        .map(|p| mean_attitude_toward(p, target, grid, params))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChangeClass {
    DecreaseBoth,
    IncreaseInclusiveOnly,
    IncreaseBoth,
    IncreaseExclusiveOnly,
    NoChange,
}

impl ChangeClass {
    pub const ALL: [ChangeClass; 5] = [
        ChangeClass::DecreaseBoth,
        ChangeClass::IncreaseInclusiveOnly,
        ChangeClass::IncreaseBoth,
        ChangeClass::IncreaseExclusiveOnly,
        ChangeClass::NoChange,
    ];

    /// Classifies attitude changes toward the inclusive and exclusive agents
    /// of the target group. A missing axis is ignored.
    pub fn classify(delta_inclusive: Option<f64>, delta_exclusive: Option<f64>, tau: f64) -> Self {
        let up = |d: Option<f64>| d.is_some_and(|d| d > tau);
        let down = |d: Option<f64>| d.is_some_and(|d| d < -tau);
        match (up(delta_inclusive), up(delta_exclusive)) {
            (true, true) => ChangeClass::IncreaseBoth,
            (true, false) => ChangeClass::IncreaseInclusiveOnly,
            (false, true) => ChangeClass::IncreaseExclusiveOnly,
            (false, false) if down(delta_inclusive) || down(delta_exclusive) => ChangeClass::DecreaseBoth,
            (false, false) => ChangeClass::NoChange,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ChangeClass::DecreaseBoth => "decrease_both",
            ChangeClass::IncreaseInclusiveOnly => "increase_inclusive_only",
            ChangeClass::IncreaseBoth => "increase_both",
            ChangeClass::IncreaseExclusiveOnly => "increase_exclusive_only",
            ChangeClass::NoChange => "no_change",
        }
    }
}

impl fmt::Display for ChangeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentChange {
    pub agent_id: usize,
    pub group: WorldviewId,
    pub kind: Kind,
    pub delta_inclusive: Option<f64>,
    pub delta_exclusive: Option<f64>,
    pub class: ChangeClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// One label per agent, final snapshot against the initial one.
    FinalVsInitial,
    /// One label per agent and message, each snapshot against the previous one.
    PerStep,
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::FinalVsInitial => "final_vs_initial",
            Aggregation::PerStep => "per_step",
        }
    }
}

/// Class counts for one observer cell (`None` group/kind = all agents).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub group: Option<WorldviewId>,
    pub kind: Option<Kind>,
    /// In [`ChangeClass::ALL`] order.
    pub counts: [usize; 5],
    pub total: usize,
}

impl DistributionRow {
    pub fn percent(&self, class: ChangeClass) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let i = ChangeClass::ALL.iter().position(|&c| c == class).expect("listed");
        100.0 * self.counts[i] as f64 / self.total as f64
    }

    pub fn percentages(&self) -> [f64; 5] {
        ChangeClass::ALL.map(|c| self.percent(c))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangeDistribution {
    pub aggregation: Aggregation,
    /// Overall row first, then one row per observer (group, kind).
    pub rows: Vec<DistributionRow>,
}

impl ChangeDistribution {
    pub fn overall(&self) -> &DistributionRow {
        &self.rows[0]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangeReport {
    pub target: WorldviewId,
    pub tau: f64,
    pub agents: Vec<AgentChange>,
    pub distributions: Vec<ChangeDistribution>,
}

impl ChangeReport {
    pub fn distribution(&self, aggregation: Aggregation) -> &ChangeDistribution {
        self.distributions
            .iter()
            .find(|d| d.aggregation == aggregation)
            .expect("both aggregations are always reported")
    }
}

/// Per-agent mean attitude toward inclusive and exclusive target agents.
fn kind_means(
    population: &Population,
    target: WorldviewId,
    grid: &Grid,
    params: &ModelParams,
) -> Result<[Vec<Option<f64>>; 2]> {
    let pairs = PairwiseAttitudes::compute(population, grid, params)?;
    let agents = population.agents();
    Ok(Kind::ALL.map(|k| pairs.mean_toward(|j| agents[j].group == target && agents[j].kind == k)))
}

fn delta(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(b? - a?)
}

fn distribution(
    aggregation: Aggregation,
    worldviews: &Worldviews,
    labels: &[(WorldviewId, Kind, ChangeClass)],
) -> ChangeDistribution {
    let row = |g: Option<WorldviewId>, k: Option<Kind>| {
        let mut counts = [0; 5];
        let mut total = 0;
        for &(lg, lk, c) in labels {
            if g.is_none_or(|g| g == lg) && k.is_none_or(|k| k == lk) {
                counts[ChangeClass::ALL.iter().position(|&x| x == c).expect("listed")] += 1;
                total += 1;
            }
        }
        DistributionRow {
            group: g,
            kind: k,
            counts,
            total,
        }
    };
    let mut rows = vec![row(None, None)];
    for g in worldviews.ids() {
        for k in Kind::ALL {
            rows.push(row(Some(g), Some(k)));
        }
    }
    ChangeDistribution { aggregation, rows }
}

/// Classifies every agent's change of attitude toward the inclusive and
/// exclusive agents of `target`, both final-vs-initial and per message.
pub fn classify_changes(
    result: &ScenarioResult,
    target: WorldviewId,
    tau: f64,
    grid: &Grid,
    params: &ModelParams,
) -> Result<ChangeReport> {
    if result.snapshots.len() < 2 {
        return Err(Error::InvalidParameter(
            "change classification needs at least two snapshots".into(),
        ));
    }
    let means = result
        .snapshots
        .iter()
        .map(|p| kind_means(p, target, grid, params))
        .collect::<Result<Vec<_>>>()?;
    let first = &result.snapshots[0];
    let last = means.len() - 1;

    let agents: Vec<AgentChange> = first
        .agents()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let di = delta(means[0][0][i], means[last][0][i]);
            let de = delta(means[0][1][i], means[last][1][i]);
            AgentChange {
                agent_id: a.id,
                group: a.group,
                kind: a.kind,
                delta_inclusive: di,
                delta_exclusive: de,
                class: ChangeClass::classify(di, de, tau),
            }
        })
        .collect();

    let final_labels: Vec<_> = agents.iter().map(|a| (a.group, a.kind, a.class)).collect();
    let step_labels: Vec<_> = means
        .windows(2)
        .flat_map(|w| {
            first.agents().iter().enumerate().map(move |(i, a)| {
                let class = ChangeClass::classify(
                    delta(w[0][0][i], w[1][0][i]),
                    delta(w[0][1][i], w[1][1][i]),
                    tau,
                );
                (a.group, a.kind, class)
            })
        })
        .collect();

    let wv = first.worldviews();
    Ok(ChangeReport {
        target,
        tau,
        agents,
        distributions: vec![
            distribution(Aggregation::FinalVsInitial, wv, &final_labels),
            distribution(Aggregation::PerStep, wv, &step_labels),
        ],
    })
}

/// Mean margin statistics of one group on the target worldview.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginStats {
    pub agents: usize,
    pub position: f64,
    pub lower_width: f64,
    pub upper_width: f64,
    /// Mean segment attitude, on the target worldview only, about the
    /// target group's agents.
    pub attitude_to_target: Option<f64>,
}

/// For the target group: wider margin(h), wider margin(l), lower position
/// than the population. For the other groups: narrower margin(h), wider
/// margin(l), higher position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionFlags {
    pub upper_width: bool,
    pub lower_width: bool,
    pub position: bool,
}

impl ConditionFlags {
    pub fn all(&self) -> bool {
        self.upper_width && self.lower_width && self.position
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupConditions {
    pub group: WorldviewId,
    pub stats: MarginStats,
    pub flags: ConditionFlags,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionProfile {
    pub worldviews: Worldviews,
    pub target: WorldviewId,
    pub population: MarginStats,
    pub groups: Vec<GroupConditions>,
}

impl ConditionProfile {
    pub fn all_met(&self) -> bool {
        self.groups.iter().all(|g| g.flags.all())
    }
}

fn margin_stats(
    population: &Population,
    target: WorldviewId,
    toward_target: &[Option<f64>],
    member: impl Fn(usize) -> bool,
) -> MarginStats {
    let mut n = 0usize;
    let (mut pos, mut lw, mut uw) = (0.0, 0.0, 0.0);
    let mut att = Vec::new();
    for (i, a) in population.agents().iter().enumerate() {
        if !member(i) {
            continue;
        }
        let s = a.identity.segment(target);
        n += 1;
        pos += s.position();
        lw += s.lower_width();
        uw += s.upper_width();
        att.push(toward_target[i]);
    }
    let nf = n.max(1) as f64;
    MarginStats {
        agents: n,
        position: pos / nf,
        lower_width: lw / nf,
        upper_width: uw / nf,
        attitude_to_target: mean_of_present(&att),
    }
}

pub fn condition_profile(
    population: &Population,
    target: WorldviewId,
    grid: &Grid,
    params: &ModelParams,
) -> Result<ConditionProfile> {
    let wv = population.worldviews();
    let agents = population.agents();
    for g in wv.ids() {
        if population.group_size(g) == 0 {
            return Err(Error::EmptyGroup(wv.label(g).to_string()));
        }
    }
    let targets: Vec<usize> = (0..agents.len()).filter(|&j| agents[j].group == target).collect();
    let toward_target: Vec<Option<f64>> = agents
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let profile = AttitudeProfile::new(&a.identity, grid);
            let mut sum = 0.0;
            let mut n = 0usize;
            for &j in targets.iter().filter(|&&j| j != i) {
                sum += profile.segment_attitude(target, agents[j].identity.segment(target), grid, params)?;
                n += 1;
            }
            Ok((n > 0).then(|| sum / n as f64))
        })
        .collect::<Result<_>>()?;

    let overall = margin_stats(population, target, &toward_target, |_| true);
    let gt = |a: f64, b: f64| a > b + MEAN_CMP_TOL;
    let groups = wv
        .ids()
        .map(|g| {
            let stats = margin_stats(population, target, &toward_target, |i| agents[i].group == g);
            let flags = if g == target {
                ConditionFlags {
                    upper_width: gt(stats.upper_width, overall.upper_width),
                    lower_width: gt(stats.lower_width, overall.lower_width),
                    position: gt(overall.position, stats.position),
                }
            } else {
                ConditionFlags {
                    upper_width: gt(overall.upper_width, stats.upper_width),
                    lower_width: gt(stats.lower_width, overall.lower_width),
                    position: gt(stats.position, overall.position),
                }
            };
            GroupConditions { group: g, stats, flags }
        })
        .collect();
    Ok(ConditionProfile {
        worldviews: wv.clone(),
        target,
        population: overall,
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CulturalIdentity;
    use crate::population::Agent;
    use crate::synthesis::{build_population, PopulationSpec};
    use crate::threat::{run_scenario, ScenarioSpec, TerroristProfile};
    use approx::assert_abs_diff_eq;

    const M: WorldviewId = WorldviewId(0);

    fn params() -> ModelParams {
        ModelParams::default()
    }

    fn small_pop(n: usize) -> Population {
        build_population(&PopulationSpec { n, ..PopulationSpec::mca_default() }, &params()).unwrap()
    }

    #[test]
    fn classify_definitions() {
        use ChangeClass::*;
        assert_eq!(ChangeClass::classify(Some(0.1), Some(-0.1), 1e-9), IncreaseInclusiveOnly);
        assert_eq!(ChangeClass::classify(Some(-0.1), Some(0.1), 1e-9), IncreaseExclusiveOnly);
        assert_eq!(ChangeClass::classify(Some(0.1), Some(0.1), 1e-9), IncreaseBoth);
        assert_eq!(ChangeClass::classify(Some(-0.1), Some(-0.1), 1e-9), DecreaseBoth);
        assert_eq!(ChangeClass::classify(Some(-0.1), Some(0.0), 1e-9), DecreaseBoth);
        assert_eq!(ChangeClass::classify(Some(0.0), Some(0.0), 1e-9), NoChange);
        assert_eq!(ChangeClass::classify(Some(0.5), Some(-0.5), f64::INFINITY), NoChange);
        assert_eq!(ChangeClass::classify(None, Some(0.2), 1e-9), IncreaseExclusiveOnly);
        assert_eq!(ChangeClass::classify(None, Some(-0.2), 1e-9), DecreaseBoth);
        assert_eq!(ChangeClass::classify(None, None, 1e-9), NoChange);
    }

    #[test]
    fn matrix_of_identical_agents_is_all_ones() {
        let mut pop = small_pop(12);
        let id = pop.agents()[0].identity.clone();
        for a in pop.agents_mut() {
            a.identity = id.clone();
        }
        let grid = params().grid().unwrap();
        let m = attitude_matrix(&pop, &grid, &params()).unwrap();
        assert!(m.group.iter().flatten().all(|v| *v == Some(1.0)));
        assert!(m.by_kind.iter().flatten().flatten().all(|v| *v == Some(1.0)));
    }

    #[test]
    fn single_agent_matrix_is_absent() {
        let pop = small_pop(1);
        let grid = params().grid().unwrap();
        let m = attitude_matrix(&pop, &grid, &params()).unwrap();
        assert!(m.group.iter().flatten().all(Option::is_none));
        assert!(m.by_kind.iter().flatten().flatten().all(Option::is_none));
    }

    #[test]
    fn matrix_matches_indicators() {
        let pop = small_pop(30);
        let grid = params().grid().unwrap();
        let m = attitude_matrix(&pop, &grid, &params()).unwrap();
        let ind = crate::synthesis::compute_indicators(&pop, &grid, &params()).unwrap();
        for g in 0..3 {
            for h in 0..3 {
                assert_abs_diff_eq!(m.group[g][h].unwrap(), ind.mean[g][h], epsilon = 1e-12);
            }
        }
    }

    fn unthreatened_pop() -> Population {
        let id = CulturalIdentity::from_triples(&[(0.95, 0.9, 1.0), (-0.95, -1.0, -0.9), (-0.95, -1.0, -0.9)])
            .unwrap();
        let agents = (0..4)
            .map(|i| Agent {
                id: i,
                group: M,
                kind: if i % 2 == 0 { Kind::Inclusive } else { Kind::Exclusive },
                identity: id.clone(),
            })
            .collect();
        Population::new(Worldviews::mca(), agents).unwrap()
    }

    #[test]
    fn no_threat_means_no_change() {
        let p = params();
        let grid = p.grid().unwrap();
        let spec = ScenarioSpec::new(TerroristProfile::extreme(3, M, p.epsilon).unwrap());
        let result = run_scenario(&unthreatened_pop(), &spec, &grid, &p).unwrap();
        let series = mean_attitude_toward_group(&result, M, &grid, &p).unwrap();
        assert_eq!(series.len(), 8);
        assert!(series.iter().all(|v| *v == series[0]));
        let report = classify_changes(&result, M, DEFAULT_TAU, &grid, &p).unwrap();
        for d in &report.distributions {
            assert_eq!(d.overall().percent(ChangeClass::NoChange), 100.0);
        }
    }

    #[test]
    fn zero_message_series_has_one_point() {
        let p = params();
        let grid = p.grid().unwrap();
        let mut spec = ScenarioSpec::new(TerroristProfile::extreme(3, M, p.epsilon).unwrap());
        spec.n_messages = 0;
        let result = run_scenario(&small_pop(30), &spec, &grid, &p).unwrap();
        assert_eq!(mean_attitude_toward_group(&result, M, &grid, &p).unwrap().len(), 1);
        assert!(classify_changes(&result, M, DEFAULT_TAU, &grid, &p).is_err());
    }

    #[test]
    fn percentages_sum_to_hundred() {
        let p = params();
        let grid = p.grid().unwrap();
        let spec = ScenarioSpec::new(TerroristProfile::extreme(3, M, p.epsilon).unwrap());
        let result = run_scenario(&small_pop(60), &spec, &grid, &p).unwrap();
        let report = classify_changes(&result, M, DEFAULT_TAU, &grid, &p).unwrap();
        for d in &report.distributions {
            for row in &d.rows {
                if row.total > 0 {
                    assert_abs_diff_eq!(row.percentages().iter().sum::<f64>(), 100.0, epsilon = 1e-9);
                }
            }
        }
        assert_eq!(report.distribution(Aggregation::PerStep).overall().total, 60 * 7);
    }

    #[test]
    fn homogeneous_profile_has_no_flags() {
        let p = params();
        let grid = p.grid().unwrap();
        let id = CulturalIdentity::from_triples(&[(0.3, -0.2, 0.6), (0.2, -0.3, 0.5), (0.1, -0.2, 0.4)]).unwrap();
        let agents = (0..9)
            .map(|i| Agent {
                id: i,
                group: WorldviewId(i % 3),
                kind: Kind::Inclusive,
                identity: id.clone(),
            })
            .collect();
        let pop = Population::new(Worldviews::mca(), agents).unwrap();
        let prof = condition_profile(&pop, M, &grid, &p).unwrap();
        for g in &prof.groups {
            assert_eq!(g.flags, ConditionFlags { upper_width: false, lower_width: false, position: false });
        }
    }

    #[test]
    fn wide_upper_margin_in_target_group_is_flagged() {
        let p = params();
        let grid = p.grid().unwrap();
        // M agents: margin(h) 0.6; others 0.15 -> population mean 0.3.
        let m = CulturalIdentity::from_triples(&[(0.3, 0.0, 0.9), (0.1, -0.2, 0.2), (0.1, -0.2, 0.2)]).unwrap();
        let other = |g: usize| {
            let mut t = [(0.1, -0.2, 0.25), (0.0, -0.2, 0.2), (0.0, -0.2, 0.2)];
            t[g] = (0.5, 0.2, 0.8);
            t[0] = (0.1, -0.2, 0.25);
            CulturalIdentity::from_triples(&t).unwrap()
        };
        let agents = vec![
            Agent { id: 0, group: M, kind: Kind::Inclusive, identity: m },
            Agent { id: 1, group: WorldviewId(1), kind: Kind::Inclusive, identity: other(1) },
            Agent { id: 2, group: WorldviewId(2), kind: Kind::Inclusive, identity: other(2) },
        ];
        let pop = Population::new(Worldviews::mca(), agents).unwrap();
        let prof = condition_profile(&pop, M, &grid, &p).unwrap();
        assert_abs_diff_eq!(prof.population.upper_width, 0.3, epsilon = 1e-12);
        assert!(prof.groups[0].flags.upper_width);
        assert!(prof.groups[1].flags.upper_width);
    }
}
