#![allow(dead_code)]

use culture_threat::model::{CulturalIdentity, Grid, ModelParams, WorldviewId, Worldviews};
use culture_threat::population::{Agent, Kind, Population};
use culture_threat::threat::{run_scenario, ScenarioResult, ScenarioSpec, TerroristProfile};

pub const M: WorldviewId = WorldviewId(0);
pub const C: WorldviewId = WorldviewId(1);
pub const A: WorldviewId = WorldviewId(2);

pub fn params() -> ModelParams {
    ModelParams::default()
}

pub fn grid() -> Grid {
    params().grid().unwrap()
}

pub fn identity(t: &[(f64, f64, f64)]) -> CulturalIdentity {
    CulturalIdentity::from_triples(t).unwrap()
}

/// Observer (agent 0) and one group-M target (agent 1).
pub struct PairFixture {
    pub name: &'static str,
    pub observer: Agent,
    pub target: Agent,
}

impl PairFixture {
    pub fn population(&self) -> Population {
        Population::new(Worldviews::mca(), vec![self.observer.clone(), self.target.clone()]).unwrap()
    }

    pub fn run(&self, n_messages: usize) -> ScenarioResult {
        let p = params();
        let mut spec = ScenarioSpec::new(TerroristProfile::extreme(3, M, p.epsilon).unwrap());
        spec.n_messages = n_messages;
        run_scenario(&self.population(), &spec, &grid(), &p).unwrap()
    }
}

fn agent(id: usize, group: WorldviewId, kind: Kind, t: &[(f64, f64, f64)]) -> Agent {
    Agent { id, group, kind, identity: identity(t) }
}

/// Inclusive A observer with a wide upper margin on M, inclusive M target.
pub fn wide_observer_inclusive_target() -> PairFixture {
    PairFixture {
        name: "wide upper margin observer, inclusive M target",
        observer: agent(0, A, Kind::Inclusive, &[(0.0, -0.3, 0.8), (0.1, -0.2, 0.5), (0.6, 0.2, 0.9)]),
        target: agent(1, M, Kind::Inclusive, &[(0.5, -0.2, 0.9), (0.1, -0.2, 0.5), (0.0, -0.3, 0.4)]),
    }
}

/// Exclusive C observer far below an exclusive M target with a narrow upper margin.
pub fn distant_observer_exclusive_target() -> PairFixture {
    PairFixture {
        name: "distant observer, narrow exclusive M target",
        observer: agent(0, C, Kind::Exclusive, &[(-0.9, -1.0, -0.85), (0.7, 0.4, 1.0), (-0.5, -0.8, -0.2)]),
        target: agent(1, M, Kind::Exclusive, &[(0.9, 0.6, 1.0), (-0.6, -0.9, -0.3), (-0.7, -1.0, -0.4)]),
    }
}

/// Exclusive C observer and exclusive M target, both with wide upper margins on M.
pub fn both_wide() -> PairFixture {
    PairFixture {
        name: "both upper margins wide",
        observer: agent(0, C, Kind::Exclusive, &[(-0.2, -0.5, 0.6), (0.7, 0.4, 1.0), (-0.5, -0.8, -0.2)]),
        target: agent(1, M, Kind::Exclusive, &[(0.6, 0.3, 1.0), (-0.6, -0.9, -0.3), (-0.7, -1.0, -0.4)]),
    }
}

/// Non-M observer with a minimal upper and a wide lower margin on M; M target
/// with wide margins that contract strongly.
pub fn favorable() -> PairFixture {
    PairFixture {
        name: "favorable conditions",
        observer: agent(0, C, Kind::Inclusive, &[(0.3, -0.6, 0.35), (0.6, 0.2, 0.9), (0.0, -0.2, 0.3)]),
        target: agent(1, M, Kind::Inclusive, &[(0.4, -0.2, 1.0), (0.1, -0.2, 0.5), (0.0, -0.3, 0.4)]),
    }
}

// ---------------------------------------------------------------------------
// Independent oracles: literal formulas, no shared code with the library.

/// `(e^y - 1) / (e^y + 1)` evaluated literally.
pub fn oracle_squash(y: f64) -> f64 {
    let e = y.exp();
    (e - 1.0) / (e + 1.0)
}

pub fn oracle_position(a: f64, b: f64, upper: f64, x: f64) -> f64 {
    if b < x && x < upper {
        1.0
    } else if x == b || x == upper {
        0.0
    } else if x < b {
        oracle_squash(1.0 - (a - x) / (a - b))
    } else {
        oracle_squash(1.0 - (x - a) / (upper - a))
    }
}

pub fn oracle_grid(d: usize) -> Vec<f64> {
    (0..d).map(|p| -1.0 + 2.0 * p as f64 / (d - 1) as f64).collect()
}

/// Literal weighted form: sum of w_i(a_p) max(w_j(a_p), 0) over sum of max(w_j(a_p), 0).
pub fn oracle_segment(obs: (f64, f64, f64), tgt: (f64, f64, f64), d: usize, f: f64) -> Option<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for x in oracle_grid(d) {
        let wj = oracle_position(tgt.0, tgt.1, tgt.2, x).max(0.0);
        num += oracle_position(obs.0, obs.1, obs.2, x) * wj;
        den += wj;
    }
    (den > 0.0).then(|| f * num / den)
}

pub fn triples(id: &CulturalIdentity) -> Vec<(f64, f64, f64)> {
    id.segments().iter().map(|s| (s.position(), s.lower(), s.upper())).collect()
}

pub fn oracle_identity(obs: &CulturalIdentity, tgt: &CulturalIdentity, d: usize, f: f64) -> f64 {
    let (o, t) = (triples(obs), triples(tgt));
    o.iter().zip(&t).map(|(a, b)| oracle_segment(*a, *b, d, f).unwrap()).sum::<f64>() / o.len() as f64
}

// ---------------------------------------------------------------------------
// Random valid agents.

use rand::Rng;

/// Segment with both margins at least `eps` wide.
pub fn random_segment(rng: &mut impl Rng, eps: f64) -> (f64, f64, f64) {
    let a: f64 = rng.random_range(-1.0 + eps..=1.0 - eps);
    let lw = rng.random_range(eps..=a + 1.0);
    let uw = rng.random_range(eps..=1.0 - a);
    (a, (a - lw).max(-1.0), (a + uw).min(1.0))
}

/// Identity usable as an agent: margins at least `eps`, one positive position.
pub fn random_agent_identity(rng: &mut impl Rng, k: usize, eps: f64) -> CulturalIdentity {
    loop {
        let t: Vec<_> = (0..k).map(|_| random_segment(rng, eps)).collect();
        let id = identity(&t);
        if id.validate_agent(eps).is_ok() {
            return id;
        }
    }
}

pub fn random_population(rng: &mut impl Rng, n: usize, eps: f64) -> Population {
    let agents = (0..n)
        .map(|i| {
            let identity = random_agent_identity(rng, 3, eps);
            Agent {
                id: i,
                group: culture_threat::model::group_of(&identity),
                kind: if rng.random_bool(0.5) { Kind::Inclusive } else { Kind::Exclusive },
                identity,
            }
        })
        .collect();
    Population::new(Worldviews::mca(), agents).unwrap()
}
