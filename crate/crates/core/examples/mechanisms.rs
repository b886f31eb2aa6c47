//! Two-agent cases showing when a threat lowers, preserves or raises a
//! non-M agent's attitude toward an M agent.

use culture_threat::model::{attitude_to_segment, CulturalIdentity, ModelParams, Worldviews, WorldviewId};
use culture_threat::population::{Agent, Kind, Population};
use culture_threat::threat::{run_scenario, ScenarioSpec, TerroristProfile};

const M: WorldviewId = WorldviewId(0);

fn case(name: &str, observer: [(f64, f64, f64); 3], target: [(f64, f64, f64); 3]) -> culture_threat::Result<()> {
    let params = ModelParams::default();
    let grid = params.grid()?;
    let agents = vec![
        Agent { id: 0, group: WorldviewId(1), kind: Kind::Inclusive, identity: CulturalIdentity::from_triples(&observer)? },
        Agent { id: 1, group: M, kind: Kind::Inclusive, identity: CulturalIdentity::from_triples(&target)? },
    ];
    let pop = Population::new(Worldviews::mca(), agents)?;
    let spec = ScenarioSpec::new(TerroristProfile::extreme(3, M, params.epsilon)?);
    let result = run_scenario(&pop, &spec, &grid, &params)?;
    let on_m = |p: &Population| {
        let a = p.agents();
        attitude_to_segment(a[0].identity.segment(M), a[1].identity.segment(M), &grid, &params)
    };
    let (first, last) = (&result.snapshots[0], result.snapshots.last().expect("snapshots"));
    println!("{name}");
    println!("  before: observer {} target {} attitude {:+.4}", first.agents()[0].identity.segment(M), first.agents()[1].identity.segment(M), on_m(first)?);
    println!("  after:  observer {} target {} attitude {:+.4}", last.agents()[0].identity.segment(M), last.agents()[1].identity.segment(M), on_m(last)?);
    Ok(())
}

fn main() -> culture_threat::Result<()> {
    case(
        "observer with a wide upper margin, inclusive M target",
        [(0.0, -0.3, 0.8), (0.1, -0.2, 0.5), (0.6, 0.2, 0.9)],
        [(0.5, -0.2, 0.9), (0.1, -0.2, 0.5), (0.0, -0.3, 0.4)],
    )?;
    case(
        "distant observer, exclusive M target with a narrow upper margin",
        [(-0.9, -1.0, -0.85), (0.7, 0.4, 1.0), (-0.5, -0.8, -0.2)],
        [(0.9, 0.6, 1.0), (-0.6, -0.9, -0.3), (-0.7, -1.0, -0.4)],
    )?;
    case(
        "both upper margins wide",
        [(-0.2, -0.5, 0.6), (0.7, 0.4, 1.0), (-0.5, -0.8, -0.2)],
        [(0.6, 0.3, 1.0), (-0.6, -0.9, -0.3), (-0.7, -1.0, -0.4)],
    )?;
    case(
        "minimal upper and wide lower margin observer, wide M target",
        [(0.3, -0.6, 0.35), (0.6, 0.2, 0.9), (0.0, -0.2, 0.3)],
        [(0.4, -0.2, 1.0), (0.1, -0.2, 0.5), (0.0, -0.3, 0.4)],
    )
}
