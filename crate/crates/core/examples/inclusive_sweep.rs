//! Sensitivity of the attitude toward group M to its share of inclusive agents.

use culture_threat::analysis::mean_attitude_toward;
use culture_threat::model::{ModelParams, WorldviewId};
use culture_threat::synthesis::{build_population, PopulationSpec};
use culture_threat::threat::{run_scenario, ScenarioSpec, TerroristProfile};

fn main() -> culture_threat::Result<()> {
    let params = ModelParams::default();
    let grid = params.grid()?;
    let m = WorldviewId(0);
    let scenario = ScenarioSpec { record_trace: false, ..ScenarioSpec::new(TerroristProfile::extreme(3, m, params.epsilon)?) };
    println!("x_M  initial   final     delta");
    for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let spec = PopulationSpec { n: 300, jitter: 0.02, seed: 3, inclusive_fraction: vec![x, 0.5, 0.5], ..PopulationSpec::mca_default() };
        let result = run_scenario(&build_population(&spec, &params)?, &scenario, &grid, &params)?;
        let before = mean_attitude_toward(&result.snapshots[0], m, &grid, &params)?;
        let after = mean_attitude_toward(result.snapshots.last().expect("snapshots"), m, &grid, &params)?;
        println!("{x:.2} {before:+.5} {after:+.5} {:+.5}", after - before);
    }
    Ok(())
}
