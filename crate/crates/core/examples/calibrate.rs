//! Refits population prototypes to an indicator matrix produced by a known
//! population, then expands the best candidate to 1000 agents.

use culture_threat::model::ModelParams;
use culture_threat::synthesis::{build_population, compute_indicators, fit, FitConfig, PopulationSpec};

fn main() -> culture_threat::Result<()> {
    let params = ModelParams::default();
    let grid = params.grid()?;
    let known = PopulationSpec { n: 60, ..PopulationSpec::mca_default() };
    let reference = compute_indicators(&build_population(&known, &params)?, &grid, &params)?;

    let config = FitConfig { budget: 5_000, top: 10, ..FitConfig::default() };
    let result = fit(&reference, &config, &grid, &params, 42)?;
    println!("{} objective evaluations", result.evaluations);
    for (rank, c) in result.candidates.iter().take(5).enumerate() {
        println!(
            "#{} l1 {:.4} avg rel {:.4} max rel {:.4} x {:?}",
            rank + 1,
            c.objective.l1,
            c.objective.avg_rel,
            c.objective.max_rel,
            c.spec.inclusive_fraction.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>()
        );
    }

    let best = result.best().expect("at least one start");
    let expanded = build_population(&PopulationSpec { n: 1000, ..best.spec.clone() }, &params)?;
    let fitted = compute_indicators(&expanded, &grid, &params)?;
    for g in 0..3 {
        println!(
            "row {g}: reference {:?} fitted {:?}",
            reference.mean[g].iter().map(|v| format!("{v:+.3}")).collect::<Vec<_>>(),
            fitted.mean[g].iter().map(|v| format!("{v:+.3}")).collect::<Vec<_>>()
        );
    }
    Ok(())
}
