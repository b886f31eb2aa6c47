//! A 1000-agent population under seven messages: attitude toward group M
//! over time, change classes and the margin conditions of each group.

use culture_threat::analysis::{classify_changes, condition_profile, mean_attitude_toward_group, Aggregation, ChangeClass, DEFAULT_TAU};
use culture_threat::model::{ModelParams, WorldviewId};
use culture_threat::synthesis::{build_population, PopulationSpec};
use culture_threat::threat::{run_scenario, ScenarioSpec, TerroristProfile};

fn main() -> culture_threat::Result<()> {
    let params = ModelParams::default();
    let grid = params.grid()?;
    let m = WorldviewId(0);
    let spec = PopulationSpec { jitter: 0.03, seed: 7, ..PopulationSpec::mca_default() };
    let pop = build_population(&spec, &params)?;
    let result = run_scenario(&pop, &ScenarioSpec::new(TerroristProfile::extreme(3, m, params.epsilon)?), &grid, &params)?;

    for (t, v) in mean_attitude_toward_group(&result, m, &grid, &params)?.iter().enumerate() {
        let reacting = result.summaries[t].reacting;
        println!("t={t} mean attitude toward M {v:+.4} ({reacting} agents reacted)");
    }

    let report = classify_changes(&result, m, DEFAULT_TAU, &grid, &params)?;
    for agg in [Aggregation::FinalVsInitial, Aggregation::PerStep] {
        let row = report.distribution(agg).overall();
        let parts: Vec<String> = ChangeClass::ALL.iter().map(|c| format!("{c} {:.1}%", row.percent(*c))).collect();
        println!("{}: {}", agg.as_str(), parts.join(", "));
    }

    let profile = condition_profile(&pop, m, &grid, &params)?;
    for g in &profile.groups {
        println!(
            "group {}: a {:+.3} margin(l) {:.3} margin(h) {:.3} conditions {:?}",
            profile.worldviews.label(g.group),
            g.stats.position,
            g.stats.lower_width,
            g.stats.upper_width,
            g.flags
        );
    }
    Ok(())
}
