//! Drives the command-line pipeline from a config file: simulate, then
//! analyze the simulation output.

use std::path::Path;

fn main() {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/configs/simulate_jitter.toml");
    let root = std::env::temp_dir().join("culture-threat-config-run");
    let sim = root.join("simulate");
    let ana = root.join("analyze");
    let cmd = |args: &[&str]| {
        let argv = std::iter::once("culture-threat").chain(args.iter().copied());
        culture_threat::cli::run(argv)
    };
    let code = cmd(&["simulate", "--config", config.to_str().unwrap(), "--out", sim.to_str().unwrap()]);
    assert_eq!(code, 0, "simulate failed");
    let code = cmd(&["analyze", "--input", sim.to_str().unwrap(), "--out", ana.to_str().unwrap()]);
    assert_eq!(code, 0, "analyze failed");
    let manifest = std::fs::read_to_string(sim.join("manifest.json")).unwrap();
    println!("{manifest}");
    println!("{}", std::fs::read_to_string(ana.join("condition_profile.csv")).unwrap());
}
