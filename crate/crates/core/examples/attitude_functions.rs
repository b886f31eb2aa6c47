//! Attitude of an acceptance segment toward positions, segments and whole
//! cultural identities.

use culture_threat::model::{
    attitude_to_identity, attitude_to_position, attitude_to_segment, group_of, AcceptanceSegment,
    CulturalIdentity, Grid, ModelParams,
};

fn main() -> culture_threat::Result<()> {
    let seg = AcceptanceSegment::new(0.2, -0.1, 0.5)?;
    println!("segment {seg}");
    for a in [-1.0, -0.4, -0.1, 0.0, 0.2, 0.5, 0.8, 1.0] {
        println!("  attitude to position {a:+.2}: {:+.5}", attitude_to_position(&seg, a));
    }

    let small = Grid::new(5)?;
    let params = ModelParams::default();
    let observer = AcceptanceSegment::new(0.5, 0.3, 0.7)?;
    let target = AcceptanceSegment::new(0.25, -0.1, 0.6)?;
    println!(
        "d = 5: {observer} about {target} -> {:.5}",
        attitude_to_segment(&observer, &target, &small, &params)?
    );

    let grid = params.grid()?;
    let inclusive_m = CulturalIdentity::from_triples(&[(0.5, -0.2, 0.9), (0.1, -0.2, 0.5), (0.0, -0.3, 0.4)])?;
    let exclusive_c = CulturalIdentity::from_triples(&[(-0.6, -0.9, -0.2), (0.7, 0.4, 1.0), (-0.5, -0.8, -0.2)])?;
    println!("group of inclusive M prototype: worldview {}", group_of(&inclusive_m).index());
    for (name, obs, tgt) in [
        ("M about M", &inclusive_m, &inclusive_m),
        ("M about C", &inclusive_m, &exclusive_c),
        ("C about M", &exclusive_c, &inclusive_m),
    ] {
        println!("{name}: {:+.5}", attitude_to_identity(obs, tgt, &grid, &params)?);
    }
    Ok(())
}
