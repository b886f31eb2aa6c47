//! One agent receiving seven threat messages: reaction intensity and the
//! contraction of its main-worldview margin toward epsilon.

use culture_threat::model::{CulturalIdentity, ModelParams, WorldviewId};
use culture_threat::threat::{apply_threat, reaction_intensity, TerroristProfile};

fn main() -> culture_threat::Result<()> {
    let params = ModelParams::default();
    let grid = params.grid()?;
    let m = WorldviewId(0);
    let terrorist = TerroristProfile::extreme(3, m, params.epsilon)?;

    for omega in [-1.0, -0.5, -0.1, 0.0, 0.4] {
        println!("w = {omega:+.1} -> mu = {:+.5}", reaction_intensity(omega, params.alpha));
    }

    let mut agent = CulturalIdentity::from_triples(&[(0.3, -0.2, 0.9), (0.1, -0.2, 0.5), (0.0, -0.3, 0.4)])?;
    println!("t=0 M segment {}", agent.segment(m));
    for t in 1..=7 {
        let (next, reaction) = apply_threat(&agent, &terrorist, &grid, &params)?;
        match reaction {
            Some(r) => {
                let c = &r.changes[0];
                println!(
                    "t={t} w={:+.4} mu={:+.4} {} bound {:.5} -> {:.5}",
                    r.omega_qi, r.mu, c.side, c.before, c.after
                );
            }
            None => println!("t={t} no reaction"),
        }
        agent = next;
    }
    println!("final M segment {}", agent.segment(m));
    Ok(())
}
