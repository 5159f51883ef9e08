//! Flattest three-site initial state after t̄ kicks, compared with the
//! named presets.

use kickwalk::prep::{canonical_states, optimize_initial_state, FlatnessProblem, OptimizerSettings};
use kickwalk::state::WalkParams;
use kickwalk::CALIBRATED_KICK_STRENGTH;

fn main() -> kickwalk::Result<()> {
    let params = WalkParams::new(CALIBRATED_KICK_STRENGTH, 15, None)?;
    let problem = FlatnessProblem::new(&params, 20)?;
    for (name, c) in canonical_states() {
        println!("preset {name}: {c}  cost {:.4}", problem.cost(&c)?);
    }
    let best = optimize_initial_state(&params, 20, &OptimizerSettings::default())?;
    println!(
        "optimized: {}  cost {:.4}  ({} evaluations)",
        best.coefficients, best.cost, best.evaluations
    );
    let dist = problem.distribution(&best.coefficients);
    for n in -12..=12 {
        let p = dist.prob(n);
        println!("{n:>4} {p:.4} {}", "#".repeat((p * 400.0) as usize));
    }
    Ok(())
}
