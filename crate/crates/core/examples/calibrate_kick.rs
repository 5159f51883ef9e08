//! Scan the kick strength for the value whose flattest three-site state
//! sits closest to preset "d", and check that the refocusing weights stay
//! in a usable band there.

use kickwalk::extract::success_sweep;
use kickwalk::prep::{optimize_initial_state, OptimizerSettings, Preset};
use kickwalk::search::SearchConfig;
use kickwalk::state::WalkParams;

fn main() -> kickwalk::Result<()> {
    let reference = Preset::D.coefficients();
    let targets: Vec<i64> = (3..=8).flat_map(|n| [-n, n]).collect();
    for step in 0..=12 {
        let k = 0.5 + 0.05 * step as f64;
        let params = WalkParams::new(k, 15, None)?;
        let best = optimize_initial_state(&params, 20, &OptimizerSettings::default())?;
        let rows = success_sweep(&SearchConfig::new(params, 0), &targets);
        let ok = rows.iter().filter(|r| r.refocus_ok).count();
        let lo = rows.iter().map(|r| r.weight).fold(f64::INFINITY, f64::min);
        println!(
            "k={k:.2} {}  distance to d {:.4}  refocus {ok}/12  min weight {lo:.3}",
            best.coefficients,
            best.coefficients.distance_up_to_phase(&reference)
        );
    }
    Ok(())
}
