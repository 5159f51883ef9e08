//! One run of the protocol: both estimators, the event log and the
//! refocused weight.

use kickwalk::extract::{extract_flank_from, extract_refocus};
use kickwalk::search::{run_search, SearchConfig, Strategy};
use kickwalk::state::WalkParams;
use kickwalk::CALIBRATED_KICK_STRENGTH;

fn main() -> kickwalk::Result<()> {
    let target: i64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let params = WalkParams::new(CALIBRATED_KICK_STRENGTH, 15, None)?;
    for strategy in [Strategy::Subtract, Strategy::Cut] {
        let mut cfg = SearchConfig::new(params, target);
        cfg.strategy = strategy;
        let record = run_search(&cfg)?;
        let show = |r: kickwalk::Result<kickwalk::extract::Estimate>| match r {
            Ok(e) => format!("{} (weight {:.3})", e.n_hat, e.confidence_weight),
            Err(e) => e.to_string(),
        };
        println!("strategy {strategy}");
        println!("  flank   -> {}", show(extract_flank_from(&record)));
        println!("  refocus -> {}", show(extract_refocus(&record)));
        println!("  |<psi(0)|psi(2t)>|^2 = {:.4}", record.round_trip_fidelity());
    }
    let record = run_search(&SearchConfig::new(params, target))?;
    for e in &record.events {
        println!("{}", serde_json::to_string(e)?);
    }
    Ok(())
}
