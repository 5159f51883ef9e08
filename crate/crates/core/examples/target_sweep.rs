//! Success of both estimators over targets and a few kick strengths.

use kickwalk::extract::success_sweep;
use kickwalk::search::{SearchConfig, Strategy};
use kickwalk::state::WalkParams;

fn main() -> kickwalk::Result<()> {
    let targets: Vec<i64> = (-12..=12).filter(|n: &i64| n.abs() >= 3).collect();
    for k in [0.6, 0.8, 1.0] {
        for strategy in [Strategy::Subtract, Strategy::Cut] {
            let mut base = SearchConfig::new(WalkParams::new(k, 15, None)?, 0);
            base.strategy = strategy;
            let rows = success_sweep(&base, &targets);
            let flank = rows.iter().filter(|r| r.flank_ok).count();
            let refocus = rows.iter().filter(|r| r.refocus_ok).count();
            let (lo, hi) = rows
                .iter()
                .map(|r| r.weight)
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), w| (lo.min(w), hi.max(w)));
            println!(
                "k={k:<4} {strategy:<8} flank {flank:>2}/{n}  refocus {refocus:>2}/{n}  weight {lo:.3}..{hi:.3}",
                n = rows.len()
            );
        }
    }
    Ok(())
}
