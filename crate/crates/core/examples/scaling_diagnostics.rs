//! Ballistic width slope, `1/t` survival envelope, partial sums of the
//! return probability and the one-shot hitting time.

use kickwalk::analysis::{one_shot_hitting_time, scaling_report};
use kickwalk::search::{run_search, SearchConfig};
use kickwalk::state::WalkParams;

fn main() -> kickwalk::Result<()> {
    for k in [0.5, 0.8, 1.0, 2.0] {
        let r = scaling_report(k, 256)?;
        println!(
            "k={k:<4} sigma/(kt) = {:.6}  survival exponent {:+.4}  S(256) = {:.3}",
            r.fitted_width_slope.unwrap_or(f64::NAN),
            r.fitted_survival_exponent.unwrap_or(f64::NAN),
            r.polya_partial_sums.last().copied().unwrap_or(0.0)
        );
    }
    let record = run_search(&SearchConfig::new(WalkParams::new(0.8, 15, None)?, 5))?;
    for threshold in [0.02, 0.05, 0.1] {
        println!(
            "first t with P(5, t) >= {threshold}: {:?}",
            one_shot_hitting_time(&record, threshold)?
        );
    }
    Ok(())
}
