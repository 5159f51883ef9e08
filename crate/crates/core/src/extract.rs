//! Estimators for the marked momentum.
//!
//! * Flank: the walk launched by the oracle spreads symmetrically about the
//!   target, so the midpoint of its two outermost peaks at `t = 2t̄` is the
//!   target.
//! * Refocus: after the cut and `t̄` more forward kicks the surviving
//!   amplitude concentrates on the target; take the argmax.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::{run_search, SearchConfig, SearchRecord};
use crate::state::Distribution;

/// Peaks below this fraction of the global maximum are ignored.
pub const DEFAULT_PROMINENCE: f64 = 0.25;

/// Sites on each side of the estimate counted in the flank confidence weight.
const FLANK_WEIGHT_RADIUS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Flank,
    Refocus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub n_hat: i64,
    pub method: Method,
    pub confidence_weight: f64,
    /// `(n_l, n_r)` for the flank method.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flank_peaks: Option<(i64, i64)>,
}

/// Strict local maxima at or above `prominence` times the largest value,
/// ignoring `|n| <= exclusion`. Neighbours are read from the distribution
/// as given, excluded or not.
pub fn prominent_peaks(dist: &Distribution, exclusion: Option<usize>, prominence: f64) -> Vec<i64> {
    let excluded = |n: i64| exclusion.is_some_and(|w| n.unsigned_abs() as usize <= w);
    let global = dist
        .momenta()
        .filter(|&n| !excluded(n))
        .map(|n| dist.prob(n))
        .fold(0.0, f64::max);
    if global <= 0.0 {
        return Vec::new();
    }
    let m = dist.halfwidth() as i64;
    (-m + 1..m)
        .filter(|&n| !excluded(n))
        .filter(|&n| {
            let p = dist.prob(n);
            p > dist.prob(n - 1) && p > dist.prob(n + 1) && p >= prominence * global
        })
        .collect()
}

/// Flank-peak midpoint `(n_l + n_r) / 2`, half-integers rounded toward zero.
pub fn extract_flank(dist: &Distribution, exclusion: Option<usize>) -> Result<Estimate> {
    extract_flank_with(dist, exclusion, DEFAULT_PROMINENCE)
}

pub fn extract_flank_with(
    dist: &Distribution,
    exclusion: Option<usize>,
    prominence: f64,
) -> Result<Estimate> {
    let remaining = match exclusion {
        Some(w) => dist.without_center(w).total_mass(),
        None => dist.total_mass(),
    };
    if !(remaining > 0.0) {
        return Err(Error::estimation("no probability outside the excluded window"));
    }
    let peaks = prominent_peaks(dist, exclusion, prominence);
    let (n_l, n_r) = match (peaks.first(), peaks.last()) {
        (Some(&l), Some(&r)) if peaks.len() >= 2 => (l, r),
        _ => {
            return Err(Error::estimation(format!(
                "need two prominent peaks, found {peaks:?}"
            )))
        }
    };
    // integer division truncates toward zero
    let n_hat = (n_l + n_r) / 2;
    Ok(Estimate {
        n_hat,
        method: Method::Flank,
        confidence_weight: dist.mass_near(n_hat, FLANK_WEIGHT_RADIUS).clamp(0.0, 1.0),
        flank_peaks: Some((n_l, n_r)),
    })
}

/// Argmax of `P(n, 3t̄)`; ties go to the smaller `|n|`, then the smaller `n`.
pub fn extract_refocus(record: &SearchRecord) -> Result<Estimate> {
    if record.config.cut_halfwidth.is_none() {
        return Err(Error::estimation("refocus estimate needs a record with a cut"));
    }
    let dist = record.final_distribution();
    let best = dist
        .momenta()
        .map(|n| (n, dist.prob(n)))
        .reduce(|a, b| {
            let better = b.1 > a.1
                || (b.1 == a.1 && (b.0.abs(), b.0) < (a.0.abs(), a.0));
            if better {
                b
            } else {
                a
            }
        })
        .expect("non-empty window");
    if !(best.1 > 0.0) {
        return Err(Error::estimation("final distribution is empty"));
    }
    Ok(Estimate {
        n_hat: best.0,
        method: Method::Refocus,
        confidence_weight: best.1.clamp(0.0, 1.0),
        flank_peaks: None,
    })
}

/// Flank estimate from a record, using its configured suppression strategy.
pub fn extract_flank_from(record: &SearchRecord) -> Result<Estimate> {
    let (dist, exclusion) = record.flank_input()?;
    extract_flank(&dist, Some(exclusion))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kick_strength: f64,
    pub n_t: i64,
    pub n_hat_flank: Option<i64>,
    pub flank_ok: bool,
    pub n_hat_refocus: Option<i64>,
    pub refocus_ok: bool,
    /// `P(n_t, 3t̄)`.
    pub weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn sweep_row(base: &SearchConfig, target: i64) -> SweepRow {
    let mut row = SweepRow {
        kick_strength: base.params.kick_strength,
        n_t: target,
        n_hat_flank: None,
        flank_ok: false,
        n_hat_refocus: None,
        refocus_ok: false,
        weight: 0.0,
        error: None,
    };
    let record = match run_search(&base.with_target(Some(target))) {
        Ok(r) => r,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.weight = record.final_distribution().prob(target);
    let mut errors = Vec::new();
    match extract_flank_from(&record) {
        Ok(e) => {
            row.n_hat_flank = Some(e.n_hat);
            row.flank_ok = e.n_hat == target;
        }
        Err(e) => errors.push(format!("flank: {e}")),
    }
    match extract_refocus(&record) {
        Ok(e) => {
            row.n_hat_refocus = Some(e.n_hat);
            row.refocus_ok = e.n_hat == target;
        }
        Err(e) => errors.push(format!("refocus: {e}")),
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row
}

/// Runs the full protocol for every target, in parallel, keeping input order.
/// Failures are recorded per row.
pub fn success_sweep(base: &SearchConfig, targets: &[i64]) -> Vec<SweepRow> {
    targets.par_iter().map(|&t| sweep_row(base, t)).collect()
}
