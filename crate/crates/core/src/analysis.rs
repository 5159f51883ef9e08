//! Scaling diagnostics of the walk: ballistic width, survival probability
//! and its `1/t` envelope, return-probability partial sums, and the
//! one-shot hitting time of a search record.

use serde::{Deserialize, Serialize};

use crate::bessel::bessel_j;
use crate::error::{Error, Result};
use crate::propagator::{bandwidth, Direction, KickOperator};
use crate::search::SearchRecord;
use crate::state::{Distribution, MomentumState, WINDOW_MARGIN};

/// Mass-normalized standard deviation of `n`.
pub fn width(dist: &Distribution) -> Result<f64> {
    let mass = dist.total_mass();
    if !(mass > 0.0) {
        return Err(Error::InsufficientData("distribution has zero mass".into()));
    }
    let (s1, s2) = dist
        .momenta()
        .zip(dist.probs())
        .fold((0.0, 0.0), |(s1, s2), (n, &p)| {
            let n = n as f64;
            (s1 + n * p, s2 + n * n * p)
        });
    let mean = s1 / mass;
    Ok((s2 / mass - mean * mean).max(0.0).sqrt())
}

/// Outermost momenta `(n_min, n_max)` with `P(n) >= threshold`.
pub fn support_extent(dist: &Distribution, threshold: f64) -> Option<(i64, i64)> {
    let mut above = dist.momenta().filter(|&n| dist.prob(n) >= threshold);
    let first = above.next()?;
    let last = above.last().unwrap_or(first);
    Some((first, last))
}

/// `p_0(t) = |<ψ(0)|ψ(t)>|²` along a trajectory.
pub fn survival_probability(states: &[MomentumState]) -> Result<Vec<f64>> {
    let Some(first) = states.first() else {
        return Ok(Vec::new());
    };
    states.iter().map(|s| first.fidelity(s)).collect()
}

/// Half-width that keeps `x = k t` worth of ballistic spread from a
/// single site inside the window.
pub fn ballistic_window(total_kick: f64) -> usize {
    let x = total_kick.abs();
    (x + 10.0 * x.cbrt()).ceil() as usize + WINDOW_MARGIN
}

/// States after `0..=t_max` forward kicks from `|0>`.
pub fn single_site_walk(kick_strength: f64, t_max: usize) -> Result<Vec<MomentumState>> {
    let window = ballistic_window(kick_strength * t_max as f64) + bandwidth(kick_strength);
    let start = MomentumState::basis(0, window)?;
    KickOperator::new(kick_strength, Direction::Forward).trajectory(&start, t_max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub intercept: f64,
    /// `(center, mean)` per block; the center is the harmonic mean of the
    /// block's times, so an exact `1/t` series lies on a line of slope -1.
    pub blocks: Vec<(f64, f64)>,
}

/// Least-squares slope of `log(block mean)` against `log(block center)` over
/// dyadic blocks `[2^j, 2^(j+1))` of `series[t]`, `t >= 1`. A trailing
/// block covering less than half its span is dropped.
pub fn fit_power_law(series: &[f64]) -> Result<PowerLawFit> {
    if series.len() < 2 {
        return Err(Error::InsufficientData("series has no t >= 1".into()));
    }
    fit_power_law_range(series, 1, series.len() - 1)
}

/// As [`fit_power_law`], restricted to `t ∈ [t_lo, t_hi]`; blocks are the
/// dyadic blocks clipped to that range.
pub fn fit_power_law_range(series: &[f64], t_lo: usize, t_hi: usize) -> Result<PowerLawFit> {
    let t_lo = t_lo.max(1);
    let t_hi = t_hi.min(series.len().saturating_sub(1));
    let mut blocks = Vec::new();
    let mut start = 1usize;
    while start <= t_hi {
        let end = 2 * start - 1;
        let lo = start.max(t_lo);
        let hi = end.min(t_hi);
        if lo <= hi && 2 * (hi - lo + 1) >= start {
            let len = (hi - lo + 1) as f64;
            let mean = series[lo..=hi].iter().sum::<f64>() / len;
            let inv_sum: f64 = (lo..=hi).map(|t| 1.0 / t as f64).sum();
            blocks.push((len / inv_sum, mean));
        }
        start *= 2;
    }
    if blocks.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} dyadic blocks, need at least 3",
            blocks.len()
        )));
    }
    if blocks.iter().any(|&(_, m)| !(m > 0.0)) {
        return Err(Error::InsufficientData("non-positive block mean".into()));
    }
    let pts: Vec<(f64, f64)> = blocks.iter().map(|&(c, m)| (c.ln(), m.ln())).collect();
    let (exponent, intercept) = least_squares(&pts);
    Ok(PowerLawFit {
        exponent,
        intercept,
        blocks,
    })
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Earliest `t` in the refocusing leg (`2t̄ < t <= 3t̄`) with
/// `P(n_t, t) >= threshold`.
pub fn one_shot_hitting_time(record: &SearchRecord, threshold: f64) -> Result<Option<usize>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid("threshold", format!("{threshold} not in (0, 1]")));
    }
    let Some(target) = record.target() else {
        return Ok(None);
    };
    let leg = record.kicks_per_leg();
    Ok((2 * leg + 1..=3 * leg).find(|&t| record.distributions[t].prob(target) >= threshold))
}

/// `S(T) = Σ_{t=1}^{T} J_0(k t)²` for `T = 1..=t_max`: the return
/// probabilities of the single-site walk, summed.
pub fn polya_partial_sum(kick_strength: f64, t_max: usize) -> Vec<f64> {
    (1..=t_max)
        .scan(0.0, |acc, t| {
            let j0 = bessel_j(0, kick_strength * t as f64);
            *acc += j0 * j0;
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub kick_strength: f64,
    pub times: Vec<usize>,
    pub widths: Vec<f64>,
    pub survival: Vec<f64>,
    /// Least-squares slope of `σ(t)` against `k t` through the origin.
    pub fitted_width_slope: Option<f64>,
    pub fitted_survival_exponent: Option<f64>,
    pub polya_partial_sums: Vec<f64>,
    /// `σ(1) √t`, the spread of a diffusive walk with the same first step.
    pub diffusive_reference: Vec<f64>,
    pub hitting_time: Option<usize>,
    pub warnings: Vec<String>,
}

/// Width, survival and partial sums for the walk from `|0>` over
/// `t = 0..=t_max`.
pub fn scaling_report(kick_strength: f64, t_max: usize) -> Result<ScalingReport> {
    if t_max == 0 {
        return Err(Error::invalid("t_max", "must be at least 1"));
    }
    let states = single_site_walk(kick_strength, t_max)?;
    let widths = states
        .iter()
        .map(|s| width(&s.distribution()))
        .collect::<Result<Vec<_>>>()?;
    let survival = survival_probability(&states)?;
    let mut warnings = Vec::new();

    let fitted_width_slope = if kick_strength > 0.0 {
        let (num, den) = widths
            .iter()
            .enumerate()
            .skip(1)
            .fold((0.0, 0.0), |(num, den), (t, &w)| {
                let x = kick_strength * t as f64;
                (num + w * x, den + x * x)
            });
        Some(num / den)
    } else {
        warnings.push("zero kick strength: width slope undefined".into());
        None
    };

    let fitted_survival_exponent = match fit_power_law(&survival) {
        Ok(fit) => Some(fit.exponent),
        Err(e) => {
            warnings.push(format!("no survival fit: {e}"));
            None
        }
    };

    let sigma1 = widths.get(1).copied().unwrap_or(0.0);
    Ok(ScalingReport {
        kick_strength,
        times: (0..=t_max).collect(),
        diffusive_reference: (0..=t_max).map(|t| sigma1 * (t as f64).sqrt()).collect(),
        widths,
        survival,
        fitted_width_slope,
        fitted_survival_exponent,
        polya_partial_sums: polya_partial_sum(kick_strength, t_max),
        hitting_time: None,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_of_basis_state_is_zero() {
        let d = MomentumState::basis(3, 10).unwrap().distribution();
        assert_eq!(width(&d).unwrap(), 0.0);
        assert!(width(&Distribution::zeros(4)).is_err());
    }

    #[test]
    fn exact_power_laws() {
        let inv: Vec<f64> = (0..=256).map(|t| if t == 0 { 1.0 } else { 1.0 / t as f64 }).collect();
        let fit = fit_power_law(&inv).unwrap();
        assert!((fit.exponent + 1.0).abs() < 1e-6, "{}", fit.exponent);
        let flat = vec![0.3; 129];
        assert!(fit_power_law(&flat).unwrap().exponent.abs() < 1e-12);
        assert!(fit_power_law(&[1.0, 0.5, 0.3]).is_err());
        let r = fit_power_law_range(&inv, 10, 100).unwrap();
        assert!((r.exponent + 1.0).abs() < 1e-6);
        assert_eq!(r.blocks.len(), 4);
    }

    #[test]
    fn partial_sums() {
        let s = polya_partial_sum(1.0, 1);
        assert!((s[0] - 0.765_197_686_557_966_6f64.powi(2)).abs() < 1e-14);
        let still = polya_partial_sum(0.0, 17);
        assert_eq!(still.last().copied(), Some(17.0));
        let s = polya_partial_sum(1.0, 200);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn extent() {
        let d = Distribution::new(vec![0.0, 0.1, 0.0, 0.5, 0.0, 0.4, 0.0]).unwrap();
        assert_eq!(support_extent(&d, 0.05), Some((-2, 2)));
        assert_eq!(support_extent(&d, 0.45), Some((0, 0)));
        assert_eq!(support_extent(&d, 0.9), None);
    }

    #[test]
    fn single_point_report() {
        let r = scaling_report(1.0, 1).unwrap();
        assert_eq!(r.times, vec![0, 1]);
        assert!(r.fitted_survival_exponent.is_none());
        assert!(!r.warnings.is_empty());
        assert!(scaling_report(1.0, 0).is_err());
    }
}
