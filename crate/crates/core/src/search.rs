//! The three-leg search protocol.
//!
//! 1. `t̄` forward kicks spread the initial superposition over the lattice.
//! 2. The oracle flips the sign of the target amplitude, then `t̄` backward
//!    kicks refocus everything except the walk launched by the flip.
//! 3. The central window is cut away and `t̄` further forward kicks drive the
//!    surviving amplitude back onto the target.
//!
//! The unmarked protocol is always run alongside as a reference.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prep::{Coefficients, Preset, DEFAULT_FLAT_WINDOW};
use crate::propagator::{Direction, KickOperator};
use crate::state::{Distribution, MomentumState, WalkParams};

pub const DEFAULT_CUT_HALFWIDTH: usize = 3;

/// How the initial walk is suppressed in the `t = 2t̄` distribution used by
/// the flank estimator. The refocusing leg always uses the cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Zero the amplitudes with `|n| <= w_cut`.
    Cut,
    /// Subtract the unmarked distribution.
    #[default]
    Subtract,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Cut => "cut",
            Strategy::Subtract => "subtract",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cut" => Ok(Strategy::Cut),
            "subtract" => Ok(Strategy::Subtract),
            other => Err(Error::invalid(
                "strategy",
                format!("unknown strategy `{other}` (expected cut or subtract)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Event {
    Mark {
        t: usize,
        target: i64,
        amplitude_norm: f64,
    },
    Cut {
        t: usize,
        halfwidth: usize,
        removed_mass: f64,
        remaining_mass: f64,
    },
    Warning {
        t: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub params: WalkParams,
    pub initial: Coefficients,
    /// `None` disables the oracle.
    pub target: Option<i64>,
    /// `None` skips the cut at `t = 2t̄`.
    pub cut_halfwidth: Option<usize>,
    pub strategy: Strategy,
    pub flat_window: usize,
}

impl SearchConfig {
    /// Preset "b", cut half-width 3, subtraction for the flank estimator.
    pub fn new(params: WalkParams, target: i64) -> Self {
        Self {
            params,
            initial: Preset::B.coefficients(),
            target: Some(target),
            cut_halfwidth: Some(DEFAULT_CUT_HALFWIDTH),
            strategy: Strategy::default(),
            flat_window: DEFAULT_FLAT_WINDOW,
        }
    }

    pub fn with_target(&self, target: Option<i64>) -> Self {
        Self {
            target,
            ..self.clone()
        }
    }
}

/// Everything recorded over `t = 0..=3t̄`.
#[derive(Debug, Clone)]
pub struct SearchRecord {
    pub config: SearchConfig,
    /// `states[t]`. Entry `t̄` is after marking, entry `2t̄` before the cut.
    pub states: Vec<MomentumState>,
    pub distributions: Vec<Distribution>,
    /// The `t = 2t̄` state after the cut (equal to `states[2t̄]` without one).
    pub suppressed_state: MomentumState,
    /// Unmarked protocol with the same cut.
    pub reference_distributions: Vec<Distribution>,
    pub events: Vec<Event>,
}

impl SearchRecord {
    pub fn kicks_per_leg(&self) -> usize {
        self.config.params.kicks_per_leg
    }

    pub fn target(&self) -> Option<i64> {
        self.config.target
    }

    pub fn initial_state(&self) -> &MomentumState {
        &self.states[0]
    }

    /// Distribution at `t = 3t̄`.
    pub fn final_distribution(&self) -> &Distribution {
        self.distributions.last().expect("non-empty record")
    }

    /// `|<ψ(0)|ψ(2t̄)>|²` before any cut.
    pub fn round_trip_fidelity(&self) -> f64 {
        let t = 2 * self.kicks_per_leg();
        self.states[0]
            .fidelity(&self.states[t])
            .expect("same window")
    }

    /// Input to the flank estimator with its exclusion half-width, following
    /// the configured strategy.
    pub fn flank_input(&self) -> Result<(Distribution, usize)> {
        let t = 2 * self.kicks_per_leg();
        match self.config.strategy {
            Strategy::Cut => {
                let w = self.config.cut_halfwidth.ok_or_else(|| {
                    Error::estimation("cut strategy requires a cut half-width")
                })?;
                Ok((self.suppressed_state.distribution(), w))
            }
            Strategy::Subtract => {
                let marked = &self.distributions[t];
                let reference = &self.reference_distributions[t];
                let support = Coefficients::SUPPORT
                    .iter()
                    .filter(|&&n| self.config.initial.get(n).norm() > 0.0)
                    .map(|n| n.unsigned_abs() as usize)
                    .max()
                    .unwrap_or(0);
                Ok((marked.subtract_reference(reference)?, support))
            }
        }
    }
}

/// Multiplies `ψ_target` by `-1`.
pub fn mark_state(state: &MomentumState, target: i64) -> Result<MomentumState> {
    if !state.contains(target) {
        return Err(Error::OutOfWindow {
            n: target,
            halfwidth: state.halfwidth(),
        });
    }
    let mut out = state.clone();
    let idx = out.index(target);
    out.amplitudes_mut()[idx] = -out.amplitudes()[idx];
    Ok(out)
}

/// Zeroes `|n| <= halfwidth` without renormalizing; returns the removed
/// probability alongside.
pub fn cut_window(state: &MomentumState, halfwidth: usize) -> (MomentumState, f64) {
    let mut out = state.clone();
    let mut removed = 0.0;
    let m = state.halfwidth() as i64;
    let w = (halfwidth as i64).min(m);
    for n in -w..=w {
        let idx = out.index(n);
        removed += out.amplitudes()[idx].norm_sqr();
        out.amplitudes_mut()[idx] = num_complex::Complex64::new(0.0, 0.0);
    }
    (out, removed)
}

struct Legs {
    states: Vec<MomentumState>,
    suppressed: MomentumState,
    events: Vec<Event>,
}

fn run_legs(config: &SearchConfig, forward: &KickOperator, backward: &KickOperator) -> Result<Legs> {
    let p = &config.params;
    let leg = p.kicks_per_leg;
    let initial = config.initial.to_state(p.window_halfwidth)?;
    let mut events = Vec::new();

    let mut states = forward.trajectory(&initial, leg)?;

    if let Some(target) = config.target {
        let at_mark = states.pop().expect("leg >= 1");
        let amplitude_norm = at_mark.amplitude(target).norm();
        states.push(mark_state(&at_mark, target)?);
        events.push(Event::Mark {
            t: leg,
            target,
            amplitude_norm,
        });
        if target.unsigned_abs() as usize > config.flat_window / 2 {
            events.push(Event::Warning {
                t: leg,
                message: format!(
                    "target {target} lies outside the flat window [-{0}, {0}]",
                    config.flat_window / 2
                ),
            });
        }
        if let Some(w) = config.cut_halfwidth {
            if target.unsigned_abs() as usize <= w {
                events.push(Event::Warning {
                    t: leg,
                    message: format!("target {target} lies inside the cut window |n| <= {w}"),
                });
            }
        }
    }

    let back = backward.trajectory(states.last().expect("non-empty"), leg)?;
    states.extend(back.into_iter().skip(1));

    let pre_cut = states.last().expect("non-empty").clone();
    let suppressed = match config.cut_halfwidth {
        Some(w) => {
            let (cut, removed) = cut_window(&pre_cut, w);
            events.push(Event::Cut {
                t: 2 * leg,
                halfwidth: w,
                removed_mass: removed,
                remaining_mass: cut.norm_sqr(),
            });
            cut
        }
        None => pre_cut,
    };

    let refocus = forward.trajectory(&suppressed, leg)?;
    states.extend(refocus.into_iter().skip(1));

    Ok(Legs {
        states,
        suppressed,
        events,
    })
}

/// Runs the marked protocol and its unmarked reference.
pub fn run_search(config: &SearchConfig) -> Result<SearchRecord> {
    let p = &config.params;
    if let Some(target) = config.target {
        if target.unsigned_abs() as usize > p.window_halfwidth {
            return Err(Error::OutOfWindow {
                n: target,
                halfwidth: p.window_halfwidth,
            });
        }
    }
    let forward = KickOperator::new(p.kick_strength, Direction::Forward);
    let backward = KickOperator::new(p.kick_strength, Direction::Backward);

    let marked = run_legs(config, &forward, &backward)?;
    let reference = if config.target.is_some() {
        run_legs(&config.with_target(None), &forward, &backward)?.states
    } else {
        marked.states.clone()
    };

    Ok(SearchRecord {
        config: config.clone(),
        distributions: marked.states.iter().map(|s| s.distribution()).collect(),
        reference_distributions: reference.iter().map(|s| s.distribution()).collect(),
        states: marked.states,
        suppressed_state: marked.suppressed,
        events: marked.events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn marking() {
        let s = MomentumState::basis(0, 10).unwrap();
        let m = mark_state(&s, 0).unwrap();
        assert_eq!(m.amplitude(0), Complex64::new(-1.0, 0.0));
        assert_eq!(m.distribution(), s.distribution());
        assert!(mark_state(&s, 11).is_err());

        let a = Complex64::new(0.3, -0.4);
        let s = MomentumState::superpose(&[(5, a), (2, Complex64::new(0.1, 0.0))], 10).unwrap();
        let m = mark_state(&s, 5).unwrap();
        assert_eq!(m.amplitude(5), -s.amplitude(5));
        assert_eq!(m.amplitude(2), s.amplitude(2));
        assert_eq!(m.norm_sqr(), s.norm_sqr());
        assert_eq!(mark_state(&m, 5).unwrap(), s);
    }

    #[test]
    fn cutting() {
        let s = MomentumState::superpose(
            &[(-1, Complex64::new(1.0, 0.0)), (0, Complex64::new(1.0, 0.0)), (4, Complex64::new(1.0, 0.0))],
            6,
        )
        .unwrap();
        let (c, removed) = cut_window(&s, 0);
        assert_eq!(c.amplitude(0), Complex64::new(0.0, 0.0));
        assert_eq!(c.amplitude(-1), s.amplitude(-1));
        assert!((removed - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.norm_sqr() + removed - 1.0).abs() < 1e-15);

        let (c, removed) = cut_window(&s, 6);
        assert_eq!(c.norm_sqr(), 0.0);
        assert!((removed - 1.0).abs() < 1e-15);
        let (c, _) = cut_window(&s, 100);
        assert_eq!(c.norm_sqr(), 0.0);
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("cut".parse::<Strategy>().unwrap(), Strategy::Cut);
        assert_eq!("Subtract".parse::<Strategy>().unwrap(), Strategy::Subtract);
        assert!("both".parse::<Strategy>().is_err());
    }

    #[test]
    fn zero_kick_strength_never_moves() {
        let params = WalkParams::new(0.0, 5, Some(20)).unwrap();
        let mut config = SearchConfig::new(params, 1);
        config.cut_halfwidth = None;
        let record = run_search(&config).unwrap();
        let last = record.states.last().unwrap();
        // marking is a phase on c_1; the distribution is untouched
        assert_eq!(last.distribution(), record.states[0].distribution());
        assert_eq!(record.states.len(), 16);
    }

    #[test]
    fn events_are_ordered() {
        let params = WalkParams::new(0.8, 15, None).unwrap();
        let record = run_search(&SearchConfig::new(params, 12)).unwrap();
        assert!(matches!(record.events[0], Event::Mark { t: 15, target: 12, .. }));
        assert!(matches!(record.events[1], Event::Warning { t: 15, .. }));
        assert!(matches!(record.events.last(), Some(Event::Cut { t: 30, halfwidth: 3, .. })));
    }
}
