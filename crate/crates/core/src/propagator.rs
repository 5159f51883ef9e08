//! The one-period Floquet operator `U = exp(-i k cos θ)` and its adjoint.
//!
//! At the resonant period the free rotation between kicks is the identity on
//! integer momenta, so one period of evolution is the kick alone. Two
//! independent realizations are provided:
//!
//! * [`KickOperator`] convolves the amplitudes with the band of couplings
//!   `<n|U|m> = (-i)^(n-m) J_(n-m)(k)`.
//! * [`SpectralKick`] transforms to an angle grid, multiplies by the phase
//!   `exp(∓i k cos θ)` and transforms back.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j_table, decay_order};
use crate::error::{Error, Result};
use crate::state::MomentumState;

/// Largest probability a single kick may push out of the window.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Couplings below this magnitude are dropped from the band.
const COUPLING_CUTOFF: f64 = 1e-17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `U`
    Forward,
    /// `U†`
    Backward,
}

/// `(-i)^d`
fn minus_i_pow(d: i64) -> Complex64 {
    match d.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// `<n| exp(-i k cos θ) |m> = (-i)^(n-m) J_(n-m)(k)`.
pub fn kick_matrix_element(n: i64, m: i64, kick_strength: f64) -> Complex64 {
    let d = n - m;
    minus_i_pow(d) * crate::bessel::bessel_j(d, kick_strength)
}

/// Band half-width `B` used for a kick of strength `k`: at least
/// `ceil(k) + 12`, widened until every dropped coupling is below 1e-17.
pub fn bandwidth(kick_strength: f64) -> usize {
    if kick_strength == 0.0 {
        return 0;
    }
    let base = kick_strength.abs().ceil() as usize + 12;
    base.max(decay_order(kick_strength, COUPLING_CUTOFF))
}

fn check_leak(before: f64, after: f64, halfwidth: usize) -> Result<()> {
    let leaked = before - after;
    if leaked > TAIL_TOLERANCE {
        Err(Error::Truncation { leaked, halfwidth })
    } else {
        Ok(())
    }
}

/// Banded-convolution kick operator.
#[derive(Debug, Clone)]
pub struct KickOperator {
    kick_strength: f64,
    direction: Direction,
    bandwidth: usize,
    // kernel[d + B] = <n|op|n - d>
    kernel: Vec<Complex64>,
}

impl KickOperator {
    pub fn new(kick_strength: f64, direction: Direction) -> Self {
        let b = bandwidth(kick_strength);
        let table = bessel_j_table(kick_strength, b);
        let kernel = (-(b as i64)..=b as i64)
            .map(|d| {
                let forward = |d: i64| minus_i_pow(d) * j_signed(&table, d);
                match direction {
                    Direction::Forward => forward(d),
                    Direction::Backward => forward(-d).conj(),
                }
            })
            .collect();
        Self {
            kick_strength,
            direction,
            bandwidth: b,
            kernel,
        }
    }

    pub fn kick_strength(&self) -> f64 {
        self.kick_strength
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// One kick. Fails if more than [`TAIL_TOLERANCE`] of probability would
    /// leave the window.
    pub fn apply(&self, state: &MomentumState) -> Result<MomentumState> {
        let m = state.halfwidth() as i64;
        let b = self.bandwidth as i64;
        let input = state.amplitudes();
        let mut out = MomentumState::zeros(state.halfwidth());
        {
            let dst = out.amplitudes_mut();
            for (src_idx, &a) in input.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let lo = (src_idx as i64 - b).max(0);
                let hi = (src_idx as i64 + b).min(2 * m);
                for dst_idx in lo..=hi {
                    let d = dst_idx - src_idx as i64;
                    dst[dst_idx as usize] += self.kernel[(d + b) as usize] * a;
                }
            }
        }
        check_leak(state.norm_sqr(), out.norm_sqr(), state.halfwidth())?;
        Ok(out)
    }

    /// `t` successive kicks, returning the states after `0..=t` kicks.
    pub fn trajectory(&self, state: &MomentumState, t: usize) -> Result<Vec<MomentumState>> {
        let mut states = Vec::with_capacity(t + 1);
        states.push(state.clone());
        for _ in 0..t {
            let next = self.apply(states.last().expect("non-empty"))?;
            states.push(next);
        }
        Ok(states)
    }

    /// State after `t` kicks.
    pub fn apply_times(&self, state: &MomentumState, t: usize) -> Result<MomentumState> {
        let mut cur = state.clone();
        for _ in 0..t {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }
}

fn j_signed(table: &[f64], d: i64) -> f64 {
    let j = table[d.unsigned_abs() as usize];
    if d < 0 && d % 2 != 0 {
        -j
    } else {
        j
    }
}

/// One kick by the banded convolution.
pub fn apply_kick(
    state: &MomentumState,
    kick_strength: f64,
    direction: Direction,
) -> Result<MomentumState> {
    KickOperator::new(kick_strength, direction).apply(state)
}

/// States after `0..=t` kicks.
pub fn evolve(
    state: &MomentumState,
    kick_strength: f64,
    t: usize,
    direction: Direction,
) -> Result<Vec<MomentumState>> {
    KickOperator::new(kick_strength, direction).trajectory(state, t)
}

/// Angle-grid kick: inverse transform to `θ_j = 2πj/L`, multiply by
/// `exp(∓i k cos θ_j)`, transform back.
pub struct SpectralKick {
    halfwidth: usize,
    grid_len: usize,
    phases: Vec<Complex64>,
    to_angle: Arc<dyn Fft<f64>>,
    to_momentum: Arc<dyn Fft<f64>>,
}

impl SpectralKick {
    /// Operator for states of the given window half-width. The grid is the
    /// next power of two at or above `4M` (and wide enough that the band
    /// cannot alias back into the window).
    pub fn new(kick_strength: f64, direction: Direction, halfwidth: usize) -> Self {
        let b = bandwidth(kick_strength);
        let grid_len = (4 * halfwidth).max(2 * halfwidth + 2 * b + 2).next_power_of_two();
        let sign = match direction {
            Direction::Forward => -1.0,
            Direction::Backward => 1.0,
        };
        let phases = (0..grid_len)
            .map(|j| {
                let theta = 2.0 * PI * j as f64 / grid_len as f64;
                Complex64::from_polar(1.0, sign * kick_strength * theta.cos())
            })
            .collect();
        let mut planner = FftPlanner::new();
        Self {
            halfwidth,
            grid_len,
            phases,
            to_angle: planner.plan_fft_inverse(grid_len),
            to_momentum: planner.plan_fft_forward(grid_len),
        }
    }

    pub fn grid_len(&self) -> usize {
        self.grid_len
    }

    pub fn apply(&self, state: &MomentumState) -> Result<MomentumState> {
        if state.halfwidth() != self.halfwidth {
            return Err(Error::WindowMismatch {
                left: self.halfwidth,
                right: state.halfwidth(),
            });
        }
        let len = self.grid_len as i64;
        let slot = |n: i64| n.rem_euclid(len) as usize;

        let mut buf = vec![Complex64::new(0.0, 0.0); self.grid_len];
        for (n, &a) in state.momenta().zip(state.amplitudes()) {
            buf[slot(n)] = a;
        }
        // ψ(θ_j) = Σ_n ψ_n exp(i n θ_j)
        self.to_angle.process(&mut buf);
        for (v, p) in buf.iter_mut().zip(&self.phases) {
            *v *= p;
        }
        self.to_momentum.process(&mut buf);
        let scale = 1.0 / self.grid_len as f64;

        let mut out = MomentumState::zeros(self.halfwidth);
        for (n, dst) in (-(self.halfwidth as i64)..).zip(out.amplitudes_mut().iter_mut()) {
            *dst = buf[slot(n)] * scale;
        }
        check_leak(state.norm_sqr(), out.norm_sqr(), self.halfwidth)?;
        Ok(out)
    }

    pub fn apply_times(&self, state: &MomentumState, t: usize) -> Result<MomentumState> {
        let mut cur = state.clone();
        for _ in 0..t {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }
}

/// One kick by the angle-grid route.
pub fn apply_kick_spectral(
    state: &MomentumState,
    kick_strength: f64,
    direction: Direction,
) -> Result<MomentumState> {
    SpectralKick::new(kick_strength, direction, state.halfwidth()).apply(state)
}
