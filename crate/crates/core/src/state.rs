//! Wavefunctions and probability distributions on the integer momentum lattice.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kick period at the principal quantum resonance. Free evolution over one
/// period multiplies `|n>` by `exp(-i 2π n²) = 1`.
pub const RESONANCE_PERIOD: f64 = 4.0 * std::f64::consts::PI;

/// Sites of margin the sizing rule adds beyond `3 k t̄`.
pub const WINDOW_MARGIN: usize = 16;

/// Minimum window half-width for a protocol of `3 * kicks_per_leg` kicks.
pub fn required_halfwidth(kick_strength: f64, kicks_per_leg: usize) -> usize {
    // k t̄ products like 0.8 * 45 land a rounding error above an integer
    let reach = 3.0 * kick_strength * kicks_per_leg as f64;
    (reach * (1.0 - 1e-12)).ceil() as usize + WINDOW_MARGIN
}

/// Complex amplitudes `ψ_n` for `n ∈ [-M, M]`, stored densely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumState {
    amplitudes: Vec<Complex64>,
    halfwidth: usize,
}

impl MomentumState {
    /// `|n0>`.
    pub fn basis(n0: i64, halfwidth: usize) -> Result<Self> {
        check_in_window(n0, halfwidth)?;
        let mut state = Self::zeros(halfwidth);
        let idx = state.index(n0);
        state.amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    /// Normalized superposition of the given `(n, c_n)` pairs. Repeated
    /// momenta accumulate.
    pub fn superpose(coeffs: &[(i64, Complex64)], halfwidth: usize) -> Result<Self> {
        let mut state = Self::zeros(halfwidth);
        for &(n, c) in coeffs {
            check_in_window(n, halfwidth)?;
            let idx = state.index(n);
            state.amplitudes[idx] += c;
        }
        let norm = state.norm_sqr().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        for a in state.amplitudes.iter_mut() {
            *a /= norm;
        }
        Ok(state)
    }

    /// Wraps raw amplitudes without renormalizing. `amplitudes.len()` must be
    /// odd; the middle entry is `n = 0`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() % 2 == 0 {
            return Err(Error::invalid(
                "amplitudes",
                format!("length {} is not 2M+1", amplitudes.len()),
            ));
        }
        let halfwidth = amplitudes.len() / 2;
        Ok(Self {
            amplitudes,
            halfwidth,
        })
    }

    pub(crate) fn zeros(halfwidth: usize) -> Self {
        Self {
            amplitudes: vec![Complex64::new(0.0, 0.0); 2 * halfwidth + 1],
            halfwidth,
        }
    }

    pub fn halfwidth(&self) -> usize {
        self.halfwidth
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// Momenta covered by the window, in storage order.
    pub fn momenta(&self) -> impl Iterator<Item = i64> {
        let m = self.halfwidth as i64;
        -m..=m
    }

    pub fn contains(&self, n: i64) -> bool {
        n.unsigned_abs() as usize <= self.halfwidth
    }

    /// Storage index of momentum `n`. Caller guarantees `n` is in the window.
    pub(crate) fn index(&self, n: i64) -> usize {
        (n + self.halfwidth as i64) as usize
    }

    /// `ψ_n`, zero outside the window.
    pub fn amplitude(&self, n: i64) -> Complex64 {
        if self.contains(n) {
            self.amplitudes[self.index(n)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_same_window(self.halfwidth, other.halfwidth)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|²`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        check_same_window(self.halfwidth, other.halfwidth)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn distribution(&self) -> Distribution {
        Distribution::from_probs_unchecked(
            self.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
            self.halfwidth,
        )
    }

    /// Same amplitudes on a wider window, zero-padded.
    pub fn widened(&self, halfwidth: usize) -> Result<Self> {
        if halfwidth < self.halfwidth {
            return Err(Error::WindowMismatch {
                left: self.halfwidth,
                right: halfwidth,
            });
        }
        let mut out = Self::zeros(halfwidth);
        let offset = halfwidth - self.halfwidth;
        out.amplitudes[offset..offset + self.amplitudes.len()].copy_from_slice(&self.amplitudes);
        Ok(out)
    }

    /// `ψ_n -> ψ_{-n}`.
    pub fn mirrored(&self) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.reverse();
        Self {
            amplitudes,
            halfwidth: self.halfwidth,
        }
    }
}

fn check_in_window(n: i64, halfwidth: usize) -> Result<()> {
    if n.unsigned_abs() as usize > halfwidth {
        Err(Error::OutOfWindow { n, halfwidth })
    } else {
        Ok(())
    }
}

fn check_same_window(left: usize, right: usize) -> Result<()> {
    if left != right {
        Err(Error::WindowMismatch { left, right })
    } else {
        Ok(())
    }
}

/// Probability per momentum with its total mass, which falls below one
/// after a cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    probs: Vec<f64>,
    halfwidth: usize,
    total_mass: f64,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() % 2 == 0 {
            return Err(Error::invalid(
                "probs",
                format!("length {} is not 2M+1", probs.len()),
            ));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::invalid("probs", format!("entry {p} is not a probability")));
        }
        let halfwidth = probs.len() / 2;
        Ok(Self::from_probs_unchecked(probs, halfwidth))
    }

    /// All-zero distribution.
    pub fn zeros(halfwidth: usize) -> Self {
        Self::from_probs_unchecked(vec![0.0; 2 * halfwidth + 1], halfwidth)
    }

    fn from_probs_unchecked(probs: Vec<f64>, halfwidth: usize) -> Self {
        let total_mass = probs.iter().sum();
        Self {
            probs,
            halfwidth,
            total_mass,
        }
    }

    pub fn halfwidth(&self) -> usize {
        self.halfwidth
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn momenta(&self) -> impl Iterator<Item = i64> {
        let m = self.halfwidth as i64;
        -m..=m
    }

    /// `P(n)`, zero outside the window.
    pub fn prob(&self, n: i64) -> f64 {
        if n.unsigned_abs() as usize <= self.halfwidth {
            self.probs[(n + self.halfwidth as i64) as usize]
        } else {
            0.0
        }
    }

    /// `max(0, self - reference)` site by site.
    pub fn subtract_reference(&self, reference: &Distribution) -> Result<Distribution> {
        check_same_window(self.halfwidth, reference.halfwidth)?;
        let probs = self
            .probs
            .iter()
            .zip(&reference.probs)
            .map(|(p, r)| (p - r).max(0.0))
            .collect();
        Ok(Self::from_probs_unchecked(probs, self.halfwidth))
    }

    /// Mass in `[center - radius, center + radius]`.
    pub fn mass_near(&self, center: i64, radius: usize) -> f64 {
        let r = radius as i64;
        (center - r..=center + r).map(|n| self.prob(n)).sum()
    }

    /// Copy with `|n| <= halfwidth` zeroed.
    pub fn without_center(&self, halfwidth: usize) -> Distribution {
        let probs = self
            .momenta()
            .zip(&self.probs)
            .map(|(n, &p)| if n.unsigned_abs() as usize <= halfwidth { 0.0 } else { p })
            .collect();
        Self::from_probs_unchecked(probs, self.halfwidth)
    }

    pub fn l1_distance(&self, other: &Distribution) -> Result<f64> {
        check_same_window(self.halfwidth, other.halfwidth)?;
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum())
    }
}

/// Kick strength, kicks per protocol leg and window half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    pub kick_strength: f64,
    pub kicks_per_leg: usize,
    pub window_halfwidth: usize,
    pub period: f64,
}

impl WalkParams {
    /// Validated parameters; `window = None` applies the sizing rule.
    pub fn new(kick_strength: f64, kicks_per_leg: usize, window: Option<usize>) -> Result<Self> {
        Self::with_period(kick_strength, kicks_per_leg, window, RESONANCE_PERIOD)
    }

    pub fn with_period(
        kick_strength: f64,
        kicks_per_leg: usize,
        window: Option<usize>,
        period: f64,
    ) -> Result<Self> {
        if !kick_strength.is_finite() || kick_strength < 0.0 {
            return Err(Error::invalid(
                "kick_strength",
                format!("{kick_strength} is not a finite non-negative number"),
            ));
        }
        if kicks_per_leg == 0 {
            return Err(Error::invalid("kicks_per_leg", "must be at least 1"));
        }
        if period != RESONANCE_PERIOD {
            return Err(Error::invalid(
                "period",
                format!("{period} is off resonance; only 4π is supported"),
            ));
        }
        let required = required_halfwidth(kick_strength, kicks_per_leg);
        let window_halfwidth = window.unwrap_or(required);
        if window_halfwidth < required {
            return Err(Error::invalid(
                "window",
                format!("half-width {window_halfwidth} below required {required}"),
            ));
        }
        Ok(Self {
            kick_strength,
            kicks_per_leg,
            window_halfwidth,
            period,
        })
    }
}
