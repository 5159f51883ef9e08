//! Quantum search with the kicked rotor at quantum resonance.
//!
//! At the resonant kick period the rotor performs a continuous-time quantum
//! walk on the integer momentum lattice, one kick per step. This crate
//! simulates that walk and the search protocol built on it:
//!
//! - [`state`]: wavefunctions and distributions on the momentum window.
//! - [`propagator`]: the kick operator and its adjoint, as a banded Bessel
//!   convolution and independently through an angle-grid FFT.
//! - [`prep`]: flat initial distributions from three-site superpositions.
//! - [`search`]: forward walk, oracle, backward walk, cut, refocusing walk.
//! - [`extract`]: flank-midpoint and refocus-argmax estimators.
//! - [`analysis`]: width, survival probability, partial sums, hitting time.
//! - [`cli`]: configuration, experiment commands and file output.
//!
//! ```
//! use kickwalk::{extract, search, state::WalkParams, CALIBRATED_KICK_STRENGTH};
//!
//! let params = WalkParams::new(CALIBRATED_KICK_STRENGTH, 15, None)?;
//! let record = search::run_search(&search::SearchConfig::new(params, 5))?;
//! assert_eq!(extract::extract_refocus(&record)?.n_hat, 5);
//! # Ok::<(), kickwalk::Error>(())
//! ```

pub mod analysis;
pub mod bessel;
pub mod cli;
pub mod error;
pub mod extract;
pub mod plot;
pub mod prep;
pub mod propagator;
pub mod search;
pub mod state;

pub use error::{Error, Result};

/// Kick strength at which the flattest three-site preparation after 15
/// kicks on `n ∈ [-10, 10]` lands on `(0.4815, 0.7323, 0.4815)`.
pub const CALIBRATED_KICK_STRENGTH: f64 = 0.8;

/// Kicks per protocol leg in the reference configuration.
pub const DEFAULT_KICKS_PER_LEG: usize = 15;
