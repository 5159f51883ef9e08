//! Preparation of a flat initial distribution.
//!
//! A superposition of `|-1>`, `|0>` and `|+1>` is kicked `t̄` times and its
//! coefficients are tuned so that the resulting distribution is as close as
//! possible to uniform on `n ∈ [-N/2, N/2]`. Closeness is measured by
//! `Σ |P(n) - u_N|` with `u_N = 1/(N+1)`, the uniform weight over those
//! `N+1` sites.

pub mod simplex;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::{Direction, KickOperator};
use crate::state::{Distribution, MomentumState, WalkParams};
use simplex::{SimplexOptions, SimplexOutcome};

/// Default half-range target: `n ∈ [-10, 10]`.
pub const DEFAULT_FLAT_WINDOW: usize = 20;
pub const DEFAULT_RESTARTS: usize = 16;

/// Amplitudes on `n = -1, 0, +1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients(pub [Complex64; 3]);

impl Coefficients {
    pub const SUPPORT: [i64; 3] = [-1, 0, 1];

    /// Normalized real coefficients `(c_-1, c_0, c_+1)`.
    pub fn real(minus: f64, zero: f64, plus: f64) -> Result<Self> {
        Self([
            Complex64::new(minus, 0.0),
            Complex64::new(zero, 0.0),
            Complex64::new(plus, 0.0),
        ])
        .normalized()
    }

    pub fn normalized(self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self(self.0.map(|c| c / norm)))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn get(&self, n: i64) -> Complex64 {
        self.0[(n + 1) as usize]
    }

    pub fn pairs(&self) -> [(i64, Complex64); 3] {
        [(-1, self.0[0]), (0, self.0[1]), (1, self.0[2])]
    }

    pub fn to_state(&self, halfwidth: usize) -> Result<MomentumState> {
        MomentumState::superpose(&self.pairs(), halfwidth)
    }

    /// Global phase fixed so that the largest-magnitude entry of `c_0`, then
    /// `c_-1`, then `c_+1` that is nonzero is real and positive.
    pub fn canonical_phase(&self) -> Self {
        let pivot = [1usize, 0, 2]
            .into_iter()
            .map(|i| self.0[i])
            .find(|c| c.norm() > 1e-12);
        match pivot {
            Some(p) => {
                let rot = p.conj() / p.norm();
                Self(self.0.map(|c| c * rot))
            }
            None => *self,
        }
    }

    /// Largest per-component distance after aligning the global phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let overlap: Complex64 = self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum();
        let rot = if overlap.norm() > 0.0 {
            overlap.conj() / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b * rot).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |c: Complex64| {
            if c.im == 0.0 {
                format!("{:.4}", c.re)
            } else {
                format!("{:.4}{:+.4}i", c.re, c.im)
            }
        };
        write!(f, "({}, {}, {})", show(self.0[0]), show(self.0[1]), show(self.0[2]))
    }
}

/// Named initial states with a three-site support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// `c_-1 = c_0 = c_+1`
    B,
    /// `c_+1 = c_0 = -c_-1`
    C,
    /// `(0.4815, 0.7323, 0.4815)`
    D,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::B, Preset::C, Preset::D];

    pub fn name(self) -> &'static str {
        match self {
            Preset::B => "b",
            Preset::C => "c",
            Preset::D => "d",
        }
    }

    pub fn coefficients(self) -> Coefficients {
        let (m, z, p) = match self {
            Preset::B => (1.0, 1.0, 1.0),
            Preset::C => (-1.0, 1.0, 1.0),
            Preset::D => (0.4815, 0.7323, 0.4815),
        };
        Coefficients::real(m, z, p).expect("preset is nonzero")
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "b" => Ok(Preset::B),
            "c" => Ok(Preset::C),
            "d" => Ok(Preset::D),
            other => Err(Error::invalid(
                "preset",
                format!("unknown preset `{other}` (expected b, c or d)"),
            )),
        }
    }
}

/// The three initial states of the flatness comparison, normalized.
pub fn canonical_states() -> Vec<(&'static str, Coefficients)> {
    Preset::ALL
        .iter()
        .map(|p| (p.name(), p.coefficients()))
        .collect()
}

/// `Σ_{n=-N/2}^{N/2} |P(n) - 1/(N+1)|`.
pub fn flatness_of(dist: &Distribution, flat_window: usize) -> f64 {
    let half = (flat_window / 2) as i64;
    let uniform = 1.0 / (flat_window as f64 + 1.0);
    (-half..=half).map(|n| (dist.prob(n) - uniform).abs()).sum()
}

fn check_flat_window(flat_window: usize, params: &WalkParams) -> Result<()> {
    if flat_window % 2 != 0 {
        return Err(Error::invalid("flat_window", format!("{flat_window} is not even")));
    }
    if flat_window / 2 > params.window_halfwidth {
        return Err(Error::invalid(
            "flat_window",
            format!(
                "N/2 = {} exceeds window half-width {}",
                flat_window / 2,
                params.window_halfwidth
            ),
        ));
    }
    Ok(())
}

/// Cost of the distribution reached from `coeffs` after `t̄` kicks.
pub fn flatness_cost(coeffs: &Coefficients, params: &WalkParams, flat_window: usize) -> Result<f64> {
    if (coeffs.norm_sqr() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(
            "coefficients",
            format!("norm² = {} is not 1", coeffs.norm_sqr()),
        ));
    }
    FlatnessProblem::new(params, flat_window)?.cost(coeffs)
}

/// Precomputed `U^t̄ |j>` for `j ∈ {-1, 0, 1}`; by linearity the evolved
/// superposition is a combination of these three columns.
#[derive(Debug, Clone)]
pub struct FlatnessProblem {
    params: WalkParams,
    flat_window: usize,
    columns: [MomentumState; 3],
}

impl FlatnessProblem {
    pub fn new(params: &WalkParams, flat_window: usize) -> Result<Self> {
        check_flat_window(flat_window, params)?;
        let op = KickOperator::new(params.kick_strength, Direction::Forward);
        let column = |n: i64| -> Result<MomentumState> {
            let basis = MomentumState::basis(n, params.window_halfwidth)?;
            op.apply_times(&basis, params.kicks_per_leg)
        };
        Ok(Self {
            params: *params,
            flat_window,
            columns: [column(-1)?, column(0)?, column(1)?],
        })
    }

    pub fn params(&self) -> &WalkParams {
        &self.params
    }

    pub fn flat_window(&self) -> usize {
        self.flat_window
    }

    /// Distribution after `t̄` kicks from the (unnormalized) coefficients.
    pub fn distribution(&self, coeffs: &Coefficients) -> Distribution {
        let amps: Vec<Complex64> = (0..self.columns[0].amplitudes().len())
            .map(|i| {
                coeffs
                    .0
                    .iter()
                    .zip(&self.columns)
                    .map(|(c, col)| c * col.amplitudes()[i])
                    .sum()
            })
            .collect();
        MomentumState::from_amplitudes(amps)
            .expect("odd length")
            .distribution()
    }

    pub fn cost(&self, coeffs: &Coefficients) -> Result<f64> {
        Ok(flatness_of(&self.distribution(coeffs), self.flat_window))
    }

    fn cost_unchecked(&self, coeffs: &Coefficients) -> f64 {
        flatness_of(&self.distribution(coeffs), self.flat_window)
    }
}

/// Search space for the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientSpace {
    /// Real coefficients, two angles.
    #[default]
    Real,
    /// Complex `c_±1` with real `c_0`, two angles plus two phases.
    Complex,
}

impl CoefficientSpace {
    pub fn dim(self) -> usize {
        match self {
            CoefficientSpace::Real => 2,
            CoefficientSpace::Complex => 4,
        }
    }

    /// Point on the unit sphere: `c_0 = cos α`, `c_-1 = sin α cos β`,
    /// `c_+1 = sin α sin β`, with optional phases on `c_±1`.
    pub fn coefficients(self, x: &[f64]) -> Coefficients {
        let (alpha, beta) = (x[0], x[1]);
        let minus = alpha.sin() * beta.cos();
        let zero = alpha.cos();
        let plus = alpha.sin() * beta.sin();
        match self {
            CoefficientSpace::Real => Coefficients([
                Complex64::new(minus, 0.0),
                Complex64::new(zero, 0.0),
                Complex64::new(plus, 0.0),
            ]),
            CoefficientSpace::Complex => Coefficients([
                Complex64::from_polar(minus, x[2]),
                Complex64::new(zero, 0.0),
                Complex64::from_polar(plus, x[3]),
            ]),
        }
    }

    /// Angles reproducing real coefficients (up to sign of the whole vector).
    pub fn angles_of(self, coeffs: &Coefficients) -> Vec<f64> {
        let c = coeffs.canonical_phase();
        let (m, z, p) = (c.0[0].re, c.0[1].re, c.0[2].re);
        let alpha = z.clamp(-1.0, 1.0).acos();
        let beta = p.atan2(m);
        match self {
            CoefficientSpace::Real => vec![alpha, beta],
            CoefficientSpace::Complex => vec![alpha, beta, c.0[0].arg(), c.0[2].arg()],
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizerSettings {
    pub restarts: usize,
    pub seed: u64,
    pub space: CoefficientSpace,
    pub simplex: SimplexOptions,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            space: CoefficientSpace::Real,
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparationResult {
    pub coefficients: Coefficients,
    pub cost: f64,
    pub flat_window: usize,
    pub kicks: usize,
    pub kick_strength: f64,
    /// Cost of the equal-weight preset in the same configuration.
    pub baseline_cost: f64,
    pub evaluations: usize,
    /// False when the best restart ran out of evaluations.
    pub converged: bool,
}

/// Radical inverse of `i` in `base`.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

/// Shifted Halton points in `[0,1)^dim`, deterministic in `seed`.
fn start_points(count: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    const BASES: [u64; 4] = [2, 3, 5, 7];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    (1..=count as u64)
        .map(|i| {
            (0..dim)
                .map(|d| (radical_inverse(i, BASES[d]) + shift[d]).fract())
                .collect()
        })
        .collect()
}

fn to_angles(space: CoefficientSpace, unit: &[f64]) -> Vec<f64> {
    let mut x = vec![unit[0] * FRAC_PI_2, unit[1] * FRAC_PI_2];
    if space == CoefficientSpace::Complex {
        x.push((2.0 * unit[2] - 1.0) * PI);
        x.push((2.0 * unit[3] - 1.0) * PI);
    }
    x
}

/// One simplex descent from the given angles.
pub fn optimize_from(
    problem: &FlatnessProblem,
    space: CoefficientSpace,
    start: &[f64],
    opts: &SimplexOptions,
) -> SimplexOutcome {
    simplex::minimize(
        |x| problem.cost_unchecked(&space.coefficients(x)),
        start,
        opts,
    )
}

/// Multi-start simplex search for the flattest distribution. Restarts run
/// in parallel; the result is independent of thread scheduling.
pub fn optimize_initial_state(
    params: &WalkParams,
    flat_window: usize,
    settings: &OptimizerSettings,
) -> Result<PreparationResult> {
    if settings.restarts == 0 {
        return Err(Error::invalid("restarts", "must be at least 1"));
    }
    let problem = FlatnessProblem::new(params, flat_window)?;
    let space = settings.space;
    let starts = start_points(settings.restarts, space.dim(), settings.seed);

    let outcomes: Vec<SimplexOutcome> = starts
        .par_iter()
        .map(|unit| optimize_from(&problem, space, &to_angles(space, unit), &settings.simplex))
        .collect();

    let evaluations = outcomes.iter().map(|o| o.evals).sum();
    let best = outcomes
        .into_iter()
        .reduce(|a, b| if b.f < a.f { b } else { a })
        .expect("restarts >= 1");

    let baseline = Preset::B.coefficients();
    let baseline_cost = problem.cost_unchecked(&baseline);
    let (coefficients, cost, converged) = if best.f <= baseline_cost {
        (
            space.coefficients(&best.x).normalized()?.canonical_phase(),
            best.f,
            best.converged,
        )
    } else {
        (baseline, baseline_cost, best.converged)
    };

    Ok(PreparationResult {
        coefficients,
        cost,
        flat_window,
        kicks: params.kicks_per_leg,
        kick_strength: params.kick_strength,
        baseline_cost,
        evaluations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CALIBRATED_KICK_STRENGTH;

    fn params() -> WalkParams {
        WalkParams::new(CALIBRATED_KICK_STRENGTH, 15, None).unwrap()
    }

    #[test]
    fn presets_are_normalized() {
        for (name, c) in canonical_states() {
            assert!((c.norm_sqr() - 1.0).abs() < 1e-12, "{name}");
        }
        let b = Preset::B.coefficients();
        assert!(b.0.iter().all(|c| (c.re - 1.0 / 3f64.sqrt()).abs() < 1e-15));
        let c = Preset::C.coefficients();
        assert_eq!(c.0[0], -c.0[1]);
        assert_eq!(c.0[1], c.0[2]);
        assert_eq!("D".parse::<Preset>().unwrap(), Preset::D);
        assert!("e".parse::<Preset>().is_err());
    }

    #[test]
    fn exact_uniform_costs_nothing() {
        let mut probs = vec![0.0; 41];
        for p in &mut probs[10..31] {
            *p = 1.0 / 21.0;
        }
        let d = Distribution::new(probs).unwrap();
        assert!(flatness_of(&d, 20) < 1e-15);
    }

    #[test]
    fn cost_is_phase_invariant() {
        let p = params();
        let c = Coefficients([
            Complex64::new(0.3, 0.2),
            Complex64::new(0.7, 0.0),
            Complex64::new(-0.1, 0.4),
        ])
        .normalized()
        .unwrap();
        let rotated = Coefficients(c.0.map(|x| x * Complex64::from_polar(1.0, 1.234)));
        let a = flatness_cost(&c, &p, 20).unwrap();
        let b = flatness_cost(&rotated, &p, 20).unwrap();
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn published_optimum_beats_equal_weights() {
        let p = params();
        let b = flatness_cost(&Preset::B.coefficients(), &p, 20).unwrap();
        let d = flatness_cost(&Preset::D.coefficients(), &p, 20).unwrap();
        assert!(b.is_finite() && b > 0.0);
        assert!(d <= b, "d={d} b={b}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = params();
        assert!(flatness_cost(&Preset::B.coefficients(), &p, 19).is_err());
        assert!(flatness_cost(&Preset::B.coefficients(), &p, 200).is_err());
        let raw = Coefficients([Complex64::new(1.0, 0.0); 3]);
        assert!(flatness_cost(&raw, &p, 20).is_err());
        let settings = OptimizerSettings {
            restarts: 0,
            ..Default::default()
        };
        assert!(optimize_initial_state(&p, 20, &settings).is_err());
    }

    #[test]
    fn symmetric_seed_gives_symmetric_optimum() {
        let problem = FlatnessProblem::new(&params(), 20).unwrap();
        let start = [0.8, std::f64::consts::FRAC_PI_4];
        let out = optimize_from(&problem, CoefficientSpace::Real, &start, &SimplexOptions::default());
        let c = CoefficientSpace::Real.coefficients(&out.x);
        assert!((c.0[0].re - c.0[2].re).abs() < 1e-3, "{c}");
    }

    #[test]
    fn degenerate_single_site_window() {
        let p = params();
        let settings = OptimizerSettings {
            restarts: 2,
            ..Default::default()
        };
        let res = optimize_initial_state(&p, 0, &settings).unwrap();
        assert!(res.cost.is_finite());
        assert!(res.cost <= res.baseline_cost);
        let direct = flatness_cost(&res.coefficients, &p, 0).unwrap();
        assert!((direct - res.cost).abs() < 1e-12);
    }

    #[test]
    fn halton_starts_are_deterministic() {
        assert_eq!(start_points(5, 2, 7), start_points(5, 2, 7));
        assert_ne!(start_points(5, 2, 7), start_points(5, 2, 8));
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn angles_round_trip() {
        let c = Preset::D.coefficients();
        let x = CoefficientSpace::Real.angles_of(&c);
        let back = CoefficientSpace::Real.coefficients(&x);
        assert!(c.distance_up_to_phase(&back) < 1e-12);
    }
}
