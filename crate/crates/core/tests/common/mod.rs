//! Reference values computed without the crate's Bessel recurrence.
#![allow(dead_code)]

use std::f64::consts::PI;

/// `J_n(x) = (1/2π) ∫ cos(nτ - x sin τ) dτ` by the trapezoid rule, which is
/// spectrally accurate for this periodic integrand once the node count
/// exceeds `|n| + |x|` comfortably.
pub fn bessel_quadrature(n: i64, x: f64) -> f64 {
    let nodes = 2 * ((n.unsigned_abs() as f64 + x.abs()) as usize + 64);
    let h = 2.0 * PI / nodes as f64;
    let sum: f64 = (0..nodes)
        .map(|j| {
            let tau = j as f64 * h;
            (n as f64 * tau - x * tau.sin()).cos()
        })
        .sum();
    sum / nodes as f64
}

/// Ascending series `Σ (-1)^m (x/2)^(2m+n) / (m! (m+n)!)`, for small `x`.
pub fn bessel_series(n: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..200 {
        term *= -half * half / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() < 1e-300 {
            break;
        }
    }
    sum
}

/// `Σ_n n² J_n(x)²` summed term by term until the tail is negligible.
pub fn second_moment_bruteforce(x: f64) -> f64 {
    let reach = (x.abs() + 20.0 * x.abs().cbrt() + 40.0) as i64;
    (-reach..=reach)
        .map(|n| {
            let j = bessel_quadrature(n, x);
            (n * n) as f64 * j * j
        })
        .sum()
}
