//! Integer-order Bessel functions of the first kind.
//!
//! Values are produced by Miller's backward recurrence normalized with the
//! identity `J_0(x) + 2 Σ_k J_{2k}(x) = 1`. The recurrence is stable in the
//! downward direction for every order, so whole tables `J_0..J_n` come out
//! with uniform absolute accuracy near machine precision even when `n` is far
//! beyond `x`.

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// Returns `[J_0(x), J_1(x), ..., J_nmax(x)]`.
pub fn bessel_j_table(x: f64, nmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();

    let margin = 32 + (8.0 * ax.cbrt()).ceil() as usize;
    let mut start = nmax.max(ax.ceil() as usize) + margin;
    if start % 2 == 1 {
        start += 1;
    }

    let two_over_x = 2.0 / ax;
    let mut next = 0.0; // J_{n+1}
    let mut cur = 1.0; // J_n, unnormalized
    let mut sum = 0.0;
    for n in (1..=start).rev() {
        if n <= nmax {
            out[n] = cur;
        }
        if n % 2 == 0 {
            sum += 2.0 * cur;
        }
        let prev = n as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE_ABOVE {
            cur *= RESCALE_BY;
            next *= RESCALE_BY;
            sum *= RESCALE_BY;
            for v in out.iter_mut() {
                *v *= RESCALE_BY;
            }
        }
    }
    out[0] = cur;
    sum += cur;

    let norm = 1.0 / sum;
    for (n, v) in out.iter_mut().enumerate() {
        *v *= norm;
        if x < 0.0 && n % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// `J_n(x)` for any integer order, using `J_{-n}(x) = (-1)^n J_n(x)`.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let order = n.unsigned_abs() as usize;
    let v = bessel_j_table(x, order)[order];
    if n < 0 && order % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Smallest order `m >= floor(x)` with `|J_m(x)|` below `eps`, i.e. the
/// half-width beyond which the coupling coefficients can be dropped.
pub fn decay_order(x: f64, eps: f64) -> usize {
    let ax = x.abs();
    let guess = ax.ceil() as usize + 64 + (16.0 * ax.cbrt()).ceil() as usize;
    let table = bessel_j_table(ax, guess);
    let from = ax.floor() as usize;
    (from..=guess)
        .find(|&m| table[m..].iter().all(|v| v.abs() < eps))
        .unwrap_or(guess)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Power series, usable for small x where cancellation is mild.
    fn series(n: usize, x: f64) -> f64 {
        let half = x / 2.0;
        let mut term = half.powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>();
        let mut sum = term;
        for k in 1..200 {
            term *= -half * half / (k as f64 * (k + n) as f64);
            sum += term;
            if term.abs() < 1e-300 {
                break;
            }
        }
        sum
    }

    #[test]
    fn matches_power_series_at_small_argument() {
        for &x in &[0.1, 0.5, 1.0, 2.0, 4.0] {
            let table = bessel_j_table(x, 20);
            for (n, v) in table.iter().enumerate() {
                assert!((v - series(n, x)).abs() < 1e-14, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn known_values() {
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(0, 10.0) + 0.245_935_764_451_348_3).abs() < 1e-14);
        assert!(bessel_j(0, 2.404_825_557_695_773).abs() < 1e-15);
    }

    #[test]
    fn negative_orders_and_arguments() {
        let x = 3.7;
        for n in 0..10i64 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(bessel_j(-n, x), sign * bessel_j(n, x));
            assert!((bessel_j(n, -x) - sign * bessel_j(n, x)).abs() < 1e-15);
        }
    }

    #[test]
    fn tiny_argument_does_not_overflow() {
        let t = bessel_j_table(1e-9, 40);
        assert!((t[0] - 1.0).abs() < 1e-15);
        assert!((t[1] - 5e-10).abs() < 1e-20);
        assert!(t.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn square_sum_and_recurrence_at_large_argument() {
        for &x in &[12.0, 36.0, 135.0, 1024.0] {
            let nmax = (x as usize) * 2 + 80;
            let t = bessel_j_table(x, nmax);
            let sq: f64 = t[0] * t[0] + 2.0 * t[1..].iter().map(|v| v * v).sum::<f64>();
            assert!((sq - 1.0).abs() < 1e-12, "x={x} sum={sq}");
            for n in 1..nmax - 1 {
                let lhs = t[n - 1] + t[n + 1];
                let rhs = 2.0 * n as f64 / x * t[n];
                assert!((lhs - rhs).abs() < 1e-12, "x={x} n={n}");
            }
        }
    }

    #[test]
    fn decay_order_bounds_tail() {
        let m = decay_order(3.0, 1e-17);
        assert!(bessel_j(m as i64, 3.0).abs() < 1e-17);
        assert!(bessel_j(m as i64 - 1, 3.0).abs() >= 1e-17);
        assert_eq!(decay_order(0.0, 1e-17), 1);
    }
}
