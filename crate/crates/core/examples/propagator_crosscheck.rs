//! The banded Bessel convolution against the angle-grid FFT route, and
//! `t` kicks of `k` against one kick of `k t`.

use num_complex::Complex64;

use kickwalk::propagator::{Direction, KickOperator, SpectralKick};
use kickwalk::state::MomentumState;

fn main() -> kickwalk::Result<()> {
    let m = 160;
    let start = MomentumState::superpose(
        &[(-2, Complex64::new(0.5, 0.1)), (0, Complex64::new(0.7, 0.0)), (3, Complex64::new(-0.2, 0.4))],
        m,
    )?;
    for (k, t) in [(0.3, 45), (0.8, 45), (1.7, 30), (3.0, 30)] {
        let banded = KickOperator::new(k, Direction::Forward);
        let spectral = SpectralKick::new(k, Direction::Forward, m);
        let a = banded.apply_times(&start, t)?;
        let b = spectral.apply_times(&start, t)?;
        let once = KickOperator::new(k * t as f64, Direction::Forward).apply(&start)?;
        println!(
            "k={k:<4} t={t:<3} B={:<3} L={:<5} |banded - fft| = {:.2e}  |U^t - U(kt)| = {:.2e}",
            banded.bandwidth(),
            spectral.grid_len(),
            a.l2_distance(&b)?,
            a.l2_distance(&once)?
        );
    }
    Ok(())
}
