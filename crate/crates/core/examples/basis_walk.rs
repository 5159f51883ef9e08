//! Walk from a single momentum site: ballistic spread `σ = k t / √2` and
//! return probability `J_0(k t)²`.

use kickwalk::analysis::{single_site_walk, survival_probability, width};
use kickwalk::bessel::bessel_j;

fn main() -> kickwalk::Result<()> {
    let k = 1.0;
    let states = single_site_walk(k, 40)?;
    let p0 = survival_probability(&states)?;
    println!("{:>3} {:>10} {:>10} {:>12} {:>12}", "t", "sigma", "kt/sqrt2", "p0", "J0(kt)^2");
    for t in (0..=40).step_by(5) {
        let x = k * t as f64;
        println!(
            "{t:>3} {:>10.6} {:>10.6} {:>12.4e} {:>12.4e}",
            width(&states[t].distribution())?,
            x / 2f64.sqrt(),
            p0[t],
            bessel_j(0, x).powi(2)
        );
    }
    Ok(())
}
