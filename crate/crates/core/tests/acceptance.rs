//! Acceptance criteria, one line per criterion. Runs as a plain binary so
//! the verdicts are always printed; exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{bessel_quadrature, second_moment_bruteforce};
use kickwalk::analysis::{ballistic_window, fit_power_law, single_site_walk, survival_probability, width};
use kickwalk::cli::{cmd_prepare, cmd_search, cmd_sweep, ExperimentConfig};
use kickwalk::extract::{extract_flank, extract_refocus, success_sweep};
use kickwalk::prep::{optimize_initial_state, Coefficients, FlatnessProblem, OptimizerSettings, Preset};
use kickwalk::propagator::{bandwidth, Direction, KickOperator, SpectralKick};
use kickwalk::search::{run_search, SearchConfig};
use kickwalk::state::{Distribution, MomentumState, WalkParams};
use kickwalk::CALIBRATED_KICK_STRENGTH;

type Verdict = Result<(bool, String), kickwalk::Error>;

fn bulk_targets() -> Vec<i64> {
    (3..=8).flat_map(|n| [-n, n]).collect()
}

fn calibrated() -> WalkParams {
    WalkParams::new(CALIBRATED_KICK_STRENGTH, 15, None).expect("valid defaults")
}

fn round_trip() -> Verdict {
    let cfg = SearchConfig::new(calibrated(), 0).with_target(None);
    let f = run_search(&cfg)?.round_trip_fidelity();
    Ok((f >= 1.0 - 1e-10, format!("fidelity {f:.15}")))
}

fn propagator_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let support = 4i64;
    let halfwidth = ballistic_window(3.0 * 45.0) + support as usize + bandwidth(3.0);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let k = 3.0 * (1.0 - rng.gen::<f64>());
        let t = if i < 5 { 45 } else { rng.gen_range(1..=45) };
        let coeffs: Vec<(i64, Complex64)> = (-support..=support)
            .map(|n| (n, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        let s = MomentumState::superpose(&coeffs, halfwidth)?;
        let dir = if i % 2 == 0 { Direction::Forward } else { Direction::Backward };
        let banded = KickOperator::new(k, dir).apply_times(&s, t)?;
        let spectral = SpectralKick::new(k, dir, halfwidth).apply_times(&s, t)?;
        worst = worst.max(banded.l2_distance(&spectral)?);
    }
    Ok((worst < 1e-8, format!("max L2 distance {worst:.2e} over 100 states")))
}

fn analytic_anchors() -> Verdict {
    let mut survival_err = 0.0f64;
    let mut width_err = 0.0f64;
    let mut oracle_err = 0.0f64;
    for k in [0.8, 1.0] {
        let t_max = 64;
        let states = single_site_walk(k, t_max)?;
        let p0 = survival_probability(&states)?;
        for (t, s) in states.iter().enumerate() {
            let x = k * t as f64;
            let j0 = bessel_quadrature(0, x);
            survival_err = survival_err.max((p0[t] - j0 * j0).abs());
            let sigma = x / std::f64::consts::SQRT_2;
            width_err = width_err.max((width(&s.distribution())? - sigma).abs());
            if t % 8 == 0 {
                oracle_err = oracle_err.max((second_moment_bruteforce(x).sqrt() - sigma).abs());
            }
        }
    }
    Ok((
        survival_err < 1e-10 && width_err < 1e-9 && oracle_err < 1e-9,
        format!("survival {survival_err:.1e}, width {width_err:.1e}, bessel-sum oracle {oracle_err:.1e}"),
    ))
}

fn search_success() -> Verdict {
    let base = SearchConfig::new(calibrated(), 0);
    let mut bad = Vec::new();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for target in bulk_targets() {
        let record = run_search(&base.with_target(Some(target)))?;
        let est = extract_refocus(&record)?;
        let w = record.final_distribution().prob(target);
        lo = lo.min(w);
        hi = hi.max(w);
        if est.n_hat != target || !(0.05..=0.25).contains(&w) {
            bad.push((target, est.n_hat, w));
        }
    }
    Ok((
        bad.is_empty(),
        format!("12 targets, weight at target in [{lo:.3}, {hi:.3}], misses {bad:?}"),
    ))
}

fn flank_estimator() -> Verdict {
    let halfwidth = 31usize;
    let m = halfwidth as i64;
    let mut pairs = 0;
    let mut wrong = Vec::new();
    // strict maxima cannot sit on adjacent sites, so peaks are at least two apart
    for a in -30i64..=30 {
        for b in a + 2..=30 {
            let probs = (-m..=m).map(|n| if n == a || n == b { 0.4 } else { 0.001 }).collect();
            let dist = Distribution::new(probs)?;
            let want = ((a + b) as f64 / 2.0).trunc() as i64;
            pairs += 1;
            match extract_flank(&dist, None) {
                Ok(e) if e.n_hat == want => {}
                other => wrong.push((a, b, other.map(|e| e.n_hat).ok())),
            }
        }
    }
    let rows = success_sweep(&SearchConfig::new(calibrated(), 0), &bulk_targets());
    let hits = rows.iter().filter(|r| r.flank_ok).count();
    let rate = hits as f64 / rows.len() as f64;
    Ok((
        wrong.is_empty() && rate >= 0.8,
        format!(
            "synthetic {}/{pairs} exact; end-to-end {hits}/{} ({:.0}%)",
            pairs - wrong.len(),
            rows.len(),
            100.0 * rate
        ),
    ))
}

fn survival_power_law() -> Verdict {
    let states = single_site_walk(1.0, 128)?;
    let fit = fit_power_law(&survival_probability(&states)?)?;
    Ok((
        (-1.15..=-0.85).contains(&fit.exponent),
        format!("exponent {:.4} from {} blocks", fit.exponent, fit.blocks.len()),
    ))
}

fn flatness_optimization() -> Verdict {
    let params = calibrated();
    let settings = OptimizerSettings {
        restarts: 16,
        ..Default::default()
    };
    let result = optimize_initial_state(&params, 20, &settings)?;
    let baseline = FlatnessProblem::new(&params, 20)?.cost(&Preset::B.coefficients())?;
    let paper = Coefficients([
        Complex64::new(0.4815, 0.0),
        Complex64::new(0.7323, 0.0),
        Complex64::new(0.4815, 0.0),
    ]);
    let dist = result.coefficients.distance_up_to_phase(&paper);
    Ok((
        result.cost <= baseline && dist <= 0.05,
        format!(
            "{} cost {:.4} vs preset b {:.4}; max component distance {dist:.4}",
            result.coefficients, result.cost, baseline
        ),
    ))
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .expect("output directory")
        .map(|e| {
            let e = e.expect("entry");
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).expect("file"))
        })
        .collect()
}

fn determinism() -> Verdict {
    let runs: Vec<BTreeMap<String, Vec<u8>>> = (0..2)
        .map(|_| {
            let tmp = tempfile::tempdir()?;
            let cfg = ExperimentConfig {
                target: 6,
                seed: 17,
                targets: vec![-5, 4],
                restarts: 8,
                out: tmp.path().to_path_buf(),
                ..Default::default()
            };
            cmd_search(&cfg)?;
            cmd_prepare(&cfg)?;
            cmd_sweep(&cfg)?;
            Ok(read_tree(tmp.path()))
        })
        .collect::<Result<_, kickwalk::Error>>()?;
    let same = runs[0] == runs[1] && !runs[0].is_empty();
    Ok((same, format!("{} files compared byte for byte", runs[0].len())))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Verdict); 8] = [
        ("round-trip identity", Duration::from_secs(1), round_trip),
        ("propagator equivalence", Duration::from_secs(30), propagator_equivalence),
        ("analytic anchors", Duration::from_secs(5), analytic_anchors),
        ("search success", Duration::from_secs(10), search_success),
        ("flank estimator", Duration::from_secs(60), flank_estimator),
        ("survival power law", Duration::from_secs(5), survival_power_law),
        ("flatness optimization", Duration::from_secs(60), flatness_optimization),
        ("determinism", Duration::from_secs(60), determinism),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && elapsed <= *budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!ok);
        println!(
            "AC{} {:<24} {}  {detail}  [{:.2} s of {} s]",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
