use std::fs;
use std::path::Path;
use std::process::Command;

use kickwalk::cli::{cmd_search, ExperimentConfig};
use kickwalk::search::run_search;

fn kickwalk(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kickwalk")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn dir_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dir_str(tmp.path());
    assert_eq!(kickwalk(&["search", "--target", "6", "--out", out]).0, 0);
    assert_eq!(kickwalk(&["search", "--k", "-1", "--out", out]).0, 2);
    assert_eq!(kickwalk(&["search", "--flat-window", "7", "--out", out]).0, 2);
    assert_eq!(kickwalk(&["search", "--window", "20", "--out", out]).0, 2);
    assert_eq!(kickwalk(&["search", "--strategy", "sideways", "--out", out]).0, 2);
    assert_eq!(kickwalk(&["search", "--wcut", "-2", "--out", out]).0, 2);
    assert_eq!(kickwalk(&["search", "--target", "400", "--out", out]).0, 2);
    assert_eq!(kickwalk(&["sweep", "--out", out]).0, 2);
    assert_eq!(kickwalk(&["frobnicate"]).0, 2);
    // cutting everything away leaves nothing to estimate from
    let (code, _, err) = kickwalk(&["search", "--target", "5", "--wcut", "60", "--out", out]);
    assert_eq!(code, 1, "{err}");
    assert!(err.contains("estimation failed"));
}

#[test]
fn config_file_and_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("run.toml");
    let out = tmp.path().join("out");
    fs::write(&cfg_path, "k = 0.8\nkicks = 15\ntargets = [3, -4]\nstrategy = \"cut\"\n").unwrap();
    let (code, stdout, _) = kickwalk(&[
        "sweep",
        "--config",
        dir_str(&cfg_path),
        "--strategy",
        "subtract",
        "--out",
        dir_str(&out),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("refocus 2/2"), "{stdout}");
    let mut rdr = csv::Reader::from_path(out.join("sweep.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["k", "n_t", "n_hat_flank", "flank_ok", "n_hat_refocus", "refocus_ok", "weight", "error"]
    );
    let targets: Vec<String> = rdr.records().map(|r| r.unwrap()[1].to_string()).collect();
    assert_eq!(targets, ["-4", "3"]);

    fs::write(&cfg_path, "k = 0.8\nbogus = 1\n").unwrap();
    let (code, _, err) = kickwalk(&["search", "--config", dir_str(&cfg_path)]);
    assert_eq!(code, 2);
    assert!(err.contains("bogus"), "{err}");
}

#[test]
fn timeseries_csv_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        target: -4,
        out: tmp.path().to_path_buf(),
        ..Default::default()
    };
    cmd_search(&cfg).unwrap();
    let record = run_search(&cfg.search_config(cfg.walk_params().unwrap()).unwrap()).unwrap();

    let mut rdr = csv::Reader::from_path(tmp.path().join("search_timeseries.csv")).unwrap();
    let mut rows = 0;
    let mut last = (0usize, i64::MIN);
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let t: usize = rec[0].parse().unwrap();
        let n: i64 = rec[1].parse().unwrap();
        let p: f64 = rec[2].parse().unwrap();
        assert!((t, n) > last || rows == 0);
        last = (t, n);
        assert_eq!(p, record.distributions[t].prob(n));
        rows += 1;
    }
    let m = cfg.walk_params().unwrap().window_halfwidth;
    assert_eq!(rows, 46 * (2 * m + 1));

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("search_summary.json")).unwrap()).unwrap();
    for key in ["params", "calibrated_k", "estimates", "weights", "events", "fidelity"] {
        assert!(summary.get(key).is_some(), "{key}");
    }
    assert_eq!(summary["estimates"]["refocus"]["n_hat"], -4);
}

#[test]
fn prepare_and_scaling_write_their_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dir_str(tmp.path());
    assert_eq!(kickwalk(&["prepare", "--restarts", "4", "--out", out]).0, 0);
    assert_eq!(kickwalk(&["scaling", "--k", "1", "--t-max", "64", "--out", out]).0, 0);
    for f in [
        "prepare.json",
        "prepare_distribution.csv",
        "prepare_distribution.svg",
        "scaling.json",
        "scaling_series.csv",
        "polya_partial_sums.csv",
        "scaling_survival.svg",
    ] {
        assert!(tmp.path().join(f).is_file(), "{f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("scaling.json")).unwrap()).unwrap();
    let slope = report["fitted_width_slope"].as_f64().unwrap();
    assert!((slope - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
}
