//! The four experiment commands. Each writes its files under `cfg.out` and
//! returns the in-memory result.

use serde::Serialize;

use super::config::{ExperimentConfig, WindowSpec};
use super::output::{fmt_f64, fmt_opt, OutputDir};
use crate::analysis::{one_shot_hitting_time, scaling_report, ScalingReport};
use crate::error::{Error, Result};
use crate::extract::{extract_flank_from, extract_refocus, success_sweep, Estimate, SweepRow};
use crate::plot::{heatmap_svg, LineChart, Scale, Series};
use crate::prep::{
    canonical_states, optimize_initial_state, Coefficients, FlatnessProblem, OptimizerSettings,
    PreparationResult,
};
use crate::search::{run_search, Event, SearchRecord, Strategy};
use crate::state::{Distribution, WalkParams};
use crate::CALIBRATED_KICK_STRENGTH;

#[derive(Debug, Clone, Serialize)]
pub struct ParamsOut {
    pub k: f64,
    pub kicks: usize,
    pub window: WindowSpec,
    pub window_halfwidth: usize,
    pub period: f64,
    pub initial: String,
    pub coefficients: Coefficients,
    pub target: Option<i64>,
    pub wcut: Option<usize>,
    pub strategy: Strategy,
    pub flat_window: usize,
    pub seed: u64,
}

fn params_out(cfg: &ExperimentConfig, params: &WalkParams, coefficients: Coefficients) -> ParamsOut {
    ParamsOut {
        k: params.kick_strength,
        kicks: params.kicks_per_leg,
        window: cfg.window,
        window_halfwidth: params.window_halfwidth,
        period: params.period,
        initial: cfg.initial_label(),
        coefficients,
        target: cfg.oracle.then_some(cfg.target),
        wcut: cfg.cut.then_some(cfg.wcut as usize),
        strategy: cfg.strategy,
        flat_window: cfg.flat_window,
        seed: cfg.seed,
    }
}

fn dist_points(dist: &Distribution) -> Vec<(f64, f64)> {
    dist.momenta()
        .zip(dist.probs())
        .map(|(n, &p)| (n as f64, p))
        .collect()
}

// ---------------------------------------------------------------- prepare

#[derive(Debug, Clone, Serialize)]
pub struct PresetCost {
    pub name: String,
    pub coefficients: Coefficients,
    pub cost: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrepareSummary {
    pub params: ParamsOut,
    pub calibrated_k: f64,
    pub optimized: bool,
    pub result: PreparationResult,
    pub presets: Vec<PresetCost>,
}

pub fn cmd_prepare(cfg: &ExperimentConfig) -> Result<PrepareSummary> {
    let params = cfg.walk_params()?;
    let problem = FlatnessProblem::new(&params, cfg.flat_window)?;
    let presets = canonical_states()
        .into_iter()
        .map(|(name, c)| {
            Ok(PresetCost {
                name: name.into(),
                cost: problem.cost(&c)?,
                coefficients: c,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let result = if cfg.optimize {
        let settings = OptimizerSettings {
            restarts: cfg.restarts,
            seed: cfg.seed,
            ..Default::default()
        };
        optimize_initial_state(&params, cfg.flat_window, &settings)?
    } else {
        let c = cfg.initial_coefficients()?;
        PreparationResult {
            cost: problem.cost(&c)?,
            coefficients: c,
            flat_window: cfg.flat_window,
            kicks: params.kicks_per_leg,
            kick_strength: params.kick_strength,
            baseline_cost: presets[0].cost,
            evaluations: 1,
            converged: true,
        }
    };

    let mut out = OutputDir::create(&cfg.out)?;
    let dist = problem.distribution(&result.coefficients);
    out.distribution_csv("prepare_distribution.csv", &dist)?;

    let mut series = vec![Series {
        label: "prepared",
        points: dist_points(&dist),
    }];
    let preset_dists: Vec<(String, Distribution)> = presets
        .iter()
        .map(|p| (format!("preset {}", p.name), problem.distribution(&p.coefficients)))
        .collect();
    for (label, d) in &preset_dists {
        series.push(Series {
            label,
            points: dist_points(d),
        });
    }
    let title = format!("P(n) after {} kicks, k = {}", params.kicks_per_leg, params.kick_strength);
    out.text(
        "prepare_distribution.svg",
        &LineChart {
            title: &title,
            x_label: "momentum n",
            y_label: "P(n)",
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            series,
        }
        .to_svg(),
    )?;

    let summary = PrepareSummary {
        params: params_out(cfg, &params, result.coefficients),
        calibrated_k: CALIBRATED_KICK_STRENGTH,
        optimized: cfg.optimize,
        result,
        presets,
    };
    out.json("prepare.json", &summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- search

/// Either an estimate or the reason it could not be made.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum EstimateReport {
    Ok(Estimate),
    Failed { error: String },
}

impl EstimateReport {
    fn from_result(r: Result<Estimate>) -> Self {
        match r {
            Ok(e) => EstimateReport::Ok(e),
            Err(e) => EstimateReport::Failed { error: e.to_string() },
        }
    }

    pub fn estimate(&self) -> Option<&Estimate> {
        match self {
            EstimateReport::Ok(e) => Some(e),
            EstimateReport::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Estimates {
    pub flank: Option<EstimateReport>,
    pub refocus: Option<EstimateReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Weights {
    /// `P(n_t, 3t̄)`.
    pub target_final: Option<f64>,
    /// `|ψ_{n_t}(t̄)|²` just before marking.
    pub target_at_mark: Option<f64>,
    pub final_mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchSummary {
    pub params: ParamsOut,
    pub calibrated_k: f64,
    pub estimates: Estimates,
    pub weights: Weights,
    pub events: Vec<Event>,
    /// `|<ψ(0)|ψ(2t̄)>|²`.
    pub fidelity: f64,
    pub hitting_time: Option<usize>,
}

impl SearchSummary {
    /// First estimation error, if any estimator was run and failed.
    pub fn failure(&self) -> Option<&str> {
        [&self.estimates.flank, &self.estimates.refocus]
            .into_iter()
            .flatten()
            .find_map(|r| match r {
                EstimateReport::Failed { error } => Some(error.as_str()),
                EstimateReport::Ok(_) => None,
            })
    }
}

pub fn summarize_search(cfg: &ExperimentConfig, record: &SearchRecord) -> Result<SearchSummary> {
    let params = &record.config.params;
    let leg = params.kicks_per_leg;
    let target = record.target();
    let estimates = match target {
        Some(_) => Estimates {
            flank: Some(EstimateReport::from_result(extract_flank_from(record))),
            refocus: record
                .config
                .cut_halfwidth
                .map(|_| EstimateReport::from_result(extract_refocus(record))),
        },
        None => Estimates {
            flank: None,
            refocus: None,
        },
    };
    let weights = Weights {
        target_final: target.map(|n| record.final_distribution().prob(n)),
        target_at_mark: target.map(|n| record.states[leg].amplitude(n).norm_sqr()),
        final_mass: record.final_distribution().total_mass(),
    };
    Ok(SearchSummary {
        params: params_out(cfg, params, record.config.initial),
        calibrated_k: CALIBRATED_KICK_STRENGTH,
        estimates,
        weights,
        events: record.events.clone(),
        fidelity: record.round_trip_fidelity(),
        hitting_time: one_shot_hitting_time(record, cfg.hitting_threshold)?,
    })
}

pub fn cmd_search(cfg: &ExperimentConfig) -> Result<SearchSummary> {
    let params = cfg.walk_params()?;
    let record = run_search(&cfg.search_config(params)?)?;
    let summary = summarize_search(cfg, &record)?;
    write_search(cfg, &record, &summary)?;
    Ok(summary)
}

fn write_search(cfg: &ExperimentConfig, record: &SearchRecord, summary: &SearchSummary) -> Result<()> {
    let mut out = OutputDir::create(&cfg.out)?;
    let leg = record.kicks_per_leg();
    let dists = &record.distributions;

    out.csv(
        "search_timeseries.csv",
        &["t", "n", "probability"],
        dists.iter().enumerate().flat_map(|(t, d)| {
            d.momenta()
                .zip(d.probs())
                .map(move |(n, &p)| [t.to_string(), n.to_string(), fmt_f64(p)])
        }),
    )?;

    let flank_input = match record.target() {
        Some(_) => Some(record.flank_input()?),
        None => None,
    };
    if let Some((d, _)) = &flank_input {
        out.distribution_csv("search_flank_input.csv", d)?;
    }
    out.json("search_summary.json", summary)?;

    let m = record.config.params.window_halfwidth as i64;
    let momenta: Vec<i64> = (-m..=m).collect();
    let rows = |range: std::ops::RangeInclusive<usize>| -> (Vec<usize>, Vec<Vec<f64>>) {
        range.map(|t| (t, dists[t].probs().to_vec())).unzip()
    };
    let (times, grid) = rows(0..=2 * leg);
    out.text(
        "search_walk.svg",
        &heatmap_svg("P(n, t): forward, mark, backward", &times, &momenta, &grid),
    )?;
    let (times, grid) = rows(2 * leg..=3 * leg);
    out.text(
        "search_refocus.svg",
        &heatmap_svg("P(n, t): refocusing after the cut", &times, &momenta, &grid),
    )?;
    if let Some((d, _)) = &flank_input {
        let title = format!("flank input at t = {} ({})", 2 * leg, record.config.strategy);
        out.text(
            "search_flank.svg",
            &LineChart {
                title: &title,
                x_label: "momentum n",
                y_label: "P(n)",
                x_scale: Scale::Linear,
                y_scale: Scale::Linear,
                series: vec![Series {
                    label: "suppressed",
                    points: dist_points(d),
                }],
            }
            .to_svg(),
        )?;
    }
    let title = format!("P(n) at t = {}", 3 * leg);
    out.text(
        "search_final.svg",
        &LineChart {
            title: &title,
            x_label: "momentum n",
            y_label: "P(n)",
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            series: vec![Series {
                label: "final",
                points: dist_points(record.final_distribution()),
            }],
        }
        .to_svg(),
    )?;
    Ok(())
}

// ---------------------------------------------------------------- sweep

pub const SWEEP_HEADER: [&str; 8] = [
    "k",
    "n_t",
    "n_hat_flank",
    "flank_ok",
    "n_hat_refocus",
    "refocus_ok",
    "weight",
    "error",
];

pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    if cfg.targets.is_empty() {
        return Err(Error::invalid("targets", "sweep needs at least one target"));
    }
    if !cfg.oracle {
        return Err(Error::invalid("oracle", "sweep needs the oracle enabled"));
    }
    let ks = if cfg.ks.is_empty() { vec![cfg.k] } else { cfg.ks.clone() };
    let mut rows = Vec::new();
    for &k in &ks {
        let params = cfg.walk_params_for(k)?;
        if let Some(&bad) = cfg
            .targets
            .iter()
            .find(|n| n.unsigned_abs() as usize > params.window_halfwidth)
        {
            return Err(Error::OutOfWindow {
                n: bad,
                halfwidth: params.window_halfwidth,
            });
        }
        rows.extend(success_sweep(&cfg.search_config(params)?, &cfg.targets));
    }
    rows.sort_by(|a, b| a.kick_strength.total_cmp(&b.kick_strength).then(a.n_t.cmp(&b.n_t)));

    let mut out = OutputDir::create(&cfg.out)?;
    out.csv(
        "sweep.csv",
        &SWEEP_HEADER,
        rows.iter().map(|r| {
            [
                fmt_f64(r.kick_strength),
                r.n_t.to_string(),
                fmt_opt(r.n_hat_flank),
                r.flank_ok.to_string(),
                fmt_opt(r.n_hat_refocus),
                r.refocus_ok.to_string(),
                fmt_f64(r.weight),
                r.error.clone().unwrap_or_default(),
            ]
        }),
    )?;

    let labels: Vec<String> = ks.iter().map(|k| format!("k = {k}")).collect();
    let series = ks
        .iter()
        .zip(&labels)
        .map(|(&k, label)| Series {
            label,
            points: rows
                .iter()
                .filter(|r| r.kick_strength == k)
                .map(|r| (r.n_t as f64, r.weight))
                .collect(),
        })
        .collect();
    out.text(
        "sweep_weights.svg",
        &LineChart {
            title: "refocused weight at the target",
            x_label: "target n_t",
            y_label: "P(n_t, 3t)",
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            series,
        }
        .to_svg(),
    )?;
    Ok(rows)
}

/// `(k, flank successes, refocus successes, rows)` per kick strength.
pub fn sweep_tally(rows: &[SweepRow]) -> Vec<(f64, usize, usize, usize)> {
    let mut tally: Vec<(f64, usize, usize, usize)> = Vec::new();
    for r in rows {
        match tally.last_mut() {
            Some(t) if t.0 == r.kick_strength => {
                t.1 += r.flank_ok as usize;
                t.2 += r.refocus_ok as usize;
                t.3 += 1;
            }
            _ => tally.push((r.kick_strength, r.flank_ok as usize, r.refocus_ok as usize, 1)),
        }
    }
    tally
}

// ---------------------------------------------------------------- scaling

pub fn cmd_scaling(cfg: &ExperimentConfig) -> Result<ScalingReport> {
    let mut report = scaling_report(cfg.k, cfg.t_max)?;
    if cfg.oracle {
        let params = cfg.walk_params()?;
        let record = run_search(&cfg.search_config(params)?)?;
        report.hitting_time = one_shot_hitting_time(&record, cfg.hitting_threshold)?;
    }

    let mut out = OutputDir::create(&cfg.out)?;
    out.json("scaling.json", &report)?;
    out.csv(
        "scaling_series.csv",
        &["t", "width", "survival", "diffusive_reference"],
        report.times.iter().map(|&t| {
            [
                t.to_string(),
                fmt_f64(report.widths[t]),
                fmt_f64(report.survival[t]),
                fmt_f64(report.diffusive_reference[t]),
            ]
        }),
    )?;
    out.csv(
        "polya_partial_sums.csv",
        &["t_max", "partial_sum"],
        report
            .polya_partial_sums
            .iter()
            .enumerate()
            .map(|(i, &s)| [(i + 1).to_string(), fmt_f64(s)]),
    )?;

    let t_points = |ys: &[f64]| -> Vec<(f64, f64)> {
        ys.iter().enumerate().map(|(t, &y)| (t as f64, y)).collect()
    };
    let mut series = vec![
        Series {
            label: "width",
            points: t_points(&report.widths),
        },
        Series {
            label: "diffusive",
            points: t_points(&report.diffusive_reference),
        },
    ];
    if let Some(slope) = report.fitted_width_slope {
        series.push(Series {
            label: "fitted ballistic",
            points: report
                .times
                .iter()
                .map(|&t| (t as f64, slope * cfg.k * t as f64))
                .collect(),
        });
    }
    out.text(
        "scaling_width.svg",
        &LineChart {
            title: "momentum width",
            x_label: "kicks t",
            y_label: "sigma(t)",
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            series,
        }
        .to_svg(),
    )?;
    out.text(
        "scaling_survival.svg",
        &LineChart {
            title: "survival probability",
            x_label: "kicks t",
            y_label: "p0(t)",
            x_scale: Scale::Log,
            y_scale: Scale::Log,
            series: vec![
                Series {
                    label: "p0",
                    points: t_points(&report.survival),
                },
                Series {
                    label: "1/t",
                    points: (1..=cfg.t_max).map(|t| (t as f64, 1.0 / t as f64)).collect(),
                },
            ],
        }
        .to_svg(),
    )?;
    out.text(
        "polya_partial_sums.svg",
        &LineChart {
            title: "partial sums of return probabilities",
            x_label: "T",
            y_label: "S(T)",
            x_scale: Scale::Log,
            y_scale: Scale::Linear,
            series: vec![Series {
                label: "S(T)",
                points: report
                    .polya_partial_sums
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| ((i + 1) as f64, s))
                    .collect(),
            }],
        }
        .to_svg(),
    )?;
    Ok(report)
}
