//! Command-line front end: `prepare`, `search`, `sweep`, `scaling`.
//!
//! Exit codes: 0 success, 1 estimation or I/O failure, 2 invalid input,
//! 3 probability leaked out of the momentum window.

pub mod commands;
pub mod config;
pub mod output;

use clap::{Parser, Subcommand};

pub use commands::{cmd_prepare, cmd_scaling, cmd_search, cmd_sweep, sweep_tally};
pub use config::{ExperimentConfig, Overrides, WindowSpec};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "kickwalk", version, about = "Kicked-rotor quantum walk search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize (or evaluate) the three-site initial state for flatness
    Prepare(Overrides),
    /// Run the marked protocol once and estimate the target
    Search(Overrides),
    /// Success of both estimators over targets and kick strengths
    Sweep(Overrides),
    /// Width, survival probability and return-probability partial sums
    Scaling(Overrides),
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Prepare(o) => {
            let cfg = ExperimentConfig::resolve(o)?;
            let s = cmd_prepare(&cfg)?;
            println!(
                "coefficients {}  cost {:.6}  (preset b {:.6})",
                s.result.coefficients, s.result.cost, s.result.baseline_cost
            );
        }
        Command::Search(o) => {
            let cfg = ExperimentConfig::resolve(o)?;
            let s = cmd_search(&cfg)?;
            let show = |r: &Option<commands::EstimateReport>| match r {
                Some(commands::EstimateReport::Ok(e)) => e.n_hat.to_string(),
                Some(commands::EstimateReport::Failed { .. }) => "failed".into(),
                None => "-".into(),
            };
            println!(
                "target {}  flank {}  refocus {}  fidelity {:.6}",
                s.params.target.map_or("-".into(), |n| n.to_string()),
                show(&s.estimates.flank),
                show(&s.estimates.refocus),
                s.fidelity
            );
            if let Some(reason) = s.failure() {
                return Err(Error::EstimationFailed {
                    reason: reason.to_string(),
                });
            }
        }
        Command::Sweep(o) => {
            let cfg = ExperimentConfig::resolve(o)?;
            let rows = cmd_sweep(&cfg)?;
            for (k, flank, refocus, n) in sweep_tally(&rows) {
                println!("k = {k}: flank {flank}/{n}, refocus {refocus}/{n}");
            }
        }
        Command::Scaling(o) => {
            let cfg = ExperimentConfig::resolve(o)?;
            let r = cmd_scaling(&cfg)?;
            let show = |x: Option<f64>| x.map_or("-".into(), |v| format!("{v:.4}"));
            println!(
                "width slope {}  survival exponent {}  hitting time {}",
                show(r.fitted_width_slope),
                show(r.fitted_survival_exponent),
                r.hitting_time.map_or("-".into(), |t| t.to_string())
            );
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
        }
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
