//! Batch planner CLI: latency-budget sweeps to CSV, single-budget plans, and
//! Monte-Carlo validation of the closed-form channel model.
//!
//! Exit codes: 0 success, 1 validation table has failing points, 2 invalid
//! input (config, flags, grid), 3 runtime failure.

use clap::{Parser, Subcommand};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use urc_offload::{
    load_config, sweep_records, validate_channel, write_records, ConfigError, CurveRecord,
    ExperimentError, GridSpec, ModeSelector, ParsedConfig, PlannerError, RecordStatus,
};

#[derive(Parser)]
#[command(
    name = "urc-offload",
    version,
    about = "Energy-optimal task offloading under latency and reliability constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the latency budget over a grid and write one CSV row per
    /// grid point and mode.
    Sweep {
        /// Scenario configuration (TOML).
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Transmission mode: td, sc, or both.
        #[arg(long, value_name = "MODE", default_value = "both")]
        mode: String,
        /// Latency grid START:STOP:STEP (inclusive) or a single VALUE.
        #[arg(long, value_name = "GRID")]
        lmax: String,
        /// Root seed for restart jitter.
        #[arg(long, value_name = "N", default_value_t = 0)]
        seed: u64,
        /// Output CSV path.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Solve a single latency budget and print the chosen plan.
    Plan {
        /// Scenario configuration (TOML).
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Transmission mode: td, sc, or both.
        #[arg(long, value_name = "MODE", default_value = "both")]
        mode: String,
        /// Latency budget in seconds; defaults to the config's latency_max.
        #[arg(long, value_name = "VALUE")]
        lmax: Option<String>,
        /// Root seed for restart jitter.
        #[arg(long, value_name = "N", default_value_t = 0)]
        seed: u64,
        /// Optional CSV output with the same columns as sweep.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Compare closed-form success probabilities against the seeded
    /// Monte-Carlo oracle and report pass/fail at three standard errors.
    ValidateChannel {
        /// Scenario configuration (TOML).
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Monte-Carlo samples per grid point (floor 10000).
        #[arg(long, value_name = "N", default_value_t = 1_000_000)]
        samples: u64,
        /// Monte-Carlo seed.
        #[arg(long, value_name = "N", default_value_t = 0)]
        seed: u64,
    },
}

enum CliError {
    Invalid(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Invalid(_) => ExitCode::from(2),
            CliError::Runtime(_) => ExitCode::from(3),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Grid { .. } | ExperimentError::TooFewSamples { .. } => {
                CliError::Invalid(e.to_string())
            }
            ExperimentError::Planner(PlannerError::Sca(_)) => CliError::Runtime(e.to_string()),
            ExperimentError::Planner(_) => CliError::Invalid(e.to_string()),
            ExperimentError::Channel(_)
            | ExperimentError::Csv(_)
            | ExperimentError::Io(_)
            | ExperimentError::Malformed { .. } => CliError::Runtime(e.to_string()),
        }
    }
}

fn parse_mode(text: &str) -> Result<ModeSelector, CliError> {
    ModeSelector::parse(text).ok_or_else(|| {
        CliError::Invalid(format!("--mode must be td, sc, or both (got {text:?})"))
    })
}

fn write_csv(path: &Path, records: &[CurveRecord], n_tasks: usize) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| {
        CliError::Runtime(format!("cannot write {}: {e}", path.display()))
    })?;
    write_records(file, records, n_tasks)?;
    Ok(())
}

fn record_summary(record: &CurveRecord) -> String {
    match record.status {
        RecordStatus::Optimal => format!(
            "l_max={:.3}  {}  optimal    E={:.6} J  latency={:.6} s  decision={}",
            record.l_max,
            record.mode.label(),
            record.energy_joules.unwrap(),
            record.latency_used.unwrap(),
            record.decision_bitstring.as_deref().unwrap(),
        ),
        RecordStatus::Infeasible => format!(
            "l_max={:.3}  {}  infeasible",
            record.l_max,
            record.mode.label()
        ),
    }
}

fn plan_block(record: &CurveRecord, targets: &[f64]) -> String {
    let mut out = String::new();
    match record.status {
        RecordStatus::Infeasible => {
            let _ = writeln!(out, "mode {}: infeasible", record.mode.label());
        }
        RecordStatus::Optimal => {
            let _ = writeln!(out, "mode {}: optimal", record.mode.label());
            let _ = writeln!(
                out,
                "  energy   {:.6} J",
                record.energy_joules.unwrap()
            );
            let _ = writeln!(
                out,
                "  latency  {:.6} s (budget {:.6} s)",
                record.latency_used.unwrap(),
                record.l_max
            );
            let decision = record.decision_bitstring.as_deref().unwrap();
            let offloaded: Vec<String> = decision
                .chars()
                .enumerate()
                .filter(|&(_, c)| c == '1')
                .map(|(i, _)| (i + 1).to_string())
                .collect();
            let detail = if offloaded.is_empty() {
                "all tasks local".to_string()
            } else {
                format!("offloaded tasks: {}", offloaded.join(", "))
            };
            let _ = writeln!(out, "  decision {decision} ({detail})");
            for (i, cols) in record.tasks.iter().enumerate() {
                if let (Some(p_ul), Some(p_dl), Some(l_ul), Some(l_dl)) =
                    (cols.p_ul, cols.p_dl, cols.l_ul, cols.l_dl)
                {
                    let _ = writeln!(
                        out,
                        "  task {}: p_ul={:.4} W  p_dl={:.4} W  l_ul={:.6} s  l_dl={:.6} s",
                        i + 1,
                        p_ul,
                        p_dl,
                        l_ul,
                        l_dl
                    );
                }
            }
            for (i, (prob, target)) in record.sl_prob.iter().zip(targets).enumerate() {
                if let Some(p) = prob {
                    let _ = writeln!(
                        out,
                        "  service level {}: achieved {:.6}, target {:.6}",
                        i + 1,
                        p,
                        target
                    );
                }
            }
        }
    }
    out
}

fn run() -> Result<ExitCode, CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep {
            config,
            mode,
            lmax,
            seed,
            out,
        } => {
            let mode = parse_mode(&mode)?;
            let grid = GridSpec::parse(&lmax)?;
            let ParsedConfig {
                scenario,
                mut planner,
            } = load_config(&config)?;
            planner.seed = seed;
            let records = sweep_records(&scenario, &grid, mode, &planner)?;
            write_csv(&out, &records, scenario.n_tasks())?;
            for record in &records {
                println!("{}", record_summary(record));
            }
            let optimal = records
                .iter()
                .filter(|r| r.status == RecordStatus::Optimal)
                .count();
            println!(
                "wrote {} rows ({} optimal, {} infeasible) to {}",
                records.len(),
                optimal,
                records.len() - optimal,
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Plan {
            config,
            mode,
            lmax,
            seed,
            out,
        } => {
            let mode = parse_mode(&mode)?;
            let ParsedConfig {
                scenario,
                mut planner,
            } = load_config(&config)?;
            planner.seed = seed;
            let budget = match lmax {
                None => scenario.params().latency_max,
                Some(text) => {
                    let grid = GridSpec::parse(&text)?;
                    if grid.len() != 1 {
                        return Err(CliError::Invalid(
                            "plan takes a single --lmax VALUE, not a grid".to_string(),
                        ));
                    }
                    grid.values()[0]
                }
            };
            let grid = GridSpec::parse(&format!("{budget}"))
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            let records = sweep_records(&scenario, &grid, mode, &planner)?;
            for record in &records {
                print!("{}", plan_block(record, scenario.reliability().targets()));
            }
            let best = records
                .iter()
                .filter_map(|r| r.energy_joules.map(|e| (e, r.mode)))
                .min_by(|a, b| a.0.total_cmp(&b.0));
            match best {
                Some((energy, mode)) => {
                    println!("preferred: {} at {:.6} J", mode.label(), energy)
                }
                None => println!("no feasible plan at budget {budget} s"),
            }
            if let Some(path) = out {
                write_csv(&path, &records, scenario.n_tasks())?;
                println!("wrote {} rows to {}", records.len(), path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ValidateChannel {
            config,
            samples,
            seed,
        } => {
            let ParsedConfig { scenario, .. } = load_config(&config)?;
            let report = validate_channel(scenario.params(), samples, seed)?;
            println!(
                "{:<44} {:>14} {:>14} {:>12} {:>7}",
                "point", "closed_form", "mc_estimate", "std_error", "result"
            );
            for row in &report.rows {
                println!(
                    "{:<44} {:>14.9} {:>14.9} {:>12.3e} {:>7}",
                    row.label,
                    row.closed_form,
                    row.estimate,
                    row.std_error,
                    if row.pass { "pass" } else { "FAIL" }
                );
            }
            let failures = report.failures();
            println!(
                "{} points, {} failures (samples={}, seed={})",
                report.rows.len(),
                failures,
                samples,
                seed
            );
            if failures > 0 {
                Ok(ExitCode::from(1))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.code()
        }
    }
}
