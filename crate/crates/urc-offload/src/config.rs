//! Scenario configuration: a TOML document with the task list, the
//! per-service-level reliability targets, the platform/channel parameters,
//! and optional solver overrides.
//!
//! SNRs are written in dB (`snr_ul_db`, `snr_dl_db`) and converted to linear
//! once at parse time; every other field is in base SI units.

use crate::model::{CallGraph, ModelError, ScSlotAccounting, Scenario, SystemParams, TaskSpec};
use crate::planner::PlannerOptions;
use serde::Deserialize;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error(transparent)]
    Invalid(#[from] ModelError),
    #[error("system.sc_slot_accounting must be \"shared-once\" or \"per-task\" (got {value:?})")]
    BadSlotAccounting { value: String },
    #[error("solver.{field} must be positive and finite (got {value})")]
    BadSolverField { field: &'static str, value: f64 },
    #[error("solver.restarts must be at least 1")]
    BadRestarts,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    reliability: Vec<f64>,
    tasks: Vec<RawTask>,
    system: RawSystem,
    #[serde(default)]
    solver: Option<RawSolver>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    cycles: f64,
    bits_in: f64,
    bits_out: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    f_mobile: f64,
    f_cloud: f64,
    p_mobile_compute: f64,
    bw_ul: f64,
    bw_dl: f64,
    snr_ul_db: f64,
    snr_dl_db: f64,
    diversity: u32,
    p_max_dl: f64,
    latency_max: f64,
    #[serde(default)]
    sc_slot_accounting: Option<String>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    lambda0: Option<f64>,
    epsilon: Option<f64>,
    tau_slot: Option<f64>,
    tau_power: Option<f64>,
    max_outer_iterations: Option<usize>,
    iterate_tolerance: Option<f64>,
    energy_tolerance: Option<f64>,
    restarts: Option<usize>,
    kernel_tolerance: Option<f64>,
    kernel_max_iterations: Option<usize>,
}

/// A parsed configuration: the validated scenario plus planner options with
/// any solver overrides applied.  The planner seed is left at its default;
/// the command line owns it.
#[derive(Debug, Clone)]
pub struct ParsedConfig {
    pub scenario: Scenario,
    pub planner: PlannerOptions,
}

pub fn db_to_linear(db: f64) -> f64 {
    10.0_f64.powf(db / 10.0)
}

fn positive(field: &'static str, value: f64) -> Result<f64, ConfigError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(ConfigError::BadSolverField { field, value });
    }
    Ok(value)
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ParsedConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;
    let tasks: Vec<TaskSpec> = raw
        .tasks
        .iter()
        .map(|t| TaskSpec::new(t.cycles, t.bits_in, t.bits_out))
        .collect();
    let graph = CallGraph::new(tasks)?;
    let sys = &raw.system;
    let sc_slot_accounting = match sys.sc_slot_accounting.as_deref() {
        None | Some("shared-once") => ScSlotAccounting::SharedOnce,
        Some("per-task") => ScSlotAccounting::PerTask,
        Some(other) => {
            return Err(ConfigError::BadSlotAccounting {
                value: other.to_string(),
            })
        }
    };
    let params = SystemParams {
        f_mobile: sys.f_mobile,
        f_cloud: sys.f_cloud,
        p_mobile_compute: sys.p_mobile_compute,
        bw_ul: sys.bw_ul,
        bw_dl: sys.bw_dl,
        snr_ul: db_to_linear(sys.snr_ul_db),
        snr_dl: db_to_linear(sys.snr_dl_db),
        diversity: sys.diversity,
        p_max_dl: sys.p_max_dl,
        latency_max: sys.latency_max,
        sc_slot_accounting,
    };
    let scenario = Scenario::new(graph, &raw.reliability, params)?;

    let mut planner = PlannerOptions::default();
    if let Some(solver) = raw.solver {
        if let Some(v) = solver.lambda0 {
            planner.sca.lambda0 = positive("lambda0", v)?;
        }
        if let Some(v) = solver.epsilon {
            planner.sca.epsilon = positive("epsilon", v)?;
        }
        if let Some(v) = solver.tau_slot {
            planner.sca.tau_slot = positive("tau_slot", v)?;
        }
        if let Some(v) = solver.tau_power {
            planner.sca.tau_power = positive("tau_power", v)?;
        }
        if let Some(v) = solver.max_outer_iterations {
            planner.sca.max_outer_iterations = v;
        }
        if let Some(v) = solver.iterate_tolerance {
            planner.sca.iterate_tolerance = positive("iterate_tolerance", v)?;
        }
        if let Some(v) = solver.energy_tolerance {
            planner.sca.energy_tolerance = positive("energy_tolerance", v)?;
        }
        if let Some(v) = solver.restarts {
            if v == 0 {
                return Err(ConfigError::BadRestarts);
            }
            planner.restarts = v;
        }
        if let Some(v) = solver.kernel_tolerance {
            planner.sca.kernel.tolerance = positive("kernel_tolerance", v)?;
        }
        if let Some(v) = solver.kernel_max_iterations {
            planner.sca.kernel.max_iterations = v;
        }
    }
    Ok(ParsedConfig { scenario, planner })
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<ParsedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE: &str = r#"
reliability = [0.99]

[[tasks]]
cycles = 2.0e9
bits_in = 1.4e5
bits_out = 1.4e5

[system]
f_mobile = 1.0e9
f_cloud = 1.0e10
p_mobile_compute = 0.4
bw_ul = 1.0e6
bw_dl = 1.0e6
snr_ul_db = 0.0
snr_dl_db = 0.0
diversity = 2
p_max_dl = 100.0
latency_max = 2.0
"#;

    #[test]
    fn single_task_reference_config_parses() {
        let parsed = parse_config(SINGLE).unwrap();
        let s = parsed.scenario;
        assert_eq!(s.n_tasks(), 1);
        assert_eq!(s.params().snr_ul, 1.0);
        assert_eq!(s.params().snr_dl, 1.0);
        assert_eq!(s.params().p_mobile_compute, 0.4);
        assert_eq!(s.graph().tasks()[0].cycles, 2.0e9);
        assert_eq!(parsed.planner.restarts, 3);
    }

    #[test]
    fn db_conversion_round_numbers() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((db_to_linear(3.0) - 1.9952623149688795).abs() < 1e-12);
        assert!((db_to_linear(-3.0) - 0.5011872336272722).abs() < 1e-12);
    }

    #[test]
    fn non_monotone_reliability_names_the_entry() {
        let text = SINGLE.replace("reliability = [0.99]", "reliability = [0.9, 0.95]");
        let text = text.replace(
            "[system]",
            "[[tasks]]\ncycles = 1.0e9\nbits_in = 1.0e5\nbits_out = 1.0e5\n\n[system]",
        );
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("reliability[2]"), "{err}");
    }

    #[test]
    fn missing_field_is_a_syntax_error() {
        let text = SINGLE.replace("f_cloud = 1.0e10\n", "");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, ConfigError::Syntax(_)));
        assert!(err.to_string().contains("f_cloud"), "{err}");
    }

    #[test]
    fn unknown_field_is_rejected() {
        let text = SINGLE.replace("latency_max = 2.0", "latency_max = 2.0\nbogus = 1");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn nonpositive_system_value_names_the_field() {
        let text = SINGLE.replace("bw_ul = 1.0e6", "bw_ul = 0.0");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("bw_ul"), "{err}");
    }

    #[test]
    fn solver_overrides_apply() {
        let text = format!(
            "{SINGLE}\n[solver]\nrestarts = 5\nepsilon = 0.05\nkernel_tolerance = 1e-6\n"
        );
        let parsed = parse_config(&text).unwrap();
        assert_eq!(parsed.planner.restarts, 5);
        assert_eq!(parsed.planner.sca.epsilon, 0.05);
        assert_eq!(parsed.planner.sca.kernel.tolerance, 1e-6);
    }

    #[test]
    fn slot_accounting_variants() {
        let shared = parse_config(SINGLE).unwrap();
        assert_eq!(
            shared.scenario.params().sc_slot_accounting,
            ScSlotAccounting::SharedOnce
        );
        let text = SINGLE.replace(
            "latency_max = 2.0",
            "latency_max = 2.0\nsc_slot_accounting = \"per-task\"",
        );
        let per_task = parse_config(&text).unwrap();
        assert_eq!(
            per_task.scenario.params().sc_slot_accounting,
            ScSlotAccounting::PerTask
        );
        let bad = SINGLE.replace(
            "latency_max = 2.0",
            "latency_max = 2.0\nsc_slot_accounting = \"sometimes\"",
        );
        assert!(matches!(
            parse_config(&bad).unwrap_err(),
            ConfigError::BadSlotAccounting { .. }
        ));
    }

    #[test]
    fn zero_restarts_rejected() {
        let text = format!("{SINGLE}\n[solver]\nrestarts = 0\n");
        assert!(matches!(
            parse_config(&text).unwrap_err(),
            ConfigError::BadRestarts
        ));
    }
}
