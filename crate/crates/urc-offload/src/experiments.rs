//! Batch experiment drivers: latency-grid parsing, sweep execution flattened
//! to CSV rows, a round-trip CSV reader, and the Monte-Carlo channel
//! validation table.
//!
//! All floating-point output is written with 12 significant digits and every
//! run is a pure function of (scenario, grid, seed), so repeated runs produce
//! byte-identical files.

use crate::channel::{
    mc_estimate_sc, mc_estimate_td, success_prob_sc, success_prob_td, ChannelError, LinkParams,
    ScLayerStack,
};
use crate::model::{Scenario, SystemParams, TransmitMode};
use crate::planner::{sweep, PlannerError, PlannerOptions, Solution, SweepPoint};
use std::io::{Read, Write};
use thiserror::Error;

pub const VALIDATION_SAMPLE_FLOOR: u64 = 10_000;

const GRID_POINT_CAP: usize = 100_000;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("grid spec {spec:?}: {reason}")]
    Grid { spec: String, reason: &'static str },
    #[error("samples = {samples} is below the floor of {floor}")]
    TooFewSamples { samples: u64, floor: u64 },
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv row {row}: {reason}")]
    Malformed { row: usize, reason: String },
}

/// Inclusive latency grid parsed from `START:STOP:STEP` or a single `VALUE`.
/// The stop endpoint is included whenever it lies within half a step of a
/// grid point, so `0.5:4.0:0.1` really ends at 4.0 despite float drift.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    values: Vec<f64>,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let spec = text.trim();
        let fail = |reason: &'static str| ExperimentError::Grid {
            spec: text.to_string(),
            reason,
        };
        if spec.is_empty() {
            return Err(fail("empty grid spec"));
        }
        let parts: Vec<&str> = spec.split(':').collect();
        let number = |s: &str| -> Result<f64, ExperimentError> {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| fail("not a number"))?;
            if !v.is_finite() {
                return Err(fail("values must be finite"));
            }
            Ok(v)
        };
        let values = match parts.as_slice() {
            [single] => vec![number(single)?],
            [start, stop, step] => {
                let start = number(start)?;
                let stop = number(stop)?;
                let step = number(step)?;
                if step <= 0.0 {
                    return Err(fail("step must be positive"));
                }
                if stop < start - 0.5 * step {
                    return Err(fail("stop lies below start"));
                }
                let count = (((stop - start) / step) + 0.5 + 1e-9).floor() as usize + 1;
                if count > GRID_POINT_CAP {
                    return Err(fail("too many grid points"));
                }
                (0..count).map(|k| snap(start + k as f64 * step, step)).collect()
            }
            _ => return Err(fail("expected VALUE or START:STOP:STEP")),
        };
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn snap(value: f64, step: f64) -> f64 {
    let rounded = (value * 1e9).round() / 1e9;
    if (rounded - value).abs() <= step * 1e-6 {
        rounded
    } else {
        value
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordStatus {
    Optimal,
    Infeasible,
}

impl RecordStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RecordStatus::Optimal => "optimal",
            RecordStatus::Infeasible => "infeasible",
        }
    }
}

/// Per-task columns of a sweep row; `None` renders as an empty CSV field and
/// marks a task that ran locally (or an infeasible row).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TaskColumns {
    pub p_ul: Option<f64>,
    pub p_dl: Option<f64>,
    pub l_ul: Option<f64>,
    pub l_dl: Option<f64>,
}

/// One CSV row of a sweep: the grid point, transmission mode, solve status,
/// energy, decision, achieved latency, per-task powers/slots, and the
/// achieved probability of every service level.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRecord {
    pub l_max: f64,
    pub mode: TransmitMode,
    pub status: RecordStatus,
    pub energy_joules: Option<f64>,
    pub decision_bitstring: Option<String>,
    pub latency_used: Option<f64>,
    pub tasks: Vec<TaskColumns>,
    pub sl_prob: Vec<Option<f64>>,
}

impl CurveRecord {
    pub fn from_solution(l_max: f64, solution: &Solution, n_tasks: usize) -> Self {
        match solution {
            Solution::Optimal {
                mode,
                decision,
                allocation,
                energy,
                report,
                ..
            } => {
                let offloaded = decision.offloaded();
                let tasks = (0..n_tasks)
                    .map(|i| match offloaded.iter().position(|&t| t == i) {
                        Some(k) => TaskColumns {
                            p_ul: Some(allocation.power_ul(k)),
                            p_dl: Some(allocation.power_dl(k)),
                            l_ul: Some(allocation.slot_ul(k)),
                            l_dl: Some(allocation.slot_dl(k)),
                        },
                        None => TaskColumns::default(),
                    })
                    .collect();
                Self {
                    l_max,
                    mode: *mode,
                    status: RecordStatus::Optimal,
                    energy_joules: Some(*energy),
                    decision_bitstring: Some(decision.bitstring()),
                    latency_used: Some(report.latency),
                    tasks,
                    sl_prob: report.sl_prob.iter().map(|&p| Some(p)).collect(),
                }
            }
            Solution::Infeasible { mode } => Self {
                l_max,
                mode: *mode,
                status: RecordStatus::Infeasible,
                energy_joules: None,
                decision_bitstring: None,
                latency_used: None,
                tasks: vec![TaskColumns::default(); n_tasks],
                sl_prob: vec![None; n_tasks],
            },
        }
    }

    pub fn n_tasks(&self) -> usize {
        self.tasks.len()
    }
}

/// 12 significant digits, scientific notation.
pub fn fmt_sig(value: f64) -> String {
    format!("{value:.11e}")
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(fmt_sig).unwrap_or_default()
}

pub fn csv_header(n_tasks: usize) -> Vec<String> {
    let mut cols = vec![
        "l_max".to_string(),
        "mode".to_string(),
        "status".to_string(),
        "energy_joules".to_string(),
        "decision_bitstring".to_string(),
        "latency_used".to_string(),
    ];
    for i in 1..=n_tasks {
        cols.push(format!("p_ul_{i}"));
        cols.push(format!("p_dl_{i}"));
        cols.push(format!("l_ul_{i}"));
        cols.push(format!("l_dl_{i}"));
    }
    for i in 1..=n_tasks {
        cols.push(format!("sl_prob_{i}"));
    }
    cols
}

pub fn write_records<W: Write>(
    sink: W,
    records: &[CurveRecord],
    n_tasks: usize,
) -> Result<(), ExperimentError> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(csv_header(n_tasks))?;
    for (row, record) in records.iter().enumerate() {
        if record.tasks.len() != n_tasks || record.sl_prob.len() != n_tasks {
            return Err(ExperimentError::Malformed {
                row: row + 2,
                reason: format!(
                    "record has {} task columns, file has {}",
                    record.tasks.len(),
                    n_tasks
                ),
            });
        }
        let mut fields = vec![
            fmt_sig(record.l_max),
            record.mode.label().to_string(),
            record.status.label().to_string(),
            fmt_opt(record.energy_joules),
            record.decision_bitstring.clone().unwrap_or_default(),
            fmt_opt(record.latency_used),
        ];
        for task in &record.tasks {
            fields.push(fmt_opt(task.p_ul));
            fields.push(fmt_opt(task.p_dl));
            fields.push(fmt_opt(task.l_ul));
            fields.push(fmt_opt(task.l_dl));
        }
        for &p in &record.sl_prob {
            fields.push(fmt_opt(p));
        }
        writer.write_record(fields)?;
    }
    writer.flush()?;
    Ok(())
}

fn parse_opt(field: &str, row: usize) -> Result<Option<f64>, ExperimentError> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse::<f64>()
        .map(Some)
        .map_err(|_| ExperimentError::Malformed {
            row,
            reason: format!("bad float {field:?}"),
        })
}

pub fn read_records<R: Read>(source: R) -> Result<Vec<CurveRecord>, ExperimentError> {
    let mut reader = csv::Reader::from_reader(source);
    let header_len = reader.headers()?.len();
    if header_len < 11 || (header_len - 6) % 5 != 0 {
        return Err(ExperimentError::Malformed {
            row: 1,
            reason: format!("header has {header_len} columns; expected 6 + 5 per task"),
        });
    }
    let n_tasks = (header_len - 6) / 5;
    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row?;
        let line = idx + 2;
        if row.len() != header_len {
            return Err(ExperimentError::Malformed {
                row: line,
                reason: format!("row has {} fields, header has {header_len}", row.len()),
            });
        }
        let mode = match &row[1] {
            "td" => TransmitMode::Td,
            "sc" => TransmitMode::Sc,
            other => {
                return Err(ExperimentError::Malformed {
                    row: line,
                    reason: format!("unknown mode {other:?}"),
                })
            }
        };
        let status = match &row[2] {
            "optimal" => RecordStatus::Optimal,
            "infeasible" => RecordStatus::Infeasible,
            other => {
                return Err(ExperimentError::Malformed {
                    row: line,
                    reason: format!("unknown status {other:?}"),
                })
            }
        };
        let l_max = parse_opt(&row[0], line)?.ok_or_else(|| ExperimentError::Malformed {
            row: line,
            reason: "missing l_max".to_string(),
        })?;
        let decision = if row[4].is_empty() {
            None
        } else {
            Some(row[4].to_string())
        };
        let mut tasks = Vec::with_capacity(n_tasks);
        for i in 0..n_tasks {
            let base = 6 + 4 * i;
            tasks.push(TaskColumns {
                p_ul: parse_opt(&row[base], line)?,
                p_dl: parse_opt(&row[base + 1], line)?,
                l_ul: parse_opt(&row[base + 2], line)?,
                l_dl: parse_opt(&row[base + 3], line)?,
            });
        }
        let mut sl_prob = Vec::with_capacity(n_tasks);
        for i in 0..n_tasks {
            sl_prob.push(parse_opt(&row[6 + 4 * n_tasks + i], line)?);
        }
        records.push(CurveRecord {
            l_max,
            mode,
            status,
            energy_joules: parse_opt(&row[3], line)?,
            decision_bitstring: decision,
            latency_used: parse_opt(&row[5], line)?,
            tasks,
            sl_prob,
        });
    }
    Ok(records)
}

/// Which transmission modes a sweep covers; `Both` emits a TD row then an SC
/// row at every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSelector {
    Td,
    Sc,
    Both,
}

impl ModeSelector {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "td" => Some(ModeSelector::Td),
            "sc" => Some(ModeSelector::Sc),
            "both" => Some(ModeSelector::Both),
            _ => None,
        }
    }
}

/// Runs the sweep for the selected mode(s) and flattens the outcome to CSV
/// rows ordered by grid point, then mode.
pub fn sweep_records(
    scenario: &Scenario,
    grid: &GridSpec,
    modes: ModeSelector,
    options: &PlannerOptions,
) -> Result<Vec<CurveRecord>, ExperimentError> {
    let n = scenario.n_tasks();
    let flatten = |points: Vec<SweepPoint>| -> Vec<CurveRecord> {
        points
            .iter()
            .map(|p| CurveRecord::from_solution(p.l_max, &p.solution, n))
            .collect()
    };
    match modes {
        ModeSelector::Td => Ok(flatten(sweep(
            scenario,
            TransmitMode::Td,
            grid.values(),
            options,
        )?)),
        ModeSelector::Sc => Ok(flatten(sweep(
            scenario,
            TransmitMode::Sc,
            grid.values(),
            options,
        )?)),
        ModeSelector::Both => {
            let td = sweep(scenario, TransmitMode::Td, grid.values(), options)?;
            let sc = sweep(scenario, TransmitMode::Sc, grid.values(), options)?;
            let mut records = Vec::with_capacity(2 * td.len());
            for (t, s) in td.iter().zip(sc.iter()) {
                records.push(CurveRecord::from_solution(t.l_max, &t.solution, n));
                records.push(CurveRecord::from_solution(s.l_max, &s.solution, n));
            }
            Ok(records)
        }
    }
}

/// One line of the channel validation table.
#[derive(Debug, Clone)]
pub struct ValidationRow {
    pub label: String,
    pub closed_form: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ChannelValidation {
    pub rows: Vec<ValidationRow>,
    pub samples: u64,
    pub seed: u64,
}

impl ChannelValidation {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }
}

fn validation_row(label: String, closed: f64, estimate: f64, samples: u64) -> ValidationRow {
    let std_error = (closed * (1.0 - closed) / samples as f64).sqrt();
    let pass = (closed - estimate).abs() <= 3.0 * std_error;
    ValidationRow {
        label,
        closed_form: closed,
        estimate,
        std_error,
        pass,
    }
}

const VALIDATION_DIVERSITY: [u32; 3] = [1, 2, 3];
const VALIDATION_SNR_POWER: [f64; 3] = [0.5, 1.0, 2.0];
const VALIDATION_LOAD: [f64; 3] = [0.07, 0.14, 0.28];

/// Every row gets its own substream, keyed by its label, so the rows are
/// statistically independent and a row keeps its draws even if the grid
/// gains or reorders entries.  A shared stream would repeat one fluctuation
/// across all rows with similar thresholds.
fn row_seed(seed: u64, label: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325_u64;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    seed ^ h
}

/// Checks every closed-form success probability against the seeded
/// Monte-Carlo oracle on a built-in grid of diversity orders, received-SNR
/// levels, and spectral loads, crossed with the scenario's uplink (and, when
/// different, downlink) channel parameters.  Point-to-point and two- and
/// three-layer superposition stacks are covered, plus one saturated stack
/// whose first layer cannot be decoded at any fading gain.
pub fn validate_channel(
    params: &SystemParams,
    samples: u64,
    seed: u64,
) -> Result<ChannelValidation, ExperimentError> {
    if samples < VALIDATION_SAMPLE_FLOOR {
        return Err(ExperimentError::TooFewSamples {
            samples,
            floor: VALIDATION_SAMPLE_FLOOR,
        });
    }
    let mut links = vec![("ul", params.snr_ul, params.bw_ul)];
    if (params.snr_dl, params.bw_dl) != (params.snr_ul, params.bw_ul) {
        links.push(("dl", params.snr_dl, params.bw_dl));
    }
    let slot = 1.0;
    let mut rows = Vec::new();
    for &(name, snr, bw) in &links {
        for &d in &VALIDATION_DIVERSITY {
            for &m in &VALIDATION_SNR_POWER {
                for &load in &VALIDATION_LOAD {
                    let bits = load * slot * bw;
                    let power = m / snr;
                    let link = LinkParams::new(bits, slot, bw, snr, d)?;
                    let closed = success_prob_td(&link, power);
                    let label = format!("{name} td d={d} snr_p={m} load={load}");
                    let est = mc_estimate_td(&link, power, samples, row_seed(seed, &label));
                    rows.push(validation_row(label, closed, est.estimate, samples));
                    for (tag, weights) in [
                        ("sc2", &[3.0, 1.0][..]),
                        ("sc3", &[9.0, 3.0, 1.0][..]),
                    ] {
                        let powers: Vec<f64> = weights.iter().map(|w| w * power).collect();
                        let layer_bits = vec![bits; weights.len()];
                        let stack =
                            ScLayerStack::new(layer_bits, powers, slot, bw, snr, d)?;
                        for layer in 0..weights.len() {
                            let closed = success_prob_sc(&stack, layer)?;
                            let label = format!(
                                "{name} {tag} layer={layer} d={d} snr_p={m} load={load}"
                            );
                            let est =
                                mc_estimate_sc(&stack, layer, samples, row_seed(seed, &label))?;
                            rows.push(validation_row(label, closed, est.estimate, samples));
                        }
                    }
                }
            }
        }
    }
    let (name, snr, bw) = links[0];
    let bits = 1.5 * slot * bw;
    let stack = ScLayerStack::new(
        vec![bits; 2],
        vec![1.0 / snr; 2],
        slot,
        bw,
        snr,
        2,
    )?;
    let closed = success_prob_sc(&stack, 0)?;
    let label = format!("{name} sc2 saturated layer=0 d=2 snr_p=1 load=1.5");
    let est = mc_estimate_sc(&stack, 0, samples, row_seed(seed, &label))?;
    rows.push(validation_row(label, closed, est.estimate, samples));
    Ok(ChannelValidation {
        rows,
        samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CallGraph, Decision, ScSlotAccounting, SystemParams, TaskSpec};
    use crate::planner::plan;

    fn reference_params() -> SystemParams {
        SystemParams {
            f_mobile: 1e9,
            f_cloud: 1e10,
            p_mobile_compute: 0.4,
            bw_ul: 1e6,
            bw_dl: 1e6,
            snr_ul: 1.0,
            snr_dl: 1.0,
            diversity: 2,
            p_max_dl: 100.0,
            latency_max: 2.0,
            sc_slot_accounting: ScSlotAccounting::SharedOnce,
        }
    }

    fn single_task_scenario() -> Scenario {
        let graph = CallGraph::new(vec![TaskSpec::new(2e9, 1.4e5, 1.4e5)]).unwrap();
        Scenario::new(graph, &[0.99], reference_params()).unwrap()
    }

    #[test]
    fn grid_parse_inclusive_endpoints() {
        let grid = GridSpec::parse("0.5:4.0:0.1").unwrap();
        assert_eq!(grid.len(), 36);
        assert_eq!(grid.values()[0], 0.5);
        assert_eq!(grid.values()[35], 4.0);
        assert_eq!(grid.values()[7], 1.2);
    }

    #[test]
    fn grid_parse_single_value() {
        let grid = GridSpec::parse("1.5").unwrap();
        assert_eq!(grid.values(), &[1.5]);
    }

    #[test]
    fn grid_parse_half_step_tolerance() {
        let grid = GridSpec::parse("1.0:1.96:0.5").unwrap();
        assert_eq!(grid.values(), &[1.0, 1.5, 2.0]);
        let grid = GridSpec::parse("1.0:1.7:0.5").unwrap();
        assert_eq!(grid.values(), &[1.0, 1.5]);
    }

    #[test]
    fn grid_parse_rejects_junk() {
        assert!(GridSpec::parse("").is_err());
        assert!(GridSpec::parse("  ").is_err());
        assert!(GridSpec::parse("a:b:c").is_err());
        assert!(GridSpec::parse("1:2").is_err());
        assert!(GridSpec::parse("1:2:0").is_err());
        assert!(GridSpec::parse("1:2:-0.5").is_err());
        assert!(GridSpec::parse("3:1:0.5").is_err());
        assert!(GridSpec::parse("nan").is_err());
    }

    #[test]
    fn grid_values_are_snapped() {
        let grid = GridSpec::parse("0.5:4.5:0.1").unwrap();
        for v in grid.values() {
            assert_eq!(*v, (v * 1e9).round() / 1e9);
        }
    }

    #[test]
    fn csv_round_trip_preserves_records() {
        let scenario = single_task_scenario();
        let grid = GridSpec::parse("1.0:2.0:0.5").unwrap();
        let records = sweep_records(
            &scenario,
            &grid,
            ModeSelector::Both,
            &PlannerOptions::default(),
        )
        .unwrap();
        assert_eq!(records.len(), 6);
        let mut buf = Vec::new();
        write_records(&mut buf, &records, 1).unwrap();
        let parsed = read_records(buf.as_slice()).unwrap();
        assert_eq!(parsed.len(), records.len());
        for (orig, round) in records.iter().zip(parsed.iter()) {
            assert_eq!(orig.mode, round.mode);
            assert_eq!(orig.status, round.status);
            assert_eq!(orig.decision_bitstring, round.decision_bitstring);
            if let (Some(a), Some(b)) = (orig.energy_joules, round.energy_joules) {
                assert!((a - b).abs() <= 1e-11 * a.abs());
            }
        }
    }

    #[test]
    fn csv_bytes_are_deterministic() {
        let scenario = single_task_scenario();
        let grid = GridSpec::parse("1.5").unwrap();
        let opts = PlannerOptions::default();
        let mut first = Vec::new();
        let mut second = Vec::new();
        let records = sweep_records(&scenario, &grid, ModeSelector::Both, &opts).unwrap();
        write_records(&mut first, &records, 1).unwrap();
        let records = sweep_records(&scenario, &grid, ModeSelector::Both, &opts).unwrap();
        write_records(&mut second, &records, 1).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn infeasible_rows_have_empty_fields() {
        let scenario = single_task_scenario().with_latency_max(0.05);
        let sol = plan(
            &scenario,
            TransmitMode::Td,
            &PlannerOptions::default(),
        )
        .unwrap();
        let record = CurveRecord::from_solution(0.05, &sol, 1);
        assert_eq!(record.status, RecordStatus::Infeasible);
        assert_eq!(record.energy_joules, None);
        assert_eq!(record.tasks[0], TaskColumns::default());
        let mut buf = Vec::new();
        write_records(&mut buf, &[record], 1).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().nth(1).unwrap().contains("infeasible,,,"));
        let parsed = read_records(buf.as_slice()).unwrap();
        assert_eq!(parsed[0].status, RecordStatus::Infeasible);
        assert_eq!(parsed[0].sl_prob, vec![None]);
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(1.3739934260976487), "1.37399342610e0");
        assert_eq!(fmt_sig(0.04574299046678936), "4.57429904668e-2");
    }

    #[test]
    fn offloaded_solution_fills_task_columns() {
        let scenario = single_task_scenario().with_latency_max(1.5);
        let sol = plan(
            &scenario,
            TransmitMode::Td,
            &PlannerOptions::default(),
        )
        .unwrap();
        let record = CurveRecord::from_solution(1.5, &sol, 1);
        assert_eq!(record.status, RecordStatus::Optimal);
        assert_eq!(record.decision_bitstring.as_deref(), Some("1"));
        let cols = &record.tasks[0];
        assert!(cols.p_ul.unwrap() > 0.0);
        assert!(cols.p_dl.unwrap() > 0.0);
        assert!(cols.l_ul.unwrap() > 0.0);
        assert!(cols.l_dl.unwrap() > 0.0);
        assert!(record.sl_prob[0].unwrap() >= 0.99);
    }

    #[test]
    fn validation_refuses_tiny_sample_counts() {
        let err = validate_channel(&reference_params(), 1_000, 0).unwrap_err();
        assert!(matches!(err, ExperimentError::TooFewSamples { .. }));
    }

    #[test]
    fn validation_matches_oracle_at_moderate_samples() {
        let report = validate_channel(&reference_params(), 20_000, 0).unwrap();
        assert_eq!(report.rows.len(), 163);
        let failing = report.failures();
        assert!(
            failing <= 5,
            "{failing} of {} rows beyond 3 standard errors",
            report.rows.len()
        );
        let saturated = report.rows.last().unwrap();
        assert_eq!(saturated.closed_form, 0.0);
        assert_eq!(saturated.estimate, 0.0);
        assert!(saturated.pass);
    }

    #[test]
    fn validation_emits_distinct_downlink_rows_when_parameters_differ() {
        let mut params = reference_params();
        params.snr_dl = 2.0;
        let report = validate_channel(&params, VALIDATION_SAMPLE_FLOOR, 0).unwrap();
        assert_eq!(report.rows.len(), 2 * 162 + 1);
        assert!(report.rows.iter().any(|r| r.label.starts_with("dl ")));
    }

    #[test]
    fn mode_selector_parses() {
        assert_eq!(ModeSelector::parse("td"), Some(ModeSelector::Td));
        assert_eq!(ModeSelector::parse("sc"), Some(ModeSelector::Sc));
        assert_eq!(ModeSelector::parse("both"), Some(ModeSelector::Both));
        assert_eq!(ModeSelector::parse("TD"), None);
    }

    #[test]
    fn sweep_records_order_is_grid_point_then_mode() {
        let scenario = single_task_scenario();
        let grid = GridSpec::parse("1.0:1.5:0.5").unwrap();
        let records = sweep_records(
            &scenario,
            &grid,
            ModeSelector::Both,
            &PlannerOptions::default(),
        )
        .unwrap();
        let shape: Vec<(f64, TransmitMode)> =
            records.iter().map(|r| (r.l_max, r.mode)).collect();
        assert_eq!(
            shape,
            vec![
                (1.0, TransmitMode::Td),
                (1.0, TransmitMode::Sc),
                (1.5, TransmitMode::Td),
                (1.5, TransmitMode::Sc),
            ]
        );
    }

    #[test]
    fn decision_round_trip_matches_evaluate() {
        let graph = CallGraph::new(vec![
            TaskSpec::new(2e9, 1.4e5, 1.4e5),
            TaskSpec::new(1.6e9, 2.8e5, 2.8e5),
        ])
        .unwrap();
        let scenario = Scenario::new(graph, &[0.99, 0.891], reference_params()).unwrap();
        let sol = plan(
            &scenario.with_latency_max(2.5),
            TransmitMode::Td,
            &PlannerOptions::default(),
        )
        .unwrap();
        let record = CurveRecord::from_solution(2.5, &sol, 2);
        let bits = record.decision_bitstring.as_deref().unwrap();
        let flags: Vec<bool> = bits.chars().map(|c| c == '1').collect();
        let decision = Decision::new(flags);
        assert_eq!(decision.bitstring(), bits);
    }
}
