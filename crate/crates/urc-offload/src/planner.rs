//! Offload planning: exhaustive search over the binary decision vector with
//! the continuous resources optimized per decision.
//!
//! Decisions are enumerated by ascending offload count, then ascending mask
//! with task 1 in the lowest bit, and the fold keeps the first strictly
//! better energy, so ties resolve to fewer offloaded tasks and then to
//! offloading earlier tasks.  Every solve is seeded deterministically from
//! the root seed, the sweep position, the decision mask, and the restart
//! index.

use crate::channel::mix64;
use crate::model::{Allocation, Decision, EvalReport, Scenario, TransmitMode};
use crate::sca::{sca_solve, ScaError, ScaOptions, SolveOutcome};
use thiserror::Error;

/// Cap on exhaustive enumeration; `2^20` decisions is already a deliberate
/// upper limit for a planner that solves a convex program per decision.
pub const MAX_ENUMERATED_TASKS: usize = 20;

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error(transparent)]
    Sca(#[from] ScaError),
    #[error("exhaustive planning supports at most {MAX_ENUMERATED_TASKS} tasks (got {n})")]
    TooManyTasks { n: usize },
    #[error("latency grid must not be empty")]
    EmptyGrid,
    #[error("latency grid value must be positive and finite (got {value})")]
    InvalidGridValue { value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerOptions {
    pub sca: ScaOptions,
    /// Solves per decision: one canonical start plus `restarts - 1` jittered
    /// ones.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        Self {
            sca: ScaOptions::default(),
            restarts: 3,
            seed: 0,
        }
    }
}

/// Best plan for one latency budget and mode.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Solution {
    Optimal {
        mode: TransmitMode,
        decision: Decision,
        allocation: Allocation,
        energy: f64,
        report: EvalReport,
        energy_trace: Vec<f64>,
    },
    Infeasible {
        mode: TransmitMode,
    },
}

impl Solution {
    pub fn mode(&self) -> TransmitMode {
        match self {
            Solution::Optimal { mode, .. } | Solution::Infeasible { mode } => *mode,
        }
    }

    pub fn energy(&self) -> Option<f64> {
        match self {
            Solution::Optimal { energy, .. } => Some(*energy),
            Solution::Infeasible { .. } => None,
        }
    }

    pub fn decision(&self) -> Option<&Decision> {
        match self {
            Solution::Optimal { decision, .. } => Some(decision),
            Solution::Infeasible { .. } => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Solution::Optimal { .. })
    }
}

/// All decisions for `n` tasks ordered by (offload count, mask).
pub(crate) fn enumerate_decisions(n: usize) -> Vec<Decision> {
    let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks.into_iter().map(|m| Decision::from_mask(m, n)).collect()
}

fn restart_seed(root: u64, grid_idx: u64, mask: u32, restart: usize) -> u64 {
    mix64(root ^ mix64(grid_idx) ^ mix64(mask as u64) ^ mix64(restart as u64))
}

fn plan_at(
    scenario: &Scenario,
    mode: TransmitMode,
    options: &PlannerOptions,
    grid_idx: u64,
) -> Result<Solution, PlannerError> {
    let n = scenario.n_tasks();
    if n > MAX_ENUMERATED_TASKS {
        return Err(PlannerError::TooManyTasks { n });
    }
    let restarts = options.restarts.max(1);
    let mut best: Option<(f64, Decision, crate::sca::ScaOutcome)> = None;
    for decision in enumerate_decisions(n) {
        let tries = if decision.n_offloaded() == 0 { 1 } else { restarts };
        for restart in 0..tries {
            let jitter = if restart == 0 {
                None
            } else {
                Some(restart_seed(options.seed, grid_idx, decision.mask(), restart))
            };
            match sca_solve(scenario, &decision, mode, &options.sca, jitter)? {
                SolveOutcome::Infeasible => {}
                SolveOutcome::Solved(outcome) => {
                    let better = match &best {
                        None => true,
                        Some((e, _, _)) => outcome.energy < *e,
                    };
                    if better {
                        best = Some((outcome.energy, decision.clone(), outcome));
                    }
                }
            }
        }
    }
    Ok(match best {
        None => Solution::Infeasible { mode },
        Some((energy, decision, outcome)) => Solution::Optimal {
            mode,
            decision,
            allocation: outcome.allocation,
            energy,
            report: outcome.report,
            energy_trace: outcome.energy_trace,
        },
    })
}

/// Optimal decision and allocation for the scenario's latency budget.
pub fn plan(
    scenario: &Scenario,
    mode: TransmitMode,
    options: &PlannerOptions,
) -> Result<Solution, PlannerError> {
    plan_at(scenario, mode, options, 0)
}

/// Both transmission modes on the same scenario.
pub fn compare_modes(
    scenario: &Scenario,
    options: &PlannerOptions,
) -> Result<(Solution, Solution), PlannerError> {
    Ok((
        plan(scenario, TransmitMode::Td, options)?,
        plan(scenario, TransmitMode::Sc, options)?,
    ))
}

/// One sweep position: the latency budget and the best plan under it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub l_max: f64,
    pub solution: Solution,
}

/// Plans across a grid of latency budgets.
pub fn sweep(
    scenario: &Scenario,
    mode: TransmitMode,
    grid: &[f64],
    options: &PlannerOptions,
) -> Result<Vec<SweepPoint>, PlannerError> {
    if grid.is_empty() {
        return Err(PlannerError::EmptyGrid);
    }
    for &v in grid {
        if !v.is_finite() || v <= 0.0 {
            return Err(PlannerError::InvalidGridValue { value: v });
        }
    }
    let mut points = Vec::with_capacity(grid.len());
    for (idx, &l_max) in grid.iter().enumerate() {
        let local = scenario.with_latency_max(l_max);
        let solution = plan_at(&local, mode, options, idx as u64)?;
        points.push(SweepPoint { l_max, solution });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CallGraph, ScSlotAccounting, SystemParams, TaskSpec};

    fn params(latency_max: f64) -> SystemParams {
        SystemParams {
            f_mobile: 1.0e9,
            f_cloud: 1.0e10,
            p_mobile_compute: 0.4,
            bw_ul: 1.0e6,
            bw_dl: 1.0e6,
            snr_ul: 1.0,
            snr_dl: 1.0,
            diversity: 2,
            p_max_dl: 100.0,
            latency_max,
            sc_slot_accounting: ScSlotAccounting::default(),
        }
    }

    fn two_task(latency_max: f64) -> Scenario {
        let graph = CallGraph::new(vec![
            TaskSpec::new(2.0e9, 1.4e5, 1.4e5),
            TaskSpec::new(1.6e9, 2.8e5, 2.8e5),
        ])
        .unwrap();
        Scenario::new(graph, &[0.99, 0.891], params(latency_max)).unwrap()
    }

    #[test]
    fn enumeration_order_prefers_fewer_offloads_then_earlier_tasks() {
        let order: Vec<String> = enumerate_decisions(3)
            .iter()
            .map(|d| d.bitstring())
            .collect();
        assert_eq!(
            order,
            vec!["000", "100", "010", "001", "110", "101", "011", "111"]
        );
    }

    #[test]
    fn plan_matches_shuffled_manual_enumeration() {
        let scenario = two_task(2.0);
        let options = PlannerOptions {
            restarts: 1,
            ..PlannerOptions::default()
        };
        let planned = plan(&scenario, TransmitMode::Td, &options).unwrap();
        let mut manual = f64::INFINITY;
        // Reversed order on purpose; the minimum cannot depend on it.
        for decision in enumerate_decisions(2).into_iter().rev() {
            if let SolveOutcome::Solved(outcome) =
                sca_solve(&scenario, &decision, TransmitMode::Td, &options.sca, None).unwrap()
            {
                manual = manual.min(outcome.energy);
            }
        }
        let energy = planned.energy().expect("feasible");
        assert!(
            ((energy - manual) / manual).abs() < 1e-12,
            "plan {energy} manual {manual}"
        );
    }

    #[test]
    fn relaxing_targets_does_not_increase_energy() {
        let graph = CallGraph::new(vec![
            TaskSpec::new(2.0e9, 1.4e5, 1.4e5),
            TaskSpec::new(1.6e9, 2.8e5, 2.8e5),
        ])
        .unwrap();
        let tight = Scenario::new(graph.clone(), &[0.99, 0.891], params(2.0)).unwrap();
        let relaxed = Scenario::new(graph, &[0.9, 0.6], params(2.0)).unwrap();
        let options = PlannerOptions {
            restarts: 1,
            ..PlannerOptions::default()
        };
        let e_tight = plan(&tight, TransmitMode::Td, &options)
            .unwrap()
            .energy()
            .unwrap();
        let e_relaxed = plan(&relaxed, TransmitMode::Td, &options)
            .unwrap()
            .energy()
            .unwrap();
        assert!(
            e_relaxed <= e_tight + 1e-9,
            "tight {e_tight} relaxed {e_relaxed}"
        );
    }

    #[test]
    fn planning_is_deterministic() {
        let scenario = two_task(2.0);
        let options = PlannerOptions::default();
        let a = plan(&scenario, TransmitMode::Td, &options).unwrap();
        let b = plan(&scenario, TransmitMode::Td, &options).unwrap();
        match (&a, &b) {
            (
                Solution::Optimal {
                    energy: ea,
                    decision: da,
                    ..
                },
                Solution::Optimal {
                    energy: eb,
                    decision: db,
                    ..
                },
            ) => {
                assert_eq!(ea.to_bits(), eb.to_bits());
                assert_eq!(da, db);
            }
            other => panic!("expected two optimal solutions, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_budget_reports_infeasible() {
        let scenario = two_task(0.1);
        let sol = plan(&scenario, TransmitMode::Td, &PlannerOptions::default()).unwrap();
        assert_eq!(sol, Solution::Infeasible { mode: TransmitMode::Td });
        assert!(!sol.is_feasible());
    }

    #[test]
    fn generous_budget_keeps_everything_local() {
        let scenario = two_task(4.5);
        let sol = plan(&scenario, TransmitMode::Td, &PlannerOptions::default()).unwrap();
        match sol {
            Solution::Optimal { decision, energy, .. } => {
                assert_eq!(decision.bitstring(), "00");
                assert!((energy - 1.44).abs() < 1e-9);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn sweep_validates_grid() {
        let scenario = two_task(2.0);
        let options = PlannerOptions::default();
        assert!(matches!(
            sweep(&scenario, TransmitMode::Td, &[], &options).unwrap_err(),
            PlannerError::EmptyGrid
        ));
        assert!(matches!(
            sweep(&scenario, TransmitMode::Td, &[1.0, -2.0], &options).unwrap_err(),
            PlannerError::InvalidGridValue { .. }
        ));
    }

    #[test]
    fn sweep_energy_is_nonincreasing_in_budget() {
        let scenario = two_task(2.0);
        let options = PlannerOptions {
            restarts: 1,
            ..PlannerOptions::default()
        };
        let grid = [1.0, 1.5, 2.0, 3.0, 4.0];
        let points = sweep(&scenario, TransmitMode::Td, &grid, &options).unwrap();
        assert_eq!(points.len(), grid.len());
        let mut last = f64::INFINITY;
        for p in &points {
            let e = p.solution.energy().unwrap_or(f64::INFINITY);
            assert!(
                e <= last + 1e-7,
                "energy increased at l_max {}: {} after {}",
                p.l_max,
                e,
                last
            );
            last = e.min(last);
        }
    }

    #[test]
    fn too_many_tasks_is_an_error() {
        let tasks: Vec<TaskSpec> = (0..21)
            .map(|_| TaskSpec::new(1.0e8, 1.0e4, 1.0e4))
            .collect();
        let targets: Vec<f64> = (0..21).map(|i| 0.99 - 0.001 * i as f64).collect();
        let scenario =
            Scenario::new(CallGraph::new(tasks).unwrap(), &targets, params(10.0)).unwrap();
        assert!(matches!(
            plan(&scenario, TransmitMode::Td, &PlannerOptions::default()).unwrap_err(),
            PlannerError::TooManyTasks { n: 21 }
        ));
    }
}
