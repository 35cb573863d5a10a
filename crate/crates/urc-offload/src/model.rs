//! Problem model: an ordered chain of offloadable tasks, nested service
//! levels with layered reliability targets, system parameters, and the exact
//! evaluator that scores a (decision, allocation) pair.
//!
//! Service level `i` is delivered when tasks `1..=i` all complete, so its
//! success probability is the product of the per-task link probabilities up
//! to `i` (local tasks contribute probability 1).  Reliability targets
//! `r_1 >= r_2 >= ... >= r_N` are therefore imposed through conditional
//! per-task targets `r~_1 = r_1`, `r~_i = r_i / r_(i-1)`, each split evenly
//! between uplink and downlink (`rho >= sqrt(r~)`).

use crate::channel;
use thiserror::Error;

/// Slack below which a constraint is still reported as satisfied, absorbing
/// solver-boundary round-off.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("task[{index}]: cycles must be positive and finite (got {value})")]
    InvalidCycles { index: usize, value: f64 },
    #[error("task[{index}]: {field} must be nonnegative and finite (got {value})")]
    InvalidBits {
        index: usize,
        field: &'static str,
        value: f64,
    },
    #[error("call graph must contain at least one task")]
    EmptyGraph,
    #[error("reliability[{index}]: target must lie in (0, 1] (got {value})")]
    TargetOutOfRange { index: usize, value: f64 },
    #[error("reliability[{index}]: targets must be non-increasing ({value} follows {previous})")]
    NonMonotoneTargets {
        index: usize,
        value: f64,
        previous: f64,
    },
    #[error("reliability targets count ({targets}) must match task count ({tasks})")]
    TargetCountMismatch { targets: usize, tasks: usize },
    #[error("system.{field} must be positive and finite (got {value})")]
    InvalidSystemParam { field: &'static str, value: f64 },
    #[error("system.diversity must be at least 1")]
    InvalidDiversity,
    #[error("decision length {decision} does not match task count {tasks}")]
    DecisionLengthMismatch { decision: usize, tasks: usize },
    #[error("allocation shape does not match the decision: expected {expected} offloaded entries, got {actual}")]
    AllocationShape { expected: usize, actual: usize },
}

/// One offloadable task: compute demand plus transfer payloads in each
/// direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskSpec {
    pub cycles: f64,
    pub bits_in: f64,
    pub bits_out: f64,
}

impl TaskSpec {
    pub fn new(cycles: f64, bits_in: f64, bits_out: f64) -> Self {
        Self {
            cycles,
            bits_in,
            bits_out,
        }
    }

    fn validate(&self, index: usize) -> Result<(), ModelError> {
        if !self.cycles.is_finite() || self.cycles <= 0.0 {
            return Err(ModelError::InvalidCycles {
                index,
                value: self.cycles,
            });
        }
        for (field, value) in [("bits_in", self.bits_in), ("bits_out", self.bits_out)] {
            if !value.is_finite() || value < 0.0 {
                return Err(ModelError::InvalidBits {
                    index,
                    field,
                    value,
                });
            }
        }
        Ok(())
    }
}

/// The ordered task chain between the input and output stages.
#[derive(Debug, Clone, PartialEq)]
pub struct CallGraph {
    tasks: Vec<TaskSpec>,
}

impl CallGraph {
    pub fn new(tasks: Vec<TaskSpec>) -> Result<Self, ModelError> {
        if tasks.is_empty() {
            return Err(ModelError::EmptyGraph);
        }
        for (i, task) in tasks.iter().enumerate() {
            task.validate(i)?;
        }
        Ok(Self { tasks })
    }

    pub fn tasks(&self) -> &[TaskSpec] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Per-service-level reliability targets plus the conditional per-task
/// targets derived from their ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceReliability {
    targets: Vec<f64>,
    conditional: Vec<f64>,
}

impl ServiceReliability {
    pub fn from_targets(targets: &[f64]) -> Result<Self, ModelError> {
        for (i, &r) in targets.iter().enumerate() {
            if !r.is_finite() || r <= 0.0 || r > 1.0 {
                return Err(ModelError::TargetOutOfRange {
                    index: i + 1,
                    value: r,
                });
            }
            if i > 0 && r > targets[i - 1] {
                return Err(ModelError::NonMonotoneTargets {
                    index: i + 1,
                    value: r,
                    previous: targets[i - 1],
                });
            }
        }
        let conditional = targets
            .iter()
            .enumerate()
            .map(|(i, &r)| if i == 0 { r } else { r / targets[i - 1] })
            .collect();
        Ok(Self {
            targets: targets.to_vec(),
            conditional,
        })
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Conditional target for task `i` (0-based): the reliability the task's
    /// own round trip must deliver given all earlier levels succeeded.
    pub fn conditional(&self) -> &[f64] {
        &self.conditional
    }
}

/// How shared superposition-coding slots enter the latency budget.
///
/// `SharedOnce` charges the two shared slots once, which is what the air
/// interface physically occupies.  `PerTask` charges them once per offloaded
/// task, mirroring a literal per-task sum; it is kept as an option for
/// comparison runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScSlotAccounting {
    #[default]
    SharedOnce,
    PerTask,
}

/// Platform and channel parameters shared by every task.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub f_mobile: f64,
    pub f_cloud: f64,
    pub p_mobile_compute: f64,
    pub bw_ul: f64,
    pub bw_dl: f64,
    pub snr_ul: f64,
    pub snr_dl: f64,
    pub diversity: u32,
    pub p_max_dl: f64,
    pub latency_max: f64,
    pub sc_slot_accounting: ScSlotAccounting,
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("f_mobile", self.f_mobile),
            ("f_cloud", self.f_cloud),
            ("p_mobile_compute", self.p_mobile_compute),
            ("bw_ul", self.bw_ul),
            ("bw_dl", self.bw_dl),
            ("snr_ul", self.snr_ul),
            ("snr_dl", self.snr_dl),
            ("p_max_dl", self.p_max_dl),
            ("latency_max", self.latency_max),
        ];
        for (field, value) in fields {
            if !value.is_finite() || value <= 0.0 {
                return Err(ModelError::InvalidSystemParam { field, value });
            }
        }
        if self.diversity == 0 {
            return Err(ModelError::InvalidDiversity);
        }
        Ok(())
    }

    pub fn with_latency_max(&self, latency_max: f64) -> Self {
        Self {
            latency_max,
            ..self.clone()
        }
    }
}

/// A fully validated problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    graph: CallGraph,
    reliability: ServiceReliability,
    params: SystemParams,
}

impl Scenario {
    pub fn new(
        graph: CallGraph,
        targets: &[f64],
        params: SystemParams,
    ) -> Result<Self, ModelError> {
        if targets.len() != graph.len() {
            return Err(ModelError::TargetCountMismatch {
                targets: targets.len(),
                tasks: graph.len(),
            });
        }
        let reliability = ServiceReliability::from_targets(targets)?;
        params.validate()?;
        Ok(Self {
            graph,
            reliability,
            params,
        })
    }

    pub fn graph(&self) -> &CallGraph {
        &self.graph
    }

    pub fn reliability(&self) -> &ServiceReliability {
        &self.reliability
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn n_tasks(&self) -> usize {
        self.graph.len()
    }

    pub fn with_latency_max(&self, latency_max: f64) -> Self {
        Self {
            params: self.params.with_latency_max(latency_max),
            ..self.clone()
        }
    }

    /// Total compute time implied by a decision: offloaded tasks run on the
    /// cloud clock, the rest on the mobile clock.
    pub fn compute_time(&self, decision: &Decision) -> f64 {
        self.graph
            .tasks()
            .iter()
            .zip(decision.flags())
            .map(|(task, &offloaded)| {
                if offloaded {
                    task.cycles / self.params.f_cloud
                } else {
                    task.cycles / self.params.f_mobile
                }
            })
            .sum()
    }

    /// Energy the mobile spends computing the non-offloaded tasks.
    pub fn local_compute_energy(&self, decision: &Decision) -> f64 {
        self.graph
            .tasks()
            .iter()
            .zip(decision.flags())
            .filter(|(_, &offloaded)| !offloaded)
            .map(|(task, _)| task.cycles / self.params.f_mobile * self.params.p_mobile_compute)
            .sum()
    }
}

/// Convenience constructor mirroring the three ingredients of a scenario.
pub fn build_scenario(
    graph: CallGraph,
    targets: &[f64],
    params: SystemParams,
) -> Result<Scenario, ModelError> {
    Scenario::new(graph, targets, params)
}

/// Which tasks run on the cloud (`true`) versus locally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    offload: Vec<bool>,
}

impl Decision {
    pub fn new(offload: Vec<bool>) -> Self {
        Self { offload }
    }

    /// Decision from a bit mask where bit `i` controls task `i` (0-based).
    pub fn from_mask(mask: u32, n_tasks: usize) -> Self {
        Self {
            offload: (0..n_tasks).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn flags(&self) -> &[bool] {
        &self.offload
    }

    pub fn len(&self) -> usize {
        self.offload.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offload.is_empty()
    }

    /// Indices of offloaded tasks in ascending order.
    pub fn offloaded(&self) -> Vec<usize> {
        self.offload
            .iter()
            .enumerate()
            .filter_map(|(i, &on)| on.then_some(i))
            .collect()
    }

    pub fn n_offloaded(&self) -> usize {
        self.offload.iter().filter(|&&on| on).count()
    }

    /// Canonical mask with bit `i` set when task `i` is offloaded.
    pub fn mask(&self) -> u32 {
        self.offload
            .iter()
            .enumerate()
            .fold(0, |m, (i, &on)| if on { m | 1 << i } else { m })
    }

    /// "10" means the first task is offloaded and the second is local.
    pub fn bitstring(&self) -> String {
        self.offload
            .iter()
            .map(|&on| if on { '1' } else { '0' })
            .collect()
    }
}

/// Transmission scheme for the offloaded payloads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransmitMode {
    Td,
    Sc,
}

impl TransmitMode {
    pub fn label(&self) -> &'static str {
        match self {
            TransmitMode::Td => "td",
            TransmitMode::Sc => "sc",
        }
    }
}

/// Communication resources granted to the offloaded tasks, listed in
/// ascending task order.  Time-division gives every offloaded task its own
/// pair of slots; superposition coding shares one slot pair across all of
/// them.
#[derive(Debug, Clone, PartialEq)]
pub enum Allocation {
    Td {
        p_ul: Vec<f64>,
        p_dl: Vec<f64>,
        l_ul: Vec<f64>,
        l_dl: Vec<f64>,
    },
    Sc {
        p_ul: Vec<f64>,
        p_dl: Vec<f64>,
        l_ul: f64,
        l_dl: f64,
    },
}

impl Allocation {
    pub fn mode(&self) -> TransmitMode {
        match self {
            Allocation::Td { .. } => TransmitMode::Td,
            Allocation::Sc { .. } => TransmitMode::Sc,
        }
    }

    pub fn n_entries(&self) -> usize {
        match self {
            Allocation::Td { p_ul, .. } | Allocation::Sc { p_ul, .. } => p_ul.len(),
        }
    }

    pub fn empty(mode: TransmitMode) -> Self {
        match mode {
            TransmitMode::Td => Allocation::Td {
                p_ul: vec![],
                p_dl: vec![],
                l_ul: vec![],
                l_dl: vec![],
            },
            TransmitMode::Sc => Allocation::Sc {
                p_ul: vec![],
                p_dl: vec![],
                l_ul: 0.0,
                l_dl: 0.0,
            },
        }
    }

    /// Uplink slot of the k-th offloaded task.
    pub fn slot_ul(&self, k: usize) -> f64 {
        match self {
            Allocation::Td { l_ul, .. } => l_ul[k],
            Allocation::Sc { l_ul, .. } => *l_ul,
        }
    }

    /// Downlink slot of the k-th offloaded task.
    pub fn slot_dl(&self, k: usize) -> f64 {
        match self {
            Allocation::Td { l_dl, .. } => l_dl[k],
            Allocation::Sc { l_dl, .. } => *l_dl,
        }
    }

    pub fn power_ul(&self, k: usize) -> f64 {
        match self {
            Allocation::Td { p_ul, .. } | Allocation::Sc { p_ul, .. } => p_ul[k],
        }
    }

    pub fn power_dl(&self, k: usize) -> f64 {
        match self {
            Allocation::Td { p_dl, .. } | Allocation::Sc { p_dl, .. } => p_dl[k],
        }
    }
}

/// A named signed slack: nonnegative means satisfied, with active constraints
/// sitting near zero.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedSlack {
    pub name: String,
    pub slack: f64,
}

/// Exact closed-form audit of one (decision, allocation) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub energy: f64,
    pub latency: f64,
    /// Uplink and downlink success probabilities per offloaded task,
    /// ascending task order.
    pub rho_ul: Vec<f64>,
    pub rho_dl: Vec<f64>,
    /// Achieved probability of each service level, in level order.
    pub sl_prob: Vec<f64>,
    pub feasible: bool,
    pub slacks: Vec<NamedSlack>,
}

impl EvalReport {
    pub fn min_slack(&self) -> f64 {
        self.slacks
            .iter()
            .map(|s| s.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Success probability of one direction of one offloaded task, including the
/// degenerate slot/power cases the optimizer may probe.
fn link_probability(bits: f64, slot: f64, bandwidth: f64, snr: f64, d: u32, power: f64) -> f64 {
    if bits <= 0.0 {
        return 1.0;
    }
    if slot <= 0.0 || power <= 0.0 {
        return 0.0;
    }
    let x = channel::snr_threshold(bits, slot, bandwidth);
    let z = x / (snr * power);
    1.0 - (-(-z).exp_m1()).powi(d as i32)
}

/// SC layer probability with interference from the later offloaded layers.
fn sc_layer_probability(
    bits: f64,
    slot: f64,
    bandwidth: f64,
    snr: f64,
    d: u32,
    power: f64,
    interference: f64,
) -> f64 {
    if bits <= 0.0 {
        return 1.0;
    }
    if slot <= 0.0 {
        return 0.0;
    }
    let x = channel::snr_threshold(bits, slot, bandwidth);
    let denom = snr * power - x * (snr * interference);
    if denom <= 0.0 {
        return 0.0;
    }
    1.0 - (-(-(x / denom)).exp_m1()).powi(d as i32)
}

/// Scores an allocation against the exact model: mobile energy, end-to-end
/// latency, per-link success probabilities, per-level reliability, and the
/// signed slack of every constraint.
pub fn evaluate(
    scenario: &Scenario,
    decision: &Decision,
    alloc: &Allocation,
) -> Result<EvalReport, ModelError> {
    let n = scenario.n_tasks();
    if decision.len() != n {
        return Err(ModelError::DecisionLengthMismatch {
            decision: decision.len(),
            tasks: n,
        });
    }
    let offloaded = decision.offloaded();
    if alloc.n_entries() != offloaded.len() {
        return Err(ModelError::AllocationShape {
            expected: offloaded.len(),
            actual: alloc.n_entries(),
        });
    }
    let params = scenario.params();
    let tasks = scenario.graph().tasks();
    let conditional = scenario.reliability().conditional();

    let mut energy = scenario.local_compute_energy(decision);
    let mut slot_time = 0.0;
    for k in 0..offloaded.len() {
        energy += alloc.power_ul(k) * alloc.slot_ul(k);
        slot_time += alloc.slot_ul(k) + alloc.slot_dl(k);
    }
    if let Allocation::Sc { l_ul, l_dl, .. } = alloc {
        slot_time = match params.sc_slot_accounting {
            ScSlotAccounting::SharedOnce => {
                if offloaded.is_empty() {
                    0.0
                } else {
                    l_ul + l_dl
                }
            }
            ScSlotAccounting::PerTask => offloaded.len() as f64 * (l_ul + l_dl),
        };
    }
    let latency = slot_time + scenario.compute_time(decision);

    let mut rho_ul = Vec::with_capacity(offloaded.len());
    let mut rho_dl = Vec::with_capacity(offloaded.len());
    for (k, &task_idx) in offloaded.iter().enumerate() {
        let task = &tasks[task_idx];
        match alloc {
            Allocation::Td { .. } => {
                rho_ul.push(link_probability(
                    task.bits_in,
                    alloc.slot_ul(k),
                    params.bw_ul,
                    params.snr_ul,
                    params.diversity,
                    alloc.power_ul(k),
                ));
                rho_dl.push(link_probability(
                    task.bits_out,
                    alloc.slot_dl(k),
                    params.bw_dl,
                    params.snr_dl,
                    params.diversity,
                    alloc.power_dl(k),
                ));
            }
            Allocation::Sc { p_ul, p_dl, l_ul, l_dl } => {
                let int_ul: f64 = p_ul[k + 1..].iter().sum();
                let int_dl: f64 = p_dl[k + 1..].iter().sum();
                rho_ul.push(sc_layer_probability(
                    task.bits_in,
                    *l_ul,
                    params.bw_ul,
                    params.snr_ul,
                    params.diversity,
                    p_ul[k],
                    int_ul,
                ));
                rho_dl.push(sc_layer_probability(
                    task.bits_out,
                    *l_dl,
                    params.bw_dl,
                    params.snr_dl,
                    params.diversity,
                    p_dl[k],
                    int_dl,
                ));
            }
        }
    }

    let mut sl_prob = Vec::with_capacity(n);
    let mut running = 1.0;
    for i in 0..n {
        if let Some(k) = offloaded.iter().position(|&t| t == i) {
            running *= rho_ul[k] * rho_dl[k];
        }
        sl_prob.push(running);
    }

    let mut slacks = vec![NamedSlack {
        name: "latency".to_string(),
        slack: params.latency_max - latency,
    }];
    for (k, &task_idx) in offloaded.iter().enumerate() {
        let required = conditional[task_idx].sqrt();
        slacks.push(NamedSlack {
            name: format!("rho_ul[{}]", task_idx + 1),
            slack: rho_ul[k] - required,
        });
        slacks.push(NamedSlack {
            name: format!("rho_dl[{}]", task_idx + 1),
            slack: rho_dl[k] - required,
        });
        slacks.push(NamedSlack {
            name: format!("p_dl_cap[{}]", task_idx + 1),
            slack: params.p_max_dl - alloc.power_dl(k),
        });
        for (name, value) in [
            (format!("p_ul_nonneg[{}]", task_idx + 1), alloc.power_ul(k)),
            (format!("p_dl_nonneg[{}]", task_idx + 1), alloc.power_dl(k)),
            (format!("l_ul_nonneg[{}]", task_idx + 1), alloc.slot_ul(k)),
            (format!("l_dl_nonneg[{}]", task_idx + 1), alloc.slot_dl(k)),
        ] {
            slacks.push(NamedSlack { name, slack: value });
        }
    }
    let feasible = slacks.iter().all(|s| s.slack >= -FEASIBILITY_TOL);

    Ok(EvalReport {
        energy,
        latency,
        rho_ul,
        rho_dl,
        sl_prob,
        feasible,
        slacks,
    })
}

/// One hyperedge of the compound service graph: the output of `task` feeds
/// every service level that includes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperedge {
    pub task: usize,
    pub levels: Vec<usize>,
}

/// Compound service graph: each task's input arrives from the input stage and
/// its output is shared by the tail of service levels `task..n`.  Constructed
/// from the chain alone; it documents which levels a task's transfer serves.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundHypergraph {
    n_tasks: usize,
    input_bits: Vec<f64>,
    output_bits: Vec<f64>,
    hyperedges: Vec<Hyperedge>,
}

impl CompoundHypergraph {
    pub fn from_graph(graph: &CallGraph) -> Self {
        let n = graph.len();
        let hyperedges = (0..n)
            .map(|task| Hyperedge {
                task,
                levels: (task..n).collect(),
            })
            .collect();
        Self {
            n_tasks: n,
            input_bits: graph.tasks().iter().map(|t| t.bits_in).collect(),
            output_bits: graph.tasks().iter().map(|t| t.bits_out).collect(),
            hyperedges,
        }
    }

    pub fn n_tasks(&self) -> usize {
        self.n_tasks
    }

    /// One replicated output node per service level.
    pub fn n_output_nodes(&self) -> usize {
        self.n_tasks
    }

    pub fn input_bits(&self) -> &[f64] {
        &self.input_bits
    }

    pub fn output_bits(&self) -> &[f64] {
        &self.output_bits
    }

    pub fn hyperedges(&self) -> &[Hyperedge] {
        &self.hyperedges
    }
}

/// Builds the compound service graph for a task chain.
pub fn build_compound_hypergraph(graph: &CallGraph) -> CompoundHypergraph {
    CompoundHypergraph::from_graph(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn demo_params() -> SystemParams {
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
            latency_max: 2.0,
            sc_slot_accounting: ScSlotAccounting::default(),
        }
    }

    fn two_task_scenario(latency_max: f64) -> Scenario {
        let graph = CallGraph::new(vec![
            TaskSpec::new(2.0e9, 1.4e5, 1.4e5),
            TaskSpec::new(1.6e9, 2.8e5, 2.8e5),
        ])
        .unwrap();
        Scenario::new(
            graph,
            &[0.99, 0.891],
            demo_params().with_latency_max(latency_max),
        )
        .unwrap()
    }

    #[test]
    fn conditional_targets_are_ratios() {
        let rel = ServiceReliability::from_targets(&[0.99, 0.891]).unwrap();
        assert_eq!(rel.conditional()[0], 0.99);
        assert!((rel.conditional()[1] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn non_monotone_targets_name_the_offender() {
        let err = ServiceReliability::from_targets(&[0.9, 0.95]).unwrap_err();
        assert_eq!(
            err,
            ModelError::NonMonotoneTargets {
                index: 2,
                value: 0.95,
                previous: 0.9
            }
        );
        assert!(err.to_string().contains("reliability[2]"));
    }

    #[test]
    fn out_of_range_targets_rejected() {
        assert!(ServiceReliability::from_targets(&[1.2]).is_err());
        assert!(ServiceReliability::from_targets(&[0.0]).is_err());
        assert!(ServiceReliability::from_targets(&[0.9, -0.1]).is_err());
        // 1.0 is a valid (if extreme) target.
        assert!(ServiceReliability::from_targets(&[1.0, 0.9]).is_ok());
    }

    #[test]
    fn invalid_tasks_name_their_index() {
        let err = CallGraph::new(vec![
            TaskSpec::new(1.0e9, 0.0, 0.0),
            TaskSpec::new(0.0, 1.0, 1.0),
        ])
        .unwrap_err();
        assert_eq!(
            err,
            ModelError::InvalidCycles {
                index: 1,
                value: 0.0
            }
        );
    }

    #[test]
    fn all_local_two_task_checkpoint() {
        let scenario = two_task_scenario(4.0);
        let decision = Decision::new(vec![false, false]);
        let report = evaluate(
            &scenario,
            &decision,
            &Allocation::empty(TransmitMode::Td),
        )
        .unwrap();
        assert!((report.latency - 3.6).abs() < 1e-12);
        assert!((report.energy - 1.44).abs() < 1e-12);
        assert!(report.feasible);
        assert_eq!(report.sl_prob, vec![1.0, 1.0]);
    }

    #[test]
    fn all_local_infeasible_when_budget_too_small() {
        let scenario = two_task_scenario(3.5);
        let decision = Decision::new(vec![false, false]);
        let report = evaluate(
            &scenario,
            &decision,
            &Allocation::empty(TransmitMode::Td),
        )
        .unwrap();
        assert!(!report.feasible);
        assert!(report.min_slack() < -0.09);
    }

    #[test]
    fn td_allocation_probabilities_and_energy() {
        let scenario = two_task_scenario(4.0);
        let decision = Decision::new(vec![true, false]);
        let alloc = Allocation::Td {
            p_ul: vec![2.0],
            p_dl: vec![1.5],
            l_ul: vec![1.0],
            l_dl: vec![1.0],
        };
        let report = evaluate(&scenario, &decision, &alloc).unwrap();
        // Uplink energy plus local compute for task 2.
        let expected_energy = 2.0 * 1.0 + 1.6 * 0.4;
        assert!((report.energy - expected_energy).abs() < 1e-12);
        // Slots plus cloud compute for task 1 plus local compute for task 2.
        assert!((report.latency - (2.0 + 0.2 + 1.6)).abs() < 1e-12);
        let rho = report.rho_ul[0];
        let link = crate::channel::LinkParams::new(1.4e5, 1.0, 1.0e6, 1.0, 2).unwrap();
        assert_eq!(rho, crate::channel::success_prob_td(&link, 2.0));
        assert_eq!(report.sl_prob.len(), 2);
        assert!((report.sl_prob[0] - report.rho_ul[0] * report.rho_dl[0]).abs() < 1e-15);
        assert_eq!(report.sl_prob[1], report.sl_prob[0]);
    }

    #[test]
    fn sc_shared_slots_counted_once_by_default() {
        let scenario = two_task_scenario(4.0);
        let decision = Decision::new(vec![true, true]);
        let alloc = Allocation::Sc {
            p_ul: vec![3.0, 1.0],
            p_dl: vec![3.0, 1.0],
            l_ul: 0.8,
            l_dl: 0.4,
        };
        let report = evaluate(&scenario, &decision, &alloc).unwrap();
        assert!((report.latency - (1.2 + 0.2 + 0.16)).abs() < 1e-12);

        let mut params = scenario.params().clone();
        params.sc_slot_accounting = ScSlotAccounting::PerTask;
        let literal = Scenario::new(scenario.graph().clone(), &[0.99, 0.891], params).unwrap();
        let report2 = evaluate(&literal, &decision, &alloc).unwrap();
        assert!((report2.latency - (2.4 + 0.2 + 0.16)).abs() < 1e-12);
    }

    #[test]
    fn sc_decode_order_sees_interference_from_later_layers_only() {
        let scenario = two_task_scenario(4.0);
        let decision = Decision::new(vec![true, true]);
        let alloc = Allocation::Sc {
            p_ul: vec![2.0, 1.0],
            p_dl: vec![2.0, 1.0],
            l_ul: 1.0,
            l_dl: 1.0,
        };
        let report = evaluate(&scenario, &decision, &alloc).unwrap();
        let stack = crate::channel::ScLayerStack::new(
            vec![1.4e5, 2.8e5],
            vec![2.0, 1.0],
            1.0,
            1.0e6,
            1.0,
            2,
        )
        .unwrap();
        assert_eq!(
            report.rho_ul[0],
            crate::channel::success_prob_sc(&stack, 0).unwrap()
        );
        assert_eq!(
            report.rho_ul[1],
            crate::channel::success_prob_sc(&stack, 1).unwrap()
        );
    }

    #[test]
    fn zero_bits_make_links_sure_and_constraints_vacuous() {
        let graph = CallGraph::new(vec![TaskSpec::new(1.0e9, 0.0, 0.0)]).unwrap();
        let scenario = Scenario::new(graph, &[0.99], demo_params()).unwrap();
        let decision = Decision::new(vec![true]);
        let alloc = Allocation::Td {
            p_ul: vec![0.0],
            p_dl: vec![0.0],
            l_ul: vec![0.0],
            l_dl: vec![0.0],
        };
        let report = evaluate(&scenario, &decision, &alloc).unwrap();
        assert_eq!(report.rho_ul, vec![1.0]);
        assert_eq!(report.rho_dl, vec![1.0]);
        assert!(report.feasible);
        assert_eq!(report.energy, 0.0);
    }

    #[test]
    fn allocation_shape_mismatch_is_an_error() {
        let scenario = two_task_scenario(4.0);
        let decision = Decision::new(vec![true, true]);
        let alloc = Allocation::Td {
            p_ul: vec![1.0],
            p_dl: vec![1.0],
            l_ul: vec![1.0],
            l_dl: vec![1.0],
        };
        assert_eq!(
            evaluate(&scenario, &decision, &alloc).unwrap_err(),
            ModelError::AllocationShape {
                expected: 2,
                actual: 1
            }
        );
    }

    #[test]
    fn decision_mask_round_trip_and_bitstring() {
        let d = Decision::from_mask(0b01, 2);
        assert_eq!(d.flags(), &[true, false]);
        assert_eq!(d.bitstring(), "10");
        assert_eq!(d.mask(), 0b01);
        assert_eq!(d.offloaded(), vec![0]);
    }

    #[test]
    fn hypergraph_shape_for_three_tasks() {
        let graph = CallGraph::new(vec![
            TaskSpec::new(1.0e9, 1.0e5, 2.0e5),
            TaskSpec::new(2.0e9, 3.0e5, 4.0e5),
            TaskSpec::new(3.0e9, 5.0e5, 6.0e5),
        ])
        .unwrap();
        let hg = build_compound_hypergraph(&graph);
        assert_eq!(hg.n_tasks(), 3);
        assert_eq!(hg.n_output_nodes(), 3);
        assert_eq!(hg.hyperedges().len(), 3);
        assert_eq!(hg.hyperedges()[0].levels, vec![0, 1, 2]);
        assert_eq!(hg.hyperedges()[2].levels, vec![2]);
        assert_eq!(hg.input_bits(), &[1.0e5, 3.0e5, 5.0e5]);
        assert_eq!(hg.output_bits(), &[2.0e5, 4.0e5, 6.0e5]);
    }

    #[test]
    fn single_task_hypergraph_is_a_chain() {
        let graph = CallGraph::new(vec![TaskSpec::new(2.0e9, 1.4e5, 1.4e5)]).unwrap();
        let hg = build_compound_hypergraph(&graph);
        assert_eq!(hg.hyperedges().len(), 1);
        assert_eq!(hg.hyperedges()[0].levels, vec![0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig {
            cases: 128,
            failure_persistence: None,
            .. ProptestConfig::default()
        })]

        #[test]
        fn conditional_targets_reconstruct_the_originals(
            first in 0.5..1.0_f64,
            ratios in proptest::collection::vec(0.5..1.0_f64, 0..6),
        ) {
            let mut targets = vec![first];
            for r in ratios {
                let next = targets.last().unwrap() * r;
                targets.push(next);
            }
            let rel = ServiceReliability::from_targets(&targets).unwrap();
            let mut rebuilt = 1.0;
            for (i, &c) in rel.conditional().iter().enumerate() {
                rebuilt *= c;
                prop_assert!(((rebuilt - targets[i]) / targets[i]).abs() < 1e-12);
            }
        }

        #[test]
        fn service_level_probability_is_non_increasing(
            p_ul in proptest::collection::vec(0.0..4.0_f64, 3),
            l_ul in proptest::collection::vec(0.01..2.0_f64, 3),
            mask in 0u32..8,
        ) {
            let graph = CallGraph::new(vec![
                TaskSpec::new(1.0e9, 1.0e5, 1.0e5),
                TaskSpec::new(1.0e9, 2.0e5, 1.0e5),
                TaskSpec::new(1.0e9, 1.5e5, 1.0e5),
            ]).unwrap();
            let scenario = Scenario::new(graph, &[0.99, 0.9, 0.85], demo_params()).unwrap();
            let decision = Decision::from_mask(mask, 3);
            let k = decision.n_offloaded();
            let alloc = Allocation::Td {
                p_ul: p_ul[..k].to_vec(),
                p_dl: vec![1.0; k],
                l_ul: l_ul[..k].to_vec(),
                l_dl: vec![0.5; k],
            };
            let report = evaluate(&scenario, &decision, &alloc).unwrap();
            for w in report.sl_prob.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-15);
            }
        }
    }
}
