//! Energy-optimal task offloading under latency and layered reliability
//! constraints over Rayleigh block-fading channels.

pub mod channel;
pub mod config;
pub mod experiments;
pub mod kernel;
pub mod model;
pub mod planner;
pub mod sca;

pub use channel::{
    mc_estimate_sc, mc_estimate_td, min_power_td, min_powers_sc, reliability_threshold,
    snr_threshold, success_prob_sc, success_prob_td, ChannelError, LinkParams, McEstimate,
    ScLayerStack,
};
pub use config::{load_config, parse_config, ConfigError, ParsedConfig};
pub use experiments::{
    read_records, sweep_records, validate_channel, write_records, ChannelValidation, CurveRecord,
    ExperimentError, GridSpec, ModeSelector, RecordStatus, TaskColumns, ValidationRow,
};
pub use kernel::{
    find_strictly_feasible, solve as kernel_solve, ClosureFn, ConvexSubproblem, Feasibility,
    KernelDiagnostics, KernelError, KernelOptions, KernelSolution, LinearFn, SmoothFn,
};
pub use model::{
    build_compound_hypergraph, build_scenario, evaluate, Allocation, CallGraph,
    CompoundHypergraph, Decision, EvalReport, ModelError, NamedSlack, ScSlotAccounting, Scenario,
    ServiceReliability, SystemParams, TaskSpec, TransmitMode, FEASIBILITY_TOL,
};
pub use planner::{
    compare_modes, plan, sweep, PlannerError, PlannerOptions, Solution, SweepPoint,
};
pub use sca::{
    sca_solve, EnergySurrogate, ScExact, ScLinearized, ScaError, ScaOptions, ScaOutcome,
    SolveOutcome, TdReliability,
};
