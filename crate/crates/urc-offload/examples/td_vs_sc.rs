//! Time-division versus superposition coding on the two-task scenario:
//! superposing the layers in shared slots never costs more energy and often
//! saves a lot at tight latency budgets.
//!
//! Run with `cargo run --release --example td_vs_sc`.

use urc_offload::{
    compare_modes, CallGraph, PlannerOptions, ScSlotAccounting, Scenario, SystemParams, TaskSpec,
};

fn main() {
    let graph = CallGraph::new(vec![
        TaskSpec::new(2.0e9, 1.4e5, 1.4e5),
        TaskSpec::new(1.6e9, 2.8e5, 2.8e5),
    ])
    .unwrap();
    let params = SystemParams {
        f_mobile: 1e9,
        f_cloud: 1e10,
        p_mobile_compute: 0.4,
        bw_ul: 1e6,
        bw_dl: 1e6,
        snr_ul: 1.0,
        snr_dl: 1.0,
        diversity: 2,
        p_max_dl: 100.0,
        latency_max: 1.0,
        sc_slot_accounting: ScSlotAccounting::SharedOnce,
    };
    let scenario = Scenario::new(graph, &[0.99, 0.891], params).unwrap();

    println!(
        "{:>6} {:>14} {:>14} {:>10}",
        "L_max", "TD energy (J)", "SC energy (J)", "SC saving"
    );
    for budget in [0.7, 0.8, 0.9, 1.0, 1.2, 1.5, 2.0, 3.0] {
        let at = scenario.with_latency_max(budget);
        let (td, sc) = compare_modes(&at, &PlannerOptions::default()).unwrap();
        match (td.energy(), sc.energy()) {
            (Some(et), Some(es)) => {
                println!(
                    "{budget:>6.2} {et:>14.4} {es:>14.4} {:>9.1}%",
                    100.0 * (et - es) / et
                );
            }
            _ => println!("{budget:>6.2} {:>14} {:>14}", "infeasible", "infeasible"),
        }
    }
    println!();
    println!("once both tasks run locally the link is idle and the modes tie");
}
