//! Energy-versus-latency frontier for the two-task scenario under
//! time-division transmission, showing the offloading regimes the planner
//! moves through as the budget grows.
//!
//! Run with `cargo run --release --example energy_latency_sweep`.

use urc_offload::{
    sweep, CallGraph, PlannerOptions, ScSlotAccounting, Scenario, Solution, SystemParams,
    TaskSpec, TransmitMode,
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
        latency_max: 4.0,
        sc_slot_accounting: ScSlotAccounting::SharedOnce,
    };
    let scenario = Scenario::new(graph, &[0.99, 0.891], params).unwrap();

    let grid: Vec<f64> = (2..=16).map(|k| k as f64 * 0.25).collect();
    let points = sweep(
        &scenario,
        TransmitMode::Td,
        &grid,
        &PlannerOptions::default(),
    )
    .unwrap();

    println!("{:>6} {:>12} {:>10} {:>9}", "L_max", "energy (J)", "decision", "latency");
    let mut last = String::new();
    for point in &points {
        match &point.solution {
            Solution::Optimal {
                energy,
                decision,
                report,
                ..
            } => {
                let bits = decision.bitstring();
                let marker = if bits != last { "  <- new regime" } else { "" };
                println!(
                    "{:>6.2} {:>12.4} {:>10} {:>9.3}{marker}",
                    point.l_max, energy, bits, report.latency
                );
                last = bits;
            }
            Solution::Infeasible { .. } => {
                println!("{:>6.2} {:>12} {:>10} {:>9}", point.l_max, "-", "infeasible", "-");
            }
        }
    }
    println!();
    println!("1 = offloaded, 0 = local; task order is (task 1, task 2)");
    println!("tight budgets force offloading both; generous ones let everything run locally");
}
