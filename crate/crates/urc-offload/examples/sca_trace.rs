//! One successive-convex-approximation solve in slow motion: the energy
//! trace is non-increasing by construction and the final allocation pins the
//! reliability constraints to their targets.
//!
//! Run with `cargo run --example sca_trace`.

use urc_offload::{
    sca_solve, CallGraph, Decision, ScSlotAccounting, ScaOptions, Scenario, SystemParams,
    TaskSpec, TransmitMode,
};

fn main() {
    let graph = CallGraph::new(vec![TaskSpec::new(2.0e9, 1.4e5, 1.4e5)]).unwrap();
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
        latency_max: 1.5,
        sc_slot_accounting: ScSlotAccounting::SharedOnce,
    };
    let scenario = Scenario::new(graph, &[0.99], params).unwrap();

    let outcome = sca_solve(
        &scenario,
        &Decision::new(vec![true]),
        TransmitMode::Td,
        &ScaOptions::default(),
        None,
    )
    .unwrap();
    let solved = outcome.solved().expect("offloading is feasible at 1.5 s");

    println!("energy trace (J), one line per outer iteration:");
    for (i, e) in solved.energy_trace.iter().enumerate() {
        let drop = if i == 0 {
            String::new()
        } else {
            format!("  ({:+.3e})", e - solved.energy_trace[i - 1])
        };
        println!("  {i:>3}  {e:.10}{drop}");
    }
    println!();
    println!(
        "converged = {} after {} iterations",
        solved.converged, solved.iterations
    );
    println!("final energy {:.6} J at latency {:.6} s", solved.energy, solved.report.latency);
    println!(
        "uplink success {:.9} vs required {:.9}",
        solved.report.rho_ul[0],
        0.99_f64.sqrt()
    );
    println!("the solver parks the downlink at the power cap to free slot time");
}
