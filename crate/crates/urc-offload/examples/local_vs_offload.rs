//! Exact evaluation of hand-built candidates: all-local execution versus a
//! manual offloading allocation, with the full constraint report.
//!
//! Run with `cargo run --example local_vs_offload`.

use urc_offload::{
    evaluate, min_power_td, Allocation, CallGraph, Decision, LinkParams, ScSlotAccounting,
    Scenario, SystemParams, TaskSpec,
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
        latency_max: 2.0,
        sc_slot_accounting: ScSlotAccounting::SharedOnce,
    };
    let scenario = Scenario::new(graph, &[0.99], params).unwrap();

    let local = evaluate(
        &scenario,
        &Decision::new(vec![false]),
        &Allocation::Td {
            p_ul: vec![],
            p_dl: vec![],
            l_ul: vec![],
            l_dl: vec![],
        },
    )
    .unwrap();
    println!("all-local: energy {:.3} J, latency {:.3} s", local.energy, local.latency);
    println!("  feasible at a 2.0 s budget: {}", local.feasible);

    let link = LinkParams::new(1.4e5, 0.8, 1e6, 1.0, 2).unwrap();
    let p_ul = min_power_td(&link, 0.99).unwrap();
    let dl = LinkParams::new(1.4e5, 0.1, 1e6, 1.0, 2).unwrap();
    let p_dl = min_power_td(&dl, 0.99).unwrap();
    let offload = evaluate(
        &scenario,
        &Decision::new(vec![true]),
        &Allocation::Td {
            p_ul: vec![p_ul],
            p_dl: vec![p_dl],
            l_ul: vec![0.8],
            l_dl: vec![0.1],
        },
    )
    .unwrap();
    println!();
    println!(
        "offloaded with 0.8 s up / 0.1 s down slots at minimum powers:"
    );
    println!(
        "  energy {:.4} J, latency {:.4} s, feasible {}",
        offload.energy, offload.latency, offload.feasible
    );
    println!(
        "  uplink success {:.6}, downlink success {:.6}, level-1 probability {:.6}",
        offload.rho_ul[0], offload.rho_dl[0], offload.sl_prob[0]
    );
    println!();
    println!("tightest constraints:");
    let mut slacks = offload.slacks.clone();
    slacks.sort_by(|a, b| a.slack.total_cmp(&b.slack));
    for s in slacks.iter().take(3) {
        println!("  {:<12} slack {:+.3e}", s.name, s.slack);
    }
}
