//! From nested service-level targets to per-link power requirements: derive
//! conditional targets, invert them to SNR thresholds, and compute minimum
//! transmit powers for both transmission styles.
//!
//! Run with `cargo run --example reliability_composition`.

use urc_offload::{
    min_power_td, min_powers_sc, reliability_threshold, CallGraph, LinkParams, ScSlotAccounting,
    Scenario, SystemParams, TaskSpec,
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
        latency_max: 2.0,
        sc_slot_accounting: ScSlotAccounting::SharedOnce,
    };
    let scenario = Scenario::new(graph, &[0.99, 0.891], params).unwrap();

    println!("service-level targets and their conditional decomposition");
    let rel = scenario.reliability();
    for (i, (t, c)) in rel.targets().iter().zip(rel.conditional()).enumerate() {
        println!("  level {}: target {t:.4}, conditional {c:.4}", i + 1);
    }

    println!();
    println!("each round trip must succeed with sqrt(conditional) per direction;");
    println!("inverting the outage law gives an SNR threshold c per task:");
    for (i, &cond) in rel.conditional().iter().enumerate() {
        let c = reliability_threshold(cond, 2).unwrap();
        println!("  task {}: c = {c:.6}", i + 1);
    }

    println!();
    println!("minimum powers for 1 s slots (time-division, each task alone):");
    for (i, task) in scenario.graph().tasks().iter().enumerate() {
        let link = LinkParams::new(task.bits_in, 1.0, 1e6, 1.0, 2).unwrap();
        let p = min_power_td(&link, rel.conditional()[i]).unwrap();
        println!("  task {}: {p:.4} W uplink", i + 1);
    }

    println!();
    println!("superposed in one shared 1 s slot (later layers are interference):");
    let powers =
        min_powers_sc(&[1.4e5, 2.8e5], 1.0, 1e6, 1.0, 2, rel.conditional()).unwrap();
    for (i, p) in powers.iter().enumerate() {
        println!("  layer {}: {p:.4} W", i + 1);
    }
    println!("layer 1 pays extra power to overcome layer 2's interference");
}
