//! Closed-form slot success probabilities versus the seeded Monte-Carlo
//! oracle, for a point-to-point slot and for a two-layer superposed slot.
//!
//! Run with `cargo run --example channel_probabilities`.

use urc_offload::{
    mc_estimate_sc, mc_estimate_td, success_prob_sc, success_prob_td, LinkParams, ScLayerStack,
};

fn main() {
    let samples = 200_000;
    let seed = 7;

    println!("point-to-point slot: 140 kbit over 1 s at 1 MHz, unit SNR");
    println!("{:>3} {:>12} {:>12} {:>9}", "d", "closed", "monte-carlo", "diff");
    for d in [1u32, 2, 3] {
        let link = LinkParams::new(1.4e5, 1.0, 1.0e6, 1.0, d).unwrap();
        let closed = success_prob_td(&link, 1.0);
        let mc = mc_estimate_td(&link, 1.0, samples, seed);
        println!(
            "{d:>3} {closed:>12.6} {:>12.6} {:>9.1e}",
            mc.estimate,
            (closed - mc.estimate).abs()
        );
    }

    println!();
    println!("two superposed layers, powers 2 W and 1 W, decoded in order");
    let stack = ScLayerStack::new(
        vec![1.4e5, 1.4e5],
        vec![2.0, 1.0],
        1.0,
        1.0e6,
        1.0,
        1,
    )
    .unwrap();
    for layer in 0..2 {
        let closed = success_prob_sc(&stack, layer).unwrap();
        let mc = mc_estimate_sc(&stack, layer, samples, seed).unwrap();
        println!(
            "layer {layer}: closed {closed:.6}  monte-carlo {:.6} (std err {:.1e})",
            mc.estimate, mc.std_error
        );
    }
    println!();
    println!("layer 0 fights the 1 W layer as interference, so it is the weaker link");
}
