//! Sweep results to CSV and back: the writer emits 12-significant-digit
//! fields, byte-identical across runs, and the reader reconstructs records.
//!
//! Run with `cargo run --release --example export_csv`.

use urc_offload::{
    load_config, read_records, sweep_records, write_records, GridSpec, ModeSelector,
    ParsedConfig,
};

fn main() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/two_task.toml");
    let ParsedConfig { scenario, planner } = load_config(root.as_ref()).unwrap();
    let grid = GridSpec::parse("1.0:2.0:0.5").unwrap();

    let records = sweep_records(&scenario, &grid, ModeSelector::Both, &planner).unwrap();
    let mut bytes = Vec::new();
    write_records(&mut bytes, &records, scenario.n_tasks()).unwrap();

    println!("CSV head:");
    for line in String::from_utf8(bytes.clone()).unwrap().lines().take(4) {
        println!("  {line}");
    }

    let parsed = read_records(bytes.as_slice()).unwrap();
    assert_eq!(parsed.len(), records.len());
    println!();
    println!("round trip recovered {} records:", parsed.len());
    for r in &parsed {
        println!(
            "  l_max={:.2} {} {} energy={:?}",
            r.l_max,
            r.mode.label(),
            r.status.label(),
            r.energy_joules.map(|e| format!("{e:.4}")),
        );
    }

    let mut again = Vec::new();
    let records2 = sweep_records(&scenario, &grid, ModeSelector::Both, &planner).unwrap();
    write_records(&mut again, &records2, scenario.n_tasks()).unwrap();
    println!();
    println!("second run is byte-identical: {}", bytes == again);
}
