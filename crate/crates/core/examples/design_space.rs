//! Largest achievable Kruskal rank against waveform rank for 10 Tx and
//! 3 Rx sensors, written as CSV for plotting.
//!
//! `cargo run --release --example design_space`

use coarray::reproduce::{reproduce, ReproduceOptions, Scenario};

fn main() -> coarray::Result<()> {
    let out = reproduce(Scenario::Fig3, &ReproduceOptions::default())?;
    for name in ["max_krank.csv", "breakpoints.csv"] {
        println!("# {name}");
        print!("{}", out.file(name).unwrap_or_default());
    }
    Ok(())
}
