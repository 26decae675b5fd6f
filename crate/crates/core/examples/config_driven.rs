//! Loads an experiment from JSON and prints the Kruskal rank it implies.
//!
//! `cargo run --release --example config_driven [path.json]`

use coarray::config::ExperimentConfig;
use coarray::linalg::kruskal_rank;
use coarray::sensing::build_sensing_matrix;

const DEFAULT: &str = r#"{
    "schema": 1,
    "task": "krank",
    "geometry": {"gna": {"n_tx": 4, "n_rx": 2, "delta": 2}},
    "waveform": {"matched": {"n_s": 3}},
    "grid": {"sin_uniform": 12}
}"#;

fn main() -> coarray::Result<()> {
    let config = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::load(path.as_ref())?,
        None => ExperimentConfig::from_json(DEFAULT)?,
    };
    let geometry = config
        .geometry
        .as_ref()
        .expect("krank configs carry a geometry");
    let arrays = geometry.resolve()?;
    let s = config
        .waveform
        .as_ref()
        .expect("and a waveform")
        .resolve(geometry)?;
    let grid = config.grid.as_ref().expect("and a grid").resolve()?;
    let b = build_sensing_matrix(&s, &arrays, &grid)?;
    println!("krank(B) = {}", kruskal_rank(b.b(), &config.policy()?)?);
    Ok(())
}
