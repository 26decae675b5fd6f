//! Two waveform pairs with identical beampatterns but different Kruskal
//! rank, and two null-free beampatterns that still differ in Kruskal rank.
//!
//! `cargo run --release --example beampatterns`

use coarray::geometry::gna;
use coarray::linalg::{kruskal_rank, RankPolicy};
use coarray::manifold::AngularGrid;
use coarray::reproduce::beampattern_grid;
use coarray::sensing::build_sensing_matrix;
use coarray::waveform::{example_waveform, tx_beampattern, ExampleWaveform};

fn main() -> coarray::Result<()> {
    let policy = RankPolicy::default();
    let arrays = gna(3, 2, 1)?;
    let grid = AngularGrid::sin_uniform(8)?;
    let display = beampattern_grid();
    for which in ExampleWaveform::ALL {
        let s = example_waveform(which);
        let bp = tx_beampattern(&s, arrays.tx(), &display)?;
        let (lo, hi) = bp.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        });
        let k = kruskal_rank(build_sensing_matrix(&s, &arrays, &grid)?.b(), &policy)?;
        println!("{which}: beampattern in [{lo:.4}, {hi:.4}], krank(B) = {k}");
    }
    Ok(())
}
