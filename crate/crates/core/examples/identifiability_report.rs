//! Full identifiability reports, including the regime-specific conditions.
//!
//! `cargo run --release --example identifiability_report`

use coarray::geometry::gna;
use coarray::identifiability::check_general;
use coarray::linalg::RankPolicy;
use coarray::manifold::AngularGrid;
use coarray::waveform::{example_waveform, gna_matched, ExampleWaveform, WaveformMatrix};
use coarray::CMatrix;

fn main() -> coarray::Result<()> {
    let policy = RankPolicy::default();
    let grid = AngularGrid::sin_uniform(10)?;
    let ula = gna(3, 2, 1)?;
    let nested = gna(3, 2, 2)?;
    let cases = [
        (
            "ex3b on the ULA",
            example_waveform(ExampleWaveform::Ex3b),
            &ula,
        ),
        (
            "full rank on the nested array",
            WaveformMatrix::orthogonal(3, 3)?,
            &nested,
        ),
        (
            "matched rank 2 on the nested array",
            gna_matched(3, 2, 2, 2, 2)?,
            &nested,
        ),
        (
            "rank one on the ULA",
            WaveformMatrix::new(CMatrix::identity(1, 3))?,
            &ula,
        ),
    ];
    for (label, s, arrays) in cases {
        let report = check_general(&s, arrays, &grid, &policy)?;
        println!("{label}");
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    Ok(())
}
