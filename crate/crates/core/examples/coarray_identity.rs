//! Checks that the Khatri-Rao product of the physical manifolds equals the
//! redundancy pattern times the co-array manifold, and that the sensing
//! matrix built either way agrees.
//!
//! `cargo run --release --example coarray_identity`

use coarray::geometry::{gna, ArrayPair};
use coarray::manifold::{verify_coarray_identity, AngularGrid};
use coarray::sensing::build_sensing_matrix;
use coarray::waveform::WaveformMatrix;

fn main() -> coarray::Result<()> {
    let grid = AngularGrid::sin_uniform(16)?;
    let cases = [
        ("ULA 4x3", gna(4, 3, 1)?),
        ("nested 4x3", gna(4, 3, 3)?),
        ("irregular", ArrayPair::new(vec![0, 2, 7], vec![0, 1, 5])?),
    ];
    for (label, arrays) in &cases {
        let deviation = verify_coarray_identity(arrays, &grid);
        let s = WaveformMatrix::orthogonal(arrays.n_tx(), arrays.n_tx())?;
        let sensing = build_sensing_matrix(&s, arrays, &grid)?;
        println!(
            "{label:<11} max |A_tx kr A_rx - Upsilon A| = {deviation:.2e}, B is {}x{}, W is {}x{}",
            sensing.b().nrows(),
            sensing.b().ncols(),
            sensing.w().nrows(),
            sensing.w().ncols()
        );
    }
    Ok(())
}
