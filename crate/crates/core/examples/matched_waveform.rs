//! Reduced-rank waveforms matched to a GNA reach the Kruskal-rank ceiling
//! `min(N_s·N_rx, N_Σ)` at every waveform rank.
//!
//! `cargo run --release --example matched_waveform`

use coarray::geometry::{gna, sum_coarray};
use coarray::identifiability::{max_krank_bound, min_redundancy_limited_wr};
use coarray::linalg::{kruskal_rank, RankPolicy};
use coarray::manifold::AngularGrid;
use coarray::sensing::build_sensing_matrix;
use coarray::waveform::gna_matched;

fn main() -> coarray::Result<()> {
    let policy = RankPolicy::default();
    let (n_tx, n_rx, delta) = (4, 3, 3);
    let arrays = gna(n_tx, n_rx, delta)?;
    let n_sigma = sum_coarray(&arrays).len();
    let grid = AngularGrid::sin_uniform(n_sigma + 2)?;
    println!(
        "gna({n_tx},{n_rx},{delta}): N_sigma = {n_sigma}, smallest rank reaching it = {}",
        min_redundancy_limited_wr(n_sigma, n_rx)
    );
    for n_s in 1..=n_tx {
        let s = gna_matched(n_tx, n_rx, delta, n_s, n_s)?;
        let b = build_sensing_matrix(&s, &arrays, &grid)?;
        let k = kruskal_rank(b.b(), &policy)?;
        let active: Vec<usize> = (0..n_tx)
            .filter(|&c| s.matrix().column(c).iter().any(|z| z.norm() > 0.0))
            .collect();
        println!(
            "N_s = {n_s}: active Tx {active:?}, krank(B) = {k}, ceiling {}",
            max_krank_bound(n_s, n_rx, n_sigma)
        );
    }
    Ok(())
}
