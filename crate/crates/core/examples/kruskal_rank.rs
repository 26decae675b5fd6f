//! Exact Kruskal rank next to ordinary rank, and bounds when the subset
//! budget runs out.
//!
//! `cargo run --release --example kruskal_rank`

use coarray::linalg::{kruskal_rank, kruskal_rank_bounds, numerical_rank, RankPolicy};
use coarray::{CMatrix, Complex64};

fn main() -> coarray::Result<()> {
    let policy = RankPolicy::default();
    let c = |re: f64| Complex64::new(re, 0.0);

    // full row rank, but columns 0, 1 and 3 are dependent
    let m = CMatrix::from_row_slice(
        3,
        4,
        &[
            c(1.0),
            c(0.0),
            c(0.0),
            c(1.0),
            c(0.0),
            c(1.0),
            c(0.0),
            c(1.0),
            c(0.0),
            c(0.0),
            c(1.0),
            c(0.0),
        ],
    );
    println!(
        "rank {} krank {}",
        numerical_rank(&m, &policy)?,
        kruskal_rank(&m, &policy)?
    );

    // Vandermonde on distinct nodes: every subset is independent
    let v = CMatrix::from_fn(6, 12, |r, k| {
        Complex64::from_polar(1.0, 0.5 * (r * k) as f64)
    });
    println!("vandermonde 6x12: krank {}", kruskal_rank(&v, &policy)?);

    let tight = RankPolicy::new(1e-9, 100)?;
    let b = kruskal_rank_bounds(&v, &tight)?;
    println!(
        "with a 100-subset budget: krank in [{}, {}]",
        b.lower, b.upper
    );
    Ok(())
}
