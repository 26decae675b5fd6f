//! Sum co-arrays and redundancy patterns of a few generalized nested arrays.
//!
//! `cargo run --release --example geometry`

use coarray::geometry::{gna, redundancy_pattern, sum_coarray, ArrayPair};

fn show(label: &str, arrays: &ArrayPair) {
    let coarray = sum_coarray(arrays);
    println!("{label}: tx {:?} rx {:?}", arrays.tx(), arrays.rx());
    println!(
        "  co-array {:?} (N_sigma = {}, contiguous: {})",
        coarray.positions(),
        coarray.len(),
        coarray.is_contiguous()
    );
    println!("  multiplicities {:?}", coarray.multiplicities());
    for (n, row) in redundancy_pattern(arrays).to_rows().iter().enumerate() {
        println!("  pair {n:>2}: {row:?}");
    }
}

fn main() -> coarray::Result<()> {
    show("ULA 3x2", &gna(3, 2, 1)?);
    show("nested 3x2", &gna(3, 2, 2)?);
    // a sparse pair whose co-array has holes
    show("sparse", &ArrayPair::new(vec![0, 4], vec![0, 1])?);
    Ok(())
}
