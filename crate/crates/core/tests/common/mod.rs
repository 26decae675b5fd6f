//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the library's rank or co-array code.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::f64::consts::PI;

use coarray::{CMatrix, Complex64};
use nalgebra::SVD;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Co-array positions and 0/1 pattern by a plain triple loop over
/// (tx, rx, virtual position); row `i·N_rx + j` belongs to pair `(i, j)`.
pub fn brute_upsilon(tx: &[usize], rx: &[usize]) -> (Vec<usize>, Vec<Vec<u8>>) {
    let mut sums = BTreeSet::new();
    for &a in tx {
        for &b in rx {
            sums.insert(a + b);
        }
    }
    let positions: Vec<usize> = sums.into_iter().collect();
    let mut rows = Vec::new();
    for &a in tx {
        for &b in rx {
            let mut row = vec![0u8; positions.len()];
            for (l, &p) in positions.iter().enumerate() {
                if a + b == p {
                    row[l] = 1;
                }
            }
            rows.push(row);
        }
    }
    (positions, rows)
}

/// `exp(jπ·p·sin θ)` evaluated entry by entry.
pub fn steering(positions: &[usize], angles: &[f64]) -> CMatrix {
    CMatrix::from_fn(positions.len(), angles.len(), |r, c| {
        Complex64::from_polar(1.0, PI * positions[r] as f64 * angles[c].sin())
    })
}

/// Rank from singular values: `σ_i > tol·max column norm`.
pub fn svd_rank(m: &CMatrix, tol: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let scale = m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol * scale)
        .count()
}

pub fn select_columns(m: &CMatrix, cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}

/// Every `r`-subset of `0..n`, generated recursively.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// Largest `r` such that every `r` columns are independent, by SVD of every
/// subset in increasing size.
pub fn brute_krank(m: &CMatrix, tol: f64) -> usize {
    let n = m.ncols();
    for r in 1..=n.min(m.nrows()) {
        let dependent = subsets(n, r)
            .iter()
            .any(|s| svd_rank(&select_columns(m, s), tol) < r);
        if dependent {
            return r - 1;
        }
    }
    n.min(m.nrows())
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Random matrix of exact rank `rank` (as a product of two Gaussian factors).
pub fn random_rank(rng: &mut ChaCha8Rng, rows: usize, cols: usize, rank: usize) -> CMatrix {
    if rank == 0 {
        return CMatrix::zeros(rows, cols);
    }
    random_matrix(rng, rows, rank) * random_matrix(rng, rank, cols)
}

/// Random matrix where some columns are copies or combinations of others,
/// so the Kruskal rank is usually below the rank.
pub fn random_with_dependencies(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let mut m = random_matrix(rng, rows, cols);
    if cols < 2 {
        return m;
    }
    for _ in 0..rng.random_range(0..=2) {
        let target = rng.random_range(0..cols);
        let others: Vec<usize> = (0..cols).filter(|&c| c != target).collect();
        let a = others[rng.random_range(0..others.len())];
        let mut col = m.column(a) * gaussian(rng);
        if rng.random_bool(0.5) {
            let b = others[rng.random_range(0..others.len())];
            col += m.column(b) * gaussian(rng);
        }
        m.set_column(target, &col);
    }
    m
}

/// Distinct sorted sensor positions starting at 0, at most `span` apart.
pub fn random_positions(rng: &mut ChaCha8Rng, count: usize, span: usize) -> Vec<usize> {
    let mut set = BTreeSet::from([0]);
    while set.len() < count {
        set.insert(rng.random_range(1..=span.max(count)));
    }
    set.into_iter().collect()
}

/// Strictly increasing angles in `[−π/2, π/2)` whose sines are at least
/// `0.05` apart, so random grids stay well conditioned.
pub fn random_angles(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    assert!(
        count <= 20,
        "at most 20 separated angles, asked for {count}"
    );
    let mut sines: Vec<f64> = Vec::new();
    while sines.len() < count {
        let s: f64 = rng.random_range(-0.99..0.99);
        if sines.iter().all(|t| (t - s).abs() >= 0.05) {
            sines.push(s);
        }
    }
    sines.sort_by(f64::total_cmp);
    sines.into_iter().map(f64::asin).collect()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
