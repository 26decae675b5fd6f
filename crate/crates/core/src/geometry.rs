//! Transmit/receive array geometries, the sum co-array and the redundancy
//! pattern that maps physical Tx–Rx pairs onto virtual sensors.
//!
//! Positions are integers in units of half a wavelength. Every list is
//! strictly increasing and starts at zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transmit and receive sensor positions.
///
/// Serializes as `{"tx": [...], "rx": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawArrayPair", into = "RawArrayPair")]
pub struct ArrayPair {
    tx: Vec<usize>,
    rx: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawArrayPair {
    tx: Vec<usize>,
    rx: Vec<usize>,
}

impl TryFrom<RawArrayPair> for ArrayPair {
    type Error = Error;

    fn try_from(raw: RawArrayPair) -> Result<Self> {
        ArrayPair::new(raw.tx, raw.rx)
    }
}

impl From<ArrayPair> for RawArrayPair {
    fn from(pair: ArrayPair) -> Self {
        RawArrayPair {
            tx: pair.tx,
            rx: pair.rx,
        }
    }
}

fn validate_positions(name: &str, positions: &[usize]) -> Result<()> {
    match positions.first() {
        None => return Err(Error::InvalidGeometry(format!("{name} array is empty"))),
        Some(&p) if p != 0 => {
            return Err(Error::InvalidGeometry(format!(
                "{name} array must start at 0, starts at {p}"
            )))
        }
        _ => {}
    }
    if let Some(w) = positions.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGeometry(format!(
            "{name} positions must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

impl ArrayPair {
    pub fn new(tx: Vec<usize>, rx: Vec<usize>) -> Result<Self> {
        validate_positions("tx", &tx)?;
        validate_positions("rx", &rx)?;
        Ok(Self { tx, rx })
    }

    pub fn tx(&self) -> &[usize] {
        &self.tx
    }

    pub fn rx(&self) -> &[usize] {
        &self.rx
    }

    pub fn n_tx(&self) -> usize {
        self.tx.len()
    }

    pub fn n_rx(&self) -> usize {
        self.rx.len()
    }

    /// Position sum of the Tx–Rx pair addressed by a (zero-based) row of the
    /// redundancy pattern. The Rx index varies fastest.
    pub fn pair_sum(&self, row: usize) -> usize {
        let n_rx = self.n_rx();
        self.tx[row / n_rx] + self.rx[row % n_rx]
    }
}

/// Generalized nested array: Tx sensors at multiples of `delta`, Rx sensors
/// at unit spacing. `delta = 1` is the ULA, `delta = n_rx` the nonredundant
/// nested array.
pub fn gna(n_tx: usize, n_rx: usize, delta: usize) -> Result<ArrayPair> {
    if n_tx == 0 || n_rx == 0 || delta == 0 {
        return Err(Error::InvalidArgument(format!(
            "gna requires positive parameters, got ({n_tx}, {n_rx}, {delta})"
        )));
    }
    ArrayPair::new((0..n_tx).map(|n| n * delta).collect(), (0..n_rx).collect())
}

/// Unique pairwise sums of the Tx and Rx positions with their multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumCoarray {
    positions: Vec<usize>,
    multiplicities: Vec<usize>,
}

impl SumCoarray {
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Number of virtual sensors, `N_Σ`.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// True when the virtual sensors fill `{0, 1, …, N_Σ − 1}`.
    pub fn is_contiguous(&self) -> bool {
        self.positions.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Zero-based index of a virtual sensor position.
    pub fn index_of(&self, position: usize) -> Option<usize> {
        self.positions.binary_search(&position).ok()
    }
}

pub fn sum_coarray(arrays: &ArrayPair) -> SumCoarray {
    let mut sums: Vec<usize> = (0..arrays.n_tx() * arrays.n_rx())
        .map(|row| arrays.pair_sum(row))
        .collect();
    sums.sort_unstable();

    let mut positions = Vec::new();
    let mut multiplicities: Vec<usize> = Vec::new();
    for s in sums {
        if positions.last() == Some(&s) {
            *multiplicities.last_mut().expect("pushed with position") += 1;
        } else {
            positions.push(s);
            multiplicities.push(1);
        }
    }
    SumCoarray {
        positions,
        multiplicities,
    }
}

/// Binary `N_tx·N_rx × N_Σ` map from physical Tx–Rx pairs to virtual sensors.
///
/// Row `n` addresses Tx sensor `n / N_rx` and Rx sensor `n % N_rx`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedundancyPattern {
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl RedundancyPattern {
    fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[row * self.cols + col]
    }

    fn set(&mut self, row: usize, col: usize) {
        self.entries[row * self.cols + col] = 1;
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    /// Column of the single nonzero entry in `row`.
    pub fn virtual_index(&self, row: usize) -> usize {
        self.row(row)
            .iter()
            .position(|&e| e == 1)
            .expect("every redundancy pattern row has one nonzero")
    }

    pub fn column_sums(&self) -> Vec<usize> {
        let mut sums = vec![0; self.cols];
        for r in 0..self.rows {
            for (c, &e) in self.row(r).iter().enumerate() {
                sums[c] += e as usize;
            }
        }
        sums
    }

    pub fn to_matrix(&self) -> crate::CMatrix {
        crate::CMatrix::from_fn(self.rows, self.cols, |r, c| {
            crate::Complex64::new(self.get(r, c) as f64, 0.0)
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

pub fn redundancy_pattern(arrays: &ArrayPair) -> RedundancyPattern {
    let coarray = sum_coarray(arrays);
    let rows = arrays.n_tx() * arrays.n_rx();
    let mut upsilon = RedundancyPattern::zeros(rows, coarray.len());
    for row in 0..rows {
        let col = coarray
            .index_of(arrays.pair_sum(row))
            .expect("pair sums are co-array positions");
        upsilon.set(row, col);
    }
    upsilon
}

/// Redundancy pattern of a GNA assembled from staggered identity blocks:
/// Tx block `n` is `[0 | I_{N_rx} | 0]` with the identity starting at
/// column `n·delta`. Only valid in the contiguous regime `delta ≤ n_rx`.
pub fn gna_block_structure(n_tx: usize, n_rx: usize, delta: usize) -> Result<RedundancyPattern> {
    if n_tx == 0 || n_rx == 0 || delta == 0 {
        return Err(Error::InvalidArgument(format!(
            "gna requires positive parameters, got ({n_tx}, {n_rx}, {delta})"
        )));
    }
    if delta > n_rx {
        return Err(Error::UnsupportedGeometry(format!(
            "block structure needs delta <= n_rx, got delta = {delta}, n_rx = {n_rx}"
        )));
    }
    let n_sigma = n_rx + (n_tx - 1) * delta;
    let mut upsilon = RedundancyPattern::zeros(n_tx * n_rx, n_sigma);
    for n in 0..n_tx {
        for m in 0..n_rx {
            upsilon.set(n * n_rx + m, n * delta + m);
        }
    }
    Ok(upsilon)
}
