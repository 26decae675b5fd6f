//! Waveform matrices `S` (T samples × N_tx transmitters): rank, rank-revealing
//! factors `S = U·Vᴴ`, transmit beampatterns, the waveform family matched to
//! generalized nested arrays, and a catalog of worked ULA examples.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RedundancyPattern;
use crate::linalg::{kron, numerical_rank, PivotedQr, RankPolicy};
use crate::manifold::{manifold, AngularGrid};
use crate::{CMatrix, Complex64};

/// Spatio-temporal transmit waveform matrix; column `n` is the signal
/// launched from Tx sensor `n`.
///
/// Serializes as `{"t": T, "n_tx": N, "re": [[...]], "im": [[...]]}` with
/// one inner array per time sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWaveform", into = "RawWaveform")]
pub struct WaveformMatrix {
    s: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct RawWaveform {
    t: usize,
    n_tx: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl TryFrom<RawWaveform> for WaveformMatrix {
    type Error = Error;

    fn try_from(raw: RawWaveform) -> Result<Self> {
        let rows_ok = raw.re.len() == raw.t && raw.im.len() == raw.t;
        let cols_ok = raw
            .re
            .iter()
            .chain(raw.im.iter())
            .all(|row| row.len() == raw.n_tx);
        if !rows_ok || !cols_ok {
            return Err(Error::InvalidArgument(format!(
                "waveform arrays do not match t = {}, n_tx = {}",
                raw.t, raw.n_tx
            )));
        }
        WaveformMatrix::new(CMatrix::from_fn(raw.t, raw.n_tx, |r, c| {
            Complex64::new(raw.re[r][c], raw.im[r][c])
        }))
    }
}

impl From<WaveformMatrix> for RawWaveform {
    fn from(w: WaveformMatrix) -> Self {
        let (t, n_tx) = w.s.shape();
        RawWaveform {
            t,
            n_tx,
            re: (0..t)
                .map(|r| (0..n_tx).map(|c| w.s[(r, c)].re).collect())
                .collect(),
            im: (0..t)
                .map(|r| (0..n_tx).map(|c| w.s[(r, c)].im).collect())
                .collect(),
        }
    }
}

impl WaveformMatrix {
    pub fn new(s: CMatrix) -> Result<Self> {
        if s.nrows() == 0 || s.ncols() == 0 {
            return Err(Error::EmptyMatrix {
                rows: s.nrows(),
                cols: s.ncols(),
            });
        }
        if s.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::InvalidArgument(
                "waveform has non-finite entries".into(),
            ));
        }
        Ok(Self { s })
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Result<Self> {
        let t = rows.len();
        let n_tx = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_tx) {
            return Err(Error::InvalidArgument("ragged waveform rows".into()));
        }
        Self::new(CMatrix::from_fn(t, n_tx, |r, c| rows[r][c]))
    }

    /// `T` unit-modulus orthogonal columns: `S[t, n] = exp(−j2π·t·n/T)`.
    pub fn orthogonal(t: usize, n_tx: usize) -> Result<Self> {
        if t < n_tx {
            return Err(Error::WaveformTooShort { t, n_s: n_tx });
        }
        Self::new(CMatrix::from_fn(t, n_tx, |r, c| {
            Complex64::from_polar(1.0, -2.0 * PI * (r * c) as f64 / t as f64)
        }))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.s
    }

    pub fn t(&self) -> usize {
        self.s.nrows()
    }

    pub fn n_tx(&self) -> usize {
        self.s.ncols()
    }

    /// Same waveform scaled so that `‖S‖_F² = energy`.
    pub fn with_energy(&self, energy: f64) -> Result<Self> {
        let norm = self.s.norm();
        if norm == 0.0 {
            return Err(Error::DegenerateWaveform);
        }
        Self::new(&self.s * Complex64::new(energy.sqrt() / norm, 0.0))
    }
}

/// `S = U·Vᴴ` with both factors of full column rank `n_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformFactors {
    pub u: CMatrix,
    pub v: CMatrix,
}

impl WaveformFactors {
    pub fn n_s(&self) -> usize {
        self.u.ncols()
    }

    pub fn product(&self) -> CMatrix {
        &self.u * self.v.adjoint()
    }

    /// `Q = (Vᴴ ⊗ I_{n_rx})·Υ`. `W = (U ⊗ I)·Q`, so `rank Q = rank W`.
    pub fn q_matrix(&self, upsilon: &RedundancyPattern, n_rx: usize) -> CMatrix {
        kron(&self.v.adjoint(), &CMatrix::identity(n_rx, n_rx)) * upsilon.to_matrix()
    }
}

/// Waveform rank `N_s = rank(S)`.
pub fn waveform_rank(s: &WaveformMatrix, policy: &RankPolicy) -> Result<usize> {
    numerical_rank(s.matrix(), policy)
}

/// Rank-revealing factorization from column-pivoted QR: `U` is the leading
/// orthonormal block of Q and `Vᴴ` the matching rows of R, un-permuted.
pub fn decompose(s: &WaveformMatrix, policy: &RankPolicy) -> Result<WaveformFactors> {
    let qr = PivotedQr::new(s.matrix());
    let rank = qr.rank(policy.relative_tolerance);
    if rank == 0 {
        return Err(Error::DegenerateWaveform);
    }
    let u = qr.thin_q(rank);
    let mut vh = CMatrix::zeros(rank, s.n_tx());
    for (k, &col) in qr.permutation().iter().enumerate() {
        for i in 0..rank.min(k + 1) {
            vh[(i, col)] = qr.r()[(i, k)];
        }
    }
    Ok(WaveformFactors { u, v: vh.adjoint() })
}

/// `B_tx(θ_i) = ‖S·a_tx(θ_i)‖₂²` for every grid angle.
pub fn tx_beampattern(
    s: &WaveformMatrix,
    tx_positions: &[usize],
    grid: &AngularGrid,
) -> Result<Vec<f64>> {
    if s.n_tx() != tx_positions.len() {
        return Err(Error::DimensionMismatch {
            context: "tx_beampattern (waveform columns vs Tx sensors)",
            expected: tx_positions.len(),
            found: s.n_tx(),
        });
    }
    let a_tx = manifold(tx_positions, grid);
    let field = s.matrix() * a_tx.matrix();
    Ok((0..grid.len())
        .map(|i| field.column(i).norm_squared())
        .collect())
}

/// Tx sensor (zero-based) driven by each of the `n_s` waveform rows in the
/// matched construction. Every row of `Vᴴ` is a unit row vector.
fn matched_tx_indices(n_tx: usize, n_rx: usize, delta: usize, n_s: usize) -> Vec<usize> {
    let n_sigma = n_rx + (n_tx - 1) * delta;
    let step = n_rx / delta;
    let redundancy_limited = n_sigma.div_ceil(n_rx);
    let base = n_s.min(redundancy_limited);

    let mut active: Vec<usize> = if base * n_rx <= n_sigma {
        // every (n_rx/delta)-th sensor; W reduces to [I | 0]
        (0..base).map(|m| m * step).collect()
    } else {
        // base = ⌈N_Σ/N_rx⌉ with a fractional ratio: last waveform moves to
        // the outermost sensor
        let mut idx: Vec<usize> = (0..base - 1).map(|m| m * step).collect();
        idx.push(n_tx - 1);
        idx
    };

    // rank padding from unused sensors, ascending
    let extra = n_s - base;
    let unused: Vec<usize> = (0..n_tx)
        .filter(|n| !active.contains(n))
        .take(extra)
        .collect();
    active.extend(unused);
    active
}

fn check_matched_args(n_tx: usize, n_rx: usize, delta: usize, n_s: usize, t: usize) -> Result<()> {
    if n_tx == 0 || n_rx == 0 || delta == 0 {
        return Err(Error::InvalidArgument(format!(
            "matched waveform needs positive geometry, got ({n_tx}, {n_rx}, {delta})"
        )));
    }
    if delta > n_rx || !n_rx.is_multiple_of(delta) {
        return Err(Error::UnsupportedGeometry(format!(
            "delta = {delta} must divide n_rx = {n_rx}"
        )));
    }
    if n_s == 0 || n_s > n_tx {
        return Err(Error::InvalidArgument(format!(
            "waveform rank {n_s} outside [1, {n_tx}]"
        )));
    }
    if t < n_s {
        return Err(Error::WaveformTooShort { t, n_s });
    }
    Ok(())
}

/// Factors of the matched waveform: `U = [I_{n_s}; 0]` (T × n_s) and
/// `V = Zᴴ`, where row `k` of `Z` selects one Tx sensor.
pub fn matched_factors(
    n_tx: usize,
    n_rx: usize,
    delta: usize,
    n_s: usize,
    t: usize,
) -> Result<WaveformFactors> {
    check_matched_args(n_tx, n_rx, delta, n_s, t)?;
    let active = matched_tx_indices(n_tx, n_rx, delta, n_s);
    let one = Complex64::new(1.0, 0.0);
    let u = CMatrix::from_fn(
        t,
        n_s,
        |r, c| if r == c { one } else { Complex64::default() },
    );
    let mut v = CMatrix::zeros(n_tx, n_s);
    for (k, &n) in active.iter().enumerate() {
        v[(n, k)] = one;
    }
    Ok(WaveformFactors { u, v })
}

/// Rank-`n_s` waveform matched to the redundancy pattern of
/// `gna(n_tx, n_rx, delta)`; the resulting sensing matrix reaches
/// `krank(B) = min(n_s·n_rx, N_Σ)`. Requires `delta | n_rx` and `t ≥ n_s`.
pub fn gna_matched(
    n_tx: usize,
    n_rx: usize,
    delta: usize,
    n_s: usize,
    t: usize,
) -> Result<WaveformMatrix> {
    let factors = matched_factors(n_tx, n_rx, delta, n_s, t)?;
    WaveformMatrix::new(factors.product())
}

/// Worked two-waveform examples on the 3-Tx/2-Rx ULA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleWaveform {
    /// Orthogonal waveforms from the outer Tx pair; maximal Kruskal rank.
    Ex3a,
    /// Orthogonal waveforms from the first two Tx sensors; rank-deficient W.
    Ex3b,
    /// Non-orthogonal unit-modulus waveforms on all sensors; maximal.
    Ex4a,
    /// Non-orthogonal unit-modulus waveforms on all sensors; rank(Q) = 3.
    Ex4b,
}

impl ExampleWaveform {
    pub const ALL: [ExampleWaveform; 4] = [Self::Ex3a, Self::Ex3b, Self::Ex4a, Self::Ex4b];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ex3a => "ex3a",
            Self::Ex3b => "ex3b",
            Self::Ex4a => "ex4a",
            Self::Ex4b => "ex4b",
        }
    }
}

impl fmt::Display for ExampleWaveform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleWaveform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown example waveform {s:?}")))
    }
}

pub fn example_waveform(which: ExampleWaveform) -> WaveformMatrix {
    let c = Complex64::new;
    let rows: [[Complex64; 3]; 2] = match which {
        ExampleWaveform::Ex3a => [
            [c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            [c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        ],
        ExampleWaveform::Ex3b => [
            [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)],
        ],
        ExampleWaveform::Ex4a => {
            let w = Complex64::from_polar(1.0, PI / 3.0);
            [[c(1.0, 0.0), w.conj(), w], [c(1.0, 0.0), w, w.conj()]]
        }
        ExampleWaveform::Ex4b => {
            // u2 = [e^{jφ}, e^{−jφ}] with cos φ = −61/72 (sin φ > 0); the
            // middle column 3/2·u1 + 2/3·u2 = [e^{jϑ}, e^{−jϑ}] then has
            // cos ϑ = 3/2 + 2/3·cos φ = 101/108 and sin ϑ = √1463/108.
            let root = 1463f64.sqrt();
            let phi = c(-61.0 / 72.0, root / 72.0);
            let vartheta = c(101.0 / 108.0, root / 108.0);
            [
                [c(1.0, 0.0), vartheta, phi],
                [c(1.0, 0.0), vartheta.conj(), phi.conj()],
            ]
        }
    };
    WaveformMatrix::from_rows(&[&rows[0], &rows[1]]).expect("catalog entries are valid")
}
