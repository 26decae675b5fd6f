//! Angular grids, steering (manifold) matrices and the Khatri–Rao identity
//! `A_tx ⊙ A_rx = Υ·A` tying the physical arrays to the sum co-array.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{redundancy_pattern, sum_coarray, ArrayPair};
use crate::{CMatrix, Complex64};

/// Distinct, strictly increasing angles in `[−π/2, π/2)`.
///
/// Serializes as a bare JSON array of radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct AngularGrid {
    angles: Vec<f64>,
}

impl TryFrom<Vec<f64>> for AngularGrid {
    type Error = Error;

    fn try_from(angles: Vec<f64>) -> Result<Self> {
        AngularGrid::new(angles)
    }
}

impl From<AngularGrid> for Vec<f64> {
    fn from(grid: AngularGrid) -> Self {
        grid.angles
    }
}

impl AngularGrid {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if let Some(&a) = angles
            .iter()
            .find(|a| !a.is_finite() || **a < -FRAC_PI_2 || **a >= FRAC_PI_2)
        {
            return Err(Error::InvalidGrid(format!(
                "angle {a} outside [-pi/2, pi/2)"
            )));
        }
        if angles.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(
                "angles must be strictly increasing".into(),
            ));
        }
        Ok(Self { angles })
    }

    /// `v` points equispaced in `sin θ` over `[−1, 1)`. The phase nodes
    /// `exp(jπ sin θ)` are then `v` equispaced points on the unit circle.
    pub fn sin_uniform(v: usize) -> Result<Self> {
        if v == 0 {
            return Err(Error::InvalidGrid("grid needs at least one point".into()));
        }
        Self::new(
            (0..v)
                .map(|i| (-1.0 + 2.0 * i as f64 / v as f64).asin())
                .collect(),
        )
    }

    /// `v` points equispaced in `θ` over `[−π/2, π/2)`.
    pub fn theta_uniform(v: usize) -> Result<Self> {
        if v == 0 {
            return Err(Error::InvalidGrid("grid needs at least one point".into()));
        }
        Self::new(
            (0..v)
                .map(|i| -FRAC_PI_2 + PI * i as f64 / v as f64)
                .collect(),
        )
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// Unit-modulus steering matrix over integer positions.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldMatrix {
    entries: CMatrix,
    positions: Vec<usize>,
}

impl ManifoldMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }
}

/// `entries[n, i] = exp(jπ · positions[n] · sin θ_i)`.
pub fn manifold(positions: &[usize], grid: &AngularGrid) -> ManifoldMatrix {
    let sines: Vec<f64> = grid.angles().iter().map(|a| a.sin()).collect();
    let entries = CMatrix::from_fn(positions.len(), sines.len(), |n, i| {
        Complex64::from_polar(1.0, PI * positions[n] as f64 * sines[i])
    });
    ManifoldMatrix {
        entries,
        positions: positions.to_vec(),
    }
}

/// Column-wise Kronecker product: column `i` is `a[:, i] ⊗ b[:, i]`.
pub fn khatri_rao(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            context: "khatri_rao column count",
            expected: a.ncols(),
            found: b.ncols(),
        });
    }
    let rows_b = b.nrows();
    Ok(CMatrix::from_fn(a.nrows() * rows_b, a.ncols(), |row, i| {
        a[(row / rows_b, i)] * b[(row % rows_b, i)]
    }))
}

/// Largest entrywise deviation `|A_tx ⊙ A_rx − Υ·A|`.
pub fn verify_coarray_identity(arrays: &ArrayPair, grid: &AngularGrid) -> f64 {
    let a_tx = manifold(arrays.tx(), grid);
    let a_rx = manifold(arrays.rx(), grid);
    let coarray = sum_coarray(arrays);
    let a = manifold(coarray.positions(), grid);
    let upsilon = redundancy_pattern(arrays);

    let effective = khatri_rao(a_tx.matrix(), a_rx.matrix()).expect("same grid");
    let mapped = upsilon.to_matrix() * a.matrix();
    (effective - mapped)
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max)
}
