//! Small dense complex linear algebra: numerical rank under a fixed relative
//! tolerance, Kruskal rank, Kronecker products and the null-space/range-space
//! intersection used by the waveform–array matching condition.

mod krank;
mod qr;

pub use krank::{
    first_dependent_subset, krank_at_least, kruskal_rank, kruskal_rank_bounds, KruskalBounds,
};
pub use qr::PivotedQr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RedundancyPattern;
use crate::waveform::WaveformMatrix;
use crate::{CMatrix, CVector};

/// Tolerance and enumeration limits shared by every rank decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankPolicy {
    /// Pivots at or below this fraction of the largest column norm are zero.
    pub relative_tolerance: f64,
    /// Largest number of column subsets enumerated at one subset size.
    pub max_subset_budget: u64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-9,
            max_subset_budget: 2_000_000,
        }
    }
}

impl RankPolicy {
    pub fn new(relative_tolerance: f64, max_subset_budget: u64) -> Result<Self> {
        let policy = Self {
            relative_tolerance,
            max_subset_budget,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance <= 1e-3) {
            return Err(Error::InvalidPolicy(format!(
                "relative tolerance must lie in (0, 1e-3], got {}",
                self.relative_tolerance
            )));
        }
        if self.max_subset_budget == 0 {
            return Err(Error::InvalidPolicy(
                "subset budget must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Rank together with a flag for pivots near the cut-off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankDiagnostics {
    pub rank: usize,
    pub borderline: bool,
}

pub(crate) fn ensure_nonempty(m: &CMatrix) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::EmptyMatrix {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

pub fn rank_diagnostics(m: &CMatrix, policy: &RankPolicy) -> Result<RankDiagnostics> {
    ensure_nonempty(m)?;
    let qr = PivotedQr::new(m);
    let tol = policy.relative_tolerance;
    let diag = RankDiagnostics {
        rank: qr.rank(tol),
        borderline: qr.borderline(tol),
    };
    if diag.borderline {
        log::warn!(
            "rank decision of a {}x{} matrix is borderline: pivots {:?} near cut-off {:e}",
            m.nrows(),
            m.ncols(),
            qr.diagonal(),
            tol
        );
    }
    Ok(diag)
}

/// Number of column-pivoted QR pivots exceeding
/// `relative_tolerance × (largest column norm)`.
pub fn numerical_rank(m: &CMatrix, policy: &RankPolicy) -> Result<usize> {
    Ok(rank_diagnostics(m, policy)?.rank)
}

/// Standard Kronecker product; row `p·rows(b) + r` of the result pairs row
/// `p` of `a` with row `r` of `b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Least-squares fit of `y` on the columns of `a`, via orthogonal
/// factorization. Returns the coefficients and the residual norm
/// `‖y − a·z‖₂`.
pub fn least_squares(a: &CMatrix, y: &CVector, policy: &RankPolicy) -> (CVector, f64) {
    if a.ncols() == 0 {
        return (CVector::zeros(0), y.norm());
    }
    let qr = PivotedQr::new(a);
    let z = qr.solve_least_squares(y, qr.rank(policy.relative_tolerance));
    let residual = (y - a * &z).norm();
    (z, residual)
}

/// `dim(𝒩(S⊗I) ∩ ℛ(Υ)) = rank(Υ) − rank((S⊗I_{n_rx})·Υ)`.
pub fn intersection_dim(
    s: &WaveformMatrix,
    upsilon: &RedundancyPattern,
    n_rx: usize,
    policy: &RankPolicy,
) -> Result<usize> {
    let expected_rows = s.n_tx() * n_rx;
    if upsilon.rows() != expected_rows {
        return Err(Error::DimensionMismatch {
            context: "intersection_dim (rows of redundancy pattern)",
            expected: expected_rows,
            found: upsilon.rows(),
        });
    }
    let ups = upsilon.to_matrix();
    let w = kron(s.matrix(), &CMatrix::identity(n_rx, n_rx)) * &ups;
    let rank_ups = numerical_rank(&ups, policy)?;
    let rank_w = numerical_rank(&w, policy)?;
    Ok(rank_ups.saturating_sub(rank_w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn identity(n: usize) -> CMatrix {
        CMatrix::identity(n, n)
    }

    #[test]
    fn rank_of_identity_and_zero() {
        let p = RankPolicy::default();
        assert_eq!(numerical_rank(&identity(5), &p).unwrap(), 5);
        assert_eq!(numerical_rank(&CMatrix::zeros(3, 4), &p).unwrap(), 0);
    }

    #[test]
    fn empty_matrices_are_rejected() {
        let p = RankPolicy::default();
        assert!(matches!(
            numerical_rank(&CMatrix::zeros(0, 3), &p),
            Err(Error::EmptyMatrix { .. })
        ));
        assert!(kruskal_rank(&CMatrix::zeros(2, 0), &p).is_err());
    }

    #[test]
    fn policy_bounds() {
        assert!(RankPolicy::new(0.0, 10).is_err());
        assert!(RankPolicy::new(1e-2, 10).is_err());
        assert!(RankPolicy::new(1e-9, 0).is_err());
        assert!(RankPolicy::new(1e-3, 1).is_ok());
    }

    #[test]
    fn borderline_pivot_is_flagged() {
        let p = RankPolicy::default();
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(5e-10, 0.0)]));
        let d = rank_diagnostics(&m, &p).unwrap();
        assert_eq!(d.rank, 1);
        assert!(d.borderline);
        let clear = rank_diagnostics(&identity(2), &p).unwrap();
        assert!(!clear.borderline);
    }

    #[test]
    fn kron_identities() {
        let one = CMatrix::from_element(1, 1, c(1.0, 0.0));
        let m =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.0, 1.0), c(3.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(kron(&one, &m), m);
        assert_eq!(kron(&identity(2), &identity(3)), identity(6));
    }

    #[test]
    fn kron_matches_index_definition() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 1.0), c(3.0, -1.0)],
        );
        let b = CMatrix::from_row_slice(3, 1, &[c(2.0, 0.0), c(0.0, -1.0), c(1.0, 1.0)]);
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (6, 2));
        for p in 0..2 {
            for q in 0..2 {
                for r in 0..3 {
                    for s in 0..1 {
                        assert_eq!(k[(p * 3 + r, q + s)], a[(p, q)] * b[(r, s)]);
                    }
                }
            }
        }
    }

    #[test]
    fn krank_zero_column_and_identity() {
        let p = RankPolicy::default();
        let mut m = identity(4);
        assert_eq!(kruskal_rank(&m, &p).unwrap(), 4);
        m.set_column(2, &CVector::zeros(4));
        assert_eq!(kruskal_rank(&m, &p).unwrap(), 0);
    }

    #[test]
    fn krank_of_vandermonde_is_full() {
        // 4 x 8 Vandermonde on distinct unit-circle nodes
        let p = RankPolicy::default();
        let nodes: Vec<Complex64> = (0..8)
            .map(|i| {
                Complex64::from_polar(1.0, std::f64::consts::PI * (-1.0 + 2.0 * i as f64 / 8.0))
            })
            .collect();
        let m = CMatrix::from_fn(4, 8, |r, col| nodes[col].powu(r as u32));
        assert_eq!(kruskal_rank(&m, &p).unwrap(), 4);
    }

    #[test]
    fn krank_detects_repeated_column() {
        let p = RankPolicy::default();
        let mut m = identity(3).insert_column(3, c(0.0, 0.0));
        let col = m.column(1) * c(0.0, 2.0);
        m.set_column(3, &col);
        assert_eq!(kruskal_rank(&m, &p).unwrap(), 1);
        assert_eq!(first_dependent_subset(&m, 2, &p), Some(vec![1, 3]));
    }

    #[test]
    fn krank_budget_reports_bounds() {
        let p = RankPolicy::new(1e-9, 10).unwrap();
        let nodes: Vec<Complex64> = (0..14)
            .map(|i| Complex64::from_polar(1.0, 0.4 * i as f64))
            .collect();
        let m = CMatrix::from_fn(7, 14, |r, col| nodes[col].powu(r as u32));
        match kruskal_rank(&m, &p) {
            Err(Error::KruskalBudget { lower, upper, .. }) => {
                assert!(lower >= 1);
                assert_eq!(upper, 7);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn least_squares_residual() {
        let p = RankPolicy::default();
        let a = CMatrix::from_row_slice(3, 1, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let y = CVector::from_vec(vec![c(2.0, 0.0), c(0.0, 3.0), c(4.0, 0.0)]);
        let (z, res) = least_squares(&a, &y, &p);
        assert!((z[0] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((res - 5.0).abs() < 1e-12);
    }
}
