//! Exact Kruskal rank by exhaustive enumeration of column subsets.
//!
//! Subsets of one size are walked depth-first in lexicographic order while
//! an orthonormal basis of the current prefix is kept, so every extension
//! costs one projection instead of a fresh factorization. A subset counts
//! as independent when each column, taken in index order, keeps a residual
//! above `tol` times the largest column norm in the subset after projection
//! onto the preceding columns.

use rayon::prelude::*;

use super::{numerical_rank, PivotedQr, RankPolicy};
use crate::error::{Error, Result};
use crate::subsets::binomial;
use crate::{CMatrix, Complex64};

/// Search levels whose subset count is at most this are scanned bottom-up
/// before the top-down pass.
const PRESCAN_LIMIT: u128 = 4096;

/// Bounds on the Kruskal rank. `lower == upper` means the value is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KruskalBounds {
    pub lower: usize,
    pub upper: usize,
    /// Size and count of the first level that could not be enumerated.
    pub blocked: Option<(usize, u128)>,
}

impl KruskalBounds {
    pub fn exact(r: usize) -> Self {
        Self {
            lower: r,
            upper: r,
            blocked: None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn value(&self) -> Option<usize> {
        self.is_exact().then_some(self.lower)
    }
}

/// Column data laid out for fast projections.
pub(crate) struct ColumnSet {
    rows: usize,
    data: Vec<Complex64>,
    norms: Vec<f64>,
    tol: f64,
}

impl ColumnSet {
    pub(crate) fn new(m: &CMatrix, tol: f64) -> Self {
        let rows = m.nrows();
        let data: Vec<Complex64> = m.iter().copied().collect();
        let norms = (0..m.ncols()).map(|j| m.column(j).norm()).collect();
        Self {
            rows,
            data,
            norms,
            tol,
        }
    }

    fn n(&self) -> usize {
        self.norms.len()
    }

    fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Lexicographically first `r`-subset that is numerically dependent.
    pub(crate) fn first_dependent(&self, r: usize) -> Option<Vec<usize>> {
        let n = self.n();
        if r == 0 || r > n {
            return None;
        }
        if r > self.rows {
            // more columns than dimensions: every subset is dependent
            return Some((0..r).collect());
        }
        (0..=n - r).into_par_iter().find_map_first(|first| {
            let mut walker = Walker::new(self, r);
            walker.descend(0, first, first + 1, 0.0, f64::INFINITY)
        })
    }
}

struct Walker<'a> {
    cols: &'a ColumnSet,
    r: usize,
    basis: Vec<Complex64>,
    path: Vec<usize>,
    scratch: Vec<Complex64>,
}

impl<'a> Walker<'a> {
    fn new(cols: &'a ColumnSet, r: usize) -> Self {
        Self {
            cols,
            r,
            basis: vec![Complex64::new(0.0, 0.0); r * cols.rows],
            path: Vec::with_capacity(r),
            scratch: vec![Complex64::new(0.0, 0.0); cols.rows],
        }
    }

    /// Places column `j` at depth `depth`, then continues with candidates
    /// `next..`. Returns the first dependent subset found.
    fn descend(
        &mut self,
        depth: usize,
        j: usize,
        next: usize,
        max_norm: f64,
        min_residual: f64,
    ) -> Option<Vec<usize>> {
        let residual = self.project(depth, j);
        let max_norm = max_norm.max(self.cols.norms[j]);
        let min_residual = min_residual.min(residual);
        self.path.push(j);

        // the max norm only grows along a path, so a failed prefix fails
        // every completion; report the smallest one
        if min_residual <= self.cols.tol * max_norm {
            let mut subset = self.path.clone();
            subset.extend(j + 1..j + 1 + (self.r - depth - 1));
            self.path.pop();
            return Some(subset);
        }

        if depth + 1 < self.r {
            let n = self.cols.n();
            let remaining = self.r - depth - 1;
            for k in next..=n - remaining {
                if let Some(found) = self.descend(depth + 1, k, k + 1, max_norm, min_residual) {
                    self.path.pop();
                    return Some(found);
                }
            }
        }
        self.path.pop();
        None
    }

    /// Orthogonalizes column `j` against the first `depth` basis vectors
    /// (two Gram–Schmidt passes), stores the normalized result at slot
    /// `depth`, and returns the residual norm.
    fn project(&mut self, depth: usize, j: usize) -> f64 {
        let m = self.cols.rows;
        self.scratch.copy_from_slice(self.cols.column(j));
        for _ in 0..2 {
            for b in 0..depth {
                let q = &self.basis[b * m..(b + 1) * m];
                let dot: Complex64 = q
                    .iter()
                    .zip(&self.scratch)
                    .map(|(qi, xi)| qi.conj() * xi)
                    .sum();
                for (xi, qi) in self.scratch.iter_mut().zip(q) {
                    *xi -= qi * dot;
                }
            }
        }
        let residual = self
            .scratch
            .iter()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > 0.0 && depth < self.r {
            let slot = &mut self.basis[depth * m..(depth + 1) * m];
            for (dst, src) in slot.iter_mut().zip(&self.scratch) {
                *dst = src / residual;
            }
        }
        residual
    }
}

/// Coordinates of the columns in an orthonormal basis of the column space
/// when that space is smaller than the ambient one. Column norms and
/// inner products are preserved, so every subset keeps its rank.
fn compress_rows(m: &CMatrix, rank: usize) -> Option<CMatrix> {
    if rank == 0 || rank >= m.nrows() {
        return None;
    }
    let q = PivotedQr::new(m).thin_q(rank);
    Some(q.adjoint() * m)
}

/// Bounds on the Kruskal rank, exact whenever enumeration stays within
/// `policy.max_subset_budget` at the levels that decide it.
pub fn kruskal_rank_bounds(m: &CMatrix, policy: &RankPolicy) -> Result<KruskalBounds> {
    policy.validate()?;
    let rank = numerical_rank(m, policy)?;
    let n = m.ncols();
    let compressed = compress_rows(m, rank);
    let cols = ColumnSet::new(compressed.as_ref().unwrap_or(m), policy.relative_tolerance);

    let largest = cols.norms.iter().copied().fold(0.0, f64::max);
    if largest == 0.0
        || cols
            .norms
            .iter()
            .any(|&c| c <= policy.relative_tolerance * largest)
    {
        return Ok(KruskalBounds::exact(0));
    }

    let mut lower = 1;
    let mut upper = rank.min(n);
    if upper <= lower {
        return Ok(KruskalBounds::exact(upper));
    }

    // cheap bottom-up pass catches small Kruskal ranks early
    let budget = policy.max_subset_budget as u128;
    let mut r = 2;
    while r <= upper && binomial(n, r) <= PRESCAN_LIMIT.min(budget) {
        if cols.first_dependent(r).is_some() {
            return Ok(KruskalBounds::exact(r - 1));
        }
        lower = r;
        r += 1;
    }
    if lower == upper {
        return Ok(KruskalBounds::exact(lower));
    }

    let mut blocked = None;

    // top-down: the first fully independent level is the answer
    let mut r = upper;
    while r > lower {
        let count = binomial(n, r);
        if count > budget {
            blocked = Some((r, count));
            break;
        }
        if cols.first_dependent(r).is_none() {
            return Ok(KruskalBounds::exact(r));
        }
        upper = r - 1;
        r -= 1;
    }
    if lower == upper {
        return Ok(KruskalBounds::exact(lower));
    }

    // bottom-up from the verified lower bound while the budget allows
    let mut r = lower + 1;
    while r <= upper {
        let count = binomial(n, r);
        if count > budget {
            blocked.get_or_insert((r, count));
            break;
        }
        if cols.first_dependent(r).is_some() {
            upper = r - 1;
            break;
        }
        lower = r;
        r += 1;
    }
    Ok(KruskalBounds {
        lower,
        upper,
        blocked: if lower == upper { None } else { blocked },
    })
}

/// Largest `r` such that every `r` columns are numerically independent.
/// Zero when any column is numerically zero.
pub fn kruskal_rank(m: &CMatrix, policy: &RankPolicy) -> Result<usize> {
    let bounds = kruskal_rank_bounds(m, policy)?;
    match bounds.value() {
        Some(r) => Ok(r),
        None => {
            let (r, _) = bounds.blocked.unwrap_or((bounds.lower + 1, 0));
            Err(Error::KruskalBudget {
                n: m.ncols(),
                r,
                budget: policy.max_subset_budget,
                lower: bounds.lower,
                upper: bounds.upper,
            })
        }
    }
}

/// True when every `r` columns are numerically independent, i.e.
/// `krank(m) ≥ r`. Only subsets of size `r` are enumerated.
pub fn krank_at_least(m: &CMatrix, r: usize, policy: &RankPolicy) -> Result<bool> {
    policy.validate()?;
    super::ensure_nonempty(m)?;
    if r == 0 {
        return Ok(true);
    }
    let n = m.ncols();
    if r > n || r > m.nrows() {
        return Ok(false);
    }
    let cols = ColumnSet::new(m, policy.relative_tolerance);
    let largest = cols.norms.iter().copied().fold(0.0, f64::max);
    if cols
        .norms
        .iter()
        .any(|&c| c <= policy.relative_tolerance * largest)
    {
        return Ok(false);
    }
    let count = binomial(n, r);
    if count > policy.max_subset_budget as u128 {
        return Err(Error::KruskalBudget {
            n,
            r,
            budget: policy.max_subset_budget,
            lower: 0,
            upper: r.min(m.nrows()),
        });
    }
    Ok(cols.first_dependent(r).is_none())
}

/// Lexicographically first numerically dependent subset of `r` columns.
pub fn first_dependent_subset(m: &CMatrix, r: usize, policy: &RankPolicy) -> Option<Vec<usize>> {
    ColumnSet::new(m, policy.relative_tolerance).first_dependent(r)
}
