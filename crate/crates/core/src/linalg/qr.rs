//! Householder QR with column pivoting for small dense complex matrices.

use crate::{CMatrix, CVector, Complex64};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `A·P = Q·R` where pivoting picks the column of largest remaining norm at
/// every step, so `|R[k,k]|` is nonincreasing.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    /// Upper triangle holds R; reflectors are kept separately.
    r: CMatrix,
    /// Unit-scaled reflectors `v` with `H = I − v·vᴴ`, `‖v‖² = 2`
    /// (or zero for a skipped step), acting on rows `k..`.
    reflectors: Vec<CVector>,
    perm: Vec<usize>,
}

impl PivotedQr {
    pub fn new(a: &CMatrix) -> Self {
        let (m, n) = a.shape();
        let mut r = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let steps = m.min(n);
        let mut reflectors = Vec::with_capacity(steps);

        for k in 0..steps {
            // remaining norms recomputed exactly; matrices here are tiny
            let (pivot, _) =
                (k..n)
                    .map(|j| (j, tail_norm_sq(&r, k, j)))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot != k {
                r.swap_columns(k, pivot);
                perm.swap(k, pivot);
            }

            let norm = tail_norm_sq(&r, k, k).sqrt();
            let mut v = CVector::zeros(m - k);
            if norm > 0.0 {
                let x0 = r[(k, k)];
                let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
                let alpha = -phase * norm;
                for i in k..m {
                    v[i - k] = r[(i, k)];
                }
                v[0] -= alpha;
                let vnorm = v.norm();
                if vnorm > 0.0 {
                    v *= Complex64::new(std::f64::consts::SQRT_2 / vnorm, 0.0);
                    apply_reflector(&mut r, &v, k, k);
                }
                r[(k, k)] = alpha;
                for i in k + 1..m {
                    r[(i, k)] = ZERO;
                }
            }
            reflectors.push(v);
        }

        Self {
            r,
            reflectors,
            perm,
        }
    }

    /// `perm[k]` is the original index of the k-th pivoted column.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn r(&self) -> &CMatrix {
        &self.r
    }

    /// Magnitudes of the diagonal of R, in pivot order.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.reflectors.len())
            .map(|k| self.r[(k, k)].norm())
            .collect()
    }

    /// Number of diagonal entries above `tol · |R[0,0]|`. The first pivot is
    /// the largest column norm of the input.
    pub fn rank(&self, tol: f64) -> usize {
        let diag = self.diagonal();
        match diag.first() {
            Some(&lead) if lead > 0.0 => diag.iter().take_while(|&&d| d > tol * lead).count(),
            _ => 0,
        }
    }

    /// True when some pivot sits within a factor of 10 of the cut-off.
    pub fn borderline(&self, tol: f64) -> bool {
        let diag = self.diagonal();
        let Some(&lead) = diag.first() else {
            return false;
        };
        let cut = tol * lead;
        lead > 0.0 && diag.iter().any(|&d| d > cut / 10.0 && d < cut * 10.0)
    }

    /// `Qᴴ·y`.
    pub fn apply_qh(&self, y: &CVector) -> CVector {
        let mut out = y.clone();
        for (k, v) in self.reflectors.iter().enumerate() {
            let dot: Complex64 = (0..v.len()).map(|i| v[i].conj() * out[k + i]).sum();
            for i in 0..v.len() {
                out[k + i] -= v[i] * dot;
            }
        }
        out
    }

    /// First `cols` columns of Q.
    pub fn thin_q(&self, cols: usize) -> CMatrix {
        let m = self.r.nrows();
        let mut q = CMatrix::zeros(m, cols);
        for c in 0..cols {
            q[(c, c)] = ONE;
        }
        for (k, v) in self.reflectors.iter().enumerate().rev() {
            apply_reflector(&mut q, v, k, 0);
        }
        q
    }

    /// Solves `R[:rank, :rank]·w = rhs` by back substitution.
    fn back_substitute(&self, rank: usize, rhs: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        let mut w = vec![ZERO; rank];
        for i in (0..rank).rev() {
            let tail: Complex64 = (i + 1..rank).map(|j| self.r[(i, j)] * w[j]).sum();
            w[i] = (rhs(i) - tail) / self.r[(i, i)];
        }
        w
    }

    /// Basic least-squares solution using the leading `rank` pivots; the
    /// remaining coefficients are zero.
    pub fn solve_least_squares(&self, y: &CVector, rank: usize) -> CVector {
        let n = self.r.ncols();
        let c = self.apply_qh(y);
        let w = self.back_substitute(rank, |i| c[i]);
        let mut z = CVector::zeros(n);
        for (i, wi) in w.into_iter().enumerate() {
            z[self.perm[i]] = wi;
        }
        z
    }

    /// A nonzero null vector when the numerical rank is below the column
    /// count, scaled to unit max-modulus.
    pub fn null_vector(&self, tol: f64) -> Option<CVector> {
        let n = self.r.ncols();
        let rank = self.rank(tol);
        if rank >= n {
            return None;
        }
        // R11·w = R[:rank, rank], null = [−w; 1; 0…] in pivoted order
        let w = self.back_substitute(rank, |i| self.r[(i, rank)]);
        let mut z = CVector::zeros(n);
        for (i, wi) in w.into_iter().enumerate() {
            z[self.perm[i]] = -wi;
        }
        z[self.perm[rank]] = ONE;
        let scale = z.iter().map(|c| c.norm()).fold(0.0, f64::max);
        Some(z.unscale(scale))
    }
}

fn tail_norm_sq(a: &CMatrix, row: usize, col: usize) -> f64 {
    (row..a.nrows()).map(|i| a[(i, col)].norm_sqr()).sum()
}

/// Applies `I − v·vᴴ` to rows `k..` of columns `from..` of `a`.
fn apply_reflector(a: &mut CMatrix, v: &CVector, k: usize, from: usize) {
    for j in from..a.ncols() {
        let dot: Complex64 = (0..v.len()).map(|i| v[i].conj() * a[(k + i, j)]).sum();
        if dot == ZERO {
            continue;
        }
        for i in 0..v.len() {
            let vi = v[i];
            a[(k + i, j)] -= vi * dot;
        }
    }
}
