//! Spatio-temporal sensing matrix `B = (S·A_tx) ⊙ A_rx = W·A`, received
//! data synthesis and exact-SNR noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{redundancy_pattern, sum_coarray, ArrayPair, RedundancyPattern};
use crate::linalg::kron;
use crate::manifold::{khatri_rao, manifold, AngularGrid};
use crate::waveform::WaveformMatrix;
use crate::{CMatrix, CVector, Complex64};

/// Largest entrywise disagreement tolerated between the two constructions
/// of `B`.
pub const FACTORIZATION_TOLERANCE: f64 = 1e-9;

/// Sensing matrix `B` (T·N_rx × V) with its co-array factorization
/// `B = W·A`, `W = (S⊗I)·Υ`.
#[derive(Debug, Clone)]
pub struct SensingMatrix {
    b: CMatrix,
    w: CMatrix,
    a: CMatrix,
    upsilon: RedundancyPattern,
    grid: AngularGrid,
    n_rx: usize,
}

impl SensingMatrix {
    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn w(&self) -> &CMatrix {
        &self.w
    }

    /// Sum co-array manifold.
    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn upsilon(&self) -> &RedundancyPattern {
        &self.upsilon
    }

    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn t(&self) -> usize {
        self.b.nrows() / self.n_rx
    }
}

/// Builds `B` as `(S·A_tx) ⊙ A_rx` and as `W·A`; the two must agree.
pub fn build_sensing_matrix(
    s: &WaveformMatrix,
    arrays: &ArrayPair,
    grid: &AngularGrid,
) -> Result<SensingMatrix> {
    if s.n_tx() != arrays.n_tx() {
        return Err(Error::DimensionMismatch {
            context: "build_sensing_matrix (waveform columns vs Tx sensors)",
            expected: arrays.n_tx(),
            found: s.n_tx(),
        });
    }
    let n_rx = arrays.n_rx();
    let a_tx = manifold(arrays.tx(), grid);
    let a_rx = manifold(arrays.rx(), grid);
    let coarray = sum_coarray(arrays);
    let a = manifold(coarray.positions(), grid).into_matrix();
    let upsilon = redundancy_pattern(arrays);

    let w = kron(s.matrix(), &CMatrix::identity(n_rx, n_rx)) * upsilon.to_matrix();
    let b = &w * &a;
    let direct = khatri_rao(&(s.matrix() * a_tx.matrix()), a_rx.matrix())?;

    let deviation = (&direct - &b).iter().map(|d| d.norm()).fold(0.0, f64::max);
    if deviation > FACTORIZATION_TOLERANCE {
        return Err(Error::Consistency {
            context: "B = (S A_tx) kr A_rx versus B = W A",
            deviation,
        });
    }
    Ok(SensingMatrix {
        b,
        w,
        a,
        upsilon,
        grid: grid.clone(),
        n_rx,
    })
}

/// Sparse scattering scene on a grid.
///
/// Serializes as `{"angles": [...], "support": [...], "coeff_re": [...],
/// "coeff_im": [...]}` where the coefficient arrays follow `support`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScene", into = "RawScene")]
pub struct Scene {
    grid: AngularGrid,
    x: CVector,
    support: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawScene {
    angles: Vec<f64>,
    support: Vec<usize>,
    coeff_re: Vec<f64>,
    coeff_im: Vec<f64>,
}

impl TryFrom<RawScene> for Scene {
    type Error = Error;

    fn try_from(raw: RawScene) -> Result<Self> {
        if raw.coeff_re.len() != raw.support.len() || raw.coeff_im.len() != raw.support.len() {
            return Err(Error::InvalidArgument(
                "scene coefficients must have one entry per support index".into(),
            ));
        }
        let coeffs: Vec<Complex64> = raw
            .coeff_re
            .iter()
            .zip(&raw.coeff_im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        Scene::from_support(AngularGrid::new(raw.angles)?, &raw.support, &coeffs)
    }
}

impl From<Scene> for RawScene {
    fn from(scene: Scene) -> Self {
        let coeffs: Vec<Complex64> = scene.support.iter().map(|&i| scene.x[i]).collect();
        RawScene {
            angles: scene.grid.angles().to_vec(),
            support: scene.support,
            coeff_re: coeffs.iter().map(|c| c.re).collect(),
            coeff_im: coeffs.iter().map(|c| c.im).collect(),
        }
    }
}

impl Scene {
    /// Scene from a dense coefficient vector; the support is its nonzeros.
    pub fn new(grid: AngularGrid, x: CVector) -> Result<Self> {
        if x.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                context: "scene coefficients vs grid size",
                expected: grid.len(),
                found: x.len(),
            });
        }
        let support = (0..x.len())
            .filter(|&i| x[i] != Complex64::default())
            .collect();
        Ok(Self { grid, x, support })
    }

    pub fn from_support(
        grid: AngularGrid,
        support: &[usize],
        coeffs: &[Complex64],
    ) -> Result<Self> {
        if support.len() != coeffs.len() {
            return Err(Error::InvalidArgument(
                "one coefficient per support index required".into(),
            ));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "support must be strictly increasing".into(),
            ));
        }
        if support.last().is_some_and(|&i| i >= grid.len()) {
            return Err(Error::InvalidArgument(
                "support index outside the grid".into(),
            ));
        }
        if coeffs.iter().any(|c| *c == Complex64::default()) {
            return Err(Error::InvalidArgument(
                "support coefficients must be nonzero".into(),
            ));
        }
        let mut x = CVector::zeros(grid.len());
        for (&i, &c) in support.iter().zip(coeffs) {
            x[i] = c;
        }
        Ok(Self {
            grid,
            x,
            support: support.to_vec(),
        })
    }

    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    pub fn x(&self) -> &CVector {
        &self.x
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }
}

/// Noiseless measurements `y = B·x`.
pub fn synthesize(b: &SensingMatrix, scene: &Scene) -> Result<CVector> {
    if b.grid() != scene.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(b.b() * scene.x())
}

/// `Y` (N_rx × T) with `y = vec(Y)`, i.e. `y[t·N_rx + m] = Y[m, t]`.
pub fn unvec(y: &CVector, n_rx: usize) -> Result<CMatrix> {
    if n_rx == 0 || !y.len().is_multiple_of(n_rx) {
        return Err(Error::InvalidArgument(format!(
            "length {} is not a multiple of n_rx = {n_rx}",
            y.len()
        )));
    }
    Ok(CMatrix::from_column_slice(
        n_rx,
        y.len() / n_rx,
        y.as_slice(),
    ))
}

/// Received signal matrix `Y = A_rx·diag(x)·A_txᵀ·Sᵀ`, evaluated directly
/// from the physical arrays.
pub fn signal_matrix(s: &WaveformMatrix, arrays: &ArrayPair, scene: &Scene) -> Result<CMatrix> {
    if s.n_tx() != arrays.n_tx() {
        return Err(Error::DimensionMismatch {
            context: "signal_matrix (waveform columns vs Tx sensors)",
            expected: arrays.n_tx(),
            found: s.n_tx(),
        });
    }
    let a_tx = manifold(arrays.tx(), scene.grid());
    let a_rx = manifold(arrays.rx(), scene.grid());
    let diag = CMatrix::from_diagonal(scene.x());
    Ok(a_rx.matrix() * diag * a_tx.matrix().transpose() * s.matrix().transpose())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseLevel {
    Noiseless,
    /// `10·log10(reference / ‖n‖²)`.
    SnrDb(f64),
}

/// Adds circular complex Gaussian noise rescaled so that
/// `10·log10(reference_energy / ‖n‖²)` equals the requested SNR exactly.
/// Returns the noisy vector and the realized `‖n‖²`.
pub fn add_noise(
    y: &CVector,
    reference_energy: f64,
    level: NoiseLevel,
    seed: u64,
) -> Result<(CVector, f64)> {
    let snr_db = match level {
        NoiseLevel::Noiseless => return Ok((y.clone(), 0.0)),
        NoiseLevel::SnrDb(db) if db.is_finite() => db,
        NoiseLevel::SnrDb(db) => {
            return Err(Error::InvalidArgument(format!(
                "snr must be finite, got {db}"
            )))
        }
    };
    if !(reference_energy.is_finite() && reference_energy > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "reference energy must be positive, got {reference_energy}"
        )));
    }
    if y.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot add noise to an empty vector".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = CVector::from_fn(y.len(), |_, _| {
        Complex64::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        )
    });
    let target = reference_energy / 10f64.powf(snr_db / 10.0);
    let norm = n.norm();
    n *= Complex64::new(target.sqrt() / norm, 0.0);
    let power = n.norm_squared();
    Ok((y + n, power))
}
