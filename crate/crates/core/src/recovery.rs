//! Exhaustive ℓ0 recovery, a brute-force identifiability oracle, and the
//! two-arm recovery experiment (full-rank orthogonal waveforms versus a
//! reduced-rank matched waveform).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::gna;
use crate::linalg::{first_dependent_subset, kruskal_rank, PivotedQr, RankPolicy};
use crate::manifold::AngularGrid;
use crate::sensing::{add_noise, build_sensing_matrix, synthesize, NoiseLevel, Scene};
use crate::subsets::{binomial, Lex};
use crate::waveform::{gna_matched, WaveformMatrix};
use crate::{CMatrix, CVector, Complex64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryStatus {
    Unique,
    FoundNonuniquePossible,
    InfeasibleAtKmax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    #[serde(skip)]
    pub z: CVector,
    pub support: Vec<usize>,
    pub cardinality: usize,
    pub residual: f64,
    pub status: RecoveryStatus,
}

fn columns(b: &CMatrix, support: &[usize]) -> CMatrix {
    CMatrix::from_fn(b.nrows(), support.len(), |r, c| b[(r, support[c])])
}

/// Least-squares fit of `y` on the columns in `support`; returns the
/// coefficients and `‖y − B_S·z_S‖₂`.
pub fn support_fit(
    b: &CMatrix,
    y: &CVector,
    support: &[usize],
    policy: &RankPolicy,
) -> (CVector, f64) {
    if support.is_empty() {
        return (CVector::zeros(0), y.norm());
    }
    let sub = columns(b, support);
    let qr = PivotedQr::new(&sub);
    let coef = qr.solve_least_squares(y, qr.rank(policy.relative_tolerance));
    let residual = (y - &sub * &coef).norm();
    (coef, residual)
}

struct Level {
    feasible: Vec<Vec<usize>>,
    best: Option<(f64, Vec<usize>)>,
}

/// Every `k`-subset of `0..n` whose fit is within `radius`, in lexicographic
/// order, plus the lowest-residual subset. Subsets are split by their
/// smallest index for parallel evaluation and merged in index order.
fn scan_level(b: &CMatrix, y: &CVector, k: usize, radius: f64, policy: &RankPolicy) -> Level {
    let n = b.ncols();
    let parts: Vec<Level> = (0..=n - k)
        .into_par_iter()
        .map(|first| {
            let mut level = Level {
                feasible: Vec::new(),
                best: None,
            };
            let mut support = vec![first; k];
            for rest in Lex::new(n - first - 1, k - 1) {
                for (slot, r) in support[1..].iter_mut().zip(&rest) {
                    *slot = first + 1 + r;
                }
                let (_, residual) = support_fit(b, y, &support, policy);
                if residual <= radius {
                    level.feasible.push(support.clone());
                }
                if level.best.as_ref().is_none_or(|(r, _)| residual < *r) {
                    level.best = Some((residual, support.clone()));
                }
            }
            level
        })
        .collect();

    let mut merged = Level {
        feasible: Vec::new(),
        best: None,
    };
    for part in parts {
        merged.feasible.extend(part.feasible);
        if let Some((r, s)) = part.best {
            if merged.best.as_ref().is_none_or(|(best, _)| r < *best) {
                merged.best = Some((r, s));
            }
        }
    }
    merged
}

/// `minimize ‖z‖₀ subject to ‖y − B·z‖₂ ≤ epsilon` by exhaustive search over
/// supports of size `0..=k_max`.
///
/// A support is feasible when its least-squares residual is at most
/// `epsilon + relative_tolerance·‖y‖₂`; the slack absorbs rounding in the
/// noiseless case. Among feasible supports of minimal size the
/// lexicographically smallest is returned, and the status is `Unique` only
/// if it is the only one.
pub fn l0_solve(
    y: &CVector,
    b: &CMatrix,
    epsilon: f64,
    k_max: usize,
    policy: &RankPolicy,
) -> Result<RecoveryResult> {
    policy.validate()?;
    let n = b.ncols();
    if y.len() != b.nrows() {
        return Err(Error::DimensionMismatch {
            context: "l0_solve (measurement length vs rows of B)",
            expected: b.nrows(),
            found: y.len(),
        });
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be finite and nonnegative, got {epsilon}"
        )));
    }
    if k_max > n {
        return Err(Error::InvalidArgument(format!(
            "k_max = {k_max} exceeds the {n} grid points"
        )));
    }
    let budget = policy.max_subset_budget as u128;
    if let Some(k) = (0..=k_max).find(|&k| binomial(n, k) > budget) {
        return Err(Error::EnumerationBudget {
            n,
            k,
            budget: policy.max_subset_budget,
        });
    }

    let radius = epsilon + policy.relative_tolerance * y.norm();
    let finish = |support: Vec<usize>, status| {
        let (coef, residual) = support_fit(b, y, &support, policy);
        let mut z = CVector::zeros(n);
        for (&i, &c) in support.iter().zip(coef.iter()) {
            z[i] = c;
        }
        RecoveryResult {
            z,
            cardinality: support.len(),
            support,
            residual,
            status,
        }
    };

    if y.norm() <= radius {
        return Ok(finish(Vec::new(), RecoveryStatus::Unique));
    }
    let mut last_best = Vec::new();
    for k in 1..=k_max {
        let level = scan_level(b, y, k, radius, policy);
        if let Some(first) = level.feasible.first() {
            let status = if level.feasible.len() == 1 {
                RecoveryStatus::Unique
            } else {
                RecoveryStatus::FoundNonuniquePossible
            };
            return Ok(finish(first.clone(), status));
        }
        last_best = level.best.map(|(_, s)| s).unwrap_or_default();
    }
    Ok(finish(last_best, RecoveryStatus::InfeasibleAtKmax))
}

/// True iff every `2k` columns of `B` are numerically independent, checked
/// by a separate rank-revealing factorization of every such subset.
pub fn identifiability_oracle(b: &CMatrix, k: usize, policy: &RankPolicy) -> Result<bool> {
    policy.validate()?;
    let n = b.ncols();
    let r = 2 * k;
    if r == 0 {
        return Ok(true);
    }
    if r > n || r > b.nrows() {
        return Ok(false);
    }
    let count = binomial(n, r);
    if count > policy.max_subset_budget as u128 {
        return Err(Error::EnumerationBudget {
            n,
            k: r,
            budget: policy.max_subset_budget,
        });
    }
    let tol = policy.relative_tolerance;
    let deficient = (0..=n - r).into_par_iter().any(|first| {
        let mut support = vec![first; r];
        Lex::new(n - first - 1, r - 1).any(|rest| {
            for (slot, x) in support[1..].iter_mut().zip(&rest) {
                *slot = first + 1 + x;
            }
            PivotedQr::new(&columns(b, &support)).rank(tol) < r
        })
    });
    Ok(!deficient)
}

/// Two distinct vectors with at most `k` nonzeros each and `B·x1 = B·x2`,
/// built from a null vector of the first dependent `(krank+1)`-subset.
/// `None` when `krank(B) ≥ 2k`.
pub fn ambiguous_pair(
    b: &CMatrix,
    k: usize,
    policy: &RankPolicy,
) -> Result<Option<(CVector, CVector)>> {
    let r = kruskal_rank(b, policy)?;
    if r >= 2 * k {
        return Ok(None);
    }
    let subset = first_dependent_subset(b, r + 1, policy).ok_or(Error::Consistency {
        context: "ambiguous_pair: no dependent subset above the Kruskal rank",
        deviation: f64::NAN,
    })?;
    let qr = PivotedQr::new(&columns(b, &subset));
    let null = qr
        .null_vector(policy.relative_tolerance)
        .ok_or(Error::Consistency {
            context: "ambiguous_pair: dependent subset has full rank",
            deviation: f64::NAN,
        })?;

    let n = b.ncols();
    let (mut x1, mut x2) = (CVector::zeros(n), CVector::zeros(n));
    let mut placed = 0;
    for (&col, &coef) in subset.iter().zip(null.iter()) {
        if coef.norm() <= 1e-12 {
            continue;
        }
        if placed < k {
            x1[col] = coef;
        } else {
            x2[col] = -coef;
        }
        placed += 1;
    }
    Ok(Some((x1, x2)))
}

/// Waveform used by one arm of the recovery experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmWaveform {
    /// `N_tx` unit-modulus orthogonal waveforms (`T = N_tx`).
    Orthogonal,
    /// Matched reduced-rank waveform with `T = n_s`.
    Matched { n_s: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    pub name: String,
    pub waveform: ArmWaveform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoveryConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    #[serde(default = "one")]
    pub delta: usize,
    /// Number of sin-uniform grid points.
    pub grid_size: usize,
    /// Scatterers per scene.
    pub k: usize,
    /// Scatterers are drawn from grid angles inside this interval.
    pub sector: [f64; 2],
    /// `null` means noiseless.
    pub snr_db: Vec<Option<f64>>,
    pub seeds: Vec<u64>,
    pub arms: Vec<Arm>,
    /// Feasibility radius is this factor times the realized `‖n‖₂`.
    #[serde(default = "default_epsilon_factor")]
    pub epsilon_factor: f64,
}

fn one() -> usize {
    1
}

fn default_epsilon_factor() -> f64 {
    1.1
}

impl RecoveryConfig {
    /// ULA with 7 Tx and 6 Rx, 24 grid points, 6 scatterers within
    /// `[−π/5, π/5]`, orthogonal arm versus a rank-2 matched arm.
    pub fn example_one(seeds: Vec<u64>, snr_db: Vec<Option<f64>>) -> Self {
        Self {
            n_tx: 7,
            n_rx: 6,
            delta: 1,
            grid_size: 24,
            k: 6,
            sector: [-PI / 5.0, PI / 5.0],
            snr_db,
            seeds,
            arms: vec![
                Arm {
                    name: "orthogonal".into(),
                    waveform: ArmWaveform::Orthogonal,
                },
                Arm {
                    name: "matched".into(),
                    waveform: ArmWaveform::Matched { n_s: 2 },
                },
            ],
            epsilon_factor: default_epsilon_factor(),
        }
    }
}

/// Waveform of an arm, scaled to total energy `‖S‖_F² = N_tx`.
pub fn arm_waveform(config: &RecoveryConfig, arm: &Arm) -> Result<WaveformMatrix> {
    let s = match arm.waveform {
        ArmWaveform::Orthogonal => WaveformMatrix::orthogonal(config.n_tx, config.n_tx)?,
        ArmWaveform::Matched { n_s } => {
            gna_matched(config.n_tx, config.n_rx, config.delta, n_s, n_s)?
        }
    };
    s.with_energy(config.n_tx as f64)
}

/// `k` distinct grid points inside `sector` with unit-magnitude,
/// uniformly random-phase coefficients.
pub fn random_sector_scene(
    grid: &AngularGrid,
    sector: [f64; 2],
    k: usize,
    seed: u64,
) -> Result<Scene> {
    let eligible: Vec<usize> = (0..grid.len())
        .filter(|&i| (sector[0]..=sector[1]).contains(&grid.angles()[i]))
        .collect();
    if eligible.len() < k {
        return Err(Error::InvalidArgument(format!(
            "sector holds {} grid points, {k} scatterers requested",
            eligible.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut support: Vec<usize> = rand::seq::index::sample(&mut rng, eligible.len(), k)
        .into_iter()
        .map(|j| eligible[j])
        .collect();
    support.sort_unstable();
    let coeffs: Vec<Complex64> = (0..k)
        .map(|_| Complex64::from_polar(1.0, rng.random_range(-PI..PI)))
        .collect();
    Scene::from_support(grid.clone(), &support, &coeffs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryRow {
    pub arm: String,
    /// `None` for noiseless.
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub success: bool,
    pub cardinality: usize,
    pub residual: f64,
    pub status: RecoveryStatus,
}

fn noise_seed(seed: u64, snr_index: usize) -> u64 {
    seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(snr_index as u64 + 1)
}

/// Runs every (arm, SNR, seed) combination. Scenes depend only on the seed,
/// so all arms see the same scatterers.
pub fn recovery_experiment(
    config: &RecoveryConfig,
    policy: &RankPolicy,
) -> Result<Vec<RecoveryRow>> {
    let arrays = gna(config.n_tx, config.n_rx, config.delta)?;
    let grid = AngularGrid::sin_uniform(config.grid_size)?;
    if config.k > config.grid_size {
        return Err(Error::InvalidArgument(
            "more scatterers than grid points".into(),
        ));
    }
    let mut rows = Vec::new();
    for arm in &config.arms {
        let s = arm_waveform(config, arm)?;
        let sensing = build_sensing_matrix(&s, &arrays, &grid)?;
        for (snr_index, snr) in config.snr_db.iter().enumerate() {
            for &seed in &config.seeds {
                let scene = random_sector_scene(&grid, config.sector, config.k, seed)?;
                let clean = synthesize(&sensing, &scene)?;
                let level = snr.map_or(NoiseLevel::Noiseless, NoiseLevel::SnrDb);
                let energy = scene.x().norm_squared();
                let (y, noise_power) =
                    add_noise(&clean, energy, level, noise_seed(seed, snr_index))?;
                let epsilon = config.epsilon_factor * noise_power.sqrt();
                let result = l0_solve(&y, sensing.b(), epsilon, config.k, policy)?;
                log::info!(
                    "arm {} snr {:?} seed {seed}: support {:?} ({:?})",
                    arm.name,
                    snr,
                    result.support,
                    result.status
                );
                rows.push(RecoveryRow {
                    arm: arm.name.clone(),
                    snr_db: *snr,
                    seed,
                    success: result.support == scene.support(),
                    cardinality: result.cardinality,
                    residual: result.residual,
                    status: result.status,
                });
            }
        }
    }
    Ok(rows)
}

/// Double with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with header `arm,snr_db,seed,success,cardinality,residual`; a
/// noiseless SNR is written as `inf`.
pub fn rows_to_csv(rows: &[RecoveryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "arm",
        "snr_db",
        "seed",
        "success",
        "cardinality",
        "residual",
    ])?;
    for row in rows {
        w.write_record([
            row.arm.clone(),
            row.snr_db.map_or_else(|| "inf".to_string(), format_float),
            row.seed.to_string(),
            row.success.to_string(),
            row.cardinality.to_string(),
            format_float(row.residual),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
