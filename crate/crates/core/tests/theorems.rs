//! Closed-form identifiability conditions checked against direct Kruskal
//! rank on random small instances. Aliasing grids and planted beampattern
//! nulls make sure the conditions fail often enough to matter.

mod common;

use coarray::geometry::{gna, sum_coarray, ArrayPair};
use coarray::identifiability::{
    check_full_wr, check_general, check_redundancy_limited, check_unit_wr, classify, Regime,
};
use coarray::linalg::{kruskal_rank, RankPolicy};
use coarray::manifold::{manifold, AngularGrid};
use coarray::sensing::build_sensing_matrix;
use coarray::waveform::{tx_beampattern, waveform_rank, WaveformMatrix};
use coarray::{CMatrix, Complex64, Error};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn policy() -> RankPolicy {
    RankPolicy::default()
}

fn random_geometry(r: &mut ChaCha8Rng) -> ArrayPair {
    let n_tx = r.random_range(1..=4);
    let n_rx = r.random_range(1..=3);
    match r.random_range(0..3) {
        0 => gna(n_tx, n_rx, r.random_range(1..=n_rx + 1)).unwrap(),
        1 => ArrayPair::new(random_positions(r, n_tx, 6), random_positions(r, n_rx, 5)).unwrap(),
        // even positions alias angles whose sines differ by one
        _ => {
            let double = |p: Vec<usize>| p.into_iter().map(|x| 2 * x).collect();
            ArrayPair::new(
                double(random_positions(r, n_tx, 4)),
                double(random_positions(r, n_rx, 3)),
            )
            .unwrap()
        }
    }
}

fn random_grid(r: &mut ChaCha8Rng) -> AngularGrid {
    let v = r.random_range(1..=10);
    if v >= 2 && r.random_bool(0.4) {
        let s: f64 = r.random_range(0.2..0.8);
        let mut sines: Vec<f64> = random_angles(r, v - 2).into_iter().map(f64::sin).collect();
        sines.retain(|t| (t - s).abs() > 0.02 && (t - (s - 1.0)).abs() > 0.02);
        sines.extend([s, s - 1.0]);
        sines.sort_by(f64::total_cmp);
        AngularGrid::new(sines.into_iter().map(f64::asin).collect()).unwrap()
    } else {
        AngularGrid::new(random_angles(r, v)).unwrap()
    }
}

fn waveform_of_rank(r: &mut ChaCha8Rng, n_tx: usize, rank: usize) -> WaveformMatrix {
    let t = rank + r.random_range(0..=1);
    WaveformMatrix::new(random_rank(r, t, n_tx, rank)).unwrap()
}

#[test]
fn redundancy_limited_condition_is_exact() {
    let p = policy();
    let mut r = rng(31);
    let (mut checked, mut held, mut failed) = (0, 0, 0);
    while checked < 60 {
        let arrays = random_geometry(&mut r);
        let grid = random_grid(&mut r);
        let n_sigma = sum_coarray(&arrays).len();
        let (n_tx, n_rx) = (arrays.n_tx(), arrays.n_rx());
        let min_rank = n_sigma.div_ceil(n_rx);
        if min_rank > n_tx {
            continue;
        }
        let n_s = r.random_range(min_rank..=n_tx);
        let s = waveform_of_rank(&mut r, n_tx, n_s);
        assert_eq!(waveform_rank(&s, &p).unwrap(), n_s);
        let verdict = check_redundancy_limited(&s, &arrays, &grid, &p).unwrap();
        let b = build_sensing_matrix(&s, &arrays, &grid).unwrap();
        let k = kruskal_rank(b.b(), &p).unwrap();
        assert_eq!(
            verdict.holds(),
            k == n_sigma,
            "tx {:?} rx {:?} grid {:?}: verdict {verdict:?}, krank {k}",
            arrays.tx(),
            arrays.rx(),
            grid.angles()
        );
        if verdict.holds() {
            held += 1
        } else {
            failed += 1
        }
        checked += 1;
    }
    assert!(held > 5 && failed > 5, "{held} held, {failed} failed");
}

#[test]
fn full_rank_waveforms_depend_only_on_the_coarray() {
    let p = policy();
    let mut r = rng(32);
    let (mut held, mut failed) = (0, 0);
    for _ in 0..60 {
        let arrays = random_geometry(&mut r);
        let grid = random_grid(&mut r);
        let n_sigma = sum_coarray(&arrays).len();
        let s = waveform_of_rank(&mut r, arrays.n_tx(), arrays.n_tx());
        let verdict = check_full_wr(&s, &arrays, &grid, &p).unwrap();
        let k = kruskal_rank(build_sensing_matrix(&s, &arrays, &grid).unwrap().b(), &p).unwrap();
        assert_eq!(
            verdict,
            k == n_sigma,
            "tx {:?} rx {:?}: krank {k}",
            arrays.tx(),
            arrays.rx()
        );
        if verdict {
            held += 1
        } else {
            failed += 1
        }
    }
    assert!(held > 5 && failed > 5, "{held} held, {failed} failed");
}

/// `v` orthogonal to `a_tx(θ_i)` for one grid angle, so the beam has a null.
fn beamformer_with_null(r: &mut ChaCha8Rng, a_tx: &CMatrix, i: usize) -> CMatrix {
    let v = random_matrix(r, a_tx.nrows(), 1);
    let a = a_tx.column(i).into_owned();
    let proj = a.adjoint() * &v;
    let scale = proj[(0, 0)] / Complex64::new(a.norm_squared(), 0.0);
    let v = v.column(0) - a * scale;
    CMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

#[test]
fn unit_rank_condition_is_exact() {
    let p = policy();
    let mut r = rng(33);
    let (mut held, mut failed, mut nulls) = (0, 0, 0);
    for trial in 0..60 {
        let arrays = random_geometry(&mut r);
        let grid = random_grid(&mut r);
        let a_tx = manifold(arrays.tx(), &grid);
        let a_rx = manifold(arrays.rx(), &grid);
        let v = if arrays.n_tx() >= 2 && trial % 3 == 0 {
            nulls += 1;
            let i = r.random_range(0..grid.len());
            beamformer_with_null(&mut r, a_tx.matrix(), i)
        } else {
            random_matrix(&mut r, arrays.n_tx(), 1)
        };
        let t = r.random_range(1..=3);
        let u = random_matrix(&mut r, t, 1);
        let s = WaveformMatrix::new(&u * v.adjoint()).unwrap();
        let verdict =
            check_unit_wr(&v.column(0).into_owned(), a_tx.matrix(), a_rx.matrix(), &p).unwrap();
        let k = kruskal_rank(build_sensing_matrix(&s, &arrays, &grid).unwrap().b(), &p).unwrap();
        assert_eq!(
            verdict.holds(),
            k == arrays.n_rx(),
            "tx {:?} rx {:?}: verdict {verdict:?}, krank {k}",
            arrays.tx(),
            arrays.rx()
        );
        if verdict.holds() {
            held += 1
        } else {
            failed += 1
        }
    }
    assert!(
        nulls > 10 && held > 5 && failed > 5,
        "{held} held, {failed} failed"
    );
}

#[test]
fn beampattern_null_zeroes_kruskal_rank() {
    let p = policy();
    let mut r = rng(34);
    let (mut checked, mut all_null) = (0, 0);
    for _ in 0..60 {
        let arrays = random_geometry(&mut r);
        if arrays.n_tx() < 2 {
            continue;
        }
        let grid = random_grid(&mut r);
        let a_tx = manifold(arrays.tx(), &grid);
        let i = r.random_range(0..grid.len());
        let a = a_tx.matrix().column(i).into_owned();
        let proj = CMatrix::identity(arrays.n_tx(), arrays.n_tx())
            - &a * a.adjoint() / Complex64::new(a.norm_squared(), 0.0);
        let t = r.random_range(1..=3);
        let s = WaveformMatrix::new(random_matrix(&mut r, t, arrays.n_tx()) * proj).unwrap();
        let bp = tx_beampattern(&s, arrays.tx(), &grid).unwrap();
        let energy = s.matrix().norm_squared().max(1.0);
        assert!(bp[i] < 1e-20 * energy);
        // the tolerance is relative to the largest column, so a grid lying
        // entirely in the null (possible with aliasing) leaves no scale
        if bp.iter().all(|&x| x < 1e-20 * energy) {
            all_null += 1;
            continue;
        }
        let k = kruskal_rank(build_sensing_matrix(&s, &arrays, &grid).unwrap().b(), &p).unwrap();
        assert_eq!(
            k,
            0,
            "tx {:?} rx {:?} grid {:?}",
            arrays.tx(),
            arrays.rx(),
            grid.angles()
        );
        checked += 1;
    }
    assert!(
        checked >= 30,
        "{checked} checked, {all_null} fully nulled grids"
    );
}

#[test]
fn reaching_the_ceiling_requires_matching() {
    let p = policy();
    let mut r = rng(35);
    let (mut at_max, mut below) = (0, 0);
    for _ in 0..60 {
        let arrays = random_geometry(&mut r);
        let grid = random_grid(&mut r);
        let n_s = r.random_range(1..=arrays.n_tx());
        let s = waveform_of_rank(&mut r, arrays.n_tx(), n_s);
        let report = check_general(&s, &arrays, &grid, &p).unwrap();
        assert!(!report.partial);
        let n_sigma = sum_coarray(&arrays).len();
        assert_eq!(
            report.regime,
            classify(n_s, arrays.n_tx(), arrays.n_rx(), n_sigma)
        );
        assert!(report.krank_b <= report.max_bound);
        if report.achieves_max {
            assert!(report.condition_details.matching_holds, "{report:?}");
            at_max += 1;
        } else {
            below += 1;
        }
        if let Some(agree) = report.condition_details.conditions_agree {
            assert!(agree, "{report:?}");
        }
        assert_eq!(
            report.regime == Regime::UnitWr,
            n_s == 1 && arrays.n_tx() != 1
        );
    }
    assert!(
        at_max > 5 && below > 5,
        "{at_max} at the ceiling, {below} below"
    );
}

#[test]
fn regime_checks_reject_other_regimes() {
    let p = policy();
    let arrays = gna(3, 2, 1).unwrap();
    let grid = AngularGrid::sin_uniform(8).unwrap();
    let rank_one =
        WaveformMatrix::new(CMatrix::from_element(2, 3, Complex64::new(1.0, 0.0))).unwrap();
    assert!(matches!(
        check_full_wr(&rank_one, &arrays, &grid, &p),
        Err(Error::WrongRegime(_))
    ));
    assert!(matches!(
        check_redundancy_limited(&rank_one, &arrays, &grid, &p),
        Err(Error::WrongRegime(_))
    ));
}
