//! Scripted scenarios for the worked examples and figures. Each scenario
//! returns a verdict (named checks with expected and found values) plus
//! the CSV tables it produced; nothing here depends on wall-clock time, so
//! re-running a scenario yields byte-identical files.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{gna, gna_block_structure, redundancy_pattern, RedundancyPattern};
use crate::identifiability::{check_general, max_krank_bound, min_redundancy_limited_wr};
use crate::linalg::{intersection_dim, kruskal_rank, numerical_rank, RankPolicy};
use crate::manifold::AngularGrid;
use crate::recovery::{format_float, recovery_experiment, rows_to_csv, RecoveryConfig};
use crate::sensing::build_sensing_matrix;
use crate::subsets::binomial;
use crate::waveform::{
    decompose, example_waveform, gna_matched, matched_factors, tx_beampattern, ExampleWaveform,
};
use crate::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Ex1,
    Ex2,
    Ex3,
    Ex4,
    Fig3,
    Fig6,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Self::Ex1,
        Self::Ex2,
        Self::Ex3,
        Self::Ex4,
        Self::Fig3,
        Self::Fig6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ex1 => "ex1",
            Self::Ex2 => "ex2",
            Self::Ex3 => "ex3",
            Self::Ex4 => "ex4",
            Self::Fig3 => "fig3",
            Self::Fig6 => "fig6",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scenario {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub scenario: Scenario,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Verdict {
    /// One line per failed check.
    pub fn diff_report(&self) -> String {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: expected {}, found {}\n", c.name, c.expected, c.found))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reproduction {
    pub verdict: Verdict,
    pub files: Vec<OutputFile>,
}

impl Reproduction {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|f| f.name == name)
            .map(|f| f.contents.as_str())
    }

    /// Writes `verdict.json` and every table into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let verdict_path = dir.join("verdict.json");
        std::fs::write(
            &verdict_path,
            serde_json::to_string_pretty(&self.verdict)? + "\n",
        )?;
        written.push(verdict_path);
        for file in &self.files {
            let path = dir.join(&file.name);
            std::fs::write(&path, &file.contents)?;
            written.push(path);
        }
        Ok(written)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproduceOptions {
    pub policy: RankPolicy,
    /// First scene seed of the recovery scenario.
    pub seed: u64,
    /// Scenes per SNR in the recovery scenario.
    pub scenes: usize,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            policy: RankPolicy::default(),
            seed: 0,
            scenes: 3,
        }
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn add(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        expected: impl fmt::Display,
        found: impl fmt::Display,
    ) {
        self.0.push(Check {
            name: name.into(),
            passed,
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }

    fn eq<T: PartialEq + fmt::Debug>(&mut self, name: impl Into<String>, expected: T, found: T) {
        let passed = expected == found;
        self.add(name, passed, format!("{expected:?}"), format!("{found:?}"));
    }

    fn finish(self, scenario: Scenario, files: Vec<OutputFile>) -> Reproduction {
        Reproduction {
            verdict: Verdict {
                scenario,
                passed: self.0.iter().all(|c| c.passed),
                checks: self.0,
            },
            files,
        }
    }
}

/// CSV with a header row and one row per entry of the columns, floats at
/// 17 significant digits.
pub fn table_csv(headers: &[&str], columns: &[Vec<f64>]) -> Result<String> {
    let rows = columns.first().map_or(0, Vec::len);
    if headers.len() != columns.len() || columns.iter().any(|c| c.len() != rows) {
        return Err(Error::InvalidArgument("ragged table".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers)?;
    for r in 0..rows {
        w.write_record(columns.iter().map(|c| format_float(c[r])))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn pattern_csv(p: &RedundancyPattern) -> String {
    p.to_rows()
        .iter()
        .map(|row| row.iter().map(u8::to_string).collect::<Vec<_>>().join(",") + "\n")
        .collect()
}

fn is_selection(m: &CMatrix, rows: usize, cols: usize) -> bool {
    m.shape() == (rows, cols)
        && m.iter().enumerate().all(|(idx, e)| {
            let (r, c) = (idx % rows, idx / rows);
            let expect = if r == c { 1.0 } else { 0.0 };
            e.re == expect && e.im == 0.0
        })
}

fn e_rows(indices: &[usize], width: usize) -> Vec<Vec<u8>> {
    indices
        .iter()
        .map(|&i| (0..width).map(|c| u8::from(c == i)).collect())
        .collect()
}

pub fn reproduce(scenario: Scenario, options: &ReproduceOptions) -> Result<Reproduction> {
    match scenario {
        Scenario::Ex1 => example_one(options),
        Scenario::Ex2 => example_two(&options.policy),
        Scenario::Ex3 => example_three(&options.policy),
        Scenario::Ex4 => example_four(&options.policy),
        Scenario::Fig3 => figure_three(),
        Scenario::Fig6 => figure_six(&options.policy),
    }
}

fn example_two(policy: &RankPolicy) -> Result<Reproduction> {
    let mut checks = Checks::default();
    let grid = AngularGrid::sin_uniform(8)?;

    let ula = gna(3, 2, 1)?;
    let ups_ula = redundancy_pattern(&ula);
    checks.eq(
        "upsilon (delta=1)",
        e_rows(&[0, 1, 1, 2, 2, 3], 4),
        ups_ula.to_rows(),
    );
    checks.eq(
        "block structure (delta=1)",
        ups_ula.clone(),
        gna_block_structure(3, 2, 1)?,
    );
    let f = matched_factors(3, 2, 1, 2, 2)?;
    let q = f.q_matrix(&ups_ula, 2);
    checks.add(
        "Q = I_4 (delta=1)",
        is_selection(&q, 4, 4),
        "I_4",
        format!("{q:.3}"),
    );
    let s_ula = gna_matched(3, 2, 1, 2, 2)?;
    let b_ula = build_sensing_matrix(&s_ula, &ula, &grid)?;
    checks.eq("krank(B) (delta=1)", 4, kruskal_rank(b_ula.b(), policy)?);

    let na = gna(3, 2, 2)?;
    let ups_na = redundancy_pattern(&na);
    checks.eq(
        "upsilon (delta=2)",
        e_rows(&[0, 1, 2, 3, 4, 5], 6),
        ups_na.to_rows(),
    );
    checks.eq(
        "block structure (delta=2)",
        ups_na.clone(),
        gna_block_structure(3, 2, 2)?,
    );
    let s_na = gna_matched(3, 2, 2, 2, 2)?;
    let b_na = build_sensing_matrix(&s_na, &na, &grid)?;
    checks.add(
        "W = [I_4 | 0] (delta=2)",
        is_selection(b_na.w(), 4, 6),
        "[I_4 | 0_4x2]",
        format!("{:.3}", b_na.w()),
    );
    checks.eq("krank(B) (delta=2)", 4, kruskal_rank(b_na.b(), policy)?);

    Ok(checks.finish(
        Scenario::Ex2,
        vec![
            OutputFile {
                name: "upsilon_delta1.csv".into(),
                contents: pattern_csv(&ups_ula),
            },
            OutputFile {
                name: "upsilon_delta2.csv".into(),
                contents: pattern_csv(&ups_na),
            },
        ],
    ))
}

fn example_three(policy: &RankPolicy) -> Result<Reproduction> {
    let mut checks = Checks::default();
    let ula = gna(3, 2, 1)?;
    let grid = AngularGrid::sin_uniform(8)?;
    let ups = redundancy_pattern(&ula);
    let mut reports = Vec::new();
    for (which, expect_dim) in [(ExampleWaveform::Ex3a, 0), (ExampleWaveform::Ex3b, 1)] {
        let s = example_waveform(which);
        let report = check_general(&s, &ula, &grid, policy)?;
        let krank = report.krank_b;
        if which == ExampleWaveform::Ex3a {
            checks.eq("krank(B) ex3a", 4, krank);
        } else {
            checks.add(
                "krank(B) ex3b <= 3",
                !report.partial && krank <= 3,
                "<= 3",
                krank,
            );
        }
        checks.eq(
            format!("intersection dim {which}"),
            expect_dim,
            intersection_dim(&s, &ups, 2, policy)?,
        );
        reports.push((which.name(), report));
    }
    let json = serde_json::to_string_pretty(&serde_json::Map::from_iter(reports.into_iter().map(
        |(k, r)| {
            (
                k.to_string(),
                serde_json::to_value(r).expect("report serializes"),
            )
        },
    )))?;
    Ok(checks.finish(
        Scenario::Ex3,
        vec![OutputFile {
            name: "reports.json".into(),
            contents: json + "\n",
        }],
    ))
}

/// Beampattern display grid: 181 points uniform in θ.
pub fn beampattern_grid() -> AngularGrid {
    AngularGrid::theta_uniform(181).expect("fixed grid is valid")
}

/// A beampattern value counts as a null when it is at most this fraction of
/// `N_tx·‖S‖_F²`, the largest value any angle can reach.
pub const NULL_FRACTION: f64 = 1e-9;

/// Smallest beampattern value relative to `N_tx·‖S‖_F²`.
pub fn relative_beampattern_floor(which: ExampleWaveform, grid: &AngularGrid) -> Result<f64> {
    let s = example_waveform(which);
    let bp = tx_beampattern(&s, &[0, 1, 2], grid)?;
    let scale = s.n_tx() as f64 * s.matrix().norm_squared();
    Ok(bp.iter().copied().fold(f64::INFINITY, f64::min) / scale)
}

fn example_four(policy: &RankPolicy) -> Result<Reproduction> {
    let mut checks = Checks::default();
    let ula = gna(3, 2, 1)?;
    let grid = AngularGrid::sin_uniform(8)?;
    let ups = redundancy_pattern(&ula);

    let ex4a = example_waveform(ExampleWaveform::Ex4a);
    let b4a = build_sensing_matrix(&ex4a, &ula, &grid)?;
    let krank_a = kruskal_rank(b4a.b(), policy)?;
    checks.eq("krank(B) ex4a", 4, krank_a);

    let ex4b = example_waveform(ExampleWaveform::Ex4b);
    let q = decompose(&ex4b, policy)?.q_matrix(&ups, 2);
    checks.eq("rank(Q) ex4b", 3, numerical_rank(&q, policy)?);
    let worst = ex4b
        .matrix()
        .iter()
        .map(|e| (e.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    checks.add(
        "ex4b unit modulus",
        worst < 1e-12,
        "< 1e-12",
        format!("{worst:e}"),
    );
    let b4b = build_sensing_matrix(&ex4b, &ula, &grid)?;
    let krank_b = kruskal_rank(b4b.b(), policy)?;
    checks.add("krank(B) ex4b < 4", krank_b < 4, "< 4", krank_b);

    let bgrid = beampattern_grid();
    for which in [ExampleWaveform::Ex4a, ExampleWaveform::Ex4b] {
        let floor = relative_beampattern_floor(which, &bgrid)?;
        checks.add(
            format!("{which} beampattern has no nulls"),
            floor > NULL_FRACTION,
            format!("> {NULL_FRACTION:e}"),
            format!("{floor:e}"),
        );
    }
    let columns = beampattern_columns(&[ExampleWaveform::Ex4a, ExampleWaveform::Ex4b], &bgrid)?;
    Ok(checks.finish(
        Scenario::Ex4,
        vec![OutputFile {
            name: "beampatterns.csv".into(),
            contents: table_csv(&["theta", "ex4a", "ex4b"], &columns)?,
        }],
    ))
}

fn beampattern_columns(which: &[ExampleWaveform], grid: &AngularGrid) -> Result<Vec<Vec<f64>>> {
    let mut columns = vec![grid.angles().to_vec()];
    for &w in which {
        columns.push(tx_beampattern(&example_waveform(w), &[0, 1, 2], grid)?);
    }
    Ok(columns)
}

fn figure_six(policy: &RankPolicy) -> Result<Reproduction> {
    let mut checks = Checks::default();
    let grid = beampattern_grid();
    let columns = beampattern_columns(&ExampleWaveform::ALL, &grid)?;
    let gap = columns[1]
        .iter()
        .zip(&columns[2])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    checks.add(
        "ex3a and ex3b beampatterns coincide",
        gap < 1e-9,
        "< 1e-9",
        format!("{gap:e}"),
    );

    let ula = gna(3, 2, 1)?;
    let kgrid = AngularGrid::sin_uniform(8)?;
    let mut kranks = Vec::new();
    for which in ExampleWaveform::ALL {
        let b = build_sensing_matrix(&example_waveform(which), &ula, &kgrid)?;
        kranks.push(kruskal_rank(b.b(), policy)?);
    }
    checks.add(
        "equal beampatterns, different krank (ex3a vs ex3b)",
        kranks[0] == 4 && kranks[1] < 4,
        "4 vs < 4",
        format!("{} vs {}", kranks[0], kranks[1]),
    );
    for which in [ExampleWaveform::Ex4a, ExampleWaveform::Ex4b] {
        let floor = relative_beampattern_floor(which, &grid)?;
        checks.add(
            format!("{which} beampattern has no nulls"),
            floor > NULL_FRACTION,
            format!("> {NULL_FRACTION:e}"),
            format!("{floor:e}"),
        );
    }
    checks.add(
        "null-free beampatterns, different krank (ex4a vs ex4b)",
        kranks[2] == 4 && kranks[3] < 4,
        "4 vs < 4",
        format!("{} vs {}", kranks[2], kranks[3]),
    );
    Ok(checks.finish(
        Scenario::Fig6,
        vec![OutputFile {
            name: "beampatterns.csv".into(),
            contents: table_csv(&["theta", "ex3a", "ex3b", "ex4a", "ex4b"], &columns)?,
        }],
    ))
}

/// Co-array sizes of the three curves: ULA, an arbitrary array, NA, all
/// with 10 Tx and 3 Rx sensors.
pub const FIG3_N_TX: usize = 10;
pub const FIG3_N_RX: usize = 3;
pub const FIG3_CURVES: [(&str, usize); 3] = [("ula", 12), ("general", 24), ("na", 30)];

fn figure_three() -> Result<Reproduction> {
    let mut checks = Checks::default();
    let ns: Vec<f64> = (1..=FIG3_N_TX).map(|n| n as f64).collect();
    let mut columns = vec![ns];
    for (name, n_sigma) in FIG3_CURVES {
        let curve: Vec<usize> = (1..=FIG3_N_TX)
            .map(|n_s| max_krank_bound(n_s, FIG3_N_RX, n_sigma))
            .collect();
        let first_max = curve.iter().position(|&v| v == n_sigma).map(|i| i + 1);
        checks.eq(
            format!("{name}: saturation point"),
            Some(min_redundancy_limited_wr(n_sigma, FIG3_N_RX)),
            first_max,
        );
        checks.eq(
            format!("{name}: value at N_s = N_tx"),
            n_sigma,
            curve[FIG3_N_TX - 1],
        );
        columns.push(curve.iter().map(|&v| v as f64).collect());
    }
    checks.eq(
        "ula co-array size",
        FIG3_N_TX + FIG3_N_RX - 1,
        FIG3_CURVES[0].1,
    );
    checks.eq("na co-array size", FIG3_N_TX * FIG3_N_RX, FIG3_CURVES[2].1);
    let breakpoints: Vec<Vec<f64>> = vec![
        FIG3_CURVES.iter().map(|&(_, s)| s as f64).collect(),
        FIG3_CURVES
            .iter()
            .map(|&(_, s)| min_redundancy_limited_wr(s, FIG3_N_RX) as f64)
            .collect(),
    ];
    Ok(checks.finish(
        Scenario::Fig3,
        vec![
            OutputFile {
                name: "max_krank.csv".into(),
                contents: table_csv(&["n_s", "ula", "general", "na"], &columns)?,
            },
            OutputFile {
                name: "breakpoints.csv".into(),
                contents: table_csv(&["n_sigma", "min_wr"], &breakpoints)?,
            },
        ],
    ))
}

fn example_one(options: &ReproduceOptions) -> Result<Reproduction> {
    let mut checks = Checks::default();
    let seeds: Vec<u64> = (0..options.scenes as u64)
        .map(|i| options.seed + i)
        .collect();
    let config = RecoveryConfig::example_one(seeds, vec![None, Some(7.0)]);

    // krank of a 24-column matrix at level 12 needs C(24,12) subsets
    let mut policy = options.policy;
    policy.max_subset_budget = policy
        .max_subset_budget
        .max(binomial(config.grid_size, 12) as u64);

    let arrays = gna(config.n_tx, config.n_rx, config.delta)?;
    let grid = AngularGrid::sin_uniform(config.grid_size)?;
    for arm in &config.arms {
        let s = crate::recovery::arm_waveform(&config, arm)?;
        let b = build_sensing_matrix(&s, &arrays, &grid)?;
        checks.eq(
            format!("krank(B) {}", arm.name),
            12,
            kruskal_rank(b.b(), &policy)?,
        );
    }

    let rows = recovery_experiment(&config, &options.policy)?;
    for arm in &config.arms {
        let noiseless: Vec<_> = rows
            .iter()
            .filter(|r| r.arm == arm.name && r.snr_db.is_none())
            .collect();
        let ok = noiseless.iter().filter(|r| r.success).count();
        checks.add(
            format!("noiseless exact recovery, {} arm", arm.name),
            ok == noiseless.len() && !noiseless.is_empty(),
            format!("{} of {}", noiseless.len(), noiseless.len()),
            format!("{ok} of {}", noiseless.len()),
        );
    }
    let noisy = rows.iter().filter(|r| r.snr_db.is_some()).count();
    checks.add(
        "7 dB runs completed",
        noisy == config.arms.len() * config.seeds.len(),
        config.arms.len() * config.seeds.len(),
        noisy,
    );
    Ok(checks.finish(
        Scenario::Ex1,
        vec![OutputFile {
            name: "recovery.csv".into(),
            contents: rows_to_csv(&rows)?,
        }],
    ))
}
