use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use coarray::config::{ExperimentConfig, GeometrySpec, GnaParams, GridSpec, Task, WaveformSpec};
use coarray::geometry::{redundancy_pattern, sum_coarray, ArrayPair};
use coarray::identifiability::check_general;
use coarray::linalg::{kruskal_rank_bounds, RankPolicy};
use coarray::recovery::{recovery_experiment, rows_to_csv, RecoveryConfig};
use coarray::reproduce::{reproduce, table_csv, ReproduceOptions, Scenario};
use coarray::sensing::build_sensing_matrix;
use coarray::waveform::tx_beampattern;
use coarray::Error;

/// Identifiability of MIMO active sensing: co-arrays, waveforms, Kruskal rank.
#[derive(Parser)]
#[command(name = "coarray", version)]
struct Cli {
    /// Relative rank tolerance
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    /// Largest number of column subsets enumerated per size
    #[arg(long, global = true)]
    krank_budget: Option<u64>,
    /// Base seed for random scenes and noise
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file, or directory for `reproduce`
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON experiment config
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scripted example and check its published values
    Reproduce {
        /// ex1, ex2, ex3, ex4, fig3 or fig6
        id: Option<String>,
        /// Scenes per SNR for ex1
        #[arg(long, default_value_t = 3)]
        scenes: usize,
    },
    /// Identifiability report for a geometry, waveform and grid
    Identify(Problem),
    /// Kruskal rank of the sensing matrix
    Krank(Problem),
    /// Exhaustive l0 recovery experiment
    Recover {
        /// Scenes per SNR
        #[arg(long, default_value_t = 3)]
        scenes: usize,
        /// SNR values in dB; `inf` for noiseless
        #[arg(long, value_delimiter = ',', default_value = "inf,7")]
        snr: Vec<String>,
    },
    /// Transmit beampattern as CSV
    Beampattern(Problem),
    /// Sum co-array and redundancy pattern of a geometry
    Geometry(Problem),
}

#[derive(Args, Clone, Default)]
struct Problem {
    /// GNA parameters `N_TX,N_RX,DELTA`
    #[arg(long, value_parser = parse_gna)]
    gna: Option<GnaParams>,
    /// Explicit Tx positions
    #[arg(long, value_delimiter = ',', requires = "rx")]
    tx: Option<Vec<usize>>,
    /// Explicit Rx positions
    #[arg(long, value_delimiter = ',', requires = "tx")]
    rx: Option<Vec<usize>>,
    /// `ex3a`..`ex4b`, `matched:N_S[:T]` or `orthogonal[:T]`
    #[arg(long)]
    waveform: Option<String>,
    /// `sin:V` or `theta:V`
    #[arg(long)]
    grid: Option<String>,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidGeometry(_)
            | Error::InvalidGrid(_)
            | Error::InvalidPolicy(_)
            | Error::InvalidArgument(_)
            | Error::UnsupportedGeometry(_)
            | Error::WaveformTooShort { .. }
            | Error::DimensionMismatch { .. }
            | Error::WrongRegime(_)
            | Error::Json(_) => Failure::Usage(e.to_string()),
            other => Failure::Run(other),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let file_config = match &cli.config {
        Some(path) => Some(ExperimentConfig::load(path)?),
        None => None,
    };
    match &cli.command {
        Command::Reproduce { id, scenes } => {
            cmd_reproduce(cli, file_config, id.as_deref(), *scenes)
        }
        Command::Identify(p) => cmd_identify(cli, &problem_config(Task::Identify, file_config, p)?),
        Command::Krank(p) => cmd_krank(cli, &problem_config(Task::Krank, file_config, p)?),
        Command::Recover { scenes, snr } => cmd_recover(cli, file_config, *scenes, snr),
        Command::Beampattern(p) => {
            cmd_beampattern(cli, &problem_config(Task::Beampattern, file_config, p)?)
        }
        Command::Geometry(p) => cmd_geometry(cli, &problem_config(Task::Geometry, file_config, p)?),
    }
}

fn policy(cli: &Cli, config: Option<&ExperimentConfig>) -> Result<RankPolicy, Failure> {
    let base = match config {
        Some(c) => c.policy()?,
        None => RankPolicy::default(),
    };
    Ok(RankPolicy::new(
        cli.rank_tol.unwrap_or(base.relative_tolerance),
        cli.krank_budget.unwrap_or(base.max_subset_budget),
    )?)
}

fn parse_gna(text: &str) -> Result<GnaParams, String> {
    let v: Vec<usize> = text
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    match v.as_slice() {
        [n_tx, n_rx, delta] => Ok(GnaParams {
            n_tx: *n_tx,
            n_rx: *n_rx,
            delta: *delta,
        }),
        _ => Err("expected N_TX,N_RX,DELTA".into()),
    }
}

fn parse_waveform(text: &str) -> Result<WaveformSpec, Failure> {
    let bad = || Failure::Usage(format!("cannot parse waveform {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    match parts.as_slice() {
        ["matched", n_s] => Ok(WaveformSpec::Matched {
            n_s: num(n_s)?,
            t: None,
        }),
        ["matched", n_s, t] => Ok(WaveformSpec::Matched {
            n_s: num(n_s)?,
            t: Some(num(t)?),
        }),
        ["orthogonal"] => Ok(WaveformSpec::Orthogonal { t: None }),
        ["orthogonal", t] => Ok(WaveformSpec::Orthogonal { t: Some(num(t)?) }),
        [name] => Ok(WaveformSpec::Catalog(name.parse()?)),
        _ => Err(bad()),
    }
}

fn parse_grid(text: &str) -> Result<GridSpec, Failure> {
    let bad = || Failure::Usage(format!("cannot parse grid {text:?}; use sin:V or theta:V"));
    let (kind, v) = text.split_once(':').ok_or_else(bad)?;
    let v: usize = v.parse().map_err(|_| bad())?;
    match kind {
        "sin" => Ok(GridSpec::SinUniform { sin_uniform: v }),
        "theta" => Ok(GridSpec::ThetaUniform { theta_uniform: v }),
        _ => Err(bad()),
    }
}

/// Config file (if any) with command-line overrides applied, validated for
/// `task`.
fn problem_config(
    task: Task,
    file_config: Option<ExperimentConfig>,
    p: &Problem,
) -> Result<ExperimentConfig, Failure> {
    let mut config = file_config.unwrap_or_else(|| ExperimentConfig::new(task));
    config.task = task;
    if let Some(gna) = p.gna {
        config.geometry = Some(GeometrySpec::Gna { gna });
    }
    if let (Some(tx), Some(rx)) = (&p.tx, &p.rx) {
        config.geometry = Some(GeometrySpec::Explicit(ArrayPair::new(
            tx.clone(),
            rx.clone(),
        )?));
    }
    if let Some(w) = &p.waveform {
        config.waveform = Some(parse_waveform(w)?);
    }
    if let Some(g) = &p.grid {
        config.grid = Some(parse_grid(g)?);
    }
    config.validate()?;
    Ok(config)
}

fn out_path(cli: &Cli, config: Option<&ExperimentConfig>) -> Option<PathBuf> {
    cli.out
        .clone()
        .or_else(|| config.and_then(|c| c.output.clone()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Failure::Run(e.into()))?;
            }
            std::fs::write(p, text).map_err(|e| Failure::Run(e.into()))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Run(e.into())),
    }
}

struct Resolved {
    arrays: ArrayPair,
    s: coarray::waveform::WaveformMatrix,
    grid: coarray::manifold::AngularGrid,
}

fn resolve(config: &ExperimentConfig, default_grid: GridSpec) -> Result<Resolved, Failure> {
    let geometry = config.geometry.as_ref().expect("validated");
    Ok(Resolved {
        arrays: geometry.resolve()?,
        s: config
            .waveform
            .as_ref()
            .expect("validated")
            .resolve(geometry)?,
        grid: config.grid.clone().unwrap_or(default_grid).resolve()?,
    })
}

fn cmd_reproduce(
    cli: &Cli,
    file_config: Option<ExperimentConfig>,
    id: Option<&str>,
    scenes: usize,
) -> Outcome {
    let scenario: Scenario = match (id, file_config.as_ref().and_then(|c| c.scenario)) {
        (Some(id), _) => id.parse()?,
        (None, Some(s)) => s,
        (None, None) => return Err(Failure::Usage("reproduce needs a scenario id".into())),
    };
    let options = ReproduceOptions {
        policy: policy(cli, file_config.as_ref())?,
        seed: cli.seed,
        scenes,
    };
    let result = reproduce(scenario, &options)?;
    let dir = out_path(cli, file_config.as_ref())
        .unwrap_or_else(|| PathBuf::from("coarray-out").join(scenario.name()));
    let written = result.write_to(&dir)?;
    for check in &result.verdict.checks {
        println!(
            "{} {scenario} {}: {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.found
        );
    }
    for path in written {
        println!("wrote {}", path.display());
    }
    if !result.verdict.passed {
        eprint!("{}", result.verdict.diff_report());
    }
    Ok(result.verdict.passed)
}

fn cmd_identify(cli: &Cli, config: &ExperimentConfig) -> Outcome {
    let r = resolve(config, GridSpec::SinUniform { sin_uniform: 0 })?;
    let report = check_general(&r.s, &r.arrays, &r.grid, &policy(cli, Some(config))?)?;
    emit(
        out_path(cli, Some(config)).as_deref(),
        &(serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n"),
    )?;
    if report.partial {
        eprintln!(
            "partial: krank(B) in [{}, {}], subset budget exceeded",
            report.krank_b, report.krank_b_upper
        );
    }
    Ok(report.achieves_max)
}

fn cmd_krank(cli: &Cli, config: &ExperimentConfig) -> Outcome {
    let r = resolve(config, GridSpec::SinUniform { sin_uniform: 0 })?;
    let sensing = build_sensing_matrix(&r.s, &r.arrays, &r.grid)?;
    let bounds = kruskal_rank_bounds(sensing.b(), &policy(cli, Some(config))?)?;
    let value = json!({
        "rows": sensing.b().nrows(),
        "cols": sensing.b().ncols(),
        "krank": bounds.value(),
        "lower": bounds.lower,
        "upper": bounds.upper,
        "partial": !bounds.is_exact(),
    });
    emit(
        out_path(cli, Some(config)).as_deref(),
        &(serde_json::to_string_pretty(&value).map_err(Error::from)? + "\n"),
    )?;
    Ok(bounds.is_exact())
}

fn cmd_recover(
    cli: &Cli,
    file_config: Option<ExperimentConfig>,
    scenes: usize,
    snr: &[String],
) -> Outcome {
    let recovery = match file_config.as_ref().and_then(|c| c.recovery.clone()) {
        Some(r) => r,
        None => {
            let snr_db = snr
                .iter()
                .map(|s| match s.as_str() {
                    "inf" => Ok(None),
                    v => v
                        .parse::<f64>()
                        .map(Some)
                        .map_err(|_| Failure::Usage(format!("bad snr {v:?}"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let seeds = (0..scenes as u64).map(|i| cli.seed + i).collect();
            RecoveryConfig::example_one(seeds, snr_db)
        }
    };
    let rows = recovery_experiment(&recovery, &policy(cli, file_config.as_ref())?)?;
    emit(
        out_path(cli, file_config.as_ref()).as_deref(),
        &rows_to_csv(&rows)?,
    )?;
    Ok(true)
}

fn cmd_beampattern(cli: &Cli, config: &ExperimentConfig) -> Outcome {
    let r = resolve(config, GridSpec::ThetaUniform { theta_uniform: 181 })?;
    let power = tx_beampattern(&r.s, r.arrays.tx(), &r.grid)?;
    let csv = table_csv(&["theta", "power"], &[r.grid.angles().to_vec(), power])?;
    emit(out_path(cli, Some(config)).as_deref(), &csv)?;
    Ok(true)
}

fn cmd_geometry(cli: &Cli, config: &ExperimentConfig) -> Outcome {
    let arrays = config.geometry.as_ref().expect("validated").resolve()?;
    let coarray = sum_coarray(&arrays);
    let value = json!({
        "tx": arrays.tx(),
        "rx": arrays.rx(),
        "coarray": coarray.positions(),
        "multiplicities": coarray.multiplicities(),
        "n_sigma": coarray.len(),
        "contiguous": coarray.is_contiguous(),
        "upsilon": redundancy_pattern(&arrays).to_rows(),
    });
    emit(
        out_path(cli, Some(config)).as_deref(),
        &(serde_json::to_string_pretty(&value).map_err(Error::from)? + "\n"),
    )?;
    Ok(true)
}
