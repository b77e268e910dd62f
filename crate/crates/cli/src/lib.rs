//! Command-line front end: `run` a single experiment or `sweep` a grid.
//!
//! Every configuration key is both a `--kebab-case` flag and a key in the
//! flat `key = value` file named by `--config`. Flags win over the file,
//! the file over the defaults.

pub mod config;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Arg, ArgMatches, Command};
use nalseq::lab::{
    ceiling, final_quarter_accuracy, sweep, windowed_accuracy, AccuracySeries, LabError, SweepCell,
};
use nalseq::StepReport;
use thiserror::Error;

pub use config::{parse_config, RunConfig, FIELDS};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: expected {expected}")]
    InvalidValue {
        key: &'static str,
        value: String,
        expected: &'static str,
    },
    #[error("config line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("{0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Lab(#[from] LabError),
}

impl CliError {
    /// 2 for anything the caller got wrong, 1 for failures while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Lab(LabError::EmptyRange) => 2,
            CliError::Lab(_) => 1,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub final_accuracy: f64,
    pub ceiling: f64,
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "final_accuracy={:.3} ceiling={:.3}",
            self.final_accuracy, self.ceiling
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub m_values: Vec<usize>,
    pub k_values: Vec<usize>,
    pub output: PathBuf,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |e| CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

/// One row per report; `window_accuracy` stays blank until the window fills.
pub fn write_accuracy_csv(
    reports: &[StepReport],
    series: &AccuracySeries,
    path: &Path,
) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    let bit = |b: bool| if b { "1" } else { "0" };
    w.write_record([
        "step",
        "input",
        "predicted",
        "correct",
        "burst",
        "window_accuracy",
        "new_links",
        "evicted_links",
    ])
    .map_err(csv_err(path))?;
    for r in reports {
        let predicted = r.predicted.as_ref().map(|s| s.as_str()).unwrap_or("");
        let window = series
            .at(r.step_index)
            .map(|a| format!("{a:.6}"))
            .unwrap_or_default();
        w.write_record([
            r.step_index.to_string().as_str(),
            r.input.as_str(),
            predicted,
            bit(r.correct),
            bit(r.burst),
            &window,
            &r.new_links.to_string(),
            &r.evicted_links.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_sweep_csv(cells: &[SweepCell], path: &Path) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(["m", "k", "final_accuracy", "ceiling"])
        .map_err(csv_err(path))?;
    for c in cells {
        w.write_record([
            c.m.to_string(),
            c.k.to_string(),
            format!("{:.6}", c.final_accuracy),
            format!("{:.6}", c.ceiling),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Runs one experiment and writes its accuracy CSV and network DOT.
pub fn cmd_run(cfg: &RunConfig) -> Result<Summary, CliError> {
    cfg.validate()?;
    let mut model = nalseq::Learner::new(cfg.model.clone()).map_err(LabError::from)?;
    let seq = nalseq::lab::generate(&cfg.spec)?;
    let reports: Vec<StepReport> = seq.iter().map(|s| model.step(s)).collect();
    let series = windowed_accuracy(&reports, cfg.window);
    write_accuracy_csv(&reports, &series, &cfg.accuracy_csv)?;
    let dot = model.network().export_dot(cfg.dot_min_expectation);
    fs::write(&cfg.dot, dot).map_err(io_err(&cfg.dot))?;
    Ok(Summary {
        final_accuracy: final_quarter_accuracy(&reports),
        ceiling: ceiling(&cfg.spec).value,
    })
}

/// Setting-2 runs over the grid, written as one CSV row per cell.
pub fn cmd_sweep(cfg: &RunConfig, grid: &Grid) -> Result<Vec<SweepCell>, CliError> {
    if grid.m_values.is_empty() || grid.k_values.is_empty() {
        return Err(LabError::EmptyRange.into());
    }
    cfg.validate()?;
    let cells = sweep(
        &cfg.model,
        &grid.m_values,
        &grid.k_values,
        cfg.spec.n,
        &cfg.spec.alphabet,
        cfg.spec.seed,
    )?;
    write_sweep_csv(&cells, &grid.output)?;
    Ok(cells)
}

fn kebab(key: &str) -> String {
    key.replace('_', "-")
}

fn config_args() -> Vec<Arg> {
    let mut args = vec![Arg::new("config")
        .long("config")
        .value_name("PATH")
        .help("Flat `key = value` file; flags override its entries")];
    args.extend(FIELDS.iter().map(|f| {
        Arg::new(f.key)
            .long(kebab(f.key))
            .value_name(f.key.to_uppercase())
            .help(f.help)
            .allow_hyphen_values(true)
    }));
    args
}

pub fn command() -> Command {
    Command::new("nalseq")
        .about("Online sequence learning with NAL truth-valued links")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(
            Command::new("run")
                .about("Run one experiment; write accuracy CSV and network DOT")
                .args(config_args()),
        )
        .subcommand(
            Command::new("sweep")
                .about("Run setting 2 over an (m, k) grid and write its CSV")
                .args(config_args())
                .arg(
                    Arg::new("m_values")
                        .long("m-values")
                        .value_name("LIST")
                        .default_value("4,6,8")
                        .help("Comma-separated sub-sequence lengths"),
                )
                .arg(
                    Arg::new("k_values")
                        .long("k-values")
                        .value_name("LIST")
                        .default_value("2,4,8,16")
                        .help("Comma-separated sub-sequence counts"),
                )
                .arg(
                    Arg::new("output")
                        .long("output")
                        .value_name("PATH")
                        .default_value("sweep.csv")
                        .help("Grid CSV output"),
                ),
        )
}

fn config_from(matches: &ArgMatches) -> Result<RunConfig, CliError> {
    let file = match matches.get_one::<String>("config") {
        Some(p) => {
            let p = Path::new(p);
            Some(fs::read_to_string(p).map_err(io_err(p))?)
        }
        None => None,
    };
    let flags: Vec<(String, String)> = FIELDS
        .iter()
        .filter_map(|f| {
            matches
                .get_one::<String>(f.key)
                .map(|v| (f.key.to_string(), v.clone()))
        })
        .collect();
    parse_config(&flags, file.as_deref())
}

fn list(matches: &ArgMatches, id: &'static str) -> Result<Vec<usize>, CliError> {
    let raw = matches
        .get_one::<String>(id)
        .map(String::as_str)
        .unwrap_or("");
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|_| CliError::InvalidValue {
                key: id,
                value: raw.to_string(),
                expected: "comma-separated unsigned integers",
            })
        })
        .collect()
}

fn dispatch(matches: &ArgMatches, out: &mut dyn Write) -> Result<(), CliError> {
    let stdout = |e| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    match matches.subcommand() {
        Some(("run", sub)) => {
            let summary = cmd_run(&config_from(sub)?)?;
            writeln!(out, "{summary}").map_err(stdout)
        }
        Some(("sweep", sub)) => {
            let cfg = config_from(sub)?;
            let grid = Grid {
                m_values: list(sub, "m_values")?,
                k_values: list(sub, "k_values")?,
                output: PathBuf::from(sub.get_one::<String>("output").expect("has default")),
            };
            let cells = cmd_sweep(&cfg, &grid)?;
            writeln!(
                out,
                "wrote {} cells to {}",
                cells.len(),
                grid.output.display()
            )
            .map_err(stdout)
        }
        _ => unreachable!("subcommand required"),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 success, 1 runtime or I/O failure, 2 usage error.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match dispatch(&matches, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
