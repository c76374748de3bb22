use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use statpoints::grid::{Domain, GridField, TestFunction};
use statpoints::kernels::KernelKind;
use statpoints::oracle::{self, Curve};
use statpoints::patch::Baseline;
use statpoints::pipeline::{self, InputDescriptor, RunOptions, RunReport};
use statpoints::plot::{self, PlotOptions};
use statpoints::stationary::SolverConfig;
use statpoints::{Error, Vec2};

/// Stationary points of gridded scalar fields and the curves they form.
#[derive(Debug, Parser)]
#[command(name = "statpoints", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a test function on a grid and write it as CSV.
    Sample(SampleArgs),
    /// Find stationary points and bindings, and write a JSON report.
    Find(FindArgs),
    /// Draw a report over the contour map of its field as SVG.
    Plot(PlotArgs),
    /// Write the exact stationary set of a test function as JSON.
    Truth(TruthArgs),
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Test function: f1, f2, f11, f12, f13 or f14.
    #[arg(long = "fn", value_parser = parse_function)]
    function: TestFunction,
    #[arg(long, default_value_t = 120)]
    nx: usize,
    #[arg(long, default_value_t = 120)]
    ny: usize,
    /// Output CSV path; standard output when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FindArgs {
    /// Sample this test function.
    #[arg(long = "fn", value_parser = parse_function, conflicts_with = "input", required_unless_present = "input")]
    function: Option<TestFunction>,
    /// Read the field from a grid CSV file.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Kernel: gaussian, iq or wendland.
    #[arg(long, default_value = "gaussian", value_parser = parse_kernel)]
    kernel: KernelKind,
    /// Grid columns when sampling a test function.
    #[arg(long, default_value_t = 120)]
    nx: usize,
    /// Grid rows when sampling a test function.
    #[arg(long, default_value_t = 120)]
    ny: usize,
    /// Shape parameter; by default derived from the grid diagonal.
    #[arg(long)]
    alpha: Option<f64>,
    /// Newton seeds per axis of each search box.
    #[arg(long)]
    seeds: Option<usize>,
    /// Newton iteration limit per seed.
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Constant the window interpolants are built on: none or mean.
    #[arg(long, default_value = "none", value_parser = parse_baseline)]
    baseline: Baseline,
    /// Output JSON path; standard output when omitted.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Worker threads; all cores by default.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    /// Record per-stage wall-clock times (makes the output non-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Report written by `find`.
    #[arg(long)]
    report: PathBuf,
    /// Grid CSV of the field; test-function reports are resampled when omitted.
    #[arg(long)]
    field: Option<PathBuf>,
    /// Output SVG path.
    #[arg(short, long)]
    out: PathBuf,
    /// Number of contour levels.
    #[arg(long, default_value_t = 10)]
    levels: usize,
    /// Leave out the exact stationary set of test functions.
    #[arg(long = "no-truth")]
    no_truth: bool,
}

#[derive(Debug, Args)]
struct TruthArgs {
    #[arg(long = "fn", value_parser = parse_function)]
    function: TestFunction,
    /// Points per sampled curve.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Output JSON path; standard output when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn parse_function(s: &str) -> Result<TestFunction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_kernel(s: &str) -> Result<KernelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_baseline(s: &str) -> Result<Baseline, String> {
    match s {
        "none" => Ok(Baseline::None),
        "mean" => Ok(Baseline::Mean),
        _ => Err(format!(
            "unknown baseline '{s}', expected one of: none, mean"
        )),
    }
}

/// Exit status 2 for bad input, 3 for numerical failure.
fn exit_code(e: &Error) -> u8 {
    if e.is_numeric() {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => sample(a),
        Command::Find(a) => find(a),
        Command::Plot(a) => plot_cmd(a),
        Command::Truth(a) => truth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn sample(a: SampleArgs) -> Result<(), Error> {
    let field = a.function.sample(a.nx, a.ny)?;
    let mut buf = Vec::new();
    field
        .write_csv(&mut buf)
        .expect("writing to memory cannot fail");
    emit(
        a.out.as_deref(),
        &String::from_utf8(buf).expect("csv is ascii"),
    )
}

fn find(a: FindArgs) -> Result<(), Error> {
    let (field, input) = match (&a.function, &a.input) {
        (Some(tf), _) => {
            let field = tf.sample(a.nx, a.ny)?;
            let desc = InputDescriptor::for_function(*tf, &field);
            (field, desc)
        }
        (None, Some(path)) => {
            let field = GridField::load_csv(path)?;
            let desc = InputDescriptor::for_file(path, &field);
            (field, desc)
        }
        (None, None) => unreachable!("clap requires --fn or --in"),
    };
    let defaults = SolverConfig::default();
    let opts = RunOptions {
        kernel: a.kernel,
        alpha: a.alpha,
        solver: SolverConfig {
            seeds_per_axis: a.seeds.unwrap_or(defaults.seeds_per_axis),
            max_iterations: a.max_iter.unwrap_or(defaults.max_iterations),
            baseline: a.baseline,
            ..defaults
        },
        threads: a.threads.map(|n| n as usize),
    };
    let run = pipeline::run(&field, &opts)?;
    let report = RunReport::new(input, &opts, &run, a.timings);
    emit(a.json.as_deref(), &report.to_json())
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn plot_cmd(a: PlotArgs) -> Result<(), Error> {
    let report = RunReport::from_json(&read(&a.report)?, &a.report)?;
    report.validate()?;
    let field = match (&a.field, report.input.function) {
        (Some(path), _) => GridField::load_csv(path)?,
        (None, Some(tf)) => tf.sample(report.input.nx, report.input.ny)?,
        (None, None) => {
            return Err(Error::Mismatch(
                "the report was made from a file; pass it with --field".into(),
            ))
        }
    };
    report.input.check(&field)?;
    let truth = report
        .input
        .function
        .filter(|_| !a.no_truth)
        .map(oracle::ground_truth);
    let opts = PlotOptions {
        levels: a.levels,
        ..PlotOptions::default()
    };
    let svg = plot::render_svg(
        &field,
        &report.positions(),
        &report.bindings,
        truth.as_ref(),
        &opts,
    );
    emit(Some(&a.out), &svg)
}

#[derive(Serialize)]
struct TruthCurve {
    #[serde(flatten)]
    curve: Curve,
    samples: Vec<Vec2>,
}

#[derive(Serialize)]
struct TruthExport {
    function: TestFunction,
    domain: Domain,
    isolated: Vec<Vec2>,
    curves: Vec<TruthCurve>,
}

fn truth(a: TruthArgs) -> Result<(), Error> {
    let gt = oracle::ground_truth(a.function);
    let export = TruthExport {
        function: a.function,
        domain: a.function.domain(),
        isolated: gt.isolated,
        curves: gt
            .curves
            .into_iter()
            .map(|curve| TruthCurve {
                curve,
                samples: curve.sample(a.samples),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&export).expect("ground truth serializes");
    text.push('\n');
    emit(a.out.as_deref(), &text)
}
