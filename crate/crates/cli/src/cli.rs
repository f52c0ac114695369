//! Argument parsing and the exit-code contract.
//!
//! `run_cli` returns the process exit code instead of exiting, so tests
//! can drive the full command path in-process:
//!
//! - `0` — success (`verify` additionally requires every check to pass);
//! - `1` — a verification check ran and failed;
//! - `2` — anything that prevented a meaningful run: unknown names,
//!   unreadable files, malformed configs or tables, violated
//!   preconditions. Every such failure prints one line to stderr.
//!
//! All deterministic output (reports, summaries) goes to stdout; runtimes,
//! which vary between runs, go to stderr.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::config::{Equation, GeodesicConfig, RunConfig, VerifyConfig};
use crate::diag::{CliResult, Diagnostic};
use crate::format::fmt_float;
use crate::geodesic::{run_geodesic, GeodesicKind};
use crate::sim::run_simulation;
use crate::transform::{apply_transform, TransformKind};
use crate::verify::{parse_check, run_all, run_check, CheckSelection};

#[derive(Parser)]
#[command(
    name = "denslab",
    version,
    about = "Spectral laboratory for densities, wave functions and curves on the periodic circle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one flow from a JSON config and write CSV snapshots plus
    /// a manifest.
    Simulate {
        /// Equation name; must match the config's `equation` field.
        equation: String,
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `out_dir`.
        #[arg(long = "out-dir")]
        out_dir: Option<PathBuf>,
    },
    /// Run a verification check (or `all`) and print its report.
    Verify {
        /// kahler | conjugacy | neumann-fisher | hasimoto-nls |
        /// twohs-sasaki | much-horizontal | hamilton-jacobi | fr-geodesic |
        /// conservation | all
        check: String,
        /// Optional JSON override document.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the headline tolerance of the check.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Map one CSV field table through a core transform.
    Transform {
        /// madelung | madelung-inv | hasimoto
        kind: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Sample a geodesic described by a JSON config.
    Geodesic {
        /// fisher-rao | fubini-study
        kind: String,
        #[arg(long)]
        config: PathBuf,
    },
}

/// Parse `argv` and execute; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            if err.use_stderr() {
                // clap's rendering is multi-line (and, for a missing
                // subcommand, a full help page); keep the most telling
                // line as the one-line diagnostic
                let text = err.render().to_string();
                let line = text
                    .lines()
                    .find(|l| l.starts_with("error"))
                    .or_else(|| text.lines().find(|l| l.starts_with("Usage")))
                    .or_else(|| text.lines().next())
                    .unwrap_or("error: bad arguments");
                eprintln!("{line}");
                return 2;
            }
            // --help / --version
            print!("{err}");
            return 0;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(diag) => {
            eprintln!("error: {diag}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Simulate {
            equation,
            config,
            out_dir,
        } => simulate(&equation, &config, out_dir.as_deref()),
        Command::Verify { check, config, tol } => verify(&check, config.as_deref(), tol),
        Command::Transform {
            kind,
            input,
            output,
        } => transform(&kind, &input, &output),
        Command::Geodesic { kind, config } => geodesic(&kind, &config),
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| Diagnostic::in_context(format!("cannot read {}", path.display()), e))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| Diagnostic::in_context(path.display(), e))
}

fn simulate(equation: &str, config_path: &Path, out_flag: Option<&Path>) -> CliResult<i32> {
    let requested = Equation::from_name(equation)
        .ok_or_else(|| Diagnostic::new(format!("unknown equation '{equation}'")))?;
    let text = read_file(config_path)?;
    let config: RunConfig = parse_json(config_path, &text)?;
    if config.equation != requested {
        return Err(Diagnostic::new(format!(
            "config is for equation '{}', command line says '{}'",
            config.equation.name(),
            requested.name()
        )));
    }
    let out_dir: PathBuf = match (out_flag, &config.out_dir) {
        (Some(dir), _) => dir.to_path_buf(),
        (None, Some(dir)) => PathBuf::from(dir),
        (None, None) => {
            return Err(Diagnostic::new(
                "no output directory: set `out_dir` in the config or pass --out-dir",
            ))
        }
    };
    let manifest = run_simulation(&config, &out_dir)?;
    println!(
        "wrote {} snapshots ({} files) to {}",
        manifest.snapshot_count,
        manifest.files.len() + 1,
        out_dir.display()
    );
    Ok(0)
}

fn verify(check: &str, config_path: Option<&Path>, tol: Option<f64>) -> CliResult<i32> {
    let selection = parse_check(check)?;
    let config: VerifyConfig = match config_path {
        None => VerifyConfig::default(),
        Some(path) => parse_json(path, &read_file(path)?)?,
    };
    let reports = match selection {
        CheckSelection::One(check) => {
            let start = Instant::now();
            let report = run_check(check, &config, tol)?;
            vec![(report, start.elapsed().as_secs_f64())]
        }
        CheckSelection::All => run_all(&config, tol)?,
    };
    let mut all_passed = true;
    let mut passed_count = 0usize;
    for (report, runtime) in &reports {
        print!("{}", report.render());
        eprintln!("runtime: {} {:.3}s", report.name, runtime);
        all_passed = all_passed && report.passed;
        passed_count += usize::from(report.passed);
    }
    if reports.len() > 1 {
        println!("checks passed: {passed_count}/{}", reports.len());
    }
    Ok(if all_passed { 0 } else { 1 })
}

fn transform(kind: &str, input: &Path, output: &Path) -> CliResult<i32> {
    let kind = TransformKind::from_name(kind)
        .ok_or_else(|| Diagnostic::new(format!("unknown transform '{kind}'")))?;
    let text = read_file(input)?;
    let out_text =
        apply_transform(kind, &text).map_err(|d| Diagnostic::in_context(input.display(), d))?;
    fs::write(output, out_text)
        .map_err(|e| Diagnostic::in_context(format!("cannot write {}", output.display()), e))?;
    println!("wrote {}", output.display());
    Ok(0)
}

fn geodesic(kind: &str, config_path: &Path) -> CliResult<i32> {
    let kind = GeodesicKind::from_name(kind)
        .ok_or_else(|| Diagnostic::new(format!("unknown geodesic kind '{kind}'")))?;
    let config: GeodesicConfig = parse_json(config_path, &read_file(config_path)?)?;
    let summary = run_geodesic(kind, &config)?;
    println!("distance: {}", fmt_float(summary.distance));
    println!("wrote {}/{}", config.out_dir, summary.table);
    Ok(0)
}
