// Copyright contributors to the pqht project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Argument parsing and report output.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pqht::pqht::MeasureMode;

use crate::commands::{
    cmd_certainty_sweep, cmd_coverage, cmd_export_qasm, cmd_gadget_check, cmd_transpile_report,
};
use crate::config::{CouplingPreset, Engine, OutputFormat, Overrides, RunConfig};
use crate::{exit, HarnessError};

#[derive(Debug, Parser)]
#[command(name = "pqht", version, about = "PQHT circuit verification harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every input vector and compare the argmax channel with the oracle.
    Coverage,
    /// Certainty per engine for every vector containing each target pattern.
    Sweep {
        /// Pattern names; all patterns when omitted.
        targets: Vec<String>,
    },
    /// Write one OpenQASM 2.0 file per input vector plus manifest.json.
    ExportQasm,
    /// Exhaustive adder, comparator and threshold-unit checks.
    Gadgets {
        #[arg(long, hide = true)]
        mutate_adder: bool,
    },
    /// Depth and gate counts before and after transpilation.
    TranspileReport {
        /// Input bits; every input set when omitted.
        #[arg(long)]
        vector: Option<String>,
    },
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// key=value config file; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "FILE")]
    pub grid: Option<PathBuf>,
    #[arg(long, global = true, value_name = "FILE")]
    pub patterns: Option<PathBuf>,
    #[arg(long, global = true, value_name = "ideal|noisy")]
    pub engine: Option<String>,
    #[arg(long, global = true)]
    pub p1: Option<f64>,
    #[arg(long, global = true)]
    pub p2: Option<f64>,
    #[arg(long, global = true)]
    pub r01: Option<f64>,
    #[arg(long, global = true)]
    pub r10: Option<f64>,
    #[arg(long, global = true, value_name = "none|heavy-hex-27")]
    pub coupling: Option<String>,
    #[arg(long, global = true, value_name = "N")]
    pub shots: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "outputs|all")]
    pub measure: Option<String>,
    /// Same as --measure all.
    #[arg(long, global = true, conflicts_with = "measure")]
    pub measure_all: bool,
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "csv|json")]
    pub format: Option<String>,
}

impl RunArgs {
    pub fn overrides(&self) -> Result<Overrides, HarnessError> {
        let measure = match (self.measure_all, self.measure.as_deref()) {
            (true, _) | (false, Some("all")) => Some(MeasureMode::All),
            (false, Some("outputs")) => Some(MeasureMode::Outputs),
            (false, Some(other)) => {
                return Err(HarnessError::Config(format!("measure: expected outputs|all, got {other:?}")))
            }
            (false, None) => None,
        };
        Ok(Overrides {
            grid: self.grid.clone(),
            patterns: self.patterns.clone(),
            engine: self.engine.as_deref().map(str::parse::<Engine>).transpose()?,
            p1: self.p1,
            p2: self.p2,
            r01: self.r01,
            r10: self.r10,
            coupling: self.coupling.as_deref().map(str::parse::<CouplingPreset>).transpose()?,
            shots: self.shots,
            seed: self.seed,
            measure,
            out: self.out.clone(),
            format: self.format.as_deref().map(str::parse::<OutputFormat>).transpose()?,
        })
    }

    /// Config file values overridden by flags.
    pub fn resolve(&self) -> Result<RunConfig, HarnessError> {
        let base = match &self.config {
            Some(path) => Overrides::load(path)?,
            None => Overrides::default(),
        };
        RunConfig::from_overrides(base.merged_with(self.overrides()?))
    }
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(HarnessError::run)?;
    }
    w.into_inner().map_err(HarnessError::run)
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, HarnessError> {
    let mut v = serde_json::to_vec_pretty(value).map_err(HarnessError::run)?;
    v.push(b'\n');
    Ok(v)
}

fn write_to(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

/// With `--out`, write `<stem>.csv` and `<stem>.json` there; otherwise print
/// the selected format.
fn emit<R: Serialize, J: Serialize>(
    config: &RunConfig,
    stem: &str,
    rows: &[R],
    report: &J,
    stdout: &mut dyn Write,
) -> Result<(), HarnessError> {
    match &config.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
            write_to(&dir.join(format!("{stem}.csv")), &csv_bytes(rows)?)?;
            write_to(&dir.join(format!("{stem}.json")), &json_bytes(report)?)
        }
        None => {
            let bytes = match config.format {
                OutputFormat::Csv => csv_bytes(rows)?,
                OutputFormat::Json => json_bytes(report)?,
            };
            stdout.write_all(&bytes).map_err(|e| HarnessError::io("<stdout>", e))
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, HarnessError> {
    let config = cli.options.resolve()?;
    let note = |stderr: &mut dyn Write, msg: String| {
        let _ = writeln!(stderr, "{msg}");
    };
    match &cli.command {
        Command::Coverage => {
            let result = cmd_coverage(&config)?;
            emit(&config, "coverage", &result.records, &result, stdout)?;
            note(stderr, format!("coverage: {}/{} pass", result.passed, result.total));
            if !result.failed.is_empty() {
                note(stderr, format!("failing vectors: {}", result.failed.join(" ")));
            }
            Ok(result.exit_code())
        }
        Command::Sweep { targets } => {
            let rows = cmd_certainty_sweep(&config, targets)?;
            emit(&config, "sweep", &rows, &rows, stdout)?;
            note(stderr, format!("sweep: {} rows", rows.len()));
            Ok(exit::PASS)
        }
        Command::ExportQasm => {
            let dir = config
                .out
                .clone()
                .ok_or_else(|| HarnessError::Config("export-qasm needs --out DIR".into()))?;
            let manifest = cmd_export_qasm(&config, &dir)?;
            note(stderr, format!("wrote {} circuits to {}", manifest.entries.len(), dir.display()));
            Ok(exit::PASS)
        }
        Command::Gadgets { mutate_adder } => {
            let report = cmd_gadget_check(*mutate_adder)?;
            for c in &report.checks {
                let status = if c.ok() { "PASS" } else { "FAIL" };
                note(stderr, format!("{status} {} {}/{}", c.name, c.passed, c.cases));
                if let Some(f) = &c.first_failure {
                    note(
                        stderr,
                        format!("  counterexample {}: expected {} got {}", f.input, f.expected, f.got),
                    );
                }
            }
            emit(&config, "gadgets", &summary_rows(&report), &report, stdout)?;
            Ok(report.exit_code())
        }
        Command::TranspileReport { vector } => {
            let summary = cmd_transpile_report(&config, vector.as_deref())?;
            emit(&config, "transpile", std::slice::from_ref(&summary), &summary, stdout)?;
            Ok(if summary.equivalent { exit::PASS } else { exit::FAIL })
        }
    }
}

#[derive(Serialize)]
struct GadgetRow<'a> {
    name: &'a str,
    cases: usize,
    passed: usize,
}

fn summary_rows(report: &crate::GadgetReport) -> Vec<GadgetRow<'_>> {
    report
        .checks
        .iter()
        .map(|c| GadgetRow {
            name: &c.name,
            cases: c.cases,
            passed: c.passed,
        })
        .collect()
}

/// Parse `args` (including the program name), run the command and return the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { exit::CONFIG } else { exit::PASS };
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
