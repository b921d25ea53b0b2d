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

//! Verification harness for PQHT circuits: full-coverage runs, certainty
//! sweeps, OpenQASM export, gadget checks and transpilation reports.

pub mod cli;
pub mod commands;
pub mod config;

use std::path::PathBuf;

use thiserror::Error;

pub use commands::{
    cmd_certainty_sweep, cmd_coverage, cmd_export_qasm, cmd_gadget_check, cmd_transpile_report,
    CoverageRecord, CoverageResult, GadgetReport, Manifest, ManifestEntry, SweepRow,
    TranspileSummary,
};
pub use config::{CouplingPreset, Engine, OutputFormat, Overrides, RunConfig, Scenario};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("run failed: {0}")]
    Run(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Run(_) => exit::FAIL,
            HarnessError::Config(_) => exit::CONFIG,
            HarnessError::Io { .. } => exit::IO,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn run(e: impl std::fmt::Display) -> Self {
        HarnessError::Run(e.to_string())
    }
}

pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const IO: i32 = 3;
}
