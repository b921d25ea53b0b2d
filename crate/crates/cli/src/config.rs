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

//! Run configuration: defaults, `key=value` config files and flag overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use pqht::noise::NoiseParams;
use pqht::oracle::{full_truth_table, TruthTable};
use pqht::pqht::{
    assign_layout, default_3x3_patterns, parse_patterns, MeasureMode, PatternSpec, PixelGrid,
    PqhtLayout,
};

use crate::HarnessError;

pub const DEFAULT_SHOTS: u64 = 2048;
pub const DEFAULT_SEED: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Ideal,
    Noisy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum CouplingPreset {
    #[default]
    #[serde(rename = "none")]
    None,
    #[serde(rename = "heavy-hex-27")]
    HeavyHex27,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

fn bad_value(key: &str, value: &str, allowed: &str) -> HarnessError {
    HarnessError::Config(format!("{key}: expected {allowed}, got {value:?}"))
}

impl FromStr for Engine {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "ideal" => Ok(Engine::Ideal),
            "noisy" => Ok(Engine::Noisy),
            _ => Err(bad_value("engine", s, "ideal|noisy")),
        }
    }
}

impl FromStr for CouplingPreset {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "none" => Ok(CouplingPreset::None),
            "heavy-hex-27" => Ok(CouplingPreset::HeavyHex27),
            _ => Err(bad_value("coupling", s, "none|heavy-hex-27")),
        }
    }
}

impl FromStr for OutputFormat {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(bad_value("format", s, "csv|json")),
        }
    }
}

fn parse_measure(s: &str) -> Result<MeasureMode, HarnessError> {
    match s {
        "outputs" => Ok(MeasureMode::Outputs),
        "all" => Ok(MeasureMode::All),
        _ => Err(bad_value("measure", s, "outputs|all")),
    }
}

impl fmt::Display for CouplingPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CouplingPreset::None => "none",
            CouplingPreset::HeavyHex27 => "heavy-hex-27",
        })
    }
}

/// Settings that may come from a config file or from flags. `None` means
/// "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub grid: Option<PathBuf>,
    pub patterns: Option<PathBuf>,
    pub engine: Option<Engine>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub r01: Option<f64>,
    pub r10: Option<f64>,
    pub coupling: Option<CouplingPreset>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub measure: Option<MeasureMode>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl Overrides {
    /// Parse `key=value` lines. Blank lines and `#` comments are skipped;
    /// relative paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, HarnessError> {
        let mut o = Overrides::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected key=value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<f64, HarnessError> {
                v.parse().map_err(|_| bad_value(key, v, "a number"))
            };
            let int = |v: &str| -> Result<u64, HarnessError> {
                v.parse().map_err(|_| bad_value(key, v, "a non-negative integer"))
            };
            match key {
                "grid" => o.grid = Some(base.join(value)),
                "patterns" => o.patterns = Some(base.join(value)),
                "engine" => o.engine = Some(value.parse()?),
                "p1" => o.p1 = Some(num(value)?),
                "p2" => o.p2 = Some(num(value)?),
                "r01" => o.r01 = Some(num(value)?),
                "r10" => o.r10 = Some(num(value)?),
                "coupling" => o.coupling = Some(value.parse()?),
                "shots" => o.shots = Some(int(value)?),
                "seed" => o.seed = Some(int(value)?),
                "measure" => o.measure = Some(parse_measure(value)?),
                "out" => o.out = Some(base.join(value)),
                "format" => o.format = Some(value.parse()?),
                _ => return Err(HarnessError::Config(format!("line {}: unknown key {key:?}", n + 1))),
            }
        }
        Ok(o)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Values from `other` win where given.
    pub fn merged_with(self, other: Overrides) -> Overrides {
        Overrides {
            grid: other.grid.or(self.grid),
            patterns: other.patterns.or(self.patterns),
            engine: other.engine.or(self.engine),
            p1: other.p1.or(self.p1),
            p2: other.p2.or(self.p2),
            r01: other.r01.or(self.r01),
            r10: other.r10.or(self.r10),
            coupling: other.coupling.or(self.coupling),
            shots: other.shots.or(self.shots),
            seed: other.seed.or(self.seed),
            measure: other.measure.or(self.measure),
            out: other.out.or(self.out),
            format: other.format.or(self.format),
        }
    }
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: Option<PathBuf>,
    pub patterns: Option<PathBuf>,
    pub engine: Engine,
    /// Present iff `engine` is noisy.
    pub noise: Option<NoiseParams>,
    pub coupling: CouplingPreset,
    pub shots: u64,
    pub seed: u64,
    pub measure: MeasureMode,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: None,
            patterns: None,
            engine: Engine::Ideal,
            noise: None,
            coupling: CouplingPreset::None,
            shots: DEFAULT_SHOTS,
            seed: DEFAULT_SEED,
            measure: MeasureMode::Outputs,
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    /// Noise rates that are not given default to 0 on the noisy engine; any
    /// rate given with the ideal engine is an error.
    pub fn from_overrides(o: Overrides) -> Result<Self, HarnessError> {
        let engine = o.engine.unwrap_or_default();
        let rates = [o.p1, o.p2, o.r01, o.r10];
        let noise = match engine {
            Engine::Ideal => {
                if rates.iter().any(Option::is_some) {
                    return Err(HarnessError::Config(
                        "noise parameters require --engine noisy".into(),
                    ));
                }
                None
            }
            Engine::Noisy => {
                let [p1, p2, r01, r10] = rates.map(|r| r.unwrap_or(0.0));
                Some(NoiseParams::new(p1, p2, r01, r10).map_err(|e| HarnessError::Config(e.to_string()))?)
            }
        };
        let shots = o.shots.unwrap_or(DEFAULT_SHOTS);
        if shots == 0 {
            return Err(HarnessError::Config("shots must be at least 1".into()));
        }
        Ok(RunConfig {
            grid: o.grid,
            patterns: o.patterns,
            engine,
            noise,
            coupling: o.coupling.unwrap_or_default(),
            shots,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            measure: o.measure.unwrap_or_default(),
            out: o.out,
            format: o.format.unwrap_or_default(),
        })
    }

    pub fn scenario(&self) -> Result<Scenario, HarnessError> {
        Scenario::load(self.grid.as_deref(), self.patterns.as_deref())
    }
}

/// Grid, patterns, line layout and truth table of one run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub grid: PixelGrid,
    pub patterns: Vec<PatternSpec>,
    pub layout: PqhtLayout,
    pub table: TruthTable,
}

fn read(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

impl Scenario {
    /// The 3×3 preset unless files are given. Without a grid file the grid is
    /// the bounding box of the pattern pixels.
    pub fn load(grid: Option<&Path>, patterns: Option<&Path>) -> Result<Self, HarnessError> {
        let cfg = |e: pqht::pqht::PqhtError| HarnessError::Config(e.to_string());
        let patterns = match patterns {
            Some(p) => parse_patterns(&read(p)?).map_err(cfg)?,
            None => default_3x3_patterns(),
        };
        let grid = match grid {
            Some(g) => PixelGrid::parse(&read(g)?).map_err(cfg)?,
            None => {
                let pixels = patterns.iter().flat_map(|p| &p.pixels);
                let w = pixels.clone().map(|p| p.col + 1).max().unwrap_or(1);
                let h = pixels.map(|p| p.row + 1).max().unwrap_or(1);
                PixelGrid::blank(w.max(3), h.max(3))
            }
        };
        let layout = assign_layout(&grid, &patterns).map_err(cfg)?;
        if layout.inputs.len() > 16 {
            return Err(HarnessError::Config(format!(
                "{} input lines; full coverage is limited to 16",
                layout.inputs.len()
            )));
        }
        let table = full_truth_table(grid.width(), grid.height(), &layout.inputs, &patterns);
        Ok(Scenario {
            grid,
            patterns,
            layout,
            table,
        })
    }
}
