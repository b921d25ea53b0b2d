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

use std::fs;
use std::path::Path;

use serde::Serialize;

use pqht::gadgets::{
    build_adder3, build_comparator_lt, build_threshold_unit, check_adder3, check_comparator_lt,
    check_threshold, check_threshold_matches_maxfinder, AdderLayout, ComparatorLayout, GadgetCheck,
};
use pqht::noise::{certainty, NoiseParams, NoisySimulator};
use pqht::pqht::{build_pqht_with, BuildOptions, MeasureMode};
use pqht::transpile::{transpile, verify_equivalence, CouplingMap, TranspileOptions};
use pqht::{parse_bitstring, Gate, QuantumCircuit, QubitId, ShotHistogram, Simulator};

use crate::config::{CouplingPreset, Engine, RunConfig, Scenario};
use crate::{exit, HarnessError};

/// One coverage row; also the CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRecord {
    pub input_bits: String,
    pub expected: String,
    pub argmax: String,
    pub certainty: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageResult {
    pub engine: Engine,
    pub noise: Option<NoiseParams>,
    pub coupling: CouplingPreset,
    pub measure: MeasureMode,
    pub shots: u64,
    pub seed: u64,
    pub total: usize,
    pub passed: usize,
    pub failed: Vec<String>,
    pub records: Vec<CoverageRecord>,
}

impl CoverageResult {
    pub fn exit_code(&self) -> i32 {
        if self.passed == self.total {
            exit::PASS
        } else {
            exit::FAIL
        }
    }
}

fn coupling_map(preset: CouplingPreset) -> Option<CouplingMap> {
    match preset {
        CouplingPreset::None => None,
        CouplingPreset::HeavyHex27 => Some(CouplingMap::heavy_hex_27()),
    }
}

fn vector_circuit(
    scenario: &Scenario,
    input: u64,
    measure: MeasureMode,
    coupling: Option<&CouplingMap>,
    seed: u64,
) -> Result<QuantumCircuit, HarnessError> {
    let opts = BuildOptions {
        measure,
        ..BuildOptions::default()
    };
    let grid = scenario.layout.grid_for_vector(input);
    let (circuit, _) = build_pqht_with(&grid, &scenario.patterns, &opts).map_err(HarnessError::run)?;
    match coupling {
        None => Ok(circuit),
        Some(map) => {
            let opts = TranspileOptions {
                seed,
                ..TranspileOptions::default()
            };
            Ok(transpile(&circuit, Some(map), opts).map_err(HarnessError::run)?.circuit)
        }
    }
}

/// Shots on the output channels of `circuit`.
fn output_histogram(
    circuit: &QuantumCircuit,
    scenario: &Scenario,
    measure: MeasureMode,
    noise: Option<&NoiseParams>,
    shots: u64,
    seed: u64,
) -> Result<ShotHistogram, HarnessError> {
    let hist = match noise {
        None => Simulator::default().sample_shots(circuit, shots, seed).map_err(HarnessError::run)?,
        Some(p) => NoisySimulator::new(*p)
            .map_err(HarnessError::run)?
            .sample_shots(circuit, shots, seed)
            .map_err(HarnessError::run)?,
    };
    Ok(hist.project(&scenario.layout.output_clbits(measure)))
}

/// Build, run and score one circuit per truth-table row. Row `i` samples
/// with seed `config.seed + i`.
pub fn cmd_coverage(config: &RunConfig) -> Result<CoverageResult, HarnessError> {
    let scenario = config.scenario()?;
    let map = coupling_map(config.coupling);
    let mut records = Vec::with_capacity(scenario.table.rows.len());
    let mut failed = Vec::new();
    for (i, row) in scenario.table.rows.iter().enumerate() {
        let circuit = vector_circuit(&scenario, row.input, config.measure, map.as_ref(), config.seed)?;
        let hist = output_histogram(
            &circuit,
            &scenario,
            config.measure,
            config.noise.as_ref(),
            config.shots,
            config.seed + i as u64,
        )?;
        let argmax = hist.argmax().unwrap_or_default().to_string();
        let pass = argmax == row.expected_output;
        if !pass {
            failed.push(row.input_bits.clone());
        }
        records.push(CoverageRecord {
            input_bits: row.input_bits.clone(),
            expected: row.expected_output.clone(),
            certainty: certainty(&hist, &row.expected_output).map_err(HarnessError::run)?,
            argmax,
            pass,
        });
    }
    Ok(CoverageResult {
        engine: config.engine,
        noise: config.noise,
        coupling: config.coupling,
        measure: config.measure,
        shots: config.shots,
        seed: config.seed,
        total: records.len(),
        passed: records.len() - failed.len(),
        failed,
        records,
    })
}

/// One sweep row; also the CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub target: String,
    pub input_bits: String,
    pub engine: String,
    pub certainty: f64,
}

/// For each target and each input vector containing it, the certainty of the
/// expected output on the ideal engine, on the noisy engine when noise is
/// configured, and on the noisy engine after routing when a coupling map is
/// also selected. An empty target list means every pattern.
pub fn cmd_certainty_sweep(config: &RunConfig, targets: &[String]) -> Result<Vec<SweepRow>, HarnessError> {
    let scenario = config.scenario()?;
    let indices: Vec<usize> = if targets.is_empty() {
        (0..scenario.patterns.len()).collect()
    } else {
        targets
            .iter()
            .map(|t| {
                scenario
                    .patterns
                    .iter()
                    .position(|p| &p.name == t)
                    .ok_or_else(|| HarnessError::Config(format!("unknown pattern {t:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    let map = coupling_map(config.coupling);
    let mut out = Vec::new();
    for k in indices {
        let name = &scenario.patterns[k].name;
        for (i, row) in scenario.table.rows.iter().enumerate() {
            if row.expected_output.as_bytes()[k] != b'1' {
                continue;
            }
            let seed = config.seed + i as u64;
            let plain = vector_circuit(&scenario, row.input, config.measure, None, config.seed)?;
            let mut engines = vec![("ideal", &plain, None)];
            if config.noise.is_some() {
                engines.push(("noisy", &plain, config.noise.as_ref()));
            }
            let routed = match (&map, config.noise) {
                (Some(m), Some(_)) => Some(vector_circuit(&scenario, row.input, config.measure, Some(m), config.seed)?),
                _ => None,
            };
            if let Some(r) = &routed {
                engines.push(("noisy-transpiled", r, config.noise.as_ref()));
            }
            for (engine, circuit, noise) in engines {
                let hist = output_histogram(circuit, &scenario, config.measure, noise, config.shots, seed)?;
                out.push(SweepRow {
                    target: name.clone(),
                    input_bits: row.input_bits.clone(),
                    engine: engine.to_string(),
                    certainty: certainty(&hist, &row.expected_output).map_err(HarnessError::run)?,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub vector: String,
    pub expected: String,
}

/// Settings the exported files were produced with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub generator: String,
    pub grid: String,
    pub patterns: Vec<String>,
    pub measure: MeasureMode,
    pub coupling: CouplingPreset,
    pub transpile_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub provenance: Provenance,
    pub entries: Vec<ManifestEntry>,
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

/// Write `pqht_<bits>.qasm` for every truth-table row plus `manifest.json`.
/// With a coupling map the routed circuits are written.
pub fn cmd_export_qasm(config: &RunConfig, out_dir: &Path) -> Result<Manifest, HarnessError> {
    let scenario = config.scenario()?;
    let map = coupling_map(config.coupling);
    fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let mut entries = Vec::new();
    for row in &scenario.table.rows {
        let circuit = vector_circuit(&scenario, row.input, config.measure, map.as_ref(), config.seed)?;
        let file = format!("pqht_{}.qasm", row.input_bits);
        write_file(&out_dir.join(&file), circuit.to_openqasm().as_bytes())?;
        entries.push(ManifestEntry {
            file,
            vector: row.input_bits.clone(),
            expected: row.expected_output.clone(),
        });
    }
    let manifest = Manifest {
        provenance: Provenance {
            generator: concat!("pqht ", env!("CARGO_PKG_VERSION")).to_string(),
            grid: format!("{}x{}", scenario.grid.width(), scenario.grid.height()),
            patterns: scenario.patterns.iter().map(|p| p.name.clone()).collect(),
            measure: config.measure,
            coupling: config.coupling,
            transpile_seed: map.as_ref().map(|_| config.seed),
        },
        entries,
    };
    let mut json = serde_json::to_string_pretty(&manifest).map_err(HarnessError::run)?;
    json.push('\n');
    write_file(&out_dir.join("manifest.json"), json.as_bytes())?;
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GadgetReport {
    pub checks: Vec<GadgetCheck>,
}

impl GadgetReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(GadgetCheck::ok)
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok() {
            exit::PASS
        } else {
            exit::FAIL
        }
    }
}

/// Drop the first CX of the adder that is not controlled by the carry-in.
fn mutate_adder(circuit: &QuantumCircuit, cin: QubitId) -> QuantumCircuit {
    let mut c = circuit.clone();
    let idx = c
        .instructions()
        .iter()
        .position(|g| matches!(g, Gate::Cx(ctrl, _) if *ctrl != cin))
        .expect("adder contains CX gates");
    c.remove(idx);
    c
}

/// Exhaustive adder, comparator and threshold-unit checks. `mutate_adder`
/// removes one CX from the adder before checking it.
pub fn cmd_gadget_check(mutate: bool) -> Result<GadgetReport, HarnessError> {
    let adder_layout = AdderLayout::standard();
    let mut adder = build_adder3(&adder_layout).map_err(HarnessError::run)?;
    if mutate {
        adder = mutate_adder(&adder, adder_layout.carries[0]);
    }
    let cmp_layout = ComparatorLayout::standard();
    let cmp = build_comparator_lt(&cmp_layout).map_err(HarnessError::run)?;
    let mut checks = vec![
        check_adder3(&adder, &adder_layout).map_err(HarnessError::run)?,
        check_comparator_lt(&cmp, &cmp_layout).map_err(HarnessError::run)?,
    ];
    let inputs: Vec<QubitId> = (0..3).map(QubitId).collect();
    for t in 1..=3 {
        let (unit, out) = build_threshold_unit(&inputs, t).map_err(HarnessError::run)?;
        checks.push(check_threshold(&unit, &inputs, out, t).map_err(HarnessError::run)?);
    }
    checks.push(check_threshold_matches_maxfinder(3).map_err(HarnessError::run)?);
    Ok(GadgetReport { checks })
}

/// Transpilation metrics for one input vector; also the CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranspileSummary {
    pub vector: String,
    pub coupling: CouplingPreset,
    pub depth_before: usize,
    pub depth_after: usize,
    pub cx_count: usize,
    pub swap_count: usize,
    pub total_gates: usize,
    pub seed: u64,
    pub equivalent: bool,
    pub tv_distance: f64,
}

/// Transpile the circuit for `vector` (default: every input set) and check it
/// against the original.
pub fn cmd_transpile_report(config: &RunConfig, vector: Option<&str>) -> Result<TranspileSummary, HarnessError> {
    let scenario = config.scenario()?;
    let width = scenario.layout.inputs.len();
    let input = match vector {
        None => (1u64 << width) - 1,
        Some(bits) => match parse_bitstring(bits) {
            Some(v) if bits.len() == width => v,
            _ => {
                return Err(HarnessError::Config(format!(
                    "vector must be {width} characters of 0/1, got {bits:?}"
                )))
            }
        },
    };
    let original = vector_circuit(&scenario, input, config.measure, None, config.seed)?;
    let map = coupling_map(config.coupling);
    let opts = TranspileOptions {
        seed: config.seed,
        ..TranspileOptions::default()
    };
    let t = transpile(&original, map.as_ref(), opts).map_err(HarnessError::run)?;
    let eq = verify_equivalence(&original, &t.circuit, &t.mapping).map_err(HarnessError::run)?;
    Ok(TranspileSummary {
        vector: pqht::bitstring(input, width),
        coupling: config.coupling,
        depth_before: t.report.depth_before,
        depth_after: t.report.depth_after,
        cx_count: t.report.cx_count,
        swap_count: t.report.swap_count,
        total_gates: t.report.total_gates,
        seed: t.report.seed,
        equivalent: eq.equivalent,
        tv_distance: eq.tv_distance,
    })
}
