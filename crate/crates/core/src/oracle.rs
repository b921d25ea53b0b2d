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

//! Classical reference for pattern detection.
//!
//! Works on pixel grids only and never looks at circuits.

use std::io::Write;

use serde::Serialize;

use crate::bitstring;
use crate::pqht::{PatternSpec, Pixel, PixelGrid};

/// True iff every pixel of `pattern` is set in `grid`.
pub fn pattern_present(grid: &PixelGrid, pattern: &PatternSpec) -> bool {
    pattern.pixels.iter().all(|&p| grid.get(p))
}

/// Detection bits for every pattern, pattern `i` in bit `i`.
pub fn detect(grid: &PixelGrid, patterns: &[PatternSpec]) -> u64 {
    patterns
        .iter()
        .enumerate()
        .fold(0, |acc, (i, pat)| acc | ((pattern_present(grid, pat) as u64) << i))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruthRow {
    pub input: u64,
    pub output: u64,
    pub input_bits: String,
    pub expected_output: String,
}

/// Expected detections for every assignment of the input pixels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruthTable {
    pub inputs: Vec<Pixel>,
    pub patterns: Vec<String>,
    pub rows: Vec<TruthRow>,
}

impl TruthTable {
    pub fn detection_rows(&self) -> impl Iterator<Item = &TruthRow> {
        self.rows.iter().filter(|r| r.output != 0)
    }

    pub fn row(&self, input: u64) -> Option<&TruthRow> {
        self.rows.get(input as usize)
    }

    /// CSV with header `input_bits,expected_output`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "input_bits,expected_output")?;
        for r in &self.rows {
            writeln!(out, "{},{}", r.input_bits, r.expected_output)?;
        }
        Ok(())
    }
}

/// Enumerate all `2^inputs.len()` vectors in ascending order; bit `i` of the
/// row index is the pixel `inputs[i]`.
pub fn full_truth_table(
    width: usize,
    height: usize,
    inputs: &[Pixel],
    patterns: &[PatternSpec],
) -> TruthTable {
    assert!(inputs.len() < 32, "truth table too large");
    let rows = (0..1u64 << inputs.len())
        .map(|v| {
            let mut grid = PixelGrid::blank(width, height);
            for (i, &p) in inputs.iter().enumerate() {
                grid.set(p, (v >> i) & 1 == 1);
            }
            let output = detect(&grid, patterns);
            TruthRow {
                input: v,
                output,
                input_bits: bitstring(v, inputs.len()),
                expected_output: bitstring(output, patterns.len()),
            }
        })
        .collect();
    TruthTable {
        inputs: inputs.to_vec(),
        patterns: patterns.iter().map(|p| p.name.clone()).collect(),
        rows,
    }
}
