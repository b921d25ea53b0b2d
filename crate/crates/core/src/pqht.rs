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

//! PQHT circuit construction.
//!
//! Pixels are addressed as `(col, row)` with column 0 the rightmost image
//! column and row 0 the bottom row. A set pixel in column `c` is placed at
//! rotation position `-(4c+1)π`; an unset pixel stays at 0. Each rotation
//! line is opened and closed by a Hadamard, so after the block the line
//! reads `|1⟩` for a set pixel and `|0⟩` otherwise.
//!
//! Every pattern gets one coincidence unit. Units are laid out in pattern
//! order; before unit `k > 0` every set line is shifted by another `-4π`,
//! which leaves the measured outputs unchanged.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{CircuitError, Gate, QuantumCircuit, QubitId};
use crate::gadgets::{self, GadgetError, ThresholdLayout};

/// Rotation applied to every set line between coincidence units.
pub const SHIFT_ANGLE: f64 = -4.0 * PI;

/// Pixel position; column 0 is the rightmost image column, row 0 the bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Pixel {
    pub col: usize,
    pub row: usize,
}

impl Pixel {
    pub const fn new(col: usize, row: usize) -> Self {
        Pixel { col, row }
    }
}

impl fmt::Display for Pixel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.col, self.row)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PqhtError {
    #[error("no patterns given")]
    NoPatterns,
    #[error("pattern {name}: needs at least 2 pixels, got {count}")]
    PatternTooSmall { name: String, count: usize },
    #[error("pattern {name}: pixel {pixel} outside the {width}x{height} grid")]
    PixelOutsideGrid {
        name: String,
        pixel: Pixel,
        width: usize,
        height: usize,
    },
    #[error("pattern {name}: pixel {pixel} listed twice")]
    DuplicatePixel { name: String, pixel: Pixel },
    #[error("pattern name {0} used twice")]
    DuplicateName(String),
    #[error("grid bit count {got} does not match {width}x{height}")]
    GridSize { got: usize, width: usize, height: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
}

/// Binary image. `bits[row * width + col]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PixelGrid {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl PixelGrid {
    /// All-blank grid.
    pub fn blank(width: usize, height: usize) -> Self {
        PixelGrid {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, PqhtError> {
        if bits.len() != width * height {
            return Err(PqhtError::GridSize {
                got: bits.len(),
                width,
                height,
            });
        }
        Ok(PixelGrid {
            width,
            height,
            bits,
        })
    }

    /// Parse rows of `0`/`1` characters as drawn: the first line is the top
    /// row and the first character of a line is the leftmost column.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, PqhtError> {
        let mut rows: Vec<(usize, Vec<bool>)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(PqhtError::Parse {
                        line: i + 1,
                        message: format!("unexpected character {other:?} in grid row"),
                    }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if let Some((_, first)) = rows.first() {
                if first.len() != row.len() {
                    return Err(PqhtError::Parse {
                        line: i + 1,
                        message: format!("row has {} pixels, expected {}", row.len(), first.len()),
                    });
                }
            }
            rows.push((i + 1, row));
        }
        if rows.is_empty() {
            return Err(PqhtError::Parse {
                line: 0,
                message: "grid has no rows".into(),
            });
        }
        let height = rows.len();
        let width = rows[0].1.len();
        let mut grid = PixelGrid::blank(width, height);
        for (top_index, (_, row)) in rows.iter().enumerate() {
            for (left_index, &bit) in row.iter().enumerate() {
                grid.set(Pixel::new(width - 1 - left_index, height - 1 - top_index), bit);
            }
        }
        Ok(grid)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn contains(&self, p: Pixel) -> bool {
        p.col < self.width && p.row < self.height
    }

    pub fn get(&self, p: Pixel) -> bool {
        self.contains(p) && self.bits[p.row * self.width + p.col]
    }

    pub fn set(&mut self, p: Pixel, value: bool) {
        assert!(self.contains(p), "pixel {p} outside grid");
        self.bits[p.row * self.width + p.col] = value;
    }
}

/// A named set of pixels that forms one Hough feature. Pixel order is the
/// order in which the coincidence cascade ANDs the lines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternSpec {
    pub name: String,
    /// Nominal line angle in degrees.
    pub angle_deg: f64,
    pub pixels: Vec<Pixel>,
}

impl PatternSpec {
    pub fn new(name: impl Into<String>, angle_deg: f64, pixels: &[(usize, usize)]) -> Self {
        PatternSpec {
            name: name.into(),
            angle_deg,
            pixels: pixels.iter().map(|&(c, r)| Pixel::new(c, r)).collect(),
        }
    }
}

/// Parse a pattern list. One pattern per line:
///
/// ```text
/// # name angle: pixels as (col,row)
/// B 90: (0,0) (0,1) (0,2)
/// ```
pub fn parse_patterns(text: &str) -> Result<Vec<PatternSpec>, PqhtError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| PqhtError::Parse {
            line: i + 1,
            message,
        };
        let (head, body) = line
            .split_once(':')
            .ok_or_else(|| err("expected `name angle: (col,row) ...`".into()))?;
        let mut head = head.split_whitespace();
        let name = head.next().ok_or_else(|| err("missing pattern name".into()))?;
        let angle: f64 = head
            .next()
            .ok_or_else(|| err("missing angle".into()))?
            .parse()
            .map_err(|_| err("angle is not a number".into()))?;
        if head.next().is_some() {
            return Err(err("trailing text before `:`".into()));
        }
        let mut pixels = Vec::new();
        let mut rest = body.trim();
        while !rest.is_empty() {
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.split_once(')'))
                .ok_or_else(|| err(format!("malformed pixel list near {rest:?}")))?;
            let (coords, tail) = inner;
            let (c, r) = coords
                .split_once(',')
                .ok_or_else(|| err(format!("pixel ({coords}) needs two coordinates")))?;
            let c: usize = c.trim().parse().map_err(|_| err(format!("bad column {c:?}")))?;
            let r: usize = r.trim().parse().map_err(|_| err(format!("bad row {r:?}")))?;
            pixels.push(Pixel::new(c, r));
            rest = tail.trim_start();
        }
        out.push(PatternSpec {
            name: name.to_string(),
            angle_deg: angle,
            pixels,
        });
    }
    Ok(out)
}

/// Rotation position of a pixel in column `col`: `-(4·col+1)·π` when set,
/// 0 otherwise.
pub fn phase_of_pixel(col: usize, set: bool) -> f64 {
    if set {
        -((4 * col + 1) as f64) * PI
    } else {
        0.0
    }
}

/// The four straight-line patterns of the 3×3 grid, in detection-unit
/// order: 90°, 75°, 60°, 45°.
pub fn default_3x3_patterns() -> Vec<PatternSpec> {
    vec![
        PatternSpec::new("B", 90.0, &[(0, 0), (0, 1), (0, 2)]),
        PatternSpec::new("C", 75.0, &[(0, 0), (0, 1), (1, 2)]),
        PatternSpec::new("D", 60.0, &[(0, 0), (1, 1), (1, 2)]),
        PatternSpec::new("A", 45.0, &[(0, 0), (1, 1), (2, 2)]),
    ]
}

/// Qubits of one coincidence unit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitLayout {
    pub name: String,
    /// Input lines in pattern pixel order.
    pub controls: Vec<QubitId>,
    pub carries: Vec<QubitId>,
    pub output: QubitId,
}

/// Role of a qubit line in a PQHT layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineRole {
    Input,
    Carry,
    Output,
    Scratch,
}

/// Assignment of pixels to rotation lines and of patterns to coincidence
/// units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PqhtLayout {
    pub width: usize,
    pub height: usize,
    /// Pixel of input line `i` (qubit `i`).
    pub inputs: Vec<Pixel>,
    pub units: Vec<UnitLayout>,
    /// Shared ancillas of threshold-style units; empty for Toffoli cascades.
    pub scratch: Vec<QubitId>,
    pub total_qubits: usize,
}

impl PqhtLayout {
    pub fn input_qubit(&self, pixel: Pixel) -> Option<QubitId> {
        self.inputs.iter().position(|&p| p == pixel).map(QubitId)
    }

    pub fn outputs(&self) -> Vec<QubitId> {
        self.units.iter().map(|u| u.output).collect()
    }

    pub fn role(&self, q: QubitId) -> Option<LineRole> {
        if q.0 < self.inputs.len() {
            return Some(LineRole::Input);
        }
        if self.scratch.contains(&q) {
            return Some(LineRole::Scratch);
        }
        for u in &self.units {
            if u.output == q {
                return Some(LineRole::Output);
            }
            if u.carries.contains(&q) {
                return Some(LineRole::Carry);
            }
        }
        None
    }

    /// Grid whose used pixels follow the bits of `vector` (bit `i` sets the
    /// pixel of input line `i`).
    pub fn grid_for_vector(&self, vector: u64) -> PixelGrid {
        let mut grid = PixelGrid::blank(self.width, self.height);
        for (i, &p) in self.inputs.iter().enumerate() {
            grid.set(p, (vector >> i) & 1 == 1);
        }
        grid
    }

    /// Input vector encoded by `grid` over the used pixels.
    pub fn vector_of_grid(&self, grid: &PixelGrid) -> u64 {
        self.inputs
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &p)| acc | ((grid.get(p) as u64) << i))
    }

    /// Classical bits holding the unit outputs for the given measurement mode.
    pub fn output_clbits(&self, mode: MeasureMode) -> Vec<usize> {
        match mode {
            MeasureMode::Outputs => (0..self.units.len()).collect(),
            MeasureMode::All => self.units.iter().map(|u| u.output.0).collect(),
        }
    }
}

fn check_patterns(width: usize, height: usize, patterns: &[PatternSpec]) -> Result<(), PqhtError> {
    if patterns.is_empty() {
        return Err(PqhtError::NoPatterns);
    }
    let mut names = HashSet::new();
    for pat in patterns {
        if !names.insert(pat.name.as_str()) {
            return Err(PqhtError::DuplicateName(pat.name.clone()));
        }
        if pat.pixels.len() < 2 {
            return Err(PqhtError::PatternTooSmall {
                name: pat.name.clone(),
                count: pat.pixels.len(),
            });
        }
        let mut seen = HashSet::new();
        for &p in &pat.pixels {
            if p.col >= width || p.row >= height {
                return Err(PqhtError::PixelOutsideGrid {
                    name: pat.name.clone(),
                    pixel: p,
                    width,
                    height,
                });
            }
            if !seen.insert(p) {
                return Err(PqhtError::DuplicatePixel {
                    name: pat.name.clone(),
                    pixel: p,
                });
            }
        }
    }
    Ok(())
}

/// Pixels used by at least one pattern, in rotation-line order: columns
/// right to left, rows alternating bottom-up and top-down per column.
fn used_pixels(width: usize, height: usize, patterns: &[PatternSpec]) -> Vec<Pixel> {
    let used: HashSet<Pixel> = patterns.iter().flat_map(|p| p.pixels.iter().copied()).collect();
    let mut out = Vec::with_capacity(used.len());
    for col in 0..width {
        let rows: Box<dyn Iterator<Item = usize>> = if col % 2 == 0 {
            Box::new(0..height)
        } else {
            Box::new((0..height).rev())
        };
        out.extend(rows.map(|row| Pixel::new(col, row)).filter(|p| used.contains(p)));
    }
    out
}

/// Lay out input lines and Toffoli-cascade units: a `k`-pixel pattern gets
/// `k-2` carry lines and one output line, appended after the inputs in
/// pattern order.
pub fn assign_layout(grid: &PixelGrid, patterns: &[PatternSpec]) -> Result<PqhtLayout, PqhtError> {
    check_patterns(grid.width(), grid.height(), patterns)?;
    let inputs = used_pixels(grid.width(), grid.height(), patterns);
    let mut next = inputs.len();
    let index_of = |p: Pixel| QubitId(inputs.iter().position(|&q| q == p).unwrap());
    let units = patterns
        .iter()
        .map(|pat| {
            let carries: Vec<QubitId> = (0..pat.pixels.len() - 2).map(|i| QubitId(next + i)).collect();
            next += carries.len();
            let output = QubitId(next);
            next += 1;
            UnitLayout {
                name: pat.name.clone(),
                controls: pat.pixels.iter().map(|&p| index_of(p)).collect(),
                carries,
                output,
            }
        })
        .collect();
    Ok(PqhtLayout {
        width: grid.width(),
        height: grid.height(),
        inputs,
        units,
        scratch: Vec::new(),
        total_qubits: next,
    })
}

/// Which qubits are measured at the end of the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureMode {
    /// Unit `i`'s output into classical bit `i`.
    #[default]
    Outputs,
    /// Every qubit `i` into classical bit `i`.
    All,
}

/// Coincidence-unit implementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coincidence {
    /// Toffoli cascade with carry lines.
    #[default]
    Maxfinder,
    /// Popcount threshold unit with threshold equal to the pattern size,
    /// sharing one scratch register between all units.
    Threshold,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    pub measure: MeasureMode,
    pub coincidence: Coincidence,
}

/// Build the PQHT circuit for `grid` with Toffoli cascades, measuring the
/// unit outputs.
pub fn build_pqht(
    grid: &PixelGrid,
    patterns: &[PatternSpec],
) -> Result<(QuantumCircuit, PqhtLayout), PqhtError> {
    build_pqht_with(grid, patterns, &BuildOptions::default())
}

pub fn build_pqht_with(
    grid: &PixelGrid,
    patterns: &[PatternSpec],
    options: &BuildOptions,
) -> Result<(QuantumCircuit, PqhtLayout), PqhtError> {
    let mut layout = assign_layout(grid, patterns)?;
    if options.coincidence == Coincidence::Threshold {
        let n_in = layout.inputs.len();
        for (k, unit) in layout.units.iter_mut().enumerate() {
            unit.carries.clear();
            unit.output = QubitId(n_in + k);
        }
        let first = n_in + layout.units.len();
        let max_arity = patterns.iter().map(|p| p.pixels.len()).max().unwrap_or(0);
        let need = ThresholdLayout::scratch_required(max_arity)?;
        layout.scratch = (first..first + need).map(QubitId).collect();
        layout.total_qubits = first + need;
    }

    let num_clbits = match options.measure {
        MeasureMode::Outputs => layout.units.len(),
        MeasureMode::All => layout.total_qubits,
    };
    let mut circuit = QuantumCircuit::new(layout.total_qubits, num_clbits)?;
    let lines: Vec<(usize, bool, usize)> = layout
        .inputs
        .iter()
        .enumerate()
        .map(|(q, &p)| (q, grid.get(p), p.col))
        .collect();

    for (k, unit) in layout.units.iter().enumerate() {
        for &(q, _, _) in &lines {
            circuit.append(Gate::h(q))?;
        }
        for &(q, set, col) in &lines {
            if k == 0 {
                circuit.append(Gate::rz(q, phase_of_pixel(col, set)))?;
            } else if set {
                circuit.append(Gate::rz(q, SHIFT_ANGLE))?;
            }
        }
        for &(q, _, _) in &lines {
            circuit.append(Gate::h(q))?;
        }
        match options.coincidence {
            Coincidence::Maxfinder => circuit.extend(maxfinder_gates(unit))?,
            Coincidence::Threshold => {
                let tl = ThresholdLayout {
                    inputs: unit.controls.clone(),
                    output: unit.output,
                    scratch: layout.scratch.clone(),
                };
                circuit.extend(gadgets::threshold_gates(&tl, unit.controls.len())?)?
            }
        };
    }

    match options.measure {
        MeasureMode::Outputs => {
            for (i, unit) in layout.units.iter().enumerate() {
                circuit.append(Gate::Measure(unit.output, i))?;
            }
        }
        MeasureMode::All => {
            for q in 0..layout.total_qubits {
                circuit.append(Gate::measure(q, q))?;
            }
        }
    }
    Ok((circuit, layout))
}

/// Toffoli cascade ANDing the unit's input lines into its output.
pub fn maxfinder_gates(unit: &UnitLayout) -> Vec<Gate> {
    let c = &unit.controls;
    if c.len() == 2 {
        return vec![Gate::Ccx(c[0], c[1], unit.output)];
    }
    let mut gates = Vec::with_capacity(c.len() - 1);
    let mut acc = c[0];
    for (i, &next) in c[1..].iter().enumerate() {
        let target = unit.carries.get(i).copied().unwrap_or(unit.output);
        gates.push(Gate::Ccx(acc, next, target));
        acc = target;
    }
    gates
}

/// Boolean design rules checked by [`validate_design_rules`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DesignRule {
    /// Initial pixel placement only at 0 or `-(4n+1)π`.
    R1,
    /// Later rotations only in multiples of `4π`.
    R2,
    /// Rotations on input lines only inside Hadamard blocks.
    R3,
    /// Coincidence gates read input/carry lines and write carry/output lines.
    R4,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub rule: DesignRule,
    /// Instruction index; the circuit length for end-of-circuit findings.
    pub position: usize,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DesignRuleReport {
    pub violations: Vec<Violation>,
}

impl DesignRuleReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

const ANGLE_TOL: f64 = 1e-9;

fn is_pixel_position(theta: f64) -> bool {
    if theta == 0.0 {
        return true;
    }
    let x = -theta / PI;
    let n = ((x - 1.0) / 4.0).round();
    n >= 0.0 && (x - (4.0 * n + 1.0)).abs() <= ANGLE_TOL * x.abs().max(1.0)
}

fn is_shift_multiple(theta: f64) -> bool {
    let x = theta / (4.0 * PI);
    (x - x.round()).abs() <= ANGLE_TOL * x.abs().max(1.0)
}

/// Check a circuit against the Boolean quantum design rules for `layout`.
pub fn validate_design_rules(circuit: &QuantumCircuit, layout: &PqhtLayout) -> DesignRuleReport {
    let n_in = layout.inputs.len();
    let mut open = vec![false; n_in];
    let mut blocks = vec![0usize; n_in];
    let mut report = DesignRuleReport::default();
    let mut flag = |rule, position, description: String| {
        report.violations.push(Violation {
            rule,
            position,
            description,
        })
    };
    let is_input = |q: QubitId| q.0 < n_in;
    let writable = |q: QubitId| {
        matches!(
            layout.role(q),
            Some(LineRole::Carry | LineRole::Output | LineRole::Scratch)
        )
    };
    let readable = |q: QubitId| {
        matches!(
            layout.role(q),
            Some(LineRole::Input | LineRole::Carry | LineRole::Scratch)
        )
    };

    for (pos, gate) in circuit.instructions().iter().enumerate() {
        match *gate {
            Gate::H(q) if is_input(q) => {
                if open[q.0] {
                    blocks[q.0] += 1;
                }
                open[q.0] = !open[q.0];
            }
            Gate::Rz(q, theta) if is_input(q) => {
                if !open[q.0] {
                    flag(DesignRule::R3, pos, format!("rz on {q} outside a Hadamard block"));
                }
                if blocks[q.0] == 0 {
                    if !is_pixel_position(theta) {
                        flag(
                            DesignRule::R1,
                            pos,
                            format!("pixel on {q} placed at {:.6}π, not 0 or an odd -(4n+1)π position", theta / PI),
                        );
                    }
                } else if !is_shift_multiple(theta) {
                    flag(
                        DesignRule::R2,
                        pos,
                        format!("shift on {q} by {:.6}π is not a multiple of 4π", theta / PI),
                    );
                }
            }
            Gate::H(q) | Gate::Rz(q, _) | Gate::Sx(q) => {
                flag(DesignRule::R3, pos, format!("{} on non-rotation line {q}", gate.kind()));
            }
            Gate::X(t) => {
                if !writable(t) {
                    flag(DesignRule::R4, pos, format!("x writes {t}, which is not a carry/output line"));
                }
            }
            Gate::Cx(..) | Gate::Ccx(..) => {
                let ops: Vec<QubitId> = gate.operands().collect();
                let (target, controls) = ops.split_last().unwrap();
                for &c in controls {
                    if !readable(c) {
                        flag(DesignRule::R4, pos, format!("{} reads {c}, which is not an input/carry line", gate.kind()));
                    } else if is_input(c) && open[c.0] {
                        flag(DesignRule::R3, pos, format!("{} reads {c} inside an open Hadamard block", gate.kind()));
                    }
                }
                if !writable(*target) {
                    flag(DesignRule::R4, pos, format!("{} writes {target}, which is not a carry/output line", gate.kind()));
                }
            }
            Gate::Swap(a, b) => {
                flag(DesignRule::R4, pos, format!("swap of {a} and {b} inside a PQHT circuit"));
            }
            Gate::Measure(..) => {}
        }
    }
    for (q, &o) in open.iter().enumerate() {
        if o {
            flag(DesignRule::R3, circuit.len(), format!("Hadamard block on q{q} never closed"));
        }
    }
    report
}
