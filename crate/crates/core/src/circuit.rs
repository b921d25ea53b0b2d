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

//! Gate-level circuit representation.
//!
//! A [`QuantumCircuit`] is an ordered list of [`Gate`]s over `num_qubits`
//! qubits and `num_clbits` classical bits. The instruction order is the
//! order used by every consumer: the simulator applies gates in this order,
//! the transpiler lowers them in this order and the OpenQASM emitter prints
//! them in this order.

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write};

use serde::Serialize;
use thiserror::Error;

/// Index of a qubit line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct QubitId(pub usize);

impl QubitId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for QubitId {
    fn from(index: usize) -> Self {
        QubitId(index)
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// Gate kinds without operands, used for counting and matrix lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    X,
    Sx,
    Rz,
    Cx,
    Ccx,
    Swap,
    Measure,
}

impl GateKind {
    /// Number of qubit operands.
    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Sx | GateKind::Rz | GateKind::Measure => 1,
            GateKind::Cx | GateKind::Swap => 2,
            GateKind::Ccx => 3,
        }
    }

    /// OpenQASM 2.0 (qelib1) mnemonic.
    pub fn qasm_name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Sx => "sx",
            GateKind::Rz => "rz",
            GateKind::Cx => "cx",
            GateKind::Ccx => "ccx",
            GateKind::Swap => "swap",
            GateKind::Measure => "measure",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.qasm_name())
    }
}

/// A single instruction. Operand order is significant: for `Cx` the first
/// operand is the control, for `Ccx` the first two are controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Gate {
    H(QubitId),
    X(QubitId),
    Sx(QubitId),
    /// Z rotation by the given angle in radians.
    Rz(QubitId, f64),
    Cx(QubitId, QubitId),
    Ccx(QubitId, QubitId, QubitId),
    Swap(QubitId, QubitId),
    /// Measure a qubit into a classical bit.
    Measure(QubitId, usize),
}

impl Gate {
    pub fn h(q: usize) -> Gate {
        Gate::H(QubitId(q))
    }
    pub fn x(q: usize) -> Gate {
        Gate::X(QubitId(q))
    }
    pub fn sx(q: usize) -> Gate {
        Gate::Sx(QubitId(q))
    }
    pub fn rz(q: usize, angle: f64) -> Gate {
        Gate::Rz(QubitId(q), angle)
    }
    pub fn cx(control: usize, target: usize) -> Gate {
        Gate::Cx(QubitId(control), QubitId(target))
    }
    pub fn ccx(c0: usize, c1: usize, target: usize) -> Gate {
        Gate::Ccx(QubitId(c0), QubitId(c1), QubitId(target))
    }
    pub fn swap(a: usize, b: usize) -> Gate {
        Gate::Swap(QubitId(a), QubitId(b))
    }
    pub fn measure(q: usize, clbit: usize) -> Gate {
        Gate::Measure(QubitId(q), clbit)
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::X(_) => GateKind::X,
            Gate::Sx(_) => GateKind::Sx,
            Gate::Rz(..) => GateKind::Rz,
            Gate::Cx(..) => GateKind::Cx,
            Gate::Ccx(..) => GateKind::Ccx,
            Gate::Swap(..) => GateKind::Swap,
            Gate::Measure(..) => GateKind::Measure,
        }
    }

    /// Qubit operands in order. Unused slots are `None`.
    pub fn qubits(&self) -> [Option<QubitId>; 3] {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Sx(q) | Gate::Rz(q, _) | Gate::Measure(q, _) => {
                [Some(q), None, None]
            }
            Gate::Cx(a, b) | Gate::Swap(a, b) => [Some(a), Some(b), None],
            Gate::Ccx(a, b, c) => [Some(a), Some(b), Some(c)],
        }
    }

    /// Iterator over the qubit operands.
    pub fn operands(&self) -> impl Iterator<Item = QubitId> {
        self.qubits().into_iter().flatten()
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rz(_, theta) => Some(theta),
            _ => None,
        }
    }

    pub fn clbit(&self) -> Option<usize> {
        match *self {
            Gate::Measure(_, c) => Some(c),
            _ => None,
        }
    }

    /// Same gate with every qubit operand passed through `f`.
    pub fn map_qubits(&self, mut f: impl FnMut(QubitId) -> QubitId) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(f(q)),
            Gate::X(q) => Gate::X(f(q)),
            Gate::Sx(q) => Gate::Sx(f(q)),
            Gate::Rz(q, t) => Gate::Rz(f(q), t),
            Gate::Cx(a, b) => Gate::Cx(f(a), f(b)),
            Gate::Ccx(a, b, c) => Gate::Ccx(f(a), f(b), f(c)),
            Gate::Swap(a, b) => Gate::Swap(f(a), f(b)),
            Gate::Measure(q, c) => Gate::Measure(f(q), c),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind())?;
        if let Some(theta) = self.angle() {
            write!(f, "({})", format_angle(theta))?;
        }
        let mut first = true;
        for q in self.operands() {
            write!(f, "{}q[{}]", if first { " " } else { "," }, q.0)?;
            first = false;
        }
        if let Some(c) = self.clbit() {
            write!(f, " -> c[{c}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("a circuit needs at least one qubit")]
    NoQubits,
    #[error("instruction {position} ({gate}): qubit {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange {
        position: usize,
        gate: String,
        qubit: usize,
        num_qubits: usize,
    },
    #[error("instruction {position} ({gate}): qubit {qubit} used more than once")]
    DuplicateOperand {
        position: usize,
        gate: String,
        qubit: usize,
    },
    #[error("instruction {position} ({gate}): rotation angle is not finite")]
    NonFiniteAngle { position: usize, gate: String },
    #[error("instruction {position} ({gate}): classical bit {clbit} out of range for {num_clbits} bits")]
    ClbitOutOfRange {
        position: usize,
        gate: String,
        clbit: usize,
        num_clbits: usize,
    },
    #[error("instruction {position} ({gate}): classical bit {clbit} already written by an earlier measurement")]
    DuplicateClbit {
        position: usize,
        gate: String,
        clbit: usize,
    },
    #[error("cannot compose a {other}-qubit circuit into a {this}-qubit circuit")]
    ComposeWidth { this: usize, other: usize },
}

/// Ordered gate list over a fixed qubit and classical register.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumCircuit {
    num_qubits: usize,
    num_clbits: usize,
    instructions: Vec<Gate>,
    #[serde(skip)]
    written_clbits: HashSet<usize>,
}

impl QuantumCircuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Result<Self, CircuitError> {
        if num_qubits == 0 {
            return Err(CircuitError::NoQubits);
        }
        Ok(QuantumCircuit {
            num_qubits,
            num_clbits,
            instructions: Vec::new(),
            written_clbits: HashSet::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn instructions(&self) -> &[Gate] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Check `gate` against this circuit as if it were appended at `position`.
    fn check(&self, position: usize, gate: &Gate) -> Result<(), CircuitError> {
        let name = || gate.to_string();
        let ops = gate.qubits();
        for (i, q) in ops.iter().enumerate() {
            let Some(q) = q else { continue };
            if q.0 >= self.num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    position,
                    gate: name(),
                    qubit: q.0,
                    num_qubits: self.num_qubits,
                });
            }
            if ops[..i].iter().flatten().any(|p| p == q) {
                return Err(CircuitError::DuplicateOperand {
                    position,
                    gate: name(),
                    qubit: q.0,
                });
            }
        }
        if let Some(theta) = gate.angle() {
            if !theta.is_finite() {
                return Err(CircuitError::NonFiniteAngle {
                    position,
                    gate: name(),
                });
            }
        }
        if let Some(c) = gate.clbit() {
            if c >= self.num_clbits {
                return Err(CircuitError::ClbitOutOfRange {
                    position,
                    gate: name(),
                    clbit: c,
                    num_clbits: self.num_clbits,
                });
            }
            if self.written_clbits.contains(&c) {
                return Err(CircuitError::DuplicateClbit {
                    position,
                    gate: name(),
                    clbit: c,
                });
            }
        }
        Ok(())
    }

    /// Append a gate at the end of the instruction list.
    pub fn append(&mut self, gate: Gate) -> Result<&mut Self, CircuitError> {
        self.check(self.instructions.len(), &gate)?;
        if let Some(c) = gate.clbit() {
            self.written_clbits.insert(c);
        }
        self.instructions.push(gate);
        Ok(self)
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<&mut Self, CircuitError> {
        for gate in gates {
            self.append(gate)?;
        }
        Ok(self)
    }

    /// Append every instruction of `other`, which must not be wider than `self`.
    pub fn compose(&mut self, other: &QuantumCircuit) -> Result<&mut Self, CircuitError> {
        if other.num_qubits > self.num_qubits {
            return Err(CircuitError::ComposeWidth {
                this: self.num_qubits,
                other: other.num_qubits,
            });
        }
        self.extend(other.instructions.iter().copied())
    }

    /// Insert a gate before position `index` (`index == len` appends).
    pub fn insert(&mut self, index: usize, gate: Gate) -> Result<&mut Self, CircuitError> {
        assert!(index <= self.instructions.len(), "insert index out of bounds");
        self.check(index, &gate)?;
        if let Some(c) = gate.clbit() {
            self.written_clbits.insert(c);
        }
        self.instructions.insert(index, gate);
        Ok(self)
    }

    /// Remove and return the instruction at `index`.
    pub fn remove(&mut self, index: usize) -> Gate {
        let gate = self.instructions.remove(index);
        if let Some(c) = gate.clbit() {
            self.written_clbits.remove(&c);
        }
        gate
    }

    /// Measured (qubit, clbit) pairs in instruction order.
    pub fn measurements(&self) -> Vec<(QubitId, usize)> {
        self.instructions
            .iter()
            .filter_map(|g| match *g {
                Gate::Measure(q, c) => Some((q, c)),
                _ => None,
            })
            .collect()
    }

    /// Copy of the circuit with all measurements removed.
    pub fn without_measurements(&self) -> QuantumCircuit {
        QuantumCircuit {
            num_qubits: self.num_qubits,
            num_clbits: self.num_clbits,
            instructions: self
                .instructions
                .iter()
                .filter(|g| g.kind() != GateKind::Measure)
                .copied()
                .collect(),
            written_clbits: HashSet::new(),
        }
    }

    pub fn metrics(&self) -> CircuitMetrics {
        let mut qubit_front = vec![0usize; self.num_qubits];
        let mut clbit_front = vec![0usize; self.num_clbits];
        let mut gate_counts = BTreeMap::new();
        let mut two_qubit_count = 0;
        for gate in &self.instructions {
            let mut level = gate.operands().map(|q| qubit_front[q.0]).max().unwrap_or(0);
            if let Some(c) = gate.clbit() {
                level = level.max(clbit_front[c]);
            }
            level += 1;
            for q in gate.operands() {
                qubit_front[q.0] = level;
            }
            if let Some(c) = gate.clbit() {
                clbit_front[c] = level;
            }
            *gate_counts.entry(gate.kind()).or_insert(0) += 1;
            if gate.kind().arity() == 2 {
                two_qubit_count += 1;
            }
        }
        let depth = qubit_front
            .iter()
            .chain(clbit_front.iter())
            .copied()
            .max()
            .unwrap_or(0);
        CircuitMetrics {
            depth,
            gate_counts,
            two_qubit_count,
        }
    }

    /// OpenQASM 2.0 source for this circuit.
    pub fn to_openqasm(&self) -> String {
        let mut out = String::new();
        out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        writeln!(out, "qreg q[{}];", self.num_qubits).unwrap();
        if self.num_clbits > 0 {
            writeln!(out, "creg c[{}];", self.num_clbits).unwrap();
        }
        for gate in &self.instructions {
            writeln!(out, "{gate};").unwrap();
        }
        out
    }
}

/// Depth and gate statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircuitMetrics {
    /// Longest dependency chain, every instruction counting 1.
    pub depth: usize,
    pub gate_counts: BTreeMap<GateKind, usize>,
    /// Instructions with exactly two qubit operands (CX, SWAP).
    pub two_qubit_count: usize,
}

impl CircuitMetrics {
    pub fn count(&self, kind: GateKind) -> usize {
        self.gate_counts.get(&kind).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.gate_counts.values().sum()
    }
}

/// Angles are printed in fixed notation with 15 decimals, which keeps at
/// least 15 significant digits for every magnitude >= 1e-1. Smaller non-zero
/// magnitudes switch to exponent notation.
pub(crate) fn format_angle(theta: f64) -> String {
    if theta != 0.0 && theta.abs() < 0.1 {
        format!("{theta:.15e}")
    } else {
        format!("{theta:.15}")
    }
}
