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

//! Exact state-vector simulation.
//!
//! Amplitudes are stored little-endian: qubit `k` is bit `k` of the basis
//! index. [`StateVector`] holds the dense `2^n` amplitudes and the gate
//! kernels. [`FactoredState`] is what the [`Simulator`] actually evolves: qubits
//! that sit in a computational basis state are kept as classical bits next to
//! a dense register holding only the remaining qubits. The joint state is
//! always `|classical bits⟩ ⊗ |dense register⟩` up to qubit order, so
//! results are identical to a full dense run while PQHT-style circuits (whose
//! lines leave superposition after every Hadamard block) stay tiny.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Gate, GateKind, QuantumCircuit, QubitId};
use crate::bitstring;

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense-register weight below which a qubit is treated as sitting in a
/// basis state and moved out of the dense register.
const CLASSICAL_CUTOFF: f64 = 1e-24;

/// Default maximum number of qubits in a dense register.
pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Measured-bit counts up to this size are sampled from a tabulated
/// distribution; wider registers sample basis states of the dense register.
const TABULATED_SAMPLING_BITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("{required} qubits exceed the simulator limit of {limit}")]
    ResourceLimit { required: usize, limit: usize },
    #[error("qubit {0} listed more than once")]
    DuplicateQubit(usize),
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("instruction {position}: qubit {qubit} is used after being measured")]
    MidCircuitMeasurement { position: usize, qubit: usize },
    #[error("circuit contains no measurement")]
    NoMeasurement,
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
}

/// Single-qubit Pauli operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Mat2 {
        let i = Complex64::i();
        match self {
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -i], [i, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

/// 2×2 matrix of a single-qubit unitary gate. `None` for multi-qubit gates
/// and measurement.
pub fn single_qubit_matrix(gate: &Gate) -> Option<Mat2> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match *gate {
        Gate::H(_) => Some([
            [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
        ]),
        Gate::X(_) => Some(Pauli::X.matrix()),
        Gate::Sx(_) => {
            let p = Complex64::new(0.5, 0.5);
            let m = Complex64::new(0.5, -0.5);
            Some([[p, m], [m, p]])
        }
        Gate::Rz(_, theta) => Some([
            [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
        ]),
        _ => None,
    }
}

/// Standard unitary of a gate kind. Operand 0 is the least significant bit
/// of the row/column index (for `Cx` the control, for `Ccx` the first
/// control). `angle` is only read for `Rz`. Returns `None` for `Measure`.
pub fn gate_matrix(kind: GateKind, angle: f64) -> Option<DMatrix<Complex64>> {
    let q = QubitId(0);
    let one_q = |g: Gate| {
        let m = single_qubit_matrix(&g).expect("single-qubit gate");
        DMatrix::from_fn(2, 2, |r, c| m[r][c])
    };
    let permutation = |dim: usize, f: &dyn Fn(usize) -> usize| {
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for col in 0..dim {
            m[(f(col), col)] = ONE;
        }
        m
    };
    match kind {
        GateKind::H => Some(one_q(Gate::H(q))),
        GateKind::X => Some(one_q(Gate::X(q))),
        GateKind::Sx => Some(one_q(Gate::Sx(q))),
        GateKind::Rz => Some(one_q(Gate::Rz(q, angle))),
        GateKind::Cx => Some(permutation(4, &|i| if i & 1 == 1 { i ^ 2 } else { i })),
        GateKind::Ccx => Some(permutation(8, &|i| if i & 3 == 3 { i ^ 4 } else { i })),
        GateKind::Swap => Some(permutation(4, &|i| ((i & 1) << 1) | ((i >> 1) & 1))),
        GateKind::Measure => None,
    }
}

/// Dense vector of `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[index] = ONE;
        StateVector { num_qubits, amps }
    }

    /// Wrap raw amplitudes. The caller is responsible for normalisation.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        if !amps.len().is_power_of_two() {
            return Err(SimError::BadLength(amps.len()));
        }
        Ok(StateVector {
            num_qubits: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    /// Strided 2×2 kernel on qubit `q`.
    pub fn apply_matrix(&mut self, q: usize, m: &Mat2) {
        let stride = 1usize << q;
        let diagonal = m[0][1] == ZERO && m[1][0] == ZERO;
        for block in (0..self.amps.len()).step_by(stride << 1) {
            for i in block..block + stride {
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                if diagonal {
                    self.amps[i] = m[0][0] * a0;
                    self.amps[i + stride] = m[1][1] * a1;
                } else {
                    self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                    self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
        }
    }

    /// Flip `target` on every basis state where all `controls` are set.
    pub fn apply_controlled_x(&mut self, controls: &[usize], target: usize) {
        let cmask = controls.iter().fold(0usize, |m, &c| m | (1 << c));
        let tmask = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cmask == cmask && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
    }

    pub fn apply_swap(&mut self, a: usize, b: usize) {
        let (ma, mb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ma != 0 && i & mb == 0 {
                self.amps.swap(i, (i ^ ma) | mb);
            }
        }
    }

    /// Apply one instruction. Measurements are ignored.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        for q in gate.operands() {
            if q.0 >= self.num_qubits {
                return Err(SimError::QubitOutOfRange {
                    qubit: q.0,
                    num_qubits: self.num_qubits,
                });
            }
        }
        match *gate {
            Gate::H(q) | Gate::X(q) | Gate::Sx(q) | Gate::Rz(q, _) => {
                let m = single_qubit_matrix(gate).unwrap();
                self.apply_matrix(q.0, &m);
            }
            Gate::Cx(c, t) => self.apply_controlled_x(&[c.0], t.0),
            Gate::Ccx(a, b, t) => self.apply_controlled_x(&[a.0, b.0], t.0),
            Gate::Swap(a, b) => self.apply_swap(a.0, b.0),
            Gate::Measure(..) => {}
        }
        Ok(())
    }

    /// Marginal distribution over `qubits`, keyed by value with bit `i` taken
    /// from `qubits[i]`.
    pub fn marginal(&self, qubits: &[QubitId]) -> Result<BTreeMap<u64, f64>, SimError> {
        check_distinct(qubits, self.num_qubits)?;
        let mut out = BTreeMap::new();
        for (index, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let key = gather_bits(index as u64, qubits.iter().map(|q| q.0));
            *out.entry(key).or_insert(0.0) += p;
        }
        Ok(out)
    }
}

fn check_distinct(qubits: &[QubitId], num_qubits: usize) -> Result<(), SimError> {
    for (i, q) in qubits.iter().enumerate() {
        if q.0 >= num_qubits {
            return Err(SimError::QubitOutOfRange {
                qubit: q.0,
                num_qubits,
            });
        }
        if qubits[..i].contains(q) {
            return Err(SimError::DuplicateQubit(q.0));
        }
    }
    Ok(())
}

fn gather_bits(index: u64, positions: impl Iterator<Item = usize>) -> u64 {
    positions
        .enumerate()
        .fold(0, |acc, (i, p)| acc | (((index >> p) & 1) << i))
}

/// Marginal probabilities over `measured` qubits, keyed by bitstrings where
/// character `i` is the value of `measured[i]`. Outcomes below 1e-15 are
/// omitted.
pub fn probabilities(
    state: &StateVector,
    measured: &[QubitId],
) -> Result<BTreeMap<String, f64>, SimError> {
    Ok(state
        .marginal(measured)?
        .into_iter()
        .filter(|&(_, p)| p >= 1e-15)
        .map(|(k, p)| (bitstring(k, measured.len()), p))
        .collect())
}

/// State of `n` qubits split into classical (basis-state) qubits and a dense
/// register over the rest.
#[derive(Debug, Clone)]
pub struct FactoredState {
    num_qubits: usize,
    /// Values of qubits that are not in the dense register.
    classical: u64,
    /// Dense register position of each qubit, if it has one.
    slot: Vec<Option<usize>>,
    /// Qubit stored at each dense register position.
    owner: Vec<usize>,
    dense: StateVector,
    limit: usize,
}

impl FactoredState {
    pub fn new(num_qubits: usize, limit: usize) -> Result<Self, SimError> {
        if num_qubits > 64 {
            return Err(SimError::ResourceLimit {
                required: num_qubits,
                limit: 64,
            });
        }
        Ok(FactoredState {
            num_qubits,
            classical: 0,
            slot: vec![None; num_qubits],
            owner: Vec::new(),
            dense: StateVector::zero(0),
            limit,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Number of qubits currently held in the dense register.
    pub fn dense_qubits(&self) -> usize {
        self.owner.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dense.norm_sqr()
    }

    fn promote(&mut self, q: usize) -> Result<usize, SimError> {
        if let Some(p) = self.slot[q] {
            return Ok(p);
        }
        let p = self.owner.len();
        if p + 1 > self.limit {
            return Err(SimError::ResourceLimit {
                required: p + 1,
                limit: self.limit,
            });
        }
        let bit = (self.classical >> q) & 1;
        let half = self.dense.amps.len();
        let mut amps = vec![ZERO; half * 2];
        let offset = if bit == 1 { half } else { 0 };
        amps[offset..offset + half].copy_from_slice(&self.dense.amps);
        self.dense = StateVector {
            num_qubits: p + 1,
            amps,
        };
        self.classical &= !(1u64 << q);
        self.owner.push(q);
        self.slot[q] = Some(p);
        Ok(p)
    }

    /// Move `q` out of the dense register if it is in a basis state.
    fn try_demote(&mut self, q: usize) {
        let Some(p) = self.slot[q] else { return };
        let mask = 1usize << p;
        let (mut w0, mut w1) = (0.0, 0.0);
        for (i, a) in self.dense.amps.iter().enumerate() {
            if i & mask == 0 {
                w0 += a.norm_sqr();
            } else {
                w1 += a.norm_sqr();
            }
        }
        let value = if w1 <= CLASSICAL_CUTOFF {
            0
        } else if w0 <= CLASSICAL_CUTOFF {
            1
        } else {
            return;
        };
        let low = mask - 1;
        let amps: Vec<Complex64> = (0..self.dense.amps.len() / 2)
            .map(|j| self.dense.amps[((j & !low) << 1) | (value << p) | (j & low)])
            .collect();
        self.dense = StateVector {
            num_qubits: self.owner.len() - 1,
            amps,
        };
        self.owner.remove(p);
        self.slot[q] = None;
        for (pos, &owner) in self.owner.iter().enumerate().skip(p) {
            self.slot[owner] = Some(pos);
        }
        self.classical |= (value as u64) << q;
    }

    fn scale(&mut self, phase: Complex64) {
        if phase != ONE {
            for a in &mut self.dense.amps {
                *a *= phase;
            }
        }
    }

    /// Apply a 2×2 unitary to qubit `q`.
    pub fn apply_matrix(&mut self, q: usize, m: &Mat2) -> Result<(), SimError> {
        if self.slot[q].is_none() {
            let v = ((self.classical >> q) & 1) as usize;
            if m[1 - v][v] == ZERO {
                self.scale(m[v][v]);
                return Ok(());
            }
            if m[v][v] == ZERO {
                self.classical ^= 1u64 << q;
                self.scale(m[1 - v][v]);
                return Ok(());
            }
        }
        let p = self.promote(q)?;
        self.dense.apply_matrix(p, m);
        self.try_demote(q);
        Ok(())
    }

    pub fn apply_pauli(&mut self, q: usize, pauli: Pauli) -> Result<(), SimError> {
        self.apply_matrix(q, &pauli.matrix())
    }

    fn apply_controlled_x(&mut self, controls: &[usize], target: usize) -> Result<(), SimError> {
        let mut live = [0usize; 2];
        let mut n = 0;
        for &c in controls {
            match self.slot[c] {
                None if (self.classical >> c) & 1 == 0 => return Ok(()),
                None => {}
                Some(_) => {
                    live[n] = c;
                    n += 1;
                }
            }
        }
        if n == 0 {
            return self.apply_matrix(target, &Pauli::X.matrix());
        }
        let t = self.promote(target)?;
        let positions: Vec<usize> = live[..n].iter().map(|&c| self.slot[c].unwrap()).collect();
        self.dense.apply_controlled_x(&positions, t);
        self.try_demote(target);
        Ok(())
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let (ba, bb) = ((self.classical >> a) & 1, (self.classical >> b) & 1);
        self.classical &= !((1u64 << a) | (1u64 << b));
        self.classical |= (ba << b) | (bb << a);
        self.slot.swap(a, b);
        if let Some(p) = self.slot[a] {
            self.owner[p] = a;
        }
        if let Some(p) = self.slot[b] {
            self.owner[p] = b;
        }
    }

    /// Apply one instruction. Measurements are ignored.
    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        for q in gate.operands() {
            if q.0 >= self.num_qubits {
                return Err(SimError::QubitOutOfRange {
                    qubit: q.0,
                    num_qubits: self.num_qubits,
                });
            }
        }
        match *gate {
            Gate::H(q) | Gate::X(q) | Gate::Sx(q) | Gate::Rz(q, _) => {
                self.apply_matrix(q.0, &single_qubit_matrix(gate).unwrap())
            }
            Gate::Cx(c, t) => self.apply_controlled_x(&[c.0], t.0),
            Gate::Ccx(a, b, t) => self.apply_controlled_x(&[a.0, b.0], t.0),
            Gate::Swap(a, b) => {
                self.apply_swap(a.0, b.0);
                Ok(())
            }
            Gate::Measure(..) => Ok(()),
        }
    }

    fn full_index(&self, dense_index: usize) -> u64 {
        self.owner
            .iter()
            .enumerate()
            .fold(self.classical, |acc, (p, &q)| {
                acc | ((((dense_index >> p) & 1) as u64) << q)
            })
    }

    /// Expand into a full `2^n` state vector.
    pub fn to_dense(&self) -> StateVector {
        let mut sv = StateVector {
            num_qubits: self.num_qubits,
            amps: vec![ZERO; 1 << self.num_qubits],
        };
        for (i, a) in self.dense.amps.iter().enumerate() {
            sv.amps[self.full_index(i) as usize] = *a;
        }
        sv
    }

    /// Marginal distribution over `qubits`; bit `i` of each key is `qubits[i]`.
    pub fn marginal(&self, qubits: &[QubitId]) -> Result<BTreeMap<u64, f64>, SimError> {
        check_distinct(qubits, self.num_qubits)?;
        let mut out = BTreeMap::new();
        for (i, a) in self.dense.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let key = gather_bits(self.full_index(i), qubits.iter().map(|q| q.0));
            *out.entry(key).or_insert(0.0) += p;
        }
        Ok(out)
    }
}

/// Probability distribution over measured classical bits. Bit `i` of each
/// key is the `i`-th measured classical bit in ascending clbit order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    pub width: usize,
    pub probs: BTreeMap<u64, f64>,
}

impl Distribution {
    pub fn probability(&self, key: u64) -> f64 {
        self.probs.get(&key).copied().unwrap_or(0.0)
    }

    /// Total-variation distance to `other`.
    pub fn tv_distance(&self, other: &Distribution) -> f64 {
        let mut keys: Vec<u64> = self.probs.keys().chain(other.probs.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        0.5 * keys
            .iter()
            .map(|&k| (self.probability(k) - other.probability(k)).abs())
            .sum::<f64>()
    }

    /// Probabilities keyed by bitstring, dropping outcomes below 1e-15.
    pub fn to_bitstrings(&self) -> BTreeMap<String, f64> {
        self.probs
            .iter()
            .filter(|&(_, &p)| p >= 1e-15)
            .map(|(&k, &p)| (bitstring(k, self.width), p))
            .collect()
    }

    /// Inverse-CDF sampler over the outcomes in ascending key order.
    pub(crate) fn sampler(&self) -> CdfSampler {
        let mut acc = 0.0;
        let (keys, cdf) = self
            .probs
            .iter()
            .map(|(&k, &p)| {
                acc += p;
                (k, acc)
            })
            .unzip();
        CdfSampler { keys, cdf }
    }
}

pub(crate) struct CdfSampler {
    keys: Vec<u64>,
    cdf: Vec<f64>,
}

impl CdfSampler {
    pub(crate) fn sample(&self, u: f64) -> u64 {
        let total = *self.cdf.last().expect("non-empty distribution");
        let idx = self.cdf.partition_point(|&c| c <= u * total);
        self.keys[idx.min(self.keys.len() - 1)]
    }
}

/// Measured bitstring frequencies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShotHistogram {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
}

impl ShotHistogram {
    pub fn from_keys(keys: impl IntoIterator<Item = u64>, width: usize, seed: u64) -> Self {
        let mut counts = BTreeMap::new();
        let mut shots = 0;
        for k in keys {
            *counts.entry(bitstring(k, width)).or_insert(0) += 1;
            shots += 1;
        }
        ShotHistogram {
            counts,
            shots,
            seed,
        }
    }

    pub fn count(&self, bits: &str) -> u64 {
        self.counts.get(bits).copied().unwrap_or(0)
    }

    /// Length of the recorded bitstrings.
    pub fn width(&self) -> usize {
        self.counts.keys().next().map_or(0, |k| k.len())
    }

    /// Most frequent outcome; ties go to the lexicographically smallest key.
    pub fn argmax(&self) -> Option<&str> {
        self.counts
            .iter()
            .fold(None::<(&String, u64)>, |best, (k, &v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((k, v)),
            })
            .map(|(k, _)| k.as_str())
    }

    /// Histogram restricted to the given character positions, in order.
    pub fn project(&self, positions: &[usize]) -> ShotHistogram {
        let mut counts = BTreeMap::new();
        for (k, &v) in &self.counts {
            let bytes = k.as_bytes();
            let key: String = positions.iter().map(|&p| bytes[p] as char).collect();
            *counts.entry(key).or_insert(0) += v;
        }
        ShotHistogram {
            counts,
            shots: self.shots,
            seed: self.seed,
        }
    }
}

/// Exact simulator with a configurable dense-register limit.
#[derive(Debug, Clone, Copy)]
pub struct Simulator {
    pub max_qubits: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Simulator {
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl Simulator {
    pub fn with_max_qubits(max_qubits: usize) -> Self {
        Simulator { max_qubits }
    }

    /// Reject any instruction touching a qubit that was already measured.
    pub fn check_terminal_measurements(circuit: &QuantumCircuit) -> Result<(), SimError> {
        let mut measured = vec![false; circuit.num_qubits()];
        for (position, gate) in circuit.instructions().iter().enumerate() {
            for q in gate.operands() {
                if measured[q.0] {
                    return Err(SimError::MidCircuitMeasurement {
                        position,
                        qubit: q.0,
                    });
                }
            }
            if let Gate::Measure(q, _) = gate {
                measured[q.0] = true;
            }
        }
        Ok(())
    }

    /// Evolve `|0…0⟩` through the circuit, keeping basis-state qubits out of
    /// the dense register. Measurements are skipped.
    pub fn run_factored(&self, circuit: &QuantumCircuit) -> Result<FactoredState, SimError> {
        Self::check_terminal_measurements(circuit)?;
        let mut state = FactoredState::new(circuit.num_qubits(), self.max_qubits)?;
        for gate in circuit.instructions() {
            state.apply(gate)?;
        }
        Ok(state)
    }

    /// Final dense state vector (measurements ignored).
    pub fn run_exact(&self, circuit: &QuantumCircuit) -> Result<StateVector, SimError> {
        if circuit.num_qubits() > self.max_qubits {
            return Err(SimError::ResourceLimit {
                required: circuit.num_qubits(),
                limit: self.max_qubits,
            });
        }
        Ok(self.run_factored(circuit)?.to_dense())
    }

    /// Exact distribution of the circuit's measured classical bits.
    pub fn output_distribution(&self, circuit: &QuantumCircuit) -> Result<Distribution, SimError> {
        let (qubits, width) = measured_qubits(circuit)?;
        let state = self.run_factored(circuit)?;
        Ok(Distribution {
            width,
            probs: state.marginal(&qubits)?,
        })
    }

    /// Seeded shot sampling of the measured classical bits.
    pub fn sample_shots(
        &self,
        circuit: &QuantumCircuit,
        shots: u64,
        seed: u64,
    ) -> Result<ShotHistogram, SimError> {
        if shots == 0 {
            return Err(SimError::ZeroShots);
        }
        let (qubits, width) = measured_qubits(circuit)?;
        let state = self.run_factored(circuit)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if width <= TABULATED_SAMPLING_BITS {
            let dist = Distribution {
                width,
                probs: state.marginal(&qubits)?,
            };
            let sampler = dist.sampler();
            let keys = (0..shots).map(|_| sampler.sample(rng.gen::<f64>()));
            Ok(ShotHistogram::from_keys(keys, width, seed))
        } else {
            // Sample dense-register basis states and read the measured bits.
            let mut acc = 0.0;
            let cdf: Vec<f64> = state
                .dense
                .amps
                .iter()
                .map(|a| {
                    acc += a.norm_sqr();
                    acc
                })
                .collect();
            let keys = (0..shots).map(|_| {
                let u = rng.gen::<f64>() * acc;
                let i = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                gather_bits(state.full_index(i), qubits.iter().map(|q| q.0))
            });
            Ok(ShotHistogram::from_keys(keys, width, seed))
        }
    }
}

/// Qubits measured into each classical bit, in ascending clbit order.
pub(crate) fn measured_qubits(circuit: &QuantumCircuit) -> Result<(Vec<QubitId>, usize), SimError> {
    let mut pairs = circuit.measurements();
    if pairs.is_empty() {
        return Err(SimError::NoMeasurement);
    }
    pairs.sort_by_key(|&(_, c)| c);
    let qubits: Vec<QubitId> = pairs.iter().map(|&(q, _)| q).collect();
    let width = qubits.len();
    Ok((qubits, width))
}
