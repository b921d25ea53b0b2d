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

//! Reversible arithmetic for scalable coincidence units.
//!
//! Everything here is built from X, CX and CCX only, so basis-state inputs
//! map to basis-state outputs and the gadgets can be checked exhaustively.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{CircuitError, Gate, QuantumCircuit, QubitId};
use crate::sim::{SimError, Simulator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GadgetError {
    #[error("qubit {0} assigned to more than one register")]
    Overlap(usize),
    #[error("{register} register needs {expected} qubits, got {got}")]
    Width {
        register: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("threshold unit supports 2..=7 inputs, got {0}")]
    Arity(usize),
    #[error("threshold {threshold} out of range 1..={inputs}")]
    Threshold { threshold: usize, inputs: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

fn check_disjoint<'a>(registers: impl IntoIterator<Item = &'a QubitId>) -> Result<usize, GadgetError> {
    let mut seen = HashSet::new();
    let mut max = 0;
    for q in registers {
        if !seen.insert(*q) {
            return Err(GadgetError::Overlap(q.0));
        }
        max = max.max(q.0);
    }
    Ok(max + 1)
}

fn check_width(register: &'static str, got: usize, expected: usize) -> Result<(), GadgetError> {
    if got != expected {
        return Err(GadgetError::Width {
            register,
            expected,
            got,
        });
    }
    Ok(())
}

fn fragment(width: usize, gates: Vec<Gate>) -> Result<QuantumCircuit, GadgetError> {
    let mut c = QuantumCircuit::new(width, 0)?;
    c.extend(gates)?;
    Ok(c)
}

/// Qubits of the 3-bit adder. `b` is overwritten with the sum; `carries[0]`
/// is the carry-in ancilla (left at 0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdderLayout {
    pub a: Vec<QubitId>,
    pub b: Vec<QubitId>,
    pub carries: Vec<QubitId>,
    pub carry_out: QubitId,
}

impl AdderLayout {
    /// a = q0..q2, b = q3..q5, carry-in q6, carry-out q7.
    pub fn standard() -> Self {
        AdderLayout {
            a: (0..3).map(QubitId).collect(),
            b: (3..6).map(QubitId).collect(),
            carries: vec![QubitId(6)],
            carry_out: QubitId(7),
        }
    }
}

/// Ripple-carry adder on little-endian registers: `b ← a + b (mod 2^n)`,
/// `cout ^= carry`. `cin` must start at 0 and is restored; `a` is restored.
pub fn ripple_adder_gates(a: &[QubitId], b: &[QubitId], cin: QubitId, cout: QubitId) -> Vec<Gate> {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let maj = |c, b, a| [Gate::Cx(a, b), Gate::Cx(a, c), Gate::Ccx(c, b, a)];
    let uma = |c, b, a| [Gate::Ccx(c, b, a), Gate::Cx(a, c), Gate::Cx(c, b)];
    let mut gates = Vec::with_capacity(6 * n + 1);
    let carry_of = |i: usize| if i == 0 { cin } else { a[i - 1] };
    for i in 0..n {
        gates.extend(maj(carry_of(i), b[i], a[i]));
    }
    gates.push(Gate::Cx(a[n - 1], cout));
    for i in (0..n).rev() {
        gates.extend(uma(carry_of(i), b[i], a[i]));
    }
    gates
}

/// 3-bit adder: sum in `b`, overflow into `carry_out`.
pub fn build_adder3(layout: &AdderLayout) -> Result<QuantumCircuit, GadgetError> {
    check_width("a", layout.a.len(), 3)?;
    check_width("b", layout.b.len(), 3)?;
    if layout.carries.is_empty() {
        return Err(GadgetError::Width {
            register: "carry",
            expected: 1,
            got: 0,
        });
    }
    let width = check_disjoint(
        layout
            .a
            .iter()
            .chain(&layout.b)
            .chain(&layout.carries)
            .chain(std::iter::once(&layout.carry_out)),
    )?;
    fragment(
        width,
        ripple_adder_gates(&layout.a, &layout.b, layout.carries[0], layout.carry_out),
    )
}

/// Qubits of an `A < B` comparator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparatorLayout {
    pub a: Vec<QubitId>,
    pub b: Vec<QubitId>,
    pub ancillas: Vec<QubitId>,
    pub result: QubitId,
}

impl ComparatorLayout {
    /// Ancillas needed for an `n`-bit comparison.
    pub fn ancillas_required(n: usize) -> usize {
        n + n.saturating_sub(2)
    }

    /// 2-bit layout: A = q0,q1; B = q2,q3; ancillas q4,q5; result q6.
    pub fn standard() -> Self {
        ComparatorLayout {
            a: vec![QubitId(0), QubitId(1)],
            b: vec![QubitId(2), QubitId(3)],
            ancillas: vec![QubitId(4), QubitId(5)],
            result: QubitId(6),
        }
    }
}

/// `result ^= (A < B)` for little-endian `n`-bit registers.
///
/// Expands `A < B` into mutually exclusive minterms
/// `¬a[i]·b[i]·∏_{j>i} (a[j] ⊙ b[j])`, evaluated on `n` term ancillas and
/// `n-2` prefix ancillas, then uncomputed. `A`, `B` and all ancillas are
/// restored.
pub fn comparator_lt_gates(
    a: &[QubitId],
    b: &[QubitId],
    ancillas: &[QubitId],
    result: QubitId,
) -> Vec<Gate> {
    let n = a.len();
    assert_eq!(b.len(), n);
    assert!(ancillas.len() >= ComparatorLayout::ancillas_required(n));
    let (terms, prefixes) = ancillas.split_at(n);

    let mut compute = Vec::new();
    compute.extend(a.iter().map(|&q| Gate::X(q)));
    for i in (0..n).rev() {
        // a[i] holds ¬a[i]; record the term, then turn it into a[i] ⊙ b[i].
        compute.push(Gate::Ccx(a[i], b[i], terms[i]));
        compute.push(Gate::Cx(b[i], a[i]));
    }
    // prefix(i) = ∏_{j>i} eq[j]; prefix(n-2) is eq[n-1] itself.
    let mut prefix_of = vec![None; n];
    if n >= 2 {
        prefix_of[n - 2] = Some(a[n - 1]);
    }
    for i in (0..n.saturating_sub(2)).rev() {
        let anc = prefixes[i];
        compute.push(Gate::Ccx(prefix_of[i + 1].unwrap(), a[i + 1], anc));
        prefix_of[i] = Some(anc);
    }

    let mut gates = compute.clone();
    gates.push(Gate::Cx(terms[n - 1], result));
    for i in 0..n.saturating_sub(1) {
        gates.push(Gate::Ccx(prefix_of[i].unwrap(), terms[i], result));
    }
    gates.extend(compute.into_iter().rev());
    gates
}

/// 2-bit `A < B` comparator.
pub fn build_comparator_lt(layout: &ComparatorLayout) -> Result<QuantumCircuit, GadgetError> {
    check_width("A", layout.a.len(), 2)?;
    check_width("B", layout.b.len(), 2)?;
    check_width("ancilla", layout.ancillas.len(), ComparatorLayout::ancillas_required(2))?;
    let width = check_disjoint(
        layout
            .a
            .iter()
            .chain(&layout.b)
            .chain(&layout.ancillas)
            .chain(std::iter::once(&layout.result)),
    )?;
    fragment(
        width,
        comparator_lt_gates(&layout.a, &layout.b, &layout.ancillas, layout.result),
    )
}

/// Width of the popcount register.
const COUNT_BITS: usize = 3;

/// Qubits of a popcount threshold unit.
///
/// Scratch layout: adder operand (3), count (3), carry-in, carry-out,
/// threshold register (3), comparator ancillas (4). All scratch qubits start
/// and end in `|0⟩`, so one scratch block can be shared between units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdLayout {
    pub inputs: Vec<QubitId>,
    pub output: QubitId,
    pub scratch: Vec<QubitId>,
}

impl ThresholdLayout {
    pub fn scratch_required(arity: usize) -> Result<usize, GadgetError> {
        if !(2..=7).contains(&arity) {
            return Err(GadgetError::Arity(arity));
        }
        Ok(3 * COUNT_BITS + 2 + ComparatorLayout::ancillas_required(COUNT_BITS))
    }
}

/// `output ^= (popcount(inputs) ≥ threshold)`.
///
/// Each input is copied into the adder operand and added into the count
/// register; the count is compared against `threshold - 1` loaded into the
/// threshold register by X gates; then everything but the output is
/// uncomputed. Inputs are only read.
pub fn threshold_gates(layout: &ThresholdLayout, threshold: usize) -> Result<Vec<Gate>, GadgetError> {
    let arity = layout.inputs.len();
    let need = ThresholdLayout::scratch_required(arity)?;
    if threshold < 1 || threshold > arity {
        return Err(GadgetError::Threshold {
            threshold,
            inputs: arity,
        });
    }
    if layout.scratch.len() < need {
        return Err(GadgetError::Width {
            register: "scratch",
            expected: need,
            got: layout.scratch.len(),
        });
    }
    let s = &layout.scratch[..need];
    check_disjoint(layout.inputs.iter().chain(s).chain(std::iter::once(&layout.output)))?;
    let (operand, rest) = s.split_at(COUNT_BITS);
    let (count, rest) = rest.split_at(COUNT_BITS);
    let (cin, cout) = (rest[0], rest[1]);
    let (thr, cmp_anc) = rest[2..].split_at(COUNT_BITS);

    let mut popcount = Vec::new();
    for &x in &layout.inputs {
        popcount.push(Gate::Cx(x, operand[0]));
        popcount.extend(ripple_adder_gates(operand, count, cin, cout));
        popcount.push(Gate::Cx(x, operand[0]));
    }
    let load: Vec<Gate> = (0..COUNT_BITS)
        .filter(|i| ((threshold - 1) >> i) & 1 == 1)
        .map(|i| Gate::X(thr[i]))
        .collect();

    let mut gates = popcount.clone();
    gates.extend(load.iter().copied());
    gates.extend(comparator_lt_gates(thr, count, cmp_anc, layout.output));
    gates.extend(load);
    gates.extend(popcount.into_iter().rev());
    Ok(gates)
}

/// Standalone threshold unit over `inputs`. The output and scratch qubits
/// are allocated after the highest input line.
pub fn build_threshold_unit(
    inputs: &[QubitId],
    threshold: usize,
) -> Result<(QuantumCircuit, QubitId), GadgetError> {
    let need = ThresholdLayout::scratch_required(inputs.len())?;
    let first = inputs.iter().map(|q| q.0 + 1).max().unwrap_or(0);
    let layout = ThresholdLayout {
        inputs: inputs.to_vec(),
        output: QubitId(first),
        scratch: (first + 1..first + 1 + need).map(QubitId).collect(),
    };
    let gates = threshold_gates(&layout, threshold)?;
    Ok((fragment(first + 1 + need, gates)?, layout.output))
}

/// Run `fragment` on the basis state whose set qubits are the bits of
/// `initial` and read the resulting basis state. Returns `None` if the
/// result is not a basis state.
pub fn basis_outcome(fragment: &QuantumCircuit, initial: u64) -> Result<Option<u64>, SimError> {
    let mut prepared = QuantumCircuit::new(fragment.num_qubits(), 0).expect("non-empty fragment");
    for q in 0..fragment.num_qubits() {
        if (initial >> q) & 1 == 1 {
            prepared.append(Gate::x(q)).expect("in range");
        }
    }
    prepared.compose(fragment).expect("same width");
    let state = Simulator::default().run_factored(&prepared)?;
    let all: Vec<QubitId> = (0..fragment.num_qubits()).map(QubitId).collect();
    let marginal = state.marginal(&all)?;
    Ok(marginal
        .into_iter()
        .find(|&(_, p)| p > 1.0 - 1e-9)
        .map(|(k, _)| k))
}

fn pack(qubits: &[QubitId], value: u64) -> u64 {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (i, q)| acc | (((value >> i) & 1) << q.0))
}

fn unpack(qubits: &[QubitId], state: u64) -> u64 {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (i, q)| acc | (((state >> q.0) & 1) << i))
}

/// A failed exhaustive case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub input: String,
    pub expected: String,
    pub got: String,
}

/// Outcome of an exhaustive gadget sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GadgetCheck {
    pub name: String,
    pub cases: usize,
    pub passed: usize,
    pub first_failure: Option<Counterexample>,
}

impl GadgetCheck {
    pub fn ok(&self) -> bool {
        self.passed == self.cases
    }

    fn record(&mut self, input: String, expected: u64, got: Option<u64>, width: usize) {
        self.cases += 1;
        if got == Some(expected) {
            self.passed += 1;
        } else if self.first_failure.is_none() {
            self.first_failure = Some(Counterexample {
                input,
                expected: crate::bitstring(expected, width),
                got: got.map_or_else(|| "superposition".to_string(), |g| crate::bitstring(g, width)),
            });
        }
    }
}

/// Check an adder circuit over all `(a, b) ∈ {0..7}²`: `b` must hold
/// `(a + b) mod 8`, `carry_out` the overflow, every other qubit its input.
pub fn check_adder3(circuit: &QuantumCircuit, layout: &AdderLayout) -> Result<GadgetCheck, GadgetError> {
    let mut check = GadgetCheck {
        name: "adder3".into(),
        cases: 0,
        passed: 0,
        first_failure: None,
    };
    let width = circuit.num_qubits();
    for a in 0..8u64 {
        for b in 0..8u64 {
            let initial = pack(&layout.a, a) | pack(&layout.b, b);
            let sum = a + b;
            let expected = pack(&layout.a, a)
                | pack(&layout.b, sum & 7)
                | pack(&[layout.carry_out], sum >> 3);
            let got = basis_outcome(circuit, initial)?;
            check.record(format!("a={a} b={b}"), expected, got, width);
        }
    }
    Ok(check)
}

/// Check a comparator circuit over all `(A, B) ∈ {0..3}²`: `result = A < B`,
/// all other qubits restored.
pub fn check_comparator_lt(
    circuit: &QuantumCircuit,
    layout: &ComparatorLayout,
) -> Result<GadgetCheck, GadgetError> {
    let mut check = GadgetCheck {
        name: "comparator_lt2".into(),
        cases: 0,
        passed: 0,
        first_failure: None,
    };
    let width = circuit.num_qubits();
    let n = layout.a.len();
    for a in 0..(1u64 << n) {
        for b in 0..(1u64 << n) {
            let initial = pack(&layout.a, a) | pack(&layout.b, b);
            let expected = initial | pack(&[layout.result], (a < b) as u64);
            let got = basis_outcome(circuit, initial)?;
            check.record(format!("A={a} B={b}"), expected, got, width);
        }
    }
    Ok(check)
}

/// Check a threshold unit over all `2^inputs` basis inputs: output set iff
/// at least `threshold` inputs are set, every other qubit restored.
pub fn check_threshold(
    circuit: &QuantumCircuit,
    inputs: &[QubitId],
    output: QubitId,
    threshold: usize,
) -> Result<GadgetCheck, GadgetError> {
    let mut check = GadgetCheck {
        name: format!("threshold({},{threshold})", inputs.len()),
        cases: 0,
        passed: 0,
        first_failure: None,
    };
    let width = circuit.num_qubits();
    for v in 0..(1u64 << inputs.len()) {
        let initial = pack(inputs, v);
        let fired = v.count_ones() as usize >= threshold;
        let expected = initial | pack(&[output], fired as u64);
        let got = basis_outcome(circuit, initial)?;
        check.record(crate::bitstring(v, inputs.len()), expected, got, width);
    }
    Ok(check)
}

/// Check that a threshold unit with `threshold = arity` and a Toffoli
/// cascade agree on their output bit for every basis input.
pub fn check_threshold_matches_maxfinder(arity: usize) -> Result<GadgetCheck, GadgetError> {
    let inputs: Vec<QubitId> = (0..arity).map(QubitId).collect();
    let (unit, out) = build_threshold_unit(&inputs, arity)?;
    let carries: Vec<QubitId> = (arity..arity + arity.saturating_sub(2)).map(QubitId).collect();
    let cascade_out = QubitId(arity + carries.len());
    let cascade = crate::pqht::maxfinder_gates(&crate::pqht::UnitLayout {
        name: "maxfinder".into(),
        controls: inputs.clone(),
        carries,
        output: cascade_out,
    });
    let cascade = fragment(cascade_out.0 + 1, cascade)?;
    let mut check = GadgetCheck {
        name: format!("threshold({arity},{arity}) == maxfinder"),
        cases: 0,
        passed: 0,
        first_failure: None,
    };
    for v in 0..(1u64 << arity) {
        let reference = basis_outcome(&cascade, v)?.map(|s| unpack(&[cascade_out], s));
        let got = basis_outcome(&unit, v)?.map(|s| unpack(&[out], s));
        match reference {
            Some(r) => check.record(crate::bitstring(v, arity), r, got, 1),
            None => check.record(crate::bitstring(v, arity), u64::MAX, got, 1),
        }
    }
    Ok(check)
}
