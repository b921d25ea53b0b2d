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

//! Parallel quantum Hough transform (PQHT) circuits.
//!
//! Binary pixels are encoded as phase positions on rotation lines
//! (`RZ(-(4·col+1)·π)` between two Hadamards leaves a set pixel in `|1⟩`),
//! and every line pattern is detected by a Toffoli coincidence cascade whose
//! output qubit is set exactly when all of the pattern's pixels are set.
//!
//! Modules:
//!
//! * [`circuit`]: gate-level IR, metrics and OpenQASM 2.0 emission.
//! * [`sim`]: exact state-vector engine with seeded shot sampling.
//! * [`pqht`]: pixel grids, patterns, qubit layout, circuit builder and
//!   design-rule validation.
//! * [`gadgets`]: reversible adder, `A < B` comparator and popcount
//!   threshold units.
//! * [`oracle`]: classical pattern matching and full truth tables.
//! * [`noise`]: Pauli-trajectory gate noise and readout errors.
//! * [`transpile`]: basis decomposition, coupling maps and SWAP routing.
//!
//! # Bit order
//!
//! Basis-state indices are little-endian: qubit `k` is bit `k`. Every
//! bitstring produced by this crate (histogram keys, truth-table rows,
//! file names) lists bits in register order, so character `i` is the value
//! of the `i`-th listed qubit or classical bit. For a PQHT circuit measured
//! on its outputs, `"1000"` means the first coincidence unit fired; for an
//! input vector, `"111000"` means input lines q0, q1 and q2 are set.

pub mod circuit;
pub mod gadgets;
pub mod noise;
pub mod oracle;
pub mod pqht;
pub mod sim;
pub mod transpile;

pub use circuit::{CircuitError, CircuitMetrics, Gate, GateKind, QuantumCircuit, QubitId};
pub use sim::{ShotHistogram, Simulator, StateVector};

/// Render the low `width` bits of `value`, bit 0 first.
pub fn bitstring(value: u64, width: usize) -> String {
    (0..width)
        .map(|i| if (value >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parse a bitstring written bit 0 first. Returns `None` on characters other
/// than `0`/`1` or more than 64 bits.
pub fn parse_bitstring(bits: &str) -> Option<u64> {
    if bits.len() > 64 {
        return None;
    }
    bits.chars().enumerate().try_fold(0u64, |acc, (i, ch)| match ch {
        '0' => Some(acc),
        '1' => Some(acc | (1 << i)),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstrings_are_bit0_first() {
        assert_eq!(bitstring(0b000111, 6), "111000");
        assert_eq!(bitstring(0b110001, 6), "100011");
        assert_eq!(parse_bitstring("100011"), Some(0b110001));
        assert_eq!(parse_bitstring("10a"), None);
        assert_eq!(bitstring(0, 0), "");
    }
}
