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

//! Stochastic Pauli noise and readout errors.
//!
//! Each shot draws its own error pattern: after every gate, each operand
//! independently suffers a uniformly chosen X, Y or Z with probability `p1`
//! (one-qubit gates) or `p2` (CX, CCX, SWAP). Measured bits are then flipped
//! `0→1` with probability `r01` and `1→0` with probability `r10`.
//!
//! Shot `s` uses `ChaCha8Rng::seed_from_u64(seed + s)`, and draws, in order:
//! the gate errors, one uniform for the outcome, one uniform per measured bit
//! for readout. Shots with the same error pattern share one simulation.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Gate, QuantumCircuit};
use crate::sim::{measured_qubits, Distribution, Pauli, ShotHistogram, SimError, Simulator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("{name} = {value} is not a probability")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("expected bitstring has length {expected}, histogram keys have length {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p1: f64,
    pub p2: f64,
    pub r01: f64,
    pub r10: f64,
}

impl NoiseParams {
    pub fn new(p1: f64, p2: f64, r01: f64, r10: f64) -> Result<Self, NoiseError> {
        let params = NoiseParams { p1, p2, r01, r10 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        for (name, value) in [("p1", self.p1), ("p2", self.p2), ("r01", self.r01), ("r10", self.r10)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(NoiseError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0 && self.r01 == 0.0 && self.r10 == 0.0
    }

    fn gate_rate(&self, gate: &Gate) -> f64 {
        if gate.kind().arity() == 1 {
            self.p1
        } else {
            self.p2
        }
    }
}

/// One injected error: instruction index, qubit, Pauli.
type Fault = (u32, u32, u8);

/// Shot sampler with gate and readout noise.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoisySimulator {
    pub params: NoiseParams,
    pub simulator: Simulator,
}

impl NoisySimulator {
    pub fn new(params: NoiseParams) -> Result<Self, NoiseError> {
        params.validate()?;
        Ok(NoisySimulator {
            params,
            simulator: Simulator::default(),
        })
    }

    /// Sample `shots` noisy executions. With all rates zero this is exactly
    /// [`Simulator::sample_shots`].
    pub fn sample_shots(
        &self,
        circuit: &QuantumCircuit,
        shots: u64,
        seed: u64,
    ) -> Result<ShotHistogram, NoiseError> {
        self.params.validate()?;
        if self.params.is_ideal() {
            return Ok(self.simulator.sample_shots(circuit, shots, seed)?);
        }
        if shots == 0 {
            return Err(SimError::ZeroShots.into());
        }
        Simulator::check_terminal_measurements(circuit)?;
        let (measured, width) = measured_qubits(circuit)?;

        // Per shot: outcome uniform, flip-if-0 mask, flip-if-1 mask.
        let mut groups: HashMap<Vec<Fault>, Vec<(f64, u64, u64)>> = HashMap::new();
        for s in 0..shots {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s));
            let mut faults = Vec::new();
            for (i, gate) in circuit.instructions().iter().enumerate() {
                if matches!(gate, Gate::Measure(..)) {
                    continue;
                }
                let p = self.params.gate_rate(gate);
                for q in gate.operands() {
                    if rng.gen::<f64>() < p {
                        faults.push((i as u32, q.0 as u32, rng.gen_range(0..3u8)));
                    }
                }
            }
            let u = rng.gen::<f64>();
            let (mut up, mut down) = (0u64, 0u64);
            for b in 0..width {
                let draw = rng.gen::<f64>();
                up |= ((draw < self.params.r01) as u64) << b;
                down |= ((draw < self.params.r10) as u64) << b;
            }
            groups.entry(faults).or_default().push((u, up, down));
        }

        let mut keys = Vec::with_capacity(shots as usize);
        for (faults, draws) in groups {
            let dist = self.faulty_distribution(circuit, &faults, &measured, width)?;
            let sampler = dist.sampler();
            for (u, up, down) in draws {
                let key = sampler.sample(u);
                keys.push(key ^ (up & !key) ^ (down & key));
            }
        }
        keys.sort_unstable();
        Ok(ShotHistogram::from_keys(keys, width, seed))
    }

    fn faulty_distribution(
        &self,
        circuit: &QuantumCircuit,
        faults: &[Fault],
        measured: &[crate::QubitId],
        width: usize,
    ) -> Result<Distribution, SimError> {
        let mut state = crate::sim::FactoredState::new(circuit.num_qubits(), self.simulator.max_qubits)?;
        let mut next = faults.iter().peekable();
        for (i, gate) in circuit.instructions().iter().enumerate() {
            state.apply(gate)?;
            while let Some(&&(at, q, p)) = next.peek() {
                if at as usize != i {
                    break;
                }
                state.apply_pauli(q as usize, Pauli::ALL[p as usize])?;
                next.next();
            }
        }
        Ok(Distribution {
            width,
            probs: state.marginal(measured)?,
        })
    }
}

/// Fraction of shots that produced `expected`.
pub fn certainty(histogram: &ShotHistogram, expected: &str) -> Result<f64, NoiseError> {
    let width = histogram.width();
    if expected.len() != width {
        return Err(NoiseError::LengthMismatch {
            expected: expected.len(),
            got: width,
        });
    }
    Ok(histogram.count(expected) as f64 / histogram.shots as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> QuantumCircuit {
        let mut c = QuantumCircuit::new(2, 2).unwrap();
        c.extend([Gate::h(0), Gate::cx(0, 1), Gate::measure(0, 0), Gate::measure(1, 1)])
            .unwrap();
        c
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            NoiseParams::new(-0.1, 0.0, 0.0, 0.0),
            Err(NoiseError::InvalidParameter { name: "p1", .. })
        ));
        assert!(NoiseParams::new(0.0, 1.5, 0.0, 0.0).is_err());
        assert!(NoiseParams::new(0.0, 0.0, f64::NAN, 0.0).is_err());
        assert!(NoiseParams::new(0.0, 1.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn zero_noise_matches_ideal_sampler() {
        let noisy = NoisySimulator::default().sample_shots(&bell(), 500, 9).unwrap();
        let ideal = Simulator::default().sample_shots(&bell(), 500, 9).unwrap();
        assert_eq!(noisy, ideal);
    }

    #[test]
    fn seeded_runs_repeat() {
        let sim = NoisySimulator::new(NoiseParams::new(0.05, 0.1, 0.02, 0.03).unwrap()).unwrap();
        let a = sim.sample_shots(&bell(), 300, 4).unwrap();
        let b = sim.sample_shots(&bell(), 300, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.shots, 300);
        let c = sim.sample_shots(&bell(), 300, 5).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn full_readout_flip_inverts() {
        let sim = NoisySimulator::new(NoiseParams::new(0.0, 0.0, 1.0, 1.0).unwrap()).unwrap();
        let mut c = QuantumCircuit::new(2, 2).unwrap();
        c.extend([Gate::x(0), Gate::measure(0, 0), Gate::measure(1, 1)]).unwrap();
        let h = sim.sample_shots(&c, 50, 1).unwrap();
        assert_eq!(h.count("01"), 50);
    }

    #[test]
    fn certainty_checks_length() {
        let h = Simulator::default().sample_shots(&bell(), 100, 3).unwrap();
        let total = certainty(&h, "00").unwrap() + certainty(&h, "11").unwrap();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(
            certainty(&h, "000"),
            Err(NoiseError::LengthMismatch { expected: 3, got: 2 })
        );
    }
}
