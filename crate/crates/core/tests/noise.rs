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

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use pqht::noise::{certainty, NoiseParams, NoisySimulator};
use pqht::pqht::{assign_layout, build_pqht, default_3x3_patterns, PixelGrid};
use pqht::sim::{probabilities, Pauli, StateVector};
use pqht::{Gate, QuantumCircuit, QubitId, ShotHistogram, Simulator};

fn noisy(p1: f64, p2: f64, r01: f64, r10: f64) -> NoisySimulator {
    NoisySimulator::new(NoiseParams::new(p1, p2, r01, r10).unwrap()).unwrap()
}

fn chi_square_p_value(hist: &ShotHistogram, expected: &BTreeMap<String, f64>) -> f64 {
    let n = hist.shots as f64;
    let stat: f64 = expected
        .iter()
        .map(|(k, &p)| {
            let e = p * n;
            let o = hist.count(k) as f64;
            (o - e).powi(2) / e
        })
        .sum();
    let observed: u64 = expected.keys().map(|k| hist.count(k)).sum();
    assert_eq!(observed, hist.shots, "outcome outside the support");
    1.0 - ChiSquared::new((expected.len() - 1) as f64).unwrap().cdf(stat)
}

// Every Pauli pair on the CX operands, each with weight 1/9.
fn enumerate_cx_faults() -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for pa in Pauli::ALL {
        for pb in Pauli::ALL {
            let mut s = StateVector::zero(2);
            s.apply(&Gate::x(0)).unwrap();
            s.apply(&Gate::cx(0, 1)).unwrap();
            s.apply_matrix(0, &pa.matrix());
            s.apply_matrix(1, &pb.matrix());
            for (k, p) in probabilities(&s, &[QubitId(0), QubitId(1)]).unwrap() {
                *out.entry(k).or_insert(0.0) += p / 9.0;
            }
        }
    }
    out
}

#[test]
fn certain_two_qubit_fault_matches_enumeration() {
    let mut c = QuantumCircuit::new(2, 2).unwrap();
    c.extend([Gate::x(0), Gate::cx(0, 1), Gate::measure(0, 0), Gate::measure(1, 1)])
        .unwrap();
    let expected = enumerate_cx_faults();
    assert!((expected["00"] - 4.0 / 9.0).abs() < 1e-12);
    assert!((expected["11"] - 1.0 / 9.0).abs() < 1e-12);
    let hist = noisy(0.0, 1.0, 0.0, 0.0).sample_shots(&c, 20_000, 11).unwrap();
    let p = chi_square_p_value(&hist, &expected);
    assert!(p > 1e-3, "p-value {p}: {:?}", hist.counts);
}

#[test]
fn single_qubit_fault_rate() {
    // After X, an X or Y fault returns the qubit to 0: P(0) = 2p/3.
    let mut c = QuantumCircuit::new(1, 1).unwrap();
    c.extend([Gate::x(0), Gate::measure(0, 0)]).unwrap();
    let p1 = 0.3;
    let n = 20_000.0;
    let hist = noisy(p1, 0.0, 0.0, 0.0).sample_shots(&c, n as u64, 5).unwrap();
    let q = 2.0 * p1 / 3.0;
    let sigma = (q * (1.0 - q) / n).sqrt();
    let got = hist.count("0") as f64 / n;
    assert!((got - q).abs() < 5.0 * sigma, "{got} vs {q}");
}

#[test]
fn readout_flip_rates_within_three_sigma() {
    let mut c = QuantumCircuit::new(2, 2).unwrap();
    c.extend([Gate::x(0), Gate::measure(0, 0), Gate::measure(1, 1)]).unwrap();
    let (r01, r10) = (0.1, 0.25);
    let n = 20_000u64;
    let hist = noisy(0.0, 0.0, r01, r10).sample_shots(&c, n, 42).unwrap();
    let bit = |pos: usize, val: u8| -> f64 {
        hist.counts
            .iter()
            .filter(|(k, _)| k.as_bytes()[pos] == val)
            .map(|(_, &v)| v)
            .sum::<u64>() as f64
            / n as f64
    };
    // Bit 0 is prepared as 1 and drops to 0 at rate r10; bit 1 rises at r01.
    for (got, want) in [(bit(0, b'0'), r10), (bit(1, b'1'), r01)] {
        let sigma = (want * (1.0 - want) / n as f64).sqrt();
        assert!((got - want).abs() < 3.0 * sigma, "{got} vs {want}");
    }
}

#[test]
fn zero_noise_distribution_passes_goodness_of_fit() {
    let mut c = QuantumCircuit::new(3, 3).unwrap();
    c.extend([
        Gate::h(0),
        Gate::h(1),
        Gate::ccx(0, 1, 2),
        Gate::measure(0, 0),
        Gate::measure(1, 1),
        Gate::measure(2, 2),
    ])
    .unwrap();
    let exact = Simulator::default().output_distribution(&c).unwrap().to_bitstrings();
    let hist = NoisySimulator::default().sample_shots(&c, 8_000, 3).unwrap();
    assert_eq!(hist, Simulator::default().sample_shots(&c, 8_000, 3).unwrap());
    assert!(chi_square_p_value(&hist, &exact) > 1e-3);
}

fn preset_circuit(bits: &str) -> QuantumCircuit {
    let pats = default_3x3_patterns();
    let layout = assign_layout(&PixelGrid::blank(3, 3), &pats).unwrap();
    let v = pqht::parse_bitstring(bits).unwrap();
    build_pqht(&layout.grid_for_vector(v), &pats).unwrap().0
}

// Pilot: seed 999, 19999 shots, p1=0.001 p2=0.01 r01=r10=0.02 on "111000".
const PILOT_CERTAINTY: f64 = 0.8855942797139857;

#[test]
fn reference_noise_certainty_in_pilot_band() {
    let sim = noisy(0.001, 0.01, 0.02, 0.02);
    let c = preset_circuit("111000");
    let shots = 19_999u64;
    let hist = sim.sample_shots(&c, shots, 20).unwrap();
    assert_eq!(hist.argmax(), Some("1000"));
    let got = certainty(&hist, "1000").unwrap();
    let sigma = (PILOT_CERTAINTY * (1.0 - PILOT_CERTAINTY) / shots as f64).sqrt();
    assert!((got - PILOT_CERTAINTY).abs() < 5.0 * sigma);
    assert!(got < 1.0);
}

#[test]
#[ignore = "regenerates the pilot constant"]
fn pilot() {
    let sim = noisy(0.001, 0.01, 0.02, 0.02);
    let h = sim.sample_shots(&preset_circuit("111000"), 19_999, 999).unwrap();
    println!("pilot {}", certainty(&h, "1000").unwrap());
}

#[test]
fn noisy_sampling_is_reproducible() {
    let sim = noisy(0.001, 0.01, 0.02, 0.02);
    let c = preset_circuit("100011");
    let a = sim.sample_shots(&c, 2048, 7).unwrap();
    assert_eq!(a, sim.sample_shots(&c, 2048, 7).unwrap());
    assert_eq!(a.seed, 7);
    assert_eq!(a.shots, 2048);
}
