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

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use pqht::pqht::{assign_layout, build_pqht, default_3x3_patterns, PixelGrid};
use pqht::sim::{gate_matrix, StateVector};
use pqht::transpile::{
    decompose_to_basis, is_basis_gate, route, transpile, verify_equivalence, CouplingMap,
    InitialLayout, TranspileOptions, TranspileReport,
};
use pqht::{Gate, GateKind, QuantumCircuit};

fn unitary(c: &QuantumCircuit) -> DMatrix<Complex64> {
    let n = c.num_qubits();
    let dim = 1 << n;
    let mut u = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut s = StateVector::basis(n, col);
        for g in c.instructions() {
            s.apply(g).unwrap();
        }
        for (row, a) in s.amplitudes().iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    u
}

fn equal_up_to_phase(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> bool {
    let (i, _) = b
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .unwrap();
    let phase = a.as_slice()[i] / b.as_slice()[i];
    (phase.norm() - 1.0).abs() < 1e-12 && (a - b * phase).iter().all(|z| z.norm() < 1e-12)
}

fn lowered_single(gate: Gate, n: usize) -> (QuantumCircuit, QuantumCircuit) {
    let mut c = QuantumCircuit::new(n, 0).unwrap();
    c.append(gate).unwrap();
    let d = decompose_to_basis(&c);
    assert!(d.instructions().iter().all(|g| is_basis_gate(g.kind())));
    (c, d)
}

#[test]
fn toffoli_decomposition_matches_reference_matrix() {
    let (_, d) = lowered_single(Gate::ccx(0, 1, 2), 3);
    assert_eq!(d.metrics().count(GateKind::Cx), 6);
    let reference = gate_matrix(GateKind::Ccx, 0.0).unwrap();
    assert!(equal_up_to_phase(&unitary(&d), &reference));
}

#[test]
fn hadamard_and_swap_decompositions() {
    let (_, h) = lowered_single(Gate::h(0), 1);
    assert!(equal_up_to_phase(&unitary(&h), &gate_matrix(GateKind::H, 0.0).unwrap()));
    let (_, s) = lowered_single(Gate::swap(0, 1), 2);
    assert!(equal_up_to_phase(&unitary(&s), &gate_matrix(GateKind::Swap, 0.0).unwrap()));
}

#[test]
fn permuted_toffoli_operands() {
    for (a, b, t) in [(2, 0, 1), (1, 2, 0)] {
        let (c, d) = lowered_single(Gate::ccx(a, b, t), 3);
        assert!(equal_up_to_phase(&unitary(&d), &unitary(&c)));
    }
}

fn preset_circuit(v: u64) -> QuantumCircuit {
    let pats = default_3x3_patterns();
    let layout = assign_layout(&PixelGrid::blank(3, 3), &pats).unwrap();
    build_pqht(&layout.grid_for_vector(v), &pats).unwrap().0
}

#[test]
fn heavy_hex_report_is_frozen() {
    let c = preset_circuit(63);
    let t = transpile(&c, Some(&CouplingMap::heavy_hex_27()), TranspileOptions::default()).unwrap();
    let frozen = TranspileReport {
        depth_before: 18,
        depth_after: 157,
        cx_count: 159,
        swap_count: 37,
        total_gates: 435,
        seed: 20,
    };
    assert_eq!(t.report, frozen);
    assert_eq!(t.report.cx_count, 8 * 6 + 3 * t.report.swap_count);
}

#[test]
fn transpilation_is_deterministic() {
    let c = preset_circuit(0b101101);
    let map = CouplingMap::heavy_hex_27();
    for seed in [1, 7, 20] {
        let opts = TranspileOptions {
            seed,
            layout: InitialLayout::Trivial,
        };
        let a = transpile(&c, Some(&map), opts).unwrap();
        let b = transpile(&c, Some(&map), opts).unwrap();
        assert_eq!(a.circuit.to_openqasm(), b.circuit.to_openqasm());
        assert_eq!(a.mapping, b.mapping);
    }
}

#[test]
fn routed_two_qubit_gates_respect_the_map() {
    let map = CouplingMap::heavy_hex_27();
    for layout in [InitialLayout::Trivial, InitialLayout::DegreeMatching] {
        let t = transpile(&preset_circuit(63), Some(&map), TranspileOptions { seed: 3, layout }).unwrap();
        for g in t.circuit.instructions() {
            if let Gate::Cx(a, b) = g {
                assert!(map.is_adjacent(a.0, b.0), "{g}");
            }
            assert!(is_basis_gate(g.kind()));
        }
        assert!(verify_equivalence(&preset_circuit(63), &t.circuit, &t.mapping).unwrap().equivalent);
    }
}

#[test]
fn all_vectors_survive_heavy_hex_routing() {
    let map = CouplingMap::heavy_hex_27();
    for v in 0..64 {
        let c = preset_circuit(v);
        let t = transpile(&c, Some(&map), TranspileOptions::default()).unwrap();
        let eq = verify_equivalence(&c, &t.circuit, &t.mapping).unwrap();
        assert!(eq.equivalent, "vector {v}: {eq:?}");
    }
}

fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
    let q = 0..n;
    prop_oneof![
        q.clone().prop_map(Gate::h),
        q.clone().prop_map(Gate::x),
        (q.clone(), -7.0..7.0f64).prop_map(|(a, t)| Gate::rz(a, t)),
        (q.clone(), q.clone()).prop_filter("distinct", |(a, b)| a != b).prop_map(|(a, b)| Gate::cx(a, b)),
        (q.clone(), q.clone(), q)
            .prop_filter("distinct", |(a, b, c)| a != b && b != c && a != c)
            .prop_map(|(a, b, c)| Gate::ccx(a, b, c)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_circuits_route_equivalently(
        gates in prop::collection::vec(arb_gate(5), 1..25),
        seed in 0u64..1000,
        measured in any::<bool>(),
    ) {
        let mut c = QuantumCircuit::new(5, if measured { 5 } else { 0 }).unwrap();
        c.extend(gates).unwrap();
        if measured {
            for q in 0..5 {
                c.append(Gate::measure(q, q)).unwrap();
            }
        }
        for map in [CouplingMap::linear(6), CouplingMap::heavy_hex_27()] {
            let t = transpile(&c, Some(&map), TranspileOptions { seed, layout: InitialLayout::Trivial }).unwrap();
            let eq = verify_equivalence(&c, &t.circuit, &t.mapping).unwrap();
            prop_assert!(eq.equivalent, "{:?}", eq);
        }
    }

    #[test]
    fn lone_cx_needs_distance_minus_one_swaps(a in 0usize..27, b in 0usize..27, seed in 0u64..100) {
        prop_assume!(a != b);
        let map = CouplingMap::heavy_hex_27();
        let mut c = QuantumCircuit::new(27, 0).unwrap();
        c.append(Gate::cx(a, b)).unwrap();
        let initial: Vec<usize> = (0..27).collect();
        let r = route(&c, &map, &initial, seed).unwrap();
        prop_assert_eq!(r.swaps, map.distance(a, b) - 1);
    }
}
