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
use std::convert::Infallible;

use num_complex::Complex64;
use openqasm::{GateWriter, Linearize, Parser, ProgramVisitor, SourceCache, Symbol, Value};

use pqht::oracle::full_truth_table;
use pqht::pqht::{
    assign_layout, build_pqht, build_pqht_with, default_3x3_patterns, parse_patterns,
    validate_design_rules, BuildOptions, Coincidence, MeasureMode, PixelGrid,
};
use pqht::sim::{Mat2, StateVector};
use pqht::transpile::{transpile, TranspileOptions};
use pqht::{bitstring, GateKind, QuantumCircuit, Simulator};

fn preset() -> (Vec<pqht::pqht::PatternSpec>, pqht::pqht::PqhtLayout) {
    let pats = default_3x3_patterns();
    let layout = assign_layout(&PixelGrid::blank(3, 3), &pats).unwrap();
    (pats, layout)
}

fn circuit_for(v: u64, opts: &BuildOptions) -> QuantumCircuit {
    let (pats, layout) = preset();
    build_pqht_with(&layout.grid_for_vector(v), &pats, opts).unwrap().0
}

// Pixel-level reference written against the fixed 3×3 preset: line order
// (0,0),(0,1),(0,2),(1,2),(1,1),(2,2); patterns B, C, D, A.
fn reference_detections(v: u64) -> String {
    let on = |i: u32| (v >> i) & 1 == 1;
    let b = on(0) && on(1) && on(2);
    let c = on(0) && on(1) && on(3);
    let d = on(0) && on(4) && on(3);
    let a = on(0) && on(4) && on(5);
    [b, c, d, a].iter().map(|&x| if x { '1' } else { '0' }).collect()
}

#[test]
fn every_vector_detects_exactly_its_patterns() {
    let sim = Simulator::default();
    for opts in [
        BuildOptions::default(),
        BuildOptions {
            coincidence: Coincidence::Threshold,
            ..BuildOptions::default()
        },
    ] {
        for v in 0..64 {
            let c = circuit_for(v, &opts);
            let dist = sim.output_distribution(&c).unwrap().to_bitstrings();
            let expected = reference_detections(v);
            assert!(
                (dist.get(&expected).copied().unwrap_or(0.0) - 1.0).abs() < 1e-9,
                "{opts:?} {} -> {dist:?}",
                bitstring(v, 6)
            );
        }
    }
}

#[test]
fn reference_and_library_oracle_agree() {
    let (pats, layout) = preset();
    let table = full_truth_table(3, 3, &layout.inputs, &pats);
    for row in &table.rows {
        assert_eq!(row.expected_output, reference_detections(row.input));
    }
    assert_eq!(table.rows.iter().filter(|r| r.output != 0).count(), 19);
}

#[test]
fn documented_examples() {
    let sim = Simulator::default();
    for (bits, want) in [("111000", "1000"), ("100011", "0001"), ("111111", "1111"), ("000000", "0000")] {
        let v = pqht::parse_bitstring(bits).unwrap();
        let dist = sim.output_distribution(&circuit_for(v, &BuildOptions::default())).unwrap();
        assert_eq!(dist.to_bitstrings().into_keys().collect::<Vec<_>>(), vec![want.to_string()]);
    }
}

#[test]
fn measuring_everything_reads_back_the_image() {
    let opts = BuildOptions {
        measure: MeasureMode::All,
        ..BuildOptions::default()
    };
    let (_, layout) = preset();
    let sim = Simulator::default();
    for v in [0b000111u64, 0b110001, 0b101010, 0b111111] {
        let c = circuit_for(v, &opts);
        assert_eq!(c.num_clbits(), 14);
        let dist = sim.output_distribution(&c).unwrap();
        assert_eq!(dist.probs.len(), 1);
        let (&key, _) = dist.probs.iter().next().unwrap();
        assert_eq!(key & 0b11_1111, v);
        let outs: String = layout
            .outputs()
            .iter()
            .map(|q| if (key >> q.0) & 1 == 1 { '1' } else { '0' })
            .collect();
        assert_eq!(outs, reference_detections(v));
    }
}

#[test]
fn custom_grid_matches_oracle() {
    let pats = parse_patterns(
        "# a 4x4 image\n\
         H 0: (0,1) (1,1) (2,1) (3,1)\n\
         V 90: (2,0) (2,1) (2,2) (2,3)\n\
         X 45: (0,0) (1,1) (2,2)\n",
    )
    .unwrap();
    let layout = assign_layout(&PixelGrid::blank(4, 4), &pats).unwrap();
    let table = full_truth_table(4, 4, &layout.inputs, &pats);
    let sim = Simulator::default();
    for row in table.rows.iter().step_by(37) {
        let (c, l) = build_pqht(&layout.grid_for_vector(row.input), &pats).unwrap();
        assert!(validate_design_rules(&c, &l).is_clean());
        let dist = sim.output_distribution(&c).unwrap().to_bitstrings();
        assert!((dist[&row.expected_output] - 1.0).abs() < 1e-9);
    }
}

#[test]
fn preset_circuit_metrics() {
    let full = circuit_for(63, &BuildOptions::default()).metrics();
    let empty = circuit_for(0, &BuildOptions::default()).metrics();
    // 4 units × (12 H + 2 CCX) + 4 measures; RZ on every line in the first
    // block, on set lines in later blocks.
    assert_eq!(full.count(GateKind::H), 48);
    assert_eq!(full.count(GateKind::Ccx), 8);
    assert_eq!(full.count(GateKind::Rz), 6 + 3 * 6);
    assert_eq!(empty.count(GateKind::Rz), 6);
    assert_eq!(full.count(GateKind::Measure), 4);
    assert_eq!(full.depth, FROZEN_DEPTH);
    assert_eq!(empty.depth, FROZEN_DEPTH_BLANK);
}

const FROZEN_DEPTH: usize = 18;
const FROZEN_DEPTH_BLANK: usize = 15;

#[test]
fn qasm_export_is_stable() {
    let c = circuit_for(0b000111, &BuildOptions::default());
    let a = c.to_openqasm();
    assert_eq!(a, circuit_for(0b000111, &BuildOptions::default()).to_openqasm());
    assert!(a.starts_with("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[14];\ncreg c[4];\n"));
    assert!(a.contains("rz(-3.141592653589793) q[0];"));
    assert!(a.contains("ccx q[0],q[1],q[6];"));
    assert!(a.ends_with("measure q[13] -> c[3];\n"));
}

enum Op {
    U(f64, f64, f64, usize),
    Cx(usize, usize),
    Measure(usize, usize),
}

#[derive(Default)]
struct Collect {
    qubits: usize,
    ops: Vec<Op>,
}

fn value(v: Value) -> f64 {
    let a = *v.a.numer() as f64 / *v.a.denom() as f64;
    let b = *v.b.numer() as f64 / *v.b.denom() as f64;
    a + std::f64::consts::PI * b
}

impl GateWriter for &mut Collect {
    type Error = Infallible;
    fn initialize(&mut self, qubits: &[Symbol], _: &[Symbol]) -> Result<(), Infallible> {
        self.qubits = qubits.len();
        Ok(())
    }
    fn write_cx(&mut self, copy: usize, xor: usize) -> Result<(), Infallible> {
        self.ops.push(Op::Cx(copy, xor));
        Ok(())
    }
    fn write_u(&mut self, theta: Value, phi: Value, lambda: Value, reg: usize) -> Result<(), Infallible> {
        self.ops.push(Op::U(value(theta), value(phi), value(lambda), reg));
        Ok(())
    }
    fn write_opaque(&mut self, name: &Symbol, _: &[Value], _: &[usize]) -> Result<(), Infallible> {
        panic!("unexpected opaque gate {name:?}");
    }
    fn write_barrier(&mut self, _: &[usize]) -> Result<(), Infallible> {
        Ok(())
    }
    fn write_measure(&mut self, from: usize, to: usize) -> Result<(), Infallible> {
        self.ops.push(Op::Measure(from, to));
        Ok(())
    }
    fn write_reset(&mut self, _: usize) -> Result<(), Infallible> {
        panic!("unexpected reset");
    }
    fn start_conditional(&mut self, _: usize, _: usize, _: u64) -> Result<(), Infallible> {
        panic!("unexpected conditional");
    }
    fn end_conditional(&mut self) -> Result<(), Infallible> {
        Ok(())
    }
}

fn u_matrix(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = |x: f64| Complex64::from_polar(1.0, x);
    [
        [Complex64::new(c, 0.0), -e(lambda) * s],
        [e(phi) * s, e(phi + lambda) * c],
    ]
}

// Parse with an external QASM front end, flatten to U + CX, and evaluate the
// resulting measurement distribution on a plain dense state.
fn external_distribution(source: &str) -> BTreeMap<String, f64> {
    let mut cache = SourceCache::new();
    let mut parser = Parser::new(&mut cache);
    // The bundled gate library predates `sx`.
    let source = source.replacen(
        "include \"qelib1.inc\";\n",
        "include \"qelib1.inc\";\ngate sx a { sdg a; h a; sdg a; }\n",
        1,
    );
    parser.parse_source(source, None::<&str>);
    let program = parser.done().expect("parses");
    program.type_check().expect("type checks");
    let mut collect = Collect::default();
    Linearize::new(&mut collect, usize::MAX)
        .visit_program(&program)
        .expect("linearizes");

    let mut state = StateVector::zero(collect.qubits);
    let mut measured = Vec::new();
    for op in &collect.ops {
        match *op {
            Op::U(t, p, l, q) => state.apply_matrix(q, &u_matrix(t, p, l)),
            Op::Cx(c, t) => state.apply_controlled_x(&[c], t),
            Op::Measure(q, c) => measured.push((c, q)),
        }
    }
    measured.sort();
    let qubits: Vec<pqht::QubitId> = measured.iter().map(|&(_, q)| pqht::QubitId(q)).collect();
    pqht::sim::probabilities(&state, &qubits)
        .unwrap()
        .into_iter()
        .filter(|&(_, p)| p > 1e-9)
        .collect()
}

#[test]
fn emitted_qasm_round_trips_through_an_external_parser() {
    let sim = Simulator::default();
    for v in [0b000111u64, 0b110001, 0b111111, 0b011010] {
        let c = circuit_for(v, &BuildOptions::default());
        let ours = sim.output_distribution(&c).unwrap().to_bitstrings();
        let theirs = external_distribution(&c.to_openqasm());
        assert_eq!(ours.keys().collect::<Vec<_>>(), theirs.keys().collect::<Vec<_>>());
        for (k, p) in &ours {
            assert!((p - theirs[k]).abs() < 1e-6, "{k}: {p} vs {}", theirs[k]);
        }
    }
}

#[test]
fn lowered_qasm_round_trips_through_an_external_parser() {
    let mut c = QuantumCircuit::new(3, 3).unwrap();
    c.extend([
        pqht::Gate::h(0),
        pqht::Gate::ccx(0, 1, 2),
        pqht::Gate::h(1),
        pqht::Gate::cx(1, 2),
        pqht::Gate::measure(0, 0),
        pqht::Gate::measure(1, 1),
        pqht::Gate::measure(2, 2),
    ])
    .unwrap();
    let t = transpile(&c, None, TranspileOptions::default()).unwrap();
    let ours = Simulator::default().output_distribution(&c).unwrap().to_bitstrings();
    let theirs = external_distribution(&t.circuit.to_openqasm());
    assert_eq!(ours.len(), theirs.len());
    for (k, p) in &ours {
        assert!((p - theirs[k]).abs() < 1e-6);
    }
}
