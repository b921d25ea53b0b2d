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

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use pqht::pqht::{assign_layout, build_pqht_with, default_3x3_patterns, BuildOptions, PixelGrid};
use pqht::sim::gate_matrix;
use pqht::{Gate, QuantumCircuit, QubitId};

pub fn preset_circuit(v: u64, opts: &BuildOptions) -> QuantumCircuit {
    let pats = default_3x3_patterns();
    let layout = assign_layout(&PixelGrid::blank(3, 3), &pats).unwrap();
    build_pqht_with(&layout.grid_for_vector(v), &pats, opts).unwrap().0
}

/// Full `2^n` operator of `gate`: operands are permuted to the low qubits,
/// `I ⊗ G` is formed with a Kronecker product, then permuted back.
pub fn embedded_matrix(gate: &Gate, n: usize) -> DMatrix<Complex64> {
    let g = gate_matrix(gate.kind(), gate.angle().unwrap_or(0.0)).expect("unitary gate");
    let ops: Vec<usize> = gate.operands().map(|q| q.0).collect();
    let mut order = ops.clone();
    order.extend((0..n).filter(|q| !ops.contains(q)));
    let dim = 1usize << n;
    let mut p = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        let j = order
            .iter()
            .enumerate()
            .fold(0, |acc, (t, &q)| acc | (((i >> q) & 1) << t));
        p[(j, i)] = Complex64::new(1.0, 0.0);
    }
    let rest = DMatrix::<Complex64>::identity(1 << (n - ops.len()), 1 << (n - ops.len()));
    p.transpose() * rest.kronecker(&g) * p
}

pub fn random_state(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

pub fn random_gate(n: usize, rng: &mut impl Rng) -> Gate {
    let mut qs: Vec<usize> = (0..n).collect();
    for i in 0..qs.len().min(3) {
        let j = rng.gen_range(i..n);
        qs.swap(i, j);
    }
    let theta = rng.gen_range(-13.0..13.0);
    let kinds = match n {
        1 => 4,
        2 => 6,
        _ => 7,
    };
    match rng.gen_range(0..kinds) {
        0 => Gate::h(qs[0]),
        1 => Gate::x(qs[0]),
        2 => Gate::sx(qs[0]),
        3 => Gate::rz(qs[0], theta),
        4 => Gate::cx(qs[0], qs[1]),
        5 => Gate::swap(qs[0], qs[1]),
        _ => Gate::ccx(qs[0], qs[1], qs[2]),
    }
}

/// Max absolute amplitude difference between the kernel and the embedded
/// matrix applied to the same state.
pub fn kernel_vs_matrix(gate: &Gate, amps: &[Complex64]) -> f64 {
    let n = amps.len().trailing_zeros() as usize;
    let mut sv = pqht::StateVector::from_amplitudes(amps.to_vec()).unwrap();
    sv.apply(gate).unwrap();
    let reference = embedded_matrix(gate, n) * DVector::from_column_slice(amps);
    sv.amplitudes()
        .iter()
        .zip(reference.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

pub fn all_qubits(n: usize) -> Vec<QubitId> {
    (0..n).map(QubitId).collect()
}
