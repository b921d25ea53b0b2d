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

//! Lowering to a hardware basis and routing onto a coupling map.
//!
//! The basis is `{rz, sx, x, cx, measure}`. Routing inserts SWAPs in front of
//! every CX whose physical qubits are not adjacent, choosing among the edges
//! next to either operand by front-gate distance plus the distance of the
//! next two-qubit gate. Remaining ties are broken by a seeded RNG, so a
//! `(circuit, coupling, seed)` triple always produces the same output.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{CircuitError, Gate, GateKind, QuantumCircuit, QubitId};
use crate::sim::{Distribution, SimError, Simulator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TranspileError {
    #[error("edge ({0}, {1}) is not between two distinct qubits of the map")]
    InvalidEdge(usize, usize),
    #[error("coupling map is not connected")]
    Disconnected,
    #[error("circuit needs {logical} qubits but the coupling map has {physical}")]
    TooManyQubits { logical: usize, physical: usize },
    #[error("instruction {position} ({gate}) must be decomposed before routing")]
    Unroutable { position: usize, gate: String },
    #[error("initial layout is not a permutation onto the coupling map")]
    BadLayout,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Undirected qubit connectivity with precomputed hop distances.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMap {
    num_qubits: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    dist: Vec<Vec<usize>>,
}

const HEAVY_HEX_27: [(usize, usize); 28] = [
    (0, 1),
    (1, 2),
    (1, 4),
    (2, 3),
    (3, 5),
    (4, 7),
    (5, 8),
    (6, 7),
    (7, 10),
    (8, 9),
    (8, 11),
    (10, 12),
    (11, 14),
    (12, 13),
    (12, 15),
    (13, 14),
    (14, 16),
    (15, 18),
    (16, 19),
    (17, 18),
    (18, 21),
    (19, 20),
    (19, 22),
    (21, 23),
    (22, 25),
    (23, 24),
    (24, 25),
    (25, 26),
];

impl CouplingMap {
    pub fn from_edges(num_qubits: usize, edges: &[(usize, usize)]) -> Result<Self, TranspileError> {
        let mut neighbors = vec![Vec::new(); num_qubits];
        let mut list = Vec::new();
        for &(a, b) in edges {
            if a == b || a >= num_qubits || b >= num_qubits {
                return Err(TranspileError::InvalidEdge(a, b));
            }
            let e = (a.min(b), a.max(b));
            if !list.contains(&e) {
                list.push(e);
                neighbors[a].push(b);
                neighbors[b].push(a);
            }
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }
        let dist: Vec<Vec<usize>> = (0..num_qubits).map(|s| bfs(&neighbors, s)).collect();
        if dist.iter().flatten().any(|&d| d == usize::MAX) {
            return Err(TranspileError::Disconnected);
        }
        Ok(CouplingMap {
            num_qubits,
            edges: list,
            neighbors,
            dist,
        })
    }

    /// 27-qubit heavy-hexagon lattice.
    pub fn heavy_hex_27() -> Self {
        Self::from_edges(27, &HEAVY_HEX_27).expect("valid built-in map")
    }

    pub fn linear(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("path is connected")
    }

    pub fn full(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Self::from_edges(n, &edges).expect("complete graph is connected")
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.neighbors[q]
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.dist[a][b]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.dist[a][b] == 1
    }
}

fn bfs(neighbors: &[Vec<usize>], source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; neighbors.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in &neighbors[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn h_basis(q: QubitId) -> [Gate; 3] {
    [Gate::Rz(q, FRAC_PI_2), Gate::Sx(q), Gate::Rz(q, FRAC_PI_2)]
}

/// Toffoli as 6 CX plus T, T† and H, with H already in basis form.
fn ccx_basis(a: QubitId, b: QubitId, c: QubitId) -> Vec<Gate> {
    let t = |q| Gate::Rz(q, FRAC_PI_4);
    let tdg = |q| Gate::Rz(q, -FRAC_PI_4);
    let mut g = Vec::with_capacity(21);
    g.extend(h_basis(c));
    g.extend([
        Gate::Cx(b, c),
        tdg(c),
        Gate::Cx(a, c),
        t(c),
        Gate::Cx(b, c),
        tdg(c),
        Gate::Cx(a, c),
        t(b),
        t(c),
    ]);
    g.extend(h_basis(c));
    g.extend([Gate::Cx(a, b), t(a), tdg(b), Gate::Cx(a, b)]);
    g
}

fn lower_gate(gate: &Gate, out: &mut Vec<Gate>) {
    match *gate {
        Gate::H(q) => out.extend(h_basis(q)),
        Gate::Ccx(a, b, c) => out.extend(ccx_basis(a, b, c)),
        Gate::Swap(a, b) => out.extend([Gate::Cx(a, b), Gate::Cx(b, a), Gate::Cx(a, b)]),
        g => out.push(g),
    }
}

/// Rewrite into `{rz, sx, x, cx, measure}`. Equal up to global phase.
pub fn decompose_to_basis(circuit: &QuantumCircuit) -> QuantumCircuit {
    let mut gates = Vec::with_capacity(circuit.len() * 4);
    for g in circuit.instructions() {
        lower_gate(g, &mut gates);
    }
    let mut out = QuantumCircuit::new(circuit.num_qubits(), circuit.num_clbits()).expect("same shape");
    out.extend(gates).expect("operands unchanged");
    out
}

pub fn is_basis_gate(kind: GateKind) -> bool {
    matches!(
        kind,
        GateKind::Rz | GateKind::Sx | GateKind::X | GateKind::Cx | GateKind::Measure
    )
}

/// Logical-to-physical assignment before and after routing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayoutMapping {
    pub initial: Vec<usize>,
    #[serde(rename = "final")]
    pub final_layout: Vec<usize>,
}

impl LayoutMapping {
    pub fn identity(n: usize) -> Self {
        LayoutMapping {
            initial: (0..n).collect(),
            final_layout: (0..n).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialLayout {
    /// Logical qubit `i` on physical qubit `i`.
    #[default]
    Trivial,
    /// Busiest logical qubits on the highest-degree physical qubits.
    DegreeMatching,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranspileOptions {
    pub seed: u64,
    pub layout: InitialLayout,
}

impl Default for TranspileOptions {
    fn default() -> Self {
        TranspileOptions {
            seed: 20,
            layout: InitialLayout::Trivial,
        }
    }
}

fn degree_matching(circuit: &QuantumCircuit, coupling: &CouplingMap) -> Vec<usize> {
    let mut load = vec![0usize; circuit.num_qubits()];
    for g in circuit.instructions() {
        if g.kind().arity() >= 2 {
            for q in g.operands() {
                load[q.0] += 1;
            }
        }
    }
    let mut logical: Vec<usize> = (0..circuit.num_qubits()).collect();
    logical.sort_by_key(|&q| (std::cmp::Reverse(load[q]), q));
    let mut physical: Vec<usize> = (0..coupling.num_qubits()).collect();
    physical.sort_by_key(|&p| (std::cmp::Reverse(coupling.neighbors(p).len()), p));
    let mut layout = vec![0; circuit.num_qubits()];
    for (l, p) in logical.into_iter().zip(physical) {
        layout[l] = p;
    }
    layout
}

/// Result of [`route`]: physical circuit with explicit SWAP instructions.
#[derive(Debug, Clone, PartialEq)]
pub struct Routed {
    pub circuit: QuantumCircuit,
    pub mapping: LayoutMapping,
    pub swaps: usize,
}

/// Insert SWAPs so every two-qubit gate acts on adjacent physical qubits.
/// Three-qubit gates must be decomposed first.
pub fn route(
    circuit: &QuantumCircuit,
    coupling: &CouplingMap,
    initial: &[usize],
    seed: u64,
) -> Result<Routed, TranspileError> {
    let n = circuit.num_qubits();
    let np = coupling.num_qubits();
    if n > np {
        return Err(TranspileError::TooManyQubits {
            logical: n,
            physical: np,
        });
    }
    let mut l2p = initial.to_vec();
    let mut p2l: Vec<Option<usize>> = vec![None; np];
    if l2p.len() != n {
        return Err(TranspileError::BadLayout);
    }
    for (l, &p) in l2p.iter().enumerate() {
        if p >= np || p2l[p].is_some() {
            return Err(TranspileError::BadLayout);
        }
        p2l[p] = Some(l);
    }

    let gates = circuit.instructions();
    let mut two_qubit: Vec<usize> = Vec::new();
    for (i, g) in gates.iter().enumerate() {
        match g.kind().arity() {
            3 => {
                return Err(TranspileError::Unroutable {
                    position: i,
                    gate: g.to_string(),
                })
            }
            2 => two_qubit.push(i),
            _ => {}
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = QuantumCircuit::new(np, circuit.num_clbits())?;
    let mut swaps = 0;
    let mut next_2q = 0;
    for (i, gate) in gates.iter().enumerate() {
        if gate.kind().arity() == 2 {
            next_2q += 1;
            let ops: Vec<usize> = gate.operands().map(|q| q.0).collect();
            let (a, b) = (ops[0], ops[1]);
            let ahead = two_qubit.get(next_2q).map(|&j| {
                let o: Vec<usize> = gates[j].operands().map(|q| q.0).collect();
                (o[0], o[1])
            });
            while !coupling.is_adjacent(l2p[a], l2p[b]) {
                let (pa, pb) = (l2p[a], l2p[b]);
                let front = coupling.distance(pa, pb);
                let mut best: Vec<(usize, usize)> = Vec::new();
                let mut best_cost = usize::MAX;
                for &(u, v) in coupling.edges() {
                    if ![u, v].iter().any(|&p| p == pa || p == pb) {
                        continue;
                    }
                    let moved = |p: usize| {
                        if p == u {
                            v
                        } else if p == v {
                            u
                        } else {
                            p
                        }
                    };
                    let d = coupling.distance(moved(pa), moved(pb));
                    if d + 1 != front {
                        continue;
                    }
                    let look = ahead.map_or(0, |(x, y)| coupling.distance(moved(l2p[x]), moved(l2p[y])));
                    let cost = d + look;
                    if cost < best_cost {
                        best_cost = cost;
                        best.clear();
                    }
                    if cost == best_cost {
                        best.push((u, v));
                    }
                }
                let (u, v) = if best.len() == 1 {
                    best[0]
                } else {
                    best[rng.gen_range(0..best.len())]
                };
                out.append(Gate::Swap(QubitId(u), QubitId(v)))?;
                swaps += 1;
                p2l.swap(u, v);
                for p in [u, v] {
                    if let Some(l) = p2l[p] {
                        l2p[l] = p;
                    }
                }
            }
        }
        out.append(gate.map_qubits(|q| QubitId(l2p[q.0])))
            .map_err(|e| match e {
                CircuitError::DuplicateOperand { .. } => TranspileError::Unroutable {
                    position: i,
                    gate: gate.to_string(),
                },
                e => e.into(),
            })?;
    }
    Ok(Routed {
        circuit: out,
        mapping: LayoutMapping {
            initial: initial.to_vec(),
            final_layout: l2p,
        },
        swaps,
    })
}

/// Before/after metrics of a transpilation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranspileReport {
    pub depth_before: usize,
    pub depth_after: usize,
    pub cx_count: usize,
    pub swap_count: usize,
    pub total_gates: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transpiled {
    pub circuit: QuantumCircuit,
    pub mapping: LayoutMapping,
    pub report: TranspileReport,
}

/// Decompose to the basis and, when a coupling map is given, route onto it.
/// Routing SWAPs are expanded into three CX each.
pub fn transpile(
    circuit: &QuantumCircuit,
    coupling: Option<&CouplingMap>,
    options: TranspileOptions,
) -> Result<Transpiled, TranspileError> {
    let lowered = decompose_to_basis(circuit);
    let (physical, mapping, swaps) = match coupling {
        None => (lowered, LayoutMapping::identity(circuit.num_qubits()), 0),
        Some(map) => {
            if circuit.num_qubits() > map.num_qubits() {
                return Err(TranspileError::TooManyQubits {
                    logical: circuit.num_qubits(),
                    physical: map.num_qubits(),
                });
            }
            let initial = match options.layout {
                InitialLayout::Trivial => (0..circuit.num_qubits()).collect(),
                InitialLayout::DegreeMatching => degree_matching(&lowered, map),
            };
            let routed = route(&lowered, map, &initial, options.seed)?;
            (decompose_to_basis(&routed.circuit), routed.mapping, routed.swaps)
        }
    };
    let metrics = physical.metrics();
    let report = TranspileReport {
        depth_before: circuit.metrics().depth,
        depth_after: metrics.depth,
        cx_count: metrics.count(GateKind::Cx),
        swap_count: swaps,
        total_gates: metrics.total(),
        seed: options.seed,
    };
    Ok(Transpiled {
        circuit: physical,
        mapping,
        report,
    })
}

/// Result of comparing an original circuit with its lowered form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub tv_distance: f64,
    /// Outcome with the largest probability difference when not equivalent.
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub outcome: String,
    pub original: f64,
    pub lowered: f64,
}

/// Total-variation tolerance used by [`verify_equivalence`].
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-9;

/// Compare output distributions of `original` and `lowered`. With
/// measurements the classical-bit distributions are compared; without, the
/// marginal over all logical qubits is compared against the lowered circuit's
/// marginal over `mapping.final_layout`.
pub fn verify_equivalence(
    original: &QuantumCircuit,
    lowered: &QuantumCircuit,
    mapping: &LayoutMapping,
) -> Result<Equivalence, TranspileError> {
    let sim = Simulator::default();
    let (a, b) = if original.measurements().is_empty() {
        let logical: Vec<QubitId> = (0..original.num_qubits()).map(QubitId).collect();
        let physical: Vec<QubitId> = mapping.final_layout.iter().map(|&p| QubitId(p)).collect();
        let a = sim.run_factored(original)?.marginal(&logical)?;
        let b = sim.run_factored(lowered)?.marginal(&physical)?;
        let width = logical.len();
        (Distribution { width, probs: a }, Distribution { width, probs: b })
    } else {
        (sim.output_distribution(original)?, sim.output_distribution(lowered)?)
    };
    let tv = a.tv_distance(&b);
    let equivalent = tv < EQUIVALENCE_TOLERANCE && a.width == b.width;
    let counterexample = (!equivalent).then(|| {
        let keys: BTreeMap<u64, ()> = a.probs.keys().chain(b.probs.keys()).map(|&k| (k, ())).collect();
        let worst = keys
            .keys()
            .copied()
            .max_by(|&x, &y| {
                let dx = (a.probability(x) - b.probability(x)).abs();
                let dy = (a.probability(y) - b.probability(y)).abs();
                dx.total_cmp(&dy)
            })
            .unwrap_or(0);
        Counterexample {
            outcome: crate::bitstring(worst, a.width),
            original: a.probability(worst),
            lowered: b.probability(worst),
        }
    });
    Ok(Equivalence {
        equivalent,
        tv_distance: tv,
        counterexample,
    })
}
