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

use pqht::gadgets::{
    basis_outcome, build_adder3, build_comparator_lt, build_threshold_unit, check_adder3,
    check_comparator_lt, check_threshold, check_threshold_matches_maxfinder, AdderLayout,
    ComparatorLayout,
};
use pqht::{Gate, QubitId};

// Independent classical model: bit-level ripple addition.
fn ripple_sum(a: u64, b: u64) -> (u64, u64) {
    let mut carry = 0;
    let mut sum = 0;
    for i in 0..3 {
        let (x, y) = ((a >> i) & 1, (b >> i) & 1);
        sum |= (x ^ y ^ carry) << i;
        carry = (x & y) | (carry & (x ^ y));
    }
    (sum, carry)
}

#[test]
fn adder_all_64_cases() {
    let layout = AdderLayout::standard();
    let circuit = build_adder3(&layout).unwrap();
    let check = check_adder3(&circuit, &layout).unwrap();
    assert_eq!((check.cases, check.passed), (64, 64));

    for a in 0..8u64 {
        for b in 0..8u64 {
            let out = basis_outcome(&circuit, a | (b << 3)).unwrap().unwrap();
            let (sum, carry) = ripple_sum(a, b);
            assert_eq!(out & 7, a, "a restored");
            assert_eq!((out >> 3) & 7, sum);
            assert_eq!((out >> 6) & 1, 0, "carry-in ancilla restored");
            assert_eq!(out >> 7, carry);
        }
    }
}

#[test]
fn comparator_all_16_cases() {
    let layout = ComparatorLayout::standard();
    let circuit = build_comparator_lt(&layout).unwrap();
    let check = check_comparator_lt(&circuit, &layout).unwrap();
    assert_eq!((check.cases, check.passed), (16, 16));
    for a in 0..4u64 {
        for b in 0..4u64 {
            let out = basis_outcome(&circuit, a | (b << 2)).unwrap().unwrap();
            assert_eq!(out & 0b11_1111, a | (b << 2));
            assert_eq!(out >> 6, (a < b) as u64);
        }
    }
}

#[test]
fn threshold_units_for_every_arity_and_threshold() {
    for arity in 2..=5 {
        let inputs: Vec<QubitId> = (0..arity).map(QubitId).collect();
        for t in 1..=arity {
            let (unit, out) = build_threshold_unit(&inputs, t).unwrap();
            let check = check_threshold(&unit, &inputs, out, t).unwrap();
            assert!(check.ok(), "arity {arity} threshold {t}: {:?}", check.first_failure);
            assert_eq!(check.cases, 1 << arity);
        }
    }
}

#[test]
fn threshold_on_scattered_inputs() {
    let inputs = [QubitId(4), QubitId(0), QubitId(2)];
    let (unit, out) = build_threshold_unit(&inputs, 2).unwrap();
    assert_eq!(out, QubitId(5));
    for v in 0..8u64 {
        let initial = ((v & 1) << 4) | ((v >> 1) & 1) | (((v >> 2) & 1) << 2);
        let got = basis_outcome(&unit, initial).unwrap().unwrap();
        assert_eq!(got & !(1 << 5), initial);
        assert_eq!((got >> 5) & 1, (v.count_ones() >= 2) as u64);
    }
}

#[test]
fn full_threshold_agrees_with_cascade() {
    for arity in 2..=4 {
        let check = check_threshold_matches_maxfinder(arity).unwrap();
        assert!(check.ok(), "{:?}", check.first_failure);
        assert_eq!(check.cases, 1 << arity);
    }
}

#[test]
fn removing_any_cx_breaks_the_adder() {
    let layout = AdderLayout::standard();
    let adder = build_adder3(&layout).unwrap();
    let cx_positions: Vec<usize> = adder
        .instructions()
        .iter()
        .enumerate()
        // CX gates controlled by the carry-in act as identity while it is 0.
        .filter(|(_, g)| matches!(g, Gate::Cx(c, _) if *c != layout.carries[0]))
        .map(|(i, _)| i)
        .collect();
    assert!(!cx_positions.is_empty());
    for i in cx_positions {
        let mut mutant = adder.clone();
        mutant.remove(i);
        let check = check_adder3(&mutant, &layout).unwrap();
        assert!(!check.ok(), "mutant without instruction {i} passed");
        assert!(check.first_failure.is_some());
    }
}

#[test]
fn flipping_the_result_breaks_the_comparator() {
    let layout = ComparatorLayout::standard();
    let mut cmp = build_comparator_lt(&layout).unwrap();
    cmp.append(Gate::X(layout.result)).unwrap();
    let check = check_comparator_lt(&cmp, &layout).unwrap();
    assert_eq!(check.passed, 0);
    let first = check.first_failure.unwrap();
    assert_eq!(first.input, "A=0 B=0");
}
