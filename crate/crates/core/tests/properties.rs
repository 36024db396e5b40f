// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use spinact::dynamics::{apply_dephasing, apply_gate, DeviationState};
use spinact::lie_algebra::{closure, membership};
use spinact::linalg::{commutator, frobenius, hermiticity_error, max_abs_diff, unitarity_error, Operator};
use spinact::pauli::{matrix_to_pauli, Pauli, PauliString};
use spinact::pulse::{fidelity, gate_library, ControlledSystem, GateKind, PulseSequence};
use spinact::spectroscopy::{simulate_fid, to_spectrum, Processing};
use spinact::spin_system::{ControlMode, SpinSystem};
use spinact::SpinSystem64;

fn label(n: usize) -> impl Strategy<Value = Vec<Pauli>> {
    prop::collection::vec(prop::sample::select(Pauli::ALL.to_vec()), n)
}

fn pauli_terms(n: usize) -> impl Strategy<Value = Vec<(Vec<Pauli>, f64)>> {
    prop::collection::vec((label(n), -3.0..3.0f64), 1..6)
}

fn hermitian(terms: &[(Vec<Pauli>, f64)]) -> Operator<f64> {
    let n = terms[0].0.len();
    let mut m = Operator::<f64>::zeros(1 << n, 1 << n);
    for (l, c) in terms {
        m += PauliString::new(l.clone(), *c).to_matrix();
    }
    m
}

/// Traceless Hermitian state from random Pauli terms.
fn state(terms: &[(Vec<Pauli>, f64)]) -> DeviationState<f64> {
    DeviationState::traceless_part(hermitian(terms)).unwrap()
}

fn three_qubit() -> impl Strategy<Value = SpinSystem64> {
    (prop::array::uniform3(-2500.0..2500.0f64), prop::array::uniform3(100.0..2500.0f64)).prop_map(
        |(nu, d)| {
            let mut m = DMatrix::zeros(3, 3);
            for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
                m[(i, j)] = d[k];
                m[(j, i)] = d[k];
            }
            SpinSystem::new(vec!["F".into(), "H".into(), "H".into()], nu.to_vec(), m, None, [1]).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pauli_round_trip(terms in pauli_terms(3)) {
        let m = hermitian(&terms);
        let back = matrix_to_pauli(&m, 1e-12).unwrap();
        let mut rebuilt = Operator::<f64>::zeros(8, 8);
        for s in &back {
            rebuilt += s.to_matrix();
        }
        prop_assert!(max_abs_diff(&m, &rebuilt) < 1e-12);
        for w in back.windows(2) {
            prop_assert!(w[0].labels < w[1].labels);
        }
    }

    #[test]
    fn drift_is_hermitian_and_traceless(sys in three_qubit()) {
        let h = sys.drift();
        prop_assert!(hermiticity_error(&h) < 1e-9);
        prop_assert!(h.trace().norm() < 1e-9);
    }

    #[test]
    fn propagators_are_unitary(sys in three_qubit(), amps in prop::collection::vec(-8000.0..8000.0f64, 16)) {
        let ctrl = ControlledSystem::new(&sys, ControlMode::Selective).unwrap();
        let pulse = PulseSequence::new(25e-6, ctrl.labels(), DMatrix::from_row_slice(8, 2, &amps)).unwrap();
        let u = ctrl.propagate(&pulse).unwrap();
        prop_assert!(unitarity_error(&u) < 1e-10);
    }

    #[test]
    fn fidelity_ignores_global_phase(sys in three_qubit(), theta in -3.0..3.0f64, phi in -3.2..3.2f64,
                                     amps in prop::collection::vec(-8000.0..8000.0f64, 8)) {
        let ctrl = ControlledSystem::new(&sys, ControlMode::Selective).unwrap();
        let pulse = PulseSequence::new(25e-6, ctrl.labels(), DMatrix::from_row_slice(4, 2, &amps)).unwrap();
        let u = ctrl.propagate(&pulse).unwrap();
        let target = gate_library(GateKind::Uxy, theta, &[2, 3], &sys).unwrap();
        let f = fidelity(&u, &target).unwrap();
        let g = fidelity(&(&u * Complex64::from_polar(1.0, phi)), &target).unwrap();
        prop_assert!((f - g).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn dephasing_composes_and_contracts(terms in pauli_terms(2), t2 in prop::array::uniform2(1e-3..0.1f64),
                                        t1 in 0.0..0.05f64, t2b in 0.0..0.05f64) {
        let rho = state(&terms);
        let once = apply_dephasing(&rho, &t2, t1 + t2b).unwrap();
        let twice = apply_dephasing(&apply_dephasing(&rho, &t2, t1).unwrap(), &t2, t2b).unwrap();
        prop_assert!(max_abs_diff(once.matrix(), twice.matrix()) < 1e-12);
        prop_assert!(once.hs_norm() <= rho.hs_norm() + 1e-12);
    }

    #[test]
    fn gates_preserve_norm(sys in three_qubit(), terms in pauli_terms(3), theta in -3.0..3.0f64) {
        let rho = state(&terms);
        for (kind, targets) in [(GateKind::Uxy, vec![2, 3]), (GateKind::UzSingle, vec![3]), (GateKind::UzPair, vec![2, 3])] {
            let g = gate_library(kind, theta, &targets, &sys).unwrap();
            let out = apply_gate(&rho, &g.unitary).unwrap();
            prop_assert!((out.hs_norm() - rho.hs_norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn fid_and_spectrum_are_linear(sys in three_qubit(), t1 in pauli_terms(3), t2 in pauli_terms(3),
                                   a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let (r1, r2) = (state(&t1), state(&t2));
        let mix = r1.scaled(a).add(&r2.scaled(b)).unwrap();
        let t2s = [0.03, 0.02, 0.025];
        let f1 = simulate_fid(&sys, &r1, "H", 64, 50e-6, Some(&t2s)).unwrap();
        let f2 = simulate_fid(&sys, &r2, "H", 64, 50e-6, Some(&t2s)).unwrap();
        let fm = simulate_fid(&sys, &mix, "H", 64, 50e-6, Some(&t2s)).unwrap();
        for k in 0..64 {
            let want = f1.samples[k] * a + f2.samples[k] * b;
            prop_assert!((fm.samples[k] - want).norm() < 1e-9 * (1.0 + want.norm()));
        }
        let p = Processing { zero_fill: 2, apodization_per_s: Some(30.0) };
        let (s1, s2, sm) = (to_spectrum(&f1, &p).unwrap(), to_spectrum(&f2, &p).unwrap(), to_spectrum(&fm, &p).unwrap());
        let comb = s1.combine(a, &s2, b).unwrap();
        for (x, y) in sm.values.iter().zip(&comb.values) {
            prop_assert!((x - y).norm() < 1e-9 * (1.0 + y.norm()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closure_is_invariant_under_generator_rescaling(g1 in pauli_terms(2), g2 in pauli_terms(2),
                                                      s in 0.2..5.0f64) {
        let (a, b) = (hermitian(&g1), hermitian(&g2));
        prop_assume!(frobenius(&a) > 1e-3 && frobenius(&b) > 1e-3);
        let base = closure(&[a.clone(), b.clone()], 1e-8).unwrap();
        let scaled = closure(&[&b * Complex64::new(s, 0.0), a.clone()], 1e-8).unwrap();
        prop_assert_eq!(base.dim(), scaled.dim());
        for k in 0..scaled.dim() {
            prop_assert!(membership(&scaled.element(k), &base).unwrap().in_algebra);
        }
        if base.dim() >= 2 {
            let c = commutator(&base.element(0), &base.element(1));
            if frobenius(&c) > 1e-6 {
                prop_assert!(membership(&c, &base).unwrap().in_algebra);
            }
        }
    }
}
