// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Worked input/output examples for the public operations.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use spinact::dynamics::{
    apply_dephasing, apply_gate, commensurate_check, commensurate_fidelity, overlap_coeffs,
    parse_state, theta_sweep, xy_family_exprs, DeviationState, GateRealization, StateBasis, SweepRealization,
};
use spinact::lie_algebra::{
    closure, label_basis, membership, subsystem_full_control, system_algebra,
};
use spinact::linalg::{expm_hermitian, identity, max_abs, max_abs_diff, Operator};
use spinact::pauli::{matrix_to_pauli, pauli_to_matrix, Pauli, PauliString, PauliSum};
use spinact::pulse::{
    fidelity, gate_library, grape_optimize, perturbed_fidelity, ControlledSystem, GateKind,
    GateTarget, GrapeConfig, Perturbation, PulseSequence,
};
use spinact::spectroscopy::{
    fit_overlap, inversion_experiment, simulate_fid, to_spectrum, Acquisition, Fid, Processing,
};
use spinact::spin_system::{build_controls, build_drift, ControlMode, SpinSystem};
use spinact::{Error, SpinSystem64};

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sym(n: usize, entries: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n, n);
    for &(i, j, v) in entries {
        d[(i - 1, j - 1)] = v;
        d[(j - 1, i - 1)] = v;
    }
    d
}

fn three() -> SpinSystem64 {
    SpinSystem::new(
        vec!["F".into(), "H".into(), "H".into()],
        vec![1870.0, 560.0, -310.0],
        sym(3, &[(1, 2, 1330.0), (1, 3, 470.0), (2, 3, 1000.0)]),
        None,
        [1],
    )
    .unwrap()
}

fn five() -> SpinSystem64 {
    SpinSystem::new(
        ["H", "H", "H", "F", "F"].iter().map(|s| s.to_string()).collect(),
        vec![1240.0, -380.0, 670.0, 900.0, -500.0],
        sym(
            5,
            &[
                (1, 2, 2150.0),
                (1, 3, 310.0),
                (2, 3, 1480.0),
                (1, 4, 1120.0),
                (1, 5, 260.0),
                (2, 4, 540.0),
                (2, 5, 1390.0),
                (3, 4, 170.0),
                (3, 5, 720.0),
                (4, 5, 780.0),
            ],
        ),
        Some(sym(
            5,
            &[(1, 2, 7.5), (1, 4, 8.5), (2, 5, 6.5), (3, 4, 3.0), (4, 5, 40.0)],
        )),
        [1, 2, 3],
    )
    .unwrap()
}

fn pauli(label: &str, c: f64) -> Operator<f64> {
    PauliString::parse(label, c).unwrap().to_matrix()
}

#[test]
fn pauli_matrices() {
    let z = pauli_to_matrix(&PauliString::parse("Z", 1.0).unwrap(), 1).unwrap();
    assert_eq!(z, Operator::from_diagonal(&nalgebra::DVector::from_vec(vec![cx(1.0, 0.0), cx(-1.0, 0.0)])));
    let ee = pauli_to_matrix(&PauliString::parse("EE", 1.0).unwrap(), 2).unwrap();
    assert_eq!(ee, identity::<f64>(4));
    let xz = pauli_to_matrix(&PauliString::parse("XZ", 2.0).unwrap(), 2).unwrap();
    let mut want = Operator::<f64>::zeros(4, 4);
    for (r, c, v) in [(0, 2, 2.0), (1, 3, -2.0), (2, 0, 2.0), (3, 1, -2.0)] {
        want[(r, c)] = cx(v, 0.0);
    }
    assert_eq!(xz, want);
    let bad = pauli_to_matrix(&PauliString::parse("XZ", 1.0).unwrap(), 3);
    assert!(matches!(bad, Err(Error::Dimension(_))));
}

#[test]
fn pauli_decompositions() {
    let z = matrix_to_pauli(&pauli("Z", 1.0), 1e-12).unwrap();
    assert_eq!(z.len(), 1);
    assert_eq!(z[0].label(), "Z");
    assert_abs_diff_eq!(z[0].coefficient, 1.0, epsilon = 1e-14);
    assert!(matrix_to_pauli(&Operator::<f64>::zeros(4, 4), 1e-12).unwrap().is_empty());
    let three_by_three = Operator::<f64>::zeros(3, 3);
    assert!(matches!(
        matrix_to_pauli(&three_by_three, 1e-12),
        Err(Error::Dimension(_))
    ));
}

#[test]
fn drift_examples() {
    let one = SpinSystem::single_spin("H", 100.0);
    let h = build_drift(&one);
    assert_abs_diff_eq!(h[(0, 0)].re, -100.0 * PI, epsilon = 1e-9);
    assert_abs_diff_eq!(h[(1, 1)].re, 100.0 * PI, epsilon = 1e-9);

    let hetero = SpinSystem::new(
        vec!["H".into(), "F".into()],
        vec![0.0, 0.0],
        sym(2, &[(1, 2, 50.0)]),
        None,
        [1],
    )
    .unwrap();
    let h = build_drift(&hetero);
    let want = pauli("ZZ", 50.0 * PI);
    assert!(max_abs_diff(&h, &want) < 1e-9);
    let terms = matrix_to_pauli(&h, 1e-9).unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0].label(), "ZZ");
    assert_abs_diff_eq!(terms[0].coefficient, 50.0 * PI, epsilon = 1e-9);
}

#[test]
fn three_qubit_drift_matches_term_sum() {
    let sys = three();
    let (n, d) = (&[1870.0, 560.0, -310.0], [(1330.0, "ZZE"), (470.0, "ZEZ")]);
    let mut want = pauli("ZEE", -PI * n[0]) + pauli("EZE", -PI * n[1]) + pauli("EEZ", -PI * n[2]);
    for (dij, label) in d {
        want += pauli(label, PI * dij);
    }
    let d23 = 1000.0;
    want += pauli("EZZ", PI * d23) - pauli("EXX", PI * d23 / 2.0) - pauli("EYY", PI * d23 / 2.0);
    assert!(max_abs_diff(&sys.drift(), &want) < 1e-9);
}

#[test]
fn control_channels() {
    let c3 = build_controls(&three(), ControlMode::Selective).unwrap();
    let labels: Vec<_> = c3.iter().map(|c| c.label.clone()).collect();
    assert_eq!(c3.len(), 2);
    assert!(max_abs_diff(&c3[0].matrix, &pauli("XEE", 1.0)) < 1e-15, "{labels:?}");
    assert!(max_abs_diff(&c3[1].matrix, &pauli("YEE", 1.0)) < 1e-15);

    let c5 = build_controls(&five(), ControlMode::Selective).unwrap();
    assert_eq!(c5.len(), 6);
    let c5c = build_controls(&five(), ControlMode::Collective).unwrap();
    assert_eq!(c5c.len(), 2);
    let xs = pauli("XEEEE", 1.0) + pauli("EXEEE", 1.0) + pauli("EEXEE", 1.0);
    assert!(max_abs_diff(&c5c[0].matrix, &xs) < 1e-15);

    assert!(matches!(
        SpinSystem::<f64>::new(vec!["H".into()], vec![0.0], DMatrix::zeros(1, 1), None, []),
        Err(Error::Config(_))
    ));
}

#[test]
fn su2_closure() {
    let gens = [pauli("X", 1.0), pauli("Z", 1.0)];
    let alg = closure(&gens, 1e-8).unwrap();
    assert_eq!(alg.dim(), 3);
    assert!(subsystem_full_control(&alg, &BTreeSet::from([1])).unwrap());
    let mut names: Vec<String> = label_basis(&alg)
        .iter()
        .map(|terms| {
            assert_eq!(terms.len(), 1);
            terms[0].label()
        })
        .collect();
    names.sort();
    assert_eq!(names, ["X", "Y", "Z"]);
    for k in 0..alg.dim() {
        assert!(membership(&alg.element(k), &alg).unwrap().residual < 1e-10);
    }
    assert!(matches!(
        subsystem_full_control(&alg, &BTreeSet::new()),
        Err(Error::Input(_))
    ));
}

#[test]
fn three_qubit_algebra() {
    let alg = system_algebra(&three(), ControlMode::Selective, 1e-8).unwrap();
    assert_eq!(alg.dim(), 22);
    let inside = pauli("EYX", 1.0) - pauli("EXY", 1.0);
    assert!(membership(&inside, &alg).unwrap().in_algebra);
    let bare = membership(&pauli("EXE", 1.0), &alg).unwrap();
    assert!(!bare.in_algebra && bare.residual > 0.1);
    assert!(subsystem_full_control(&alg, &BTreeSet::from([1])).unwrap());
    assert!(!subsystem_full_control(&alg, &BTreeSet::from([2, 3])).unwrap());
    assert!(matches!(
        membership(&pauli("XX", 1.0), &alg),
        Err(Error::Dimension(_))
    ));
}

#[test]
fn library_gates() {
    let sys = three();
    let g = gate_library(GateKind::UzSingle, -PI / 2.0, &[3], &sys).unwrap();
    let want = expm_hermitian(&pauli("EEZ", 1.0), PI / 4.0);
    assert!(max_abs_diff(&g.unitary, &want) < 1e-12);
    let id = gate_library(GateKind::Uxy, 0.0, &[2, 3], &sys).unwrap();
    assert!(max_abs_diff(&id.unitary, &identity(8)) < 1e-15);
    assert!(gate_library(GateKind::Uxy, 0.1, &[1, 2], &sys).is_err());
}

#[test]
fn propagation_examples() {
    // Drift-free single spin driven on X for a quarter turn.
    let sys = SpinSystem::single_spin("H", 0.0);
    let ctrl = ControlledSystem::new(&sys, ControlMode::Selective).unwrap();
    let (n, dt) = (10, 1e-5);
    let u = 0.25 / (n as f64 * dt);
    let pulse = PulseSequence::new(dt, ctrl.labels(), DMatrix::from_fn(n, 2, |_, k| if k == 0 { u } else { 0.0 })).unwrap();
    let got = ctrl.propagate(&pulse).unwrap();
    let s = (PI / 4.0).sin();
    let want = identity::<f64>(2) * cx(s, 0.0) + pauli("X", 1.0) * cx(0.0, -s);
    assert!(max_abs_diff(&got, &want) < 1e-12);

    let sys = three();
    let ctrl = ControlledSystem::new(&sys, ControlMode::Selective).unwrap();
    let quiet = PulseSequence::zeros(7, 30e-6, ctrl.labels()).unwrap();
    let want = expm_hermitian(&sys.drift(), 7.0 * 30e-6);
    assert!(max_abs_diff(&ctrl.propagate(&quiet).unwrap(), &want) < 1e-10);

    let amps = DMatrix::from_row_slice(4, 2, &[3100.0, -800.0, 120.0, 4500.0, -2600.0, 900.0, 50.0, -3900.0]);
    let pulse = PulseSequence::new(40e-6, ctrl.labels(), amps.clone()).unwrap();
    let mut step = identity::<f64>(8);
    for j in 0..4 {
        let h = sys.drift()
            + pauli("XEE", PI * amps[(j, 0)])
            + pauli("YEE", PI * amps[(j, 1)]);
        step = expm_hermitian(&h, 40e-6) * step;
    }
    assert!(max_abs_diff(&ctrl.propagate(&pulse).unwrap(), &step) < 1e-8);
}

fn pi_rotation() -> (ControlledSystem<f64>, PulseSequence<f64>, GateTarget<f64>) {
    let sys = SpinSystem::single_spin("H", 0.0);
    let ctrl = ControlledSystem::new(&sys, ControlMode::Selective).unwrap();
    let (n, dt) = (10, 1e-5);
    let u = 0.5 / (n as f64 * dt);
    let pulse = PulseSequence::new(dt, ctrl.labels(), DMatrix::from_fn(n, 2, |_, k| if k == 0 { u } else { 0.0 })).unwrap();
    let target = GateTarget::from_generator("x-pi", pauli("X", -PI / 2.0)).unwrap();
    (ctrl, pulse, target)
}

#[test]
fn fidelity_and_perturbations() {
    let (ctrl, pulse, target) = pi_rotation();
    let f = perturbed_fidelity(&ctrl, &pulse, &target, &Perturbation::None).unwrap();
    assert_abs_diff_eq!(f, fidelity(&ctrl.propagate(&pulse).unwrap(), &target).unwrap(), epsilon = 1e-15);
    assert_abs_diff_eq!(f, 1.0, epsilon = 1e-12);
    let f0 = perturbed_fidelity(&ctrl, &pulse, &target, &Perturbation::AmplitudeScale(0.0)).unwrap();
    assert_eq!(f0, f);
    let want = (0.05 * PI / 2.0).cos().powi(2);
    for eps in [0.05, -0.05] {
        let fe = perturbed_fidelity(&ctrl, &pulse, &target, &Perturbation::AmplitudeScale(eps)).unwrap();
        assert_abs_diff_eq!(fe, want, epsilon = 1e-12);
    }
}

#[test]
fn single_spin_grape() {
    let (ctrl, _, target) = pi_rotation();
    let cfg = GrapeConfig {
        n_segments: 10,
        dt_s: 1e-5,
        max_rf_hz: 20e3,
        fidelity_goal: 0.99999,
        ..GrapeConfig::default()
    };
    let res = grape_optimize(&ctrl, &target, &cfg).unwrap();
    assert!(res.fidelity >= 0.9999, "{}", res.fidelity);
}

#[test]
fn grape_three_qubit_single_targets() {
    let sys = three();
    let ctrl = ControlledSystem::new(&sys, ControlMode::Selective).unwrap();
    let cfg = GrapeConfig {
        fidelity_goal: 0.995,
        seed: 1,
        ..GrapeConfig::default()
    };
    for q in [2, 3] {
        let target = gate_library(GateKind::UzSingle, -PI / 2.0, &[q], &sys).unwrap();
        let res = grape_optimize(&ctrl, &target, &cfg).unwrap();
        assert!(res.fidelity >= 0.99, "qubit {q}: {}", res.fidelity);
    }
}

#[test]
fn state_parsing() {
    let s = parse_state::<f64>("EYE+EEY", 3).unwrap();
    assert!(max_abs_diff(s.matrix(), &(pauli("EYE", 1.0) + pauli("EEY", 1.0))) < 1e-15);
    let p = parse_state::<f64>("10X", 3).unwrap();
    let mut want = Operator::<f64>::zeros(8, 8);
    // |10> on qubits 1,2 is basis block 0b10; X on qubit 3 swaps the last bit.
    want[(0b100, 0b101)] = cx(1.0, 0.0);
    want[(0b101, 0b100)] = cx(1.0, 0.0);
    assert!(max_abs_diff(p.matrix(), &want) < 1e-15);
    assert_eq!(max_abs(parse_state::<f64>("EEE", 3).unwrap().matrix()), 0.0);
    assert!(matches!(parse_state::<f64>("EQE", 3), Err(Error::Parse { position: 1, .. })));
    assert!(parse_state::<f64>("EE", 3).is_err());
}

#[test]
fn gate_actions_on_states() {
    let sys = three();
    let inv = gate_library(GateKind::UzPair, -PI, &[2, 3], &sys).unwrap();
    let s = parse_state::<f64>("EYE+EEY", 3).unwrap();
    let out = apply_gate(&s, &inv.unitary).unwrap();
    assert!(max_abs_diff(out.matrix(), &s.scaled(-1.0).into_matrix()) < 1e-12);

    let swap = gate_library(GateKind::Uxy, PI / 4.0, &[2, 3], &sys).unwrap();
    let out = apply_gate(&parse_state("1X0", 3).unwrap(), &swap.unitary).unwrap();
    assert!(max_abs_diff(out.matrix(), parse_state::<f64>("10Y", 3).unwrap().matrix()) < 1e-12);
    assert!(max_abs_diff(apply_gate(&s, &identity(8)).unwrap().matrix(), s.matrix()) < 1e-15);
}

#[test]
fn overlap_examples() {
    let sys = three();
    let basis = StateBasis::<f64>::from_exprs(&["1X0", "10Y"], 3).unwrap();
    let c = overlap_coeffs(&basis.states()[0], &basis).unwrap();
    assert_abs_diff_eq!(c[0], 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(c[1], 0.0, epsilon = 1e-14);
    let g = gate_library(GateKind::Uxy, PI / 8.0, &[2, 3], &sys).unwrap();
    let out = apply_gate(&basis.states()[0], &g.unitary).unwrap();
    let c = overlap_coeffs(&out, &basis).unwrap();
    assert_abs_diff_eq!(c[0], 0.5f64.sqrt(), epsilon = 1e-12);
    assert_abs_diff_eq!(c[1], 0.5f64.sqrt(), epsilon = 1e-12);
    let z = overlap_coeffs(&DeviationState::zero(3), &basis).unwrap();
    assert_eq!(z, vec![0.0, 0.0]);
}

#[test]
fn sweeps() {
    let sys = three();
    let thetas: Vec<f64> = (0..9).map(|k| k as f64 * PI / 16.0).collect();
    for expr in xy_family_exprs(3, (2, 3), '0').unwrap() {
        let state = parse_state::<f64>(&expr, 3).unwrap();
        let r = theta_sweep(&sys, (2, 3), &state, &thetas, &SweepRealization::Exact).unwrap();
        assert_abs_diff_eq!(r.a, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.b, 1.0, epsilon = 1e-9);
        assert!(r.residual_a < 1e-9 && r.residual_b < 1e-9);
        assert_eq!((r.points[0].stay, r.points[0].transfer.abs() < 1e-15), (1.0, true));

        let damped = SweepRealization::ExactDephased {
            t2_s: vec![0.02; 3],
            duration_s: 4e-3,
            slices: 40,
        };
        let r = theta_sweep(&sys, (2, 3), &state, &thetas, &damped).unwrap();
        assert!(r.a < 1.0 && r.b < 1.0 && r.a > 0.5 && r.b > 0.5);
        assert!(r.residual_a < 0.02 && r.residual_b < 0.02);
    }
    let state = parse_state::<f64>("0X0", 3).unwrap();
    assert!(theta_sweep(&sys, (2, 3), &state, &[0.3], &SweepRealization::Exact).is_err());
}

#[test]
fn dephasing_examples() {
    let y = parse_state::<f64>("Y", 1).unwrap();
    assert_eq!(apply_dephasing(&y, &[0.02], 0.0).unwrap(), y);
    let d = apply_dephasing(&y, &[0.02], 0.02).unwrap();
    assert_abs_diff_eq!(d.overlap(&y) / y.overlap(&y), (-1.0f64).exp(), epsilon = 1e-12);
    let mix = parse_state::<f64>("XZ+ZE+YY+EZ", 2).unwrap();
    let gone = apply_dephasing(&mix, &[0.02, 0.03], 1e3).unwrap();
    let want = parse_state::<f64>("ZE+EZ", 2).unwrap();
    assert!(max_abs_diff(gone.matrix(), want.matrix()) < 1e-12);
}

#[test]
fn commensurate_examples() {
    let sys = three();
    let r = commensurate_check(&sys, (2, 3), 0).unwrap();
    assert!(r.holds && r.tau_s == 0.0);
    for m in 1..=3 {
        assert!(commensurate_check(&sys, (2, 3), m).unwrap().holds);
    }
    assert!(commensurate_fidelity(&sys, (2, 3), 0.5e-3).unwrap() < 1.0 - 1e-6);
}

#[test]
fn single_spin_fid_convention() {
    let nu = 330.0;
    let sys = SpinSystem::single_spin("H", nu);
    let y = parse_state::<f64>("Y", 1).unwrap();
    let fid = simulate_fid(&sys, &y, "H", 128, 1e-4, None).unwrap();
    let z0 = fid.samples[0];
    for (k, z) in fid.samples.iter().enumerate() {
        let ph = 2.0 * PI * nu * fid.time_s(k);
        assert!((z - z0 * cx(ph.cos(), ph.sin())).norm() < 1e-9);
    }
    let zero = simulate_fid(&sys, &DeviationState::zero(1), "H", 16, 1e-4, None).unwrap();
    assert!(zero.samples.iter().all(|z| z.norm() == 0.0));
    let spec = to_spectrum(&zero, &Processing::default()).unwrap();
    assert!(spec.values.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn tone_spectrum() {
    let (nu, dwell, n) = (1234.5, 1e-4, 1024);
    let samples = (0..n)
        .map(|k| {
            let ph = 2.0 * PI * nu * dwell * k as f64;
            cx(ph.cos(), ph.sin())
        })
        .collect();
    let fid = Fid::new(dwell, samples, "H").unwrap();
    let spec = to_spectrum(&fid, &Processing::default()).unwrap();
    let peaks = spec.peaks_hz(0.5);
    assert_eq!(peaks.len(), 1);
    assert!((peaks[0] - nu).abs() <= spec.bin_width_hz());
}

#[test]
fn fit_examples() {
    let sys = three();
    let acq = Acquisition {
        species: "H".into(),
        n_points: 512,
        dwell_s: 50e-6,
        processing: Processing::matched(0.02),
    };
    let reference = acq.spectrum(&sys, &parse_state("EYE+EEY", 3).unwrap(), None).unwrap();
    let fit = fit_overlap(&reference, std::slice::from_ref(&reference)).unwrap();
    assert_abs_diff_eq!(fit.coeffs[0], 1.0, epsilon = 1e-12);
    assert!(fit.residual_norm < 1e-9 && fit.stderr[0] < 1e-9);
    let twice = [reference.clone(), reference.combine(2.0, &reference, 0.0).unwrap()];
    assert!(matches!(fit_overlap(&reference, &twice), Err(Error::Fit(_))));
}

#[test]
fn inversion_examples() {
    let sys = three();
    let acq = Acquisition {
        species: "H".into(),
        n_points: 1024,
        dwell_s: 50e-6,
        processing: Processing::matched(0.02),
    };
    let target = gate_library(GateKind::UzPair, -PI, &[2, 3], &sys).unwrap();
    let input = parse_state::<f64>("EYE+EEY", 3).unwrap();
    let exact = inversion_experiment(&sys, &input, &GateRealization::Exact(&target), &acq, None).unwrap();
    assert_abs_diff_eq!(exact.coefficient(), -1.0, epsilon = 1e-9);
    let t2 = [0.02; 3];
    let instant = GateRealization::Timed { target: &target, duration_s: 0.0, slices: 10 };
    let c0 = inversion_experiment(&sys, &input, &instant, &acq, Some(&t2)).unwrap().coefficient();
    assert_abs_diff_eq!(c0, -1.0, epsilon = 1e-9);
    let mut last = 1.0;
    for ms in [1.0, 2.0, 4.0] {
        let gate = GateRealization::Timed { target: &target, duration_s: ms * 1e-3, slices: 50 };
        let c = inversion_experiment(&sys, &input, &gate, &acq, Some(&t2)).unwrap().coefficient();
        assert!(c < 0.0 && c > -1.0, "{ms} ms: {c}");
        assert!(c.abs() <= last);
        last = c.abs();
    }
}

#[test]
fn pauli_sum_parsing() {
    let s = PauliSum::<f64>::parse("2.5*XZ - Y1", 2).unwrap();
    let want = pauli("XZ", 2.5) - pauli("YE", 0.5) + pauli("YZ", 0.5);
    assert!(max_abs_diff(&s.to_matrix(), &want) < 1e-15);
    let single = PauliString::single(2, 2, Pauli::Y, 1.0);
    assert_eq!(single.label(), "EY");
}
