// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Piecewise-constant actuator pulses: gate targets, propagation, fidelity
//! and GRAPE synthesis.

mod file;
mod gates;
mod grape;

use nalgebra::DMatrix;

pub use gates::{gate_library, GateKind, GateTarget};
pub use grape::{
    grape_optimize, GrapeConfig, GrapeObjective, GrapeResult, TraceRow, UpdateRule,
};

use crate::dynamics::{DephasingChannel, DeviationState};
use crate::error::{Error, Result};
use crate::linalg::{
    identity, invariant_blocks, sub_block, trace_product, zeros, HermitianEigen, Operator,
};
use crate::pauli::from_pauli_coefficients;
use crate::scalar::{cre, from_usize, norm_sqr, Real};
use crate::spin_system::{ControlChannel, ControlMode, SpinSystem};

/// Control amplitudes in Hz, one row per segment and one column per channel.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence<T: Real> {
    dt_s: T,
    labels: Vec<String>,
    amplitudes_hz: DMatrix<T>,
}

impl<T: Real> PulseSequence<T> {
    pub fn new(dt_s: T, labels: Vec<String>, amplitudes_hz: DMatrix<T>) -> Result<Self> {
        if !(dt_s > T::zero()) || !dt_s.is_finite() {
            return Err(Error::input("segment duration must be positive and finite"));
        }
        if amplitudes_hz.nrows() == 0 {
            return Err(Error::input("pulse has no segments"));
        }
        if labels.len() != amplitudes_hz.ncols() {
            return Err(Error::dim(format!(
                "{} channel labels for {} amplitude columns",
                labels.len(),
                amplitudes_hz.ncols()
            )));
        }
        if amplitudes_hz.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("pulse amplitudes must be finite"));
        }
        Ok(PulseSequence {
            dt_s,
            labels,
            amplitudes_hz,
        })
    }

    pub fn zeros(n_segments: usize, dt_s: T, labels: Vec<String>) -> Result<Self> {
        let k = labels.len();
        Self::new(dt_s, labels, DMatrix::zeros(n_segments, k))
    }

    pub fn n_segments(&self) -> usize {
        self.amplitudes_hz.nrows()
    }

    pub fn n_channels(&self) -> usize {
        self.amplitudes_hz.ncols()
    }

    pub fn dt_s(&self) -> T {
        self.dt_s
    }

    pub fn duration_s(&self) -> T {
        self.dt_s * from_usize(self.n_segments())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn amplitudes_hz(&self) -> &DMatrix<T> {
        &self.amplitudes_hz
    }

    pub fn max_abs_amplitude(&self) -> T {
        self.amplitudes_hz
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    /// All amplitudes multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        PulseSequence {
            dt_s: self.dt_s,
            labels: self.labels.clone(),
            amplitudes_hz: self.amplitudes_hz.map(|v| v * factor),
        }
    }

    pub fn check_limit(&self, max_rf_hz: T) -> Result<()> {
        let m = self.max_abs_amplitude();
        if m > max_rf_hz {
            return Err(Error::input(format!(
                "pulse amplitude {m} Hz exceeds the {max_rf_hz} Hz limit"
            )));
        }
        Ok(())
    }
}

/// Drift Hamiltonian together with the control channels that act on it.
#[derive(Clone, Debug)]
pub struct ControlledSystem<T: Real> {
    n_qubits: usize,
    drift: Operator<T>,
    channels: Vec<ControlChannel<T>>,
    blocks: Vec<Block<T>>,
}

/// Invariant subspace shared by the drift and every control.
#[derive(Clone, Debug)]
pub(crate) struct Block<T: Real> {
    pub(crate) idx: Vec<usize>,
    pub(crate) drift: Operator<T>,
    pub(crate) channels: Vec<Operator<T>>,
}

impl<T: Real> Block<T> {
    pub(crate) fn hamiltonian(&self, amps: impl Iterator<Item = T>) -> Operator<T> {
        let mut h = self.drift.clone();
        for (u, ch) in amps.zip(&self.channels) {
            if u != T::zero() {
                let s = cre(T::pi() * u);
                h.zip_apply(ch, |a, b| *a += b * s);
            }
        }
        h
    }
}

fn split_blocks<T: Real>(drift: &Operator<T>, channels: &[ControlChannel<T>]) -> Vec<Block<T>> {
    let mut ops = vec![drift];
    ops.extend(channels.iter().map(|c| &c.matrix));
    invariant_blocks(&ops)
        .into_iter()
        .map(|idx| Block {
            drift: sub_block(drift, &idx),
            channels: channels.iter().map(|c| sub_block(&c.matrix, &idx)).collect(),
            idx,
        })
        .collect()
}

impl<T: Real> ControlledSystem<T> {
    pub fn new(sys: &SpinSystem<T>, mode: ControlMode) -> Result<Self> {
        Self::from_parts(sys.drift(), sys.controls(mode)?)
    }

    pub fn from_parts(drift: Operator<T>, channels: Vec<ControlChannel<T>>) -> Result<Self> {
        let n_qubits = crate::linalg::is_power_of_two_dim(&drift)?;
        if channels.iter().any(|c| c.matrix.shape() != drift.shape()) {
            return Err(Error::dim("control matrix does not match the drift"));
        }
        let blocks = split_blocks(&drift, &channels);
        Ok(ControlledSystem {
            n_qubits,
            drift,
            channels,
            blocks,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.drift.nrows()
    }

    pub fn drift(&self) -> &Operator<T> {
        &self.drift
    }

    pub fn channels(&self) -> &[ControlChannel<T>] {
        &self.channels
    }

    /// Sizes of the invariant blocks the propagators decompose into.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.idx.len()).collect()
    }

    pub(crate) fn blocks(&self) -> &[Block<T>] {
        &self.blocks
    }

    /// `exp(-i H dt)` for one row of amplitudes, assembled block by block.
    pub fn segment_propagator(&self, amps: &[T], dt_s: T) -> Operator<T> {
        let mut u = zeros(self.dim());
        for b in &self.blocks {
            let ub = HermitianEigen::new(&b.hamiltonian(amps.iter().copied())).propagator(dt_s);
            for (a, &i) in b.idx.iter().enumerate() {
                for (c, &j) in b.idx.iter().enumerate() {
                    u[(i, j)] = ub[(a, c)];
                }
            }
        }
        u
    }

    pub fn labels(&self) -> Vec<String> {
        self.channels.iter().map(|c| c.label.clone()).collect()
    }

    fn check_pulse(&self, pulse: &PulseSequence<T>) -> Result<()> {
        if pulse.n_channels() != self.channels.len() {
            return Err(Error::dim(format!(
                "pulse has {} channels, system has {}",
                pulse.n_channels(),
                self.channels.len()
            )));
        }
        for (a, b) in pulse.labels().iter().zip(&self.channels) {
            if *a != b.label {
                return Err(Error::dim(format!(
                    "pulse channel '{a}' does not match control '{}'",
                    b.label
                )));
            }
        }
        Ok(())
    }

    /// `H_drift + sum_k pi u_k H_k` for one row of amplitudes.
    pub fn segment_hamiltonian(&self, amps: impl Iterator<Item = T>) -> Operator<T> {
        let mut h = self.drift.clone();
        for (u, ch) in amps.zip(&self.channels) {
            if u != T::zero() {
                let s = cre(T::pi() * u);
                h.zip_apply(&ch.matrix, |a, b| *a += b * s);
            }
        }
        h
    }

    pub fn segment_propagators(&self, pulse: &PulseSequence<T>) -> Result<Vec<Operator<T>>> {
        self.check_pulse(pulse)?;
        let amps = pulse.amplitudes_hz();
        Ok((0..pulse.n_segments())
            .map(|j| {
                let row: Vec<T> = amps.row(j).iter().copied().collect();
                self.segment_propagator(&row, pulse.dt_s())
            })
            .collect())
    }

    /// Total propagator `U_N ... U_1`.
    pub fn propagate(&self, pulse: &PulseSequence<T>) -> Result<Operator<T>> {
        let mut u = identity(self.dim());
        for step in self.segment_propagators(pulse)? {
            u = step * u;
        }
        Ok(u)
    }
}

pub fn propagate<T: Real>(ctrl: &ControlledSystem<T>, pulse: &PulseSequence<T>) -> Result<Operator<T>> {
    ctrl.propagate(pulse)
}

/// Gate fidelity of `u` against the target.
///
/// Phase-insensitive targets use `|Tr(U_t^dagger U)|^2 / d^2`. Phase-sensitive
/// ones use `max(Re Tr(U_t^dagger U), 0)^2 / d^2`, which is 1 only for `U = U_t`
/// exactly.
pub fn fidelity<T: Real>(u: &Operator<T>, target: &GateTarget<T>) -> Result<T> {
    if u.shape() != target.unitary.shape() {
        return Err(Error::dim(format!(
            "propagator is {}x{}, target is {}x{}",
            u.nrows(),
            u.ncols(),
            target.unitary.nrows(),
            target.unitary.ncols()
        )));
    }
    let d = from_usize::<T>(u.nrows());
    let g = trace_product(&target.unitary.adjoint(), u);
    Ok(if target.phase_insensitive {
        norm_sqr(g) / (d * d)
    } else {
        let re = g.re.max(T::zero());
        re * re / (d * d)
    })
}

/// Error models for gate re-evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum Perturbation<T: Real> {
    None,
    /// Every amplitude multiplied by `1 + eps`.
    AmplitudeScale(T),
    /// Per-qubit transverse relaxation times (seconds), applied after every
    /// segment.
    Dephasing(Vec<T>),
}

/// Gate performance of `pulse` under a perturbation.
///
/// For dephasing the propagator is no longer unitary, so the score is the
/// operator-basis average `d^-3 sum_P Tr(U_t P U_t^dagger L(P))` over all `4^n`
/// Pauli strings `P`, with `L` the segment-wise channel. For a unitary `L`
/// this equals `|Tr(U_t^dagger U)|^2 / d^2`.
pub fn perturbed_fidelity<T: Real>(
    ctrl: &ControlledSystem<T>,
    pulse: &PulseSequence<T>,
    target: &GateTarget<T>,
    perturbation: &Perturbation<T>,
) -> Result<T> {
    match perturbation {
        Perturbation::None => fidelity(&ctrl.propagate(pulse)?, target),
        Perturbation::AmplitudeScale(eps) => {
            fidelity(&ctrl.propagate(&pulse.scaled(T::one() + *eps))?, target)
        }
        Perturbation::Dephasing(t2) => {
            let channel = DephasingChannel::new(t2, ctrl.n_qubits())?;
            if channel.is_trivial() {
                return fidelity(&ctrl.propagate(pulse)?, target);
            }
            let steps = ctrl.segment_propagators(pulse)?;
            let mask = channel.mask(pulse.dt_s());
            process_fidelity(target, ctrl.n_qubits(), |p| {
                let mut rho = p.clone();
                for u in &steps {
                    rho = rho.conjugated(u);
                    rho.apply_mask(&mask);
                }
                Ok(rho)
            })
        }
    }
}

/// Operator-basis average `d^-3 sum_P Tr(U_t P U_t^dagger L(P))` of a
/// unital channel `L` against the target, over all `4^n` Pauli strings.
/// For a unitary channel `L(P) = U P U^dagger` this is
/// `|Tr(U_t^dagger U)|^2 / d^2`.
pub fn process_fidelity<T: Real, F>(target: &GateTarget<T>, n_qubits: usize, mut channel: F) -> Result<T>
where
    F: FnMut(&DeviationState<T>) -> Result<DeviationState<T>>,
{
    let dim = 1usize << n_qubits;
    if target.dim() != dim {
        return Err(Error::dim("target does not match the register"));
    }
    let ut = &target.unitary;
    let ut_dag = ut.adjoint();
    let mut coeffs = vec![cre(T::zero()); dim * dim];
    // The identity string is invariant and contributes Tr(I) = d.
    let mut total = from_usize::<T>(dim);
    for idx in 1..dim * dim {
        coeffs[idx - 1] = cre(T::zero());
        coeffs[idx] = cre(T::one());
        let p = from_pauli_coefficients(&coeffs, n_qubits)?;
        let out = channel(&DeviationState::from_matrix_unchecked(p.clone()))?;
        let ideal = ut * p * &ut_dag;
        total += trace_product(&ideal, out.matrix()).re;
    }
    let d = from_usize::<T>(dim);
    Ok(total / (d * d * d))
}

pub use file::{read_pulse_file, write_pulse_file};
