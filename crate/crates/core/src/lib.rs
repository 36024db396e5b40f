// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Indirect control of spin registers through actuator qubits.
//!
//! A register is split into directly driven *actuator* qubits and undriven
//! *target* qubits that are reached only through the drift couplings. The
//! crate builds the drift and control Hamiltonians, computes the dynamical
//! Lie algebra they generate, synthesizes piecewise-constant pulses with
//! GRAPE, and checks the resulting gates through deviation-density-matrix
//! dynamics and simulated NMR spectra.
//!
//! Everything numerical is generic over [`Real`] (f32 or f64). The `*64`
//! aliases below are the instantiations the CLI and the acceptance suite use.

pub mod dynamics;
pub mod error;
pub mod lie_algebra;
pub mod linalg;
pub mod pauli;
pub mod pulse;
pub mod scalar;
pub mod spectroscopy;
pub mod spin_system;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Operator64 = linalg::Operator<f64>;
pub type Operator32 = linalg::Operator<f32>;
pub type PauliString64 = pauli::PauliString<f64>;
pub type PauliSum64 = pauli::PauliSum<f64>;
pub type SpinSystem64 = spin_system::SpinSystem<f64>;
pub type SpinSystem32 = spin_system::SpinSystem<f32>;
pub type AlgebraBasis64 = lie_algebra::AlgebraBasis<f64>;
pub type ControlledSystem64 = pulse::ControlledSystem<f64>;
pub type PulseSequence64 = pulse::PulseSequence<f64>;
pub type GateTarget64 = pulse::GateTarget<f64>;
pub type GrapeConfig64 = pulse::GrapeConfig<f64>;
pub type DeviationState64 = dynamics::DeviationState<f64>;
pub type StateBasis64 = dynamics::StateBasis<f64>;
pub type Fid64 = spectroscopy::Fid<f64>;
pub type Spectrum64 = spectroscopy::Spectrum<f64>;
