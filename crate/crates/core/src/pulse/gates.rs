// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{expm_hermitian, unitarity_error, Operator};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::scalar::{lit, Real};
use crate::spin_system::SpinSystem;

/// Target-qubit gates reachable through the actuators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    /// `exp(i theta Z_k / 2)` on one target.
    UzSingle,
    /// `exp(i theta (Z_a + Z_b) / 2)`; the standard instance is `theta = -pi`.
    UzPair,
    /// `exp(i theta (X_a X_b + Y_a Y_b))`.
    Uxy,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::UzSingle => "uz-single",
            GateKind::UzPair => "uz-pair",
            GateKind::Uxy => "uxy",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::UzSingle => 1,
            GateKind::UzPair | GateKind::Uxy => 2,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "uz-single" | "uzsingle" => Ok(GateKind::UzSingle),
            "uz-pair" | "uzpair" | "uz" => Ok(GateKind::UzPair),
            "uxy" | "xy" => Ok(GateKind::Uxy),
            _ => Err(Error::input(format!(
                "unknown gate '{s}' (expected uz-single, uz-pair or uxy)"
            ))),
        }
    }
}

/// A full-register unitary to synthesize.
#[derive(Clone, Debug)]
pub struct GateTarget<T: Real> {
    pub name: String,
    pub unitary: Operator<T>,
    /// Hermitian `G` with `unitary = exp(i G)`, when known.
    pub generator: Option<Operator<T>>,
    pub phase_insensitive: bool,
}

impl<T: Real> GateTarget<T> {
    pub fn new(name: impl Into<String>, unitary: Operator<T>) -> Result<Self> {
        let err = unitarity_error(&unitary);
        if !(err <= lit(1e-10)) {
            return Err(Error::input(format!(
                "target is not unitary (|U^dagger U - I| = {err:e})"
            )));
        }
        Ok(GateTarget {
            name: name.into(),
            unitary,
            generator: None,
            phase_insensitive: true,
        })
    }

    /// `exp(i G)` for Hermitian `G`.
    pub fn from_generator(name: impl Into<String>, generator: Operator<T>) -> Result<Self> {
        let u = expm_hermitian(&generator, -T::one());
        let mut g = GateTarget::new(name, u)?;
        g.generator = Some(generator);
        Ok(g)
    }

    pub fn phase_sensitive(mut self) -> Self {
        self.phase_insensitive = false;
        self
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    /// `exp(i G s)`: the same rotation run for a fraction `s`.
    pub fn fractional(&self, s: T) -> Option<Operator<T>> {
        self.generator
            .as_ref()
            .map(|g| expm_hermitian(g, -s))
    }
}

/// Library gate on target qubits, identity on every other qubit.
pub fn gate_library<T: Real>(
    kind: GateKind,
    theta: T,
    targets: &[usize],
    sys: &SpinSystem<T>,
) -> Result<GateTarget<T>> {
    let n = sys.n_qubits();
    if targets.len() != kind.arity() {
        return Err(Error::input(format!(
            "{kind} acts on {} target qubit(s), got {}",
            kind.arity(),
            targets.len()
        )));
    }
    for &q in targets {
        if !sys.targets().contains(&q) {
            return Err(Error::input(format!(
                "qubit {q} is not a target qubit of this register"
            )));
        }
    }
    if targets.len() == 2 && targets[0] == targets[1] {
        return Err(Error::input("gate qubits must be distinct"));
    }
    let half: T = lit(0.5);
    let mut g = PauliSum::zero(n);
    match kind {
        GateKind::UzSingle => {
            g.add(PauliString::single(n, targets[0], Pauli::Z, theta * half))?;
        }
        GateKind::UzPair => {
            g.add(PauliString::single(n, targets[0], Pauli::Z, theta * half))?;
            g.add(PauliString::single(n, targets[1], Pauli::Z, theta * half))?;
        }
        GateKind::Uxy => {
            let (a, b) = (targets[0], targets[1]);
            g.add(PauliString::pair(n, a, Pauli::X, b, Pauli::X, theta))?;
            g.add(PauliString::pair(n, a, Pauli::Y, b, Pauli::Y, theta))?;
        }
    }
    let qs: Vec<String> = targets.iter().map(|q| q.to_string()).collect();
    let name = format!("{kind}(theta={theta}; qubits={})", qs.join(","));
    GateTarget::from_generator(name, g.to_matrix())
}
