// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Spin registers and their drift / control Hamiltonians.
//!
//! Matrices are in rad/s when shifts and couplings are given in Hz: every
//! term carries its factor of pi explicitly and there is no hidden 2 pi.
//! Pairs of the same species use the full dipolar form
//! `(pi D / 2)(2 ZZ - XX - YY)`, pairs of different species the truncated
//! `pi D ZZ`. Scalar couplings add `(pi J / 2)(XX + YY + ZZ)` within a
//! species and `(pi J / 2) ZZ` across species.

mod config;

use std::collections::BTreeSet;

use nalgebra::DMatrix;

pub use config::{CouplingEntry, MoleculeConfig};

use crate::error::{Error, Result};
use crate::linalg::Operator;
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::scalar::{lit, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct SpinSystem<T: Real> {
    species: Vec<String>,
    shifts_hz: Vec<T>,
    dipolar_hz: DMatrix<T>,
    scalar_hz: DMatrix<T>,
    actuators: BTreeSet<usize>,
    targets: BTreeSet<usize>,
}

/// How actuator drives are grouped into control channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ControlMode {
    /// One X and one Y channel per actuator qubit.
    #[default]
    Selective,
    /// One X and one Y channel per actuator species, summed over its qubits.
    Collective,
}

/// A unit-amplitude control Hamiltonian. A pulse amplitude `u` (Hz) enters
/// the total Hamiltonian as `pi * u * matrix`.
#[derive(Clone, Debug)]
pub struct ControlChannel<T: Real> {
    pub label: String,
    pub axis: Pauli,
    pub qubits: Vec<usize>,
    pub matrix: Operator<T>,
}

fn check_symmetric<T: Real>(m: &DMatrix<T>, n: usize, what: &str) -> Result<()> {
    if m.shape() != (n, n) {
        return Err(Error::config(format!(
            "{what} matrix is {}x{}, expected {n}x{n}",
            m.nrows(),
            m.ncols()
        )));
    }
    for i in 0..n {
        if m[(i, i)] != T::zero() {
            return Err(Error::config(format!(
                "{what} matrix has nonzero diagonal at qubit {}",
                i + 1
            )));
        }
        for j in i + 1..n {
            if m[(i, j)] != m[(j, i)] {
                return Err(Error::config(format!(
                    "{what} matrix is not symmetric at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

impl<T: Real> SpinSystem<T> {
    /// Builds a register. Qubits not listed as actuators are targets.
    pub fn new(
        species: Vec<String>,
        shifts_hz: Vec<T>,
        dipolar_hz: DMatrix<T>,
        scalar_hz: Option<DMatrix<T>>,
        actuators: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let n = species.len();
        if n == 0 {
            return Err(Error::config("register must contain at least one qubit"));
        }
        if n > 12 {
            return Err(Error::config(format!(
                "{n} qubits exceeds the dense-matrix limit of 12"
            )));
        }
        if shifts_hz.len() != n {
            return Err(Error::config(format!(
                "{} chemical shifts for {n} qubits",
                shifts_hz.len()
            )));
        }
        if species.iter().any(|s| s.trim().is_empty()) {
            return Err(Error::config("every qubit needs a species label"));
        }
        let scalar_hz = scalar_hz.unwrap_or_else(|| DMatrix::zeros(n, n));
        check_symmetric(&dipolar_hz, n, "dipolar")?;
        check_symmetric(&scalar_hz, n, "scalar")?;
        let mut act = BTreeSet::new();
        for q in actuators {
            if q == 0 || q > n {
                return Err(Error::config(format!(
                    "actuator index {q} outside 1..={n}"
                )));
            }
            if !act.insert(q) {
                return Err(Error::config(format!("actuator {q} listed twice")));
            }
        }
        if act.is_empty() {
            return Err(Error::config("actuator set is empty"));
        }
        let targets = (1..=n).filter(|q| !act.contains(q)).collect();
        Ok(SpinSystem {
            species,
            shifts_hz,
            dipolar_hz,
            scalar_hz,
            actuators: act,
            targets,
        })
    }

    /// A one-spin register, fully actuated.
    pub fn single_spin(species: &str, shift_hz: T) -> Self {
        SpinSystem::new(
            vec![species.to_string()],
            vec![shift_hz],
            DMatrix::zeros(1, 1),
            None,
            [1],
        )
        .expect("single-spin register is always valid")
    }

    pub fn n_qubits(&self) -> usize {
        self.species.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    pub fn species(&self, q: usize) -> &str {
        &self.species[q - 1]
    }

    pub fn species_labels(&self) -> &[String] {
        &self.species
    }

    pub fn shift_hz(&self, q: usize) -> T {
        self.shifts_hz[q - 1]
    }

    pub fn shifts_hz(&self) -> &[T] {
        &self.shifts_hz
    }

    pub fn dipolar_hz(&self, i: usize, j: usize) -> T {
        self.dipolar_hz[(i - 1, j - 1)]
    }

    pub fn scalar_hz(&self, i: usize, j: usize) -> T {
        self.scalar_hz[(i - 1, j - 1)]
    }

    pub fn actuators(&self) -> &BTreeSet<usize> {
        &self.actuators
    }

    pub fn targets(&self) -> &BTreeSet<usize> {
        &self.targets
    }

    pub fn is_homonuclear(&self, i: usize, j: usize) -> bool {
        self.species[i - 1] == self.species[j - 1]
    }

    /// Qubits of the given species, ascending.
    pub fn qubits_of_species(&self, species: &str) -> Vec<usize> {
        (1..=self.n_qubits())
            .filter(|&q| self.species(q) == species)
            .collect()
    }

    /// The drift Hamiltonian as a sum of Pauli strings (rad/s).
    pub fn drift_terms(&self) -> PauliSum<T> {
        let n = self.n_qubits();
        let pi = T::pi();
        let half: T = lit(0.5);
        let mut h = PauliSum::zero(n);
        let mut push = |s: PauliString<T>| h.add(s).expect("register-sized term");
        for q in 1..=n {
            push(PauliString::single(n, q, Pauli::Z, -pi * self.shift_hz(q)));
        }
        for i in 1..=n {
            for j in i + 1..=n {
                let d = self.dipolar_hz(i, j);
                let jc = self.scalar_hz(i, j);
                if self.is_homonuclear(i, j) {
                    let zz = pi * d + pi * jc * half;
                    let xy = -pi * d * half + pi * jc * half;
                    push(PauliString::pair(n, i, Pauli::Z, j, Pauli::Z, zz));
                    push(PauliString::pair(n, i, Pauli::X, j, Pauli::X, xy));
                    push(PauliString::pair(n, i, Pauli::Y, j, Pauli::Y, xy));
                } else {
                    let zz = pi * d + pi * jc * half;
                    push(PauliString::pair(n, i, Pauli::Z, j, Pauli::Z, zz));
                }
            }
        }
        h
    }

    pub fn drift(&self) -> Operator<T> {
        self.drift_terms().to_matrix()
    }

    pub fn controls(&self, mode: ControlMode) -> Result<Vec<ControlChannel<T>>> {
        if self.actuators.is_empty() {
            return Err(Error::config("no actuator qubits to drive"));
        }
        let n = self.n_qubits();
        let mut out = Vec::new();
        match mode {
            ControlMode::Selective => {
                for &k in &self.actuators {
                    for axis in [Pauli::X, Pauli::Y] {
                        out.push(ControlChannel {
                            label: format!("{}{k}", axis.to_char()),
                            axis,
                            qubits: vec![k],
                            matrix: PauliString::single(n, k, axis, T::one()).to_matrix(),
                        });
                    }
                }
            }
            ControlMode::Collective => {
                let mut seen: Vec<&str> = Vec::new();
                for &k in &self.actuators {
                    let sp = self.species(k);
                    if !seen.contains(&sp) {
                        seen.push(sp);
                    }
                }
                for sp in seen {
                    let qubits: Vec<usize> = self
                        .actuators
                        .iter()
                        .copied()
                        .filter(|&k| self.species(k) == sp)
                        .collect();
                    for axis in [Pauli::X, Pauli::Y] {
                        let mut sum = PauliSum::zero(n);
                        for &k in &qubits {
                            sum.add(PauliString::single(n, k, axis, T::one()))?;
                        }
                        out.push(ControlChannel {
                            label: format!("{}[{sp}]", axis.to_char()),
                            axis,
                            qubits: qubits.clone(),
                            matrix: sum.to_matrix(),
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Parameter symmetries that are known to shrink the dynamical Lie
    /// algebra below its generic dimension.
    pub fn degeneracy_warnings(&self) -> Vec<String> {
        let n = self.n_qubits();
        let mut warnings = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                if self.is_homonuclear(i, j) && self.shift_hz(i) == self.shift_hz(j) {
                    warnings.push(format!(
                        "qubits {i} and {j} share species {} and chemical shift",
                        self.species(i)
                    ));
                }
            }
        }
        let targets: Vec<usize> = self.targets.iter().copied().collect();
        for (ti, &a) in targets.iter().enumerate() {
            if self
                .actuators
                .iter()
                .all(|&k| self.dipolar_hz(k, a) == T::zero() && self.scalar_hz(k, a) == T::zero())
            {
                warnings.push(format!("target {a} has no coupling to any actuator"));
            }
            for &b in &targets[ti + 1..] {
                let same = self.actuators.iter().all(|&k| {
                    self.dipolar_hz(k, a) == self.dipolar_hz(k, b)
                        && self.scalar_hz(k, a) == self.scalar_hz(k, b)
                });
                if same {
                    warnings.push(format!(
                        "targets {a} and {b} couple identically to every actuator"
                    ));
                }
            }
        }
        warnings
    }

    /// Same physical register with qubits relabelled: qubit `q` of the
    /// result is qubit `perm[q - 1]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_qubits();
        let mut check: Vec<usize> = perm.to_vec();
        check.sort_unstable();
        if check != (1..=n).collect::<Vec<_>>() {
            return Err(Error::input("not a permutation of the register"));
        }
        let species = perm.iter().map(|&p| self.species(p).to_string()).collect();
        let shifts = perm.iter().map(|&p| self.shift_hz(p)).collect();
        let dip = DMatrix::from_fn(n, n, |i, j| self.dipolar_hz(perm[i], perm[j]));
        let sc = DMatrix::from_fn(n, n, |i, j| self.scalar_hz(perm[i], perm[j]));
        let act: Vec<usize> = (1..=n)
            .filter(|&q| self.actuators.contains(&perm[q - 1]))
            .collect();
        SpinSystem::new(species, shifts, dip, Some(sc), act)
    }

    pub fn from_config(cfg: &MoleculeConfig) -> Result<Self> {
        cfg.to_system()
    }
}

/// Drift Hamiltonian of the register.
pub fn build_drift<T: Real>(sys: &SpinSystem<T>) -> Operator<T> {
    sys.drift()
}

/// Control Hamiltonians of the register's actuators.
pub fn build_controls<T: Real>(
    sys: &SpinSystem<T>,
    mode: ControlMode,
) -> Result<Vec<ControlChannel<T>>> {
    sys.controls(mode)
}
