// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Molecule configuration files (TOML).
//!
//! ```toml
//! n_qubits = 3
//! species = ["F", "H", "H"]
//! shifts_hz = [1500.0, 600.0, -350.0]
//! dipolar_hz = [[1, 2, 1350.0], [1, 3, 410.0], [2, 3, 1000.0]]
//! scalar_hz = []           # optional, same shape
//! actuators = [1]
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SpinSystem;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// One coupling constant `[i, j, value_hz]`, 1-based, `i < j` preferred.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingEntry(pub usize, pub usize, pub f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub n_qubits: usize,
    pub species: Vec<String>,
    pub shifts_hz: Vec<f64>,
    #[serde(default)]
    pub dipolar_hz: Vec<CouplingEntry>,
    #[serde(default)]
    pub scalar_hz: Vec<CouplingEntry>,
    pub actuators: Vec<usize>,
}

impl MoleculeConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: MoleculeConfig =
            toml::from_str(text).map_err(|e| Error::config(format!("molecule file: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        if n == 0 {
            return Err(Error::config("n_qubits must be positive"));
        }
        if self.species.len() != n {
            return Err(Error::config(format!(
                "species has {} entries, n_qubits is {n}",
                self.species.len()
            )));
        }
        if self.shifts_hz.len() != n {
            return Err(Error::config(format!(
                "shifts_hz has {} entries, n_qubits is {n}",
                self.shifts_hz.len()
            )));
        }
        if self.shifts_hz.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("shifts_hz must be finite"));
        }
        coupling_map(&self.dipolar_hz, n, "dipolar_hz")?;
        coupling_map(&self.scalar_hz, n, "scalar_hz")?;
        Ok(())
    }

    pub fn to_system<T: Real>(&self) -> Result<SpinSystem<T>> {
        self.validate()?;
        let n = self.n_qubits;
        let dip = to_matrix(&coupling_map(&self.dipolar_hz, n, "dipolar_hz")?, n);
        let sc = to_matrix(&coupling_map(&self.scalar_hz, n, "scalar_hz")?, n);
        SpinSystem::new(
            self.species.clone(),
            self.shifts_hz.iter().map(|&v| lit(v)).collect(),
            dip,
            Some(sc),
            self.actuators.iter().copied(),
        )
    }
}

fn coupling_map(
    entries: &[CouplingEntry],
    n: usize,
    what: &str,
) -> Result<BTreeMap<(usize, usize), f64>> {
    let mut map = BTreeMap::new();
    for &CouplingEntry(i, j, v) in entries {
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::config(format!(
                "{what}: pair [{i}, {j}] outside 1..={n}"
            )));
        }
        if i == j {
            return Err(Error::config(format!(
                "{what}: diagonal entry [{i}, {j}] not allowed"
            )));
        }
        if !v.is_finite() {
            return Err(Error::config(format!("{what}: [{i}, {j}] is not finite")));
        }
        let key = (i.min(j), i.max(j));
        if let Some(prev) = map.insert(key, v) {
            return Err(if prev == v {
                Error::config(format!("{what}: duplicate pair [{}, {}]", key.0, key.1))
            } else {
                Error::config(format!(
                    "{what}: asymmetric values {prev} and {v} for pair [{}, {}]",
                    key.0, key.1
                ))
            });
        }
    }
    Ok(map)
}

fn to_matrix<T: Real>(map: &BTreeMap<(usize, usize), f64>, n: usize) -> DMatrix<T> {
    let mut m = DMatrix::zeros(n, n);
    for (&(i, j), &v) in map {
        m[(i - 1, j - 1)] = lit(v);
        m[(j - 1, i - 1)] = lit(v);
    }
    m
}
