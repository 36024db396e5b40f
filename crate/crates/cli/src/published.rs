// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Published experimental values, shipped read-only for side-by-side output.

use serde::Deserialize;

const DATA: &str = include_str!("../data/published.toml");

#[derive(Debug, Deserialize)]
pub struct Inversion {
    pub coefficient: f64,
    pub stderr: f64,
}

#[derive(Debug, Deserialize)]
pub struct Relaxation {
    pub t2_ms_min: f64,
    pub t2_ms_max: f64,
}

#[derive(Debug, Deserialize)]
pub struct ErrorBudget {
    pub pulse_percent: f64,
    pub relaxation_percent: f64,
    pub miscalibration_percent: f64,
}

#[derive(Debug, Deserialize)]
pub struct Overlap {
    pub register: usize,
    pub gate: String,
    pub input: usize,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Deserialize)]
pub struct SweepFit {
    pub input: usize,
    pub a: f64,
    pub a_stderr: f64,
    pub b: f64,
    pub b_stderr: f64,
}

#[derive(Debug, Deserialize)]
pub struct Published {
    pub inversion: Inversion,
    pub relaxation: Relaxation,
    pub error_budget: ErrorBudget,
    pub overlap: Vec<Overlap>,
    pub sweep: Vec<SweepFit>,
}

impl Published {
    pub fn load() -> Published {
        toml::from_str(DATA).expect("bundled published values parse")
    }

    pub fn overlap(&self, register: usize, gate: &str, input: usize) -> Option<&Overlap> {
        self.overlap
            .iter()
            .find(|o| o.register == register && o.gate == gate && o.input == input)
    }

    pub fn sweep_fit(&self, input: usize) -> Option<&SweepFit> {
        self.sweep.iter().find(|s| s.input == input)
    }
}
