// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Plain-text pulse files.
//!
//! The first line holds the segment count, the segment duration in seconds
//! and the channel labels, whitespace separated. Each following line holds
//! one segment's amplitudes in Hz. Lines starting with `#` are comments.

use std::path::Path;

use nalgebra::DMatrix;

use super::PulseSequence;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

impl<T: Real> PulseSequence<T> {
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {:e}", self.n_segments(), to_f64(self.dt_s()));
        for l in self.labels() {
            out.push(' ');
            out.push_str(l);
        }
        out.push('\n');
        for row in self.amplitudes_hz().row_iter() {
            let cells: Vec<String> = row.iter().map(|v| format!("{:e}", to_f64(*v))).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::config("pulse file is empty"))?;
        let mut fields = header.split_whitespace();
        let n: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| Error::config("pulse header: bad segment count"))?;
        let dt: f64 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| Error::config("pulse header: bad segment duration"))?;
        let labels: Vec<String> = fields.map(str::to_string).collect();
        if labels.is_empty() {
            return Err(Error::config("pulse header: no channel labels"));
        }
        let mut values = Vec::with_capacity(n * labels.len());
        let mut rows = 0;
        for (lineno, line) in lines {
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::config(format!("pulse line {}: {e}", lineno + 1)))?;
            if row.len() != labels.len() {
                return Err(Error::config(format!(
                    "pulse line {}: {} values for {} channels",
                    lineno + 1,
                    row.len(),
                    labels.len()
                )));
            }
            values.extend(row);
            rows += 1;
        }
        if rows != n {
            return Err(Error::config(format!(
                "pulse header announces {n} segments, file has {rows}"
            )));
        }
        let k = labels.len();
        let amps = DMatrix::from_row_iterator(n, k, values.into_iter().map(lit::<T>));
        PulseSequence::new(lit(dt), labels, amps).map_err(|e| Error::config(e.to_string()))
    }
}

pub fn write_pulse_file<T: Real>(path: impl AsRef<Path>, pulse: &PulseSequence<T>) -> Result<()> {
    std::fs::write(path, pulse.to_text())?;
    Ok(())
}

pub fn read_pulse_file<T: Real>(path: impl AsRef<Path>) -> Result<PulseSequence<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    PulseSequence::from_text(&text)
}
