// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Argument groups and parsers shared by several subcommands.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use spinact::dynamics::{xy_family_exprs, StateBasis};
use spinact::pulse::{gate_library, GateKind, GateTarget, GrapeConfig, UpdateRule};
use spinact::spin_system::{ControlMode, MoleculeConfig};
use spinact::SpinSystem64;

use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    Selective,
    Collective,
}

impl From<Mode> for ControlMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Selective => ControlMode::Selective,
            Mode::Collective => ControlMode::Collective,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct MoleculeArgs {
    /// Molecule description (TOML).
    #[arg(long, value_name = "PATH")]
    pub molecule: PathBuf,
    /// How actuator drives are grouped into control channels.
    #[arg(long, value_enum, default_value = "selective")]
    pub mode: Mode,
}

impl MoleculeArgs {
    /// Loads the register and prints parameter degeneracies to stderr.
    pub fn load(&self) -> CliResult<SpinSystem64> {
        let sys = MoleculeConfig::load(&self.molecule)?.to_system::<f64>()?;
        for w in sys.degeneracy_warnings() {
            eprintln!("warning: {w}; the dynamical algebra may be smaller than generic");
        }
        Ok(sys)
    }

    pub fn record(&self, m: &mut RunManifest) {
        m.config("molecule", &self.molecule);
    }
}

#[derive(Args, Debug, Clone)]
pub struct GateArgs {
    /// Library gate: uz-single, uz-pair or uxy.
    #[arg(long, value_name = "NAME")]
    pub gate: GateKind,
    /// Rotation angle in radians; `pi` multiples such as `-pi/2` are accepted.
    #[arg(long, value_name = "RAD", value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta: f64,
    /// Target qubits, 1-based and comma separated.
    #[arg(long, value_name = "LIST", value_parser = parse_qubits)]
    pub targets: QubitList,
}

impl GateArgs {
    pub fn target(&self, sys: &SpinSystem64) -> CliResult<GateTarget<f64>> {
        Ok(gate_library(self.gate, self.theta, &self.targets.0, sys)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitList(pub Vec<usize>);

pub fn parse_qubits(s: &str) -> Result<QubitList, String> {
    let qs = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if qs.is_empty() {
        return Err("empty qubit list".into());
    }
    Ok(QubitList(qs))
}

/// Parses `1.5`, `pi`, `-pi/2`, `3pi/4`, `0.25*pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|e| format!("'{s}': {e}"))?),
        None => (t.as_str(), 1.0),
    };
    let value = if let Some(head) = num.strip_suffix("pi") {
        let head = head.strip_suffix('*').unwrap_or(head);
        let k = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|e| format!("'{s}': {e}"))?,
        };
        k * std::f64::consts::PI
    } else {
        num.parse::<f64>().map_err(|e| format!("'{s}': {e}"))?
    };
    if den == 0.0 || !value.is_finite() {
        return Err(format!("'{s}' is not a finite angle"));
    }
    Ok(value / den)
}

/// Per-qubit T2 in seconds from a comma list in milliseconds. One value is
/// broadcast to every qubit; `inf` disables dephasing on a qubit.
pub fn parse_t2_ms(list: &str, n_qubits: usize) -> CliResult<Vec<f64>> {
    let vals = list
        .split(',')
        .map(|p| {
            let p = p.trim();
            if p.eq_ignore_ascii_case("inf") {
                Ok(f64::INFINITY)
            } else {
                p.parse::<f64>()
                    .map_err(|e| CliError::usage(format!("--t2 value '{p}': {e}")))
            }
        })
        .collect::<CliResult<Vec<f64>>>()?;
    let vals = match vals.len() {
        1 => vec![vals[0]; n_qubits],
        n if n == n_qubits => vals,
        n => {
            return Err(CliError::usage(format!(
                "--t2 has {n} values; give 1 or {n_qubits}"
            )))
        }
    };
    if let Some(bad) = vals.iter().find(|v| !(**v > 0.0)) {
        return Err(CliError::usage(format!("--t2 values must be positive, got {bad}")));
    }
    Ok(vals.into_iter().map(|v| v * 1e-3).collect())
}

/// Target pair whose XY family serves as the state basis.
pub fn basis_pair(sys: &SpinSystem64, gate_targets: &[usize], pair: Option<&QubitList>) -> CliResult<(usize, usize)> {
    if let Some(p) = pair {
        return match p.0.as_slice() {
            [a, b] => Ok((*a, *b)),
            _ => Err(CliError::usage("--pair needs exactly two qubits")),
        };
    }
    if let [a, b] = gate_targets {
        return Ok((*a, *b));
    }
    let targets: Vec<usize> = sys.targets().iter().copied().collect();
    match targets.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(CliError::usage(
            "cannot infer the basis pair for this register; pass --pair A,B",
        )),
    }
}

pub fn spectator_char(s: &str) -> Result<char, String> {
    match s {
        "0" | "1" | "E" => Ok(s.chars().next().unwrap()),
        _ => Err(format!("spectator must be 0, 1 or E, got '{s}'")),
    }
}

pub fn xy_basis(n: usize, pair: (usize, usize), spectator: char) -> CliResult<(Vec<String>, StateBasis<f64>)> {
    let exprs = xy_family_exprs(n, pair, spectator)?;
    let refs: Vec<&str> = exprs.iter().map(String::as_str).collect();
    Ok((exprs.clone(), StateBasis::from_exprs(&refs, n)?))
}

/// GRAPE settings from flags, falling back to an optional TOML block and
/// then to the library defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct GrapeArgs {
    /// TOML file with a `[grape]` table using the flag names below
    /// (`segments`, `dt_us`, ...). Flags take precedence.
    #[arg(long, value_name = "PATH")]
    pub grape_config: Option<PathBuf>,
    /// Number of piecewise-constant segments [default: 200].
    #[arg(long, value_name = "N")]
    pub segments: Option<usize>,
    /// Segment duration in microseconds [default: 25].
    #[arg(long, value_name = "X")]
    pub dt_us: Option<f64>,
    /// Amplitude limit per channel in Hz [default: 10000].
    #[arg(long, value_name = "X")]
    pub max_rf_hz: Option<f64>,
    /// Seed of the first restart; restart r uses seed + r [default: 1].
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Random starts [default: 5].
    #[arg(long, value_name = "N")]
    pub restarts: Option<usize>,
    /// Iteration cap per restart [default: 2000].
    #[arg(long, value_name = "N")]
    pub max_iters: Option<usize>,
    /// Fidelity at which a restart stops iterating [default: 0.999].
    #[arg(long, value_name = "F")]
    pub goal: Option<f64>,
    /// Initial amplitudes are uniform in +-fraction * max_rf_hz.
    #[arg(long, value_name = "F")]
    pub init_fraction: Option<f64>,
    /// Use a fixed step (Hz) instead of the line search.
    #[arg(long, value_name = "X")]
    pub fixed_step_hz: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GrapeBlock {
    segments: Option<usize>,
    dt_us: Option<f64>,
    max_rf_hz: Option<f64>,
    seed: Option<u64>,
    restarts: Option<usize>,
    max_iters: Option<usize>,
    goal: Option<f64>,
    init_fraction: Option<f64>,
    fixed_step_hz: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GrapeFile {
    #[serde(default)]
    grape: GrapeBlock,
}

impl GrapeArgs {
    pub fn resolve(&self) -> CliResult<GrapeConfig<f64>> {
        let file = match &self.grape_config {
            Some(p) => read_grape_block(p)?,
            None => GrapeBlock::default(),
        };
        let d = GrapeConfig::<f64>::default();
        let cfg = GrapeConfig {
            n_segments: self.segments.or(file.segments).unwrap_or(d.n_segments),
            dt_s: self.dt_us.or(file.dt_us).map_or(d.dt_s, |v| v * 1e-6),
            max_rf_hz: self.max_rf_hz.or(file.max_rf_hz).unwrap_or(d.max_rf_hz),
            max_iters: self.max_iters.or(file.max_iters).unwrap_or(d.max_iters),
            fidelity_goal: self.goal.or(file.goal).unwrap_or(d.fidelity_goal),
            seed: self.seed.or(file.seed).unwrap_or(d.seed),
            restarts: self.restarts.or(file.restarts).unwrap_or(d.restarts),
            init_fraction: self.init_fraction.or(file.init_fraction).unwrap_or(d.init_fraction),
            update: match self.fixed_step_hz.or(file.fixed_step_hz) {
                Some(s) => UpdateRule::FixedStep(s),
                None => UpdateRule::LineSearch,
            },
            ..d
        };
        cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
        Ok(cfg)
    }

    pub fn record(&self, cfg: &GrapeConfig<f64>, m: &mut RunManifest) {
        if let Some(p) = &self.grape_config {
            m.config("grape", p);
        }
        m.seeds.extend((0..cfg.restarts).map(|r| cfg.seed.wrapping_add(r as u64)));
        m.tolerance("grape_goal", cfg.fidelity_goal);
        m.tolerance("grape_min_step_hz", cfg.min_step_hz);
    }
}

fn read_grape_block(path: &Path) -> CliResult<GrapeBlock> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let f: GrapeFile = toml::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    Ok(f.grape)
}

/// Shortest round-trip text form, used for every CSV cell.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}
