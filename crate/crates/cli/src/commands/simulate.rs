// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use spinact::dynamics::{
    apply_gate, overlap_coeffs, parse_state, span_residual, DephasingChannel, GateRealization,
};
use spinact::pulse::{read_pulse_file, ControlledSystem, GateKind, PulseSequence};
use spinact::spectroscopy::{fit_overlap, simulate_fid, to_spectrum, OverlapFit, Processing};
use spinact::{DeviationState64, GateTarget64, Spectrum64, SpinSystem64};

use crate::common::{
    basis_pair, num, parse_qubits, parse_t2_ms, spectator_char, xy_basis, GateArgs, MoleculeArgs,
    QubitList,
};
use crate::error::{CliError, CliResult};
use crate::manifest::{csv, OutDir, RunManifest};
use crate::published::Published;

#[derive(Args, Debug, Clone)]
pub struct AcquisitionArgs {
    /// Observed species; defaults to the species of the first gate target.
    #[arg(long, value_name = "NAME")]
    pub species: Option<String>,
    #[arg(long, value_name = "N", default_value_t = 2048)]
    pub points: usize,
    #[arg(long, value_name = "X", default_value_t = 50.0)]
    pub dwell_us: f64,
    #[arg(long, value_name = "N", default_value_t = 2)]
    pub zero_fill: usize,
    /// Exponential line broadening in 1/s. Defaults to 1/T2 of the fastest
    /// decaying observed qubit when --t2 is given, none otherwise.
    #[arg(long, value_name = "RATE")]
    pub apodization_per_s: Option<f64>,
}

#[derive(Args, Debug)]
#[group(id = "realization", required = true, multiple = false, args = ["pulse", "exact"])]
pub struct SimulateArgs {
    #[command(flatten)]
    pub molecule: MoleculeArgs,
    #[command(flatten)]
    pub gate: GateArgs,
    /// Pulse file realizing the gate.
    #[arg(long, value_name = "PATH")]
    pub pulse: Option<PathBuf>,
    /// Use the ideal unitary instead of a pulse.
    #[arg(long)]
    pub exact: bool,
    /// Input deviation state, e.g. `EYE+EEY` or `-10Y`.
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    pub input: String,
    /// Per-qubit T2 in ms (one value for all qubits); `inf` allowed.
    #[arg(long, value_name = "LIST_MS")]
    pub t2: Option<String>,
    /// Duration over which an exact gate is spread when dephasing is on.
    #[arg(long, value_name = "X", default_value_t = 0.0)]
    pub duration_us: f64,
    /// Time slices of a spread-out exact gate.
    #[arg(long, value_name = "N", default_value_t = 100)]
    pub slices: usize,
    /// Target pair whose XY input family is the state basis.
    #[arg(long, value_name = "A,B", value_parser = parse_qubits)]
    pub pair: Option<QubitList>,
    /// Projector placed on the qubits outside the pair in the basis states.
    #[arg(long, default_value = "0", value_parser = spectator_char)]
    pub spectator: char,
    #[command(flatten)]
    pub acquisition: AcquisitionArgs,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct FitReport {
    references: Vec<String>,
    coeffs: Vec<f64>,
    stderr: Vec<f64>,
    residual_norm: f64,
    condition_number: f64,
}

impl FitReport {
    fn new(refs: Vec<String>, f: &OverlapFit<f64>) -> Self {
        FitReport {
            references: refs,
            coeffs: f.coeffs.clone(),
            stderr: f.stderr.clone(),
            residual_norm: f.residual_norm,
            condition_number: f.condition_number,
        }
    }
}

#[derive(Serialize)]
struct SimulateReport {
    gate: String,
    input: String,
    realization: String,
    gate_duration_s: f64,
    basis: Vec<String>,
    overlaps_result: Vec<f64>,
    overlaps_predicted: Vec<f64>,
    span_residual_result: f64,
    fit_predicted: FitReport,
    fit_input: Option<FitReport>,
    fit_basis: Option<FitReport>,
}

/// Spectrum settings shared by every state of one run.
pub struct Spectrometer<'a> {
    pub sys: &'a SpinSystem64,
    pub species: String,
    pub points: usize,
    pub dwell_s: f64,
    pub processing: Processing<f64>,
    pub t2: Option<Vec<f64>>,
}

impl<'a> Spectrometer<'a> {
    pub fn new(sys: &'a SpinSystem64, a: &AcquisitionArgs, default_qubit: usize, t2: Option<Vec<f64>>) -> CliResult<Self> {
        let species = a
            .species
            .clone()
            .unwrap_or_else(|| sys.species(default_qubit).to_string());
        let observed = sys.qubits_of_species(&species);
        if observed.is_empty() {
            return Err(CliError::usage(format!("species '{species}' is not in the register")));
        }
        let apod = a.apodization_per_s.or_else(|| {
            t2.as_ref().map(|t| {
                let shortest = observed.iter().map(|&q| t[q - 1]).fold(f64::INFINITY, f64::min);
                1.0 / shortest
            })
        });
        if a.zero_fill == 0 {
            return Err(CliError::usage("--zero-fill must be at least 1"));
        }
        Ok(Spectrometer {
            sys,
            species,
            points: a.points,
            dwell_s: a.dwell_us * 1e-6,
            processing: Processing {
                zero_fill: a.zero_fill,
                apodization_per_s: apod,
            },
            t2,
        })
    }

    pub fn fid_and_spectrum(&self, state: &DeviationState64) -> CliResult<(String, Spectrum64)> {
        let fid = simulate_fid(
            self.sys,
            state,
            &self.species,
            self.points,
            self.dwell_s,
            self.t2.as_deref(),
        )?;
        let spec = to_spectrum(&fid, &self.processing)?;
        Ok((fid.to_csv(), spec))
    }

    pub fn spectrum(&self, state: &DeviationState64) -> CliResult<Spectrum64> {
        Ok(self.fid_and_spectrum(state)?.1)
    }

    pub fn record(&self, m: &mut RunManifest) {
        m.tolerance("dwell_s", self.dwell_s);
        m.tolerance("zero_fill", self.processing.zero_fill as f64);
        if let Some(r) = self.processing.apodization_per_s {
            m.tolerance("apodization_per_s", r);
        }
    }
}

/// Published comparison key of a gate relative to the basis pair.
fn published_gate(kind: GateKind, theta: f64, targets: &[usize], pair: (usize, usize)) -> Option<&'static str> {
    let close = |x: f64, y: f64| (x - y).abs() < 1e-9;
    let pi = std::f64::consts::PI;
    match kind {
        GateKind::UzSingle if close(theta, -pi / 2.0) => {
            if targets[0] == pair.0 {
                Some("uz-single-a")
            } else if targets[0] == pair.1 {
                Some("uz-single-b")
            } else {
                None
            }
        }
        GateKind::Uxy if close(theta, pi / 4.0) => Some("uxy-quarter"),
        _ => None,
    }
}

fn matching_index(state: &DeviationState64, basis: &[DeviationState64]) -> Option<usize> {
    basis.iter().position(|b| {
        let d = state.add(&b.scaled(-1.0)).expect("same register");
        d.hs_norm() <= 1e-9 * b.hs_norm()
    })
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let sys = args.molecule.load()?;
    let n = sys.n_qubits();
    let target: GateTarget64 = args.gate.target(&sys)?;
    let input = parse_state::<f64>(&args.input, n)?;
    let t2 = args.t2.as_deref().map(|s| parse_t2_ms(s, n)).transpose()?;
    let channel = t2.as_ref().map(|t| DephasingChannel::new(t, n)).transpose()?;

    let ctrl;
    let pulse: PulseSequence<f64>;
    let realization = if let Some(path) = &args.pulse {
        ctrl = ControlledSystem::new(&sys, args.molecule.mode.into())?;
        pulse = read_pulse_file(path)?;
        GateRealization::Pulse { ctrl: &ctrl, pulse: &pulse }
    } else if args.duration_us > 0.0 {
        GateRealization::Timed {
            target: &target,
            duration_s: args.duration_us * 1e-6,
            slices: args.slices,
        }
    } else {
        if args.duration_us < 0.0 {
            return Err(CliError::usage("--duration-us must be nonnegative"));
        }
        GateRealization::Exact(&target)
    };
    let result = realization.apply(&input, channel.as_ref())?.with_label("result");
    let predicted = apply_gate(&input, &target.unitary)?.with_label("predicted");

    let pair = basis_pair(&sys, &args.gate.targets.0, args.pair.as_ref())?;
    let (names, basis) = xy_basis(n, pair, args.spectator)?;
    let ov_result = overlap_coeffs(&result, &basis)?;
    let ov_predicted = overlap_coeffs(&predicted, &basis)?;
    let residual = span_residual(&result, &basis)?;

    let spec = Spectrometer::new(&sys, &args.acquisition, args.gate.targets.0[0], t2.clone())?;
    let (fid_ref, s_ref) = spec.fid_and_spectrum(&input)?;
    let (fid_res, s_res) = spec.fid_and_spectrum(&result)?;
    let s_pred = spec.spectrum(&predicted)?;
    let fit_pred = fit_overlap(&s_res, std::slice::from_ref(&s_pred))?;
    let fit_input = match fit_overlap(&s_res, std::slice::from_ref(&s_ref)) {
        Ok(f) => Some(f),
        Err(e) => {
            eprintln!("warning: input-spectrum fit skipped: {e}");
            None
        }
    };
    let basis_spectra = basis
        .states()
        .iter()
        .map(|b| spec.spectrum(b))
        .collect::<CliResult<Vec<_>>>()?;
    let fit_basis = match fit_overlap(&s_res, &basis_spectra) {
        Ok(f) => Some(f),
        Err(e) => {
            eprintln!("warning: basis-spectrum fit skipped: {e}");
            None
        }
    };

    let mut m = RunManifest::new("simulate");
    args.molecule.record(&mut m);
    if let Some(p) = &args.pulse {
        m.config("pulse", p);
    }
    spec.record(&mut m);
    let mut dir = OutDir::create(&args.out, m)?;
    dir.write_text("reference.csv", &s_ref.to_csv())?;
    dir.write_text("result.csv", &s_res.to_csv())?;
    dir.write_text("predicted.csv", &s_pred.to_csv())?;
    dir.write_text("reference_fid.csv", &fid_ref)?;
    dir.write_text("result_fid.csv", &fid_res)?;
    dir.write_text(
        "overlaps.csv",
        &csv(
            &["state", "coeff_result", "coeff_predicted"],
            names
                .iter()
                .zip(ov_result.iter().zip(&ov_predicted))
                .map(|(s, (r, p))| vec![s.clone(), num(*r), num(*p)]),
        ),
    )?;
    let mut fit_rows = vec![vec![
        "predicted".to_string(),
        num(fit_pred.coeffs[0]),
        num(fit_pred.stderr[0]),
    ]];
    if let Some(f) = &fit_input {
        fit_rows.push(vec!["input".to_string(), num(f.coeffs[0]), num(f.stderr[0])]);
    }
    if let Some(f) = &fit_basis {
        for (k, name) in names.iter().enumerate() {
            fit_rows.push(vec![name.clone(), num(f.coeffs[k]), num(f.stderr[k])]);
        }
    }
    dir.write_text("fit.csv", &csv(&["reference", "coefficient", "stderr"], fit_rows))?;
    let realization_name = match &realization {
        GateRealization::Exact(_) => "exact",
        GateRealization::Timed { .. } => "exact-timed",
        GateRealization::Pulse { .. } => "pulse",
    };
    dir.write_json(
        "report.json",
        &SimulateReport {
            gate: target.name.clone(),
            input: args.input.clone(),
            realization: realization_name.into(),
            gate_duration_s: realization.duration_s(),
            basis: names.clone(),
            overlaps_result: ov_result.clone(),
            overlaps_predicted: ov_predicted.clone(),
            span_residual_result: residual,
            fit_predicted: FitReport::new(vec!["predicted".into()], &fit_pred),
            fit_input: fit_input.as_ref().map(|f| FitReport::new(vec!["input".into()], f)),
            fit_basis: fit_basis.as_ref().map(|f| FitReport::new(names.clone(), f)),
        },
    )?;
    dir.finish()?;

    println!("gate: {}", target.name);
    println!("realization: {realization_name}");
    println!("gate_duration_s: {}", realization.duration_s());
    println!("overlaps (result, ideal):");
    for (k, s) in names.iter().enumerate() {
        println!("  {s:>8}: {:+.6} {:+.6}", ov_result[k], ov_predicted[k]);
    }
    println!("span_residual: {residual:.3e}");
    println!(
        "fit on predicted spectrum: c = {:.6} +- {:.2e} (residual {:.3e}, condition {:.3e})",
        fit_pred.coeffs[0], fit_pred.stderr[0], fit_pred.residual_norm, fit_pred.condition_number
    );
    if let Some(f) = &fit_input {
        println!(
            "fit on input spectrum: c = {:.6} +- {:.2e} (residual {:.3e})",
            f.coeffs[0], f.stderr[0], f.residual_norm
        );
    }
    if let Some(f) = &fit_basis {
        println!("fit on basis spectra (condition {:.3e}):", f.condition_number);
        for (k, s) in names.iter().enumerate() {
            println!("  {s:>8}: {:+.6} +- {:.2e}", f.coeffs[k], f.stderr[k]);
        }
    }

    let published = Published::load();
    if let (Some(key), Some(idx)) = (
        published_gate(args.gate.gate, args.gate.theta, &args.gate.targets.0, pair),
        matching_index(&input, basis.states()),
    ) {
        if let Some(o) = published.overlap(n, key, idx) {
            println!(
                "published experimental overlap for this gate and input: {:.2} +- {:.2} (comparison only)",
                o.value, o.stderr
            );
        }
    }
    if args.gate.gate == GateKind::UzPair {
        let inv = &published.inversion;
        println!(
            "published experimental inversion coefficient: {:.2} +- {:.2} (comparison only)",
            inv.coefficient, inv.stderr
        );
    }
    println!("wrote {}", args.out.display());
    Ok(())
}
