// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use spinact::dynamics::{evolve_exact_dephased, DephasingChannel};
use spinact::pulse::{
    fidelity, perturbed_fidelity, process_fidelity, read_pulse_file, ControlledSystem,
    GateTarget, Perturbation,
};
use spinact::SpinSystem64;

use crate::common::{num, parse_t2_ms, GateArgs, MoleculeArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::{csv, OutDir, RunManifest};
use crate::published::Published;

#[derive(Args, Debug)]
#[group(id = "realization", required = true, multiple = false, args = ["pulse", "exact"])]
pub struct BudgetArgs {
    #[command(flatten)]
    pub molecule: MoleculeArgs,
    #[command(flatten)]
    pub gate: GateArgs,
    /// Pulse file realizing the gate.
    #[arg(long, value_name = "PATH")]
    pub pulse: Option<PathBuf>,
    /// Evaluate the ideal unitary, spread over --duration-us for dephasing.
    #[arg(long)]
    pub exact: bool,
    /// Per-qubit T2 in ms (one value for all qubits); `inf` allowed.
    #[arg(long, value_name = "LIST_MS")]
    pub t2: String,
    /// Relative amplitude miscalibration; both signs are evaluated.
    #[arg(long, value_name = "EPS", default_value_t = 0.05)]
    pub epsilon: f64,
    /// Duration of the exact gate for the dephasing component.
    #[arg(long, value_name = "X", default_value_t = 0.0)]
    pub duration_us: f64,
    /// Time slices of the spread-out exact gate.
    #[arg(long, value_name = "N", default_value_t = 100)]
    pub slices: usize,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Budget {
    pub fidelity: f64,
    pub fidelity_dephased: f64,
    pub fidelity_scaled_plus: f64,
    pub fidelity_scaled_minus: f64,
    /// (i) loss of the unperturbed realization.
    pub pulse_loss: f64,
    /// (ii) additional loss from dephasing.
    pub relaxation_loss: f64,
    /// (iii) additional loss at the worse of the two miscalibration signs.
    pub miscalibration_loss: f64,
}

impl Budget {
    fn from_fidelities(f: f64, fd: f64, fp: f64, fm: f64) -> Self {
        Budget {
            fidelity: f,
            fidelity_dephased: fd,
            fidelity_scaled_plus: fp,
            fidelity_scaled_minus: fm,
            pulse_loss: 1.0 - f,
            relaxation_loss: f - fd,
            miscalibration_loss: (f - fp).max(f - fm),
        }
    }
}

fn exact_budget(
    sys: &SpinSystem64,
    target: &GateTarget<f64>,
    t2: &[f64],
    eps: f64,
    duration_s: f64,
    slices: usize,
) -> CliResult<Budget> {
    let f = fidelity(&target.unitary, target)?;
    let n = sys.n_qubits();
    let ch = DephasingChannel::new(t2, n)?;
    let fd = if duration_s > 0.0 && !ch.is_trivial() {
        process_fidelity(target, n, |p| evolve_exact_dephased(target, p, &ch, duration_s, slices))?
    } else {
        f
    };
    let scaled = |s: f64| -> CliResult<f64> {
        let u = target
            .fractional(s)
            .ok_or_else(|| CliError::usage("gate has no generator to rescale"))?;
        Ok(fidelity(&u, target)?)
    };
    Ok(Budget::from_fidelities(f, fd, scaled(1.0 + eps)?, scaled(1.0 - eps)?))
}

pub fn run(args: &BudgetArgs) -> CliResult<()> {
    let sys = args.molecule.load()?;
    let n = sys.n_qubits();
    let target = args.gate.target(&sys)?;
    let t2 = parse_t2_ms(&args.t2, n)?;
    if args.duration_us < 0.0 {
        return Err(CliError::usage("--duration-us must be nonnegative"));
    }

    let mut m = RunManifest::new("error-budget");
    args.molecule.record(&mut m);
    m.tolerance("epsilon", args.epsilon);
    let budget = if let Some(path) = &args.pulse {
        m.config("pulse", path);
        let ctrl = ControlledSystem::new(&sys, args.molecule.mode.into())?;
        let pulse = read_pulse_file(path)?;
        let pf = |p: Perturbation<f64>| perturbed_fidelity(&ctrl, &pulse, &target, &p);
        Budget::from_fidelities(
            pf(Perturbation::None)?,
            pf(Perturbation::Dephasing(t2.clone()))?,
            pf(Perturbation::AmplitudeScale(args.epsilon))?,
            pf(Perturbation::AmplitudeScale(-args.epsilon))?,
        )
    } else {
        m.tolerance("gate_duration_s", args.duration_us * 1e-6);
        exact_budget(&sys, &target, &t2, args.epsilon, args.duration_us * 1e-6, args.slices)?
    };

    let all = Published::load();
    let published = &all.error_budget;
    let rows = [
        ("pulse", budget.pulse_loss, published.pulse_percent),
        ("relaxation", budget.relaxation_loss, published.relaxation_percent),
        ("miscalibration", budget.miscalibration_loss, published.miscalibration_percent),
    ];
    let mut dir = OutDir::create(&args.out, m)?;
    dir.write_text(
        "budget.csv",
        &csv(
            &["component", "loss", "published_percent"],
            rows.iter()
                .map(|(c, l, p)| vec![c.to_string(), num(*l), num(*p)]),
        ),
    )?;
    dir.write_json("report.json", &budget)?;
    dir.finish()?;

    println!("gate: {}", target.name);
    println!("fidelity: {:.6}", budget.fidelity);
    println!("fidelity with dephasing: {:.6}", budget.fidelity_dephased);
    println!(
        "fidelity at amplitude 1+-{}: {:.6} / {:.6}",
        args.epsilon, budget.fidelity_scaled_plus, budget.fidelity_scaled_minus
    );
    println!("{:<22} {:>12} {:>10}   published experimental split (comparison only)", "component", "loss", "percent");
    for (label, (_, l, p)) in ["(i) pulse", "(ii) relaxation", "(iii) miscalibration"]
        .iter()
        .zip(rows)
    {
        println!("{label:<22} {l:>12.6} {:>9.2}%   {p:.0}%", 100.0 * l);
    }
    println!(
        "published experimental T2 range: {}-{} ms (comparison only)",
        all.relaxation.t2_ms_min, all.relaxation.t2_ms_max
    );
    println!("wrote {}", args.out.display());
    Ok(())
}
