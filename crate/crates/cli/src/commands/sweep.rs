// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use spinact::dynamics::{parse_state, theta_sweep, SweepRealization, SweepResult};
use spinact::pulse::{gate_library, grape_optimize, ControlledSystem, GateKind};

use crate::common::{
    num, parse_angle, parse_qubits, parse_t2_ms, spectator_char, GrapeArgs, MoleculeArgs,
    QubitList,
};
use crate::commands::optimize::trace_csv;
use crate::error::{CliError, CliResult};
use crate::manifest::{csv, OutDir, RunManifest};
use crate::published::Published;

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub molecule: MoleculeArgs,
    /// Target pair of the XY rotation.
    #[arg(long, value_name = "A,B", value_parser = parse_qubits)]
    pub targets: QubitList,
    /// Input states, separated by `;`. Defaults to the XY family of the pair.
    #[arg(long, value_name = "EXPRS", allow_hyphen_values = true)]
    pub inputs: Option<String>,
    /// Projector on qubits outside the pair in the default inputs.
    #[arg(long, default_value = "0", value_parser = spectator_char)]
    pub spectator: char,
    #[arg(long, value_name = "RAD", default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta_min: f64,
    #[arg(long, value_name = "RAD", default_value = "pi/2", value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta_max: f64,
    #[arg(long, value_name = "N", default_value_t = 13)]
    pub theta_points: usize,
    /// Per-qubit T2 in ms; enables dephasing during each gate.
    #[arg(long, value_name = "LIST_MS")]
    pub t2: Option<String>,
    /// Duration of each exact gate when dephasing is on.
    #[arg(long, value_name = "X", default_value_t = 4000.0)]
    pub duration_us: f64,
    #[arg(long, value_name = "N", default_value_t = 100)]
    pub slices: usize,
    /// Synthesize one GRAPE pulse per theta instead of using exact gates.
    #[arg(long)]
    pub optimize: bool,
    #[command(flatten)]
    pub grape: GrapeArgs,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct FitRow {
    input: String,
    a: f64,
    b: f64,
    residual_a: f64,
    residual_b: f64,
}

#[derive(Serialize)]
struct SweepReport {
    pair: (usize, usize),
    realization: String,
    thetas: Vec<f64>,
    pulse_fidelities: Vec<f64>,
    fits: Vec<FitRow>,
}

fn curve_csv(r: &SweepResult<f64>) -> String {
    csv(
        &["theta_rad", "coeff_stay", "coeff_transfer", "residual_stay", "residual_transfer"],
        r.points.iter().map(|p| {
            let two = 2.0 * p.theta;
            vec![
                num(p.theta),
                num(p.stay),
                num(p.transfer),
                num(p.stay - r.a * two.cos()),
                num(p.transfer - r.b * two.sin()),
            ]
        }),
    )
}

pub fn run(args: &SweepArgs) -> CliResult<()> {
    if args.theta_points < 2 {
        return Err(CliError::usage(format!(
            "a sweep needs at least 2 theta points for the fit, got {}",
            args.theta_points
        )));
    }
    let sys = args.molecule.load()?;
    let n = sys.n_qubits();
    let pair = match args.targets.0.as_slice() {
        [a, b] => (*a, *b),
        _ => return Err(CliError::usage("--targets needs exactly two qubits")),
    };
    let exprs: Vec<String> = match &args.inputs {
        Some(s) => s.split(';').map(|e| e.trim().to_string()).filter(|e| !e.is_empty()).collect(),
        None => spinact::dynamics::xy_family_exprs(n, pair, args.spectator)?,
    };
    let steps = (args.theta_points - 1) as f64;
    let thetas: Vec<f64> = (0..args.theta_points)
        .map(|k| args.theta_min + (args.theta_max - args.theta_min) * k as f64 / steps)
        .collect();
    let t2 = args.t2.as_deref().map(|s| parse_t2_ms(s, n)).transpose()?;

    let mut m = RunManifest::new("sweep");
    args.molecule.record(&mut m);
    let mut dir = OutDir::create(&args.out, m)?;

    let ctrl = ControlledSystem::new(&sys, args.molecule.mode.into())?;
    let mut pulses = Vec::new();
    let mut fidelities = Vec::new();
    if args.optimize {
        let cfg = args.grape.resolve()?;
        args.grape.record(&cfg, &mut dir.manifest);
        for (k, &theta) in thetas.iter().enumerate() {
            let target = gate_library(GateKind::Uxy, theta, &[pair.0, pair.1], &sys)?;
            let res = grape_optimize(&ctrl, &target, &cfg)?;
            println!("theta {theta:.6}: pulse fidelity {:.6}", res.fidelity);
            dir.write_text(&format!("pulse_{k:03}.txt"), &res.pulse.to_text())?;
            dir.write_text(&format!("trace_{k:03}.csv"), &trace_csv(&res))?;
            fidelities.push(res.fidelity);
            pulses.push(res.pulse);
        }
    }
    let (realization, name) = if args.optimize {
        (
            SweepRealization::Pulses {
                ctrl: &ctrl,
                pulses: &pulses,
                t2_s: t2.clone(),
            },
            "pulse",
        )
    } else if let Some(t) = &t2 {
        dir.manifest.tolerance("gate_duration_s", args.duration_us * 1e-6);
        (
            SweepRealization::ExactDephased {
                t2_s: t.clone(),
                duration_s: args.duration_us * 1e-6,
                slices: args.slices,
            },
            "exact-dephased",
        )
    } else {
        (SweepRealization::Exact, "exact")
    };

    let published = Published::load();
    let family = spinact::dynamics::xy_family_exprs(n, pair, args.spectator)?;
    let mut fits = Vec::new();
    println!("realization: {name}");
    println!("{:>10} {:>9} {:>9} {:>10} {:>10}", "input", "A", "B", "rms_A", "rms_B");
    for (i, e) in exprs.iter().enumerate() {
        let state = parse_state::<f64>(e, n)?.with_label(e.clone());
        let r = theta_sweep(&sys, pair, &state, &thetas, &realization)?;
        dir.write_text(&format!("sweep_{i}.csv"), &curve_csv(&r))?;
        print!(
            "{e:>10} {:>9.6} {:>9.6} {:>10.3e} {:>10.3e}",
            r.a, r.b, r.residual_a, r.residual_b
        );
        let family_index = family.iter().position(|f| f == e);
        match family_index.and_then(|k| published.sweep_fit(k)) {
            Some(p) if n == 3 => println!(
                "   published experimental A = {:.3} +- {:.3}, B = {:.3} +- {:.3}",
                p.a, p.a_stderr, p.b, p.b_stderr
            ),
            _ => println!(),
        }
        fits.push(FitRow {
            input: e.clone(),
            a: r.a,
            b: r.b,
            residual_a: r.residual_a,
            residual_b: r.residual_b,
        });
    }
    dir.write_text(
        "fits.csv",
        &csv(
            &["input", "a", "b", "residual_a", "residual_b"],
            fits.iter().map(|f| {
                vec![f.input.clone(), num(f.a), num(f.b), num(f.residual_a), num(f.residual_b)]
            }),
        ),
    )?;
    dir.write_json(
        "report.json",
        &SweepReport {
            pair,
            realization: name.into(),
            thetas,
            pulse_fidelities: fidelities,
            fits,
        },
    )?;
    dir.finish()?;
    println!("wrote {}", args.out.display());
    Ok(())
}
