// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use spinact::pulse::{grape_optimize, ControlledSystem, GrapeResult};

use crate::common::{num, GateArgs, GrapeArgs, MoleculeArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::{csv, OutDir, RunManifest};

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub molecule: MoleculeArgs,
    #[command(flatten)]
    pub gate: GateArgs,
    #[command(flatten)]
    pub grape: GrapeArgs,
    /// Exit with status 1 when the achieved fidelity is below this.
    #[arg(long, value_name = "F", default_value_t = 0.99)]
    pub min_fidelity: f64,
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Serialize)]
pub struct OptimizeReport {
    pub gate: String,
    pub fidelity: f64,
    pub min_fidelity: f64,
    pub reached_goal: bool,
    pub seed: u64,
    pub restart: usize,
    pub iterations: usize,
    pub n_segments: usize,
    pub dt_s: f64,
    pub duration_s: f64,
    pub max_rf_hz: f64,
    pub max_abs_amplitude_hz: f64,
    pub channels: Vec<String>,
}

pub fn trace_csv(res: &GrapeResult<f64>) -> String {
    csv(
        &["iteration", "fidelity", "step_size"],
        res.trace
            .iter()
            .map(|r| vec![r.iteration.to_string(), num(r.fidelity), num(r.step_size)]),
    )
}

pub fn run(args: &OptimizeArgs) -> CliResult<()> {
    let sys = args.molecule.load()?;
    let target = args.gate.target(&sys)?;
    let cfg = args.grape.resolve()?;
    let ctrl = ControlledSystem::new(&sys, args.molecule.mode.into())?;

    let mut m = RunManifest::new("optimize");
    args.molecule.record(&mut m);
    args.grape.record(&cfg, &mut m);
    m.tolerance("min_fidelity", args.min_fidelity);
    let mut dir = OutDir::create(&args.out, m)?;

    let res = grape_optimize(&ctrl, &target, &cfg)?;
    dir.write_text("pulse.txt", &res.pulse.to_text())?;
    dir.write_text("trace.csv", &trace_csv(&res))?;
    let report = OptimizeReport {
        gate: target.name.clone(),
        fidelity: res.fidelity,
        min_fidelity: args.min_fidelity,
        reached_goal: res.reached_goal,
        seed: res.seed,
        restart: res.restart,
        iterations: res.iterations,
        n_segments: cfg.n_segments,
        dt_s: cfg.dt_s,
        duration_s: res.pulse.duration_s(),
        max_rf_hz: cfg.max_rf_hz,
        max_abs_amplitude_hz: res.pulse.max_abs_amplitude(),
        channels: res.pulse.labels().to_vec(),
    };
    dir.write_json("report.json", &report)?;
    dir.finish()?;

    println!("gate: {}", report.gate);
    println!("duration_s: {}", report.duration_s);
    println!("fidelity: {:.6}", report.fidelity);
    println!("seed: {} (restart {})", report.seed, report.restart);
    println!("iterations: {}", report.iterations);
    println!("wrote {}", args.out.display());
    if !(res.fidelity >= args.min_fidelity) {
        return Err(CliError::Shortfall(format!(
            "fidelity {:.6} is below --min-fidelity {}",
            res.fidelity, args.min_fidelity
        )));
    }
    Ok(())
}
