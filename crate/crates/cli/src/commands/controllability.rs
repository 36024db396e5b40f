// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use spinact::lie_algebra::{
    label_basis, membership, sector_support, subsystem_full_control, system_algebra,
    DEFAULT_CLOSURE_TOL, DEFAULT_MEMBERSHIP_TOL,
};
use spinact::pauli::PauliSum;

use crate::common::MoleculeArgs;
use crate::error::CliResult;
use crate::manifest::{csv, OutDir, RunManifest};

#[derive(Args, Debug)]
pub struct ControllabilityArgs {
    #[command(flatten)]
    pub molecule: MoleculeArgs,
    /// Gram-Schmidt rejection threshold of the closure.
    #[arg(long, default_value_t = DEFAULT_CLOSURE_TOL)]
    pub tol: f64,
    /// Pauli expressions to test for membership, e.g. `EYX-EXY`.
    #[arg(long = "check", value_name = "EXPR", allow_hyphen_values = true)]
    pub checks: Vec<String>,
    /// Also compute the largest closure residual over all basis pairs
    /// (quadratic in the dimension).
    #[arg(long)]
    pub verify: bool,
    /// Also write the basis and a JSON report here.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Verdict {
    qubits: Vec<usize>,
    full_control: bool,
}

#[derive(Serialize)]
struct Check {
    expr: String,
    in_algebra: bool,
    residual: f64,
}

#[derive(Serialize)]
struct Report {
    n_qubits: usize,
    n_generators: usize,
    dimension: usize,
    closure_defect: Option<f64>,
    verdicts: Vec<Verdict>,
    checks: Vec<Check>,
}

fn fmt_set(s: &BTreeSet<usize>) -> String {
    let v: Vec<String> = s.iter().map(|q| q.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

pub fn run(args: &ControllabilityArgs) -> CliResult<()> {
    let sys = args.molecule.load()?;
    let n = sys.n_qubits();
    let mode = args.molecule.mode.into();
    let basis = system_algebra(&sys, mode, args.tol)?;
    let n_generators = 1 + sys.controls(mode)?.len();

    println!("qubits: {n}");
    println!("actuators: {}", fmt_set(sys.actuators()));
    println!("targets: {}", fmt_set(sys.targets()));
    println!("generators: {n_generators}");
    println!("dimension: {}", basis.dim());
    let defect = args.verify.then(|| basis.closure_defect());
    if let Some(d) = defect {
        println!("closure_defect: {d:.3e}");
    }

    let mut sets = vec![sys.actuators().clone()];
    if !sys.targets().is_empty() {
        sets.push(sys.targets().clone());
    }
    sets.push((1..=n).collect());
    let mut verdicts = Vec::new();
    for s in sets {
        let full = subsystem_full_control(&basis, &s)?;
        println!("full_control {}: {full}", fmt_set(&s));
        verdicts.push(Verdict {
            qubits: s.into_iter().collect(),
            full_control: full,
        });
    }

    let mut checks = Vec::new();
    for expr in &args.checks {
        let op = PauliSum::<f64>::parse(expr, n)?.to_matrix();
        let m = membership(&op, &basis)?;
        println!(
            "member {expr}: {} (residual {:.3e})",
            m.in_algebra, m.residual
        );
        checks.push(Check {
            expr: expr.clone(),
            in_algebra: m.in_algebra,
            residual: m.residual,
        });
    }

    let labels = label_basis(&basis);
    let rendered: Vec<String> = labels
        .iter()
        .map(|terms| {
            terms
                .iter()
                .map(|p| format!("{:+.4}*{}", p.coefficient, p.label()))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    println!("basis:");
    for (k, r) in rendered.iter().enumerate() {
        println!("  {:>4}: {r}", k + 1);
    }

    if let Some(out) = &args.out {
        let mut m = RunManifest::new("controllability");
        args.molecule.record(&mut m);
        m.tolerance("closure", args.tol)
            .tolerance("membership", DEFAULT_MEMBERSHIP_TOL);
        let mut dir = OutDir::create(out, m)?;
        dir.write_text(
            "basis.csv",
            &csv(
                &["index", "terms"],
                rendered
                    .iter()
                    .enumerate()
                    .map(|(k, r)| vec![(k + 1).to_string(), r.clone()]),
            ),
        )?;
        let sectors = sector_support(&basis, sys.actuators());
        dir.write_text(
            "sectors.csv",
            &csv(
                &["actuator_part", "target_parts"],
                sectors.iter().map(|(a, t)| {
                    vec![a.clone(), t.iter().cloned().collect::<Vec<_>>().join(" ")]
                }),
            ),
        )?;
        dir.write_json(
            "report.json",
            &Report {
                n_qubits: n,
                n_generators,
                dimension: basis.dim(),
                closure_defect: defect,
                verdicts,
                checks,
            },
        )?;
        dir.finish()?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
