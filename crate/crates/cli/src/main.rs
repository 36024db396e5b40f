// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! `spinact`: controllability analysis, pulse synthesis and simulated NMR
//! readout for actuator-controlled spin registers.

mod commands;
mod common;
mod error;
mod manifest;
mod published;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{budget, controllability, optimize, simulate, sweep};

#[derive(Parser, Debug)]
#[command(name = "spinact", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dynamical Lie algebra of the register and subsystem controllability.
    Controllability(controllability::ControllabilityArgs),
    /// Synthesize an actuator pulse for a target gate with GRAPE.
    Optimize(optimize::OptimizeArgs),
    /// Apply a gate to a deviation state and simulate the spectra.
    Simulate(simulate::SimulateArgs),
    /// Sweep the XY rotation angle and fit the transfer curves.
    Sweep(sweep::SweepArgs),
    /// Split the infidelity of a gate into pulse, relaxation and
    /// miscalibration components.
    ErrorBudget(budget::BudgetArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Controllability(a) => controllability::run(a),
        Command::Optimize(a) => optimize::run(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Sweep(a) => sweep::run(a),
        Command::ErrorBudget(a) => budget::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
