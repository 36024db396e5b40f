// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Gradient ascent pulse engineering.
//!
//! Gradients are exact. Each segment Hamiltonian `H_j = V diag(l) V^dagger` is
//! diagonalized and the derivative of `exp(-i H_j dt)` along a control `C` is
//! `V (Gamma o V^dagger C V) V^dagger` with
//! `Gamma_ab = -i dt exp(-i (l_a + l_b) dt / 2) sinc((l_a - l_b) dt / 2)`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fidelity, ControlledSystem, GateTarget, PulseSequence};
use crate::error::{Error, Result};
use crate::linalg::{identity, sub_block, trace_product, unitarity_error, HermitianEigen, Operator};
use crate::scalar::{c, cis, cre, from_usize, lit, norm_sqr, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UpdateRule<T: Real> {
    /// Backtracking line search: the step grows after every accepted move
    /// and halves on rejection, so fidelity never decreases.
    LineSearch,
    /// Fixed step, the largest per-amplitude change in Hz. Not monotone.
    FixedStep(T),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrapeConfig<T: Real> {
    pub n_segments: usize,
    pub dt_s: T,
    pub max_rf_hz: T,
    pub max_iters: usize,
    pub fidelity_goal: T,
    pub seed: u64,
    pub restarts: usize,
    /// Initial amplitudes are uniform in `+-init_fraction * max_rf_hz`.
    pub init_fraction: T,
    pub update: UpdateRule<T>,
    /// First trial step (largest amplitude change, Hz). Defaults to
    /// `0.05 * max_rf_hz`.
    pub initial_step_hz: Option<T>,
    /// Line search gives up once its step falls below this (Hz).
    pub min_step_hz: T,
}

impl<T: Real> Default for GrapeConfig<T> {
    fn default() -> Self {
        GrapeConfig {
            n_segments: 200,
            dt_s: lit(25e-6),
            max_rf_hz: lit(10e3),
            max_iters: 2000,
            fidelity_goal: lit(0.999),
            seed: 1,
            restarts: 5,
            init_fraction: lit(0.1),
            update: UpdateRule::LineSearch,
            initial_step_hz: None,
            min_step_hz: lit(1e-6),
        }
    }
}

impl<T: Real> GrapeConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_segments == 0 {
            return Err(Error::Infeasible("zero segments".into()));
        }
        if !(self.dt_s > T::zero()) {
            return Err(Error::Infeasible("segment duration must be positive".into()));
        }
        if !(self.max_rf_hz > T::zero()) {
            return Err(Error::Infeasible("max_rf_hz must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Infeasible("at least one restart is required".into()));
        }
        if let UpdateRule::FixedStep(s) = self.update {
            if !(s > T::zero()) {
                return Err(Error::Infeasible("fixed step must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow<T> {
    pub iteration: usize,
    pub fidelity: T,
    pub step_size: T,
}

#[derive(Clone, Debug)]
pub struct GrapeResult<T: Real> {
    pub pulse: PulseSequence<T>,
    pub fidelity: T,
    /// Per-iteration trace of the returned restart.
    pub trace: Vec<TraceRow<T>>,
    /// Seed of the returned restart.
    pub seed: u64,
    pub restart: usize,
    pub iterations: usize,
    pub reached_goal: bool,
}

/// Fidelity of a pulse against a target, with its exact gradient.
///
/// Propagators are block diagonal over the invariant subspaces of the drift
/// and controls, so only the matching diagonal blocks of the target enter
/// `Tr(U_t^dagger U)` and all work is done per block.
pub struct GrapeObjective<'a, T: Real> {
    ctrl: &'a ControlledSystem<T>,
    target: &'a GateTarget<T>,
    target_dag: Vec<Operator<T>>,
    dt_s: T,
}

fn sinc<T: Real>(x: T) -> T {
    if x.abs() < lit(1e-4) {
        T::one() - x * x / lit(6.0)
    } else {
        x.sin() / x
    }
}

impl<'a, T: Real> GrapeObjective<'a, T> {
    pub fn new(ctrl: &'a ControlledSystem<T>, target: &'a GateTarget<T>, dt_s: T) -> Result<Self> {
        if target.dim() != ctrl.dim() {
            return Err(Error::dim(format!(
                "target acts on dimension {}, system on {}",
                target.dim(),
                ctrl.dim()
            )));
        }
        if !(unitarity_error(&target.unitary) <= lit(1e-10)) {
            return Err(Error::input("target is not unitary"));
        }
        let target_dag = ctrl
            .blocks()
            .iter()
            .map(|b| sub_block(&target.unitary, &b.idx).adjoint())
            .collect();
        Ok(GrapeObjective {
            ctrl,
            target,
            target_dag,
            dt_s,
        })
    }

    fn check(&self, amps: &DMatrix<T>) -> Result<()> {
        if amps.ncols() != self.ctrl.channels().len() {
            return Err(Error::dim(format!(
                "{} amplitude columns for {} channels",
                amps.ncols(),
                self.ctrl.channels().len()
            )));
        }
        Ok(())
    }

    fn score(&self, g: num_complex::Complex<T>) -> T {
        let d = from_usize::<T>(self.ctrl.dim());
        if self.target.phase_insensitive {
            norm_sqr(g) / (d * d)
        } else {
            let re = g.re.max(T::zero());
            re * re / (d * d)
        }
    }

    pub fn fidelity(&self, amps: &DMatrix<T>) -> Result<T> {
        self.check(amps)?;
        let mut g = cre(T::zero());
        for (b, tdag) in self.ctrl.blocks().iter().zip(&self.target_dag) {
            let mut u = identity(b.idx.len());
            for j in 0..amps.nrows() {
                let h = b.hamiltonian(amps.row(j).iter().copied());
                u = HermitianEigen::new(&h).propagator(self.dt_s) * u;
            }
            g += trace_product(tdag, &u);
        }
        Ok(self.score(g))
    }

    /// Fidelity and `dF/du_jk` (per Hz) for every segment and channel.
    pub fn fidelity_and_gradient(&self, amps: &DMatrix<T>) -> Result<(T, DMatrix<T>)> {
        self.check(amps)?;
        let n = amps.nrows();
        let dt = self.dt_s;
        let mut per_block = Vec::with_capacity(self.target_dag.len());
        let mut g = cre(T::zero());
        for (b, tdag) in self.ctrl.blocks().iter().zip(&self.target_dag) {
            let dim = b.idx.len();
            let mut eigs = Vec::with_capacity(n);
            let mut props = Vec::with_capacity(n);
            for j in 0..n {
                let e = HermitianEigen::new(&b.hamiltonian(amps.row(j).iter().copied()));
                props.push(e.propagator(dt));
                eigs.push(e);
            }
            let mut fwd: Vec<Operator<T>> = Vec::with_capacity(n + 1);
            fwd.push(identity(dim));
            for j in 0..n {
                let next = &props[j] * &fwd[j];
                fwd.push(next);
            }
            g += trace_product(tdag, &fwd[n]);
            per_block.push((eigs, props, fwd));
        }
        let f = self.score(g);
        let d = from_usize::<T>(self.ctrl.dim());
        let pref = lit::<T>(2.0) / (d * d);
        let w = if self.target.phase_insensitive {
            g.conj()
        } else {
            cre(g.re.max(T::zero()))
        };
        let half: T = lit(0.5);
        let mut grad = DMatrix::zeros(n, amps.ncols());
        for ((b, tdag), (eigs, props, fwd)) in
            self.ctrl.blocks().iter().zip(&self.target_dag).zip(&per_block)
        {
            let dim = b.idx.len();
            let mut back = tdag.clone();
            let mut q = Operator::<T>::zeros(dim, dim);
            for j in (0..n).rev() {
                let v = &eigs[j].vectors;
                let vd = v.adjoint();
                let m = &fwd[j] * &back;
                let mt = &vd * (m * v);
                let lam = &eigs[j].values;
                for a in 0..dim {
                    for c2 in 0..dim {
                        let gamma = cis(-(lam[a] + lam[c2]) * dt * half)
                            * c(T::zero(), -dt * sinc((lam[a] - lam[c2]) * dt * half));
                        // Q = conj(M~^T o Gamma), folded in directly.
                        q[(a, c2)] = (mt[(c2, a)] * gamma).conj();
                    }
                }
                let s = v * (&q * &vd);
                for (k, ch) in b.channels.iter().enumerate() {
                    let mut acc = cre(T::zero());
                    for (cm, sm) in ch.iter().zip(s.iter()) {
                        if cm.re != T::zero() || cm.im != T::zero() {
                            acc += *cm * sm.conj();
                        }
                    }
                    grad[(j, k)] += pref * (w * acc * cre(T::pi())).re;
                }
                back = &back * &props[j];
            }
        }
        Ok((f, grad))
    }
}

fn clip<T: Real>(m: &mut DMatrix<T>, limit: T) {
    for v in m.iter_mut() {
        *v = v.max(-limit).min(limit);
    }
}

fn run_once<T: Real>(
    obj: &GrapeObjective<'_, T>,
    cfg: &GrapeConfig<T>,
    mut u: DMatrix<T>,
) -> Result<(DMatrix<T>, T, Vec<TraceRow<T>>, usize)> {
    let limit = cfg.max_rf_hz;
    clip(&mut u, limit);
    let mut f = obj.fidelity(&u)?;
    let mut trace = vec![TraceRow {
        iteration: 0,
        fidelity: f,
        step_size: T::zero(),
    }];
    let mut step = cfg.initial_step_hz.unwrap_or(limit * lit(0.05));
    let mut iterations = 0;
    while iterations < cfg.max_iters && f < cfg.fidelity_goal {
        let (f_here, mut grad) = obj.fidelity_and_gradient(&u)?;
        f = f_here;
        // Project out components that push through an amplitude limit.
        for (gv, uv) in grad.iter_mut().zip(u.iter()) {
            if (*uv >= limit && *gv > T::zero()) || (*uv <= -limit && *gv < T::zero()) {
                *gv = T::zero();
            }
        }
        let gmax = grad.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
        if gmax == T::zero() {
            break;
        }
        let dir = grad / gmax;
        iterations += 1;
        match cfg.update {
            UpdateRule::FixedStep(s) => {
                u += &dir * s;
                clip(&mut u, limit);
                f = obj.fidelity(&u)?;
                trace.push(TraceRow {
                    iteration: iterations,
                    fidelity: f,
                    step_size: s,
                });
            }
            UpdateRule::LineSearch => {
                let mut accepted = false;
                while step >= cfg.min_step_hz {
                    let mut trial = &u + &dir * step;
                    clip(&mut trial, limit);
                    let ft = obj.fidelity(&trial)?;
                    if ft > f {
                        u = trial;
                        f = ft;
                        trace.push(TraceRow {
                            iteration: iterations,
                            fidelity: f,
                            step_size: step,
                        });
                        step = (step * lit(2.0)).min(limit);
                        accepted = true;
                        break;
                    }
                    step *= lit(0.5);
                }
                if !accepted {
                    break;
                }
            }
        }
    }
    Ok((u, f, trace, iterations))
}

/// Synthesizes a pulse for `target` by gradient ascent from seeded random
/// starts, returning the best restart. Restarts stop early once one of them
/// reaches `fidelity_goal`.
pub fn grape_optimize<T: Real>(
    ctrl: &ControlledSystem<T>,
    target: &GateTarget<T>,
    cfg: &GrapeConfig<T>,
) -> Result<GrapeResult<T>> {
    cfg.validate()?;
    let obj = GrapeObjective::new(ctrl, target, cfg.dt_s)?;
    let k = ctrl.channels().len();
    let mut best: Option<GrapeResult<T>> = None;
    for r in 0..cfg.restarts {
        let seed = cfg.seed.wrapping_add(r as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = to_f64_lossy(cfg.init_fraction * cfg.max_rf_hz);
        let u0 = DMatrix::from_fn(cfg.n_segments, k, |_, _| {
            lit::<T>(rng.random_range(-1.0..=1.0) * scale)
        });
        let (u, f, trace, iterations) = run_once(&obj, cfg, u0)?;
        let better = best.as_ref().map_or(true, |b| f > b.fidelity);
        if better {
            let pulse = PulseSequence::new(cfg.dt_s, ctrl.labels(), u)?;
            best = Some(GrapeResult {
                pulse,
                fidelity: f,
                trace,
                seed,
                restart: r,
                iterations,
                reached_goal: f >= cfg.fidelity_goal,
            });
        }
        if best.as_ref().is_some_and(|b| b.reached_goal) {
            break;
        }
    }
    let best = best.expect("at least one restart ran");
    debug_assert!({
        let check = fidelity(&ctrl.propagate(&best.pulse)?, target)?;
        (check - best.fidelity).abs() <= lit(1e-9)
    });
    Ok(best)
}

fn to_f64_lossy<T: Real>(x: T) -> f64 {
    crate::scalar::to_f64(x)
}
