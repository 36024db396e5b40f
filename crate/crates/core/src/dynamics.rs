// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Deviation density matrices, gate action, transverse dephasing and the
//! XY-rotation state laws.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, frobenius, hermiticity_error, trace_product, unitarity_error, Operator,
};
use crate::pauli::{matrix_to_pauli, PauliString, PauliSum};
use crate::pulse::{ControlledSystem, GateKind, GateTarget, PulseSequence};
use crate::scalar::{c, cre, from_usize, lit, norm_sqr, Real};
use crate::spin_system::SpinSystem;

/// Traceless Hermitian part of a density operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationState<T: Real> {
    matrix: Operator<T>,
    label: Option<String>,
}

impl<T: Real> DeviationState<T> {
    /// Checks Hermiticity (1e-10) and tracelessness (1e-9).
    pub fn new(matrix: Operator<T>) -> Result<Self> {
        crate::linalg::is_power_of_two_dim(&matrix)?;
        let herm = hermiticity_error(&matrix);
        if !(herm <= lit(1e-10)) {
            return Err(Error::input(format!(
                "deviation state is not Hermitian (error {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if !(norm_sqr(tr).sqrt() <= lit(1e-9)) {
            return Err(Error::input(format!(
                "deviation state has trace {}",
                tr.re
            )));
        }
        Ok(DeviationState {
            matrix,
            label: None,
        })
    }

    /// Wraps a matrix without validation.
    pub fn from_matrix_unchecked(matrix: Operator<T>) -> Self {
        DeviationState {
            matrix,
            label: None,
        }
    }

    /// Removes the identity component of a Hermitian matrix.
    pub fn traceless_part(mut matrix: Operator<T>) -> Result<Self> {
        let dim = crate::linalg::is_power_of_two_dim(&matrix).map(|n| 1usize << n)?;
        let shift = matrix.trace() / cre(from_usize::<T>(dim));
        for i in 0..dim {
            matrix[(i, i)] -= shift;
        }
        DeviationState::new(matrix)
    }

    pub fn zero(n_qubits: usize) -> Self {
        DeviationState::from_matrix_unchecked(Operator::zeros(1 << n_qubits, 1 << n_qubits))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn matrix(&self) -> &Operator<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Operator<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// Hilbert-Schmidt norm `sqrt(Tr(rho^2))`.
    pub fn hs_norm(&self) -> T {
        frobenius(&self.matrix)
    }

    /// `Tr(self * other)`, real for Hermitian arguments.
    pub fn overlap(&self, other: &DeviationState<T>) -> T {
        trace_product(&self.matrix, &other.matrix).re
    }

    /// `U rho U^dagger`. The label is dropped.
    pub fn conjugated(&self, u: &Operator<T>) -> Self {
        DeviationState::from_matrix_unchecked(u * &self.matrix * u.adjoint())
    }

    /// Entrywise product with a real mask.
    pub fn apply_mask(&mut self, mask: &DMatrix<T>) {
        self.matrix.zip_apply(mask, |z, m| *z *= cre(m));
    }

    pub fn scaled(&self, s: T) -> Self {
        DeviationState::from_matrix_unchecked(self.matrix.map(|z| z * cre(s)))
    }

    pub fn add(&self, other: &DeviationState<T>) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::dim("states act on different registers"));
        }
        Ok(DeviationState::from_matrix_unchecked(&self.matrix + &other.matrix))
    }

    pub fn pauli_terms(&self, cutoff: T) -> Result<Vec<PauliString<T>>> {
        matrix_to_pauli(&self.matrix, cutoff)
    }
}

/// Parses a product-operator expression such as `"10X"` or `"EYE+EEY"`
/// over `{E, X, Y, Z, 0, 1}` with `0 = (E + Z)/2`, `1 = (E - Z)/2`, and
/// keeps its traceless part.
pub fn parse_state<T: Real>(expr: &str, n_qubits: usize) -> Result<DeviationState<T>> {
    let sum: PauliSum<T> = PauliSum::parse(expr, n_qubits)?;
    Ok(DeviationState::from_matrix_unchecked(sum.without_identity().to_matrix())
        .with_label(expr.trim()))
}

/// `U rho U^dagger`.
pub fn apply_gate<T: Real>(state: &DeviationState<T>, u: &Operator<T>) -> Result<DeviationState<T>> {
    if u.shape() != state.matrix.shape() {
        return Err(Error::dim(format!(
            "gate is {}x{}, state is {}x{}",
            u.nrows(),
            u.ncols(),
            state.dim(),
            state.dim()
        )));
    }
    let err = unitarity_error(u);
    if !(err <= lit(1e-9)) {
        return Err(Error::input(format!("gate is not unitary (error {err:e})")));
    }
    Ok(state.conjugated(u))
}

/// Named, mutually orthogonal states closed under a gate family.
#[derive(Clone, Debug)]
pub struct StateBasis<T: Real> {
    names: Vec<String>,
    states: Vec<DeviationState<T>>,
}

impl<T: Real> StateBasis<T> {
    /// Rejects zero states and pairs with normalized overlap above 1e-9.
    pub fn new(named: Vec<(String, DeviationState<T>)>) -> Result<Self> {
        let (names, states): (Vec<_>, Vec<_>) = named.into_iter().unzip();
        if states.is_empty() {
            return Err(Error::input("state basis is empty"));
        }
        let norms: Vec<T> = states.iter().map(|s| s.hs_norm()).collect();
        for (i, s) in states.iter().enumerate() {
            if s.dim() != states[0].dim() {
                return Err(Error::dim("basis states act on different registers"));
            }
            if !(norms[i] > lit(1e-12)) {
                return Err(Error::input(format!("basis state '{}' is zero", names[i])));
            }
        }
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                let ov = states[i].overlap(&states[j]).abs() / (norms[i] * norms[j]);
                if ov > lit(1e-9) {
                    return Err(Error::input(format!(
                        "basis states '{}' and '{}' are not orthogonal (overlap {ov:e})",
                        names[i], names[j]
                    )));
                }
            }
        }
        Ok(StateBasis { names, states })
    }

    pub fn from_exprs(exprs: &[&str], n_qubits: usize) -> Result<Self> {
        let named = exprs
            .iter()
            .map(|e| Ok((e.to_string(), parse_state(e, n_qubits)?)))
            .collect::<Result<Vec<_>>>()?;
        StateBasis::new(named)
    }

    /// `{0_a X_b, -0_a Y_b, X_a 0_b, -Y_a 0_b}` for the pair `(a, b)`, with
    /// every other qubit in the projector `spectator` (`'0'` or `'1'`).
    pub fn xy_family(n_qubits: usize, pair: (usize, usize), spectator: char) -> Result<Self> {
        let exprs = xy_family_exprs(n_qubits, pair, spectator)?;
        let refs: Vec<&str> = exprs.iter().map(String::as_str).collect();
        StateBasis::from_exprs(&refs, n_qubits)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn states(&self) -> &[DeviationState<T>] {
        &self.states
    }

    pub fn get(&self, name: &str) -> Option<&DeviationState<T>> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.states[i])
    }
}

/// Expressions of [`StateBasis::xy_family`].
pub fn xy_family_exprs(n_qubits: usize, pair: (usize, usize), spectator: char) -> Result<Vec<String>> {
    let (a, b) = pair;
    if a == 0 || b == 0 || a > n_qubits || b > n_qubits || a == b {
        return Err(Error::input(format!(
            "pair ({a}, {b}) is not two distinct qubits of a {n_qubits}-qubit register"
        )));
    }
    if !matches!(spectator, '0' | '1' | 'E') {
        return Err(Error::input(format!("spectator symbol '{spectator}' not in 0, 1, E")));
    }
    let build = |sa: char, sb: char, neg: bool| {
        let mut s: Vec<char> = vec![spectator; n_qubits];
        s[a - 1] = sa;
        s[b - 1] = sb;
        let body: String = s.into_iter().collect();
        if neg {
            format!("-{body}")
        } else {
            body
        }
    };
    Ok(vec![
        build('0', 'X', false),
        build('0', 'Y', true),
        build('X', '0', false),
        build('Y', '0', true),
    ])
}

/// `c_i = Tr(B_i rho) / Tr(B_i B_i)`.
pub fn overlap_coeffs<T: Real>(state: &DeviationState<T>, basis: &StateBasis<T>) -> Result<Vec<T>> {
    basis
        .states
        .iter()
        .zip(&basis.names)
        .map(|(b, name)| {
            if b.dim() != state.dim() {
                return Err(Error::dim("state and basis act on different registers"));
            }
            let nn = b.overlap(b);
            if !(nn > T::zero()) {
                return Err(Error::input(format!("basis state '{name}' is zero")));
            }
            Ok(b.overlap(state) / nn)
        })
        .collect()
}

/// Relative norm of the part of `state` outside the span of `basis`.
pub fn span_residual<T: Real>(state: &DeviationState<T>, basis: &StateBasis<T>) -> Result<T> {
    let coeffs = overlap_coeffs(state, basis)?;
    let mut rest = state.matrix.clone();
    for (ci, b) in coeffs.iter().zip(&basis.states) {
        rest -= b.matrix.map(|z| z * cre(*ci));
    }
    let n = state.hs_norm();
    Ok(if n > T::zero() { frobenius(&rest) / n } else { T::zero() })
}

/// Independent transverse dephasing of every qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct DephasingChannel<T: Real> {
    rates: Vec<T>,
}

impl<T: Real> DephasingChannel<T> {
    /// One T2 (seconds) per qubit. Infinite values switch dephasing off.
    pub fn new(t2_s: &[T], n_qubits: usize) -> Result<Self> {
        if t2_s.len() != n_qubits {
            return Err(Error::input(format!(
                "{} T2 values for {n_qubits} qubits",
                t2_s.len()
            )));
        }
        let rates = t2_s
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                if !(t > T::zero()) {
                    return Err(Error::input(format!(
                        "T2 of qubit {} must be positive, got {t}",
                        i + 1
                    )));
                }
                Ok(if t.is_finite() { T::one() / t } else { T::zero() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DephasingChannel { rates })
    }

    pub fn n_qubits(&self) -> usize {
        self.rates.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.rates.iter().all(|r| *r == T::zero())
    }

    /// Entry `(r, c)` is `exp(-duration * sum 1/T2_q)` over the qubits on
    /// which `r` and `c` differ; a Pauli string is damped by the qubits
    /// carrying X or Y, which are exactly those.
    pub fn mask(&self, duration_s: T) -> DMatrix<T> {
        let n = self.rates.len();
        let dim = 1usize << n;
        let per_flip: Vec<T> = (0..dim)
            .map(|f| {
                let mut rate = T::zero();
                for (q, r) in self.rates.iter().enumerate() {
                    if f & (1 << (n - 1 - q)) != 0 {
                        rate += *r;
                    }
                }
                (-(rate * duration_s)).exp()
            })
            .collect();
        DMatrix::from_fn(dim, dim, |r, c| per_flip[r ^ c])
    }

    pub fn apply(&self, state: &DeviationState<T>, duration_s: T) -> Result<DeviationState<T>> {
        if state.n_qubits() != self.n_qubits() {
            return Err(Error::dim("dephasing channel and state sizes differ"));
        }
        if !(duration_s >= T::zero()) {
            return Err(Error::input("dephasing duration must be nonnegative"));
        }
        let mut out = state.clone();
        if duration_s > T::zero() && !self.is_trivial() {
            out.apply_mask(&self.mask(duration_s));
        }
        Ok(out)
    }
}

/// Free transverse decay of `state` over `duration_s`.
pub fn apply_dephasing<T: Real>(
    state: &DeviationState<T>,
    t2_s: &[T],
    duration_s: T,
) -> Result<DeviationState<T>> {
    DephasingChannel::new(t2_s, state.n_qubits())?.apply(state, duration_s)
}

/// Runs a pulse on a state segment by segment, dephasing after each one
/// when a channel is given.
pub fn evolve_under_pulse<T: Real>(
    ctrl: &ControlledSystem<T>,
    pulse: &PulseSequence<T>,
    state: &DeviationState<T>,
    dephasing: Option<&DephasingChannel<T>>,
) -> Result<DeviationState<T>> {
    if state.dim() != ctrl.dim() {
        return Err(Error::dim("state and system sizes differ"));
    }
    let steps = ctrl.segment_propagators(pulse)?;
    let mask = dephasing
        .filter(|d| !d.is_trivial())
        .map(|d| d.mask(pulse.dt_s()));
    let mut rho = state.clone();
    for u in &steps {
        rho = rho.conjugated(u);
        if let Some(m) = &mask {
            rho.apply_mask(m);
        }
    }
    Ok(rho)
}

/// Exact gate spread over `slices` equal fractions, each followed by
/// `duration_s / slices` of dephasing.
pub fn evolve_exact_dephased<T: Real>(
    target: &GateTarget<T>,
    state: &DeviationState<T>,
    channel: &DephasingChannel<T>,
    duration_s: T,
    slices: usize,
) -> Result<DeviationState<T>> {
    if slices == 0 {
        return Err(Error::input("at least one slice is required"));
    }
    if !(duration_s >= T::zero()) {
        return Err(Error::input("duration must be nonnegative"));
    }
    if channel.is_trivial() || duration_s == T::zero() {
        return apply_gate(state, &target.unitary);
    }
    let frac = T::one() / from_usize(slices);
    let step = target
        .fractional(frac)
        .ok_or_else(|| Error::input("target has no generator to slice"))?;
    let mask = channel.mask(duration_s * frac);
    let mut rho = state.clone();
    for _ in 0..slices {
        rho = apply_gate(&rho, &step)?;
        rho.apply_mask(&mask);
    }
    Ok(rho)
}

/// A way of carrying out a gate on a state.
#[derive(Clone, Copy, Debug)]
pub enum GateRealization<'a, T: Real> {
    /// The ideal unitary, instantaneous.
    Exact(&'a GateTarget<T>),
    /// The ideal unitary spread over `duration_s` in `slices` steps.
    Timed {
        target: &'a GateTarget<T>,
        duration_s: T,
        slices: usize,
    },
    /// A control pulse.
    Pulse {
        ctrl: &'a ControlledSystem<T>,
        pulse: &'a PulseSequence<T>,
    },
}

impl<T: Real> GateRealization<'_, T> {
    pub fn duration_s(&self) -> T {
        match self {
            GateRealization::Exact(_) => T::zero(),
            GateRealization::Timed { duration_s, .. } => *duration_s,
            GateRealization::Pulse { pulse, .. } => pulse.duration_s(),
        }
    }

    /// Applies the gate, dephasing during it when a channel is given.
    pub fn apply(
        &self,
        state: &DeviationState<T>,
        dephasing: Option<&DephasingChannel<T>>,
    ) -> Result<DeviationState<T>> {
        match (self, dephasing) {
            (GateRealization::Exact(t), _) => apply_gate(state, &t.unitary),
            (GateRealization::Timed { target, .. }, None) => apply_gate(state, &target.unitary),
            (
                GateRealization::Timed {
                    target,
                    duration_s,
                    slices,
                },
                Some(ch),
            ) => evolve_exact_dephased(target, state, ch, *duration_s, *slices),
            (GateRealization::Pulse { ctrl, pulse }, ch) => {
                evolve_under_pulse(ctrl, pulse, state, ch)
            }
        }
    }
}

/// Fidelity between the two diagonal evolutions over time `tau_s` on the
/// pair `(a, b)`: `exp(i pi tau (-nu_a Z_a - nu_b Z_b + D_ab Z_a Z_b))` and
/// `exp(-i pi tau (nu_a Z_a + nu_b Z_b))`. Equals `cos^2(pi tau D_ab)`.
pub fn commensurate_fidelity<T: Real>(
    sys: &SpinSystem<T>,
    pair: (usize, usize),
    tau_s: T,
) -> Result<T> {
    let (a, b) = pair;
    let d = pair_coupling(sys, pair)?;
    let (na, nb) = (sys.shift_hz(a), sys.shift_hz(b));
    let pt = T::pi() * tau_s;
    let mut tr: Complex<T> = cre(T::zero());
    for za in [T::one(), -T::one()] {
        for zb in [T::one(), -T::one()] {
            let left = pt * (-na * za - nb * zb + d * za * zb);
            let right = -pt * (na * za + nb * zb);
            // conj(left) * right
            tr += c((right - left).cos(), (right - left).sin());
        }
    }
    Ok(norm_sqr(tr) / lit(16.0))
}

fn pair_coupling<T: Real>(sys: &SpinSystem<T>, (a, b): (usize, usize)) -> Result<T> {
    let n = sys.n_qubits();
    if a == 0 || b == 0 || a > n || b > n || a == b {
        return Err(Error::input(format!("({a}, {b}) is not a qubit pair")));
    }
    let d = sys.dipolar_hz(a, b);
    if d == T::zero() {
        return Err(Error::input(format!("qubits {a} and {b} are not coupled")));
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommensurateReport<T> {
    pub tau_s: T,
    pub fidelity: T,
    pub holds: bool,
}

/// Checks the commensurate evolution time `tau = m / D_ab`, at which the
/// coupling part of the free evolution reduces to a global phase.
pub fn commensurate_check<T: Real>(
    sys: &SpinSystem<T>,
    pair: (usize, usize),
    m: u32,
) -> Result<CommensurateReport<T>> {
    let d = pair_coupling(sys, pair)?;
    let tau_s = lit::<T>(f64::from(m)) / d.abs();
    let fidelity = commensurate_fidelity(sys, pair, tau_s)?;
    Ok(CommensurateReport {
        tau_s,
        fidelity,
        holds: fidelity >= T::one() - lit(1e-9),
    })
}

/// Purity `Tr(rho_S^2)` of the reduced state of a pure register state on
/// the 1-based qubit set `keep`.
pub fn reduced_purity<T: Real>(
    psi: &DVector<Complex<T>>,
    keep: &BTreeSet<usize>,
    n_qubits: usize,
) -> Result<T> {
    let dim = 1usize << n_qubits;
    if psi.len() != dim {
        return Err(Error::dim(format!(
            "state has {} amplitudes, register needs {dim}",
            psi.len()
        )));
    }
    if keep.iter().any(|&q| q == 0 || q > n_qubits) {
        return Err(Error::input("subsystem qubit out of range"));
    }
    let bit = |q: usize| 1usize << (n_qubits - q);
    let keep_mask: usize = keep.iter().map(|&q| bit(q)).sum();
    let env: Vec<usize> = (1..=n_qubits).filter(|q| !keep.contains(q)).collect();
    let norm: T = psi.iter().fold(T::zero(), |a, z| a + norm_sqr(*z));
    // rho_S[i, j] = sum_e psi[i|e] conj(psi[j|e])
    let ks = keep.len();
    let sub = 1usize << ks;
    let spread = |bits: usize, qubits: &mut dyn Iterator<Item = usize>, count: usize| {
        let mut idx = 0usize;
        for (pos, q) in qubits.enumerate() {
            if bits & (1 << (count - 1 - pos)) != 0 {
                idx |= bit(q);
            }
        }
        idx
    };
    let mut rho = DMatrix::<Complex<T>>::zeros(sub, sub);
    for e in 0..(1usize << env.len()) {
        let ei = spread(e, &mut env.iter().copied(), env.len());
        debug_assert_eq!(ei & keep_mask, 0);
        for i in 0..sub {
            let ii = spread(i, &mut keep.iter().copied(), ks) | ei;
            for j in 0..sub {
                let jj = spread(j, &mut keep.iter().copied(), ks) | ei;
                rho[(i, j)] += psi[ii] * psi[jj].conj();
            }
        }
    }
    let purity = rho.iter().fold(T::zero(), |a, z| a + norm_sqr(*z));
    Ok(purity / (norm * norm))
}

/// How each sweep point's gate is realized.
#[derive(Clone, Debug)]
pub enum SweepRealization<'a, T: Real> {
    /// The ideal unitary.
    Exact,
    /// The ideal unitary sliced over `duration_s` with dephasing between
    /// slices.
    ExactDephased {
        t2_s: Vec<T>,
        duration_s: T,
        slices: usize,
    },
    /// One pulse per grid point, in grid order.
    Pulses {
        ctrl: &'a ControlledSystem<T>,
        pulses: &'a [PulseSequence<T>],
        t2_s: Option<Vec<T>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint<T> {
    pub theta: T,
    pub stay: T,
    pub transfer: T,
}

#[derive(Clone, Debug)]
pub struct SweepResult<T: Real> {
    pub input: String,
    pub points: Vec<SweepPoint<T>>,
    /// Fitted amplitude of `stay = A cos(2 theta)`.
    pub a: T,
    /// Fitted amplitude of `transfer = B sin(2 theta)`.
    pub b: T,
    /// RMS residuals of the two fits.
    pub residual_a: T,
    pub residual_b: T,
}

fn amplitude_fit<T: Real>(ys: &[T], basis: &[T]) -> Result<(T, T)> {
    let ss = basis.iter().fold(T::zero(), |a, v| a + *v * *v);
    if !(ss > lit(1e-12)) {
        return Err(Error::input(
            "theta grid does not constrain the fit (all basis values vanish)",
        ));
    }
    let amp = ys.iter().zip(basis).fold(T::zero(), |a, (y, f)| a + *y * *f) / ss;
    let rss = ys
        .iter()
        .zip(basis)
        .fold(T::zero(), |a, (y, f)| a + (*y - amp * *f) * (*y - amp * *f));
    Ok((amp, (rss / from_usize(ys.len())).sqrt()))
}

/// Applies `U_ab(theta) = exp(i theta (X_a X_b + Y_a Y_b))` over a grid of
/// angles to an input state and tracks two overlaps: with the input itself
/// (`stay`) and with the transfer state `i [X_a X_b + Y_a Y_b, rho] / 2`,
/// which the ideal gate reaches as `cos(2 theta) rho + sin(2 theta) tau` for
/// inputs of the XY family. Both curves are then fitted.
pub fn theta_sweep<T: Real>(
    sys: &SpinSystem<T>,
    pair: (usize, usize),
    input: &DeviationState<T>,
    thetas: &[T],
    realization: &SweepRealization<'_, T>,
) -> Result<SweepResult<T>> {
    if thetas.len() < 2 {
        return Err(Error::input(format!(
            "sweep needs at least 2 theta points for the fit, got {}",
            thetas.len()
        )));
    }
    if input.dim() != sys.dim() {
        return Err(Error::dim("input state does not match the register"));
    }
    let n = sys.n_qubits();
    let targets = [pair.0, pair.1];
    let unit = crate::pulse::gate_library(GateKind::Uxy, T::one(), &targets, sys)?;
    let g1 = unit
        .generator
        .clone()
        .expect("library gates carry their generator");
    let i_half = c(T::zero(), lit(0.5));
    let tau = DeviationState::from_matrix_unchecked(commutator(&g1, input.matrix()).map(|z| z * i_half));
    let (nn_in, nn_tau) = (input.overlap(input), tau.overlap(&tau));
    if !(nn_in > T::zero()) || !(nn_tau > T::zero()) {
        return Err(Error::input(
            "input state is invariant under the XY rotation; nothing to sweep",
        ));
    }
    let mut points = Vec::with_capacity(thetas.len());
    for (k, &theta) in thetas.iter().enumerate() {
        let gate = crate::pulse::gate_library(GateKind::Uxy, theta, &targets, sys)?;
        let out = match realization {
            SweepRealization::Exact => apply_gate(input, &gate.unitary)?,
            SweepRealization::ExactDephased {
                t2_s,
                duration_s,
                slices,
            } => {
                let ch = DephasingChannel::new(t2_s, n)?;
                evolve_exact_dephased(&gate, input, &ch, *duration_s, *slices)?
            }
            SweepRealization::Pulses { ctrl, pulses, t2_s } => {
                let pulse = pulses.get(k).ok_or_else(|| {
                    Error::input(format!(
                        "{} pulses for {} theta points",
                        pulses.len(),
                        thetas.len()
                    ))
                })?;
                let ch = t2_s
                    .as_ref()
                    .map(|t| DephasingChannel::new(t, n))
                    .transpose()?;
                evolve_under_pulse(ctrl, pulse, input, ch.as_ref())?
            }
        };
        points.push(SweepPoint {
            theta,
            stay: input.overlap(&out) / nn_in,
            transfer: tau.overlap(&out) / nn_tau,
        });
    }
    let two: T = lit(2.0);
    let cos: Vec<T> = thetas.iter().map(|t| (two * *t).cos()).collect();
    let sin: Vec<T> = thetas.iter().map(|t| (two * *t).sin()).collect();
    let stay: Vec<T> = points.iter().map(|p| p.stay).collect();
    let transfer: Vec<T> = points.iter().map(|p| p.transfer).collect();
    let (a, residual_a) = amplitude_fit(&stay, &cos)?;
    let (b, residual_b) = amplitude_fit(&transfer, &sin)?;
    Ok(SweepResult {
        input: input.label().unwrap_or("state").to_string(),
        points,
        a,
        b,
        residual_a,
        residual_b,
    })
}

/// The projector state `|psi><psi|` minus its trace part, for a
/// computational basis index.
pub fn basis_projector<T: Real>(n_qubits: usize, index: usize) -> Result<DeviationState<T>> {
    let dim = 1usize << n_qubits;
    if index >= dim {
        return Err(Error::input(format!("basis index {index} out of range")));
    }
    let mut m = Operator::<T>::zeros(dim, dim);
    m[(index, index)] = cre(T::one());
    DeviationState::traceless_part(m)
}
