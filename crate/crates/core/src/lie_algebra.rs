// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Dynamical Lie algebra of a drift plus control Hamiltonians.
//!
//! Elements are skew-Hermitian `e = iH`. They are stored as real unit vectors
//! `w` of Pauli coordinates of `H`, scaled so that the Euclidean dot product
//! of two coordinate vectors equals the Hilbert-Schmidt inner product of the
//! corresponding matrices. Orthonormality and membership are then plain
//! vector operations, and the matrix form is only rebuilt to commute.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::linalg::{frobenius, hermiticity_error, Operator};
use crate::pauli::{
    from_pauli_coefficients, labels_of, masks_of, pauli_coefficients, Pauli, PauliString,
};
use crate::scalar::{c, cre, from_usize, lit, Real};
use crate::spin_system::{ControlMode, SpinSystem};

/// Default Gram-Schmidt rejection threshold, relative to the candidate norm.
pub const DEFAULT_CLOSURE_TOL: f64 = 1e-8;
/// Default relative residual below which an operator counts as a member.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct AlgebraBasis<T: Real> {
    n_qubits: usize,
    vectors: Vec<Vec<T>>,
    tol: T,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Hermitian part `H` of an input that is either `H` or `iH`.
fn hermitian_part<T: Real>(op: &Operator<T>) -> Result<Operator<T>> {
    let scale = frobenius(op).max(T::min_value().unwrap_or(T::zero()));
    let rel: T = lit(1e-10);
    if hermiticity_error(op) <= rel * scale {
        return Ok(op.clone());
    }
    let h = op.map(|z| z * c(T::zero(), -T::one()));
    if hermiticity_error(&h) <= rel * scale {
        return Ok(h);
    }
    Err(Error::input(
        "generator is neither Hermitian nor skew-Hermitian",
    ))
}

impl<T: Real> AlgebraBasis<T> {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn tol(&self) -> T {
        self.tol
    }

    /// Orthonormal Pauli-coordinate vectors of the Hermitian parts.
    pub fn coordinates(&self) -> &[Vec<T>] {
        &self.vectors
    }

    fn coords_of(&self, op: &Operator<T>) -> Result<Vec<T>> {
        let dim = 1usize << self.n_qubits;
        if op.shape() != (dim, dim) {
            return Err(Error::dim(format!(
                "operator is {}x{}, algebra acts on dimension {dim}",
                op.nrows(),
                op.ncols()
            )));
        }
        coordinates(&hermitian_part(op)?)
    }

    /// Skew-Hermitian matrix of element `k`, unit Hilbert-Schmidt norm.
    pub fn element(&self, k: usize) -> Operator<T> {
        let scale = T::one() / from_usize::<T>(1usize << self.n_qubits).sqrt();
        let coeffs: Vec<_> = self.vectors[k]
            .iter()
            .map(|&w| c(T::zero(), w * scale))
            .collect();
        from_pauli_coefficients(&coeffs, self.n_qubits).expect("basis vectors have 4^n entries")
    }

    pub fn elements(&self) -> Vec<Operator<T>> {
        (0..self.dim()).map(|k| self.element(k)).collect()
    }

    /// Relative residual of `coords` after projection onto the span.
    fn residual_of(&self, coords: &[T]) -> T {
        let n0 = norm(coords);
        if n0 == T::zero() {
            return T::zero();
        }
        let mut r: Vec<T> = coords.iter().map(|&v| v / n0).collect();
        for _ in 0..2 {
            for b in &self.vectors {
                let p = dot(&r, b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= p * *bi;
                }
            }
        }
        norm(&r)
    }

    /// Adds `coords` if it is independent of the current span; returns true
    /// when the basis grew.
    fn try_insert(&mut self, coords: Vec<T>) -> bool {
        let n0 = norm(&coords);
        if n0 <= self.tol {
            return false;
        }
        let mut r: Vec<T> = coords.into_iter().map(|v| v / n0).collect();
        for _ in 0..2 {
            for b in &self.vectors {
                let p = dot(&r, b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= p * *bi;
                }
            }
        }
        let nr = norm(&r);
        if nr <= self.tol {
            return false;
        }
        for v in r.iter_mut() {
            *v /= nr;
        }
        self.vectors.push(r);
        true
    }

    /// Largest relative residual of `[e_i, e_j]` over all pairs. Quadratic
    /// in the dimension; meant for verification.
    pub fn closure_defect(&self) -> T {
        let mats: Vec<Operator<T>> = (0..self.dim()).map(|k| self.hermitian(k)).collect();
        let mut worst = T::zero();
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                let k = commutator_hermitian(&mats[i], &mats[j]);
                if let Ok(v) = coordinates(&k) {
                    if norm(&v) > self.tol {
                        worst = worst.max(self.residual_of(&v));
                    }
                }
            }
        }
        worst
    }

    fn hermitian(&self, k: usize) -> Operator<T> {
        let scale = T::one() / from_usize::<T>(1usize << self.n_qubits).sqrt();
        let coeffs: Vec<_> = self.vectors[k].iter().map(|&w| cre(w * scale)).collect();
        from_pauli_coefficients(&coeffs, self.n_qubits).expect("basis vectors have 4^n entries")
    }

    /// Squared weight of the Pauli string with masks `(x, z)` inside the span.
    fn captured_weight(&self, index: usize) -> T {
        self.vectors
            .iter()
            .fold(T::zero(), |acc, b| acc + b[index] * b[index])
    }
}

/// Real Pauli coordinates of a Hermitian matrix, scaled so that the dot
/// product equals the Hilbert-Schmidt inner product.
fn coordinates<T: Real>(h: &Operator<T>) -> Result<Vec<T>> {
    let coeffs = pauli_coefficients(h)?;
    let scale = from_usize::<T>(h.nrows()).sqrt();
    Ok(coeffs.into_iter().map(|z| z.re * scale).collect())
}

/// `i [A, B]`: Hermitian whenever `A` and `B` are.
fn commutator_hermitian<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Operator<T> {
    let k = a * b - b * a;
    k.map(|z| z * c(T::zero(), T::one()))
}

/// Smallest matrix Lie algebra containing the generators.
///
/// Generators may be Hermitian (they are multiplied by `i`) or already
/// skew-Hermitian. The expansion is breadth-first: every newly accepted
/// element is commuted with every generator, in insertion order, and a
/// candidate is kept when its Gram-Schmidt residual exceeds `tol` relative to
/// its norm. Right-nested brackets of generators span the generated algebra,
/// so commuting with generators alone reaches the full closure. Generators
/// are normalized first, which makes `tol` independent of the Hz scale.
pub fn closure<T: Real>(generators: &[Operator<T>], tol: T) -> Result<AlgebraBasis<T>> {
    if generators.is_empty() {
        return Err(Error::input("no generators"));
    }
    if tol <= T::zero() {
        return Err(Error::input("closure tolerance must be positive"));
    }
    let dim = generators[0].nrows();
    let n_qubits = crate::linalg::is_power_of_two_dim(&generators[0])?;
    let mut gens: Vec<Operator<T>> = Vec::with_capacity(generators.len());
    let mut traceless = true;
    for g in generators {
        if g.shape() != (dim, dim) {
            return Err(Error::dim("generators have different dimensions"));
        }
        let h = hermitian_part(g)?;
        let nrm = frobenius(&h);
        if nrm == T::zero() {
            continue;
        }
        let tr = h.trace();
        if (tr.re * tr.re + tr.im * tr.im).sqrt() > lit::<T>(1e-9) * nrm {
            traceless = false;
        }
        gens.push(h.map(|z| z / nrm));
    }
    let limit = if traceless { dim * dim - 1 } else { dim * dim };

    let mut basis = AlgebraBasis {
        n_qubits,
        vectors: Vec::new(),
        tol,
    };
    for g in &gens {
        basis.try_insert(coordinates(g)?);
    }
    let mut next = 0;
    while next < basis.dim() {
        let current = basis.hermitian(next);
        for g in &gens {
            let cand = commutator_hermitian(&current, g);
            basis.try_insert(coordinates(&cand)?);
            if basis.dim() > limit {
                return Err(Error::Consistency(format!(
                    "closure dimension {} exceeds the bound {limit}",
                    basis.dim()
                )));
            }
        }
        next += 1;
    }
    Ok(basis)
}

/// Membership outcome: `residual` is `|op - P(op)| / |op|` with `P` the
/// orthogonal projection onto the algebra.
/// Drift followed by every control channel of `sys`, in channel order.
pub fn system_generators<T: Real>(sys: &SpinSystem<T>, mode: ControlMode) -> Result<Vec<Operator<T>>> {
    let mut gens = vec![sys.drift()];
    gens.extend(sys.controls(mode)?.into_iter().map(|c| c.matrix));
    Ok(gens)
}

/// Dynamical Lie algebra of a register under the given control grouping.
pub fn system_algebra<T: Real>(sys: &SpinSystem<T>, mode: ControlMode, tol: T) -> Result<AlgebraBasis<T>> {
    closure(&system_generators(sys, mode)?, tol)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership<T> {
    pub in_algebra: bool,
    pub residual: T,
}

pub fn membership<T: Real>(op: &Operator<T>, basis: &AlgebraBasis<T>) -> Result<Membership<T>> {
    membership_with_tol(op, basis, lit(DEFAULT_MEMBERSHIP_TOL))
}

pub fn membership_with_tol<T: Real>(
    op: &Operator<T>,
    basis: &AlgebraBasis<T>,
    tol: T,
) -> Result<Membership<T>> {
    let coords = basis.coords_of(op)?;
    let residual = basis.residual_of(&coords);
    Ok(Membership {
        in_algebra: residual < tol,
        residual,
    })
}

/// True iff every traceless Pauli string supported on `qubits` lies in the
/// algebra, i.e. the subsystem is fully controllable.
pub fn subsystem_full_control<T: Real>(
    basis: &AlgebraBasis<T>,
    qubits: &BTreeSet<usize>,
) -> Result<bool> {
    let n = basis.n_qubits();
    if qubits.is_empty() {
        return Err(Error::input("empty qubit set"));
    }
    if qubits.iter().any(|&q| q == 0 || q > n) {
        return Err(Error::input(format!("qubit set outside 1..={n}")));
    }
    let qs: Vec<usize> = qubits.iter().copied().collect();
    let tol: T = lit(DEFAULT_MEMBERSHIP_TOL);
    let count = 1usize << (2 * qs.len());
    for code in 1..count {
        let mut labels = vec![Pauli::E; n];
        for (slot, &q) in qs.iter().enumerate() {
            labels[q - 1] = Pauli::ALL[(code >> (2 * slot)) & 3];
        }
        let (x, z) = masks_of(&labels);
        let captured = basis.captured_weight((x << n) | z);
        let residual = (T::one() - captured).max(T::zero()).sqrt();
        if residual >= tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pauli decomposition of every basis element's Hermitian part `H`
/// (element `= iH`).
pub fn label_basis<T: Real>(basis: &AlgebraBasis<T>) -> Vec<Vec<PauliString<T>>> {
    let n = basis.n_qubits();
    let dim = 1usize << n;
    let scale = T::one() / from_usize::<T>(dim).sqrt();
    let cutoff: T = lit(1e-9);
    basis
        .coordinates()
        .iter()
        .map(|w| {
            let mut terms: Vec<PauliString<T>> = w
                .iter()
                .enumerate()
                .filter(|(_, v)| v.abs() > cutoff)
                .map(|(idx, &v)| PauliString::new(labels_of(n, idx >> n, idx & (dim - 1)), v * scale))
                .collect();
            terms.sort_by(|a, b| a.labels.cmp(&b.labels));
            terms
        })
        .collect()
}

/// Pauli strings carried by the algebra, grouped by their actuator factor.
///
/// Keys are actuator-factor labels (`"X"`, `"E"`, ... over the actuator
/// qubits in ascending order) and values the target-factor labels that occur
/// with them.
pub fn sector_support<T: Real>(
    basis: &AlgebraBasis<T>,
    actuators: &BTreeSet<usize>,
) -> BTreeMap<String, BTreeSet<String>> {
    let n = basis.n_qubits();
    let dim = 1usize << n;
    let cutoff: T = lit(1e-12);
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for idx in 0..dim * dim {
        if basis.captured_weight(idx) <= cutoff {
            continue;
        }
        let labels = labels_of(n, idx >> n, idx & (dim - 1));
        let mut act = String::new();
        let mut tgt = String::new();
        for (i, p) in labels.iter().enumerate() {
            if actuators.contains(&(i + 1)) {
                act.push(p.to_char());
            } else {
                tgt.push(p.to_char());
            }
        }
        out.entry(act).or_default().insert(tgt);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;

    fn p(label: &str) -> Operator<f64> {
        PauliString::parse(label, 1.0).unwrap().to_matrix()
    }

    #[test]
    fn su2_from_two_generators() {
        let b = closure(&[p("X"), p("Z")], 1e-8).unwrap();
        assert_eq!(b.dim(), 3);
        assert!(subsystem_full_control(&b, &[1].into()).unwrap());
        let labels: BTreeSet<String> = label_basis(&b)
            .iter()
            .flat_map(|t| t.iter().map(|s| s.label()))
            .collect();
        assert_eq!(labels, ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn skew_hermitian_generators_accepted() {
        let ix = p("X").map(|z| z * c(0.0, 1.0));
        let b = closure(&[ix, p("Y")], 1e-8).unwrap();
        assert_eq!(b.dim(), 3);
        for e in b.elements() {
            let h = e.adjoint() + &e;
            assert!(crate::linalg::max_abs(&h) < 1e-12);
        }
    }

    #[test]
    fn rejects_non_normal_generator() {
        let mut m = p("X");
        m[(0, 1)] = c(2.0, 0.0);
        assert!(matches!(closure(&[m], 1e-8), Err(Error::Input(_))));
    }

    #[test]
    fn membership_dimension_mismatch() {
        let b = closure(&[p("X"), p("Z")], 1e-8).unwrap();
        assert!(matches!(membership(&p("XX"), &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn commuting_generators_stay_abelian() {
        let b = closure(&[p("ZE"), p("EZ"), p("ZZ")], 1e-8).unwrap();
        assert_eq!(b.dim(), 3);
        assert!(!subsystem_full_control(&b, &[1].into()).unwrap());
        assert!(subsystem_full_control(&b, &BTreeSet::new()).is_err());
    }
}
