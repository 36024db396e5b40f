// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex operator helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cis, cre, modulus, norm_sqr, Real};

/// Dense complex `2^n x 2^n` matrix: Hamiltonians, propagators, states.
pub type Operator<T> = DMatrix<Complex<T>>;

pub fn zeros<T: Real>(dim: usize) -> Operator<T> {
    DMatrix::from_element(dim, dim, Complex::new(T::zero(), T::zero()))
}

pub fn identity<T: Real>(dim: usize) -> Operator<T> {
    DMatrix::identity(dim, dim)
}

pub fn kron<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Operator<T> {
    a.kronecker(b)
}

pub fn commutator<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Operator<T> {
    a * b - b * a
}

/// Hilbert-Schmidt inner product `Tr(A^dagger B)`.
pub fn hs_inner<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Complex<T> {
    a.iter()
        .zip(b.iter())
        .fold(cre(T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// `Tr(A B)` without forming the product.
pub fn trace_product<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Complex<T> {
    let n = a.nrows();
    let mut acc = cre(T::zero());
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn frobenius<T: Real>(a: &Operator<T>) -> T {
    a.iter().fold(T::zero(), |acc, z| acc + norm_sqr(*z)).sqrt()
}

pub fn max_abs<T: Real>(a: &Operator<T>) -> T {
    a.iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)))
}

pub fn max_abs_diff<T: Real>(a: &Operator<T>, b: &Operator<T>) -> T {
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max(modulus(*x - *y)))
}

/// `max |H - H^dagger|` entrywise.
pub fn hermiticity_error<T: Real>(h: &Operator<T>) -> T {
    let n = h.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            worst = worst.max(modulus(h[(i, j)] - h[(j, i)].conj()));
        }
    }
    worst
}

/// `max |U^dagger U - I|` entrywise.
pub fn unitarity_error<T: Real>(u: &Operator<T>) -> T {
    let prod = u.adjoint() * u;
    max_abs_diff(&prod, &identity(u.nrows()))
}

pub fn is_power_of_two_dim<T: Real>(m: &Operator<T>) -> Result<usize> {
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::dim(format!("matrix is {r}x{c}, expected square")));
    }
    if r == 0 || !r.is_power_of_two() {
        return Err(Error::dim(format!("dimension {r} is not a power of two")));
    }
    Ok(r.trailing_zeros() as usize)
}

/// Eigendecomposition of a Hermitian operator, `H = V diag(values) V^dagger`.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: Operator<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn new(h: &Operator<T>) -> Self {
        let eig = h.clone().symmetric_eigen();
        HermitianEigen {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: T) -> Operator<T> {
        let phases: Vec<Complex<T>> = self.values.iter().map(|&l| cis(-l * t)).collect();
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        scaled * self.vectors.adjoint()
    }
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn expm_hermitian<T: Real>(h: &Operator<T>, t: T) -> Operator<T> {
    HermitianEigen::new(h).propagator(t)
}

/// `U rho U^dagger`.
pub fn conjugate_by<T: Real>(u: &Operator<T>, rho: &Operator<T>) -> Operator<T> {
    u * rho * u.adjoint()
}

pub fn scale_real<T: Real>(m: &Operator<T>, s: T) -> Operator<T> {
    m.map(|z| z.scale(s))
}

/// Partition of basis indices into blocks left invariant by every operator
/// in `ops`: connected components of the union of their sparsity patterns.
/// Blocks are sorted by smallest index, each listed in ascending order.
pub fn invariant_blocks<T: Real>(ops: &[&Operator<T>]) -> Vec<Vec<usize>> {
    let dim = ops.first().map_or(0, |m| m.nrows());
    let mut parent: Vec<usize> = (0..dim).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for m in ops {
        for j in 0..dim {
            for i in 0..dim {
                let z = m[(i, j)];
                if i != j && (z.re != T::zero() || z.im != T::zero()) {
                    let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut index_of = vec![usize::MAX; dim];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..dim {
        let r = root(&mut parent, i);
        if index_of[r] == usize::MAX {
            index_of[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[index_of[r]].push(i);
    }
    blocks
}

/// Restriction `M[idx, idx]`.
pub fn sub_block<T: Real>(m: &Operator<T>, idx: &[usize]) -> Operator<T> {
    DMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn propagator_of_diagonal_is_phase_diagonal() {
        let h = Operator::<f64>::from_diagonal(&nalgebra::DVector::from_vec(vec![
            cre(1.0),
            cre(-2.0),
        ]));
        let u = expm_hermitian(&h, 0.3);
        assert!((u[(0, 0)] - cis(-0.3)).norm() < 1e-14);
        assert!((u[(1, 1)] - cis(0.6)).norm() < 1e-14);
        assert!(u[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let h = Operator::<f64>::from_row_slice(
            2,
            2,
            &[cre(1.0), c(0.5, -0.25), c(0.5, 0.25), cre(-0.7)],
        );
        let e = HermitianEigen::new(&h);
        let d = Operator::from_diagonal(&nalgebra::DVector::from_iterator(
            2,
            e.values.iter().map(|&v| cre(v)),
        ));
        let rec = &e.vectors * d * e.vectors.adjoint();
        assert!(max_abs_diff(&rec, &h) < 1e-13);
        assert!(unitarity_error(&e.propagator(2.5)) < 1e-13);
    }

    #[test]
    fn blocks_follow_sparsity() {
        let mut m = zeros::<f64>(4);
        m[(0, 3)] = cre(1.0);
        m[(3, 0)] = cre(1.0);
        let d = identity::<f64>(4);
        let blocks = invariant_blocks(&[&m, &d]);
        assert_eq!(blocks, vec![vec![0, 3], vec![1], vec![2]]);
        let sb = sub_block(&m, &blocks[0]);
        assert_eq!(sb[(0, 1)], cre(1.0));
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(is_power_of_two_dim(&zeros::<f64>(3)).is_err());
        assert_eq!(is_power_of_two_dim(&zeros::<f64>(8)).unwrap(), 3);
    }
}
