// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Pauli strings and product-operator expressions.
//!
//! Qubits are labelled 1..=n. Qubit 1 is the leftmost tensor factor and the
//! most significant bit of a matrix index, so `"XZ"` is `X_1 (x) Z_2`.
//!
//! Internally a string is a pair of bit masks `(x, z)`: X sets `x`, Z sets
//! `z`, Y sets both. With that encoding
//! `P[r, r ^ x] = (-i)^{|x & z|} (-1)^{|r & z|}` and every other entry is 0,
//! which lets decomposition run as one Walsh-Hadamard transform per `x`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{is_power_of_two_dim, zeros, Operator};
use crate::scalar::{c, cre, from_usize, lit, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    E,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::E, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(ch: char) -> Option<Pauli> {
        match ch {
            'E' | 'I' => Some(Pauli::E),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::E => 'E',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::E => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::E,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// True for the transverse factors X and Y.
    pub fn is_transverse(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }
}

/// A real multiple of a tensor product of single-qubit Paulis.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString<T: Real> {
    pub labels: Vec<Pauli>,
    pub coefficient: T,
}

impl<T: Real> PauliString<T> {
    pub fn new(labels: Vec<Pauli>, coefficient: T) -> Self {
        PauliString {
            labels,
            coefficient,
        }
    }

    /// Parses a plain label such as `"XEZ"`.
    pub fn parse(label: &str, coefficient: T) -> Result<Self> {
        let labels = label
            .chars()
            .enumerate()
            .map(|(i, ch)| {
                Pauli::from_char(ch).ok_or_else(|| Error::Parse {
                    position: i,
                    message: format!("unknown Pauli symbol '{ch}'"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::new(labels, coefficient))
    }

    /// `coefficient * P_q` on an `n`-qubit register, `q` 1-based.
    pub fn single(n: usize, q: usize, p: Pauli, coefficient: T) -> Self {
        let mut labels = vec![Pauli::E; n];
        labels[q - 1] = p;
        PauliString::new(labels, coefficient)
    }

    /// `coefficient * P_a Q_b`, 1-based qubits.
    pub fn pair(n: usize, a: usize, pa: Pauli, b: usize, pb: Pauli, coefficient: T) -> Self {
        let mut labels = vec![Pauli::E; n];
        labels[a - 1] = pa;
        labels[b - 1] = pb;
        PauliString::new(labels, coefficient)
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    /// The all-E string; the only one with nonzero trace.
    pub fn is_identity(&self) -> bool {
        self.labels.iter().all(|&p| p == Pauli::E)
    }

    /// 1-based indices of the non-identity factors.
    pub fn support(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::E)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn label(&self) -> String {
        self.labels.iter().map(|p| p.to_char()).collect()
    }

    pub(crate) fn masks(&self) -> (usize, usize) {
        masks_of(&self.labels)
    }

    pub fn to_matrix(&self) -> Operator<T> {
        let n = self.labels.len();
        let (x, z) = self.masks();
        let dim = 1usize << n;
        let mut m = zeros(dim);
        let phase = minus_i_pow::<T>((x & z).count_ones()) * cre(self.coefficient);
        for r in 0..dim {
            let v = if (r & z).count_ones() % 2 == 0 {
                phase
            } else {
                -phase
            };
            m[(r, r ^ x)] = v;
        }
        m
    }
}

impl<T: Real> fmt::Display for PauliString<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+.6e}*{}", self.coefficient, self.label())
    }
}

pub(crate) fn masks_of(labels: &[Pauli]) -> (usize, usize) {
    let n = labels.len();
    let mut x = 0usize;
    let mut z = 0usize;
    for (i, p) in labels.iter().enumerate() {
        let bit = 1usize << (n - 1 - i);
        let (bx, bz) = p.bits();
        if bx {
            x |= bit;
        }
        if bz {
            z |= bit;
        }
    }
    (x, z)
}

pub(crate) fn labels_of(n: usize, x: usize, z: usize) -> Vec<Pauli> {
    (0..n)
        .map(|i| {
            let bit = 1usize << (n - 1 - i);
            Pauli::from_bits(x & bit != 0, z & bit != 0)
        })
        .collect()
}

fn minus_i_pow<T: Real>(k: u32) -> Complex<T> {
    match k % 4 {
        0 => c(T::one(), T::zero()),
        1 => c(T::zero(), -T::one()),
        2 => c(-T::one(), T::zero()),
        _ => c(T::zero(), T::one()),
    }
}

fn walsh_hadamard<T: Real>(v: &mut [Complex<T>]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let a = v[i];
                let b = v[i + h];
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Pauli coefficients `c[(x << n) | z] = Tr(P_{x,z} m) / 2^n` of a square
/// `2^n` matrix. Complex in general, real for Hermitian input.
pub fn pauli_coefficients<T: Real>(m: &Operator<T>) -> Result<Vec<Complex<T>>> {
    let n = is_power_of_two_dim(m)?;
    let dim = 1usize << n;
    let inv_dim = T::one() / from_usize::<T>(dim);
    let mut out = vec![cre(T::zero()); dim * dim];
    let mut buf = vec![cre(T::zero()); dim];
    for x in 0..dim {
        for (r, slot) in buf.iter_mut().enumerate() {
            *slot = m[(r ^ x, r)];
        }
        walsh_hadamard(&mut buf);
        for z in 0..dim {
            out[(x << n) | z] = minus_i_pow::<T>((x & z).count_ones()) * buf[z] * cre(inv_dim);
        }
    }
    Ok(out)
}

/// Inverse of [`pauli_coefficients`]: `sum_p c_p P_p`.
pub fn from_pauli_coefficients<T: Real>(coeffs: &[Complex<T>], n: usize) -> Result<Operator<T>> {
    let dim = 1usize << n;
    if coeffs.len() != dim * dim {
        return Err(Error::dim(format!(
            "expected {} Pauli coefficients for {n} qubits, got {}",
            dim * dim,
            coeffs.len()
        )));
    }
    let mut m = zeros(dim);
    let mut buf = vec![cre(T::zero()); dim];
    for x in 0..dim {
        for (z, slot) in buf.iter_mut().enumerate() {
            *slot = coeffs[(x << n) | z] * minus_i_pow::<T>((x & z).count_ones());
        }
        walsh_hadamard(&mut buf);
        for r in 0..dim {
            m[(r, r ^ x)] = buf[r];
        }
    }
    Ok(m)
}

/// Matrix of a Pauli string checked against the register size.
pub fn pauli_to_matrix<T: Real>(p: &PauliString<T>, n_qubits: usize) -> Result<Operator<T>> {
    if p.labels.len() != n_qubits {
        return Err(Error::dim(format!(
            "Pauli string {} has {} labels, register has {n_qubits} qubits",
            p.label(),
            p.labels.len()
        )));
    }
    Ok(p.to_matrix())
}

/// Default cutoff for [`matrix_to_pauli`].
pub const DEFAULT_PAULI_CUTOFF: f64 = 1e-10;

/// Decomposes a Hermitian matrix into real Pauli strings, dropping
/// coefficients with magnitude at or below `cutoff`. Strings come out in
/// lexicographic E < X < Y < Z order.
pub fn matrix_to_pauli<T: Real>(m: &Operator<T>, cutoff: T) -> Result<Vec<PauliString<T>>> {
    let n = is_power_of_two_dim(m)?;
    let coeffs = pauli_coefficients(m)?;
    let dim = 1usize << n;
    let mut out: Vec<PauliString<T>> = Vec::new();
    for x in 0..dim {
        for z in 0..dim {
            let cp = coeffs[(x << n) | z];
            if cp.im.abs() > cutoff {
                return Err(Error::input(format!(
                    "matrix is not Hermitian: coefficient of {} has imaginary part {:e}",
                    labels_of(n, x, z).iter().map(|p| p.to_char()).collect::<String>(),
                    cp.im
                )));
            }
            if cp.re.abs() > cutoff {
                out.push(PauliString::new(labels_of(n, x, z), cp.re));
            }
        }
    }
    out.sort_by(|a, b| a.labels.cmp(&b.labels));
    Ok(out)
}

/// A real linear combination of Pauli strings on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum<T: Real> {
    n_qubits: usize,
    terms: BTreeMap<Vec<Pauli>, T>,
}

impl<T: Real> PauliSum<T> {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn add(&mut self, s: PauliString<T>) -> Result<()> {
        if s.labels.len() != self.n_qubits {
            return Err(Error::dim(format!(
                "term {} does not fit a {}-qubit register",
                s.label(),
                self.n_qubits
            )));
        }
        let entry = self.terms.entry(s.labels).or_insert(T::zero());
        *entry += s.coefficient;
        Ok(())
    }

    pub fn scaled(mut self, factor: T) -> Self {
        for v in self.terms.values_mut() {
            *v *= factor;
        }
        self
    }

    pub fn extend(&mut self, other: &PauliSum<T>) -> Result<()> {
        for s in other.terms() {
            self.add(s)?;
        }
        Ok(())
    }

    /// Nonzero terms in lexicographic order.
    pub fn terms(&self) -> Vec<PauliString<T>> {
        self.terms
            .iter()
            .filter(|(_, v)| **v != T::zero())
            .map(|(k, v)| PauliString::new(k.clone(), *v))
            .collect()
    }

    /// Coefficient of the all-E string.
    pub fn identity_part(&self) -> T {
        self.terms
            .get(&vec![Pauli::E; self.n_qubits])
            .copied()
            .unwrap_or(T::zero())
    }

    pub fn without_identity(mut self) -> Self {
        self.terms.remove(&vec![Pauli::E; self.n_qubits]);
        self
    }

    pub fn to_matrix(&self) -> Operator<T> {
        let dim = 1usize << self.n_qubits;
        let mut m = zeros(dim);
        for (labels, &coef) in &self.terms {
            if coef == T::zero() {
                continue;
            }
            let (x, z) = masks_of(labels);
            let phase = minus_i_pow::<T>((x & z).count_ones()) * cre(coef);
            for r in 0..dim {
                let v = if (r & z).count_ones() % 2 == 0 {
                    phase
                } else {
                    -phase
                };
                m[(r, r ^ x)] += v;
            }
        }
        m
    }

    /// Parses a product-operator expression.
    ///
    /// Terms are length-`n` strings over `{E,X,Y,Z,0,1}` joined by `+`/`-`,
    /// each optionally prefixed by a numeric factor and `*`
    /// (`"2.5*XZE - EY1"`). `0` and `1` are the projectors `(E+Z)/2` and
    /// `(E-Z)/2`. Whitespace is ignored.
    pub fn parse(expr: &str, n_qubits: usize) -> Result<Self> {
        let chars: Vec<(usize, char)> = expr
            .char_indices()
            .filter(|(_, ch)| !ch.is_whitespace())
            .collect();
        if chars.is_empty() {
            return Err(Error::Parse {
                position: 0,
                message: "empty expression".into(),
            });
        }
        let mut sum = PauliSum::zero(n_qubits);
        let mut i = 0;
        let mut first = true;
        while i < chars.len() {
            let mut sign = T::one();
            match chars[i].1 {
                '+' => i += 1,
                '-' => {
                    sign = -T::one();
                    i += 1;
                }
                _ if first => {}
                ch => {
                    return Err(Error::Parse {
                        position: chars[i].0,
                        message: format!("expected '+' or '-', found '{ch}'"),
                    })
                }
            }
            first = false;
            if i >= chars.len() {
                return Err(Error::Parse {
                    position: expr.len(),
                    message: "dangling sign".into(),
                });
            }
            // Optional "number*" prefix.
            let mut factor = T::one();
            if let Some(star) = chars[i..]
                .iter()
                .take_while(|(_, ch)| !matches!(ch, '+' | '-'))
                .position(|(_, ch)| *ch == '*')
            {
                let text: String = chars[i..i + star].iter().map(|(_, ch)| *ch).collect();
                let v: f64 = text.parse().map_err(|_| Error::Parse {
                    position: chars[i].0,
                    message: format!("bad numeric factor '{text}'"),
                })?;
                factor = lit(v);
                i += star + 1;
            }
            let start = i;
            let mut factors: Vec<Vec<(Pauli, T)>> = Vec::with_capacity(n_qubits);
            while i < chars.len() && !matches!(chars[i].1, '+' | '-') {
                let (pos, ch) = chars[i];
                let half: T = lit(0.5);
                let expansion = match ch {
                    '0' => vec![(Pauli::E, half), (Pauli::Z, half)],
                    '1' => vec![(Pauli::E, half), (Pauli::Z, -half)],
                    other => match Pauli::from_char(other) {
                        Some(p) => vec![(p, T::one())],
                        None => {
                            return Err(Error::Parse {
                                position: pos,
                                message: format!("unknown symbol '{other}'"),
                            })
                        }
                    },
                };
                factors.push(expansion);
                i += 1;
            }
            if factors.len() != n_qubits {
                return Err(Error::Parse {
                    position: chars.get(start).map(|p| p.0).unwrap_or(expr.len()),
                    message: format!(
                        "term has {} symbols, register has {n_qubits} qubits",
                        factors.len()
                    ),
                });
            }
            let mut partial: Vec<(Vec<Pauli>, T)> = vec![(Vec::new(), sign * factor)];
            for f in &factors {
                let mut next = Vec::with_capacity(partial.len() * f.len());
                for (labels, coef) in &partial {
                    for &(p, w) in f {
                        let mut l = labels.clone();
                        l.push(p);
                        next.push((l, *coef * w));
                    }
                }
                partial = next;
            }
            for (labels, coef) in partial {
                sum.add(PauliString::new(labels, coef))?;
            }
        }
        Ok(sum)
    }
}
