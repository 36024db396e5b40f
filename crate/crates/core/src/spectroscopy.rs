// Copyright 2026 The Spinact Authors
// SPDX-License-Identifier: Apache-2.0

//! Free-induction decays, spectra and reference-spectrum fitting.
//!
//! The detection operator is `sum_k (X_k - i Y_k)` over the observed
//! species, so a lone spin with shift `nu` prepared along Y gives a signal
//! proportional to `exp(+2 pi i nu t)` and its line appears at `+nu`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::dynamics::{DephasingChannel, DeviationState, GateRealization};
use crate::error::{Error, Result};
use crate::linalg::{trace_product, HermitianEigen, Operator};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::scalar::{c, cre, from_usize, lit, modulus, to_f64, Real};
use crate::spin_system::SpinSystem;

/// Sampled transverse magnetization of one species.
#[derive(Clone, Debug, PartialEq)]
pub struct Fid<T: Real> {
    pub dwell_s: T,
    pub samples: Vec<Complex<T>>,
    pub observed_species: String,
    pub label: Option<String>,
}

impl<T: Real> Fid<T> {
    pub fn new(dwell_s: T, samples: Vec<Complex<T>>, observed_species: impl Into<String>) -> Result<Self> {
        if !(dwell_s > T::zero()) || !dwell_s.is_finite() {
            return Err(Error::input("dwell time must be positive"));
        }
        if samples.len() < 2 {
            return Err(Error::input("an FID needs at least 2 samples"));
        }
        Ok(Fid {
            dwell_s,
            samples,
            observed_species: observed_species.into(),
            label: None,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time_s(&self, k: usize) -> T {
        self.dwell_s * from_usize(k)
    }

    /// `t_s,real,imag` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,real,imag\n");
        for (k, z) in self.samples.iter().enumerate() {
            let _ = writeln!(out, "{:e},{:e},{:e}", self.time_s(k), z.re, z.im);
        }
        out
    }
}

/// `sum_k (X_k - i Y_k)` over the qubits of `species`.
pub fn detection_operator<T: Real>(sys: &SpinSystem<T>, species: &str) -> Result<Operator<T>> {
    let qubits = sys.qubits_of_species(species);
    if qubits.is_empty() {
        return Err(Error::input(format!("species '{species}' is not in the register")));
    }
    let n = sys.n_qubits();
    let mut x = PauliSum::zero(n);
    let mut y = PauliSum::zero(n);
    for &q in &qubits {
        x.add(PauliString::single(n, q, Pauli::X, T::one()))?;
        y.add(PauliString::single(n, q, Pauli::Y, T::one()))?;
    }
    let ym = y.to_matrix();
    let mut d = x.to_matrix();
    d.zip_apply(&ym, |a, b| *a -= b * c(T::zero(), T::one()));
    Ok(d)
}

/// Evolves `state` under the drift and records `Tr(rho(t) D)` every
/// `dwell_s`, dephasing between samples when `t2_s` is given.
pub fn simulate_fid<T: Real>(
    sys: &SpinSystem<T>,
    state: &DeviationState<T>,
    species: &str,
    n_points: usize,
    dwell_s: T,
    t2_s: Option<&[T]>,
) -> Result<Fid<T>> {
    if n_points < 2 {
        return Err(Error::input("an FID needs at least 2 samples"));
    }
    if !(dwell_s > T::zero()) || !dwell_s.is_finite() {
        return Err(Error::input("dwell time must be positive"));
    }
    if state.dim() != sys.dim() {
        return Err(Error::dim("state does not match the register"));
    }
    let det = detection_operator(sys, species)?;
    let step = HermitianEigen::new(&sys.drift()).propagator(dwell_s);
    let step_dag = step.adjoint();
    let mask = match t2_s {
        Some(t2) => {
            let ch = DephasingChannel::new(t2, sys.n_qubits())?;
            (!ch.is_trivial()).then(|| ch.mask(dwell_s))
        }
        None => None,
    };
    let mut rho = state.matrix().clone();
    let mut samples = Vec::with_capacity(n_points);
    for k in 0..n_points {
        samples.push(trace_product(&rho, &det));
        if k + 1 < n_points {
            rho = &step * rho * &step_dag;
            if let Some(m) = &mask {
                rho.zip_apply(m, |z, f| *z *= cre(f));
            }
        }
    }
    let mut fid = Fid::new(dwell_s, samples, species)?;
    fid.label = state.label().map(str::to_string);
    Ok(fid)
}

/// FID processing before the Fourier transform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Processing<T: Real> {
    /// Total length is `zero_fill * fid.len()`; 1 disables zero filling.
    pub zero_fill: usize,
    /// Exponential apodization `exp(-rate * t)`, in 1/s.
    pub apodization_per_s: Option<T>,
}

impl<T: Real> Default for Processing<T> {
    fn default() -> Self {
        Processing {
            zero_fill: 2,
            apodization_per_s: None,
        }
    }
}

impl<T: Real> Processing<T> {
    /// Matched exponential window for the shortest observed T2.
    pub fn matched(t2_s: T) -> Self {
        Processing {
            zero_fill: 2,
            apodization_per_s: Some(T::one() / t2_s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T: Real> {
    pub freqs_hz: Vec<T>,
    pub values: Vec<Complex<T>>,
    pub label: Option<String>,
    pub apodization_per_s: Option<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn bin_width_hz(&self) -> T {
        self.freqs_hz[1] - self.freqs_hz[0]
    }

    pub fn magnitude(&self) -> Vec<T> {
        self.values.iter().map(|z| modulus(*z)).collect()
    }

    /// `sum |S(f)| df`.
    pub fn integral_abs(&self) -> T {
        self.magnitude().into_iter().fold(T::zero(), |a, v| a + v) * self.bin_width_hz()
    }

    /// Frequencies of local maxima of `|S|` above `rel_threshold` times
    /// the global maximum, in increasing order.
    pub fn peaks_hz(&self, rel_threshold: T) -> Vec<T> {
        let m = self.magnitude();
        let top = m.iter().fold(T::zero(), |a, v| a.max(*v));
        if top == T::zero() {
            return Vec::new();
        }
        let n = m.len();
        (0..n)
            .filter(|&k| {
                let left = if k == 0 { T::zero() } else { m[k - 1] };
                let right = if k + 1 == n { T::zero() } else { m[k + 1] };
                m[k] > left && m[k] >= right && m[k] >= top * rel_threshold
            })
            .map(|k| self.freqs_hz[k])
            .collect()
    }

    /// Copy with independent Gaussian noise of standard deviation `sigma`
    /// on the real and imaginary part of every point.
    pub fn with_gaussian_noise(&self, sigma: T, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        for z in out.values.iter_mut() {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            *z += c(sigma * lit(a), sigma * lit(b));
        }
        out
    }

    /// `a * self + b * other` on a common axis.
    pub fn combine(&self, a: T, other: &Spectrum<T>, b: T) -> Result<Self> {
        check_axes(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| *x * cre(a) + *y * cre(b))
            .collect();
        Ok(Spectrum {
            freqs_hz: self.freqs_hz.clone(),
            values,
            label: None,
            apodization_per_s: self.apodization_per_s,
        })
    }

    /// `freq_hz,real,imag,magnitude` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz,real,imag,magnitude\n");
        for (f, z) in self.freqs_hz.iter().zip(&self.values) {
            let _ = writeln!(out, "{:e},{:e},{:e},{:e}", f, z.re, z.im, modulus(*z));
        }
        out
    }
}

/// Unitary DFT of the processed FID, centred on zero frequency.
///
/// With `N` points in total the axis is `(k - N/2) / (N * dwell)` for
/// `k = 0..N`. Scaling by `1/sqrt(N)` keeps `sum |S|^2` equal to the sum of
/// squared processed samples.
pub fn to_spectrum<T: Real>(fid: &Fid<T>, processing: &Processing<T>) -> Result<Spectrum<T>> {
    if processing.zero_fill == 0 {
        return Err(Error::input("zero-fill factor must be at least 1"));
    }
    let n = fid.len() * processing.zero_fill;
    let mut buf: Vec<Complex<T>> = vec![cre(T::zero()); n];
    for (k, z) in fid.samples.iter().enumerate() {
        let w = match processing.apodization_per_s {
            Some(rate) => (-(rate * fid.time_s(k))).exp(),
            None => T::one(),
        };
        buf[k] = *z * cre(w);
    }
    FftPlanner::<T>::new().plan_fft_forward(n).process(&mut buf);
    let scale = T::one() / from_usize::<T>(n).sqrt();
    let half = n / 2;
    let span = from_usize::<T>(n) * fid.dwell_s;
    let freqs_hz = (0..n)
        .map(|k| (from_usize::<T>(k) - from_usize::<T>(half)) / span)
        .collect();
    let values = (0..n)
        .map(|k| buf[(k + n - half) % n] * cre(scale))
        .collect();
    Ok(Spectrum {
        freqs_hz,
        values,
        label: fid.label.clone(),
        apodization_per_s: processing.apodization_per_s,
    })
}

fn check_axes<T: Real>(a: &Spectrum<T>, b: &Spectrum<T>) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::input(format!(
            "frequency axes differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let tol = a.bin_width_hz().abs() * lit(1e-9);
    if a
        .freqs_hz
        .iter()
        .zip(&b.freqs_hz)
        .any(|(x, y)| (*x - *y).abs() > tol)
    {
        return Err(Error::input("frequency axes differ"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapFit<T> {
    pub coeffs: Vec<T>,
    pub stderr: Vec<T>,
    /// Euclidean norm of the complex residual.
    pub residual_norm: T,
    /// Ratio of extreme singular values of the reference matrix.
    pub condition_number: T,
    pub dof: usize,
}

/// Real least-squares fit `measured ~ sum_i c_i ref_i` over the stacked
/// real and imaginary parts. Standard errors come from the residual
/// variance and `(A^T A)^-1`.
pub fn fit_overlap<T: Real>(measured: &Spectrum<T>, references: &[Spectrum<T>]) -> Result<OverlapFit<T>> {
    if references.is_empty() {
        return Err(Error::input("at least one reference spectrum is required"));
    }
    for r in references {
        check_axes(measured, r)?;
    }
    let m = measured.len();
    let p = references.len();
    let rows = 2 * m;
    let a = DMatrix::from_fn(rows, p, |i, j| {
        let z = references[j].values[i / 2];
        if i % 2 == 0 {
            z.re
        } else {
            z.im
        }
    });
    let b = DVector::from_fn(rows, |i, _| {
        let z = measured.values[i / 2];
        if i % 2 == 0 {
            z.re
        } else {
            z.im
        }
    });
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(T::zero(), |acc, v| acc.max(*v));
    let smin = sv.iter().fold(smax, |acc, v| acc.min(*v));
    if !(smax > T::zero()) || smin <= smax * lit(1e-12) {
        return Err(Error::Fit(format!(
            "reference spectra are linearly dependent (singular values {:e} .. {:e})",
            to_f64(smin),
            to_f64(smax)
        )));
    }
    let x = svd
        .solve(&b, T::zero())
        .map_err(|e| Error::Fit(e.to_string()))?;
    let r = &b - &a * &x;
    let rss = r.norm_squared();
    let dof = rows.saturating_sub(p);
    let sigma2 = if dof > 0 { rss / from_usize(dof) } else { T::zero() };
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let stderr = (0..p)
        .map(|i| {
            let var = (0..p).fold(T::zero(), |acc, k| {
                acc + v_t[(k, i)] * v_t[(k, i)] / (sv[k] * sv[k])
            });
            (sigma2 * var).sqrt()
        })
        .collect();
    Ok(OverlapFit {
        coeffs: x.iter().copied().collect(),
        stderr,
        residual_norm: rss.sqrt(),
        condition_number: smax / smin,
        dof,
    })
}

/// Acquisition settings shared by every spectrum of an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Acquisition<T: Real> {
    pub species: String,
    pub n_points: usize,
    pub dwell_s: T,
    pub processing: Processing<T>,
}

impl<T: Real> Acquisition<T> {
    pub fn spectrum(
        &self,
        sys: &SpinSystem<T>,
        state: &DeviationState<T>,
        t2_s: Option<&[T]>,
    ) -> Result<Spectrum<T>> {
        let fid = simulate_fid(sys, state, &self.species, self.n_points, self.dwell_s, t2_s)?;
        to_spectrum(&fid, &self.processing)
    }
}

#[derive(Clone, Debug)]
pub struct InversionReport<T: Real> {
    pub reference: Spectrum<T>,
    pub result: Spectrum<T>,
    pub fit: OverlapFit<T>,
    pub gate_duration_s: T,
}

impl<T: Real> InversionReport<T> {
    /// The fitted inversion coefficient `c`.
    pub fn coefficient(&self) -> T {
        self.fit.coeffs[0]
    }
}

/// Reference spectrum of `input`, the gate applied to it (dephasing during
/// the gate when `t2_s` is given), the resulting spectrum, and the fitted
/// coefficient of the result on the reference.
pub fn inversion_experiment<T: Real>(
    sys: &SpinSystem<T>,
    input: &DeviationState<T>,
    gate: &GateRealization<'_, T>,
    acquisition: &Acquisition<T>,
    t2_s: Option<&[T]>,
) -> Result<InversionReport<T>> {
    let channel = t2_s
        .map(|t| DephasingChannel::new(t, sys.n_qubits()))
        .transpose()?;
    let out = gate.apply(input, channel.as_ref())?;
    let reference = acquisition.spectrum(sys, input, t2_s)?;
    let result = acquisition.spectrum(sys, &out, t2_s)?;
    let fit = fit_overlap(&result, std::slice::from_ref(&reference))?;
    Ok(InversionReport {
        reference,
        result,
        fit,
        gate_duration_s: gate.duration_s(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::parse_state;

    fn tone(nu: f64, n: usize, dwell: f64) -> Fid<f64> {
        let s = (0..n)
            .map(|k| {
                let ph = 2.0 * std::f64::consts::PI * nu * dwell * k as f64;
                c(ph.cos(), ph.sin())
            })
            .collect();
        Fid::new(dwell, s, "H").unwrap()
    }

    #[test]
    fn single_spin_sign_convention() {
        let sys = SpinSystem::single_spin("H", 250.0);
        let y = parse_state::<f64>("Y", 1).unwrap();
        let fid = simulate_fid(&sys, &y, "H", 64, 1e-4, None).unwrap();
        let z0 = fid.samples[0];
        for (k, z) in fid.samples.iter().enumerate() {
            let ph = 2.0 * std::f64::consts::PI * 250.0 * fid.time_s(k);
            let want = z0 * c(ph.cos(), ph.sin());
            assert!((z - want).norm() < 1e-9, "{k}");
        }
    }

    #[test]
    fn tone_peaks_at_its_frequency() {
        let fid = tone(312.5, 256, 1e-4);
        let s = to_spectrum(&fid, &Processing::default()).unwrap();
        let peaks = s.peaks_hz(0.5);
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0] - 312.5).abs() <= s.bin_width_hz());
    }

    #[test]
    fn zero_fid_zero_spectrum_and_parseval() {
        let z = Fid::new(1e-3, vec![c(0.0, 0.0); 8], "H").unwrap();
        let s = to_spectrum(&z, &Processing::default()).unwrap();
        assert!(s.values.iter().all(|v| v.norm() == 0.0));
        let fid = tone(40.0, 100, 1e-3);
        let s = to_spectrum(&fid, &Processing::default()).unwrap();
        let e_t: f64 = fid.samples.iter().map(|z| z.norm_sqr()).sum();
        let e_f: f64 = s.values.iter().map(|z| z.norm_sqr()).sum();
        assert!((e_t - e_f).abs() < 1e-9 * e_t);
        assert!(s.freqs_hz.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn fit_recovers_single_reference() {
        let fid = tone(100.0, 128, 1e-3);
        let r = to_spectrum(&fid, &Processing::default()).unwrap();
        let f = fit_overlap(&r, &[r.clone()]).unwrap();
        assert!((f.coeffs[0] - 1.0).abs() < 1e-12);
        assert!(f.residual_norm < 1e-10);
    }

    #[test]
    fn rank_deficient_and_axis_errors() {
        let r = to_spectrum(&tone(100.0, 128, 1e-3), &Processing::default()).unwrap();
        let twice = r.combine(2.0, &r, 0.0).unwrap();
        assert!(matches!(fit_overlap(&r, &[r.clone(), twice]), Err(Error::Fit(_))));
        let other = to_spectrum(&tone(100.0, 64, 1e-3), &Processing::default()).unwrap();
        assert!(matches!(fit_overlap(&r, &[other]), Err(Error::Input(_))));
    }

    #[test]
    fn absent_species_rejected() {
        let sys = SpinSystem::single_spin("H", 10.0);
        let y = parse_state::<f64>("Y", 1).unwrap();
        assert!(simulate_fid(&sys, &y, "F", 16, 1e-3, None).is_err());
        assert!(simulate_fid(&sys, &y, "H", 16, 0.0, None).is_err());
    }
}
