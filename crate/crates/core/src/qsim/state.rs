use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::scalar::{inner, norm2, Real};

/// Normalized state of a qubit register, qubit 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Wraps `amps`, which must be unit norm and of power-of-two length.
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return invalid(format!("state length {} is not a power of two", amps.len()));
        }
        let nrm = norm2(&amps);
        let tol = T::of(1e3) * T::machine_eps() * T::of_usize(amps.len());
        if (nrm - T::one()).abs() > tol {
            return invalid(format!("state norm {nrm} differs from 1"));
        }
        Ok(Self { amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(amps: Vec<Complex<T>>) -> Result<Self> {
        let nrm = norm2(&amps);
        if !(nrm > T::zero()) {
            return invalid("cannot normalize the zero vector");
        }
        let inv = T::one() / nrm;
        Self::new(amps.into_iter().map(|z| z * inv).collect())
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amps[index] = Complex::new(T::one(), T::zero());
        Self { amps }
    }

    pub(crate) fn from_raw(amps: Vec<Complex<T>>) -> Self {
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn norm(&self) -> T {
        norm2(&self.amps)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(inner(&self.amps, &other.amps))
    }

    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `|a⟩ ⊗ |self⟩` for a single-qubit prefix `a`.
    pub fn prepend_qubit(&self, a: [Complex<T>; 2]) -> Self {
        let mut amps = Vec::with_capacity(2 * self.dim());
        for c in a {
            amps.extend(self.amps.iter().map(|&z| c * z));
        }
        Self { amps }
    }
}
