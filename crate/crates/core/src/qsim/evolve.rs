use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qsim::{PauliHamiltonian, PauliString, StateVector};
use crate::scalar::{cis, Real};

/// How `e^{−iHt}` is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Evolver {
    Exact,
    Trotter2 { steps: usize },
}

impl Evolver {
    pub const DEFAULT_TROTTER_STEPS: usize = 2;

    pub fn trotter2() -> Self {
        Evolver::Trotter2 { steps: Self::DEFAULT_TROTTER_STEPS }
    }
}

/// Cached eigendecomposition `H = V diag(E) V†`.
#[derive(Clone, Debug)]
pub struct ExactPropagator<T: Real> {
    energies: Vec<T>,
    vectors: DMatrix<Complex<T>>,
}

impl<T: Real> ExactPropagator<T> {
    pub fn new(h: &PauliHamiltonian<T>) -> Self {
        Self::from_matrix(h.matrix())
    }

    pub fn from_matrix(m: DMatrix<Complex<T>>) -> Self {
        let dim = m.nrows();
        let eig = m.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(dim, order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
        Self { energies, vectors }
    }

    /// Eigenvalues in ascending order.
    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    /// Eigenvector `k` (ascending energy) as a column.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex<T>> {
        self.vectors.column(k).iter().copied().collect()
    }

    pub fn evolve(&self, t: T, state: &StateVector<T>) -> Result<StateVector<T>> {
        let dim = self.energies.len();
        if state.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: state.dim() });
        }
        let psi = DVector::from_column_slice(state.amplitudes());
        let mut coeffs = self.vectors.adjoint() * psi;
        for (c, &e) in coeffs.iter_mut().zip(&self.energies) {
            *c *= cis(-e * t);
        }
        let out = &self.vectors * coeffs;
        Ok(StateVector::from_raw(out.iter().copied().collect()))
    }
}

/// `e^{−iHt}|ψ⟩` by dense Hermitian eigendecomposition.
pub fn exact_evolve<T: Real>(h: &PauliHamiltonian<T>, t: T, state: &StateVector<T>) -> Result<StateVector<T>> {
    ExactPropagator::new(h).evolve(t, state)
}

/// `e^{−iθP}|ψ⟩ = cos θ |ψ⟩ − i sin θ P|ψ⟩`.
pub fn pauli_exp<T: Real>(p: &PauliString, theta: T, psi: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let pp = p.apply(psi)?;
    let (s, c) = (theta.sin(), theta.cos());
    Ok(psi
        .iter()
        .zip(pp)
        .map(|(&a, b)| a * c + Complex::new(b.im * s, -b.re * s))
        .collect())
}

/// Second-order Suzuki product for `e^{−iHt}`.
///
/// Each of the `steps` slices of length `δ = t/steps` applies the terms in
/// their stored order with angle `h_k δ/2`, then in reverse order with the
/// same angle.
pub fn trotter2_evolve<T: Real>(
    h: &PauliHamiltonian<T>,
    t: T,
    steps: usize,
    state: &StateVector<T>,
) -> Result<StateVector<T>> {
    if steps == 0 {
        return invalid("trotter steps must be at least 1");
    }
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: state.dim() });
    }
    let half = t / T::of_usize(steps) / T::of(2.0);
    let mut psi = state.amplitudes().to_vec();
    for _ in 0..steps {
        for (c, p) in h.terms() {
            psi = pauli_exp(p, *c * half, &psi)?;
        }
        for (c, p) in h.terms().iter().rev() {
            psi = pauli_exp(p, *c * half, &psi)?;
        }
    }
    Ok(StateVector::from_raw(psi))
}

/// Applies `e^{−iHt}` with the requested method.
pub fn evolve<T: Real>(
    h: &PauliHamiltonian<T>,
    t: T,
    state: &StateVector<T>,
    evolver: Evolver,
) -> Result<StateVector<T>> {
    match evolver {
        Evolver::Exact => exact_evolve(h, t, state),
        Evolver::Trotter2 { steps } => trotter2_evolve(h, t, steps, state),
    }
}
