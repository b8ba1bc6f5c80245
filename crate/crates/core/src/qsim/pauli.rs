use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Action on a single bit: `P|b⟩ = phase · |b'⟩`.
    #[inline]
    fn act<T: Real>(self, bit: bool) -> (bool, Complex<T>) {
        let one = Complex::new(T::one(), T::zero());
        match self {
            Pauli::I => (bit, one),
            Pauli::X => (!bit, one),
            // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
            Pauli::Y => (!bit, Complex::new(T::zero(), if bit { -T::one() } else { T::one() })),
            Pauli::Z => (bit, if bit { -one } else { one }),
        }
    }
}

/// Tensor product of single-qubit Paulis; letter `k` acts on qubit `k`, and
/// qubit 0 is the most significant bit of the basis index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return invalid("pauli string needs at least one qubit");
        }
        Ok(Self { letters })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { letters: vec![Pauli::I; n_qubits] }
    }

    /// Single Pauli `p` on qubit `q`, identity elsewhere.
    pub fn single(n_qubits: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n_qubits);
        s.letters[q] = p;
        s
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_diagonal(&self) -> bool {
        self.letters.iter().all(|p| matches!(p, Pauli::I | Pauli::Z))
    }

    /// `(P|basis⟩` as `(phase, target index)`.
    #[inline]
    pub fn act_on_basis<T: Real>(&self, basis: usize) -> (Complex<T>, usize) {
        let n = self.letters.len();
        let mut phase = Complex::new(T::one(), T::zero());
        let mut out = basis;
        for (q, p) in self.letters.iter().enumerate() {
            let shift = n - 1 - q;
            let bit = (basis >> shift) & 1 == 1;
            let (nb, ph) = p.act::<T>(bit);
            phase *= ph;
            if nb != bit {
                out ^= 1 << shift;
            }
        }
        (phase, out)
    }

    /// `P·ψ` on a raw amplitude vector of length `2^len`.
    pub fn apply<T: Real>(&self, psi: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let dim = 1usize << self.letters.len();
        if psi.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: psi.len() });
        }
        let mut out = vec![Complex::new(T::zero(), T::zero()); dim];
        for (b, &amp) in psi.iter().enumerate() {
            let (ph, t) = self.act_on_basis::<T>(b);
            out[t] += ph * amp;
        }
        Ok(out)
    }

    pub fn matrix<T: Real>(&self) -> DMatrix<Complex<T>> {
        let dim = 1usize << self.letters.len();
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            let (ph, t) = self.act_on_basis::<T>(b);
            m[(t, b)] = ph;
        }
        m
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::InvalidArgument(format!("bad pauli letter {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// `H = Σ_k h_k P_k` with real coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliHamiltonian<T: Real> {
    n_qubits: usize,
    terms: Vec<(T, PauliString)>,
}

impl<T: Real> PauliHamiltonian<T> {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, terms: Vec::new() }
    }

    pub fn add_term(&mut self, coefficient: T, string: PauliString) -> Result<()> {
        if string.len() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, got: string.len() });
        }
        if !coefficient.is_finite() {
            return invalid("hamiltonian coefficient must be finite");
        }
        self.terms.push((coefficient, string));
        Ok(())
    }

    /// Builder-style [`add_term`](Self::add_term) from a letter string.
    pub fn with(mut self, coefficient: T, letters: &str) -> Result<Self> {
        self.add_term(coefficient, letters.parse()?)?;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn terms(&self) -> &[(T, PauliString)] {
        &self.terms
    }

    pub fn coefficient(&self, letters: &str) -> Option<T> {
        self.terms.iter().find(|(_, s)| s.to_string() == letters).map(|(c, _)| *c)
    }

    pub fn coefficient_l1(&self) -> T {
        self.terms.iter().fold(T::zero(), |acc, (c, _)| acc + c.abs())
    }

    pub fn matrix(&self) -> DMatrix<Complex<T>> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (c, s) in &self.terms {
            for b in 0..dim {
                let (ph, t) = s.act_on_basis::<T>(b);
                m[(t, b)] += ph * *c;
            }
        }
        m
    }
}
