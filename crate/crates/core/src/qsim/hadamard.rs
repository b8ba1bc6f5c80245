//! Ancilla interferometry for `W = ⟨gs| U_gs† σ^β U_ex σ^α |gs⟩`.
//!
//! The circuit acts on `(a, 1, 2)`: Hadamard on the ancilla, `σ^α` on site 1
//! controlled by the ancilla, the conditional evolution `e^{−iH_eff t}`,
//! controlled `σ^β`, then a basis change on the ancilla before a Z readout.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qsim::{trotter2_evolve, Evolver, ExactPropagator, Pauli, PauliHamiltonian, PauliString, StateVector};
use crate::scalar::Real;

/// Finite sampling of each ancilla expectation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotConfig {
    /// `None` returns exact expectations.
    pub shots: Option<u64>,
    pub seed: u64,
}

impl ShotConfig {
    pub const EXACT: ShotConfig = ShotConfig { shots: None, seed: 0 };

    pub fn new(shots: Option<u64>, seed: u64) -> Result<Self> {
        if shots == Some(0) {
            return invalid("shot count must be at least 1");
        }
        Ok(Self { shots, seed })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Readout {
    /// `H` then Z: gives `Re W`.
    Z,
    /// `S†`, `H`, then Z: gives `Im W`.
    MinusY,
}

/// Ancilla expectations `(E_Z, E_{−Y}) = (Re W, Im W)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HadamardOutcome<T> {
    pub e_z: T,
    pub e_minus_y: T,
}

impl<T: Real> HadamardOutcome<T> {
    pub fn as_complex(&self) -> Complex<T> {
        Complex::new(self.e_z, self.e_minus_y)
    }
}

/// Reusable interferometer for one effective Hamiltonian and ground state.
#[derive(Clone, Debug)]
pub struct HadamardTest<T: Real> {
    h_eff: PauliHamiltonian<T>,
    gs: StateVector<T>,
    evolver: Evolver,
    exact: Option<ExactPropagator<T>>,
}

impl<T: Real> HadamardTest<T> {
    pub fn new(h_eff: &PauliHamiltonian<T>, gs: &StateVector<T>, evolver: Evolver) -> Result<Self> {
        if h_eff.n_qubits() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, got: h_eff.n_qubits() });
        }
        if gs.n_qubits() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: gs.n_qubits() });
        }
        if let Evolver::Trotter2 { steps: 0 } = evolver {
            return invalid("trotter steps must be at least 1");
        }
        let exact = matches!(evolver, Evolver::Exact).then(|| ExactPropagator::new(h_eff));
        Ok(Self { h_eff: h_eff.clone(), gs: gs.clone(), evolver, exact })
    }

    pub fn evolver(&self) -> Evolver {
        self.evolver
    }

    /// Three-qubit state just before the ancilla basis change.
    fn interfered(&self, alpha: Pauli, beta: Pauli, t: T) -> Result<Vec<Complex<T>>> {
        let (sa, sb) = (site_pauli(alpha)?, site_pauli(beta)?);
        let h = T::one() / T::of(2.0).sqrt();
        let plus = Complex::new(h, T::zero());
        let mut psi = self.gs.prepend_qubit([plus, plus]).into_amplitudes();
        apply_upper(&mut psi, &sa)?;
        let state = StateVector::from_raw(psi);
        let evolved = match (&self.exact, self.evolver) {
            (Some(p), _) => p.evolve(t, &state)?,
            (None, Evolver::Trotter2 { steps }) => trotter2_evolve(&self.h_eff, t, steps, &state)?,
            (None, Evolver::Exact) => unreachable!("propagator is built for the exact evolver"),
        };
        let mut psi = evolved.into_amplitudes();
        apply_upper(&mut psi, &sb)?;
        Ok(psi)
    }

    /// Exact `P(0) − P(1)` of the ancilla after the given readout.
    pub fn exact_expectation(&self, alpha: Pauli, beta: Pauli, t: T, readout: Readout) -> Result<T> {
        let mut psi = self.interfered(alpha, beta, t)?;
        let half = psi.len() / 2;
        if readout == Readout::MinusY {
            for z in &mut psi[half..] {
                *z = Complex::new(z.im, -z.re);
            }
        }
        let h = T::one() / T::of(2.0).sqrt();
        let (mut p0, mut p1) = (T::zero(), T::zero());
        for k in 0..half {
            let (a, b) = (psi[k], psi[k + half]);
            p0 += ((a + b) * h).norm_sqr();
            p1 += ((a - b) * h).norm_sqr();
        }
        Ok(p0 - p1)
    }

    pub fn run(&self, alpha: Pauli, beta: Pauli, t: T, shot: ShotConfig) -> Result<HadamardOutcome<T>> {
        let mut out = [T::zero(); 2];
        for (slot, readout) in out.iter_mut().zip([Readout::Z, Readout::MinusY]) {
            let e = self.exact_expectation(alpha, beta, t, readout)?;
            *slot = match shot.shots {
                None => e,
                Some(n) => sample_expectation(e, n, substream_seed(shot.seed, t.as_f64(), alpha, beta, readout))?,
            };
        }
        Ok(HadamardOutcome { e_z: out[0], e_minus_y: out[1] })
    }
}

/// One-shot convenience over [`HadamardTest`].
pub fn hadamard_test<T: Real>(
    h_eff: &PauliHamiltonian<T>,
    gs: &StateVector<T>,
    alpha: Pauli,
    beta: Pauli,
    t: T,
    evolver: Evolver,
    shot: ShotConfig,
) -> Result<HadamardOutcome<T>> {
    HadamardTest::new(h_eff, gs, evolver)?.run(alpha, beta, t, shot)
}

fn site_pauli(p: Pauli) -> Result<PauliString> {
    match p {
        Pauli::X | Pauli::Y => Ok(PauliString::single(2, 0, p)),
        other => invalid(format!("interferometer Pauli must be X or Y, got {}", other.as_char())),
    }
}

/// Applies a two-qubit string to the ancilla-1 block.
fn apply_upper<T: Real>(psi: &mut [Complex<T>], p: &PauliString) -> Result<()> {
    let half = psi.len() / 2;
    let out = p.apply(&psi[half..])?;
    psi[half..].copy_from_slice(&out);
    Ok(())
}

/// Mean of `shots` ±1 outcomes with `P(+1) = (1 + e)/2`.
fn sample_expectation<T: Real>(e: T, shots: u64, seed: u64) -> Result<T> {
    let p = ((1.0 + e.as_f64()) / 2.0).clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Binomial::new(shots, p).map_err(|err| Error::InvalidArgument(err.to_string()))?;
    let k = dist.sample(&mut rng) as f64;
    Ok(T::of(2.0 * k / shots as f64 - 1.0))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent RNG stream per `(seed, t, α, β, readout)`.
fn substream_seed(seed: u64, t: f64, alpha: Pauli, beta: Pauli, readout: Readout) -> u64 {
    let tag = (alpha.as_char() as u64) << 16 | (beta.as_char() as u64) << 8 | readout as u64;
    splitmix(splitmix(splitmix(seed) ^ t.to_bits()) ^ tag)
}
