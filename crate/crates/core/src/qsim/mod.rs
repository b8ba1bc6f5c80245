//! Statevector simulation of the single-impurity model.

mod evolve;
mod green;
mod hadamard;
mod impurity;
mod pauli;
mod state;

pub use evolve::{evolve, exact_evolve, pauli_exp, trotter2_evolve, Evolver, ExactPropagator};
pub use green::{
    green_general, green_sym, mitigate_gate_error, spectral_oracle, truth_for, GreenKind, GreenSampler,
};
pub use hadamard::{hadamard_test, HadamardOutcome, HadamardTest, Readout, ShotConfig};
pub use impurity::{build_hamiltonians, ground_state_angle, prepare_ground_state, ImpurityHamiltonians, ModelParams};
pub use pauli::{Pauli, PauliHamiltonian, PauliString};
pub use state::StateVector;
