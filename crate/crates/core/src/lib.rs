//! Sparse line-spectrum recovery for Green's-function signals.
//!
//! The crate is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix it to `f64`.

pub mod anm;
pub mod dft;
pub mod error;
pub mod metrics;
pub mod qsim;
pub mod scalar;
pub mod spectrum;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;

pub type PoleF64 = spectrum::Pole<f64>;
pub type LineSpectrumF64 = spectrum::LineSpectrum<f64>;
pub type SamplingGridF64 = spectrum::SamplingGrid<f64>;
pub type TimeSignalF64 = spectrum::TimeSignal<f64>;
pub type RescaleMapF64 = spectrum::RescaleMap<f64>;
pub type PauliHamiltonianF64 = qsim::PauliHamiltonian<f64>;
pub type StateVectorF64 = qsim::StateVector<f64>;
pub type AnmConfigF64 = anm::AnmConfig<f64>;
pub type DenoisedSolutionF64 = anm::DenoisedSolution<f64>;

pub type LineSpectrumF32 = spectrum::LineSpectrum<f32>;
pub type TimeSignalF32 = spectrum::TimeSignal<f32>;
pub type RescaleMapF32 = spectrum::RescaleMap<f32>;
