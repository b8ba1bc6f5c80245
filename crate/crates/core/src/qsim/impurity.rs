//! Single-impurity model with one bath site, mapped to qubits.
//!
//! Site qubits are labelled 1 (impurity) and 2 (bath). The three-qubit
//! effective Hamiltonian carries an ancilla `a` in front, so its registers
//! read `(a, 1, 2)` from most to least significant bit.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::qsim::{PauliHamiltonian, StateVector};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub u: T,
    pub v: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(u: T, v: T) -> Self {
        Self { u, v }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImpurityHamiltonians<T: Real> {
    /// `(U/4)Z₁Z₂ + V(X₁ + X₂)`.
    pub ground: PauliHamiltonian<T>,
    /// `(U/4)Z₁Z₂ + V X₂`.
    pub excited: PauliHamiltonian<T>,
    /// `(U/4)Z₁Z₂ + V X₂ + V(1 + Z_a)/2 · X₁`, with terms stored in the
    /// order used by the product formula: `Z_aX₁, X₂, Z₁Z₂, X₁`.
    pub effective: PauliHamiltonian<T>,
}

pub fn build_hamiltonians<T: Real>(params: ModelParams<T>) -> ImpurityHamiltonians<T> {
    let ModelParams { u, v } = params;
    let q = u / T::of(4.0);
    let half_v = v / T::of(2.0);
    let build = |n: usize, terms: &[(T, &str)]| {
        terms.iter().fold(PauliHamiltonian::new(n), |h, &(c, s)| h.with(c, s).expect("static term"))
    };
    ImpurityHamiltonians {
        ground: build(2, &[(q, "ZZ"), (v, "XI"), (v, "IX")]),
        excited: build(2, &[(q, "ZZ"), (v, "IX")]),
        effective: build(3, &[(half_v, "ZXI"), (v, "IIX"), (q, "IZZ"), (half_v, "IXI")]),
    }
}

/// Ground-state rotation angle `θ = −2 sgn(V) arccos(1/√(1 + a²))` with
/// `a = (U + √(U² + 64V²)) / (8|V|)`.
pub fn ground_state_angle<T: Real>(params: ModelParams<T>) -> Result<T> {
    let ModelParams { u, v } = params;
    if v == T::zero() || !v.is_finite() || !u.is_finite() {
        return invalid(format!("ground-state angle needs finite V != 0, got V = {v}"));
    }
    let a = (u + (u * u + T::of(64.0) * v * v).sqrt()) / (T::of(8.0) * v.abs());
    let theta = -T::of(2.0) * (T::one() / (T::one() + a * a).sqrt()).acos();
    Ok(if v < T::zero() { -theta } else { theta })
}

/// `cos(θ/2)(|00⟩ + |11⟩)/√2 + sin(θ/2)(|01⟩ + |10⟩)/√2`.
pub fn prepare_ground_state<T: Real>(params: ModelParams<T>) -> Result<StateVector<T>> {
    let theta = ground_state_angle(params)?;
    let r = T::one() / T::of(2.0).sqrt();
    let c = Complex::new((theta / T::of(2.0)).cos() * r, T::zero());
    let s = Complex::new((theta / T::of(2.0)).sin() * r, T::zero());
    StateVector::normalized(vec![c, s, s, c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::ExactPropagator;
    use nalgebra::DMatrix;

    #[test]
    fn effective_coefficients() {
        let h = build_hamiltonians(ModelParams::new(4.0f64, 0.745));
        let e = &h.effective;
        assert_eq!(e.coefficient("IZZ"), Some(1.0));
        assert_eq!(e.coefficient("IIX"), Some(0.745));
        assert_eq!(e.coefficient("IXI"), Some(0.3725));
        assert_eq!(e.coefficient("ZXI"), Some(0.3725));
        assert!((e.coefficient_l1() - 2.49).abs() < 1e-12);
    }

    #[test]
    fn zero_parameters_give_zero_matrices() {
        let h = build_hamiltonians(ModelParams::new(0.0, 0.0));
        assert_eq!(h.effective.matrix().norm(), 0.0);
        assert_eq!(h.ground.matrix().norm(), 0.0);
        assert_eq!(h.excited.matrix().norm(), 0.0);
    }

    #[test]
    fn ancilla_blocks() {
        for (u, v) in [(4.0, 0.745), (-1.3, 2.0), (0.5, -0.4)] {
            let h = build_hamiltonians(ModelParams::new(u, v));
            let m: DMatrix<Complex<f64>> = h.effective.matrix();
            let top = m.view((0, 0), (4, 4)).into_owned();
            let bottom = m.view((4, 4), (4, 4)).into_owned();
            assert!((top - h.ground.matrix()).norm() < 1e-14);
            assert!((bottom - h.excited.matrix()).norm() < 1e-14);
            assert!(m.view((0, 4), (4, 4)).norm() < 1e-14);
        }
    }

    #[test]
    fn angle_at_zero_interaction() {
        let th = ground_state_angle(ModelParams::new(0.0, 1.0)).unwrap();
        assert!((th + std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!(ground_state_angle(ModelParams::new(4.0, 0.0)).is_err());
    }

    #[test]
    fn matches_exact_ground_state() {
        for (u, v) in [(4.0, 0.745), (0.0, 1.0), (8.0, 0.3), (-2.0, 1.1), (4.0, -0.745)] {
            let p: ModelParams<f64> = ModelParams::new(u, v);
            let gs = prepare_ground_state(p).unwrap();
            assert!((gs.norm() - 1.0).abs() < 1e-14);
            let prop = ExactPropagator::new(&build_hamiltonians(p).ground);
            let exact = StateVector::normalized(prop.eigenvector(0)).unwrap();
            let f = gs.fidelity(&exact).unwrap();
            assert!(f > 1.0 - 1e-10, "U={u} V={v}: fidelity {f}");
        }
    }
}
