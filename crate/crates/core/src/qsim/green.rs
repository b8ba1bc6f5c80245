//! Green's-function assembly from interferometer expectations, the exact
//! pole oracle, and gate-error rescaling.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qsim::{
    build_hamiltonians, prepare_ground_state, Evolver, ExactPropagator, HadamardTest, ModelParams, Pauli,
    PauliString, ShotConfig,
};
use crate::scalar::Real;
use crate::spectrum::{Domain, LineSpectrum, Pole, SamplingGrid, TimeSignal};

/// Which Green's-function estimator a signal is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GreenKind {
    /// `G̃_sym(t) = Σ_l |a_l|² e^{iω_l t}`, one interferometer pair.
    Symmetric,
    /// `G̃_μ(t)` from all four `σ^α σ^β` combinations.
    General,
}

impl GreenKind {
    /// Exact value at `t = 0`.
    pub fn value_at_zero(self) -> f64 {
        match self {
            GreenKind::Symmetric => 1.0,
            GreenKind::General => 2.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GreenSampler<T: Real> {
    test: HadamardTest<T>,
}

impl<T: Real> GreenSampler<T> {
    pub fn new(params: ModelParams<T>, evolver: Evolver) -> Result<Self> {
        let h = build_hamiltonians(params);
        let gs = prepare_ground_state(params)?;
        Ok(Self { test: HadamardTest::new(&h.effective, &gs, evolver)? })
    }

    pub fn from_test(test: HadamardTest<T>) -> Self {
        Self { test }
    }

    /// `W^{αβ} = E_Z + iE_{−Y}`.
    fn w(&self, alpha: Pauli, beta: Pauli, t: T, shot: ShotConfig) -> Result<Complex<T>> {
        Ok(self.test.run(alpha, beta, t, shot)?.as_complex())
    }

    /// `E_Z^{xx} − iE_{−Y}^{xx}`.
    pub fn green_sym(&self, t: T, shot: ShotConfig) -> Result<Complex<T>> {
        Ok(self.w(Pauli::X, Pauli::X, t, shot)?.conj())
    }

    /// `G̃_μ = (A − iB) + conj(A + iB)` with `A = (W^{xx} + W^{yy})/2` and
    /// `B = (W^{xy} − W^{yx})/2`.
    pub fn green_general(&self, t: T, shot: ShotConfig) -> Result<Complex<T>> {
        let half = T::of(0.5);
        let xx = self.w(Pauli::X, Pauli::X, t, shot)?;
        let yy = self.w(Pauli::Y, Pauli::Y, t, shot)?;
        let xy = self.w(Pauli::X, Pauli::Y, t, shot)?;
        let yx = self.w(Pauli::Y, Pauli::X, t, shot)?;
        let a = (xx + yy) * half;
        let b = (xy - yx) * half;
        let i = Complex::new(T::zero(), T::one());
        Ok((a - i * b) + (a + i * b).conj())
    }

    pub fn sample(&self, kind: GreenKind, t: T, shot: ShotConfig) -> Result<Complex<T>> {
        match kind {
            GreenKind::Symmetric => self.green_sym(t, shot),
            GreenKind::General => self.green_general(t, shot),
        }
    }

    /// Physical-domain signal on `grid`.
    pub fn signal(&self, kind: GreenKind, grid: &SamplingGrid<T>, shot: ShotConfig) -> Result<TimeSignal<T>> {
        let samples = (0..grid.n).map(|j| self.sample(kind, grid.time(j), shot)).collect::<Result<Vec<_>>>()?;
        TimeSignal::new(*grid, samples, Domain::Physical)
    }
}

pub fn green_sym<T: Real>(params: ModelParams<T>, t: T, evolver: Evolver, shot: ShotConfig) -> Result<Complex<T>> {
    GreenSampler::new(params, evolver)?.green_sym(t, shot)
}

pub fn green_general<T: Real>(
    params: ModelParams<T>,
    t: T,
    evolver: Evolver,
    shot: ShotConfig,
) -> Result<Complex<T>> {
    GreenSampler::new(params, evolver)?.green_general(t, shot)
}

/// Exact poles of `G̃_sym` by diagonalizing the excited-sector Hamiltonian.
///
/// Each pole carries `|a_l|²`, `ω_l = E_l − E_0` and `⟨l|Z₁|l⟩`; degenerate
/// levels are merged and weights below `1e−12` dropped.
pub fn spectral_oracle<T: Real>(params: ModelParams<T>) -> Result<LineSpectrum<T>> {
    let h = build_hamiltonians(params);
    let ground = ExactPropagator::new(&h.ground);
    let e0 = ground.energies()[0];
    let gs = DVector::from_vec(ground.eigenvector(0));
    let x1 = PauliString::single(2, 0, Pauli::X).matrix::<T>();
    let z1 = PauliString::single(2, 0, Pauli::Z).matrix::<T>();
    let psi = &x1 * gs;

    let ex = ExactPropagator::new(&h.excited);
    let energies = ex.energies();
    let tol = T::of(1e-9);
    let floor = T::of(1e-12);
    let mut poles = Vec::new();
    let mut i = 0;
    while i < energies.len() {
        let mut j = i + 1;
        while j < energies.len() && (energies[j] - energies[i]).abs() < tol {
            j += 1;
        }
        let cols: Vec<_> = (i..j).map(|k| DVector::from_vec(ex.eigenvector(k))).collect();
        let basis = DMatrix::from_columns(&cols);
        let proj = &basis * (basis.adjoint() * &psi);
        let weight = proj.norm_squared();
        if weight >= floor {
            let z = (proj.adjoint() * &z1 * &proj)[(0, 0)].re / weight;
            let omega = energies[i] - e0;
            poles.push(Pole::real(weight, omega).with_z(z.max(-T::one()).min(T::one())));
        }
        i = j;
    }
    LineSpectrum::new(poles, Domain::Physical)
}

/// Exact poles of the signal produced for `kind`.
///
/// `Symmetric` is the oracle itself. `General` places `|a|²(1 − z)` at `+ω`
/// and `|a|²(1 + z)` at `−ω`.
pub fn truth_for<T: Real>(oracle: &LineSpectrum<T>, kind: GreenKind) -> Result<LineSpectrum<T>> {
    match kind {
        GreenKind::Symmetric => Ok(oracle.clone()),
        GreenKind::General => {
            let mut poles: Vec<Pole<T>> = Vec::new();
            for p in oracle.poles() {
                let w = p.amplitude.re;
                let z = p.z_expect.unwrap_or(T::zero());
                let sides = [(w * (T::one() - z), p.frequency), (w * (T::one() + z), -p.frequency)];
                for (c, f) in sides {
                    if let Some(q) = poles.iter_mut().find(|q| q.frequency == f) {
                        q.amplitude.re += c;
                    } else {
                        poles.push(Pole { amplitude: Complex::new(c, T::zero()), frequency: f, z_expect: p.z_expect });
                    }
                }
            }
            Ok(LineSpectrum::new(poles, Domain::Physical)?.sorted())
        }
    }
}

/// Estimates the uniform damping `α` of a signal whose exact value at `t0`
/// has modulus `reference`, and returns the signal divided by `α`.
///
/// With `n_fit = 1`, `α = |y_0| / reference`. With more points, `|y_j|` is
/// fitted by a line in `t_j²` and the intercept extrapolates to `t = 0`.
/// `α` is clamped to at most 1.
pub fn mitigate_gate_error<T: Real>(
    signal: &TimeSignal<T>,
    n_fit: usize,
    reference: T,
) -> Result<(TimeSignal<T>, T)> {
    if n_fit == 0 || n_fit > signal.len() {
        return invalid(format!("n_fit must lie in 1..={}, got {n_fit}", signal.len()));
    }
    if !(reference > T::zero()) {
        return invalid("reference magnitude must be positive");
    }
    let mags: Vec<T> = signal.samples()[..n_fit].iter().map(|z| z.norm_sqr().sqrt()).collect();
    let intercept = if n_fit == 1 {
        mags[0]
    } else {
        let grid = signal.grid();
        let a = DMatrix::from_fn(n_fit, 2, |j, k| if k == 0 { T::one() } else { grid.time(j) * grid.time(j) });
        let b = DVector::from_vec(mags);
        let sol = a
            .svd(true, true)
            .solve(&b, T::of(1e-14))
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        sol[0]
    };
    let alpha = intercept / reference;
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::BadScale(alpha.as_f64()));
    }
    let alpha = alpha.min(T::one());
    let inv = T::one() / alpha;
    Ok((signal.map_samples(|_, z| z * inv), alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::synthesize_signal;

    fn params() -> ModelParams<f64> {
        ModelParams::new(4.0, 0.745)
    }

    #[test]
    fn oracle_poles() {
        let ModelParams { u, v } = params();
        let e0 = -(u * u / 16.0 + 4.0 * v * v).sqrt();
        let e1 = (u * u / 16.0 + v * v).sqrt();
        let (w1, w2) = (-e1 - e0, e1 - e0);
        // first moment of the weights fixes the split between the two poles
        let gs = prepare_ground_state(params()).unwrap();
        let x1 = PauliString::single(2, 0, Pauli::X);
        let psi = DVector::from_vec(x1.apply(gs.amplitudes()).unwrap());
        let h_ex = build_hamiltonians(params()).excited.matrix();
        let m1 = (psi.adjoint() * h_ex * &psi)[(0, 0)].re - e0;
        let c1 = (w2 - m1) / (w2 - w1);

        let o = spectral_oracle(params()).unwrap().sorted();
        assert_eq!(o.len(), 2);
        let total: f64 = o.poles().iter().map(|p| p.amplitude.re).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for (p, (c, w)) in o.poles().iter().zip([(c1, w1), (1.0 - c1, w2)]) {
            assert!((p.amplitude.re - c).abs() < 1e-10, "{p:?}");
            assert!((p.frequency - w).abs() < 1e-10, "{p:?}");
            assert!(p.z_expect.unwrap().abs() < 1e-10);
        }
        // published values, quoted to three decimals
        for (p, (c, w)) in o.poles().iter().zip([(0.525, 0.548), (0.475, 3.042)]) {
            assert!((p.amplitude.re - c).abs() <= 1e-3, "{p:?}");
            assert!((p.frequency - w).abs() <= 1e-3, "{p:?}");
        }
    }

    #[test]
    fn sym_at_zero_and_conjugate_symmetry() {
        let s = GreenSampler::new(params(), Evolver::Exact).unwrap();
        let g0 = s.green_sym(0.0, ShotConfig::EXACT).unwrap();
        assert!((g0 - Complex::new(1.0, 0.0)).norm() < 1e-12);
        for t in [0.3, 1.7, 4.0] {
            let a = s.green_sym(t, ShotConfig::EXACT).unwrap();
            let b = s.green_sym(-t, ShotConfig::EXACT).unwrap();
            assert!((a.conj() - b).norm() < 1e-12);
        }
    }

    #[test]
    fn sym_matches_oracle_signal() {
        let oracle = spectral_oracle(params()).unwrap();
        let grid = SamplingGrid::new(-0.4, 24, 0.31).unwrap();
        let s = GreenSampler::new(params(), Evolver::Exact).unwrap();
        let sig = s.signal(GreenKind::Symmetric, &grid, ShotConfig::EXACT).unwrap();
        let syn = synthesize_signal(&oracle, &grid).unwrap();
        for (a, b) in sig.samples().iter().zip(syn.samples()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn general_matches_two_sided_oracle() {
        for p in [params(), ModelParams::new(1.5, -0.6)] {
            let truth = truth_for(&spectral_oracle(p).unwrap(), GreenKind::General).unwrap();
            let s = GreenSampler::new(p, Evolver::Exact).unwrap();
            assert!((s.green_general(0.0, ShotConfig::EXACT).unwrap() - Complex::new(2.0, 0.0)).norm() < 1e-12);
            let grid = SamplingGrid::new(-2.0, 17, 0.25).unwrap();
            let sig = s.signal(GreenKind::General, &grid, ShotConfig::EXACT).unwrap();
            let syn = synthesize_signal(&truth, &grid).unwrap();
            for (a, b) in sig.samples().iter().zip(syn.samples()) {
                assert!((a - b).norm() < 1e-10);
            }
            for t in [0.4, 2.2] {
                let a = s.green_general(t, ShotConfig::EXACT).unwrap();
                let b = s.green_general(-t, ShotConfig::EXACT).unwrap();
                assert!((a.conj() - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cross_terms_opposite() {
        let p = params();
        let h = build_hamiltonians(p);
        let gs = prepare_ground_state(p).unwrap();
        let test = HadamardTest::new(&h.effective, &gs, Evolver::Exact).unwrap();
        for t in [0.2, 0.9, 2.5] {
            let xy = test.run(Pauli::X, Pauli::Y, t, ShotConfig::EXACT).unwrap().as_complex();
            let yx = test.run(Pauli::Y, Pauli::X, t, ShotConfig::EXACT).unwrap().as_complex();
            let xx = test.run(Pauli::X, Pauli::X, t, ShotConfig::EXACT).unwrap().as_complex();
            let yy = test.run(Pauli::Y, Pauli::Y, t, ShotConfig::EXACT).unwrap().as_complex();
            assert!((yx + xy).norm() < 1e-10);
            assert!((xx - yy).norm() < 1e-10);
        }
    }

    #[test]
    fn mitigation_contract() {
        let grid = SamplingGrid::new(0.0, 8, 0.4).unwrap();
        let s = GreenSampler::new(params(), Evolver::Exact).unwrap();
        let clean = s.signal(GreenKind::Symmetric, &grid, ShotConfig::EXACT).unwrap();
        let (same, a) = mitigate_gate_error(&clean, 1, 1.0).unwrap();
        assert!((a - 1.0).abs() < 1e-12);
        assert_eq!(same.samples().len(), 8);
        let damped = clean.map_samples(|_, z| z * 0.8);
        let (fixed, a) = mitigate_gate_error(&damped, 1, 1.0).unwrap();
        assert!((a - 0.8).abs() < 1e-12);
        for (x, y) in fixed.samples().iter().zip(clean.samples()) {
            assert!((x - y).norm() < 1e-12);
        }
        let zero = clean.map_samples(|_, _| Complex::new(0.0, 0.0));
        assert!(matches!(mitigate_gate_error(&zero, 1, 1.0), Err(Error::BadScale(_))));
        assert!(mitigate_gate_error(&clean, 0, 1.0).is_err());
    }

    #[test]
    fn mitigation_fit_extrapolates() {
        // |y(t)| = 0.7 (1 − 0.1 t²) is recovered exactly by the quadratic fit.
        let grid = SamplingGrid::new(0.3f64, 6, 0.2).unwrap();
        let samples = grid.times().iter().map(|t| Complex::new(0.0, 0.7 * (1.0 - 0.1 * t * t))).collect();
        let sig = TimeSignal::new(grid, samples, Domain::Physical).unwrap();
        let (_, a) = mitigate_gate_error(&sig, 4, 1.0).unwrap();
        assert!((a - 0.7).abs() < 1e-12);
    }

    #[test]
    fn shot_noise_scale_near_one() {
        let grid = SamplingGrid::new(0.0, 4, 0.47).unwrap();
        let s = GreenSampler::new(params(), Evolver::trotter2()).unwrap();
        for seed in 0..5 {
            let sig = s.signal(GreenKind::Symmetric, &grid, ShotConfig::new(Some(100_000), seed).unwrap()).unwrap();
            let (_, a) = mitigate_gate_error(&sig, 1, 1.0).unwrap();
            assert!((a - 1.0).abs() < 0.03);
        }
    }
}
