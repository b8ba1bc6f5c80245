//! Line spectra, sampled signals, and the map between physical `(t, ω)`
//! coordinates and the canonical `(j, f)` coordinates used by the estimators.
//!
//! Physical frequencies are angular (rad per time unit); canonical frequencies
//! are cyclic and live in `[0, 1)`. The factor `2π` between the two is only
//! ever applied inside [`RescaleMap`].
//!
//! Physical signals are stored without the `-iΘ(t)` prefactor of the retarded
//! Green's function, i.e. `x(t) = Σ_l c_l e^{iω_l t}`.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qsim::PauliHamiltonian;
use crate::scalar::{cis, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Physical,
    Canonical,
}

impl Domain {
    fn name(self) -> &'static str {
        match self {
            Domain::Physical => "physical",
            Domain::Canonical => "canonical",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pole<T: Real> {
    pub amplitude: Complex<T>,
    /// Angular `ω` in the physical domain, cyclic `f` in the canonical one.
    pub frequency: T,
    /// `⟨l|Z|l⟩` for poles coming from the Green's-function oracle.
    pub z_expect: Option<T>,
}

impl<T: Real> Pole<T> {
    pub fn new(amplitude: Complex<T>, frequency: T) -> Self {
        Self { amplitude, frequency, z_expect: None }
    }

    pub fn real(amplitude: T, frequency: T) -> Self {
        Self::new(Complex::new(amplitude, T::zero()), frequency)
    }

    pub fn with_z(mut self, z: T) -> Self {
        self.z_expect = Some(z);
        self
    }
}

/// Finite set of poles `A(ω) = Σ_l c_l δ(ω − ω_l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineSpectrum<T: Real> {
    poles: Vec<Pole<T>>,
    domain: Domain,
}

impl<T: Real> LineSpectrum<T> {
    pub fn new(poles: Vec<Pole<T>>, domain: Domain) -> Result<Self> {
        for (i, p) in poles.iter().enumerate() {
            if !p.frequency.is_finite() || !p.amplitude.re.is_finite() || !p.amplitude.im.is_finite()
            {
                return invalid(format!("pole {i} has a non-finite component"));
            }
            if domain == Domain::Canonical && !(p.frequency >= T::zero() && p.frequency < T::one()) {
                return Err(Error::FrequencyOutOfRange(p.frequency.as_f64()));
            }
            if let Some(z) = p.z_expect {
                if !(z >= -T::one() - T::of(1e-9) && z <= T::one() + T::of(1e-9)) {
                    return invalid(format!("pole {i} has <Z> = {z} outside [-1, 1]"));
                }
            }
            for q in &poles[..i] {
                if q.frequency == p.frequency {
                    return invalid(format!("duplicate frequency {}", p.frequency));
                }
            }
        }
        Ok(Self { poles, domain })
    }

    pub fn empty(domain: Domain) -> Self {
        Self { poles: Vec::new(), domain }
    }

    pub fn poles(&self) -> &[Pole<T>] {
        &self.poles
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn frequencies(&self) -> Vec<T> {
        self.poles.iter().map(|p| p.frequency).collect()
    }

    /// Same poles ordered by increasing frequency.
    pub fn sorted(&self) -> Self {
        let mut poles = self.poles.clone();
        poles.sort_by(|a, b| a.frequency.partial_cmp(&b.frequency).unwrap());
        Self { poles, domain: self.domain }
    }

    /// True when every amplitude is real and non-negative.
    pub fn is_positive(&self) -> bool {
        self.poles
            .iter()
            .all(|p| p.amplitude.im == T::zero() && p.amplitude.re >= T::zero())
    }

    /// Two-sided physical spectrum of a particle-hole symmetric Green's
    /// function: each pole `(c, ω)` becomes `(c, ω)` and `(c, −ω)`.
    ///
    /// Poles at `ω = 0` are kept once.
    pub fn mirrored(&self) -> Result<Self> {
        if self.domain != Domain::Physical {
            return Err(Error::WrongDomain { expected: "physical" });
        }
        let mut poles = Vec::with_capacity(2 * self.poles.len());
        for p in &self.poles {
            poles.push(*p);
            if p.frequency != T::zero() {
                poles.push(Pole { frequency: -p.frequency, ..*p });
            }
        }
        Ok(Self::new(poles, Domain::Physical)?.sorted())
    }

    /// Keeps only poles whose amplitude modulus is at least `floor`.
    pub fn prune(&self, floor: T) -> Self {
        let poles = self
            .poles
            .iter()
            .filter(|p| p.amplitude.norm_sqr().sqrt() >= floor)
            .copied()
            .collect();
        Self { poles, domain: self.domain }
    }

    pub fn map_amplitudes(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        let poles = self
            .poles
            .iter()
            .map(|p| Pole { amplitude: f(p.amplitude), ..*p })
            .collect();
        Self { poles, domain: self.domain }
    }
}

/// Uniform time grid `t_j = t0 + j·dt`, `j = 0..n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingGrid<T: Real> {
    pub t0: T,
    pub n: usize,
    pub dt: T,
}

impl<T: Real> SamplingGrid<T> {
    pub fn new(t0: T, n: usize, dt: T) -> Result<Self> {
        if n == 0 {
            return invalid("sampling grid needs at least one sample");
        }
        if !(dt > T::zero()) || !dt.is_finite() || !t0.is_finite() {
            return invalid(format!("sampling spacing must be positive and finite, got {dt}"));
        }
        Ok(Self { t0, n, dt })
    }

    /// Integer grid `{0, …, n−1}`.
    pub fn canonical(n: usize) -> Result<Self> {
        Self::new(T::zero(), n, T::one())
    }

    pub fn time(&self, j: usize) -> T {
        self.t0 + T::of_usize(j) * self.dt
    }

    pub fn times(&self) -> Vec<T> {
        (0..self.n).map(|j| self.time(j)).collect()
    }

    pub fn t_max(&self) -> T {
        self.time(self.n - 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSignal<T: Real> {
    grid: SamplingGrid<T>,
    samples: Vec<Complex<T>>,
    domain: Domain,
}

impl<T: Real> TimeSignal<T> {
    pub fn new(grid: SamplingGrid<T>, samples: Vec<Complex<T>>, domain: Domain) -> Result<Self> {
        if samples.len() != grid.n {
            return Err(Error::DimensionMismatch { expected: grid.n, got: samples.len() });
        }
        Ok(Self { grid, samples, domain })
    }

    /// Canonical signal on the integer grid.
    pub fn canonical(samples: Vec<Complex<T>>) -> Result<Self> {
        let grid = SamplingGrid::canonical(samples.len())?;
        Self::new(grid, samples, Domain::Canonical)
    }

    pub fn grid(&self) -> &SamplingGrid<T> {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    pub fn map_samples(&self, mut f: impl FnMut(usize, Complex<T>) -> Complex<T>) -> Self {
        let samples = self.samples.iter().enumerate().map(|(j, &z)| f(j, z)).collect();
        Self { grid: self.grid, samples, domain: self.domain }
    }
}

/// Default energy window `[−2Σ|h_k|, 2Σ|h_k|]` for the poles of a Green's
/// function driven by `hamiltonian`.
pub fn energy_bounds<T: Real>(hamiltonian: &PauliHamiltonian<T>) -> Result<(T, T)> {
    if hamiltonian.terms().is_empty() {
        return Err(Error::EmptyHamiltonian);
    }
    let two = T::of(2.0);
    let norm = hamiltonian.coefficient_l1();
    Ok((-two * norm, two * norm))
}

/// Bijection between physical and canonical coordinates.
///
/// The energy window `[ω_a, ω_b]` is padded by half a gap on each side so the
/// wraparound of the unit circle never creates an artificially small gap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaleMap<T: Real> {
    pub omega_max: T,
    pub phi: T,
    pub t0: T,
    pub delta_omega: T,
    pub omega_a: T,
    pub omega_b: T,
}

impl<T: Real> RescaleMap<T> {
    /// Builds the map from an energy window and a lower bound on the number
    /// of distinct peaks, which fixes the gap estimate `(ω_b − ω_a)/(K − 1)`.
    pub fn new(omega_a: T, omega_b: T, n_peaks_min: usize, t0: T) -> Result<Self> {
        if n_peaks_min < 2 {
            return invalid(format!("need at least two peaks to define a gap, got {n_peaks_min}"));
        }
        if !(omega_b > omega_a) {
            return invalid(format!("empty energy window [{omega_a}, {omega_b}]"));
        }
        let gap = (omega_b - omega_a) / T::of_usize(n_peaks_min - 1);
        Self::with_gap(omega_a, omega_b, gap, t0)
    }

    /// Same as [`RescaleMap::new`] with an explicit gap estimate.
    pub fn with_gap(omega_a: T, omega_b: T, delta_omega: T, t0: T) -> Result<Self> {
        if !(omega_b > omega_a) {
            return invalid(format!("empty energy window [{omega_a}, {omega_b}]"));
        }
        if !(delta_omega > T::zero()) || !delta_omega.is_finite() {
            return invalid(format!("gap estimate must be positive, got {delta_omega}"));
        }
        let two_pi = T::two_pi();
        let omega_max = (omega_b - omega_a + delta_omega) / two_pi;
        let phi = (omega_a - delta_omega / T::of(2.0)) / (two_pi * omega_max);
        Ok(Self { omega_max, phi, t0, delta_omega, omega_a, omega_b })
    }

    /// Padded energy window `[ω_a − Δ_ω/2, ω_b + Δ_ω/2]`.
    pub fn padded_range(&self) -> (T, T) {
        let half = self.delta_omega / T::of(2.0);
        (self.omega_a - half, self.omega_b + half)
    }

    /// Sample spacing `1/Ω_max`.
    pub fn spacing(&self) -> T {
        T::one() / self.omega_max
    }

    pub fn grid(&self, n: usize) -> Result<SamplingGrid<T>> {
        SamplingGrid::new(self.t0, n, self.spacing())
    }

    /// Number of grid samples with `t_j ≤ t_max`: `⌊(t_max − t0)·Ω_max⌋ + 1`.
    pub fn samples_up_to(&self, t_max: T) -> usize {
        let span = (t_max - self.t0) * self.omega_max;
        if !(span >= T::zero()) {
            return 1;
        }
        // Absorb rounding when t_max sits exactly on a grid point.
        let span = span * (T::one() + T::of(1e-12));
        span.floor().to_usize().unwrap_or(0) + 1
    }

    /// Canonical frequency gap corresponding to an angular gap.
    pub fn gap_to_canonical(&self, delta_omega: T) -> T {
        delta_omega / (T::two_pi() * self.omega_max)
    }

    pub fn dft_phase_shift(&self) -> T {
        self.phi + T::of(0.5)
    }

    fn check_dt(&self, grid: &SamplingGrid<T>) -> Result<()> {
        let expected = self.spacing();
        if (grid.dt - expected).abs() > T::of(1e-9) * expected {
            return Err(Error::SpacingMismatch { expected: expected.as_f64(), got: grid.dt.as_f64() });
        }
        Ok(())
    }

    fn shift_signal(&self, signal: &TimeSignal<T>, phase: T) -> Result<TimeSignal<T>> {
        if signal.domain() != Domain::Physical {
            return Err(Error::WrongDomain { expected: "physical" });
        }
        self.check_dt(signal.grid())?;
        let grid = *signal.grid();
        let k = -T::two_pi() * phase * self.omega_max;
        let samples = signal
            .samples()
            .iter()
            .enumerate()
            .map(|(j, &x)| x * cis(k * grid.time(j)))
            .collect();
        TimeSignal::new(SamplingGrid::canonical(grid.n)?, samples, Domain::Canonical)
    }

    /// `x_j = x_j^{phys} e^{−i2πφΩ_max t_j}` on the integer grid.
    pub fn to_canonical(&self, signal: &TimeSignal<T>) -> Result<TimeSignal<T>> {
        self.shift_signal(signal, self.phi)
    }

    /// Canonical signal for the DFT convention, where frequencies are read in
    /// `[−1/2, 1/2)` and the phase shift is [`RescaleMap::dft_phase_shift`].
    pub fn to_canonical_dft(&self, signal: &TimeSignal<T>) -> Result<TimeSignal<T>> {
        self.shift_signal(signal, self.dft_phase_shift())
    }

    fn pole_forward(&self, pole: &Pole<T>, phase: T, centered: bool) -> Result<Pole<T>> {
        let mut f = pole.frequency / (T::two_pi() * self.omega_max) - phase;
        if centered {
            // Read f in [-1/2, 1/2) and store it in [0, 1).
            if f < T::zero() {
                f += T::one();
            }
        }
        // Absorb round-off right at the padded edges.
        let tol = T::of(1e-12);
        if f < T::zero() && f > -tol {
            f = T::zero();
        }
        if !(f >= T::zero() && f < T::one()) {
            return Err(Error::FrequencyOutOfRange(f.as_f64()));
        }
        let amp = pole.amplitude * cis(T::two_pi() * f_read(f, centered) * self.omega_max * self.t0);
        Ok(Pole { amplitude: amp, frequency: f, z_expect: pole.z_expect })
    }

    fn pole_backward(&self, pole: &Pole<T>, phase: T, centered: bool) -> Result<Pole<T>> {
        let f = pole.frequency;
        if !(f >= T::zero() && f < T::one()) {
            return Err(Error::FrequencyOutOfRange(f.as_f64()));
        }
        let fr = f_read(f, centered);
        let amp = pole.amplitude * cis(-T::two_pi() * fr * self.omega_max * self.t0);
        let omega = T::two_pi() * self.omega_max * (fr + phase);
        Ok(Pole { amplitude: amp, frequency: omega, z_expect: pole.z_expect })
    }

    fn map_spectrum(
        &self,
        spectrum: &LineSpectrum<T>,
        from: Domain,
        to: Domain,
        step: impl Fn(&Pole<T>) -> Result<Pole<T>>,
    ) -> Result<LineSpectrum<T>> {
        if spectrum.domain() != from {
            return Err(Error::WrongDomain { expected: from.name() });
        }
        let poles = spectrum.poles().iter().map(step).collect::<Result<Vec<_>>>()?;
        LineSpectrum::new(poles, to)
    }

    /// Physical pole `(c, ω)` to canonical `(c·e^{i2πfΩ_max t0}, f)`.
    pub fn spectrum_to_canonical(&self, spectrum: &LineSpectrum<T>) -> Result<LineSpectrum<T>> {
        self.map_spectrum(spectrum, Domain::Physical, Domain::Canonical, |p| {
            self.pole_forward(p, self.phi, false)
        })
    }

    /// Canonical estimate back to physical coordinates.
    pub fn from_canonical(&self, spectrum: &LineSpectrum<T>) -> Result<LineSpectrum<T>> {
        self.map_spectrum(spectrum, Domain::Canonical, Domain::Physical, |p| {
            self.pole_backward(p, self.phi, false)
        })
    }

    /// Inverse of [`RescaleMap::to_canonical_dft`] for a spectrum whose
    /// frequencies were stored in `[0, 1)` but are meant in `[−1/2, 1/2)`.
    pub fn from_canonical_dft(&self, spectrum: &LineSpectrum<T>) -> Result<LineSpectrum<T>> {
        let phase = self.dft_phase_shift();
        self.map_spectrum(spectrum, Domain::Canonical, Domain::Physical, |p| {
            self.pole_backward(p, phase, true)
        })
    }

    pub fn spectrum_to_canonical_dft(&self, spectrum: &LineSpectrum<T>) -> Result<LineSpectrum<T>> {
        let phase = self.dft_phase_shift();
        self.map_spectrum(spectrum, Domain::Physical, Domain::Canonical, |p| {
            self.pole_forward(p, phase, true)
        })
    }
}

#[inline]
fn f_read<T: Real>(f: T, centered: bool) -> T {
    if centered && f >= T::of(0.5) {
        f - T::one()
    } else {
        f
    }
}

/// Noiseless samples of the exponential sum on `grid`.
///
/// Physical: `x_j = Σ c_l e^{iω_l t_j}`; canonical: `x_j = Σ c_l e^{i2πf_l t_j}`.
pub fn synthesize_signal<T: Real>(
    spectrum: &LineSpectrum<T>,
    grid: &SamplingGrid<T>,
) -> Result<TimeSignal<T>> {
    let scale = match spectrum.domain() {
        Domain::Physical => T::one(),
        Domain::Canonical => T::two_pi(),
    };
    let samples = (0..grid.n)
        .map(|j| {
            let t = grid.time(j);
            spectrum
                .poles()
                .iter()
                .fold(Complex::new(T::zero(), T::zero()), |acc, p| {
                    acc + p.amplitude * cis(scale * p.frequency * t)
                })
        })
        .collect();
    TimeSignal::new(*grid, samples, spectrum.domain())
}

/// Adds circularly-symmetric complex Gaussian noise with `E|ε_j|² = σ²`.
pub fn add_noise<T: Real>(signal: &TimeSignal<T>, sigma: T, seed: u64) -> Result<TimeSignal<T>> {
    if !(sigma >= T::zero()) {
        return invalid(format!("noise level must be non-negative, got {sigma}"));
    }
    if sigma == T::zero() {
        return Ok(signal.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = sigma / T::of(2.0).sqrt();
    Ok(signal.map_samples(|_, z| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        z + Complex::new(T::of(re) * s, T::of(im) * s)
    }))
}

// ---------------------------------------------------------------- JSON

#[derive(Serialize, Deserialize)]
struct PoleJson {
    re: f64,
    im: f64,
    freq: f64,
    z: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct SignalJson {
    t0: f64,
    dt: f64,
    n: usize,
    samples: Vec<[f64; 2]>,
}

impl<T: Real> LineSpectrum<T> {
    /// `[{re, im, freq, z}, …]`.
    pub fn to_json(&self) -> serde_json::Value {
        let poles: Vec<PoleJson> = self
            .poles
            .iter()
            .map(|p| PoleJson {
                re: p.amplitude.re.as_f64(),
                im: p.amplitude.im.as_f64(),
                freq: p.frequency.as_f64(),
                z: p.z_expect.map(Real::as_f64),
            })
            .collect();
        serde_json::to_value(poles).expect("pole list serializes")
    }

    pub fn from_json(value: &serde_json::Value, domain: Domain) -> Result<Self> {
        let poles: Vec<PoleJson> = serde_json::from_value(value.clone())?;
        let poles = poles
            .into_iter()
            .map(|p| Pole {
                amplitude: Complex::new(T::of(p.re), T::of(p.im)),
                frequency: T::of(p.freq),
                z_expect: p.z.map(T::of),
            })
            .collect();
        Self::new(poles, domain)
    }
}

impl<T: Real> TimeSignal<T> {
    /// `{t0, dt, n, samples: [[re, im], …]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let doc = SignalJson {
            t0: self.grid.t0.as_f64(),
            dt: self.grid.dt.as_f64(),
            n: self.grid.n,
            samples: self.samples.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect(),
        };
        serde_json::to_value(doc).expect("signal serializes")
    }

    pub fn from_json(value: &serde_json::Value, domain: Domain) -> Result<Self> {
        let doc: SignalJson = serde_json::from_value(value.clone())?;
        let grid = SamplingGrid::new(T::of(doc.t0), doc.n, T::of(doc.dt))?;
        let samples = doc.samples.iter().map(|s| Complex::new(T::of(s[0]), T::of(s[1]))).collect();
        Self::new(grid, samples, domain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{PauliHamiltonian, PauliString};
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn impurity_map() -> RescaleMap<f64> {
        RescaleMap::new(-4.98, 4.98, 4, 0.0).unwrap()
    }

    #[test]
    fn energy_bounds_of_impurity_terms() {
        let mut h = PauliHamiltonian::new(3);
        for (coef, s) in [(1.0, "IZZ"), (0.75, "IIX"), (0.37, "IXI"), (0.37, "ZXI")] {
            h.add_term(coef, s.parse::<PauliString>().unwrap()).unwrap();
        }
        let (a, b) = energy_bounds(&h).unwrap();
        assert_relative_eq!(a, -4.98, epsilon = 1e-12);
        assert_relative_eq!(b, 4.98, epsilon = 1e-12);
    }

    #[test]
    fn energy_bounds_single_term_and_empty() {
        let mut h = PauliHamiltonian::new(1);
        h.add_term(0.5, "Z".parse().unwrap()).unwrap();
        assert_eq!(energy_bounds(&h).unwrap(), (-1.0, 1.0));
        let empty = PauliHamiltonian::<f64>::new(1);
        assert!(matches!(energy_bounds(&empty), Err(Error::EmptyHamiltonian)));
    }

    #[test]
    fn energy_bounds_contain_true_support() {
        // H = Z + X has eigenvalues ±√2, so transition energies lie in [−2√2, 2√2].
        let mut h = PauliHamiltonian::new(1);
        h.add_term(1.0, "Z".parse().unwrap()).unwrap();
        h.add_term(1.0, "X".parse().unwrap()).unwrap();
        let (a, b) = energy_bounds(&h).unwrap();
        assert_eq!((a, b), (-4.0, 4.0));
        let w = 2.0 * 2f64.sqrt();
        assert!(a <= -w && w <= b);
    }

    #[test]
    fn impurity_rescale_values() {
        let m = impurity_map();
        assert_relative_eq!(m.delta_omega, 3.32, epsilon = 1e-12);
        assert_relative_eq!(m.omega_max, 13.28 / (2.0 * std::f64::consts::PI), epsilon = 1e-12);
        assert_relative_eq!(m.omega_max, 2.1135, epsilon = 1e-4);
        assert_relative_eq!(m.phi, -0.5, epsilon = 1e-12);
        let (lo, hi) = m.padded_range();
        assert_relative_eq!(lo, -6.64, epsilon = 1e-12);
        assert_relative_eq!(hi, 6.64, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_window_two_peaks_gives_half_phase() {
        let m = RescaleMap::new(-3.0, 3.0, 2, 0.0).unwrap();
        assert_eq!(m.phi, -0.5);
        assert_eq!(m.dft_phase_shift(), 0.0);
    }

    #[test]
    fn rescale_rejects_bad_input() {
        assert!(RescaleMap::new(-1.0, 1.0, 1, 0.0).is_err());
        assert!(RescaleMap::new(1.0, 1.0, 3, 0.0).is_err());
        assert!(RescaleMap::with_gap(-1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn zero_to_two_pi_round_trip() {
        let m = RescaleMap::new(0.0, 2.0 * std::f64::consts::PI, 2, 0.0).unwrap();
        let s = LineSpectrum::new(vec![Pole::real(1.0, 1.0), Pole::real(0.5, 5.0)], Domain::Physical)
            .unwrap();
        let back = m.from_canonical(&m.spectrum_to_canonical(&s).unwrap()).unwrap();
        for (p, q) in s.poles().iter().zip(back.poles()) {
            assert_relative_eq!(p.frequency, q.frequency, epsilon = 1e-12);
            assert_relative_eq!(p.amplitude.re, q.amplitude.re, epsilon = 1e-12);
        }
    }

    #[test]
    fn dft_phase_shift_values() {
        let mut m = impurity_map();
        assert_relative_eq!(m.dft_phase_shift(), 0.0, epsilon = 1e-12);
        m.phi = 0.0;
        assert_eq!(m.dft_phase_shift(), 0.5);
        m.phi = -0.3;
        assert_relative_eq!(m.dft_phase_shift(), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn zero_frequency_maps_to_half() {
        let m = impurity_map();
        let grid = m.grid(8).unwrap();
        let s = LineSpectrum::new(vec![Pole::real(1.0, 0.0)], Domain::Physical).unwrap();
        let x = m.to_canonical(&synthesize_signal(&s, &grid).unwrap()).unwrap();
        for (j, z) in x.samples().iter().enumerate() {
            let expected = cis(std::f64::consts::PI * j as f64);
            assert_relative_eq!(z.re, expected.re, epsilon = 1e-12);
            assert_relative_eq!(z.im, expected.im, epsilon = 1e-12);
        }
        let cs = m.spectrum_to_canonical(&s).unwrap();
        assert_relative_eq!(cs.poles()[0].frequency, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn zero_phase_leaves_samples() {
        let m = RescaleMap { omega_max: 2.0, phi: 0.0, t0: 0.0, delta_omega: 1.0, omega_a: 0.5, omega_b: 12.0 };
        let grid = m.grid(5).unwrap();
        let sig = TimeSignal::new(grid, (0..5).map(|k| Complex::new(k as f64, -1.0)).collect(), Domain::Physical)
            .unwrap();
        let x = m.to_canonical(&sig).unwrap();
        assert_eq!(x.samples(), sig.samples());
    }

    #[test]
    fn spacing_mismatch_is_an_error() {
        let m = impurity_map();
        let grid = SamplingGrid::new(0.0, 4, 0.1).unwrap();
        let sig = TimeSignal::new(grid, vec![c(1.0); 4], Domain::Physical).unwrap();
        assert!(matches!(m.to_canonical(&sig), Err(Error::SpacingMismatch { .. })));
    }

    #[test]
    fn inverse_mapping_arithmetic() {
        let m = impurity_map();
        let f = 3.042 / (2.0 * std::f64::consts::PI * m.omega_max) + 0.5;
        assert_relative_eq!(f, 0.7291, epsilon = 1e-4);
        let s = LineSpectrum::new(vec![Pole::real(1.0, f)], Domain::Canonical).unwrap();
        let p = m.from_canonical(&s).unwrap();
        assert_relative_eq!(p.poles()[0].frequency, 3.042, epsilon = 1e-12);
        let centre = LineSpectrum::new(vec![Pole::real(1.0, 0.5)], Domain::Canonical).unwrap();
        assert_relative_eq!(m.from_canonical(&centre).unwrap().poles()[0].frequency, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn nonzero_t0_only_rotates_amplitudes() {
        let mut m = impurity_map();
        m.t0 = 0.37;
        let s = LineSpectrum::new(vec![Pole::real(0.8, 0.9), Pole::real(0.2, -2.0)], Domain::Physical)
            .unwrap();
        let cs = m.spectrum_to_canonical(&s).unwrap();
        for (p, q) in s.poles().iter().zip(cs.poles()) {
            assert_relative_eq!(p.amplitude.norm(), q.amplitude.norm(), epsilon = 1e-14);
        }
        assert!(cs.poles()[0].amplitude.im.abs() > 1e-3);
    }

    #[test]
    fn from_canonical_rejects_out_of_range() {
        let m = impurity_map();
        let s = LineSpectrum { poles: vec![Pole::real(1.0, 1.2)], domain: Domain::Canonical };
        assert!(matches!(m.from_canonical(&s), Err(Error::FrequencyOutOfRange(_))));
    }

    #[test]
    fn synthesized_canonical_atom() {
        let f = 0.213;
        let s = LineSpectrum::new(vec![Pole::real(1.0, f)], Domain::Canonical).unwrap();
        let x = synthesize_signal(&s, &SamplingGrid::canonical(12).unwrap()).unwrap();
        for (j, z) in x.samples().iter().enumerate() {
            let a = cis(2.0 * std::f64::consts::PI * f * j as f64);
            assert_relative_eq!((z - a).norm(), 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn impurity_poles_at_time_zero() {
        let half = LineSpectrum::new(
            vec![Pole::real(0.525, 0.548), Pole::real(0.475, 3.042)],
            Domain::Physical,
        )
        .unwrap();
        let full = half.mirrored().unwrap();
        assert_eq!(full.len(), 4);
        let grid = SamplingGrid::new(0.0, 1, 1.0).unwrap();
        let x = synthesize_signal(&full, &grid).unwrap();
        assert_relative_eq!(x.samples()[0].re, 2.0, epsilon = 1e-12);
        let x = synthesize_signal(&half, &grid).unwrap();
        assert_relative_eq!(x.samples()[0].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_amplitude_pole_is_invisible() {
        let grid = SamplingGrid::new(0.1, 9, 0.3).unwrap();
        let a = LineSpectrum::new(vec![Pole::real(0.7, 1.1)], Domain::Physical).unwrap();
        let b = LineSpectrum::new(vec![Pole::real(0.7, 1.1), Pole::real(0.0, 2.5)], Domain::Physical)
            .unwrap();
        assert_eq!(
            synthesize_signal(&a, &grid).unwrap().samples(),
            synthesize_signal(&b, &grid).unwrap().samples()
        );
    }

    #[test]
    fn noise_contract() {
        let sig = TimeSignal::canonical(vec![c(1.0); 256]).unwrap();
        assert_eq!(add_noise(&sig, 0.0, 3).unwrap(), sig);
        assert_eq!(add_noise(&sig, 0.1, 3).unwrap(), add_noise(&sig, 0.1, 3).unwrap());
        assert_ne!(add_noise(&sig, 0.1, 3).unwrap(), add_noise(&sig, 0.1, 4).unwrap());
        assert!(add_noise(&sig, -0.1, 3).is_err());
        let noisy = add_noise(&sig, 0.1, 11).unwrap();
        let power: f64 = noisy
            .samples()
            .iter()
            .map(|z| (z - c(1.0)).norm_sqr())
            .sum::<f64>()
            / 256.0;
        assert!((power - 0.01).abs() < 0.2 * 0.01, "noise power {power}");
    }

    #[test]
    fn spectrum_validation() {
        assert!(LineSpectrum::new(vec![Pole::real(1.0, 0.2), Pole::real(1.0, 0.2)], Domain::Physical).is_err());
        assert!(LineSpectrum::new(vec![Pole::real(1.0, 1.0)], Domain::Canonical).is_err());
        assert!(LineSpectrum::new(vec![Pole::real(1.0, 0.3).with_z(1.5)], Domain::Canonical).is_err());
        assert!(LineSpectrum::new(vec![Pole::real(1.0, 0.3).with_z(-1.0)], Domain::Canonical).is_ok());
    }

    #[test]
    fn samples_up_to_grid_rule() {
        let m = impurity_map();
        assert_eq!(m.samples_up_to(0.0), 1);
        assert_eq!(m.samples_up_to(1.5), 4);
        let t = 3.0 / m.omega_max;
        assert_eq!(m.samples_up_to(t), 4);
    }

    #[test]
    fn json_shapes() {
        let s = LineSpectrum::new(vec![Pole::real(0.5, 1.0).with_z(0.0)], Domain::Physical).unwrap();
        let v = s.to_json();
        assert_eq!(v[0]["re"], 0.5);
        assert_eq!(v[0]["freq"], 1.0);
        assert_eq!(v[0]["z"], 0.0);
        let back = LineSpectrum::<f64>::from_json(&v, Domain::Physical).unwrap();
        assert_eq!(back, s);

        let sig = TimeSignal::new(SamplingGrid::new(0.0, 2, 0.5).unwrap(), vec![c(1.0), Complex::new(0.0, -1.0)], Domain::Physical)
            .unwrap();
        let v = sig.to_json();
        assert_eq!(v["n"], 2);
        assert_eq!(v["samples"][1][1], -1.0);
        assert_eq!(TimeSignal::<f64>::from_json(&v, Domain::Physical).unwrap(), sig);
    }

    #[test]
    fn generic_over_f32() {
        let m = RescaleMap::<f32>::new(-4.98, 4.98, 4, 0.0).unwrap();
        assert!((m.phi + 0.5).abs() < 1e-6);
        let s = LineSpectrum::new(vec![Pole::real(1.0_f32, 0.548)], Domain::Physical).unwrap();
        let x = synthesize_signal(&s, &m.grid(6).unwrap()).unwrap();
        assert!((x.samples()[0].re - 1.0).abs() < 1e-6);
    }
}
