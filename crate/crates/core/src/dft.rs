//! Zero-padded DFT with highest-first Dirichlet-kernel peak subtraction.
//!
//! A canonical atom `c·a(f)` has padded spectrum `c·K(f − f_k)` on the bins
//! `f_k = k/(pad·n)`, where `K(δ) = Σ_j e^{i2πδj}` is the periodic Dirichlet
//! kernel. Each pass fits `(c, f)` to the bins around the strongest residual
//! peak and subtracts the fitted kernel from the whole spectrum.

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{cis, wrap_unit, Real};
use crate::spectrum::{Domain, LineSpectrum, Pole, TimeSignal};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DftConfig {
    pub pad_factor: usize,
    pub max_peaks: usize,
    pub stop_fraction: f64,
    pub fit_halfwidth: usize,
    /// Extra sweeps re-fitting every extracted peak against the residual of
    /// the others. Zero gives plain CLEAN.
    pub refit_passes: usize,
}

impl Default for DftConfig {
    fn default() -> Self {
        Self { pad_factor: 16, max_peaks: 8, stop_fraction: 0.05, fit_halfwidth: 3, refit_passes: 0 }
    }
}

impl DftConfig {
    fn validate(&self) -> Result<()> {
        if self.pad_factor == 0 || self.max_peaks == 0 || self.fit_halfwidth == 0 {
            return invalid("pad_factor, max_peaks and fit_halfwidth must be positive");
        }
        if !(self.stop_fraction > 0.0 && self.stop_fraction < 1.0) {
            return invalid("stop_fraction must lie in (0, 1)");
        }
        Ok(())
    }
}

fn check<T: Real>(y: &TimeSignal<T>) -> Result<()> {
    if y.domain() != Domain::Canonical {
        return Err(Error::WrongDomain { expected: "canonical" });
    }
    if y.is_empty() {
        return invalid("empty signal");
    }
    Ok(())
}

/// Raw padded DFT `Y_k = Σ_j y_j e^{−i2πjk/(pad·n)}`, bins in natural order.
fn raw_spectrum<T: Real>(samples: &[Complex<T>], len: usize) -> Vec<Complex<T>> {
    let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
    buf[..samples.len()].copy_from_slice(samples);
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    buf
}

/// Padded spectrum on the centred axis `[−1/2, 1/2)`.
pub fn padded_spectrum<T: Real>(y: &TimeSignal<T>, config: &DftConfig) -> Result<(Vec<T>, Vec<Complex<T>>)> {
    check(y)?;
    config.validate()?;
    let len = config.pad_factor * y.len();
    let raw = raw_spectrum(y.samples(), len);
    let half = len / 2;
    let mut freqs = Vec::with_capacity(len);
    let mut values = Vec::with_capacity(len);
    for i in 0..len {
        let k = (i + len - half) % len;
        let signed = i as f64 - half as f64;
        freqs.push(T::of(signed / len as f64));
        values.push(raw[k]);
    }
    Ok((freqs, values))
}

/// `K(δ) = Σ_{j<n} e^{i2πδj}`.
pub fn dirichlet<T: Real>(delta: T, n: usize) -> Complex<T> {
    let x = T::pi() * delta;
    let s = x.sin();
    let phase = cis(x * T::of_usize(n - 1));
    if s.abs() < T::of(1e-12) {
        // Integer δ: every term equals 1.
        return Complex::new(T::of_usize(n), T::zero());
    }
    phase * ((x * T::of_usize(n)).sin() / s)
}

struct Fit<T> {
    c: Complex<T>,
    f: T,
}

/// `(K(δ), K'(δ))` by direct summation.
fn kernel_pair<T: Real>(delta: T, n: usize) -> (Complex<T>, Complex<T>) {
    let w = T::two_pi() * delta;
    let mut k = Complex::new(T::zero(), T::zero());
    let mut dk = k;
    for j in 0..n {
        let jf = T::of_usize(j);
        let e = cis(w * jf);
        k += e;
        dk += Complex::new(-e.im, e.re) * (T::two_pi() * jf);
    }
    (k, dk)
}

/// Best `(c, f)` for the bins `k0 ± w` of `spec`, with `f` searched in
/// `[f_{k0} − bin, f_{k0} + bin]`.
///
/// For fixed `f` the amplitude is linear least squares, leaving the explained
/// power `g(f) = |N|²/D` to maximize; the root of `g'` is bracketed and then
/// bisected, falling back to golden-section search when no sign change exists.
fn fit_kernel<T: Real>(spec: &[Complex<T>], k0: usize, n: usize, w: usize, iters: usize) -> Fit<T> {
    let len = spec.len();
    let bin = T::one() / T::of_usize(len);
    let bins: Vec<(T, Complex<T>)> = (0..=2 * w)
        .map(|o| {
            let k = (k0 + len + o - w) % len;
            let off = T::of_usize(o) - T::of_usize(w);
            (T::of_usize(k0) * bin + off * bin, spec[k])
        })
        .collect();
    // (c, g, g')
    let eval = |f: T| -> (Complex<T>, T, T) {
        let zero = Complex::new(T::zero(), T::zero());
        let (mut num, mut dnum) = (zero, zero);
        let (mut den, mut dden) = (T::zero(), T::zero());
        for &(fk, r) in &bins {
            let (kk, dk) = kernel_pair(f - fk, n);
            num += kk.conj() * r;
            dnum += dk.conj() * r;
            den += kk.norm_sqr();
            dden += T::of(2.0) * (kk.conj() * dk).re;
        }
        let g = num.norm_sqr() / den;
        let dg = (T::of(2.0) * (num.conj() * dnum).re * den - num.norm_sqr() * dden) / (den * den);
        (num / den, g, dg)
    };
    let f0 = T::of_usize(k0) * bin;
    let (mut a, mut b) = (f0 - bin, f0 + bin);
    let mut f = if eval(a).2 > T::zero() && eval(b).2 < T::zero() {
        for _ in 0..iters {
            let m = (a + b) / T::of(2.0);
            if eval(m).2 > T::zero() {
                a = m;
            } else {
                b = m;
            }
        }
        (a + b) / T::of(2.0)
    } else {
        let r = (T::of(5.0).sqrt() - T::one()) / T::of(2.0);
        let mut c1 = b - r * (b - a);
        let mut d1 = a + r * (b - a);
        let (mut g1, mut g2) = (eval(c1).1, eval(d1).1);
        for _ in 0..iters {
            if g1 >= g2 {
                b = d1;
                d1 = c1;
                g2 = g1;
                c1 = b - r * (b - a);
                g1 = eval(c1).1;
            } else {
                a = c1;
                c1 = d1;
                g1 = g2;
                d1 = a + r * (b - a);
                g2 = eval(d1).1;
            }
        }
        (a + b) / T::of(2.0)
    };
    if eval(f0).1 >= eval(f).1 {
        f = f0;
    }
    Fit { c: eval(f).0, f }
}

fn subtract<T: Real>(spec: &mut [Complex<T>], fit: &Fit<T>, n: usize, sign: T) {
    let len = spec.len();
    let bin = T::one() / T::of_usize(len);
    for (k, z) in spec.iter_mut().enumerate() {
        *z -= fit.c * dirichlet(fit.f - T::of_usize(k) * bin, n) * sign;
    }
}

fn arg_max<T: Real>(spec: &[Complex<T>]) -> (usize, T) {
    spec.iter()
        .enumerate()
        .map(|(k, z)| (k, z.norm_sqr().sqrt()))
        .fold((0, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best })
}

/// Trace of a CLEAN run, mainly for tests.
#[derive(Clone, Debug)]
pub struct CleanTrace<T: Real> {
    pub spectrum: LineSpectrum<T>,
    /// Max residual magnitude before each extraction.
    pub peak_history: Vec<T>,
}

pub fn clean_with_trace<T: Real>(y: &TimeSignal<T>, config: &DftConfig) -> Result<CleanTrace<T>> {
    check(y)?;
    config.validate()?;
    let n = y.len();
    let len = config.pad_factor * n;
    let mut spec = raw_spectrum(y.samples(), len);
    let golden = 100;
    let mut fits: Vec<Fit<T>> = Vec::new();
    let mut history = Vec::new();
    let mut first = T::zero();
    while fits.len() < config.max_peaks {
        let (k0, peak) = arg_max(&spec);
        if fits.is_empty() {
            first = peak;
        }
        if !(peak > T::zero()) || peak < T::of(config.stop_fraction) * first {
            break;
        }
        history.push(peak);
        let fit = fit_kernel(&spec, k0, n, config.fit_halfwidth, golden);
        subtract(&mut spec, &fit, n, T::one());
        fits.push(fit);
    }
    for _ in 0..config.refit_passes {
        for i in 0..fits.len() {
            subtract(&mut spec, &fits[i], n, -T::one());
            let bin = T::one() / T::of_usize(len);
            let k0 = (wrap_unit(fits[i].f) / bin).round().to_usize().unwrap_or(0) % len;
            let fit = fit_kernel(&spec, k0, n, config.fit_halfwidth, golden);
            subtract(&mut spec, &fit, n, T::one());
            fits[i] = fit;
        }
    }
    let mut poles: Vec<Pole<T>> = Vec::new();
    for fit in fits {
        let f = wrap_unit(fit.f);
        match poles.iter_mut().find(|p| p.frequency == f) {
            Some(p) => p.amplitude += fit.c,
            None => poles.push(Pole::new(fit.c, f)),
        }
    }
    Ok(CleanTrace { spectrum: LineSpectrum::new(poles, Domain::Canonical)?, peak_history: history })
}

/// CLEAN extraction; frequencies are returned in `[0, 1)`.
pub fn extract_peaks_clean<T: Real>(y: &TimeSignal<T>, config: &DftConfig) -> Result<LineSpectrum<T>> {
    Ok(clean_with_trace(y, config)?.spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anm::atom;
    use crate::scalar::wrap_distance;

    fn sig(poles: &[(Complex<f64>, f64)], n: usize) -> TimeSignal<f64> {
        let mut s = vec![Complex::new(0.0, 0.0); n];
        for &(c, f) in poles {
            for (z, a) in s.iter_mut().zip(atom(f, n)) {
                *z += c * a;
            }
        }
        TimeSignal::canonical(s).unwrap()
    }

    fn re(c: f64) -> Complex<f64> {
        Complex::new(c, 0.0)
    }

    #[test]
    fn on_grid_atom_is_a_single_bin() {
        let n = 8;
        let cfg = DftConfig::default();
        let f = 5.0 / (16.0 * n as f64);
        let (freqs, vals) = padded_spectrum(&sig(&[(re(1.0), f)], n), &cfg).unwrap();
        let mags: Vec<f64> = vals.iter().map(|z| z.norm()).collect();
        let k = mags.iter().enumerate().fold(0, |b, (i, &m)| if m > mags[b] { i } else { b });
        assert!((mags[k] - n as f64).abs() < 1e-10);
        assert!((freqs[k] - f).abs() < 1e-15);
        // On the unpadded grid the other atoms are orthogonal.
        let f = 3.0 / n as f64;
        let (_, vals) = padded_spectrum(&sig(&[(re(1.0), f)], n), &DftConfig { pad_factor: 1, ..cfg }).unwrap();
        let big = vals.iter().filter(|z| z.norm() > 1e-10).count();
        assert_eq!(big, 1);
    }

    #[test]
    fn constant_signal_peaks_at_zero() {
        let y = TimeSignal::canonical(vec![re(1.0); 10]).unwrap();
        let (freqs, vals) = padded_spectrum(&y, &DftConfig::default()).unwrap();
        let k = vals.iter().enumerate().fold(0, |b, (i, z)| if z.norm() > vals[b].norm() { i } else { b });
        assert_eq!(freqs[k], 0.0);
        assert!(freqs.iter().all(|&f| (-0.5..0.5).contains(&f)));
    }

    #[test]
    fn off_grid_main_lobe_is_dirichlet() {
        let n = 12;
        let f = 0.2371;
        let (freqs, vals) = padded_spectrum(&sig(&[(re(1.0), f)], n), &DftConfig::default()).unwrap();
        for (fk, v) in freqs.iter().zip(&vals) {
            let d = f - fk;
            let closed = ((std::f64::consts::PI * n as f64 * d).sin() / (std::f64::consts::PI * d).sin()).abs();
            if d.abs() > 1e-9 {
                assert!((v.norm() - closed).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dirichlet_matches_sum() {
        for &(d, n) in &[(0.013, 7usize), (0.5, 4), (1.0, 5), (1.0, 6), (-0.31, 9), (0.0, 3)] {
            let sum: Complex<f64> = atom(d, n).into_iter().sum();
            assert!((dirichlet(d, n) - sum).norm() < 1e-10, "d={d} n={n}");
        }
    }

    #[test]
    fn parseval() {
        let y = sig(&[(re(1.0), 0.11), (Complex::new(0.3, 0.4), 0.73)], 14);
        let cfg = DftConfig::default();
        let (_, vals) = padded_spectrum(&y, &cfg).unwrap();
        let spec: f64 = vals.iter().map(|z| z.norm_sqr()).sum();
        let time: f64 = y.samples().iter().map(|z| z.norm_sqr()).sum();
        assert!((spec - (cfg.pad_factor * y.len()) as f64 * time).abs() < 1e-10 * spec);
    }

    #[test]
    fn single_atom_clean() {
        let n = 16;
        let f = 0.4123;
        let c = Complex::new(0.8, -0.3);
        let est = extract_peaks_clean(&sig(&[(c, f)], n), &DftConfig::default()).unwrap();
        assert_eq!(est.len(), 1);
        let p = est.poles()[0];
        assert!(wrap_distance(p.frequency, f) < 1e-8);
        assert!((p.amplitude - c).norm() < 1e-8, "{:?} err {}", p, (p.amplitude - c).norm());
    }

    #[test]
    fn two_separated_atoms() {
        let n = 32;
        let y = sig(&[(re(1.0), 0.15), (re(0.6), 0.55)], n);
        let est = extract_peaks_clean(&y, &DftConfig::default()).unwrap().sorted();
        assert!(est.len() >= 2);
        let main: Vec<_> = est.poles().iter().filter(|p| p.amplitude.norm() > 0.1).collect();
        assert_eq!(main.len(), 2);
        assert!((main[0].amplitude.norm() - 1.0).abs() < 0.02);
        assert!((main[1].amplitude.norm() - 0.6).abs() < 0.02 * 0.6);
    }

    #[test]
    fn empty_and_wrong_domain() {
        let y = TimeSignal::canonical(vec![re(0.0); 6]).unwrap();
        assert!(extract_peaks_clean(&y, &DftConfig::default()).unwrap().is_empty());
        let bad = DftConfig { stop_fraction: 1.5, ..DftConfig::default() };
        assert!(extract_peaks_clean(&y, &bad).is_err());
    }
}
