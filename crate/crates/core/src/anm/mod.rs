//! Atomic norm denoising of canonical-domain signals.
//!
//! Atoms are `a(f)_j = e^{i2πfj}`, `j = 0..n`. The denoiser solves
//! `argmin ½‖y − x‖² + τ‖x‖_A` through its semidefinite form, after which the
//! dual polynomial `Q(f) = |⟨a(f), (y − x̂)/τ⟩|` marks the frequencies where
//! it touches 1.

mod admm;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{cis, wrap_distance, wrap_unit, Real};
use crate::spectrum::{Domain, LineSpectrum, Pole, TimeSignal};

use admm::{AdmmOutput, AdmmParams};

/// Regularization weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tau<T> {
    /// [`select_tau`] from a noise level per complex sample.
    Auto { sigma: T },
    Fixed(T),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct AnmConfig<T: Real> {
    pub tau: Tau<T>,
    pub admm_rho: T,
    pub max_iters: usize,
    pub primal_tol: T,
    pub dual_tol: T,
    /// Scan density for the dual polynomial; `None` uses `max(4096, 64n)`.
    pub grid_points: Option<usize>,
    pub peak_threshold: T,
    pub refine_iters: usize,
    pub adapt_rho: bool,
}

impl<T: Real> Default for AnmConfig<T> {
    fn default() -> Self {
        Self {
            tau: Tau::Auto { sigma: T::zero() },
            admm_rho: T::of(2.0),
            max_iters: 10_000,
            primal_tol: T::of(1e-7),
            dual_tol: T::of(1e-7),
            grid_points: None,
            peak_threshold: T::of(0.99),
            refine_iters: 50,
            adapt_rho: true,
        }
    }
}

impl<T: Real> AnmConfig<T> {
    pub fn with_tau(mut self, tau: T) -> Self {
        self.tau = Tau::Fixed(tau);
        self
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.primal_tol = tol;
        self.dual_tol = tol;
        self
    }

    pub fn with_max_iters(mut self, iters: usize) -> Self {
        self.max_iters = iters;
        self
    }

    pub fn resolve_tau(&self, n: usize) -> Result<T> {
        let tau = match self.tau {
            Tau::Fixed(t) => t,
            Tau::Auto { sigma } => select_tau(sigma, n)?,
        };
        if !(tau > T::zero()) || !tau.is_finite() {
            return invalid(format!("tau must be positive, got {tau}"));
        }
        Ok(tau)
    }

    pub fn grid_size(&self, n: usize) -> usize {
        self.grid_points.unwrap_or_else(|| (64 * n).max(4096))
    }

    fn validate(&self) -> Result<()> {
        if !(self.admm_rho > T::zero()) {
            return invalid("admm_rho must be positive");
        }
        if self.max_iters == 0 {
            return invalid("max_iters must be positive");
        }
        if !(self.primal_tol > T::zero() && self.dual_tol > T::zero()) {
            return invalid("tolerances must be positive");
        }
        if !(self.peak_threshold > T::zero() && self.peak_threshold < T::one()) {
            return invalid("peak_threshold must lie in (0, 1)");
        }
        Ok(())
    }

    fn admm(&self) -> AdmmParams<T> {
        AdmmParams {
            rho: self.admm_rho,
            max_iters: self.max_iters,
            primal_tol: self.primal_tol,
            dual_tol: self.dual_tol,
            adapt_rho: self.adapt_rho,
        }
    }
}

/// Solver diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenoisedSolution<T: Real> {
    pub x_hat: Vec<Complex<T>>,
    /// `(y − x̂)/τ`.
    pub dual: Vec<Complex<T>>,
    /// First column of the Toeplitz block.
    pub toeplitz_vec: Vec<Complex<T>>,
    pub t_scalar: T,
    pub tau: T,
    pub iterations: usize,
    pub primal_residual: T,
    pub dual_residual: T,
    /// `½‖y − x̂‖² + (τ/2)(t + u₀)` at the returned iterate.
    pub objective: T,
    pub converged: bool,
}

impl<T: Real> DenoisedSolution<T> {
    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            iterations: self.iterations,
            primal_residual: self.primal_residual.as_f64(),
            dual_residual: self.dual_residual.as_f64(),
            objective: self.objective.as_f64(),
        }
    }

    pub fn n(&self) -> usize {
        self.x_hat.len()
    }
}

/// `a(f)` of length `n`.
pub fn atom<T: Real>(f: T, n: usize) -> Vec<Complex<T>> {
    (0..n).map(|j| cis(T::two_pi() * f * T::of_usize(j))).collect()
}

fn check_canonical<T: Real>(y: &TimeSignal<T>) -> Result<()> {
    if y.domain() != Domain::Canonical {
        return Err(Error::WrongDomain { expected: "canonical" });
    }
    if y.len() < 2 {
        return invalid(format!("need at least two samples, got {}", y.len()));
    }
    Ok(())
}

/// `argmin_x ½‖y − x‖² + τ‖x‖_A`.
///
/// Hitting `max_iters` is reported through `converged`, not as an error.
pub fn atomic_denoise<T: Real>(y: &TimeSignal<T>, config: &AnmConfig<T>) -> Result<DenoisedSolution<T>> {
    check_canonical(y)?;
    config.validate()?;
    let n = y.len();
    let tau = config.resolve_tau(n)?;
    let AdmmOutput { x, u, t, iterations, primal_residual, dual_residual, converged } =
        admm::solve(y.samples(), tau, false, config.admm());
    let inv = T::one() / tau;
    let dual: Vec<_> = y.samples().iter().zip(&x).map(|(a, b)| (a - b) * inv).collect();
    let fit = y.samples().iter().zip(&x).fold(T::zero(), |acc, (a, b)| acc + (a - b).norm_sqr());
    let half = T::of(0.5);
    let objective = half * fit + half * tau * (t + u[0].re);
    Ok(DenoisedSolution {
        x_hat: x,
        dual,
        toeplitz_vec: u,
        t_scalar: t,
        tau,
        iterations,
        primal_residual,
        dual_residual,
        objective,
        converged,
    })
}

/// `‖x‖_A = min ½(t + u₀)` subject to the same block constraint with `x`
/// held fixed.
pub fn atomic_norm<T: Real>(x: &TimeSignal<T>, config: &AnmConfig<T>) -> Result<T> {
    check_canonical(x)?;
    config.validate()?;
    let out = admm::solve(x.samples(), T::one(), true, config.admm());
    Ok(T::of(0.5) * (out.t + out.u[0].re))
}

/// `Q(f) = |Σ_j conj(a(f)_j) dual_j|`.
pub fn dual_polynomial<T: Real>(solution: &DenoisedSolution<T>, f: T) -> T {
    let mut acc = Complex::new(T::zero(), T::zero());
    let w = -T::two_pi() * f;
    for (j, d) in solution.dual.iter().enumerate() {
        acc += cis(w * T::of_usize(j)) * d;
    }
    acc.norm_sqr().sqrt()
}

/// `Q(k/grid)` for `k = 0..grid` via one zero-padded FFT.
pub fn dual_polynomial_grid<T: Real>(solution: &DenoisedSolution<T>, grid: usize) -> Result<Vec<T>> {
    let n = solution.n();
    if grid < n {
        return invalid(format!("grid of {grid} points is coarser than the {n} samples"));
    }
    let mut buf = vec![Complex::new(T::zero(), T::zero()); grid];
    buf[..n].copy_from_slice(&solution.dual);
    FftPlanner::new().plan_fft_forward(grid).process(&mut buf);
    Ok(buf.iter().map(|z| z.norm_sqr().sqrt()).collect())
}

fn golden_max<T: Real>(g: impl Fn(T) -> T, mut a: T, mut b: T, iters: usize) -> T {
    let r = (T::of(5.0).sqrt() - T::one()) / T::of(2.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = g(d);
        }
    }
    (a + b) / T::of(2.0)
}

/// Frequencies where the dual polynomial reaches `peak_threshold`.
///
/// Local maxima of the scan are refined by golden-section ascent within one
/// grid cell on each side, then merged when closer than `1/(4·grid)`.
pub fn locate_peaks<T: Real>(solution: &DenoisedSolution<T>, config: &AnmConfig<T>) -> Result<Vec<T>> {
    let grid = config.grid_size(solution.n());
    let q = dual_polynomial_grid(solution, grid)?;
    let step = T::one() / T::of_usize(grid);
    let mut peaks: Vec<(T, T)> = Vec::new();
    for k in 0..grid {
        let prev = q[(k + grid - 1) % grid];
        let next = q[(k + 1) % grid];
        if q[k] > prev && q[k] >= next && q[k] >= config.peak_threshold {
            let f0 = T::of_usize(k) * step;
            let f = golden_max(|f| dual_polynomial(solution, f), f0 - step, f0 + step, config.refine_iters);
            let f = wrap_unit(f);
            peaks.push((f, dual_polynomial(solution, f).max(q[k])));
        }
    }
    let merge = step / T::of(4.0);
    let mut kept: Vec<(T, T)> = Vec::new();
    for (f, v) in peaks {
        match kept.iter_mut().find(|(g, _)| wrap_distance(*g, f) < merge) {
            Some(slot) if v > slot.1 => *slot = (f, v),
            Some(_) => {}
            None => kept.push((f, v)),
        }
    }
    let mut out: Vec<T> = kept.into_iter().map(|(f, _)| f).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// `argmin_c ‖y − V c‖₂` with `V = [a(f_1), …, a(f_s)]`.
pub fn recover_amplitudes<T: Real>(y: &TimeSignal<T>, freqs: &[T]) -> Result<Vec<Complex<T>>> {
    let n = y.len();
    let s = freqs.len();
    if s == 0 {
        return Ok(Vec::new());
    }
    if s > n {
        return invalid(format!("{s} frequencies exceed the {n} samples"));
    }
    let v = DMatrix::from_fn(n, s, |j, l| cis(T::two_pi() * freqs[l] * T::of_usize(j)));
    let svd = v.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond_floor = T::of(1e-10).max(T::machine_eps() * T::of(1e3));
    if !(smin > cond_floor * smax) {
        let mut best = (0, 1, T::max_value().unwrap_or(T::one()));
        for i in 0..s {
            for j in i + 1..s {
                let d = wrap_distance(freqs[i], freqs[j]);
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        return Err(Error::RankDeficient(freqs[best.0].as_f64(), freqs[best.1].as_f64()));
    }
    let b = DVector::from_column_slice(y.samples());
    let c = svd.solve(&b, T::zero()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(c.iter().copied().collect())
}

/// `τ = σ√(n ln n)(1 + 1/ln n)`, or `1e−8·√n` when `σ = 0`.
pub fn select_tau<T: Real>(sigma: T, n: usize) -> Result<T> {
    if n < 2 {
        return invalid(format!("select_tau needs n >= 2, got {n}"));
    }
    if !(sigma >= T::zero()) {
        return invalid(format!("noise level must be non-negative, got {sigma}"));
    }
    let nf = T::of_usize(n);
    if sigma == T::zero() {
        return Ok(T::of(1e-8) * nf.sqrt());
    }
    let ln = nf.ln();
    Ok(sigma * (nf * ln).sqrt() * (T::one() + T::one() / ln))
}

/// Denoise, locate peaks and fit amplitudes in one pass.
#[derive(Clone, Debug)]
pub struct AnmEstimate<T: Real> {
    pub spectrum: LineSpectrum<T>,
    pub solution: DenoisedSolution<T>,
}

pub fn estimate<T: Real>(y: &TimeSignal<T>, config: &AnmConfig<T>) -> Result<AnmEstimate<T>> {
    let solution = atomic_denoise(y, config)?;
    let freqs = locate_peaks(&solution, config)?;
    let amps = recover_amplitudes(y, &freqs)?;
    let poles = amps.into_iter().zip(freqs).map(|(c, f)| Pole::new(c, f)).collect();
    Ok(AnmEstimate { spectrum: LineSpectrum::new(poles, Domain::Canonical)?, solution })
}
