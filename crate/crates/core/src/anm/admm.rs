//! ADMM for the Toeplitz-block semidefinite program
//!
//! ```text
//! minimize   ½‖y − x‖² + (τ/2)(t + u₀)
//! subject to [[T(u), x], [x*, t]] ⪰ 0
//! ```
//!
//! split as `Θ(t, u, x) = Z`, `Z ⪰ 0`, with an unscaled multiplier `Λ`.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub(crate) struct AdmmParams<T> {
    pub rho: T,
    pub max_iters: usize,
    pub primal_tol: T,
    pub dual_tol: T,
    pub adapt_rho: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct AdmmOutput<T: Real> {
    pub x: Vec<Complex<T>>,
    pub u: Vec<Complex<T>>,
    pub t: T,
    pub iterations: usize,
    pub primal_residual: T,
    pub dual_residual: T,
    pub converged: bool,
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Hermitian Toeplitz matrix with first column `u`.
pub(crate) fn toeplitz<T: Real>(u: &[Complex<T>]) -> DMatrix<Complex<T>> {
    let n = u.len();
    DMatrix::from_fn(n, n, |i, j| if i >= j { u[i - j] } else { u[j - i].conj() })
}

/// Projection of the leading `n×n` block onto Hermitian Toeplitz matrices,
/// returned as the first column.
fn toeplitz_average<T: Real>(m: &DMatrix<Complex<T>>, n: usize) -> Vec<Complex<T>> {
    let mut u = vec![zero::<T>(); n];
    let mut d = T::zero();
    for i in 0..n {
        d += m[(i, i)].re;
    }
    u[0] = Complex::new(d / T::of_usize(n), T::zero());
    for (k, uk) in u.iter_mut().enumerate().skip(1) {
        let mut s = zero::<T>();
        for i in 0..n - k {
            s += m[(i + k, i)] + m[(i, i + k)].conj();
        }
        *uk = s / T::of_usize(2 * (n - k));
    }
    u
}

fn psd_projection<T: Real>(m: DMatrix<Complex<T>>) -> DMatrix<Complex<T>> {
    let eig = m.symmetric_eigen();
    let mut v = eig.eigenvectors;
    let mut any = false;
    for (k, &w) in eig.eigenvalues.iter().enumerate() {
        let s = if w > T::zero() { any = true; w.sqrt() } else { T::zero() };
        v.column_mut(k).scale_mut(s);
    }
    if !any {
        let n = v.nrows();
        return DMatrix::zeros(n, n);
    }
    &v * v.adjoint()
}

/// Runs the splitting. With `fixed_x` the `x` block is pinned to `y`, which
/// turns the program into the atomic-norm evaluation `min ½(t + u₀)` (use
/// `τ = 1`).
pub(crate) fn solve<T: Real>(y: &[Complex<T>], tau: T, fixed_x: bool, p: AdmmParams<T>) -> AdmmOutput<T> {
    let n = y.len();
    let dim = n + 1;
    let two = T::of(2.0);
    let mut rho = p.rho;
    let mut z = DMatrix::<Complex<T>>::zeros(dim, dim);
    let mut lam = DMatrix::<Complex<T>>::zeros(dim, dim);
    let mut x = y.to_vec();
    let mut u = vec![zero::<T>(); n];
    let mut t = T::zero();
    let (mut r, mut s) = (T::max_value().unwrap_or(T::one()), T::max_value().unwrap_or(T::one()));
    let mut it = 0;
    let mut converged = false;

    while it < p.max_iters {
        it += 1;
        let m = &z + &lam / Complex::new(rho, T::zero());
        t = m[(n, n)].re - tau / (two * rho);
        u = toeplitz_average(&m, n);
        u[0].re -= tau / (two * rho * T::of_usize(n));
        if !fixed_x {
            let denom = T::one() + two * rho;
            for (j, xj) in x.iter_mut().enumerate() {
                let mx = (m[(j, n)] + m[(n, j)].conj()) / two;
                *xj = (y[j] + mx * (two * rho)) / denom;
            }
        }
        let mut theta = DMatrix::zeros(dim, dim);
        theta.view_mut((0, 0), (n, n)).copy_from(&toeplitz(&u));
        for j in 0..n {
            theta[(j, n)] = x[j];
            theta[(n, j)] = x[j].conj();
        }
        theta[(n, n)] = Complex::new(t, T::zero());

        let target = &theta - &lam / Complex::new(rho, T::zero());
        let z_new = psd_projection(target);
        let diff = &z_new - &theta;
        lam += &diff * Complex::new(rho, T::zero());
        r = diff.norm();
        s = rho * (&z_new - &z).norm();
        z = z_new;

        if r < p.primal_tol && s < p.dual_tol {
            converged = true;
            break;
        }
        if p.adapt_rho && it % 10 == 0 {
            let ten = T::of(10.0);
            if r > ten * s {
                rho *= two;
            } else if s > ten * r {
                rho /= two;
            }
        }
    }

    AdmmOutput { x, u, t, iterations: it, primal_residual: r, dual_residual: s, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toeplitz_round_trip() {
        let u: Vec<Complex<f64>> = vec![Complex::new(2.0, 0.0), Complex::new(0.3, -0.1), Complex::new(-0.5, 0.7)];
        let t = toeplitz(&u);
        assert!((&t - t.adjoint()).norm() < 1e-15);
        let back = toeplitz_average(&t, 3);
        for (a, b) in u.iter().zip(&back) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn projection_clips_negative_part() {
        let m = DMatrix::from_row_slice(2, 2, &[
            Complex::new(1.0, 0.0), Complex::new(0.0, 2.0),
            Complex::new(0.0, -2.0), Complex::new(1.0, 0.0),
        ]);
        let p = psd_projection(m);
        let eig = p.clone().symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|&w| w > -1e-12));
        assert!((eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max) - 3.0).abs() < 1e-12);
    }
}
