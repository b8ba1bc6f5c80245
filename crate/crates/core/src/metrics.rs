//! Pole matching and the amplitude-weighted reconstruction error
//!
//! ```text
//! ε = Σ_l (|c_l|·|ω_l − ω̂_l| + |c_l − ĉ_l|) / Σ_j (|c_j|·|ω_j| + |c_j|)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectrum::LineSpectrum;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    /// `(true_index, est_index)`.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_true: Vec<usize>,
    pub unmatched_est: Vec<usize>,
    pub epsilon: f64,
}

/// Minimum-cost assignment for a `rows × cols` cost matrix with
/// `rows <= cols`; returns the column of each row.
fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let m = cost.first().map_or(0, Vec::len);
    debug_assert!(n <= m);
    // Potentials-based shortest augmenting path, 1-based with a sentinel column 0.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            out[p[j] - 1] = j - 1;
        }
    }
    out
}

/// Pairs poles by minimum total `|ω − ω̂|`, then drops pairs farther apart
/// than `max_distance`.
pub fn match_poles_within<T: Real>(
    truth: &LineSpectrum<T>,
    estimate: &LineSpectrum<T>,
    max_distance: f64,
) -> Result<MatchReport> {
    if truth.domain() != estimate.domain() {
        return Err(Error::WrongDomain { expected: if truth.domain() == crate::spectrum::Domain::Physical { "physical" } else { "canonical" } });
    }
    let tf: Vec<f64> = truth.poles().iter().map(|p| p.frequency.as_f64()).collect();
    let ef: Vec<f64> = estimate.poles().iter().map(|p| p.frequency.as_f64()).collect();
    let mut pairs = Vec::new();
    if !tf.is_empty() && !ef.is_empty() {
        let transpose = tf.len() > ef.len();
        let (rows, cols) = if transpose { (&ef, &tf) } else { (&tf, &ef) };
        let cost: Vec<Vec<f64>> = rows.iter().map(|a| cols.iter().map(|b| (a - b).abs()).collect()).collect();
        for (r, c) in hungarian(&cost).into_iter().enumerate() {
            let (ti, ei) = if transpose { (c, r) } else { (r, c) };
            if (tf[ti] - ef[ei]).abs() <= max_distance {
                pairs.push((ti, ei));
            }
        }
    }
    pairs.sort_unstable();
    let unmatched_true = (0..tf.len()).filter(|i| !pairs.iter().any(|p| p.0 == *i)).collect();
    let unmatched_est = (0..ef.len()).filter(|j| !pairs.iter().any(|p| p.1 == *j)).collect();
    let mut report = MatchReport { pairs, unmatched_true, unmatched_est, epsilon: 0.0 };
    report.epsilon = error_from_report(truth, estimate, &report)?;
    Ok(report)
}

/// [`match_poles_within`] with the rejection radius set to a quarter of the
/// truth's frequency span (no rejection for a single true pole).
pub fn match_poles<T: Real>(truth: &LineSpectrum<T>, estimate: &LineSpectrum<T>) -> Result<MatchReport> {
    match_poles_within(truth, estimate, default_radius(truth))
}

fn default_radius<T: Real>(truth: &LineSpectrum<T>) -> f64 {
    let f = truth.frequencies();
    if f.len() < 2 {
        return f64::INFINITY;
    }
    let lo = f.iter().map(|x| x.as_f64()).fold(f64::INFINITY, f64::min);
    let hi = f.iter().map(|x| x.as_f64()).fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / 4.0
}

fn error_from_report<T: Real>(truth: &LineSpectrum<T>, estimate: &LineSpectrum<T>, report: &MatchReport) -> Result<f64> {
    if truth.is_empty() {
        return Err(Error::EmptyTruth);
    }
    let tp = truth.poles();
    let ep = estimate.poles();
    let mag = |c: num_complex::Complex<T>| c.re.as_f64().hypot(c.im.as_f64());
    let den: f64 = tp.iter().map(|p| mag(p.amplitude) * p.frequency.as_f64().abs() + mag(p.amplitude)).sum();
    if !(den > 0.0) {
        return Err(Error::InvalidArgument("reference spectrum has zero weight".into()));
    }
    let mut num = 0.0;
    for &(i, j) in &report.pairs {
        let (t, e) = (&tp[i], &ep[j]);
        num += mag(t.amplitude) * (t.frequency.as_f64() - e.frequency.as_f64()).abs() + mag(t.amplitude - e.amplitude);
    }
    for &i in &report.unmatched_true {
        num += mag(tp[i].amplitude) * tp[i].frequency.as_f64().abs() + mag(tp[i].amplitude);
    }
    for &j in &report.unmatched_est {
        num += mag(ep[j].amplitude);
    }
    Ok(num / den)
}

/// `ε` with the default matching.
pub fn reconstruction_error<T: Real>(truth: &LineSpectrum<T>, estimate: &LineSpectrum<T>) -> Result<f64> {
    Ok(match_poles(truth, estimate)?.epsilon)
}

/// `ε` with an explicit rejection radius, e.g. a quarter of the energy window.
pub fn reconstruction_error_within<T: Real>(
    truth: &LineSpectrum<T>,
    estimate: &LineSpectrum<T>,
    max_distance: f64,
) -> Result<f64> {
    Ok(match_poles_within(truth, estimate, max_distance)?.epsilon)
}
