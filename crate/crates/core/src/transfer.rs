//! Log-domain Ruelle transfer operator and its leading eigen-data.
//!
//! For an edge potential `phi` and inverse temperature `t`, the transfer
//! operator acts on functions of the current symbol by summing over
//! predecessors,
//!
//! ```text
//! L_{t phi}(f)(b) = sum_{a -> b} e^{t phi(ab)} f(a) ,
//! ```
//!
//! and the transpose operator sums over successors. Both share the leading
//! eigenvalue `e^{P(t phi)}`, whose logarithm is the Gurevich pressure of
//! `t phi`; the eigenfunction pair `(h_t, h_t^T)` determines the stationary
//! Markov equilibrium state (see [`crate::equilibrium`]).
//!
//! Everything is computed in the log domain with max-shifted sums, because
//! `e^{t phi}` underflows already at moderate `t`. Power iteration runs on
//! the log vectors; the eigenvalue is read off as the mean per-step
//! increment of the final sweep, and the pair is rescaled so that
//! `sum_a exp(log_h(a) + log_h_T(a)) = 1` with the residual scalar gauge
//! fixed by `sum exp(2 log_h) = sum exp(2 log_h_T)`.

use crate::error::{Error, Result};
use crate::potential::MarkovPotential;
use crate::shift::{idx, ShiftGraph, Symbol};

/// Default stop tolerance for power iteration, in log scale.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-12;

/// Default inverse-temperature grid: geometric from 1 to 2^10.
pub fn default_t_grid() -> Vec<f64> {
    (0..=10).map(|k| (1u64 << k) as f64).collect()
}

/// `log sum_i exp(v_i)`, max-shifted for stability. Empty input and
/// all-`-inf` input give `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|&v| (v - m).exp()).sum();
    m + sum.ln()
}

/// One application of `L_{t phi}` to `e^{log_f}`, in the log domain:
/// `out(b) = log sum_{a -> b} exp(t phi(ab) + log_f(a))`.
pub fn apply_transfer_log(
    g: &ShiftGraph,
    phi: &MarkovPotential,
    t: f64,
    log_f: &[f64],
) -> Vec<f64> {
    let mut terms = Vec::new();
    (1..=g.n_symbols())
        .map(|b| {
            terms.clear();
            for &a in g.predecessors(b) {
                terms.push(t * phi.get(a, b) + log_f[idx(a)]);
            }
            log_sum_exp(&terms)
        })
        .collect()
}

/// Mirror of [`apply_transfer_log`] over successors:
/// `out(a) = log sum_{a -> b} exp(t phi(ab) + log_f(b))`.
pub fn apply_transpose_log(
    g: &ShiftGraph,
    phi: &MarkovPotential,
    t: f64,
    log_f: &[f64],
) -> Vec<f64> {
    let mut terms = Vec::new();
    (1..=g.n_symbols())
        .map(|a| {
            terms.clear();
            for &b in g.successors(a) {
                terms.push(t * phi.get(a, b) + log_f[idx(b)]);
            }
            log_sum_exp(&terms)
        })
        .collect()
}

/// Leading eigen-triple of the transfer operator at one inverse temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub t: f64,
    /// `P(t phi)`: log of the leading eigenvalue.
    pub log_pressure: f64,
    /// Per-symbol `log h_t`.
    pub log_h: Vec<f64>,
    /// Per-symbol `log h_t^T`.
    pub log_h_t: Vec<f64>,
    /// Max eigen-equation defect over both operators, log scale.
    pub residual: f64,
    pub iterations: usize,
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

// Stop threshold with a floor at the rounding granularity of the stored
// log values; iterates whose entries reach ~1e4 in magnitude cannot settle
// below a few ulps of that scale.
fn effective_tol(tol: f64, v: &[f64]) -> f64 {
    tol.max(8.0 * f64::EPSILON * max_abs(v))
}

/// Power iteration for the leading eigen-data of `L_{t phi}` and its
/// transpose.
///
/// Iterates both log vectors with a max-subtraction gauge each sweep and
/// stops when the successive-iterate sup-difference falls under `tol`
/// (floored at the rounding granularity of the iterates). `max_iter`
/// defaults to `100 * n_symbols`. A bipartite-like transition structure
/// makes the gauged iterates oscillate with period two, which is reported
/// as a distinct error.
pub fn leading_eigen(
    g: &ShiftGraph,
    phi: &MarkovPotential,
    t: f64,
    tol: f64,
    max_iter: Option<usize>,
) -> Result<SpectralData> {
    let n = g.n_symbols() as usize;
    let max_iter = max_iter.unwrap_or(100 * n);
    let mut f = vec![0.0; n];
    let mut ft = vec![0.0; n];
    // Two-back iterates for period-two detection.
    let mut f2 = f.clone();
    let mut ft2 = ft.clone();
    let mut iterations = 0;
    let mut converged = false;
    let mut last_d = f64::INFINITY;
    let mut last_d2 = f64::INFINITY;

    while iterations < max_iter {
        iterations += 1;
        let mut gf = apply_transfer_log(g, phi, t, &f);
        let mut gft = apply_transpose_log(g, phi, t, &ft);
        let mf = gf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mft = gft.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for x in &mut gf {
            *x -= mf;
        }
        for x in &mut gft {
            *x -= mft;
        }
        let d = sup_diff(&gf, &f).max(sup_diff(&gft, &ft));
        let d2 = sup_diff(&gf, &f2).max(sup_diff(&gft, &ft2));
        f2 = std::mem::replace(&mut f, gf);
        ft2 = std::mem::replace(&mut ft, gft);
        last_d = d;
        last_d2 = d2;
        let te = effective_tol(tol, &f).max(effective_tol(tol, &ft));
        if d < te {
            converged = true;
            break;
        }
    }

    // Rayleigh-like log estimate: mean per-step increment over one more
    // sweep of both operators.
    let gf = apply_transfer_log(g, phi, t, &f);
    let gft = apply_transpose_log(g, phi, t, &ft);
    let log_pressure = (gf.iter().zip(&f).map(|(y, x)| y - x).sum::<f64>()
        + gft.iter().zip(&ft).map(|(y, x)| y - x).sum::<f64>())
        / (2 * n) as f64;

    if !converged {
        let te = effective_tol(tol, &f).max(effective_tol(tol, &ft));
        let residual = residual_of(g, phi, t, log_pressure, &f, &ft);
        if last_d2 < te && last_d >= te {
            return Err(Error::PeriodTwoOscillation { iterations });
        }
        return Err(Error::NonConvergence {
            iterations,
            residual,
        });
    }

    let (log_h, log_h_t) = normalize_pair(f, ft);
    let residual = residual_of(g, phi, t, log_pressure, &log_h, &log_h_t);
    Ok(SpectralData {
        t,
        log_pressure,
        log_h,
        log_h_t,
        residual,
        iterations,
    })
}

// Fixes sum_a exp(h + hT) = 1 and the scalar gauge
// sum exp(2h) = sum exp(2hT).
fn normalize_pair(mut h: Vec<f64>, mut ht: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let pi_raw: Vec<f64> = h.iter().zip(&ht).map(|(a, b)| a + b).collect();
    let s = log_sum_exp(&pi_raw);
    let two_h: Vec<f64> = h.iter().map(|x| 2.0 * x).collect();
    let two_ht: Vec<f64> = ht.iter().map(|x| 2.0 * x).collect();
    let d = (log_sum_exp(&two_h) - log_sum_exp(&two_ht)) / 4.0;
    for x in &mut h {
        *x -= s / 2.0 + d;
    }
    for x in &mut ht {
        *x -= s / 2.0 - d;
    }
    (h, ht)
}

fn residual_of(
    g: &ShiftGraph,
    phi: &MarkovPotential,
    t: f64,
    log_pressure: f64,
    log_h: &[f64],
    log_h_t: &[f64],
) -> f64 {
    let lh = apply_transfer_log(g, phi, t, log_h);
    let lht = apply_transpose_log(g, phi, t, log_h_t);
    let r1 = lh
        .iter()
        .zip(log_h)
        .map(|(y, x)| (y - log_pressure - x).abs())
        .fold(0.0, f64::max);
    let r2 = lht
        .iter()
        .zip(log_h_t)
        .map(|(y, x)| (y - log_pressure - x).abs())
        .fold(0.0, f64::max);
    r1.max(r2)
}

/// Periodic-orbit partition sums through the symbol `a`:
/// `Z_n(t phi, a) = sum over closed length-n paths through a` of the
/// exponentiated path weight, returned as `(n, (1/n) log Z_n)` for
/// `n = 1..=n_max`. Computed exactly by dynamic programming over path
/// weights in the log domain; `-inf` when no closed path of that length
/// exists.
pub fn gurevich_from_cycles(
    g: &ShiftGraph,
    phi: &MarkovPotential,
    t: f64,
    a: Symbol,
    n_max: usize,
) -> Vec<(usize, f64)> {
    assert!(g.contains_symbol(a), "symbol {a} outside the alphabet");
    let n = g.n_symbols() as usize;
    // v[b] = log sum of weights of length-k paths a -> b
    let mut v = vec![f64::NEG_INFINITY; n];
    v[idx(a)] = 0.0;
    let mut out = Vec::with_capacity(n_max);
    let mut terms = Vec::new();
    for k in 1..=n_max {
        let mut next = vec![f64::NEG_INFINITY; n];
        for b in 1..=g.n_symbols() {
            terms.clear();
            for &c in g.predecessors(b) {
                let w = v[idx(c)];
                if w > f64::NEG_INFINITY {
                    terms.push(w + t * phi.get(c, b));
                }
            }
            next[idx(b)] = log_sum_exp(&terms);
        }
        v = next;
        out.push((k, v[idx(a)] / k as f64));
    }
    out
}

/// The normalized pressure curve `t -> P(t phi) / t` over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureCurve {
    pub t: Vec<f64>,
    pub pressure_over_t: Vec<f64>,
    /// Entropy of the equilibrium state per grid point, filled in by the
    /// caller once the measures are built.
    pub entropy: Vec<Option<f64>>,
}

impl PressureCurve {
    /// Diagnostic: the curve should not increase once the potential is
    /// normalized to maximizing value zero. Ties within rounding slack are
    /// accepted.
    pub fn monotone_nonincreasing(&self) -> bool {
        self.pressure_over_t
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-12)
    }
}

/// Runs [`leading_eigen`] over a grid of inverse temperatures.
pub fn pressure_curve(
    g: &ShiftGraph,
    phi: &MarkovPotential,
    t_grid: &[f64],
    tol: f64,
) -> Result<PressureCurve> {
    let mut pressure_over_t = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let sd = leading_eigen(g, phi, t, tol, None)?;
        pressure_over_t.push(sd.log_pressure / t);
    }
    Ok(PressureCurve {
        t: t_grid.to_vec(),
        pressure_over_t,
        entropy: vec![None; t_grid.len()],
    })
}
