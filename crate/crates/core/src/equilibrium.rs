//! Stationary Markov equilibrium states.
//!
//! The equilibrium state of `t phi` on a truncated shift is the stationary
//! Markov measure built from the leading eigen-data,
//!
//! ```text
//! pi_t(a)  = h_t(a) h_t^T(a) ,
//! P_t(ab)  = h_t^T(b) / h_t^T(a) * e^{t phi(ab) - P(t phi)} ,
//! ```
//!
//! so that cylinder values factor as
//! `mu_t([w]) = pi_t(w_0) prod_i P_t(w_i w_{i+1})`, which telescopes into
//! the closed form `h_t(w_0) h_t^T(w_n) e^{sum (t phi - P)}`. Both routes
//! are provided; they agree up to rounding. Everything stays in the log
//! domain, and an inadmissible word is a measure-zero event (`-inf`), not
//! an error.

use crate::error::{Error, Result};
use crate::potential::MarkovPotential;
use crate::shift::{idx, ShiftGraph, Word};
use crate::transfer::SpectralData;

/// Stationary Markov measure `(pi_t, P_t)`, stored in the log domain with
/// transition rows parallel to the successor lists of the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryMarkovMeasure {
    pub t: f64,
    pub log_pi: Vec<f64>,
    log_p: Vec<Vec<f64>>,
}

/// Builds the stationary Markov measure from converged eigen-data.
///
/// Fails when some transition row sums to one with a defect larger than ten
/// times the spectral residual (floored at a few ulps), which signals
/// unusable eigen-data rather than rounding noise.
pub fn stationary_measure(
    g: &ShiftGraph,
    phi: &MarkovPotential,
    sd: &SpectralData,
) -> Result<StationaryMarkovMeasure> {
    let n = g.n_symbols();
    let log_pi: Vec<f64> = sd
        .log_h
        .iter()
        .zip(&sd.log_h_t)
        .map(|(a, b)| a + b)
        .collect();
    let mut log_p = Vec::with_capacity(n as usize);
    for a in 1..=n {
        let row: Vec<f64> = g
            .successors(a)
            .iter()
            .map(|&b| {
                sd.log_h_t[idx(b)] - sd.log_h_t[idx(a)] + sd.t * phi.get(a, b)
                    - sd.log_pressure
            })
            .collect();
        log_p.push(row);
    }

    let tol = 10.0 * sd.residual.max(64.0 * f64::EPSILON);
    for a in 1..=n {
        let sum: f64 = log_p[idx(a)].iter().map(|&v| v.exp()).sum();
        let defect = (sum - 1.0).abs();
        if defect > tol {
            return Err(Error::RowSumDefect {
                symbol: a,
                defect,
                residual: sd.residual,
            });
        }
    }
    Ok(StationaryMarkovMeasure {
        t: sd.t,
        log_pi,
        log_p,
    })
}

impl StationaryMarkovMeasure {
    /// `log P_t(ab)`; `-inf` off the edge set.
    pub fn log_transition(&self, g: &ShiftGraph, a: u32, b: u32) -> f64 {
        if !g.has_edge(a, b) {
            return f64::NEG_INFINITY;
        }
        let pos = g.successors(a).binary_search(&b).expect("edge present");
        self.log_p[idx(a)][pos]
    }

    /// `log mu_t([w])` through the stationary product form. The empty word
    /// names the whole space (log measure zero); an inadmissible word gives
    /// `-inf`.
    pub fn cylinder_log_measure(&self, g: &ShiftGraph, w: &Word) -> f64 {
        let syms = w.symbols();
        let Some(&first) = syms.first() else {
            return 0.0;
        };
        if !g.contains_symbol(first) {
            return f64::NEG_INFINITY;
        }
        let mut log = self.log_pi[idx(first)];
        for pair in syms.windows(2) {
            if !g.contains_symbol(pair[1]) {
                return f64::NEG_INFINITY;
            }
            log += self.log_transition(g, pair[0], pair[1]);
        }
        log
    }

    /// Entropy rate `-sum_ab pi(a) P(ab) log P(ab)`, with `0 log 0 = 0`.
    pub fn entropy(&self, g: &ShiftGraph) -> f64 {
        let mut acc = 0.0;
        for a in 1..=g.n_symbols() {
            let pa = self.log_pi[idx(a)].exp();
            if pa == 0.0 {
                continue;
            }
            for &lp in &self.log_p[idx(a)] {
                let p = lp.exp();
                if p > 0.0 {
                    acc += pa * p * lp;
                }
            }
        }
        -acc
    }

    /// `integral of phi d mu = sum_ab pi(a) P(ab) phi(ab)`.
    pub fn integral(&self, g: &ShiftGraph, phi: &MarkovPotential) -> f64 {
        let mut acc = 0.0;
        for a in 1..=g.n_symbols() {
            let pa = self.log_pi[idx(a)].exp();
            if pa == 0.0 {
                continue;
            }
            for (&b, &lp) in g.successors(a).iter().zip(&self.log_p[idx(a)]) {
                let p = lp.exp();
                if p > 0.0 {
                    acc += pa * p * phi.get(a, b);
                }
            }
        }
        acc
    }

    /// Max defect of `sum_a pi(a) P(ab) = pi(b)` over symbols, linear scale.
    pub fn stationarity_defect(&self, g: &ShiftGraph) -> f64 {
        let mut worst = 0.0f64;
        for b in 1..=g.n_symbols() {
            let mut sum = 0.0;
            for &a in g.predecessors(b) {
                sum += self.log_pi[idx(a)].exp() * self.log_transition(g, a, b).exp();
            }
            worst = worst.max((sum - self.log_pi[idx(b)].exp()).abs());
        }
        worst
    }
}

/// `log mu_t([w])` through the spectral closed form
/// `log h(w_0) + log h^T(w_n) + sum_i (t phi(w_i w_{i+1}) - P)`.
pub fn spectral_cylinder_log_measure(
    sd: &SpectralData,
    g: &ShiftGraph,
    phi: &MarkovPotential,
    w: &Word,
) -> f64 {
    let syms = w.symbols();
    let Some(&first) = syms.first() else {
        return 0.0;
    };
    if !syms.iter().all(|&s| g.contains_symbol(s)) {
        return f64::NEG_INFINITY;
    }
    let last = *syms.last().expect("nonempty");
    let mut log = sd.log_h[idx(first)] + sd.log_h_t[idx(last)];
    for pair in syms.windows(2) {
        log += sd.t * phi.get(pair[0], pair[1]) - sd.log_pressure;
    }
    log
}
