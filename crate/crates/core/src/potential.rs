//! Markov potentials as edge weights.
//!
//! A Markov potential depends on two consecutive symbols only, so on a
//! truncated shift it is a weight `phi(ab)` per edge. Off the edge set the
//! potential is extended by `-inf`, which makes it total on `S x S`; all
//! log-domain arithmetic honors the sentinel (`x + (-inf) = -inf`,
//! `max(x, -inf) = x`), which plain `f64` already provides.
//!
//! The regularity diagnostics mirror the hypotheses used on the full
//! countable alphabet: the first variation `V1(phi)` (largest spread of
//! `phi` within a row), summability of `sum_a exp(sup phi|_[a])`, and
//! coercivity (row suprema falling to `-inf`). At truncation level the sum
//! is finite by fiat, so generator families may declare an analytic tail
//! bound for the discarded symbols; explicit edge lists carry no tail
//! information.

use crate::error::{Error, Result};
use crate::shift::{idx, ShiftFamily, ShiftGraph, ShiftSpec, Symbol};

/// Edge-indexed weights, `-inf` exactly off the edge set.
///
/// Rows are stored sorted by successor, mirroring the successor lists of the
/// graph the potential was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovPotential {
    rows: Vec<Vec<(Symbol, f64)>>,
}

impl MarkovPotential {
    /// Evaluates `f` on every edge of `g`. Panics if `f` returns a
    /// non-finite value on an edge; file input is validated upstream.
    pub fn from_fn(g: &ShiftGraph, f: impl Fn(Symbol, Symbol) -> f64) -> Self {
        let rows = (1..=g.n_symbols())
            .map(|a| {
                g.successors(a)
                    .iter()
                    .map(|&b| {
                        let v = f(a, b);
                        assert!(v.is_finite(), "potential must be finite on edge ({a}, {b})");
                        (b, v)
                    })
                    .collect()
            })
            .collect();
        MarkovPotential { rows }
    }

    /// `phi(ab) = c * (a + b) + d` on every edge. With `c < 0` this family
    /// is coercive and summable on the infinite alphabet.
    pub fn affine_sum(g: &ShiftGraph, c: f64, d: f64) -> Self {
        Self::from_fn(g, |a, b| c * (a + b) as f64 + d)
    }

    pub fn n_symbols(&self) -> u32 {
        self.rows.len() as u32
    }

    /// Weight of the edge `(a, b)`; `-inf` when the edge is absent.
    pub fn get(&self, a: Symbol, b: Symbol) -> f64 {
        if a == 0 || a as usize > self.rows.len() {
            return f64::NEG_INFINITY;
        }
        let row = &self.rows[idx(a)];
        match row.binary_search_by_key(&b, |&(s, _)| s) {
            Ok(i) => row[i].1,
            Err(_) => f64::NEG_INFINITY,
        }
    }

    /// Edge weights in lexicographic edge order.
    pub fn edge_values(&self) -> impl Iterator<Item = (Symbol, Symbol, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter().map(move |&(b, v)| (i as Symbol + 1, b, v))
        })
    }

    /// Largest spread of weights within a single row:
    /// `sup { |phi(x0 x1) - phi(y0 y1)| : x0 = y0 }` over the truncation.
    pub fn first_variation(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for &(_, v) in row {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    /// Transpose potential `phi^T(ab) = phi(ba)`, aligned with the
    /// transposed graph; involutive.
    pub fn transpose(&self) -> MarkovPotential {
        let n = self.rows.len();
        let mut rows: Vec<Vec<(Symbol, f64)>> = vec![Vec::new(); n];
        for (a, b, v) in self.edge_values() {
            rows[idx(b)].push((a, v));
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(s, _)| s);
        }
        MarkovPotential { rows }
    }

    /// Subtracts `alpha` from every edge weight. With `alpha` the maximizing
    /// value, the result has maximizing value zero.
    pub fn normalized(&self, alpha: f64) -> MarkovPotential {
        assert!(alpha.is_finite());
        MarkovPotential {
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|&(b, v)| (b, v - alpha)).collect())
                .collect(),
        }
    }

    /// Per-symbol suprema `sup(phi|_[a])` = the row maxima.
    pub fn per_symbol_sup(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    /// Summability and coercivity diagnostics over the truncation.
    ///
    /// `tail_bound`, when given, is an analytic bound on the discarded part
    /// of `sum_a exp(sup phi|_[a])`; see [`affine_sum_tail`].
    pub fn summability_report(&self, tail_bound: Option<f64>) -> PotentialReport {
        let sups = self.per_symbol_sup();
        let truncated_sum: f64 = sups.iter().map(|&s| s.exp()).sum();
        // Coercivity is a trend diagnostic: row suprema must fall strictly
        // over the tail half of the truncation.
        let n = sups.len();
        let start = n / 2;
        let coercive = n >= 2
            && sups[start.saturating_sub(1)..]
                .windows(2)
                .all(|w| w[0] > w[1]);
        PotentialReport {
            v1: self.first_variation(),
            per_symbol_sup: sups,
            truncated_sum,
            tail_bound,
            coercive,
        }
    }
}

/// Regularity diagnostics of a potential over a truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialReport {
    /// First variation `V1(phi)` over the truncation.
    pub v1: f64,
    /// `sup(phi|_[a])` per symbol.
    pub per_symbol_sup: Vec<f64>,
    /// `sum_a exp(sup phi|_[a])` over the truncation.
    pub truncated_sum: f64,
    /// Declared analytic bound for the tail of the sum beyond the
    /// truncation; `None` means no tail information.
    pub tail_bound: Option<f64>,
    /// Trend diagnostic: row suprema strictly decreasing over the tail of
    /// the truncation.
    pub coercive: bool,
}

impl PotentialReport {
    /// Truncated sum plus the declared tail bound, when available.
    pub fn summability_sum(&self) -> f64 {
        self.truncated_sum + self.tail_bound.unwrap_or(0.0)
    }

    pub fn has_tail_info(&self) -> bool {
        self.tail_bound.is_some()
    }
}

/// Analytic tail bound of `sum_{a > N} exp(sup phi|_[a])` for the affine
/// potential `phi(ab) = c(a + b) + d` on the built-in families.
///
/// On the infinite full shift the row supremum is `c(a + 1) + d`, on the
/// infinite renewal shift it is `c(2a - 1) + d`; both tails are geometric
/// for `c < 0`. Explicit edge lists (and `c >= 0`) carry no tail bound.
pub fn affine_sum_tail(spec: &ShiftSpec, c: f64, d: f64) -> Option<f64> {
    if c >= 0.0 {
        return None;
    }
    let n = spec.alphabet_bound as f64;
    match spec.family {
        ShiftFamily::Full => {
            // sum_{a > N} e^{c(a+1)+d} = e^{d + c(N+2)} / (1 - e^c)
            Some((d + c * (n + 2.0)).exp() / (1.0 - c.exp()))
        }
        ShiftFamily::Renewal => {
            // sum_{a > N} e^{c(2a-1)+d} = e^{d - c} e^{2c(N+1)} / (1 - e^{2c})
            Some((d - c + 2.0 * c * (n + 1.0)).exp() / (1.0 - (2.0 * c).exp()))
        }
        ShiftFamily::Explicit { .. } => None,
    }
}

/// Validates explicit per-edge values against a graph: every edge must be
/// covered exactly once and carry a finite weight.
pub fn potential_from_edge_values(
    g: &ShiftGraph,
    values: &[(Symbol, Symbol, f64)],
) -> Result<MarkovPotential> {
    let mut rows: Vec<Vec<(Symbol, f64)>> = vec![Vec::new(); g.n_symbols() as usize];
    for &(a, b, v) in values {
        if !g.has_edge(a, b) {
            return Err(Error::SymbolOutOfRange(a, b, g.n_symbols()));
        }
        rows[idx(a)].push((b, v));
    }
    for row in &mut rows {
        row.sort_unstable_by_key(|&(s, _)| s);
    }
    for a in 1..=g.n_symbols() {
        let row = &rows[idx(a)];
        if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateEdge(a, w[0].0));
        }
        if row.len() != g.successors(a).len() {
            let missing = g
                .successors(a)
                .iter()
                .find(|&&b| row.binary_search_by_key(&b, |&(s, _)| s).is_err())
                .copied()
                .unwrap_or(a);
            return Err(Error::SymbolOutOfRange(a, missing, g.n_symbols()));
        }
    }
    Ok(MarkovPotential { rows })
}
