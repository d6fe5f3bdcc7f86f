//! Ergodic optimization: maximizing value, calibrated sub-actions, and the
//! non-wandering edge set.
//!
//! For an edge potential on a strongly connected truncation, the maximizing
//! value `alpha(phi)` is the maximum mean weight over cycles, because the
//! invariant measures supported on cycles are the extreme points of the
//! simplex. A forward sub-action is a max-plus eigenvector of the weighted
//! adjacency structure,
//!
//! ```text
//! V(b) = max_{a -> b} ( phi(ab) + V(a) - alpha ) ,
//! ```
//!
//! with the backward sub-action `V^T` defined over successors. Sub-actions
//! are unique only up to additive constants; the pair here is pinned by
//! `max_a (V(a) + V^T(a)) = 0`, the normalization forced by the probability
//! normalization of the equilibrium states.
//!
//! The edges where `phi + V - V o sigma` attains `alpha` form the tight
//! (zero-defect) set; cycles inside it carry every maximizing measure, and
//! the union of those cycles is the recurrent part reported by
//! [`nonwandering`].

use crate::error::{Error, Result};
use crate::potential::MarkovPotential;
use crate::shift::{idx, ShiftGraph, Symbol, Word};
use crate::transfer::leading_eigen;

/// Sup-norm stop tolerance for max-plus value iteration.
pub const VALUE_ITER_TOL: f64 = 1e-12;

/// Calibration residual budget for computed sub-actions.
pub const CALIBRATION_TOL: f64 = 1e-10;

/// Defect threshold deciding membership in the tight edge set.
pub const OMEGA_EDGE_TOL: f64 = 1e-9;

/// Above this many symbols, [`maximizing_value`] switches from exhaustive
/// cycle enumeration to the dynamic-programming recurrence.
pub const ENUMERATION_LIMIT: u32 = 12;

/// Maximizing value together with a cycle attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxCycleCert {
    pub alpha: f64,
    /// Cyclic word attaining mean `alpha`; the stored rotation starts at
    /// the smallest symbol on the cycle.
    pub cycle: Word,
}

fn cycle_mean(phi: &MarkovPotential, cycle: &[Symbol]) -> f64 {
    let k = cycle.len();
    let mut sum = 0.0;
    for i in 0..k {
        sum += phi.get(cycle[i], cycle[(i + 1) % k]);
    }
    sum / k as f64
}

fn rotate_min_first(cycle: &mut Vec<Symbol>) {
    let Some(pos) = cycle
        .iter()
        .enumerate()
        .min_by_key(|&(_, &s)| s)
        .map(|(i, _)| i)
    else {
        return;
    };
    cycle.rotate_left(pos);
}

/// Maximum mean cycle by exhaustive enumeration of simple cycles.
///
/// Every simple cycle is visited once, keyed by its smallest symbol; cost
/// is governed by the cycle count, so this is meant for small truncations.
/// Ties are broken by shorter cycle, then lexicographically smaller word.
pub fn max_mean_cycle_enumerate(g: &ShiftGraph, phi: &MarkovPotential) -> MaxCycleCert {
    let n = g.n_symbols();
    let mut best: Option<(f64, Word)> = None;

    fn consider(best: &mut Option<(f64, Word)>, phi: &MarkovPotential, path: &[Symbol]) {
        let mean = cycle_mean(phi, path);
        let replace = match best {
            None => true,
            Some((bm, bw)) => {
                mean > *bm
                    || (mean == *bm
                        && (path.len() < bw.len()
                            || (path.len() == bw.len() && path < bw.symbols())))
            }
        };
        if replace {
            *best = Some((mean, Word::new(path.to_vec())));
        }
    }

    fn dfs(
        g: &ShiftGraph,
        phi: &MarkovPotential,
        root: Symbol,
        path: &mut Vec<Symbol>,
        on_path: &mut Vec<bool>,
        best: &mut Option<(f64, Word)>,
    ) {
        let cur = *path.last().expect("nonempty path");
        for &b in g.successors(cur) {
            if b == root {
                consider(best, phi, path);
            } else if b > root && !on_path[idx(b)] {
                on_path[idx(b)] = true;
                path.push(b);
                dfs(g, phi, root, path, on_path, best);
                path.pop();
                on_path[idx(b)] = false;
            }
        }
    }

    for root in 1..=n {
        let mut on_path = vec![false; n as usize];
        on_path[idx(root)] = true;
        let mut path = vec![root];
        dfs(g, phi, root, &mut path, &mut on_path, &mut best);
    }

    let (alpha, cycle) = best.expect("a graph without sinks contains a cycle");
    MaxCycleCert { alpha, cycle }
}

/// Maximum mean cycle by the `d_k(v)` walk recurrence.
///
/// `d_k(v)` is the maximum weight of a k-edge walk from symbol 1 to `v`;
/// the optimum is `max_v min_k (d_n(v) - d_k(v)) / (n - k)`, and the walk
/// realizing `d_n` at the arg-max vertex contains only cycles of optimal
/// mean, so the certificate is read off by backtracking to the first
/// repeated vertex.
pub fn max_mean_cycle_karp(g: &ShiftGraph, phi: &MarkovPotential) -> MaxCycleCert {
    let n = g.n_symbols() as usize;
    let mut d = vec![vec![f64::NEG_INFINITY; n]; n + 1];
    let mut pred = vec![vec![u32::MAX; n]; n + 1];
    d[0][0] = 0.0; // source: symbol 1

    for k in 1..=n {
        for b in 1..=g.n_symbols() {
            let mut best = f64::NEG_INFINITY;
            let mut arg = u32::MAX;
            for &a in g.predecessors(b) {
                let w = d[k - 1][idx(a)];
                if w == f64::NEG_INFINITY {
                    continue;
                }
                let cand = w + phi.get(a, b);
                if cand > best {
                    best = cand;
                    arg = a;
                }
            }
            d[k][idx(b)] = best;
            pred[k][idx(b)] = arg;
        }
    }

    let mut alpha = f64::NEG_INFINITY;
    let mut v_star = None;
    for v in 0..n {
        if d[n][v] == f64::NEG_INFINITY {
            continue;
        }
        let mut inner = f64::INFINITY;
        for k in 0..n {
            if d[k][v] == f64::NEG_INFINITY {
                continue;
            }
            inner = inner.min((d[n][v] - d[k][v]) / (n - k) as f64);
        }
        if inner > alpha {
            alpha = inner;
            v_star = Some(v);
        }
    }
    let v_star = v_star.expect("strongly connected graph has n-edge walks");

    // Backtrack the n-edge walk and cut out the repetition closest to its
    // end; every cycle on this walk has mean alpha.
    let mut walk = vec![0u32; n + 1];
    walk[n] = v_star as u32 + 1;
    for k in (1..=n).rev() {
        walk[k - 1] = pred[k][idx(walk[k])];
    }
    let mut seen = vec![usize::MAX; n];
    let mut cycle = Vec::new();
    for k in (0..=n).rev() {
        let v = idx(walk[k]);
        if seen[v] != usize::MAX {
            cycle = walk[k..seen[v]].to_vec();
            break;
        }
        seen[v] = k;
    }
    debug_assert!(!cycle.is_empty(), "an n-edge walk repeats a vertex");
    rotate_min_first(&mut cycle);
    // Report the mean recomputed from the certificate so the pair is
    // exactly consistent.
    let alpha = cycle_mean(phi, &cycle);
    MaxCycleCert {
        alpha,
        cycle: Word::new(cycle),
    }
}

/// Maximizing value `alpha(phi)` with a certificate cycle.
///
/// Dispatches on the truncation size: exhaustive enumeration up to
/// [`ENUMERATION_LIMIT`] symbols, the walk recurrence above that.
pub fn maximizing_value(g: &ShiftGraph, phi: &MarkovPotential) -> MaxCycleCert {
    if g.n_symbols() <= ENUMERATION_LIMIT {
        max_mean_cycle_enumerate(g, phi)
    } else {
        max_mean_cycle_karp(g, phi)
    }
}

// Tolerated per-sweep gauge drift; beyond this the supplied alpha cannot
// be the maximum cycle mean.
const ALPHA_DRIFT_TOL: f64 = 1e-9;

fn value_iteration(
    g: &ShiftGraph,
    phi: &MarkovPotential,
    alpha: f64,
    backward: bool,
) -> Result<Vec<f64>> {
    let n = g.n_symbols() as usize;
    let max_iter = 100 * n + 100;
    let mut v = vec![0.0; n];
    for it in 1..=max_iter {
        let mut tv = vec![f64::NEG_INFINITY; n];
        for s in 1..=g.n_symbols() {
            let neighbors = if backward {
                g.successors(s)
            } else {
                g.predecessors(s)
            };
            let mut best = f64::NEG_INFINITY;
            for &u in neighbors {
                let w = if backward {
                    phi.get(s, u)
                } else {
                    phi.get(u, s)
                };
                best = best.max(w + v[idx(u)] - alpha);
            }
            tv[idx(s)] = best;
        }
        // The gauge absorbs uniform shifts, so the subtracted max is the
        // per-sweep drift: at the fixed point it equals the max-plus
        // eigenvalue minus the supplied alpha.
        let m = tv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for x in &mut tv {
            *x -= m;
        }
        let d = tv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = tv;
        let scale = v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if d < VALUE_ITER_TOL.max(8.0 * f64::EPSILON * scale) {
            if m.abs() > ALPHA_DRIFT_TOL {
                return Err(Error::AlphaMismatch {
                    supplied: alpha,
                    drift: m,
                    implied: alpha + m,
                });
            }
            return Ok(v);
        }
        if it == max_iter {
            return Err(Error::SubactionDiverged {
                iterations: it,
                defect: d,
            });
        }
    }
    unreachable!()
}

/// Forward sub-action by max-plus value iteration with a max-subtraction
/// gauge each sweep. Requires `alpha` to be the maximizing value; anything
/// else leaves a persistent per-sweep drift, reported as a mismatch.
pub fn forward_subaction(g: &ShiftGraph, phi: &MarkovPotential, alpha: f64) -> Result<Vec<f64>> {
    value_iteration(g, phi, alpha, false)
}

/// Backward sub-action: the mirror iteration over successors.
pub fn backward_subaction(g: &ShiftGraph, phi: &MarkovPotential, alpha: f64) -> Result<Vec<f64>> {
    value_iteration(g, phi, alpha, true)
}

/// Calibrated sub-action pair with its tight edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct SubActionPair {
    pub alpha: f64,
    pub v: Vec<f64>,
    pub v_t: Vec<f64>,
    /// Edges where `phi(ab) + V(a) - V(b) = alpha` within
    /// [`OMEGA_EDGE_TOL`].
    pub omega_edges: Vec<(Symbol, Symbol)>,
}

impl SubActionPair {
    pub fn v(&self, a: Symbol) -> f64 {
        self.v[idx(a)]
    }

    pub fn v_t(&self, a: Symbol) -> f64 {
        self.v_t[idx(a)]
    }

    /// `phi(ab) + V(a) - V(b) - alpha`; nonpositive up to rounding.
    pub fn forward_defect(&self, phi: &MarkovPotential, a: Symbol, b: Symbol) -> f64 {
        phi.get(a, b) + self.v(a) - self.v(b) - self.alpha
    }

    /// `phi(ab) + V^T(b) - V^T(a) - alpha`; nonpositive up to rounding.
    pub fn backward_defect(&self, phi: &MarkovPotential, a: Symbol, b: Symbol) -> f64 {
        phi.get(a, b) + self.v_t(b) - self.v_t(a) - self.alpha
    }

    /// Max over symbols of the defect of the forward fixed-point equation.
    pub fn forward_calibration_residual(&self, g: &ShiftGraph, phi: &MarkovPotential) -> f64 {
        (1..=g.n_symbols())
            .map(|b| {
                let best = g
                    .predecessors(b)
                    .iter()
                    .map(|&a| phi.get(a, b) + self.v(a) - self.alpha)
                    .fold(f64::NEG_INFINITY, f64::max);
                (best - self.v(b)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Max over symbols of the defect of the backward fixed-point equation.
    pub fn backward_calibration_residual(&self, g: &ShiftGraph, phi: &MarkovPotential) -> f64 {
        (1..=g.n_symbols())
            .map(|a| {
                let best = g
                    .successors(a)
                    .iter()
                    .map(|&b| phi.get(a, b) + self.v_t(b) - self.alpha)
                    .fold(f64::NEG_INFINITY, f64::max);
                (best - self.v_t(a)).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn sup_v_plus_v_t(&self) -> f64 {
        self.v
            .iter()
            .zip(&self.v_t)
            .map(|(a, b)| a + b)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Computes the calibrated pair `(V, V^T)`, jointly shifted so that
/// `max_a (V(a) + V^T(a)) = 0`, and collects the tight edge set.
pub fn subaction_pair(g: &ShiftGraph, phi: &MarkovPotential, alpha: f64) -> Result<SubActionPair> {
    let mut v = forward_subaction(g, phi, alpha)?;
    let mut v_t = backward_subaction(g, phi, alpha)?;
    let m = v
        .iter()
        .zip(&v_t)
        .map(|(a, b)| a + b)
        .fold(f64::NEG_INFINITY, f64::max);
    for x in v.iter_mut().chain(v_t.iter_mut()) {
        *x -= m / 2.0;
    }
    let mut pair = SubActionPair {
        alpha,
        v,
        v_t,
        omega_edges: Vec::new(),
    };
    pair.omega_edges = g
        .edges()
        .filter(|&(a, b)| pair.forward_defect(phi, a, b).abs() <= OMEGA_EDGE_TOL)
        .collect();
    Ok(pair)
}

/// Zero-temperature route to the sub-actions: `(1/t) log h_t` along a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTempSubaction {
    /// `(1/t_max) log h_{t_max}` after gauge alignment.
    pub v: Vec<f64>,
    /// Same through the transpose eigenvector.
    pub v_t: Vec<f64>,
    /// Sup-norm differences between consecutive grid points (gauged).
    pub cauchy_diffs: Vec<f64>,
    /// Whether the differences shrink along the grid; a false value is a
    /// warning, not an error.
    pub cauchy_decreasing: bool,
}

/// Extracts sub-actions from the spectral route.
///
/// The output carries a first-order `O(log/t)` error, so it matches the
/// max-plus pair only within a tolerance of that order at the grid end.
pub fn subaction_zero_temp(
    g: &ShiftGraph,
    phi: &MarkovPotential,
    t_grid: &[f64],
    eigen_tol: f64,
) -> Result<ZeroTempSubaction> {
    assert!(!t_grid.is_empty(), "empty inverse-temperature grid");
    let gauge = |mut v: Vec<f64>| {
        let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for x in &mut v {
            *x -= m;
        }
        v
    };
    let mut cauchy_diffs = Vec::new();
    let mut prev: Option<Vec<f64>> = None;
    let mut last: Option<(Vec<f64>, Vec<f64>)> = None;
    for &t in t_grid {
        let sd = leading_eigen(g, phi, t, eigen_tol, None)?;
        let vt: Vec<f64> = gauge(sd.log_h.iter().map(|x| x / t).collect());
        let vtt: Vec<f64> = gauge(sd.log_h_t.iter().map(|x| x / t).collect());
        if let Some(p) = &prev {
            let d = vt
                .iter()
                .zip(p)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            cauchy_diffs.push(d);
        }
        prev = Some(vt.clone());
        last = Some((vt, vtt));
    }
    let (mut v, mut v_t) = last.expect("nonempty grid");
    let m = v
        .iter()
        .zip(&v_t)
        .map(|(a, b)| a + b)
        .fold(f64::NEG_INFINITY, f64::max);
    for x in v.iter_mut().chain(v_t.iter_mut()) {
        *x -= m / 2.0;
    }
    let cauchy_decreasing = cauchy_diffs.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    Ok(ZeroTempSubaction {
        v,
        v_t,
        cauchy_diffs,
        cauchy_decreasing,
    })
}

/// Tight edge set and the recurrent structure it spans.
#[derive(Debug, Clone, PartialEq)]
pub struct NonWandering {
    pub tight_edges: Vec<(Symbol, Symbol)>,
    /// Symbols lying on some cycle made of tight edges.
    pub recurrent_symbols: Vec<Symbol>,
}

/// Computes the tight edge set of the pair and the union of cycles inside
/// it. An empty recurrent part contradicts the existence of maximizing
/// measures on the truncation and is reported as an error.
pub fn nonwandering(
    g: &ShiftGraph,
    phi: &MarkovPotential,
    pair: &SubActionPair,
) -> Result<NonWandering> {
    let n = g.n_symbols() as usize;
    let tight_edges: Vec<(Symbol, Symbol)> = g
        .edges()
        .filter(|&(a, b)| pair.forward_defect(phi, a, b).abs() <= OMEGA_EDGE_TOL)
        .collect();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &tight_edges {
        adj[idx(a)].push(b);
    }
    let scc = tarjan_scc(n, &adj);
    let mut recurrent = Vec::new();
    for comp in &scc {
        let cyclic = comp.len() > 1
            || adj[idx(comp[0])].contains(&comp[0]);
        if cyclic {
            recurrent.extend_from_slice(comp);
        }
    }
    recurrent.sort_unstable();
    if recurrent.is_empty() {
        return Err(Error::EmptyRecurrentSet);
    }
    Ok(NonWandering {
        tight_edges,
        recurrent_symbols: recurrent,
    })
}

// Iterative Tarjan over 1-based symbols.
fn tarjan_scc(n: usize, adj: &[Vec<Symbol>]) -> Vec<Vec<Symbol>> {
    #[derive(Clone)]
    struct NodeState {
        index: usize,
        lowlink: usize,
        on_stack: bool,
        visited: bool,
    }
    let mut st = vec![
        NodeState {
            index: 0,
            lowlink: 0,
            on_stack: false,
            visited: false,
        };
        n
    ];
    let mut counter = 0;
    let mut stack: Vec<Symbol> = Vec::new();
    let mut comps = Vec::new();

    for start in 1..=n as Symbol {
        if st[idx(start)].visited {
            continue;
        }
        // (symbol, next successor position)
        let mut call: Vec<(Symbol, usize)> = vec![(start, 0)];
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos == 0 {
                let s = &mut st[idx(v)];
                s.visited = true;
                s.index = counter;
                s.lowlink = counter;
                s.on_stack = true;
                counter += 1;
                stack.push(v);
            }
            if let Some(&w) = adj[idx(v)].get(*pos) {
                *pos += 1;
                if !st[idx(w)].visited {
                    call.push((w, 0));
                } else if st[idx(w)].on_stack {
                    st[idx(v)].lowlink = st[idx(v)].lowlink.min(st[idx(w)].index);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    let low = st[idx(v)].lowlink;
                    st[idx(p)].lowlink = st[idx(p)].lowlink.min(low);
                }
                if st[idx(v)].lowlink == st[idx(v)].index {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack nonempty");
                        st[idx(w)].on_stack = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::ShiftSpec;
    use crate::transfer::{default_t_grid, DEFAULT_EIGEN_TOL};

    fn f1() -> (ShiftGraph, MarkovPotential) {
        let g = ShiftSpec::full_shift(2).build().unwrap();
        let phi = MarkovPotential::affine_sum(&g, -1.0, 2.0);
        (g, phi)
    }

    fn f2(n: u32) -> (ShiftGraph, MarkovPotential) {
        let g = ShiftSpec::renewal_shift(n).build().unwrap();
        let phi = MarkovPotential::affine_sum(&g, -0.5, 0.0);
        (g, phi)
    }

    #[test]
    fn constant_potential_alpha_is_the_constant() {
        let g = ShiftSpec::full_shift(3).build().unwrap();
        let c = MarkovPotential::from_fn(&g, |_, _| 0.4);
        let cert = maximizing_value(&g, &c);
        assert_eq!(cert.alpha, 0.4);
        assert_eq!(cert.cycle.symbols(), &[1]); // shortest, lex-smallest tie-break
    }

    #[test]
    fn f1_cycle_means_enumerated() {
        // Hand enumeration of the simple cycles of the 2-symbol full shift:
        // (1) mean 0, (2) mean -2, (1 2) mean -1.
        let (g, phi) = f1();
        assert_eq!(cycle_mean(&phi, &[1]), 0.0);
        assert_eq!(cycle_mean(&phi, &[2]), -2.0);
        assert_eq!(cycle_mean(&phi, &[1, 2]), -1.0);
        let cert = max_mean_cycle_enumerate(&g, &phi);
        assert_eq!(cert.alpha, 0.0);
        assert_eq!(cert.cycle.symbols(), &[1]);
        let karp = max_mean_cycle_karp(&g, &phi);
        assert_eq!(karp.alpha, 0.0);
        assert_eq!(karp.cycle.symbols(), &[1]);
    }

    #[test]
    fn renewal_alpha_at_the_fixed_point() {
        let (g, phi) = f2(5);
        let cert = maximizing_value(&g, &phi);
        assert_eq!(cert.alpha, -1.0);
        assert_eq!(cert.cycle.symbols(), &[1]);
        // Large truncation goes through the walk recurrence.
        let (g, phi) = f2(20);
        let cert = maximizing_value(&g, &phi);
        assert_eq!(cert.alpha, -1.0);
        assert_eq!(cert.cycle.symbols(), &[1]);
        let enum20 = max_mean_cycle_enumerate(&g, &phi);
        assert_eq!(enum20.alpha, cert.alpha);
    }

    #[test]
    fn forward_subaction_on_f1() {
        let (g, phi) = f1();
        // Hand fixed point: V(2) = max(-1 + V(1), -2 + V(2)) forces
        // V = (0, -1) in the max-gauge.
        let v = forward_subaction(&g, &phi, 0.0).unwrap();
        assert!((v[0] - 0.0).abs() < 1e-14);
        assert!((v[1] + 1.0).abs() < 1e-14);
        let vt = backward_subaction(&g, &phi, 0.0).unwrap();
        assert!((vt[0] - 0.0).abs() < 1e-14);
        assert!((vt[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_potential_subactions_are_constant() {
        let g = ShiftSpec::full_shift(4).build().unwrap();
        let zero = MarkovPotential::from_fn(&g, |_, _| 0.0);
        let pair = subaction_pair(&g, &zero, 0.0).unwrap();
        for a in 1..=4 {
            assert_eq!(pair.v(a), 0.0);
            assert_eq!(pair.v_t(a), 0.0);
        }
        assert_eq!(pair.omega_edges.len(), 16); // every edge is tight
    }

    #[test]
    fn calibration_of_the_renewal_pair() {
        let (g, phi) = f2(5);
        let phi0 = phi.normalized(-1.0);
        let pair = subaction_pair(&g, &phi0, 0.0).unwrap();
        assert!(pair.forward_calibration_residual(&g, &phi0) < CALIBRATION_TOL);
        assert!(pair.backward_calibration_residual(&g, &phi0) < CALIBRATION_TOL);
        assert!(pair.sup_v_plus_v_t().abs() < CALIBRATION_TOL);
        // Sub-action inequality on every edge.
        for (a, b) in g.edges() {
            assert!(pair.forward_defect(&phi0, a, b) <= 1e-12);
        }
        // Known closed form V(b) = (1 - b)/2.
        for b in 1..=5u32 {
            assert!((pair.v(b) - (1.0 - b as f64) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn backward_of_phi_equals_forward_of_transpose() {
        let (g, phi) = f2(6);
        let phi0 = phi.normalized(-1.0);
        let bwd = backward_subaction(&g, &phi0, 0.0).unwrap();
        let fwd_t = forward_subaction(&g.transpose(), &phi0.transpose(), 0.0).unwrap();
        assert_eq!(bwd, fwd_t);
    }

    #[test]
    fn wrong_alpha_is_detected() {
        let (g, phi) = f1();
        let err = forward_subaction(&g, &phi, -0.5).unwrap_err();
        match err {
            Error::AlphaMismatch { drift, implied, .. } => {
                assert!((drift - 0.5).abs() < 1e-12);
                assert!(implied.abs() < 1e-12);
            }
            other => panic!("expected alpha mismatch, got {other:?}"),
        }
    }

    #[test]
    fn maximizing_cycle_is_tight() {
        let (g, phi) = f1();
        let cert = maximizing_value(&g, &phi);
        let pair = subaction_pair(&g, &phi, cert.alpha).unwrap();
        let c = cert.cycle.symbols();
        for i in 0..c.len() {
            let (a, b) = (c[i], c[(i + 1) % c.len()]);
            assert!(pair.forward_defect(&phi, a, b).abs() < 1e-12);
        }
    }

    #[test]
    fn nonwandering_structure_on_fixtures() {
        let g = ShiftSpec::full_shift(2).build().unwrap();
        let zero = MarkovPotential::from_fn(&g, |_, _| 0.0);
        let pair = subaction_pair(&g, &zero, 0.0).unwrap();
        let nw = nonwandering(&g, &zero, &pair).unwrap();
        assert_eq!(nw.tight_edges.len(), 4);
        assert_eq!(nw.recurrent_symbols, vec![1, 2]);

        // F1: defect table is 0, 0, -2, -2 on edges 11, 12, 21, 22, so the
        // only cycle inside the tight set is the self-loop at 1.
        let (g, phi) = f1();
        let pair = subaction_pair(&g, &phi, 0.0).unwrap();
        assert!((pair.forward_defect(&phi, 1, 1) - 0.0).abs() < 1e-14);
        assert!((pair.forward_defect(&phi, 1, 2) - 0.0).abs() < 1e-14);
        assert!((pair.forward_defect(&phi, 2, 1) + 2.0).abs() < 1e-14);
        assert!((pair.forward_defect(&phi, 2, 2) + 2.0).abs() < 1e-14);
        let nw = nonwandering(&g, &phi, &pair).unwrap();
        assert_eq!(nw.tight_edges, vec![(1, 1), (1, 2)]);
        assert_eq!(nw.recurrent_symbols, vec![1]);

        let (g, phi) = f2(5);
        let phi0 = phi.normalized(-1.0);
        let pair = subaction_pair(&g, &phi0, 0.0).unwrap();
        let nw = nonwandering(&g, &phi0, &pair).unwrap();
        assert_eq!(nw.recurrent_symbols, vec![1]);
        // V + V^T is constant (= 0) on the recurrent part.
        for &a in &nw.recurrent_symbols {
            assert!((pair.v(a) + pair.v_t(a)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_temperature_route_matches_max_plus() {
        let (g, phi) = f1();
        let zt = subaction_zero_temp(&g, &phi, &default_t_grid(), DEFAULT_EIGEN_TOL).unwrap();
        let pair = subaction_pair(&g, &phi, 0.0).unwrap();
        // Spread of the difference is gauge-free.
        let diffs: Vec<f64> = zt.v.iter().zip(&pair.v).map(|(a, b)| a - b).collect();
        let spread = diffs.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
            - diffs.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        assert!(spread < 5e-2, "spread {spread}");
        // F1's rank-one kernel makes the route exact at every t.
        assert!((zt.v[0] - 0.0).abs() < 1e-10);
        assert!((zt.v[1] + 1.0).abs() < 1e-10);
        assert!(zt.cauchy_decreasing || zt.cauchy_diffs.iter().all(|&d| d < 1e-12));

        // Calibration within the first-order budget at the grid end.
        let loose = SubActionPair {
            alpha: 0.0,
            v: zt.v.clone(),
            v_t: zt.v_t.clone(),
            omega_edges: vec![],
        };
        assert!(loose.forward_calibration_residual(&g, &phi) < 5e-2);
    }

    #[test]
    fn zero_temperature_route_on_constant_potential_is_exact() {
        let g = ShiftSpec::full_shift(2).build().unwrap();
        let zero = MarkovPotential::from_fn(&g, |_, _| 0.0);
        let zt = subaction_zero_temp(&g, &zero, &[1.0, 4.0, 16.0], DEFAULT_EIGEN_TOL).unwrap();
        for a in 0..2 {
            assert!(zt.v[a].abs() < 1e-13);
            assert!(zt.v_t[a].abs() < 1e-13);
        }
        for d in zt.cauchy_diffs {
            assert!(d < 1e-13);
        }
    }
}
