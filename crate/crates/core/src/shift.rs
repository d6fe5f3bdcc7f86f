//! Finite truncations of countable Markov shifts.
//!
//! A shift space over the alphabet `{1, ..., N}` is described by a 0/1
//! incidence structure: the sequence `x_0 x_1 x_2 ...` is admissible when
//! every consecutive pair `(x_i, x_{i+1})` is an edge of the graph. The
//! standing assumption is that no symbol is a sink or a source, i.e. no row
//! and no column of the incidence matrix vanishes.
//!
//! The countable alphabet is only ever reached through truncations: a
//! [`ShiftSpec`] names either an explicit edge list or a generator family
//! together with a bound `N`, and downstream quantities are studied as `N`
//! grows.

use crate::error::{Error, Result};

/// Alphabet symbol, 1-based.
pub type Symbol = u32;

/// Generator for the edge set of a truncated shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShiftFamily {
    /// Edges listed explicitly.
    Explicit { edges: Vec<(Symbol, Symbol)> },
    /// Complete graph on `{1, ..., N}`.
    Full,
    /// Renewal shift: `1 -> a` for every `a <= N`, and `a -> a-1` for
    /// `2 <= a <= N`.
    Renewal,
}

/// A shift family together with its truncation bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSpec {
    pub family: ShiftFamily,
    pub alphabet_bound: u32,
}

impl ShiftSpec {
    pub fn full_shift(n: u32) -> Self {
        ShiftSpec {
            family: ShiftFamily::Full,
            alphabet_bound: n,
        }
    }

    pub fn renewal_shift(n: u32) -> Self {
        ShiftSpec {
            family: ShiftFamily::Renewal,
            alphabet_bound: n,
        }
    }

    pub fn explicit(alphabet_bound: u32, edges: Vec<(Symbol, Symbol)>) -> Self {
        ShiftSpec {
            family: ShiftFamily::Explicit { edges },
            alphabet_bound,
        }
    }

    /// Materializes the edge set up to the alphabet bound.
    ///
    /// Rejects specs whose induced incidence matrix has a zero row or a zero
    /// column, so every symbol of the resulting graph has at least one
    /// successor and one predecessor.
    pub fn build(&self) -> Result<ShiftGraph> {
        let n = self.alphabet_bound;
        if n == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let edges: Vec<(Symbol, Symbol)> = match &self.family {
            ShiftFamily::Explicit { edges } => edges.clone(),
            ShiftFamily::Full => {
                let mut e = Vec::with_capacity((n * n) as usize);
                for a in 1..=n {
                    for b in 1..=n {
                        e.push((a, b));
                    }
                }
                e
            }
            ShiftFamily::Renewal => {
                let mut e = Vec::with_capacity((2 * n - 1) as usize);
                for b in 1..=n {
                    e.push((1, b));
                }
                for a in 2..=n {
                    e.push((a, a - 1));
                }
                e
            }
        };
        ShiftGraph::from_edges(n, &edges)
    }
}

/// Directed graph realizing the incidence matrix of a truncated shift.
///
/// Successor and predecessor lists are kept sorted, describe the same edge
/// set, and every symbol has at least one of each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftGraph {
    n_symbols: u32,
    out_edges: Vec<Vec<Symbol>>,
    in_edges: Vec<Vec<Symbol>>,
}

#[inline]
pub(crate) fn idx(a: Symbol) -> usize {
    (a - 1) as usize
}

impl ShiftGraph {
    pub fn from_edges(n_symbols: u32, edges: &[(Symbol, Symbol)]) -> Result<Self> {
        if n_symbols == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let n = n_symbols as usize;
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > n_symbols || b > n_symbols {
                return Err(Error::SymbolOutOfRange(a, b, n_symbols));
            }
            out_edges[idx(a)].push(b);
            in_edges[idx(b)].push(a);
        }
        for row in out_edges.iter_mut().chain(in_edges.iter_mut()) {
            row.sort_unstable();
        }
        for a in 1..=n_symbols {
            let row = &out_edges[idx(a)];
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(a, w[0]));
            }
            if row.is_empty() {
                return Err(Error::SinkSymbol(a));
            }
            if in_edges[idx(a)].is_empty() {
                return Err(Error::SourceSymbol(a));
            }
        }
        Ok(ShiftGraph {
            n_symbols,
            out_edges,
            in_edges,
        })
    }

    pub fn n_symbols(&self) -> u32 {
        self.n_symbols
    }

    pub fn n_edges(&self) -> usize {
        self.out_edges.iter().map(Vec::len).sum()
    }

    pub fn contains_symbol(&self, a: Symbol) -> bool {
        a >= 1 && a <= self.n_symbols
    }

    pub fn successors(&self, a: Symbol) -> &[Symbol] {
        &self.out_edges[idx(a)]
    }

    pub fn predecessors(&self, b: Symbol) -> &[Symbol] {
        &self.in_edges[idx(b)]
    }

    pub fn has_edge(&self, a: Symbol, b: Symbol) -> bool {
        self.contains_symbol(a)
            && self.contains_symbol(b)
            && self.out_edges[idx(a)].binary_search(&b).is_ok()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Symbol, Symbol)> + '_ {
        (1..=self.n_symbols)
            .flat_map(move |a| self.successors(a).iter().map(move |&b| (a, b)))
    }

    /// True iff every consecutive pair of the word is an edge.
    ///
    /// Words of length zero or one carry no pair, so they are admissible as
    /// long as their symbols lie in the alphabet.
    pub fn is_admissible(&self, word: &Word) -> bool {
        if !word.symbols().iter().all(|&s| self.contains_symbol(s)) {
            return false;
        }
        word.symbols().windows(2).all(|p| self.has_edge(p[0], p[1]))
    }

    /// Strong connectivity of the truncated graph, the finite stand-in for
    /// topological transitivity.
    pub fn is_topologically_transitive(&self) -> bool {
        let n = self.n_symbols as usize;
        let reach_all = |adj: &Vec<Vec<Symbol>>| {
            let mut seen = vec![false; n];
            let mut stack = vec![1 as Symbol];
            seen[0] = true;
            let mut count = 1;
            while let Some(a) = stack.pop() {
                for &b in &adj[idx(a)] {
                    if !seen[idx(b)] {
                        seen[idx(b)] = true;
                        count += 1;
                        stack.push(b);
                    }
                }
            }
            count == n
        };
        reach_all(&self.out_edges) && reach_all(&self.in_edges)
    }

    /// Edge reversal; involutive.
    pub fn transpose(&self) -> ShiftGraph {
        ShiftGraph {
            n_symbols: self.n_symbols,
            out_edges: self.in_edges.clone(),
            in_edges: self.out_edges.clone(),
        }
    }
}

/// Finite word over the alphabet. The length convention is the number of
/// symbols, so the cylinder `[w_0 ... w_n]` has length `n + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Symbol> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.0.last().copied()
    }
}

impl From<&[Symbol]> for Word {
    fn from(s: &[Symbol]) -> Self {
        Word(s.to_vec())
    }
}

impl<const N: usize> From<[Symbol; N]> for Word {
    fn from(s: [Symbol; N]) -> Self {
        Word(s.to_vec())
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.iter().all(|&s| s < 10) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join("-"))?;
        }
        Ok(())
    }
}

/// Cylinder of the bilateral shift: the word `w` pinned so that `w_0` sits
/// at coordinate `k` of the two-sided sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilateralCylinder {
    pub word: Word,
    pub offset: i64,
}

impl BilateralCylinder {
    pub fn new(word: Word, offset: i64) -> Self {
        BilateralCylinder { word, offset }
    }
}
