use thiserror::Error;

use crate::shift::Symbol;

/// Errors surfaced by graph construction and the iterative solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet bound must be at least 1")]
    EmptyAlphabet,

    #[error("edge ({0}, {1}) lies outside the alphabet bound {2}")]
    SymbolOutOfRange(Symbol, Symbol, u32),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Symbol, Symbol),

    #[error("symbol {0} has no successor (zero row in the incidence matrix)")]
    SinkSymbol(Symbol),

    #[error("symbol {0} has no predecessor (zero column in the incidence matrix)")]
    SourceSymbol(Symbol),

    #[error("graph is not strongly connected")]
    NotTransitive,

    #[error(
        "power iteration did not converge within {iterations} sweeps \
         (eigen-equation residual {residual:.3e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error(
        "power iteration oscillates with period two after {iterations} sweeps \
         (bipartite-like transition structure); Cesaro-damp the iterates or \
         break the periodicity of the graph"
    )]
    PeriodTwoOscillation { iterations: usize },

    #[error(
        "sub-action value iteration did not converge within {iterations} sweeps \
         (sup-norm defect {defect:.3e}); the tight cycle structure is probably \
         periodic, so the gauged iterates orbit instead of settling"
    )]
    SubactionDiverged { iterations: usize, defect: f64 },

    #[error(
        "supplied maximizing value {supplied} drifts against the max-plus \
         eigenvalue; the value iteration settles at per-sweep increment \
         {drift:.3e}, implying alpha = {implied}"
    )]
    AlphaMismatch {
        supplied: f64,
        drift: f64,
        implied: f64,
    },

    #[error(
        "transition row of symbol {symbol} has sum defect {defect:.3e}, more \
         than ten times the spectral residual {residual:.3e}; the eigen-data \
         is unusable"
    )]
    RowSumDefect {
        symbol: Symbol,
        defect: f64,
        residual: f64,
    },

    #[error(
        "no cycle survives inside the tight edge set; the sub-action pair is \
         not calibrated for this potential"
    )]
    EmptyRecurrentSet,
}

pub type Result<T> = std::result::Result<T, Error>;
