//! Spectral invariants of fractal sets built on curves.
//!
//! The library enumerates Dirac eigenvalue spectra of curve-based modules
//! (circles, intervals, edges, metric graphs, self-similar trees, the
//! Sierpinski gasket), evaluates the associated spectral zeta functions and
//! their complex-dimension pole sets, estimates metric dimensions from
//! eigenvalue counting functions, computes Dixmier-type trace values by
//! residue and by logarithmic partial sums, and measures geodesic distances
//! on metric graphs, trees and the gasket.
//!
//! Everything works at the level of spectra, pullbacks and averages; no
//! Hilbert-space operator is ever materialized.

pub mod cli;
pub mod dimension;
pub mod gasket;
pub mod graph;
pub mod spectrum;
pub mod tree;
pub mod zeta;

mod numerics;

pub use num_complex::Complex64;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("edge length must be positive, got {0}")]
    NonpositiveLength(f64),
    #[error("edge endpoint {0} is not a vertex of the graph")]
    DanglingEndpoint(usize),
    #[error("duplicate edge between {0} and {1} (enable parallel edges to allow)")]
    DuplicateEdge(usize, usize),
    #[error("self-loop at vertex {0} (enable loops to allow)")]
    SelfLoop(usize),
    #[error("invalid edge id {0}")]
    InvalidEdge(usize),
    #[error("invalid vertex id {0}")]
    InvalidVertex(usize),
    #[error("offset {offset} outside [0, {len}] on edge {edge}")]
    OffsetOutOfRange { edge: usize, offset: f64, len: f64 },
    #[error("points lie in different connected components")]
    Disconnected,
    #[error("pole of the function at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("re(z) = {sigma} is at or below the abscissa of convergence {abscissa}")]
    BelowAbscissa { sigma: f64, abscissa: f64 },
    #[error("target accuracy {target} unachievable within the configured cap")]
    TargetUnachievable { target: f64 },
    #[error("exponent p must be >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("depth {depth} exceeds the configured cap {cap}")]
    DepthOverCap { depth: usize, cap: usize },
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("point ({0}, {1}) is not on the gasket")]
    NotOnGasket(f64, f64),
    #[error("triangle address letter must be 0, 1 or 2, got {0}")]
    InvalidAddressLetter(u8),
    #[error("arclength parameter {t} outside [-{half}, {half}]")]
    ParamOutOfDomain { t: f64, half: f64 },
    #[error("degenerate length family: {0}")]
    DegenerateFamily(String),
    #[error("window must be bounded, lie in re > 0 and satisfy re_min < re_max, im_min < im_max")]
    InvalidWindow,
    #[error("{0} is not a simple real pole of the form")]
    NotAPole(f64),
    #[error("need at least {need} sample points, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("partial-sum index N must exceed 1")]
    DegenerateN,
    #[error("N = {0} exceeds the enumerable range of the spectrum")]
    RangeExhausted(u64),
    #[error("extrapolation did not converge")]
    ExtrapolationFailed,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    /// Errors caused by evaluating outside a numeric domain (poles,
    /// divergent abscissas, degenerate limits) as opposed to malformed input.
    pub fn is_numeric_domain(&self) -> bool {
        matches!(
            self,
            Error::Pole { .. }
                | Error::BelowAbscissa { .. }
                | Error::TargetUnachievable { .. }
                | Error::NotAPole(_)
                | Error::DegenerateFamily(_)
                | Error::DegenerateN
                | Error::RangeExhausted(_)
                | Error::ExtrapolationFailed
                | Error::Disconnected
                | Error::NotOnGasket(_, _)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
