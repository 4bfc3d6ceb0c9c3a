//! Error type shared by all solver modules.

use thiserror::Error;

/// Failures surfaced by grid validation, scheme steps, and mesh solvers.
///
/// Variants carry enough location information (node/cell index, iteration
/// counts, residuals) for a runner to report where and when a run died.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid nodes out of order or a collapsed spacing; `index` is the first
    /// offending node (1D) or flattened node index (2D).
    #[error("mesh tangled at index {index}{}", at_time(.time))]
    Tangled { index: usize, time: Option<f64> },

    /// Fluid depth lost positivity after a step.
    #[error("nonpositive depth h = {value} at index {index}{}", at_time(.time))]
    NonPositiveDepth {
        index: usize,
        value: f64,
        time: Option<f64>,
    },

    /// A stencil degenerated (e.g. x_{i+1} == x_{i-1}).
    #[error("degenerate stencil spacing at index {index}")]
    DegenerateStencil { index: usize },

    /// An iterative solver ran out of iterations.
    #[error("{solver} did not converge: residual {residual:.3e} after {iterations} iterations{}", at_time(.time))]
    NoConvergence {
        solver: &'static str,
        residual: f64,
        iterations: usize,
        time: Option<f64>,
    },

    /// The Voronoi cell of an inserted interpolation point was unbounded.
    #[error("unbounded Voronoi cell for interpolation point ({x}, {y})")]
    UnboundedCell { x: f64, y: f64 },

    /// Configuration file or parameter problem.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn at_time(t: &Option<f64>) -> String {
    match t {
        Some(t) => format!(" at t = {t}"),
        None => String::new(),
    }
}

impl Error {
    /// Attaches a simulation time to location-carrying errors, leaving
    /// others untouched. Used by the runner, which knows the clock.
    pub fn with_time(self, t: f64) -> Self {
        match self {
            Error::Tangled { index, .. } => Error::Tangled {
                index,
                time: Some(t),
            },
            Error::NonPositiveDepth { index, value, .. } => Error::NonPositiveDepth {
                index,
                value,
                time: Some(t),
            },
            Error::NoConvergence {
                solver,
                residual,
                iterations,
                ..
            } => Error::NoConvergence {
                solver,
                residual,
                iterations,
                time: Some(t),
            },
            other => other,
        }
    }
}
