//! Symmetry-preserving solvers for the 1D and 2D shallow-water equations.
//!
//! The crate implements finite-difference and finite-volume discretizations
//! that are equivariant under the point symmetries of the shallow-water
//! system (space/time translations, Galilean boosts and, in 1D, two
//! scalings), together with the invariant moving-mesh generators that make
//! such schemes practical: 1D equidistribution and a 2D elliptic (Winslow
//! type) grid solver.
//!
//! Organization:
//! - [`model`]: periodic grids, collocated states, configuration records.
//! - [`symmetry`]: finite group actions, difference invariants, and the
//!   two-path equivariance check used throughout the test suite.
//! - [`schemes1d`]: the six 1D schemes (Lagrangian, conservative Lagrangian,
//!   and computational-coordinate variants, explicit and trapezoidal).
//! - [`mesh1d`] / [`mesh2d`]: monitor/weight functions and mesh solvers.
//! - [`fv2d`]: Lagrangian finite-volume schemes on quadrilateral cells with
//!   natural-neighbor corner interpolation.
//! - [`eulerian2d`]: the conservative scheme in computational coordinates
//!   with discrete metric terms.
//! - [`diagnostics`]: discrete mass/momentum/energy time series.
//! - [`config`] / [`runner`]: experiment configuration, presets, CSV output,
//!   equivariance and convergence harnesses.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod eulerian2d;
pub mod fv2d;
pub mod mesh1d;
pub mod mesh2d;
pub mod model;
pub mod numerics;
pub mod runner;
pub mod schemes1d;
pub mod symmetry;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
