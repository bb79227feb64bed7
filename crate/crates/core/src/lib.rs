//! Ising model on random Lorentzian triangulations.
//!
//! The crate samples the critical uniform infinite Lorentzian triangulation
//! through its tree parametrization, converts between forests and
//! triangulations, and runs the Ising and percolation experiments on top:
//! exact Gibbs enumeration, heat-bath dynamics, Peierls contour counts,
//! disagreement percolation and the triangle-insertion surgery.
//!
//! Probability laws are generic over [`Scalar`] so they can be evaluated in
//! `f32`, `f64` or exactly in rationals ([`Exact`]).

pub mod error;
pub mod gw;
pub mod ising;
pub mod lattice;
pub mod peierls;
pub mod percolation;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod surgery;

pub use error::{Error, Result};
pub use lattice::{Forest, Triangulation};
pub use scalar::{Real, Scalar};

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;

/// Exact Gibbs distribution in double precision.
pub type Gibbs = ising::ExactGibbs<f64>;
