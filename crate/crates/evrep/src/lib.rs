//! Coherent-state reconstruction for a spin s and the discrete
//! expectation-value representation built on it.
//!
//! The crate covers the full pipeline:
//!
//! - [`spincore`]: spin operators, rotations, coherent states;
//! - [`quorum`]: the (2s+1)^2 measurement directions, projector kernels,
//!   Gram metric and dual kernels;
//! - [`symbols`]: lower/upper symbols, reconstruction and trace pairings;
//! - [`tomography`]: Stern-Gerlach probabilities, sampling, linear
//!   inversion and validation;
//! - [`dynamics`]: the linear probability-space evolution generator;
//! - [`swcheck`]: numerical certification of the kernel-family axioms;
//! - [`io`]: versioned JSON/CSV file formats used by the `evrep` CLI.

pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod quorum;
pub mod spincore;
pub mod swcheck;
pub mod symbols;
pub mod tomography;

pub type C64 = num_complex::Complex64;

pub use error::{EvrepError, Result};
pub use quorum::{DirectionScheme, Quorum};
pub use spincore::{Direction, HermitianOperator, StateVector, TwoS};
pub use symbols::{SymbolVector, Variance};
pub use tomography::{DensityMatrix, ProbabilityVector};
