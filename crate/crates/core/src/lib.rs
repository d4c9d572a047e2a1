//! Numerical toolkit for boundary-voltage perturbations caused by small-volume,
//! possibly extreme-contrast conductivity inclusions.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensors`] exact symmetric-matrix algebra and matrix-valued conductivity fields,
//! * [`geometry`] inclusion families `n -> (A_n, B_n, gamma_n)` and the hypothesis checker,
//! * [`mesh`] interface-conforming triangulations and the plain-text mesh format,
//! * [`fem`] P1 assembly, sparse solvers, Dirichlet/Neumann/periodic solves, Green functions,
//! * [`oracles`] closed-form layered-radial and confocal-elliptic solutions,
//! * [`polarization`] correctors and the cellwise densities `D`, `W`, `M = D - W`,
//! * [`asymptotics`] the reciprocity identity, the leading-order term and log-log rate fits,
//! * [`stream`] 2D stream functions and the high/low contrast duality.

pub mod asymptotics;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod mesh;
pub mod oracles;
pub mod polarization;
pub mod registry;
pub mod stream;
pub mod tensors;

pub use error::{Error, Result};
pub use tensors::{MatrixField, Region, SymMat};
