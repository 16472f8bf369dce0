//! Numerical laboratory for an inverse boundary-value problem for the
//! time-dependent convection-diffusion equation
//!
//! ```text
//!     dt u - sum_j (d_j + A_j)^2 u + q u = 0      on (0,T) x (0,1)^n
//! ```
//!
//! with complex-valued convection field `A` and absorption `q`. The bottom face
//! of the cube is inaccessible: Dirichlet data are prescribed and flux data are
//! read only on the remaining, accessible part of the lateral boundary.
//!
//! The crate provides
//!
//! - regular space-time grids on the cube and on its mirror extension across
//!   the inaccessible face ([`geometry`]),
//! - sampled complex scalar/vector fields, synthetic coefficient generators,
//!   gauge transforms and discrete Fourier functionals ([`fields`]),
//! - a Crank-Nicolson forward/adjoint solver with spectrally preconditioned
//!   Krylov steps, Neumann traces and simulated boundary-measurement records
//!   ([`forward`]),
//! - exponentially weighted probe solutions built from a reflected phase pair,
//!   including plane-wise Cauchy-transform amplitude corrections and remainder
//!   estimation ([`cgo`]),
//! - the recovery pipeline: boundary-pairing evaluation, Fourier-sample
//!   extraction with Richardson limits, curl assembly, gauge-potential and
//!   density reconstruction, and a distinguishability verdict ([`recovery`]),
//! - deterministic binary/CSV artifact writers ([`io`]) and configuration
//!   fingerprints ([`fingerprint`]).
//!
//! All floating-point work is `f64`; field values are `Complex64` throughout.

#![warn(missing_docs)]

pub mod cgo;
pub mod error;
pub mod fields;
pub mod fingerprint;
pub mod forward;
pub mod geometry;
pub mod recovery;

pub use cgo::{CgoProbe, Phase, ProbeBump, ProbeRole};
pub use error::{Error, Result};
pub use fields::{AnalyticPair, AnalyticScalar, CoefficientPair, ScalarField, VectorField};
pub use forward::{
    apply_dn, build_dataset, solve_adjoint, solve_adjoint_with, solve_forward, solve_forward_with,
    BoundaryField, Coverage, DirichletDatum, DnDataset, DnRecord, Restriction, SolveStats,
    SolverOptions,
};
pub use geometry::{BoundaryClass, ExtendedGrid, Face, Side, SpaceTimeGrid};
pub use recovery::{IdentityEvaluation, IdentityLab, ProbeMode, ProbeSpec};

/// Complex scalar type used for all field values.
pub type Complex64 = num_complex::Complex<f64>;

/// Shorthand for the complex unit `i`.
pub const I: Complex64 = Complex64::new(0.0, 1.0);
