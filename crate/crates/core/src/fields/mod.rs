//! Sampled complex fields on space-time grids, synthetic coefficient
//! generators, mirror extensions, gauge transforms and Fourier functionals.
//!
//! Two field representations coexist:
//!
//! - [`ScalarField`]/[`VectorField`]: values sampled on every node and time
//!   level of a [`SpaceTimeGrid`](crate::geometry::SpaceTimeGrid); all solver
//!   and quadrature work happens here.
//! - [`AnalyticScalar`]/[`AnalyticVector`]: closed-form sums of separable
//!   bump terms with exact derivatives, used to build scenarios, to resample
//!   coefficients on transport planes without interpolation error, and to
//!   evaluate derivative oracles.

mod analytic;
mod extend;
mod field;
mod fourier;
mod gauge;
pub mod ops;

pub use analytic::{AnalyticPair, AnalyticScalar, AnalyticVector, Bump, Term, TimeProfile};
pub use extend::{
    extend_pair, extend_scalar, odd_defect, restrict_scalar, symmetry_defect, Parity,
    ODD_TRACE_TOL,
};
pub use field::{CoefficientPair, ScalarField, VectorField};
pub use fourier::{fourier_oracle, fourier_oracle_level, synthesize_band, SynthesisWindow};
pub use gauge::{
    effective_potential, effective_potential_analytic, gauge_transform, GaugeFunction,
};
