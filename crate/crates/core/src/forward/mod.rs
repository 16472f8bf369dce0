//! Forward and adjoint solves, boundary fluxes, and simulated
//! Dirichlet-to-Neumann measurements.

mod dn;
mod dst;
mod krylov;
mod neumann;
mod stepper;

pub use dn::{apply_dn, build_dataset, DnDataset, DnRecord, Restriction};
pub use dst::DirichletSpectral;
pub use krylov::{bicgstab, KrylovStats, LinOp};
pub use neumann::{BoundaryField, Coverage};
pub use stepper::{
    solve_adjoint, solve_adjoint_with, solve_forward, solve_forward_with, DirichletDatum,
    SolveStats, SolverOptions,
};
