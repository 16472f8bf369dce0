//! Complex geometric optics probes: admissible frames, semiclassical phases,
//! transport amplitudes, numerical remainders, and reflected special solutions.

mod analytic;
mod frame;
mod phase;
mod special;
mod transport;

pub use analytic::{build_analytic_part, AnalyticPart, EXP_ARG_LIMIT};
pub use frame::{choose_frame, frame_defect, CgoProbe, ProbeBump, ProbeRole, FRAME_TOL};
pub use phase::{exponent_algebra_defect, CrossTerm, Phase};
pub use special::{
    assemble_reflected, build_special_solution, compute_remainder, restrict_terms,
    semiclassical_norm, RemainderData, SpecialSolution,
};
pub use transport::{solve_transport, CauchyGrid, TransportField, TransportSolution};
