//! Coefficient recovery from boundary data: identity evaluation, Fourier
//! sample extraction with semiclassical extrapolation, curl assembly, gauge
//! potential reconstruction, density recovery, and the final equivalence
//! verdict.

mod extract;
mod identity;
mod samples;

pub use extract::{
    assemble_curl, convection_oracle, curl_oracle, extract_convection_samples, fill_degenerate,
    CurlAssembly, ExtractionPlan,
};
pub use identity::{BoundaryMeasurement, IdentityEvaluation, IdentityLab, ProbeMode, ProbeSpec};
pub use samples::{
    half_lattice, richardson_extrapolate, xi_lattice, FourierSample, FourierSampleSet,
    LatticePoint, ProbeFrame, RichardsonFit, SampleKind, SweepPoint,
};
