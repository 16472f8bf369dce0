//! Simulated Dirichlet-to-Neumann measurements.
//!
//! A measurement takes Dirichlet data on the lateral boundary, solves the
//! forward problem, and returns the magnetic Neumann flux. In local mode
//! both the data support and the returned flux are restricted to the
//! accessible part of the boundary (every face except the bottom), which is
//! validated before any solve is attempted.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::CoefficientPair;
use crate::fingerprint::{fingerprint_grid, fingerprint_pair, Fingerprint};
use crate::forward::neumann::{BoundaryField, Coverage};
use crate::forward::stepper::{solve_forward_with, DirichletDatum, SolveStats, SolverOptions};

/// Whether measurements use the whole boundary or only the accessible part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restriction {
    /// Data and flux on the whole boundary.
    Full,
    /// Data supported away from the bottom face; flux returned there only.
    Local,
}

impl Restriction {
    /// Flux coverage implied by the restriction.
    pub fn coverage(self) -> Coverage {
        match self {
            Restriction::Full => Coverage::Whole,
            Restriction::Local => Coverage::Accessible,
        }
    }
}

/// One measurement: the flux produced by one Dirichlet probe.
#[derive(Debug, Clone)]
pub struct DnRecord {
    /// Caller-chosen probe identifier.
    pub probe_id: String,
    /// Digest of the probe data that produced this record.
    pub datum_fingerprint: String,
    /// Measured flux on the covered faces.
    pub flux: BoundaryField,
    /// Iteration statistics of the underlying solve.
    pub stats: SolveStats,
}

/// A batch of measurements against one coefficient pair.
#[derive(Debug, Clone)]
pub struct DnDataset {
    /// Digest of the grid geometry.
    pub grid_fingerprint: String,
    /// Digest of the coefficients the measurements were simulated against.
    pub coefficient_fingerprint: String,
    /// Boundary coverage of every record.
    pub restriction: Restriction,
    /// Records in probe order.
    pub records: Vec<DnRecord>,
}

/// Fraction of the data scale a local probe may leak onto the bottom face.
const SUPPORT_TOL: f64 = 1e-12;

fn fingerprint_datum(datum: &DirichletDatum) -> String {
    let mut fp = Fingerprint::new("datum");
    fp.bytes(fingerprint_grid(datum.grid()).as_bytes());
    for m in 0..=datum.grid().nt() {
        for &flat in datum.nodes() {
            let v = datum.value(m, flat);
            fp.f64(v.re).f64(v.im);
        }
    }
    fp.finish()
}

/// Apply the measurement map to one probe.
pub fn apply_dn(
    pair: &CoefficientPair,
    datum: &DirichletDatum,
    restriction: Restriction,
    opts: &SolverOptions,
) -> Result<DnRecord> {
    if restriction == Restriction::Local {
        let defect = datum.inaccessible_defect();
        let scale = datum.linf().max(1.0);
        if defect > SUPPORT_TOL * scale {
            return Err(Error::InvalidProbe(format!(
                "local measurement requires data supported on the accessible \
                 boundary; bottom-face leakage {defect:.3e} exceeds {:.1e}",
                SUPPORT_TOL * scale
            )));
        }
    }
    let (u, stats) = solve_forward_with(pair, datum, None, opts)?;
    let flux = BoundaryField::neumann_trace(&u, pair, restriction.coverage());
    Ok(DnRecord {
        probe_id: String::new(),
        datum_fingerprint: fingerprint_datum(datum),
        flux,
        stats,
    })
}

/// Simulate a whole probe batch. Probes are solved in parallel; the record
/// order always matches the probe order regardless of worker count.
pub fn build_dataset(
    pair: &CoefficientPair,
    probes: &[(String, DirichletDatum)],
    restriction: Restriction,
    opts: &SolverOptions,
) -> Result<DnDataset> {
    let records: Vec<DnRecord> = probes
        .par_iter()
        .map(|(id, datum)| {
            apply_dn(pair, datum, restriction, opts).map(|mut rec| {
                rec.probe_id = id.clone();
                rec
            })
        })
        .collect::<Result<_>>()?;
    Ok(DnDataset {
        grid_fingerprint: fingerprint_grid(pair.grid()),
        coefficient_fingerprint: fingerprint_pair(pair),
        restriction,
        records,
    })
}

impl DnDataset {
    /// Look up a record by probe id.
    pub fn record(&self, probe_id: &str) -> Result<&DnRecord> {
        self.records
            .iter()
            .find(|r| r.probe_id == probe_id)
            .ok_or_else(|| Error::RecordNotFound(format!("no record for probe '{probe_id}'")))
    }

    /// Digest of the full dataset content.
    pub fn fingerprint(&self) -> String {
        let mut fp = Fingerprint::new("dataset");
        fp.bytes(self.grid_fingerprint.as_bytes());
        fp.bytes(self.coefficient_fingerprint.as_bytes());
        fp.uint(match self.restriction {
            Restriction::Full => 0,
            Restriction::Local => 1,
        });
        for rec in &self.records {
            fp.bytes(rec.probe_id.as_bytes());
            fp.bytes(rec.datum_fingerprint.as_bytes());
            for fi in 0..rec.flux.faces().len() {
                fp.complex_slice(rec.flux.face_values(fi));
            }
        }
        fp.finish()
    }
}
