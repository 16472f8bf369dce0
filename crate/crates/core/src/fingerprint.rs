//! Content fingerprints for datasets and run manifests.
//!
//! Fingerprints are hex SHA-256 digests over a canonical little-endian byte
//! encoding, so two runs that produce bitwise-identical data produce
//! identical digests regardless of platform.

use sha2::{Digest, Sha256};

use crate::fields::{CoefficientPair, ScalarField};
use crate::geometry::SpaceTimeGrid;
use crate::Complex64;

/// Incremental SHA-256 writer with typed push helpers.
pub struct Fingerprint {
    hasher: Sha256,
}

impl Fingerprint {
    /// Start a digest seeded with a domain-separation label.
    pub fn new(label: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(label.as_bytes());
        hasher.update([0u8]);
        Self { hasher }
    }

    /// Push raw bytes.
    pub fn bytes(&mut self, b: &[u8]) -> &mut Self {
        self.hasher.update(b);
        self
    }

    /// Push a usize as u64 little-endian.
    pub fn uint(&mut self, v: usize) -> &mut Self {
        self.hasher.update((v as u64).to_le_bytes());
        self
    }

    /// Push one f64.
    pub fn f64(&mut self, v: f64) -> &mut Self {
        self.hasher.update(v.to_le_bytes());
        self
    }

    /// Push a complex slice.
    pub fn complex_slice(&mut self, vs: &[Complex64]) -> &mut Self {
        for v in vs {
            self.hasher.update(v.re.to_le_bytes());
            self.hasher.update(v.im.to_le_bytes());
        }
        self
    }

    /// Finish and render as lowercase hex.
    pub fn finish(self) -> String {
        let digest = self.hasher.finalize();
        let mut out = String::with_capacity(64);
        for b in digest {
            use std::fmt::Write;
            let _ = write!(out, "{b:02x}");
        }
        out
    }
}

/// Digest of the grid geometry (axes, steps, time extent).
pub fn fingerprint_grid(grid: &SpaceTimeGrid) -> String {
    let mut fp = Fingerprint::new("grid");
    fp.uint(grid.dim());
    for k in 0..grid.dim() {
        let ax = grid.axis(k);
        fp.uint(ax.len).f64(ax.origin).f64(ax.dx);
    }
    fp.uint(grid.nt()).f64(grid.t_end());
    fp.finish()
}

/// Digest of a sampled scalar field, including its grid.
pub fn fingerprint_field(field: &ScalarField) -> String {
    let mut fp = Fingerprint::new("field");
    fp.bytes(fingerprint_grid(field.grid()).as_bytes());
    fp.complex_slice(field.data());
    fp.finish()
}

/// Digest of a coefficient pair, including its grid.
pub fn fingerprint_pair(pair: &CoefficientPair) -> String {
    let mut fp = Fingerprint::new("pair");
    fp.bytes(fingerprint_grid(pair.grid()).as_bytes());
    for j in 0..pair.a.dim() {
        fp.complex_slice(pair.a.comp(j).data());
    }
    fp.complex_slice(pair.q.data());
    fp.finish()
}
