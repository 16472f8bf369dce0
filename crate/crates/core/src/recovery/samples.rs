//! Fourier-sample bookkeeping: the sample container shared by every
//! extraction stage, extrapolation over the semiclassical sweep, the probe
//! frequency lattice, and CSV export.
//!
//! A sample records one extrapolated Fourier-domain value together with the
//! raw sweep behind it. Values at frequency `xi` and slice center `t0` are
//! attributed to the effective frequency `xi (T - t0)^2`, which is where the
//! probe's plane-wave factor actually oscillates at the bump center.

use crate::error::{Error, Result};
use crate::Complex64;
use nalgebra::{Matrix3, Vector3};
use std::io::Write;

/// Absolute tolerance for matching stored frequencies and slice centers.
const KEY_TOL: f64 = 1e-9;

/// What a stored complex value approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleKind {
    /// Directional convection sample `s_+ ~ (i mu1 + mu2) . A_hat`.
    DirectionalPlus,
    /// Directional convection sample `s_- ~ (i mu1 - mu2) . A_hat`.
    DirectionalMinus,
    /// Curl entry `c_jk ~ xi_j A_hat_k - xi_k A_hat_j` for the stored pair.
    Curl(usize, usize),
    /// Density sample `d ~ q_hat` of the scalar difference.
    Density,
}

impl SampleKind {
    /// Short label used in file names and reports.
    pub fn label(&self) -> String {
        match self {
            SampleKind::DirectionalPlus => "s_plus".into(),
            SampleKind::DirectionalMinus => "s_minus".into(),
            SampleKind::Curl(j, k) => format!("curl_{j}{k}"),
            SampleKind::Density => "density".into(),
        }
    }

    /// Sign `sigma` in the conjugate-symmetry relation
    /// `s(-xi) = sigma conj(s(xi))` for real-valued difference fields.
    ///
    /// Densities are plain transforms of a real field. Curl entries carry one
    /// factor of `xi`, and the directional samples inherit the same sign from
    /// the canonical frame, which maps `(mu1, mu2) -> (mu1, -mu2)` under
    /// `xi -> -xi`.
    pub fn conjugation_sign(&self) -> f64 {
        match self {
            SampleKind::Density => 1.0,
            _ => -1.0,
        }
    }
}

/// One raw value of the sweep, before extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// Semiclassical parameter the identity was evaluated at.
    pub h: f64,
    /// Normalized identity value at that `h`.
    pub value: Complex64,
}

/// Result of the extrapolation fit over a sweep.
#[derive(Debug, Clone, Copy)]
pub struct RichardsonFit {
    /// Fitted limit value (the coefficient of the constant basis function).
    pub value: Complex64,
    /// Coefficients of `1, h^(2/5), h^(4/5)` in that order.
    pub coeffs: [Complex64; 3],
    /// Root-mean-square misfit relative to the data scale.
    pub residual: f64,
}

/// Least-squares fit of a sweep against `a0 + a1 h^(2/5) + a2 h^(4/5)` and
/// evaluation at `h = 0`.
///
/// The basis covers the probe error families (the eta expansion contributes
/// `h^(4/5)`, quadrature and remainder bounds the `h^(2/5)` power). The
/// `h^(3/5)` drift from the frequency leg of the phase gradient is not a
/// basis function, but over the narrow sweep range it lies in the span of
/// the even powers to a relative defect below 1e-2, so it perturbs the
/// fitted limit by a fraction of its own (vanishing) size.
pub fn richardson_extrapolate(points: &[SweepPoint]) -> Result<RichardsonFit> {
    if points.len() < 3 {
        return Err(Error::Recovery(format!(
            "extrapolation needs at least 3 sweep points, got {}",
            points.len()
        )));
    }
    let mut gram = Matrix3::zeros();
    let mut rhs_re = Vector3::zeros();
    let mut rhs_im = Vector3::zeros();
    for p in points {
        if !(p.h > 0.0) || !p.value.is_finite() {
            return Err(Error::Recovery(format!(
                "sweep point (h = {}, value = {}) is not usable",
                p.h, p.value
            )));
        }
        let x = p.h.powf(0.4);
        let basis = [1.0, x, x * x];
        for a in 0..3 {
            for b in 0..3 {
                gram[(a, b)] += basis[a] * basis[b];
            }
            rhs_re[a] += basis[a] * p.value.re;
            rhs_im[a] += basis[a] * p.value.im;
        }
    }
    let lu = gram.lu();
    let (sol_re, sol_im) = match (lu.solve(&rhs_re), lu.solve(&rhs_im)) {
        (Some(re), Some(im)) => (re, im),
        _ => {
            return Err(Error::Recovery(
                "extrapolation fit is singular: sweep values of h coincide".into(),
            ))
        }
    };
    let coeffs = [
        Complex64::new(sol_re[0], sol_im[0]),
        Complex64::new(sol_re[1], sol_im[1]),
        Complex64::new(sol_re[2], sol_im[2]),
    ];
    let mut misfit = 0.0;
    let mut scale = coeffs[0].norm();
    for p in points {
        let x = p.h.powf(0.4);
        let fit = coeffs[0] + coeffs[1] * x + coeffs[2] * (x * x);
        misfit += (fit - p.value).norm_sqr();
        scale = scale.max(p.value.norm());
    }
    let rms = (misfit / points.len() as f64).sqrt();
    let residual = if scale == 0.0 { 0.0 } else { rms / scale };
    Ok(RichardsonFit {
        value: coeffs[0],
        coeffs,
        residual,
    })
}

/// Orthonormal tangential legs of the probe frame a directional sample was
/// measured with.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeFrame {
    /// Leg with nonzero normal component.
    pub mu1: Vec<f64>,
    /// Tangential leg (flipped between the plus and minus variants).
    pub mu2: Vec<f64>,
}

/// One extrapolated Fourier-domain measurement.
#[derive(Debug, Clone)]
pub struct FourierSample {
    /// What the value approximates.
    pub kind: SampleKind,
    /// Probe frequency (a lattice point in sweeps).
    pub xi: Vec<f64>,
    /// Center of the time bump pair.
    pub t_center: f64,
    /// Attributed spatial frequency `xi (T - t_center)^2`.
    pub xi_eff: Vec<f64>,
    /// Extrapolated value.
    pub value: Complex64,
    /// Relative fit residual of the extrapolation; zero means exact.
    pub confidence: f64,
    /// Set when `confidence` exceeded the extraction threshold.
    pub low_confidence: bool,
    /// Set when the value was filled by interpolation or symmetry rather
    /// than measured by a probe.
    pub interpolated: bool,
    /// Frame behind a directional sample; absent for derived kinds.
    pub frame: Option<ProbeFrame>,
    /// Raw sweep behind the extrapolation; empty for filled entries.
    pub sweep: Vec<SweepPoint>,
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= KEY_TOL)
}

/// Container for the samples of one extraction run.
///
/// Entries are keyed by `(kind, xi, t_center)`; duplicate keys are rejected
/// so a sweep cannot silently overwrite itself.
#[derive(Debug, Clone, Default)]
pub struct FourierSampleSet {
    entries: Vec<FourierSample>,
}

impl FourierSampleSet {
    /// Empty set.
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of stored samples.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Whether the set holds no samples.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All samples in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &FourierSample> {
        self.entries.iter()
    }

    /// Samples of one kind in insertion order.
    pub fn of_kind(&self, kind: SampleKind) -> impl Iterator<Item = &FourierSample> {
        self.entries.iter().filter(move |s| s.kind == kind)
    }

    /// Looks up the sample at `(kind, xi, t_center)`.
    pub fn get(&self, kind: SampleKind, xi: &[f64], t_center: f64) -> Option<&FourierSample> {
        self.entries.iter().find(|s| {
            s.kind == kind && (s.t_center - t_center).abs() <= KEY_TOL && close(&s.xi, xi)
        })
    }

    /// Inserts a sample, rejecting duplicate keys.
    pub fn push(&mut self, sample: FourierSample) -> Result<()> {
        if self
            .get(sample.kind, &sample.xi, sample.t_center)
            .is_some()
        {
            return Err(Error::Recovery(format!(
                "duplicate sample at kind {}, xi {:?}, t0 {}",
                sample.kind.label(),
                sample.xi,
                sample.t_center
            )));
        }
        self.entries.push(sample);
        Ok(())
    }

    /// Largest value magnitude over one kind, the natural scale for
    /// relative comparisons.
    pub fn scale_of(&self, kind: SampleKind) -> f64 {
        self.of_kind(kind)
            .map(|s| s.value.norm())
            .fold(0.0, f64::max)
    }

    /// Worst violation of `s(-xi) = sigma conj(s(xi))` over pairs of stored
    /// samples of `kind`, relative to the kind's scale. Pairs are matched by
    /// negated frequency at equal `t_center`; lone samples are skipped.
    pub fn conjugate_defect(&self, kind: SampleKind) -> f64 {
        let sigma = kind.conjugation_sign();
        let scale = self.scale_of(kind);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for s in self.of_kind(kind) {
            let neg: Vec<f64> = s.xi.iter().map(|v| -v).collect();
            if let Some(m) = self.get(kind, &neg, s.t_center) {
                let defect = (m.value - sigma * s.value.conj()).norm() / scale;
                worst = worst.max(defect);
            }
        }
        worst
    }

    /// Creates the mirror entry `s(-xi) = sigma conj(s(xi))` for every
    /// sample of `kind` that lacks one. Filled entries carry the source's
    /// confidence, an empty sweep, and the `interpolated` mark.
    pub fn fill_conjugate(&mut self, kind: SampleKind) -> Result<()> {
        let sigma = kind.conjugation_sign();
        let missing: Vec<FourierSample> = self
            .of_kind(kind)
            .filter(|s| {
                let neg: Vec<f64> = s.xi.iter().map(|v| -v).collect();
                self.get(kind, &neg, s.t_center).is_none()
            })
            .map(|s| FourierSample {
                kind,
                xi: s.xi.iter().map(|v| -v).collect(),
                t_center: s.t_center,
                xi_eff: s.xi_eff.iter().map(|v| -v).collect(),
                value: sigma * s.value.conj(),
                confidence: s.confidence,
                low_confidence: s.low_confidence,
                interpolated: true,
                frame: None,
                sweep: Vec::new(),
            })
            .collect();
        for s in missing {
            // Two stored samples can share one missing mirror only if their
            // keys coincide, which push already forbids.
            self.push(s)?;
        }
        Ok(())
    }

    /// Writes the samples of `kind` as CSV with columns
    /// `xi_1..xi_n, t0, h, re, im, confidence`.
    ///
    /// Each entry contributes its extrapolated value as an `h = 0` row
    /// followed by the raw sweep rows.
    pub fn export_csv<W: Write>(&self, kind: SampleKind, out: W) -> Result<()> {
        let dim = match self.of_kind(kind).next() {
            Some(s) => s.xi.len(),
            None => {
                return Err(Error::Recovery(format!(
                    "no samples of kind {} to export",
                    kind.label()
                )))
            }
        };
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=dim).map(|k| format!("xi_{k}")).collect();
        header.extend(["t0", "h", "re", "im", "confidence"].map(String::from));
        w.write_record(&header).map_err(csv_err)?;
        for s in self.of_kind(kind) {
            let mut write_row = |h: f64, v: Complex64| -> Result<()> {
                let mut row: Vec<String> = s.xi.iter().map(|c| format!("{c:.17e}")).collect();
                row.push(format!("{:.17e}", s.t_center));
                row.push(format!("{h:.17e}"));
                row.push(format!("{:.17e}", v.re));
                row.push(format!("{:.17e}", v.im));
                row.push(format!("{:.17e}", s.confidence));
                w.write_record(&row).map_err(csv_err)
            };
            write_row(0.0, s.value)?;
            for p in &s.sweep {
                write_row(p.h, p.value)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Serialization(e.to_string())
}

/// One frequency of the probe lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint {
    /// The frequency.
    pub xi: Vec<f64>,
    /// Set when the tangential part vanishes, so no probe frame exists and
    /// the sample must be filled by interpolation.
    pub degenerate: bool,
}

/// Integer lattice `spacing * Z^dim` clipped to `|xi| <= radius`, origin
/// included. Symmetric under negation by construction.
pub fn xi_lattice(dim: usize, spacing: f64, radius: f64) -> Result<Vec<LatticePoint>> {
    if !(spacing > 0.0) || !(radius > 0.0) {
        return Err(Error::InvalidProbe(format!(
            "lattice needs positive spacing and radius, got {spacing}, {radius}"
        )));
    }
    let reach = (radius / spacing + 1e-12).floor() as i64;
    let mut points = Vec::new();
    let mut index = vec![-reach; dim];
    'outer: loop {
        let xi: Vec<f64> = index.iter().map(|&k| k as f64 * spacing).collect();
        let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= radius + KEY_TOL {
            let degenerate = xi[..dim - 1].iter().all(|&v| v == 0.0);
            points.push(LatticePoint { xi, degenerate });
        }
        for slot in (0..dim).rev() {
            index[slot] += 1;
            if index[slot] <= reach {
                continue 'outer;
            }
            index[slot] = -reach;
        }
        break;
    }
    Ok(points)
}

/// Non-degenerate representatives of the lattice under negation: the half
/// with a positive first nonzero component. Probing these and filling the
/// mirrors by conjugate symmetry halves the sweep cost for real fields.
pub fn half_lattice(dim: usize, spacing: f64, radius: f64) -> Result<Vec<LatticePoint>> {
    Ok(xi_lattice(dim, spacing, radius)?
        .into_iter()
        .filter(|p| {
            !p.degenerate
                && p.xi
                    .iter()
                    .find(|&&v| v != 0.0)
                    .is_some_and(|&first| first > 0.0)
        })
        .collect())
}
