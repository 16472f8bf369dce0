//! Quadrature Fourier functionals and band-limited synthesis.
//!
//! The oracle side of every recovery comparison is the plain trapezoid
//! quadrature of `integral f(x) exp(i x . xi) dx` over the field's box. For
//! smooth fields supported away from the boundary the trapezoid rule is
//! spectrally accurate, so these values serve as reference data.

use crate::error::{Error, Result};
use crate::fields::field::ScalarField;
use crate::geometry::SpaceTimeGrid;
use crate::Complex64;

/// Per-axis tables of `exp(i x_k xi_k)` at the grid nodes; their products
/// give the plane wave at any node.
pub(crate) fn phase_tables(grid: &SpaceTimeGrid, xi: &[f64]) -> Vec<Vec<Complex64>> {
    (0..grid.dim())
        .map(|k| {
            let ax = grid.axis(k);
            (0..ax.len)
                .map(|i| Complex64::from_polar(1.0, ax.coord(i) * xi[k]))
                .collect()
        })
        .collect()
}

/// Trapezoid quadrature of `integral f(t_m, x) exp(i x . xi) dx` at time
/// level `m`.
pub fn fourier_oracle_level(f: &ScalarField, m: usize, xi: &[f64]) -> Complex64 {
    let grid = f.grid();
    debug_assert_eq!(xi.len(), grid.dim());
    let tables = phase_tables(grid, xi);
    let lev = f.level(m);
    let mut acc = Complex64::ZERO;
    for (flat, &v) in lev.iter().enumerate() {
        if v == Complex64::ZERO {
            continue;
        }
        let mut ph = Complex64::ONE;
        for (k, t) in tables.iter().enumerate() {
            ph *= t[grid.axis_index(flat, k)];
        }
        acc += v * ph * grid.quad_weight(flat);
    }
    acc
}

/// Spatial Fourier quadrature at every time level.
pub fn fourier_oracle(f: &ScalarField, xi: &[f64]) -> Vec<Complex64> {
    (0..=f.grid().nt())
        .map(|m| fourier_oracle_level(f, m, xi))
        .collect()
}

/// Raised-cosine frequency window for band-limited synthesis: identity up to
/// `flat_fraction * xi_max`, smooth roll-off to zero at `xi_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisWindow {
    /// Cut-off frequency (positive).
    pub xi_max: f64,
    /// Fraction of the band kept untouched (in `[0, 1)`).
    pub flat_fraction: f64,
}

impl SynthesisWindow {
    /// Window with the default flat region covering three quarters of the
    /// band (mild roll-off: enough to damp Gibbs ringing without widening
    /// the reconstruction kernel much).
    pub fn new(xi_max: f64) -> Result<Self> {
        Self::with_flat(xi_max, 0.75)
    }

    /// Window with explicit flat fraction.
    pub fn with_flat(xi_max: f64, flat_fraction: f64) -> Result<Self> {
        if !(xi_max > 0.0) {
            return Err(Error::FieldConstraint(format!(
                "window cut-off must be positive, got {xi_max}"
            )));
        }
        if !(0.0..1.0).contains(&flat_fraction) {
            return Err(Error::FieldConstraint(format!(
                "flat fraction must lie in [0, 1), got {flat_fraction}"
            )));
        }
        Ok(Self {
            xi_max,
            flat_fraction,
        })
    }

    /// Window value at frequency modulus `r`.
    pub fn eval(&self, r: f64) -> f64 {
        let r0 = self.flat_fraction * self.xi_max;
        if r <= r0 {
            1.0
        } else if r >= self.xi_max {
            0.0
        } else {
            0.5 * (1.0 + (std::f64::consts::PI * (r - r0) / (self.xi_max - r0)).cos())
        }
    }
}

/// Windowed Riemann-sum inversion of Fourier samples on a uniform frequency
/// lattice with the given `spacing`:
///
/// ```text
///     f(x) ~ (spacing / 2 pi)^n  sum_k  w(|xi_k|) s_k exp(-i x . xi_k)
/// ```
///
/// evaluated at every spatial node of `grid` (returned in node order). The
/// sample set must be a symmetric lattice subset: for every listed frequency
/// the negated frequency must be listed too. Conjugate-symmetric completion
/// for real fields is the caller's responsibility.
pub fn synthesize_band(
    samples: &[(Vec<f64>, Complex64)],
    spacing: f64,
    window: &SynthesisWindow,
    grid: &SpaceTimeGrid,
) -> Result<Vec<Complex64>> {
    if !(spacing > 0.0) {
        return Err(Error::FieldConstraint(format!(
            "frequency spacing must be positive, got {spacing}"
        )));
    }
    let dim = grid.dim();
    // Symmetry check on the lattice keys (frequencies in spacing units).
    let key = |xi: &[f64]| -> Vec<i64> {
        xi.iter().map(|v| (v / spacing).round() as i64).collect()
    };
    let keys: std::collections::HashSet<Vec<i64>> =
        samples.iter().map(|(xi, _)| key(xi)).collect();
    for k in &keys {
        let neg: Vec<i64> = k.iter().map(|v| -v).collect();
        if !keys.contains(&neg) {
            return Err(Error::FieldConstraint(format!(
                "sample lattice is not symmetric: {k:?} present without its negation"
            )));
        }
    }
    let factor = (spacing / (2.0 * std::f64::consts::PI)).powi(dim as i32);
    let ns = grid.space_len();
    let mut out = vec![Complex64::ZERO; ns];
    for (xi, value) in samples {
        if xi.len() != dim {
            return Err(Error::FieldConstraint(format!(
                "sample frequency has {} entries on a {dim}-dimensional grid",
                xi.len()
            )));
        }
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let w = window.eval(r);
        if w == 0.0 {
            continue;
        }
        // exp(-i x . xi) tables.
        let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
        let tables = phase_tables(grid, &neg);
        let coef = value * (w * factor);
        for (flat, o) in out.iter_mut().enumerate() {
            let mut ph = Complex64::ONE;
            for (k, t) in tables.iter().enumerate() {
                ph *= t[grid.axis_index(flat, k)];
            }
            *o += coef * ph;
        }
    }
    Ok(out)
}
