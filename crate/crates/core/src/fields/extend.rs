//! Even/odd mirror extensions of sampled fields across the bottom face.
//!
//! Coefficients extend to the mirror domain with component-dependent parity:
//! tangential convection components and the absorption extend evenly, the
//! normal convection component extends oddly (it must vanish on the bottom
//! face for the extension to stay continuous).

use crate::error::{Error, Result};
use crate::fields::field::{CoefficientPair, ScalarField, VectorField};
use crate::geometry::ExtendedGrid;
use crate::Complex64;

/// Tolerated relative size of normal-component values on the bottom face
/// when extending oddly.
pub const ODD_TRACE_TOL: f64 = 1e-12;

/// Reflection parity of a scalar extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `f(x', -x_n) = f(x', x_n)`.
    Even,
    /// `f(x', -x_n) = -f(x', x_n)`.
    Odd,
}

/// Largest modulus the field takes on the closed bottom face, over all time
/// levels. Zero is required (up to [`ODD_TRACE_TOL`]) for odd extension.
pub fn odd_defect(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let dim = grid.dim();
    let len = grid.axis(dim - 1).len;
    let mut worst = 0.0f64;
    for m in 0..=grid.nt() {
        let lev = f.level(m);
        for flat in (0..grid.space_len()).step_by(len) {
            worst = worst.max(lev[flat].norm());
        }
    }
    worst
}

/// Mirror a base-grid field onto the extended grid with the given parity.
///
/// Fails when the field does not live on `ext.base()`, or when odd extension
/// is requested but the field's bottom-face trace is not negligible relative
/// to its overall size. Odd extensions are exactly zero on the reflection
/// plane, so the result is exactly antisymmetric under node reflection.
pub fn extend_scalar(f: &ScalarField, ext: &ExtendedGrid, parity: Parity) -> Result<ScalarField> {
    if f.grid() != ext.base() {
        return Err(Error::GridMismatch(
            "field to extend does not live on the base grid".into(),
        ));
    }
    if parity == Parity::Odd {
        let defect = odd_defect(f);
        let scale = f.linf().max(1.0);
        if defect > ODD_TRACE_TOL * scale {
            return Err(Error::FieldConstraint(format!(
                "odd extension needs a vanishing bottom trace: max modulus {defect:.3e} \
                 exceeds {ODD_TRACE_TOL:.0e} x field scale {scale:.3e}"
            )));
        }
    }
    let eg = ext.grid();
    let dim = eg.dim();
    let base_len = ext.base().axis(dim - 1).len;
    let ext_len = eg.axis(dim - 1).len;
    let plane = ext.plane_index();
    let ns_ext = eg.space_len();
    let mut out = ScalarField::zeros(eg);
    for m in 0..=eg.nt() {
        let src = f.level(m);
        let dst = out.level_mut(m);
        for flat in 0..ns_ext {
            let j = flat % ext_len;
            let rest = flat / ext_len;
            let v = if j >= plane {
                src[rest * base_len + (j - plane)]
            } else {
                let mirrored = src[rest * base_len + (plane - j)];
                match parity {
                    Parity::Even => mirrored,
                    Parity::Odd => -mirrored,
                }
            };
            dst[flat] = if parity == Parity::Odd && j == plane {
                Complex64::ZERO
            } else {
                v
            };
        }
    }
    Ok(out)
}

/// Restrict an extended-grid field back to the base grid (upper half).
pub fn restrict_scalar(f: &ScalarField, ext: &ExtendedGrid) -> Result<ScalarField> {
    if f.grid() != ext.grid() {
        return Err(Error::GridMismatch(
            "field to restrict does not live on the extended grid".into(),
        ));
    }
    let base = ext.base();
    let mut out = ScalarField::zeros(base);
    for m in 0..=base.nt() {
        let src = f.level(m);
        let dst = out.level_mut(m);
        for (bf, d) in dst.iter_mut().enumerate() {
            *d = src[ext.embed(bf)];
        }
    }
    Ok(out)
}

/// Extend a coefficient pair to the mirror domain: tangential convection
/// components and absorption evenly, the normal component oddly.
pub fn extend_pair(pair: &CoefficientPair, ext: &ExtendedGrid) -> Result<CoefficientPair> {
    let dim = pair.grid().dim();
    let mut comps = Vec::with_capacity(dim);
    for j in 0..dim {
        let parity = if j + 1 == dim { Parity::Odd } else { Parity::Even };
        comps.push(extend_scalar(pair.a.comp(j), ext, parity)?);
    }
    CoefficientPair::new(
        VectorField::from_components(comps)?,
        extend_scalar(&pair.q, ext, Parity::Even)?,
    )
}

/// Largest deviation from the requested reflection symmetry, over all nodes
/// and levels. Diagnostic used by symmetry-preservation tests.
pub fn symmetry_defect(f: &ScalarField, ext: &ExtendedGrid, parity: Parity) -> Result<f64> {
    if f.grid() != ext.grid() {
        return Err(Error::GridMismatch(
            "symmetry check needs an extended-grid field".into(),
        ));
    }
    let ns = ext.grid().space_len();
    let mut worst = 0.0f64;
    for m in 0..=ext.grid().nt() {
        let lev = f.level(m);
        for flat in 0..ns {
            let r = ext.reflect(flat);
            let d = match parity {
                Parity::Even => lev[flat] - lev[r],
                Parity::Odd => lev[flat] + lev[r],
            };
            worst = worst.max(d.norm());
        }
    }
    Ok(worst)
}
