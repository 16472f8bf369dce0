//! Boundary traces: magnetic Neumann flux and Dirichlet restriction on the
//! lateral boundary, with the quadrature pairing used to compare them.
//!
//! The measured flux is `dnu u + 2 (nu . A) u` where `nu` is the outward
//! unit normal. The normal derivative uses the one-sided second-order
//! stencil `(3 u_face - 4 u_in1 + u_in2) / (2 dx)` with `u_in1`, `u_in2` the
//! first and second inward neighbors, written so the same expression holds
//! on low and high faces.

use crate::error::{Error, Result};
use crate::fields::{CoefficientPair, ScalarField};
use crate::geometry::{Face, SpaceTimeGrid};
use crate::Complex64;

/// Complex values on a set of boundary faces, for every time level.
///
/// Used both for Neumann fluxes and for Dirichlet restrictions, so that the
/// two can be paired against each other in boundary integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryField {
    grid: SpaceTimeGrid,
    faces: Vec<Face>,
    /// Node ids per face, in face iteration order.
    nodes: Vec<Vec<usize>>,
    /// Level-major values per face: `values[f][m * nodes[f].len() + p]`.
    values: Vec<Vec<Complex64>>,
}

/// Which part of the boundary a trace covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    /// All faces of the box.
    Whole,
    /// Only the accessible faces (everything except the bottom).
    Accessible,
}

impl BoundaryField {
    fn face_set(grid: &SpaceTimeGrid, coverage: Coverage) -> Vec<Face> {
        match coverage {
            Coverage::Whole => Face::all(grid.dim()),
            Coverage::Accessible => Face::accessible(grid.dim()),
        }
    }

    /// Zero trace on the requested faces.
    pub fn zeros(grid: &SpaceTimeGrid, coverage: Coverage) -> Self {
        let faces = Self::face_set(grid, coverage);
        let nodes: Vec<Vec<usize>> = faces.iter().map(|f| f.nodes(grid)).collect();
        let values = nodes
            .iter()
            .map(|ns| vec![Complex64::ZERO; (grid.nt() + 1) * ns.len()])
            .collect();
        Self {
            grid: grid.clone(),
            faces,
            nodes,
            values,
        }
    }

    /// Magnetic Neumann trace of a solution field.
    pub fn neumann_trace(u: &ScalarField, pair: &CoefficientPair, coverage: Coverage) -> Self {
        let grid = u.grid();
        debug_assert_eq!(grid, pair.grid());
        let mut out = Self::zeros(grid, coverage);
        let strides = grid.strides();
        for (fi, face) in out.faces.iter().enumerate() {
            let axis = face.axis;
            let dx = grid.axis(axis).dx;
            let sign = face.normal_sign();
            // Inward step along the face axis.
            let inward = if sign < 0.0 {
                strides[axis] as isize
            } else {
                -(strides[axis] as isize)
            };
            let a_axis = pair.a.comp(axis);
            let nb = out.nodes[fi].len();
            for m in 0..=grid.nt() {
                let ul = u.level(m);
                let al = a_axis.level(m);
                for (p, &flat) in out.nodes[fi].iter().enumerate() {
                    let f1 = (flat as isize + inward) as usize;
                    let f2 = (flat as isize + 2 * inward) as usize;
                    let dn = (3.0 * ul[flat] - 4.0 * ul[f1] + ul[f2]) / (2.0 * dx);
                    let na = sign * al[flat];
                    out.values[fi][m * nb + p] = dn + 2.0 * na * ul[flat];
                }
            }
        }
        out
    }

    /// Dirichlet restriction of a field to the requested faces.
    pub fn dirichlet_trace(u: &ScalarField, coverage: Coverage) -> Self {
        let grid = u.grid();
        let mut out = Self::zeros(grid, coverage);
        for fi in 0..out.faces.len() {
            let nb = out.nodes[fi].len();
            for m in 0..=grid.nt() {
                let ul = u.level(m);
                for (p, &flat) in out.nodes[fi].iter().enumerate() {
                    out.values[fi][m * nb + p] = ul[flat];
                }
            }
        }
        out
    }

    /// Grid the trace lives on.
    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    /// Faces covered by this trace.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Raw values of one face, level-major.
    pub fn face_values(&self, fi: usize) -> &[Complex64] {
        &self.values[fi]
    }

    /// Node ids of one face.
    pub fn face_nodes(&self, fi: usize) -> &[usize] {
        &self.nodes[fi]
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.faces != other.faces {
            return Err(Error::GridMismatch(
                "boundary traces cover different grids or faces".into(),
            ));
        }
        Ok(())
    }

    /// Space-time boundary integral of `self . conj(other)` over the covered
    /// faces, by trapezoid quadrature in space and time.
    pub fn pair(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        let mut acc = Complex64::ZERO;
        for fi in 0..self.faces.len() {
            let face = self.faces[fi];
            let nb = self.nodes[fi].len();
            let w_face: Vec<f64> = self.nodes[fi]
                .iter()
                .map(|&flat| face.quad_weight(&self.grid, flat))
                .collect();
            for m in 0..=self.grid.nt() {
                let tw = self.grid.time_quad_weight(m);
                let a = &self.values[fi][m * nb..(m + 1) * nb];
                let b = &other.values[fi][m * nb..(m + 1) * nb];
                let mut level = Complex64::ZERO;
                for p in 0..nb {
                    level += w_face[p] * a[p] * b[p].conj();
                }
                acc += tw * level;
            }
        }
        Ok(acc)
    }

    /// Boundary space-time norm induced by [`BoundaryField::pair`].
    pub fn norm(&self) -> f64 {
        self.pair(self).map(|v| v.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    /// In-place `self += alpha * other`.
    pub fn axpy(&mut self, alpha: Complex64, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        for (mine, theirs) in self.values.iter_mut().zip(other.values.iter()) {
            for (a, b) in mine.iter_mut().zip(theirs.iter()) {
                *a += alpha * b;
            }
        }
        Ok(())
    }

    /// Absolute and relative boundary-norm distance between two traces. The
    /// relative distance is measured against the larger of the two norms and
    /// is zero when both traces vanish.
    pub fn distance(&self, other: &Self) -> Result<(f64, f64)> {
        let mut diff = self.clone();
        diff.axpy(-Complex64::ONE, other)?;
        let abs = diff.norm();
        let scale = self.norm().max(other.norm());
        let rel = if scale > 0.0 { abs / scale } else { 0.0 };
        Ok((abs, rel))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::VectorField;

    /// For u = x1 + 2 x2 the one-sided stencil is exact and the flux on each
    /// face is the outward normal component of (1, 2).
    #[test]
    fn flux_of_linear_field_is_exact() {
        let grid = SpaceTimeGrid::unit_cube(2, 9, 4, 1.0).unwrap();
        let pair = CoefficientPair::zero(&grid);
        let u = ScalarField::from_fn(&grid, |_, x| Complex64::new(x[0] + 2.0 * x[1], 0.0));
        let flux = BoundaryField::neumann_trace(&u, &pair, Coverage::Whole);
        for (fi, face) in flux.faces().iter().enumerate() {
            let expect = face.normal_sign() * if face.axis == 0 { 1.0 } else { 2.0 };
            for v in flux.face_values(fi) {
                assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    /// The magnetic term adds 2 (nu . A) u with the correct sign per face.
    #[test]
    fn magnetic_term_signs() {
        let grid = SpaceTimeGrid::unit_cube(2, 9, 4, 1.0).unwrap();
        let a = VectorField::from_components(vec![
            ScalarField::from_fn(&grid, |_, _| Complex64::new(0.5, 0.0)),
            ScalarField::zeros(&grid),
        ])
        .unwrap();
        let pair = CoefficientPair::new(a, ScalarField::zeros(&grid)).unwrap();
        let u = ScalarField::from_fn(&grid, |_, _| Complex64::ONE);
        let flux = BoundaryField::neumann_trace(&u, &pair, Coverage::Whole);
        for (fi, face) in flux.faces().iter().enumerate() {
            let expect = if face.axis == 0 {
                face.normal_sign()
            } else {
                0.0
            };
            for v in flux.face_values(fi) {
                assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-12, "{face:?}");
            }
        }
    }

    /// Pairing of constant traces integrates the covered boundary area times
    /// the time extent: each face of the unit square has length 1, so five
    /// accessible faces in 2-D cover length 3 (two sides and the top).
    #[test]
    fn pairing_measures_covered_area() {
        let grid = SpaceTimeGrid::unit_cube(2, 17, 8, 1.0).unwrap();
        let u = ScalarField::from_fn(&grid, |_, _| Complex64::ONE);
        let tr = BoundaryField::dirichlet_trace(&u, Coverage::Accessible);
        let total = tr.pair(&tr).unwrap();
        assert!((total.re - 3.0).abs() < 1e-12);
        assert!(total.im.abs() < 1e-15);
        let whole = BoundaryField::dirichlet_trace(&u, Coverage::Whole);
        assert!((whole.pair(&whole).unwrap().re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_coverage_is_rejected() {
        let grid = SpaceTimeGrid::unit_cube(2, 9, 4, 1.0).unwrap();
        let u = ScalarField::zeros(&grid);
        let a = BoundaryField::dirichlet_trace(&u, Coverage::Whole);
        let b = BoundaryField::dirichlet_trace(&u, Coverage::Accessible);
        assert!(a.pair(&b).is_err());
    }
}
