//! Sampled complex scalar and vector fields.

use crate::error::{Error, Result};
use crate::geometry::SpaceTimeGrid;
use crate::Complex64;

/// Complex scalar field sampled on all nodes and time levels of a grid.
///
/// Storage is level-major: `data[m * space_len + flat]` holds the value at
/// time level `m` and spatial node `flat`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: SpaceTimeGrid,
    data: Vec<Complex64>,
}

impl ScalarField {
    /// Zero field on `grid`.
    pub fn zeros(grid: &SpaceTimeGrid) -> Self {
        let len = (grid.nt() + 1) * grid.space_len();
        Self {
            grid: grid.clone(),
            data: vec![Complex64::ZERO; len],
        }
    }

    /// Sample `f(t, x)` on every node and level.
    pub fn from_fn<F>(grid: &SpaceTimeGrid, mut f: F) -> Self
    where
        F: FnMut(f64, &[f64]) -> Complex64,
    {
        let ns = grid.space_len();
        let mut data = Vec::with_capacity((grid.nt() + 1) * ns);
        let mut x = vec![0.0; grid.dim()];
        for m in 0..=grid.nt() {
            let t = grid.time(m);
            for flat in 0..ns {
                grid.coords_into(flat, &mut x);
                data.push(f(t, &x));
            }
        }
        Self {
            grid: grid.clone(),
            data,
        }
    }

    /// Build from raw level-major data; length must be
    /// `(nt + 1) * space_len`.
    pub fn from_data(grid: &SpaceTimeGrid, data: Vec<Complex64>) -> Result<Self> {
        let want = (grid.nt() + 1) * grid.space_len();
        if data.len() != want {
            return Err(Error::GridMismatch(format!(
                "field data has {} entries, grid wants {want}",
                data.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            data,
        })
    }

    /// Grid the field is sampled on.
    #[inline]
    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    /// All values, level-major.
    #[inline]
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Mutable access to all values, level-major.
    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Values at time level `m`.
    #[inline]
    pub fn level(&self, m: usize) -> &[Complex64] {
        let ns = self.grid.space_len();
        &self.data[m * ns..(m + 1) * ns]
    }

    /// Mutable values at time level `m`.
    #[inline]
    pub fn level_mut(&mut self, m: usize) -> &mut [Complex64] {
        let ns = self.grid.space_len();
        &mut self.data[m * ns..(m + 1) * ns]
    }

    /// Value at time level `m`, node `flat`.
    #[inline]
    pub fn at(&self, m: usize, flat: usize) -> Complex64 {
        self.data[m * self.grid.space_len() + flat]
    }

    /// Set the value at time level `m`, node `flat`.
    #[inline]
    pub fn set(&mut self, m: usize, flat: usize, v: Complex64) {
        let ns = self.grid.space_len();
        self.data[m * ns + flat] = v;
    }

    /// In-place `self += alpha * other`. Fails on grid mismatch.
    pub fn axpy(&mut self, alpha: Complex64, other: &ScalarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("axpy between different grids".into()));
        }
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += alpha * b;
        }
        Ok(())
    }

    /// In-place scaling by a complex factor.
    pub fn scale(&mut self, alpha: Complex64) {
        for v in &mut self.data {
            *v *= alpha;
        }
    }

    /// Pointwise map of the values.
    pub fn map<F: FnMut(Complex64) -> Complex64>(&self, mut f: F) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Maximum modulus over all nodes and levels.
    pub fn linf(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Complex vector field: one scalar component per spatial axis.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    comps: Vec<ScalarField>,
}

impl VectorField {
    /// Zero vector field with `grid.dim()` components.
    pub fn zeros(grid: &SpaceTimeGrid) -> Self {
        Self {
            comps: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    /// Build from components; all must share a grid and there must be one per
    /// spatial axis.
    pub fn from_components(comps: Vec<ScalarField>) -> Result<Self> {
        let dim = comps
            .first()
            .map(|c| c.grid().dim())
            .ok_or_else(|| Error::GridMismatch("vector field needs components".into()))?;
        if comps.len() != dim {
            return Err(Error::GridMismatch(format!(
                "vector field has {} components on a {dim}-dimensional grid",
                comps.len()
            )));
        }
        for c in &comps[1..] {
            if c.grid() != comps[0].grid() {
                return Err(Error::GridMismatch(
                    "vector components on different grids".into(),
                ));
            }
        }
        Ok(Self { comps })
    }

    /// Number of components.
    #[inline]
    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    /// Common grid of the components.
    #[inline]
    pub fn grid(&self) -> &SpaceTimeGrid {
        self.comps[0].grid()
    }

    /// Component `j`.
    #[inline]
    pub fn comp(&self, j: usize) -> &ScalarField {
        &self.comps[j]
    }

    /// Mutable component `j`.
    #[inline]
    pub fn comp_mut(&mut self, j: usize) -> &mut ScalarField {
        &mut self.comps[j]
    }

    /// All components.
    #[inline]
    pub fn comps(&self) -> &[ScalarField] {
        &self.comps
    }

    /// Mutable access to all components.
    #[inline]
    pub fn comps_mut(&mut self) -> &mut [ScalarField] {
        &mut self.comps
    }

    /// Maximum modulus over all components, nodes and levels.
    pub fn linf(&self) -> f64 {
        self.comps.iter().map(|c| c.linf()).fold(0.0, f64::max)
    }
}

/// Sampled convection-absorption coefficient pair `(A, q)` on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPair {
    /// Convection field, one component per axis.
    pub a: VectorField,
    /// Absorption coefficient.
    pub q: ScalarField,
}

impl CoefficientPair {
    /// Bundle a convection field and an absorption field; grids must agree.
    pub fn new(a: VectorField, q: ScalarField) -> Result<Self> {
        if a.grid() != q.grid() {
            return Err(Error::GridMismatch(
                "convection and absorption on different grids".into(),
            ));
        }
        Ok(Self { a, q })
    }

    /// Zero coefficients (pure heat operator) on `grid`.
    pub fn zero(grid: &SpaceTimeGrid) -> Self {
        Self {
            a: VectorField::zeros(grid),
            q: ScalarField::zeros(grid),
        }
    }

    /// Common grid.
    #[inline]
    pub fn grid(&self) -> &SpaceTimeGrid {
        self.q.grid()
    }

    /// Componentwise difference `self - other`. Fails on grid mismatch.
    pub fn difference(&self, other: &CoefficientPair) -> Result<CoefficientPair> {
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch(
                "coefficient pairs on different grids".into(),
            ));
        }
        let mut a = self.a.clone();
        for j in 0..a.dim() {
            a.comp_mut(j)
                .axpy(-Complex64::ONE, other.a.comp(j))
                .expect("same grid");
        }
        let mut q = self.q.clone();
        q.axpy(-Complex64::ONE, &other.q).expect("same grid");
        Ok(CoefficientPair { a, q })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SpaceTimeGrid {
        SpaceTimeGrid::unit_cube(2, 5, 4, 1.0).unwrap()
    }

    #[test]
    fn from_fn_samples_coordinates() {
        let g = grid();
        let f = ScalarField::from_fn(&g, |t, x| Complex64::new(x[0] + 2.0 * x[1], t));
        let flat = g.flatten(&[2, 1]);
        let v = f.at(3, flat);
        assert!((v.re - (0.5 + 0.5)).abs() < 1e-15);
        assert!((v.im - 0.75).abs() < 1e-15);
    }

    #[test]
    fn axpy_and_scale() {
        let g = grid();
        let mut f = ScalarField::from_fn(&g, |_, x| Complex64::new(x[0], 0.0));
        let h = ScalarField::from_fn(&g, |_, x| Complex64::new(0.0, x[0]));
        f.axpy(Complex64::new(2.0, 0.0), &h).unwrap();
        f.scale(Complex64::new(0.0, 1.0));
        let flat = g.flatten(&[4, 0]);
        // (1 + 2i) * i = -2 + i at x0 = 1.
        let v = f.at(0, flat);
        assert!((v.re + 2.0).abs() < 1e-15 && (v.im - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let g = grid();
        let other = SpaceTimeGrid::unit_cube(2, 7, 4, 1.0).unwrap();
        let mut f = ScalarField::zeros(&g);
        let h = ScalarField::zeros(&other);
        assert!(f.axpy(Complex64::ONE, &h).is_err());
        assert!(VectorField::from_components(vec![
            ScalarField::zeros(&g),
            ScalarField::zeros(&other)
        ])
        .is_err());
    }

    #[test]
    fn pair_difference_is_componentwise() {
        let g = grid();
        let one = ScalarField::from_fn(&g, |_, _| Complex64::ONE);
        let a = VectorField::from_components(vec![one.clone(), one.clone()]).unwrap();
        let p1 = CoefficientPair::new(a, one.clone()).unwrap();
        let p0 = CoefficientPair::zero(&g);
        let d = p1.difference(&p0).unwrap();
        assert!((d.q.at(0, 0) - Complex64::ONE).norm() < 1e-15);
        assert!((d.a.comp(1).at(2, 3) - Complex64::ONE).norm() < 1e-15);
    }
}
