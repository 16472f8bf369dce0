//! Closed-form coefficient generators: sums of separable bump terms.
//!
//! Every term is `amp * b1(x_1) * ... * b_n(x_n) * p(t)` where each spatial
//! factor is a compactly supported smooth bump (or one of its first two
//! derivatives) and the time profile is smooth with one available derivative.
//! This gives an algebra closed under the spatial partials and the time
//! derivative that the laboratory needs: gauge transforms, curl components
//! and transport-plane resampling all evaluate without interpolation error.

use crate::error::{Error, Result};
use crate::fields::field::{CoefficientPair, ScalarField, VectorField};
use crate::geometry::SpaceTimeGrid;
use crate::Complex64;

/// Smooth compactly supported bump `b((x - center) / width)` with
/// `b(s) = exp(1 - 1/(1 - s^2))` for `|s| < 1` and `0` outside, normalized to
/// peak value 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    /// Peak location.
    pub center: f64,
    /// Support half-width (must be positive).
    pub width: f64,
}

/// Reference bump profile and its first two derivatives at argument `s`.
fn bump_value(s: f64, order: u8) -> f64 {
    let s2 = s * s;
    if s2 >= 1.0 {
        return 0.0;
    }
    let one = 1.0 - s2;
    let b = (1.0 - 1.0 / one).exp();
    match order {
        0 => b,
        1 => {
            let g = -2.0 * s / (one * one);
            b * g
        }
        2 => {
            let g = -2.0 * s / (one * one);
            let gp = -2.0 * (1.0 + 3.0 * s2) / (one * one * one);
            b * (g * g + gp)
        }
        _ => unreachable!("bump derivatives supported up to order 2"),
    }
}

impl Bump {
    /// New bump; fails on non-positive width.
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::FieldConstraint(format!(
                "bump width must be positive, got {width}"
            )));
        }
        Ok(Self { center, width })
    }

    /// Value of the `order`-th derivative at `x` (orders 0..=2), including
    /// the `1/width^order` chain-rule factor.
    #[inline]
    pub fn eval(&self, x: f64, order: u8) -> f64 {
        let s = (x - self.center) / self.width;
        bump_value(s, order) / self.width.powi(order as i32)
    }

    /// Support interval `[center - width, center + width]`.
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }
}

/// Smooth time profile with one derivative.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeProfile {
    /// Constantly 1.
    One,
    /// Compact bump in time.
    Bump(Bump),
    /// `0.5 (1 - cos(pi t / ramp))` for `t < ramp`, then 1. Continuously
    /// differentiable switch-on honoring zero data at `t = 0`.
    CosRamp {
        /// Ramp duration (positive).
        ramp: f64,
    },
}

impl TimeProfile {
    /// Profile value (`order` 0) or its time derivative (`order` 1).
    pub fn eval(&self, t: f64, order: u8) -> f64 {
        match self {
            TimeProfile::One => {
                if order == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            TimeProfile::Bump(b) => b.eval(t, order),
            TimeProfile::CosRamp { ramp } => {
                if t >= *ramp {
                    if order == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    let a = std::f64::consts::PI / ramp;
                    if order == 0 {
                        0.5 * (1.0 - (a * t).cos())
                    } else {
                        0.5 * a * (a * t).sin()
                    }
                }
            }
        }
    }
}

/// One separable term: complex amplitude times per-axis bump factors (each
/// possibly differentiated) times a time profile (possibly differentiated).
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    /// Complex amplitude.
    pub amp: Complex64,
    /// Per-axis spatial factors.
    pub factors: Vec<Bump>,
    /// Per-axis derivative order (0..=2 each).
    pub dx_order: Vec<u8>,
    /// Time profile.
    pub profile: TimeProfile,
    /// Time-derivative order of the profile (0 or 1).
    pub dt_order: u8,
}

impl Term {
    /// Undifferentiated separable bump term.
    pub fn new(amp: Complex64, factors: Vec<Bump>, profile: TimeProfile) -> Self {
        let dim = factors.len();
        Self {
            amp,
            factors,
            dx_order: vec![0; dim],
            profile,
            dt_order: 0,
        }
    }

    /// Value at `(t, x)`.
    pub fn eval(&self, t: f64, x: &[f64]) -> Complex64 {
        let mut v = self.profile.eval(t, self.dt_order);
        if v == 0.0 {
            return Complex64::ZERO;
        }
        for (k, b) in self.factors.iter().enumerate() {
            v *= b.eval(x[k], self.dx_order[k]);
            if v == 0.0 {
                return Complex64::ZERO;
            }
        }
        self.amp * v
    }

    fn partial(&self, axis: usize) -> Result<Term> {
        let mut t = self.clone();
        if t.dx_order[axis] >= 2 {
            return Err(Error::FieldConstraint(
                "spatial derivatives of analytic terms available up to order 2".into(),
            ));
        }
        t.dx_order[axis] += 1;
        Ok(t)
    }

    fn dt(&self) -> Result<Term> {
        let mut t = self.clone();
        if t.dt_order >= 1 {
            return Err(Error::FieldConstraint(
                "time derivative of analytic terms available up to order 1".into(),
            ));
        }
        t.dt_order += 1;
        Ok(t)
    }
}

/// Closed-form complex scalar field: a finite sum of separable bump terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalyticScalar {
    /// The terms; the field is their sum.
    pub terms: Vec<Term>,
}

impl AnalyticScalar {
    /// The zero field.
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// Single time-constant bump: `amp * prod_k b((x_k - center_k)/width_k)`.
    pub fn bump(amp: Complex64, center: &[f64], width: &[f64]) -> Result<Self> {
        Self::bump_with_profile(amp, center, width, TimeProfile::One)
    }

    /// Single bump with an explicit time profile.
    pub fn bump_with_profile(
        amp: Complex64,
        center: &[f64],
        width: &[f64],
        profile: TimeProfile,
    ) -> Result<Self> {
        if center.len() != width.len() {
            return Err(Error::FieldConstraint(
                "bump center and width dimensions differ".into(),
            ));
        }
        let factors = center
            .iter()
            .zip(width.iter())
            .map(|(&c, &w)| Bump::new(c, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            terms: vec![Term::new(amp, factors, profile)],
        })
    }

    /// Value at `(t, x)`.
    pub fn eval(&self, t: f64, x: &[f64]) -> Complex64 {
        self.terms.iter().map(|term| term.eval(t, x)).sum()
    }

    /// Exact spatial partial along `axis`.
    pub fn partial(&self, axis: usize) -> Result<AnalyticScalar> {
        Ok(AnalyticScalar {
            terms: self
                .terms
                .iter()
                .map(|t| t.partial(axis))
                .collect::<Result<Vec<_>>>()?,
        })
    }

    /// Exact time derivative.
    pub fn dt(&self) -> Result<AnalyticScalar> {
        Ok(AnalyticScalar {
            terms: self.terms.iter().map(|t| t.dt()).collect::<Result<Vec<_>>>()?,
        })
    }

    /// Sum of two fields.
    pub fn add(&self, other: &AnalyticScalar) -> AnalyticScalar {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        AnalyticScalar { terms }
    }

    /// Scaled copy.
    pub fn scaled(&self, alpha: Complex64) -> AnalyticScalar {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.amp *= alpha;
        }
        out
    }

    /// Complex conjugate; spatial and temporal factors are real, so only
    /// the amplitudes flip.
    pub fn conjugated(&self) -> AnalyticScalar {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.amp = t.amp.conj();
        }
        out
    }

    /// Sample onto every node and level of `grid`.
    pub fn sample(&self, grid: &SpaceTimeGrid) -> ScalarField {
        let ns = grid.space_len();
        let nlev = grid.nt() + 1;
        let mut data = vec![Complex64::ZERO; nlev * ns];
        let mut spatial = vec![0.0f64; ns];
        for term in &self.terms {
            // Per-axis factor tables, then a separable fill.
            let tables: Vec<Vec<f64>> = (0..grid.dim())
                .map(|k| {
                    let ax = grid.axis(k);
                    (0..ax.len)
                        .map(|i| term.factors[k].eval(ax.coord(i), term.dx_order[k]))
                        .collect()
                })
                .collect();
            for (flat, s) in spatial.iter_mut().enumerate() {
                let mut v = 1.0;
                for (k, table) in tables.iter().enumerate() {
                    v *= table[grid.axis_index(flat, k)];
                    if v == 0.0 {
                        break;
                    }
                }
                *s = v;
            }
            for m in 0..nlev {
                let c = term.amp * term.profile.eval(grid.time(m), term.dt_order);
                if c == Complex64::ZERO {
                    continue;
                }
                let lev = &mut data[m * ns..(m + 1) * ns];
                for (d, &s) in lev.iter_mut().zip(spatial.iter()) {
                    if s != 0.0 {
                        *d += c * s;
                    }
                }
            }
        }
        ScalarField::from_data(grid, data).expect("sampling fills the exact grid size")
    }

    /// Per-axis support bounds over all terms (`None` when the field is 0).
    pub fn support_box(&self) -> Option<Vec<(f64, f64)>> {
        let dim = self.terms.first()?.factors.len();
        let mut b = vec![(f64::INFINITY, f64::NEG_INFINITY); dim];
        for term in &self.terms {
            for (k, f) in term.factors.iter().enumerate() {
                let (lo, hi) = f.support();
                b[k].0 = b[k].0.min(lo);
                b[k].1 = b[k].1.max(hi);
            }
        }
        Some(b)
    }
}

/// Closed-form complex vector field, one [`AnalyticScalar`] per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticVector {
    /// The components.
    pub comps: Vec<AnalyticScalar>,
}

impl AnalyticVector {
    /// Zero vector field with `dim` components.
    pub fn zero(dim: usize) -> Self {
        Self {
            comps: vec![AnalyticScalar::zero(); dim],
        }
    }

    /// Number of components.
    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    /// Evaluate all components at `(t, x)` into `out`.
    pub fn eval_into(&self, t: f64, x: &[f64], out: &mut [Complex64]) {
        for (o, c) in out.iter_mut().zip(self.comps.iter()) {
            *o = c.eval(t, x);
        }
    }

    /// Componentwise sum.
    pub fn add(&self, other: &AnalyticVector) -> AnalyticVector {
        AnalyticVector {
            comps: self
                .comps
                .iter()
                .zip(other.comps.iter())
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    /// Exact divergence `sum_j d_j A_j`.
    pub fn divergence(&self) -> Result<AnalyticScalar> {
        let mut out = AnalyticScalar::zero();
        for (j, c) in self.comps.iter().enumerate() {
            out = out.add(&c.partial(j)?);
        }
        Ok(out)
    }

    /// Exact curl component `d_j A_k - d_k A_j`.
    pub fn curl_component(&self, j: usize, k: usize) -> Result<AnalyticScalar> {
        Ok(self.comps[k]
            .partial(j)?
            .add(&self.comps[j].partial(k)?.scaled(-Complex64::ONE)))
    }

    /// Componentwise complex conjugate.
    pub fn conjugated(&self) -> AnalyticVector {
        AnalyticVector {
            comps: self.comps.iter().map(|c| c.conjugated()).collect(),
        }
    }

    /// Componentwise scaled copy.
    pub fn scaled(&self, alpha: Complex64) -> AnalyticVector {
        AnalyticVector {
            comps: self.comps.iter().map(|c| c.scaled(alpha)).collect(),
        }
    }

    /// Sample all components onto `grid`.
    pub fn sample(&self, grid: &SpaceTimeGrid) -> Result<VectorField> {
        if self.comps.len() != grid.dim() {
            return Err(Error::GridMismatch(format!(
                "vector has {} components, grid dimension is {}",
                self.comps.len(),
                grid.dim()
            )));
        }
        VectorField::from_components(self.comps.iter().map(|c| c.sample(grid)).collect())
    }
}

/// Closed-form coefficient pair `(A, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticPair {
    /// Convection field.
    pub a: AnalyticVector,
    /// Absorption field.
    pub q: AnalyticScalar,
}

impl AnalyticPair {
    /// Zero coefficients in dimension `dim`.
    pub fn zero(dim: usize) -> Self {
        Self {
            a: AnalyticVector::zero(dim),
            q: AnalyticScalar::zero(),
        }
    }

    /// Sample both coefficients onto `grid`.
    pub fn sample(&self, grid: &SpaceTimeGrid) -> Result<CoefficientPair> {
        CoefficientPair::new(self.a.sample(grid)?, self.q.sample(grid))
    }
}
