//! Shared fixtures for integration tests: manufactured solutions with known
//! exact fields, independent spectral references, and refinement helpers.
//!
//! Everything in this module is deliberately built from closed forms and
//! plain quadrature so it cannot share a code path (or a bug) with the
//! solvers under test.

#![allow(dead_code)]

use cdlab_core::fields::ops;
use cdlab_core::{
    CoefficientPair, Complex64, DirichletDatum, ScalarField, SpaceTimeGrid, VectorField,
};

/// A forward problem with a known exact solution.
pub struct Manufactured {
    pub pair: CoefficientPair,
    pub data: DirichletDatum,
    pub source: ScalarField,
    pub exact: ScalarField,
}

fn sin3(x: &[f64]) -> f64 {
    x.iter().map(|&v| (std::f64::consts::PI * v).sin()).product()
}

/// Heat problem with zero coefficients: exact solution
/// `u = sin(pi x1) ... sin(pi xn) (1 - exp(-t))`, driven by the matching
/// interior source and zero boundary data.
pub fn heat_manufactured(grid: &SpaceTimeGrid) -> Manufactured {
    let dim = grid.dim() as f64;
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let exact = ScalarField::from_fn(grid, |t, x| {
        Complex64::new(sin3(x) * (1.0 - (-t).exp()), 0.0)
    });
    let source = ScalarField::from_fn(grid, |t, x| {
        let e = (-t).exp();
        Complex64::new(sin3(x) * (e + dim * pi2 * (1.0 - e)), 0.0)
    });
    Manufactured {
        pair: CoefficientPair::zero(grid),
        data: DirichletDatum::zeros(grid),
        source,
        exact,
    }
}

/// Smooth complex phase used to twist the heat problem: a product bump that
/// vanishes together with its gradient on the whole spatial boundary.
pub fn twist_phase(t: f64, x: &[f64]) -> Complex64 {
    let p: f64 = x.iter().map(|&v| 16.0 * v * v * (1.0 - v) * (1.0 - v)).product();
    Complex64::new(0.3, 0.2) * (-t).exp() * p
}

fn twist_phase_grad(t: f64, x: &[f64], j: usize) -> Complex64 {
    let mut prod = Complex64::new(0.3, 0.2) * (-t).exp();
    for (k, &v) in x.iter().enumerate() {
        let f = if k == j {
            32.0 * v * (1.0 - v) * (1.0 - 2.0 * v)
        } else {
            16.0 * v * v * (1.0 - v) * (1.0 - v)
        };
        prod *= f;
    }
    prod
}

/// The heat manufactured problem conjugated by `exp(-phase)`: the twisted
/// field `exp(-phase) u` solves the convection-diffusion problem with
/// coefficients `(grad phase, dt phase)` and source `exp(-phase) g`, since
/// `(dj + dj phase) exp(-phase) u = exp(-phase) dj u`. This exercises
/// variable complex convection with an exact reference.
pub fn twisted_manufactured(grid: &SpaceTimeGrid) -> Manufactured {
    let comps: Vec<ScalarField> = (0..grid.dim())
        .map(|j| ScalarField::from_fn(grid, |t, x| twist_phase_grad(t, x, j)))
        .collect();
    let a = VectorField::from_components(comps).unwrap();
    // dt of the phase is minus the phase itself.
    let q = ScalarField::from_fn(grid, |t, x| -twist_phase(t, x));
    let pair = CoefficientPair::new(a, q).unwrap();
    let exact = ScalarField::from_fn(grid, |t, x| {
        (-twist_phase(t, x)).exp() * Complex64::new(sin3(x) * (1.0 - (-t).exp()), 0.0)
    });
    let dim = grid.dim() as f64;
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let source = ScalarField::from_fn(grid, |t, x| {
        let e = (-t).exp();
        (-twist_phase(t, x)).exp() * Complex64::new(sin3(x) * (e + dim * pi2 * (1.0 - e)), 0.0)
    });
    Manufactured {
        pair,
        data: DirichletDatum::zeros(grid),
        source,
        exact,
    }
}

/// Relative space-time error of a solve against the exact field.
pub fn relative_error(u: &ScalarField, exact: &ScalarField) -> f64 {
    let mut diff = u.clone();
    diff.axpy(-Complex64::ONE, exact).unwrap();
    ops::l2_spacetime(&diff) / ops::l2_spacetime(exact)
}

/// Observed convergence orders from errors on successively doubled grids.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .collect()
}

/// Eigenfunction-series reference for the boundary flux of the pure heat
/// problem on the unit cube.
///
/// Dirichlet data: `f(t, y) = ramp(t) b(y1) b(y2)` on the high face of axis
/// `0`, with `b` a cosine bump. The flux is evaluated at a point on the high
/// face of axis `1`. Projection coefficients of the mode functions are
/// computed by Simpson quadrature, the Duhamel integral likewise; everything
/// is independent of the grid solvers.
pub struct HeatFluxReference {
    /// Bump center and width in the two face coordinates.
    pub bump_center: f64,
    pub bump_width: f64,
    /// Cosine ramp length.
    pub ramp: f64,
    /// Series truncation per axis.
    pub modes: usize,
}

impl Default for HeatFluxReference {
    fn default() -> Self {
        Self {
            bump_center: 0.5,
            bump_width: 0.35,
            ramp: 0.25,
            modes: 28,
        }
    }
}

impl HeatFluxReference {
    /// The boundary datum this reference describes, sampled on a grid.
    pub fn datum(&self, grid: &SpaceTimeGrid) -> DirichletDatum {
        let (c, w, ramp) = (self.bump_center, self.bump_width, self.ramp);
        DirichletDatum::from_fn(grid, move |t, x| {
            if (x[0] - 1.0).abs() > 1e-12 {
                return Complex64::ZERO;
            }
            let r = Self::ramp_value(t, ramp);
            Complex64::new(r * Self::bump(x[1], c, w) * Self::bump(x[2], c, w), 0.0)
        })
    }

    fn bump(y: f64, c: f64, w: f64) -> f64 {
        let s = (y - c) / w;
        if s.abs() >= 1.0 {
            0.0
        } else {
            (0.5 * std::f64::consts::PI * s).cos().powi(2)
        }
    }

    fn ramp_value(t: f64, ramp: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if t < ramp {
            0.5 * (1.0 - (std::f64::consts::PI * t / ramp).cos())
        } else {
            1.0
        }
    }

    /// Simpson quadrature of `g` on `[lo, hi]` with `2k + 1` points.
    fn simpson<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64, half_panels: usize) -> f64 {
        let n = 2 * half_panels;
        let h = (hi - lo) / n as f64;
        let mut acc = g(lo) + g(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * g(lo + i as f64 * h);
        }
        acc * h / 3.0
    }

    /// Flux `dnu u` at the point `(a0, 1, a2)` on the high face of axis 1
    /// at time `t`.
    pub fn flux_at(&self, a0: f64, a2: f64, t: f64) -> f64 {
        let pi = std::f64::consts::PI;
        let (c, w) = (self.bump_center, self.bump_width);
        // 1-D projections of the bump onto sqrt(2) sin(pi k y).
        let proj: Vec<f64> = (1..=self.modes)
            .map(|k| {
                Self::simpson(
                    |y| Self::bump(y, c, w) * (pi * k as f64 * y).sin() * std::f64::consts::SQRT_2,
                    0.0,
                    1.0,
                    256,
                )
            })
            .collect();
        let ramp = self.ramp;
        let mut flux = 0.0;
        for k0 in 1..=self.modes {
            // Data-face factor: d/dx0 of sqrt(2) sin(pi k0 x0) at x0 = 1.
            let data_face = std::f64::consts::SQRT_2 * pi * k0 as f64 * if k0 % 2 == 0 { 1.0 } else { -1.0 };
            for k1 in 1..=self.modes {
                // Observation-face factor at x1 = 1.
                let obs_face =
                    std::f64::consts::SQRT_2 * pi * k1 as f64 * if k1 % 2 == 0 { 1.0 } else { -1.0 };
                let p1 = proj[k1 - 1];
                if p1 == 0.0 {
                    continue;
                }
                for k2 in 1..=self.modes {
                    let p2 = proj[k2 - 1];
                    let b = data_face * p1 * p2;
                    let weight = obs_face
                        * std::f64::consts::SQRT_2
                        * (pi * k0 as f64 * a0).sin()
                        * std::f64::consts::SQRT_2
                        * (pi * k2 as f64 * a2).sin();
                    if (b * weight).abs() < 1e-13 {
                        continue;
                    }
                    let lambda = pi * pi
                        * ((k0 * k0 + k1 * k1 + k2 * k2) as f64);
                    // c_k(t) = -int_0^t exp(-lambda (t - s)) ramp(s) b ds.
                    let ck = -b
                        * Self::simpson(
                            |s| (-lambda * (t - s)).exp() * Self::ramp_value(s, ramp),
                            0.0,
                            t,
                            512,
                        );
                    flux += ck * weight;
                }
            }
        }
        flux
    }
}
