//! Discrete differential operators and quadrature on sampled fields.
//!
//! All spatial stencils are second order: central differences at interior
//! nodes, one-sided three-point differences on the boundary. Quadrature is
//! tensor-product trapezoid in space and time, which is spectrally accurate
//! for smooth integrands supported away from the boundary and second order
//! otherwise.

use crate::error::{Error, Result};
use crate::fields::field::{ScalarField, VectorField};
use crate::Complex64;

/// Second-order partial derivative along one spatial axis, every level.
pub fn partial(f: &ScalarField, axis: usize) -> ScalarField {
    let grid = f.grid().clone();
    let mut out = ScalarField::zeros(&grid);
    let len = grid.axis(axis).len;
    let stride = grid.strides()[axis];
    let inv2dx = 1.0 / (2.0 * grid.axis(axis).dx);
    let ns = grid.space_len();
    for m in 0..=grid.nt() {
        let src = f.level(m);
        let dst = out.level_mut(m);
        for flat in 0..ns {
            let i = (flat / stride) % len;
            let v = if i == 0 {
                (-3.0 * src[flat] + 4.0 * src[flat + stride] - src[flat + 2 * stride]) * inv2dx
            } else if i + 1 == len {
                (3.0 * src[flat] - 4.0 * src[flat - stride] + src[flat - 2 * stride]) * inv2dx
            } else {
                (src[flat + stride] - src[flat - stride]) * inv2dx
            };
            dst[flat] = v;
        }
    }
    out
}

/// Gradient: one [`partial`] per axis.
pub fn grad(f: &ScalarField) -> VectorField {
    let comps = (0..f.grid().dim()).map(|k| partial(f, k)).collect();
    VectorField::from_components(comps).expect("partials share the field grid")
}

/// Divergence `sum_j d_j A_j`.
pub fn divergence(a: &VectorField) -> ScalarField {
    let mut out = ScalarField::zeros(a.grid());
    for j in 0..a.dim() {
        let pj = partial(a.comp(j), j);
        out.axpy(Complex64::ONE, &pj).expect("same grid");
    }
    out
}

/// Second-order time derivative: central at interior levels, one-sided
/// three-point at the first and last level.
pub fn time_derivative(f: &ScalarField) -> ScalarField {
    let grid = f.grid().clone();
    let nt = grid.nt();
    let ns = grid.space_len();
    let inv2dt = 1.0 / (2.0 * grid.dt());
    let mut out = ScalarField::zeros(&grid);
    for m in 0..=nt {
        for flat in 0..ns {
            let v = if m == 0 {
                (-3.0 * f.at(0, flat) + 4.0 * f.at(1, flat) - f.at(2, flat)) * inv2dt
            } else if m == nt {
                (3.0 * f.at(nt, flat) - 4.0 * f.at(nt - 1, flat) + f.at(nt - 2, flat)) * inv2dt
            } else {
                (f.at(m + 1, flat) - f.at(m - 1, flat)) * inv2dt
            };
            out.set(m, flat, v);
        }
    }
    out
}

/// Trapezoid integral of a single time level over the spatial box.
pub fn integrate_space(f: &ScalarField, m: usize) -> Complex64 {
    let grid = f.grid();
    let lev = f.level(m);
    let mut acc = Complex64::ZERO;
    for (flat, &v) in lev.iter().enumerate() {
        acc += v * grid.quad_weight(flat);
    }
    acc
}

/// Trapezoid integral over space and time.
pub fn integrate_spacetime(f: &ScalarField) -> Complex64 {
    let grid = f.grid();
    (0..=grid.nt())
        .map(|m| integrate_space(f, m) * grid.time_quad_weight(m))
        .sum()
}

/// Space-time pairing `integral of f * conj(g)`. Fails on grid mismatch.
pub fn pair_spacetime(f: &ScalarField, g: &ScalarField) -> Result<Complex64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch("pairing fields on different grids".into()));
    }
    let grid = f.grid();
    let mut acc = Complex64::ZERO;
    for m in 0..=grid.nt() {
        let wt = grid.time_quad_weight(m);
        let (lf, lg) = (f.level(m), g.level(m));
        let mut lev = Complex64::ZERO;
        for flat in 0..grid.space_len() {
            lev += lf[flat] * lg[flat].conj() * grid.quad_weight(flat);
        }
        acc += lev * wt;
    }
    Ok(acc)
}

/// Space-time `L^2` norm.
pub fn l2_spacetime(f: &ScalarField) -> f64 {
    pair_spacetime(f, f).expect("same grid").re.max(0.0).sqrt()
}

/// Spatial `L^2` norm of one time level.
pub fn l2_space(f: &ScalarField, m: usize) -> f64 {
    let grid = f.grid();
    let lev = f.level(m);
    let mut acc = 0.0;
    for (flat, v) in lev.iter().enumerate() {
        acc += v.norm_sqr() * grid.quad_weight(flat);
    }
    acc.sqrt()
}
