//! Transport amplitude solver.
//!
//! The amplitude equation `d . (grad Phi + F) = 0` is solved per time level
//! on a family of parallel planes spanned by the (orthonormal) real and
//! imaginary parts of the direction `d`. In plane coordinates the operator
//! `d . grad` is the Cauchy-Riemann operator `d/dy1 + i d/dy2`, so each
//! slice reduces to one spectral division after removing the slice mean,
//! which a linear-in-plane term absorbs exactly. Slice solutions are
//! resampled onto the caller's tensor grid by tricubic interpolation.
//!
//! Any function annihilated by `d . grad` may be added to a solution; the
//! testable statement is the residual, which is measured with second-order
//! centered differences on the solve grid and therefore decays like the
//! square of the slice spacing.
//!
//! The slice machinery is written for three space dimensions, the only
//! configuration the laboratory drives.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::fields::{AnalyticVector, ScalarField};
use crate::geometry::SpaceTimeGrid;
use crate::{Complex64, I};

/// Relative tolerance for the direction admissibility checks.
const DIRECTION_TOL: f64 = 1e-12;

/// Field evaluators the transport solver can consume.
pub enum TransportField<'a> {
    /// Closed-form vector field evaluated as given.
    Analytic(&'a AnalyticVector),
    /// Closed-form field on the unit cube evaluated through its mirror
    /// extension: tangential components even, normal component odd across
    /// the plane where the last coordinate vanishes.
    MirrorExtended(&'a AnalyticVector),
    /// Arbitrary evaluator writing the field value into the buffer.
    Custom(&'a (dyn Fn(f64, &[f64], &mut [Complex64]) + Sync)),
}

impl TransportField<'_> {
    fn eval(&self, t: f64, x: &[f64], out: &mut [Complex64]) {
        match self {
            TransportField::Analytic(v) => v.eval_into(t, x, out),
            TransportField::MirrorExtended(v) => {
                let n = x.len();
                if x[n - 1] >= 0.0 {
                    v.eval_into(t, x, out);
                } else {
                    let mut xs = x.to_vec();
                    xs[n - 1] = -xs[n - 1];
                    v.eval_into(t, &xs, out);
                    out[n - 1] = -out[n - 1];
                }
            }
            TransportField::Custom(f) => f(t, x, out),
        }
    }
}

/// Resolution of the slice solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CauchyGrid {
    /// Nodes per axis of each periodic plane (power of two recommended).
    pub plane_points: usize,
    /// Number of parallel planes covering the domain.
    pub transverse_points: usize,
}

impl Default for CauchyGrid {
    fn default() -> Self {
        Self {
            plane_points: 64,
            transverse_points: 64,
        }
    }
}

/// Rotated frame and extents the slice solver actually used.
#[derive(Debug, Clone)]
pub struct CauchyFrame {
    pub e_plane1: [f64; 3],
    pub e_plane2: [f64; 3],
    pub e_transverse: [f64; 3],
    pub center: [f64; 3],
    /// Half-width of the inner region covering the domain.
    pub inner_half_width: f64,
    /// Half-length of the padded periodic plane; twice the inner value.
    pub padded_half_width: f64,
    pub plane_spacing: f64,
    pub transverse_spacing: f64,
}

/// Amplitude on the caller's grid plus the residual diagnostic.
#[derive(Debug, Clone)]
pub struct TransportSolution {
    /// Amplitude on the caller's grid.
    pub phi: ScalarField,
    /// Worst centered-difference residual over all slices and levels.
    pub residual_sup: f64,
    /// Worst residual per time level.
    pub residual_per_level: Vec<f64>,
    /// Rotated frame the slices were solved in.
    pub frame: CauchyFrame,
}

impl TransportSolution {
    /// Errors when the measured residual exceeds the given tolerance.
    pub fn check(&self, tolerance: f64) -> Result<()> {
        if self.residual_sup > tolerance {
            return Err(Error::InvalidProbe(format!(
                "transport residual {:.3e} exceeds tolerance {:.3e}",
                self.residual_sup, tolerance
            )));
        }
        Ok(())
    }
}

/// Solves `d . (grad Phi + F) = 0` on the target grid for a direction with
/// orthogonal, equal-norm real and imaginary parts.
pub fn solve_transport(
    field: &TransportField,
    direction: &[Complex64],
    target: &SpaceTimeGrid,
    cauchy: &CauchyGrid,
) -> Result<TransportSolution> {
    if target.dim() != 3 {
        return Err(Error::InvalidGrid(format!(
            "transport solver supports three space dimensions, got {}",
            target.dim()
        )));
    }
    if direction.len() != 3 {
        return Err(Error::InvalidProbe(format!(
            "transport direction must have 3 components, got {}",
            direction.len()
        )));
    }
    let m = cauchy.plane_points;
    let s_count = cauchy.transverse_points;
    if m < 8 || s_count < 4 {
        return Err(Error::InvalidGrid(format!(
            "slice resolution too coarse: {m} plane points, {s_count} planes"
        )));
    }

    let re: Vec<f64> = direction.iter().map(|z| z.re).collect();
    let im: Vec<f64> = direction.iter().map(|z| z.im).collect();
    let nr = norm(&re);
    let ni = norm(&im);
    if nr == 0.0 || ni == 0.0 {
        return Err(Error::InvalidProbe(
            "transport direction must have nonzero real and imaginary parts".into(),
        ));
    }
    if (nr - ni).abs() > DIRECTION_TOL * nr
        || dot(&re, &im).abs() > DIRECTION_TOL * nr * ni
    {
        return Err(Error::InvalidProbe(
            "transport direction must have orthogonal equal-norm real and imaginary parts".into(),
        ));
    }
    let e1 = [re[0] / nr, re[1] / nr, re[2] / nr];
    let e2 = [im[0] / ni, im[1] / ni, im[2] / ni];
    let e3 = [
        e1[1] * e2[2] - e1[2] * e2[1],
        e1[2] * e2[0] - e1[0] * e2[2],
        e1[0] * e2[1] - e1[1] * e2[0],
    ];

    let mut center = [0.0; 3];
    let mut radius_sq = 0.0;
    for k in 0..3 {
        let ax = target.axis(k);
        let lo = ax.origin;
        let hi = ax.origin + ax.dx * (ax.len - 1) as f64;
        center[k] = 0.5 * (lo + hi);
        radius_sq += 0.25 * (hi - lo) * (hi - lo);
    }
    let inner = 1.05 * radius_sq.sqrt();
    let padded = 2.0 * inner;
    let dy = 2.0 * padded / m as f64;
    let ds = 2.0 * inner / (s_count - 1) as f64;
    let frame = CauchyFrame {
        e_plane1: e1,
        e_plane2: e2,
        e_transverse: e3,
        center,
        inner_half_width: inner,
        padded_half_width: padded,
        plane_spacing: dy,
        transverse_spacing: ds,
    };

    let mut planner = FftPlanner::new();
    let fwd: Arc<dyn Fft<f64>> = planner.plan_fft_forward(m);
    let inv: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(m);

    // Spectral multiplier 1 / (i k1 - k2) with standard FFT bin frequencies.
    let period = 2.0 * padded;
    let freq = |bin: usize| -> f64 {
        let f = if bin <= m / 2 {
            bin as f64
        } else {
            bin as f64 - m as f64
        };
        2.0 * std::f64::consts::PI * f / period
    };

    let levels: Vec<(Vec<Complex64>, f64)> = (0..=target.nt())
        .into_par_iter()
        .map(|level| {
            let t = target.time(level);
            let mut slices = vec![Complex64::ZERO; s_count * m * m];
            let mut g = vec![Complex64::ZERO; m * m];
            let mut work = vec![Complex64::ZERO; m * m];
            let mut col = vec![Complex64::ZERO; m];
            let mut scratch =
                vec![Complex64::ZERO; fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];
            let mut fvec = vec![Complex64::ZERO; 3];
            let mut x = [0.0; 3];
            let mut worst = 0.0f64;

            for js in 0..s_count {
                let s = -inner + ds * js as f64;
                for i1 in 0..m {
                    let y1 = -padded + dy * i1 as f64;
                    for i2 in 0..m {
                        let y2 = -padded + dy * i2 as f64;
                        for k in 0..3 {
                            x[k] = center[k] + y1 * e1[k] + y2 * e2[k] + s * e3[k];
                        }
                        field.eval(t, &x, &mut fvec);
                        let mut acc = Complex64::ZERO;
                        for k in 0..3 {
                            acc += Complex64::new(e1[k], e2[k]) * fvec[k];
                        }
                        g[i1 * m + i2] = acc;
                    }
                }
                let mean = g.iter().sum::<Complex64>() / (m * m) as f64;
                for (w, gv) in work.iter_mut().zip(&g) {
                    *w = gv - mean;
                }
                for row in work.chunks_exact_mut(m) {
                    fwd.process_with_scratch(row, &mut scratch);
                }
                for i2 in 0..m {
                    for i1 in 0..m {
                        col[i1] = work[i1 * m + i2];
                    }
                    fwd.process_with_scratch(&mut col, &mut scratch);
                    for i1 in 0..m {
                        work[i1 * m + i2] = col[i1];
                    }
                }
                for b1 in 0..m {
                    let k1 = freq(b1);
                    for b2 in 0..m {
                        let idx = b1 * m + b2;
                        if b1 == 0 && b2 == 0 {
                            work[idx] = Complex64::ZERO;
                            continue;
                        }
                        let k2 = freq(b2);
                        let denom = Complex64::new(-k2, k1);
                        work[idx] = -work[idx] / denom;
                    }
                }
                for row in work.chunks_exact_mut(m) {
                    inv.process_with_scratch(row, &mut scratch);
                }
                for i2 in 0..m {
                    for i1 in 0..m {
                        col[i1] = work[i1 * m + i2];
                    }
                    inv.process_with_scratch(&mut col, &mut scratch);
                    for i1 in 0..m {
                        work[i1 * m + i2] = col[i1];
                    }
                }
                let norm_factor = 1.0 / (m * m) as f64;
                let slice = &mut slices[js * m * m..(js + 1) * m * m];
                for i1 in 0..m {
                    let y1 = -padded + dy * i1 as f64;
                    for i2 in 0..m {
                        let y2 = -padded + dy * i2 as f64;
                        let lin = -0.5 * mean * Complex64::new(y1, -y2);
                        slice[i1 * m + i2] = work[i1 * m + i2] * norm_factor + lin;
                    }
                }
                for i1 in 1..m - 1 {
                    for i2 in 1..m - 1 {
                        let d1 = (slice[(i1 + 1) * m + i2] - slice[(i1 - 1) * m + i2])
                            / (2.0 * dy);
                        let d2 = (slice[i1 * m + i2 + 1] - slice[i1 * m + i2 - 1]) / (2.0 * dy);
                        let res = d1 + I * d2 + g[i1 * m + i2];
                        let mag = res.norm();
                        if mag > worst {
                            worst = mag;
                        }
                    }
                }
            }

            let values = resample_level(target, &frame, &slices, m, s_count);
            (values, worst)
        })
        .collect();

    let mut phi = ScalarField::zeros(target);
    let mut residual_per_level = Vec::with_capacity(levels.len());
    let mut residual_sup = 0.0f64;
    for (level, (values, worst)) in levels.into_iter().enumerate() {
        phi.level_mut(level).copy_from_slice(&values);
        residual_sup = residual_sup.max(worst);
        residual_per_level.push(worst);
    }

    Ok(TransportSolution {
        phi,
        residual_sup,
        residual_per_level,
        frame,
    })
}

/// Tricubic Lagrange resampling of one level of slice data onto the tensor
/// grid. Cubic interpolation reproduces the linear mean term exactly, so
/// only the smooth oscillatory part carries interpolation error.
fn resample_level(
    target: &SpaceTimeGrid,
    frame: &CauchyFrame,
    slices: &[Complex64],
    m: usize,
    s_count: usize,
) -> Vec<Complex64> {
    let ns = target.space_len();
    let mut out = vec![Complex64::ZERO; ns];
    let mut x = [0.0; 3];
    let mut xv = vec![0.0; 3];
    for (flat, value) in out.iter_mut().enumerate() {
        target.coords_into(flat, &mut xv);
        for k in 0..3 {
            x[k] = xv[k] - frame.center[k];
        }
        let y1 = x[0] * frame.e_plane1[0] + x[1] * frame.e_plane1[1] + x[2] * frame.e_plane1[2];
        let y2 = x[0] * frame.e_plane2[0] + x[1] * frame.e_plane2[1] + x[2] * frame.e_plane2[2];
        let s = x[0] * frame.e_transverse[0]
            + x[1] * frame.e_transverse[1]
            + x[2] * frame.e_transverse[2];
        let (b1, w1) = cubic_weights((y1 + frame.padded_half_width) / frame.plane_spacing, m);
        let (b2, w2) = cubic_weights((y2 + frame.padded_half_width) / frame.plane_spacing, m);
        let (bs, ws) =
            cubic_weights((s + frame.inner_half_width) / frame.transverse_spacing, s_count);
        let mut acc = Complex64::ZERO;
        for (a, wa) in ws.iter().enumerate() {
            let base_s = (bs + a) * m * m;
            for (b, wb) in w1.iter().enumerate() {
                let base_1 = base_s + (b1 + b) * m;
                let w = wa * wb;
                for (c, wc) in w2.iter().enumerate() {
                    acc += slices[base_1 + b2 + c] * (w * wc);
                }
            }
        }
        *value = acc;
    }
    out
}

/// Base index and the four Lagrange weights for a cubic stencil on a
/// uniform axis with `len` nodes; the stencil is shifted inward at the
/// edges.
fn cubic_weights(u: f64, len: usize) -> (usize, [f64; 4]) {
    let cell = u.floor() as isize;
    let base = (cell - 1).clamp(0, len as isize - 4) as usize;
    let tau = u - base as f64;
    let w0 = -(tau - 1.0) * (tau - 2.0) * (tau - 3.0) / 6.0;
    let w1 = tau * (tau - 2.0) * (tau - 3.0) / 2.0;
    let w2 = -tau * (tau - 1.0) * (tau - 3.0) / 2.0;
    let w3 = tau * (tau - 1.0) * (tau - 2.0) / 6.0;
    (base, [w0, w1, w2, w3])
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
