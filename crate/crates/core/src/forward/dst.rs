//! Fast direct solver for constant-coefficient implicit steps.
//!
//! The Crank-Nicolson implicit matrix splits into the identity plus the
//! scaled discrete Dirichlet Laplacian plus lower-order coefficient terms.
//! On a uniform tensor grid the Laplacian part diagonalizes exactly in the
//! type-I discrete sine basis, so `(alpha I - beta Lap_h) z = r` solves in
//! one forward and one inverse sine transform per axis. This is both the
//! cached direct solver for zero-coefficient steps and the preconditioner of
//! the Krylov iteration for variable coefficients.
//!
//! The sine transform runs through a complex FFT of twice-extended length:
//! odd extension of the line, FFT, then `S_k = (i/2) W_k`.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::geometry::SpaceTimeGrid;
use crate::Complex64;

/// Spectral solver for shifted Dirichlet-Laplacian systems on the interior
/// nodes of one grid.
pub struct DirichletSpectral {
    interior_shape: Vec<usize>,
    interior_strides: Vec<usize>,
    interior_len: usize,
    fft: Vec<Arc<dyn Fft<f64>>>,
    /// Per axis: eigenvalues of the 1-D second-difference matrix `-d^2/dx^2`
    /// with Dirichlet ends.
    eig: Vec<Vec<f64>>,
    /// Normalization of the double sine transform.
    norm: f64,
}

impl DirichletSpectral {
    /// Prepare plans and eigenvalues for the interior of `grid`.
    pub fn new(grid: &SpaceTimeGrid) -> Self {
        let dim = grid.dim();
        let interior_shape: Vec<usize> = (0..dim).map(|k| grid.axis(k).len - 2).collect();
        let mut interior_strides = vec![1usize; dim];
        for k in (0..dim.saturating_sub(1)).rev() {
            interior_strides[k] = interior_strides[k + 1] * interior_shape[k + 1];
        }
        let interior_len = interior_strides[0] * interior_shape[0];
        let mut planner = FftPlanner::new();
        let mut fft = Vec::with_capacity(dim);
        let mut eig = Vec::with_capacity(dim);
        let mut norm = 1.0;
        for k in 0..dim {
            let m = interior_shape[k];
            fft.push(planner.plan_fft_forward(2 * (m + 1)));
            let dx = grid.axis(k).dx;
            eig.push(
                (1..=m)
                    .map(|j| {
                        let s = (std::f64::consts::PI * j as f64 / (2.0 * (m + 1) as f64)).sin();
                        4.0 * s * s / (dx * dx)
                    })
                    .collect(),
            );
            norm *= 2.0 / (m + 1) as f64;
        }
        Self {
            interior_shape,
            interior_strides,
            interior_len,
            fft,
            eig,
            norm,
        }
    }

    /// Number of interior unknowns.
    #[inline]
    pub fn len(&self) -> usize {
        self.interior_len
    }

    /// Whether the interior is empty (cannot happen for valid grids).
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.interior_len == 0
    }

    /// Interior shape per axis.
    #[inline]
    pub fn interior_shape(&self) -> &[usize] {
        &self.interior_shape
    }

    /// Precompute the diagonal factors `norm / (alpha + beta lambda)` for a
    /// shift pair, where `lambda` runs over the Laplacian spectrum.
    pub fn factors(&self, alpha: f64, beta: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.interior_len];
        for (flat, o) in out.iter_mut().enumerate() {
            let mut lam = 0.0;
            let mut rem = flat;
            for k in 0..self.interior_shape.len() {
                let i = rem / self.interior_strides[k];
                rem %= self.interior_strides[k];
                lam += self.eig[k][i];
            }
            *o = self.norm / (alpha + beta * lam);
        }
        out
    }

    /// In place: `data := (alpha I + beta (-Lap_h))^{-1} data` using factors
    /// from [`factors`](Self::factors) with the same shifts.
    pub fn solve_with_factors(&self, factors: &[f64], data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.interior_len);
        debug_assert_eq!(factors.len(), self.interior_len);
        for axis in 0..self.interior_shape.len() {
            self.dst_axis(data, axis);
        }
        for (d, &f) in data.iter_mut().zip(factors.iter()) {
            *d *= f;
        }
        for axis in 0..self.interior_shape.len() {
            self.dst_axis(data, axis);
        }
    }

    /// Unnormalized type-I sine transform along one axis, every line.
    fn dst_axis(&self, data: &mut [Complex64], axis: usize) {
        let m = self.interior_shape[axis];
        let l = 2 * (m + 1);
        let stride = self.interior_strides[axis];
        let fft = &self.fft[axis];
        let mut line = vec![Complex64::ZERO; l];
        let mut scratch = vec![Complex64::ZERO; fft.get_inplace_scratch_len()];
        let half_i = Complex64::new(0.0, 0.5);
        // Enumerate line starts: nodes whose index along `axis` is zero.
        let outer = self.interior_len / m;
        for o in 0..outer {
            // Split the enumeration index into the part slower and faster
            // than `axis`.
            let slow = o / stride;
            let fast = o % stride;
            let start = slow * stride * m + fast;
            line[0] = Complex64::ZERO;
            line[m + 1] = Complex64::ZERO;
            for j in 0..m {
                let v = data[start + j * stride];
                line[j + 1] = v;
                line[l - 1 - j] = -v;
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for j in 0..m {
                data[start + j * stride] = line[j + 1] * half_i;
            }
        }
    }
}
