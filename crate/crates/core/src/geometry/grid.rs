//! Uniform tensor-product space-time grids.

use crate::error::{Error, Result};

/// One spatial axis of a tensor grid: node count, origin and spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    /// Number of nodes on the axis (at least 3).
    pub len: usize,
    /// Coordinate of node 0.
    pub origin: f64,
    /// Node spacing.
    pub dx: f64,
}

impl Axis {
    /// Coordinate of node `i`.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        self.origin + self.dx * i as f64
    }
}

/// Uniform space-time grid over a box, with node-centered spatial axes and
/// `nt + 1` time levels covering `[0, T]`.
///
/// Spatial nodes include the boundary; flat indices are row-major with the
/// last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeGrid {
    axes: Vec<Axis>,
    strides: Vec<usize>,
    nt: usize,
    t_end: f64,
}

impl SpaceTimeGrid {
    /// Grid over the unit cube `(0,1)^dim` with `nodes` nodes per axis,
    /// `nt` time steps and final time `t_end`.
    ///
    /// Fails unless `dim >= 1`, `nodes >= 3`, `nt >= 2` and `t_end > 0`.
    pub fn unit_cube(dim: usize, nodes: usize, nt: usize, t_end: f64) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if nodes < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 nodes per axis, got {nodes}"
            )));
        }
        let dx = 1.0 / (nodes - 1) as f64;
        let axes = vec![
            Axis {
                len: nodes,
                origin: 0.0,
                dx,
            };
            dim
        ];
        Self::from_axes(axes, nt, t_end)
    }

    /// Grid from explicit axes. Fails on empty axes, axes with fewer than 3
    /// nodes or non-positive spacing, `nt < 2`, or `t_end <= 0`.
    pub fn from_axes(axes: Vec<Axis>, nt: usize, t_end: f64) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidGrid("no spatial axes".into()));
        }
        for (k, ax) in axes.iter().enumerate() {
            if ax.len < 3 {
                return Err(Error::InvalidGrid(format!(
                    "axis {k} has {} nodes, need at least 3",
                    ax.len
                )));
            }
            if !(ax.dx > 0.0) || !ax.dx.is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "axis {k} has non-positive spacing {}",
                    ax.dx
                )));
            }
        }
        if nt < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 time steps, got {nt}"
            )));
        }
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::InvalidGrid(format!("final time must be positive, got {t_end}")));
        }
        let mut strides = vec![1usize; axes.len()];
        for k in (0..axes.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * axes[k + 1].len;
        }
        Ok(Self {
            axes,
            strides,
            nt,
            t_end,
        })
    }

    /// Spatial dimension.
    #[inline]
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Axis description for axis `k`.
    #[inline]
    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    /// All axes.
    #[inline]
    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Node counts per axis.
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len).collect()
    }

    /// Row-major strides (last axis fastest).
    #[inline]
    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Total number of spatial nodes.
    #[inline]
    pub fn space_len(&self) -> usize {
        self.strides[0] * self.axes[0].len
    }

    /// Number of time steps; there are `nt() + 1` stored time levels.
    #[inline]
    pub fn nt(&self) -> usize {
        self.nt
    }

    /// Final time `T`.
    #[inline]
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Time step `T / nt`.
    #[inline]
    pub fn dt(&self) -> f64 {
        self.t_end / self.nt as f64
    }

    /// Time of level `m`.
    #[inline]
    pub fn time(&self, m: usize) -> f64 {
        self.dt() * m as f64
    }

    /// Flatten a multi-index (one entry per axis) into a node id.
    #[inline]
    pub fn flatten(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.axes.len());
        let mut flat = 0usize;
        for (k, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.axes[k].len);
            flat += i * self.strides[k];
        }
        flat
    }

    /// Inverse of [`flatten`](Self::flatten), writing into `out`.
    #[inline]
    pub fn unflatten_into(&self, flat: usize, out: &mut [usize]) {
        debug_assert_eq!(out.len(), self.axes.len());
        let mut rem = flat;
        for k in 0..self.axes.len() {
            out[k] = rem / self.strides[k];
            rem %= self.strides[k];
        }
    }

    /// Multi-index of a node id (allocating convenience wrapper).
    pub fn unflatten(&self, flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.axes.len()];
        self.unflatten_into(flat, &mut out);
        out
    }

    /// Coordinates of a node id, written into `out`.
    #[inline]
    pub fn coords_into(&self, flat: usize, out: &mut [f64]) {
        let mut rem = flat;
        for k in 0..self.axes.len() {
            let i = rem / self.strides[k];
            rem %= self.strides[k];
            out[k] = self.axes[k].coord(i);
        }
    }

    /// Coordinates of a node id (allocating convenience wrapper).
    pub fn coords(&self, flat: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        self.coords_into(flat, &mut out);
        out
    }

    /// Whether the node lies on the spatial boundary of the box.
    #[inline]
    pub fn is_boundary(&self, flat: usize) -> bool {
        let mut rem = flat;
        for k in 0..self.axes.len() {
            let i = rem / self.strides[k];
            rem %= self.strides[k];
            if i == 0 || i + 1 == self.axes[k].len {
                return true;
            }
        }
        false
    }

    /// Ids of all boundary nodes, in increasing order.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.space_len()).filter(|&f| self.is_boundary(f)).collect()
    }

    /// Ids of all interior nodes, in increasing order.
    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.space_len()).filter(|&f| !self.is_boundary(f)).collect()
    }

    /// Trapezoid quadrature weight of a spatial node: product over axes of
    /// `dx` (half `dx` on axis ends).
    #[inline]
    pub fn quad_weight(&self, flat: usize) -> f64 {
        let mut rem = flat;
        let mut w = 1.0;
        for k in 0..self.axes.len() {
            let i = rem / self.strides[k];
            rem %= self.strides[k];
            let edge = i == 0 || i + 1 == self.axes[k].len;
            w *= if edge { 0.5 * self.axes[k].dx } else { self.axes[k].dx };
        }
        w
    }

    /// Trapezoid quadrature weight of a time level.
    #[inline]
    pub fn time_quad_weight(&self, m: usize) -> f64 {
        let edge = m == 0 || m == self.nt;
        if edge {
            0.5 * self.dt()
        } else {
            self.dt()
        }
    }

    /// Nested spatial refinement: every axis gets `2 len - 1` nodes (old nodes
    /// are kept, one new node per cell), spacing halves.
    pub fn refine_space(&self) -> Self {
        let axes = self
            .axes
            .iter()
            .map(|a| Axis {
                len: 2 * a.len - 1,
                origin: a.origin,
                dx: 0.5 * a.dx,
            })
            .collect();
        Self::from_axes(axes, self.nt, self.t_end).expect("refinement of a valid grid is valid")
    }

    /// Time refinement: doubles the step count.
    pub fn refine_time(&self) -> Self {
        Self::from_axes(self.axes.clone(), 2 * self.nt, self.t_end)
            .expect("refinement of a valid grid is valid")
    }

    /// Id of the node obtained from `flat` by moving `step` nodes along `axis`
    /// (negative steps allowed); `None` when the move leaves the grid.
    #[inline]
    pub fn neighbor(&self, flat: usize, axis: usize, step: isize) -> Option<usize> {
        let i = (flat / self.strides[axis]) % self.axes[axis].len;
        let j = i as isize + step;
        if j < 0 || j >= self.axes[axis].len as isize {
            return None;
        }
        Some((flat as isize + step * self.strides[axis] as isize) as usize)
    }

    /// Axis-`k` index of a node id.
    #[inline]
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.strides[axis]) % self.axes[axis].len
    }
}
