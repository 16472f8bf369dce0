//! Boundary faces and the accessible/inaccessible partition.
//!
//! The inaccessible part of the cube boundary is the open bottom face, where
//! the last coordinate vanishes; every other face, together with the closed
//! bottom face's edge ring, is accessible. Probe data live on the accessible
//! part and flux readings are taken there.

use super::grid::SpaceTimeGrid;

/// Which end of an axis a face sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Axis index 0.
    Low,
    /// Axis index `len - 1`.
    High,
}

/// One face of the box, normal to `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    /// Axis the face is normal to.
    pub axis: usize,
    /// Which end of that axis.
    pub side: Side,
}

impl Face {
    /// All `2 dim` faces of a `dim`-dimensional box.
    pub fn all(dim: usize) -> Vec<Face> {
        let mut v = Vec::with_capacity(2 * dim);
        for axis in 0..dim {
            v.push(Face { axis, side: Side::Low });
            v.push(Face { axis, side: Side::High });
        }
        v
    }

    /// The faces forming the accessible boundary of the unit cube: all faces
    /// except the bottom one (low end of the last axis).
    pub fn accessible(dim: usize) -> Vec<Face> {
        Face::all(dim)
            .into_iter()
            .filter(|f| !(f.axis == dim - 1 && f.side == Side::Low))
            .collect()
    }

    /// Whether this is the inaccessible bottom face.
    pub fn is_bottom(&self, dim: usize) -> bool {
        self.axis == dim - 1 && self.side == Side::Low
    }

    /// Axis index of nodes on this face.
    #[inline]
    pub fn axis_index(&self, grid: &SpaceTimeGrid) -> usize {
        match self.side {
            Side::Low => 0,
            Side::High => grid.axis(self.axis).len - 1,
        }
    }

    /// Outward normal sign along `self.axis` (`-1` on the low side).
    #[inline]
    pub fn normal_sign(&self) -> f64 {
        match self.side {
            Side::Low => -1.0,
            Side::High => 1.0,
        }
    }

    /// Ids of all nodes on the (closed) face, in increasing order.
    pub fn nodes(&self, grid: &SpaceTimeGrid) -> Vec<usize> {
        let fixed = self.axis_index(grid);
        let mut out = Vec::new();
        let mut idx = vec![0usize; grid.dim()];
        // Odometer over the in-face axes.
        loop {
            idx[self.axis] = fixed;
            out.push(grid.flatten(&idx));
            let mut k = grid.dim();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if k == self.axis {
                    continue;
                }
                idx[k] += 1;
                if idx[k] < grid.axis(k).len {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// Trapezoid surface-quadrature weight of a node on this face: product of
    /// `dx` over the in-face axes, halved on in-face edges.
    #[inline]
    pub fn quad_weight(&self, grid: &SpaceTimeGrid, flat: usize) -> f64 {
        let mut w = 1.0;
        for k in 0..grid.dim() {
            if k == self.axis {
                continue;
            }
            let i = grid.axis_index(flat, k);
            let edge = i == 0 || i + 1 == grid.axis(k).len;
            let ax = grid.axis(k);
            w *= if edge { 0.5 * ax.dx } else { ax.dx };
        }
        w
    }
}

/// Classification of a spatial node relative to the boundary partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryClass {
    /// Not a boundary node.
    Interior,
    /// On the open bottom face (inaccessible part).
    Inaccessible,
    /// On the accessible part (everything else on the boundary, including the
    /// bottom face's edge ring).
    Accessible,
}

impl BoundaryClass {
    /// Classify a node of `grid`.
    pub fn of(grid: &SpaceTimeGrid, flat: usize) -> BoundaryClass {
        let dim = grid.dim();
        let mut on_boundary = false;
        let mut only_bottom = true;
        for k in 0..dim {
            let i = grid.axis_index(flat, k);
            let lo = i == 0;
            let hi = i + 1 == grid.axis(k).len;
            if lo || hi {
                on_boundary = true;
                let is_bottom_axis = k == dim - 1 && lo;
                if !is_bottom_axis {
                    only_bottom = false;
                }
            }
        }
        if !on_boundary {
            BoundaryClass::Interior
        } else if only_bottom {
            BoundaryClass::Inaccessible
        } else {
            BoundaryClass::Accessible
        }
    }
}

/// Ids of nodes on the open bottom face (inaccessible part), increasing order.
pub fn inaccessible_nodes(grid: &SpaceTimeGrid) -> Vec<usize> {
    (0..grid.space_len())
        .filter(|&f| BoundaryClass::of(grid, f) == BoundaryClass::Inaccessible)
        .collect()
}

/// Ids of nodes on the accessible boundary part, increasing order.
pub fn accessible_nodes(grid: &SpaceTimeGrid) -> Vec<usize> {
    (0..grid.space_len())
        .filter(|&f| BoundaryClass::of(grid, f) == BoundaryClass::Accessible)
        .collect()
}
