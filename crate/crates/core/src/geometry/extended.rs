//! Mirror extension of the cube grid across the inaccessible bottom face.

use super::grid::{Axis, SpaceTimeGrid};
use crate::error::Result;

/// Grid over the mirror-extended box: the unit cube together with its
/// reflection through the plane where the last coordinate vanishes, so the
/// last axis spans `[-1, 1]` on `2 N - 1` nodes while the other axes are
/// unchanged.
///
/// The reflection that swaps a node with its mirror image is an exact
/// involution on node ids, and nodes of the original cube embed into the
/// upper half of the extension.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedGrid {
    grid: SpaceTimeGrid,
    base: SpaceTimeGrid,
}

impl ExtendedGrid {
    /// Extend a unit-cube grid across its bottom face.
    pub fn from_base(base: &SpaceTimeGrid) -> Result<Self> {
        let dim = base.dim();
        let mut axes: Vec<Axis> = base.axes().to_vec();
        let last = &base.axes()[dim - 1];
        axes[dim - 1] = Axis {
            len: 2 * last.len - 1,
            origin: -(last.dx * (last.len - 1) as f64),
            dx: last.dx,
        };
        let grid = SpaceTimeGrid::from_axes(axes, base.nt(), base.t_end())?;
        Ok(Self {
            grid,
            base: base.clone(),
        })
    }

    /// The extended space-time grid itself.
    #[inline]
    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    /// The original unit-cube grid.
    #[inline]
    pub fn base(&self) -> &SpaceTimeGrid {
        &self.base
    }

    /// Index, along the last axis of the extended grid, of the reflection
    /// plane (the image of the cube's bottom face).
    #[inline]
    pub fn plane_index(&self) -> usize {
        self.base.axis(self.base.dim() - 1).len - 1
    }

    /// Node id of the mirror image of `flat` (an involution).
    #[inline]
    pub fn reflect(&self, flat: usize) -> usize {
        let dim = self.grid.dim();
        let stride = self.grid.strides()[dim - 1];
        debug_assert_eq!(stride, 1);
        let len = self.grid.axis(dim - 1).len;
        let j = flat % len;
        let mirrored = (len - 1) - j;
        flat - j + mirrored
    }

    /// Extended-grid id of a base-grid node.
    #[inline]
    pub fn embed(&self, base_flat: usize) -> usize {
        let dim = self.base.dim();
        let base_len = self.base.axis(dim - 1).len;
        let j = base_flat % base_len;
        let rest = base_flat / base_len;
        rest * self.grid.axis(dim - 1).len + (self.plane_index() + j)
    }

    /// Base-grid id of an extended node in the upper (original) half, or
    /// `None` for nodes strictly below the reflection plane.
    #[inline]
    pub fn restrict(&self, ext_flat: usize) -> Option<usize> {
        let dim = self.grid.dim();
        let ext_len = self.grid.axis(dim - 1).len;
        let j = ext_flat % ext_len;
        let plane = self.plane_index();
        if j < plane {
            return None;
        }
        let rest = ext_flat / ext_len;
        Some(rest * self.base.axis(dim - 1).len + (j - plane))
    }

    /// Whether the extended node lies on the reflection plane.
    #[inline]
    pub fn on_plane(&self, ext_flat: usize) -> bool {
        let dim = self.grid.dim();
        ext_flat % self.grid.axis(dim - 1).len == self.plane_index()
    }
}
