//! Space-time grids on the unit cube and on its mirror extension.
//!
//! The physical domain is the open unit cube in `n` dimensions, discretized by
//! a uniform tensor grid with the same node count on every axis, together with
//! a uniform partition of `[0, T]`. The last coordinate axis is special: the
//! face where it vanishes is the inaccessible part of the boundary, and the
//! extended grid mirrors the cube across that face so the last coordinate runs
//! over `[-1, 1]`.
//!
//! Flat node indices are row-major with the last axis fastest, matching the
//! memory layout of sampled fields.

mod extended;
mod grid;
mod partition;

pub use extended::ExtendedGrid;
pub use grid::{Axis, SpaceTimeGrid};
pub use partition::{accessible_nodes, inaccessible_nodes, BoundaryClass, Face, Side};
