//! Polygon primitives, convex hulls, rasterization onto the map grid and
//! supercover segment traversal.
//!
//! All coordinates are meters in the environment frame, with the origin at
//! the lower-left corner of the square frame. Grid cell `(x, y)` covers
//! `[x * mpp, (x + 1) * mpp] x [y * mpp, (y + 1) * mpp]`.

mod hull;
mod polygon;
mod raster;
mod traverse;

use thiserror::Error;

pub use hull::convex_hull;
pub use polygon::{
    on_segment, orient, point_segment_distance, segments_intersect, signed_area, Point, Polygon,
    EPS,
};
pub use raster::{burn_polygon, rasterize, BinaryMap, Pixel, GRID_SIZE};
pub use traverse::{segment_pixels, supercover, SegmentTrace};

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon vertex {0} is not finite")]
    NonFinite(usize),
    #[error("polygon has zero area")]
    ZeroArea,
    #[error("polygon is self-intersecting")]
    SelfIntersecting,
    #[error("all vertices are collinear; the hull is not a polygon")]
    DegenerateHull,
    #[error("grid must have at least one cell")]
    EmptyGrid,
    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("map dimensions do not match")]
    DimensionMismatch,
    #[error("run lengths cover {found} cells, expected {expected}")]
    BadRunLength { expected: usize, found: usize },
}
