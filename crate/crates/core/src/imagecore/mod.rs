//! Raster and geometry primitives shared by every pipeline stage.

mod components;
mod geometry;
mod mask;
mod otsu;
mod raster;

pub use components::{label_blobs, label_blobs_with, Blob, BlobSet, Connectivity};
pub use geometry::{convex_hull, polygons_intersect, BBox, Point, Polygon};
pub use mask::{rasterize_polygon, rasterize_quad, BinaryMask};
pub use otsu::{otsu_threshold, OTSU_BINS};
pub use raster::{RgbImage, ScalarImage};
