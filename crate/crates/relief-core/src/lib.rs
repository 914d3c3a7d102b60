//! relief-core: turn raster images into 3D-printable relief models.
//!
//! The pipeline: PNM bytes -> luminance matrix -> wavelet-pyramid
//! smoothing -> height field -> watertight triangle mesh -> STL, with a
//! planar slicer that reconstructs per-layer printer polygons.
//!
//! Every stage is a pure function over immutable inputs and safe to call
//! concurrently.

pub mod heightmap;
pub mod luminance;
pub mod matrix;
pub mod mesh;
pub mod slicer;
pub mod stl;
pub mod wavelet;

pub use heightmap::{HeightError, HeightField};
pub use luminance::{GrayImage, GrayStats, LuminanceError, PnmImage, RgbImage};
pub use matrix::Matrix;
pub use mesh::{MeshError, Point3, TriangleMesh, ValidationReport};
pub use slicer::{Segment, SliceError, SlicePolygon};
pub use stl::StlError;
pub use wavelet::{Band, FilterBank, Kernel, WaveletError};
