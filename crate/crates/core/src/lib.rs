//! Synthetic cell instance-segmentation datasets from a small set of
//! annotated masks: blob pools grown by contour interpolation, density and
//! spacing priors fitted to real data, and greedy placement of blobs into
//! new instance masks.

pub mod blobs;
pub mod codec;
pub mod config;
pub mod dataset;
pub mod demo;
pub mod error;
pub mod grid;
pub mod mask;
pub mod pipeline;
pub mod placement;
pub mod priors;
pub mod report;
pub mod seed;

pub use error::{Error, Result};
