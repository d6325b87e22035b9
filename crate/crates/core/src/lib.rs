//! Symmetry-aware metrics, invariant embeddings and matching for point sets
//! under rigid motions and permutations.

pub mod analysis;
pub mod assignment;
pub mod datagen;
pub mod embeddings;
pub mod error;
pub mod group;
pub mod linalg;
pub mod matching;
pub mod metrics;
pub mod models;
pub mod pointset;
pub mod rng;

#[cfg(test)]
mod testutil;

pub use embeddings::{MultiSet, SortEmbedParams};
pub use error::{GeoError, Result};
pub use group::{GroupElement, Permutation};
pub use linalg::Orientation;
pub use metrics::{MetricResult, Witness};
pub use pointset::PointSet;
