//! Invariant point-set models.
//!
//! * [`wl1_forward`]: a 1-WL geometric message-passing model over the complete
//!   distance graph. Invariant under `G±`, Lipschitz in the pairwise
//!   distances, and therefore not lower-Lipschitz in the Procrustes metric.
//! * [`bilip_2d`] / [`bilip_general`]: homogeneous `G+`-invariant models built
//!   from normalized inner products and generalized cross products.
//! * [`Symmetrizer`]: turns a `G+`-invariant model into a `G±`-invariant one.

mod bilip;
mod symmetrize;
mod wl1;

use nalgebra::DVector;

pub use bilip::{
    bilip_2d, bilip_2d_nodes, bilip_general, bilip_general_tuples, in_omega_c, node_features,
    ordered_tuples, BiLipConfig, BiLipSpec, MAX_CROSS_DIM,
};
pub use symmetrize::Symmetrizer;
pub use wl1::{wl1_forward, Wl1Config, Wl1Spec, LEAK_SLOPE};

/// Per-node (or per-tuple) feature vectors with the indices they belong to.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeFeatures {
    /// `index[r]` lists the point indices feature `r` is attached to.
    pub index: Vec<Vec<usize>>,
    pub features: Vec<DVector<f64>>,
}

impl NodeFeatures {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.features.first().map_or(0, DVector::len)
    }

    /// Feature attached to exactly `idx`, if any.
    pub fn get(&self, idx: &[usize]) -> Option<&DVector<f64>> {
        self.index
            .iter()
            .position(|i| i.as_slice() == idx)
            .map(|r| &self.features[r])
    }

    /// Features as the columns of a matrix.
    pub fn to_matrix(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_columns(&self.features)
    }
}
