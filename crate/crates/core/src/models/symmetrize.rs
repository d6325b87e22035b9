use nalgebra::{DMatrix, DVector};

use crate::embeddings::SortEmbedParams;
use crate::error::{GeoError, Result};
use crate::group::GROUP_TOL;
use crate::pointset::PointSet;

/// Lifts a `G+`-invariant model `f` to `f̃(X) = β({f(X), f(R0·X)})`, which is
/// also invariant under reflections.
#[derive(Clone, Debug)]
pub struct Symmetrizer {
    r0: DMatrix<f64>,
    pair: SortEmbedParams,
}

impl Symmetrizer {
    /// `r0 = diag(−1, 1, …, 1)` and a default-width embedding of 2-element
    /// multisets of `out_dim` vectors.
    pub fn new(dim: usize, out_dim: usize, seed: u64) -> Result<Self> {
        let mut r0 = DMatrix::identity(dim, dim);
        r0[(0, 0)] = -1.0;
        Self::with_reflection(r0, SortEmbedParams::with_default_dim(seed, 2, out_dim)?)
    }

    /// Requires `r0` orthogonal, `det r0 = −1` and `r0² = I`.
    pub fn with_reflection(r0: DMatrix<f64>, pair: SortEmbedParams) -> Result<Self> {
        let d = r0.nrows();
        if r0.ncols() != d {
            return Err(GeoError::InvalidGroupElement(
                "reflection must be square".into(),
            ));
        }
        let id = DMatrix::identity(d, d);
        if (r0.transpose() * &r0 - &id).amax() > GROUP_TOL {
            return Err(GeoError::InvalidGroupElement(
                "reflection is not orthogonal".into(),
            ));
        }
        if (r0.determinant() + 1.0).abs() > GROUP_TOL {
            return Err(GeoError::InvalidGroupElement(
                "reflection must have determinant −1".into(),
            ));
        }
        if (&r0 * &r0 - &id).amax() > GROUP_TOL {
            return Err(GeoError::InvalidGroupElement(
                "reflection must be an involution".into(),
            ));
        }
        if pair.cardinality() != 2 {
            return Err(GeoError::InvalidArgument(
                "pair embedding must take 2-element multisets".into(),
            ));
        }
        Ok(Self { r0, pair })
    }

    pub fn reflection(&self) -> &DMatrix<f64> {
        &self.r0
    }

    pub fn output_dim(&self) -> usize {
        self.pair.output_dim()
    }

    pub fn apply<F>(&self, f: F, x: &PointSet) -> Result<DVector<f64>>
    where
        F: Fn(&PointSet) -> Result<DVector<f64>>,
    {
        let a = f(x)?;
        let b = f(&x.left_mul(&self.r0)?)?;
        if a.len() != self.pair.elem_dim() || b.len() != a.len() {
            return Err(GeoError::DimensionMismatch {
                expected: self.pair.elem_dim(),
                got: a.len(),
            });
        }
        self.pair.embed_columns(&DMatrix::from_columns(&[a, b]))
    }
}
