//! Permutations and elements of the rigid-motion × permutation groups.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::linalg::{self, Orientation};
use crate::pointset::PointSet;
use crate::rng::Rng;

/// Orthogonality and determinant tolerance for group elements.
pub const GROUP_TOL: f64 = 1e-10;

/// A permutation of `0..n` stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(GeoError::InvalidPermutation(format!(
                    "{images:?} is not a permutation of 0..{n}"
                )));
            }
            seen[i] = true;
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Uniform random permutation (Fisher–Yates).
    pub fn random(n: usize, rng: &mut Rng) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Self(inv)
    }

    /// `j ↦ self(other(j))`.
    pub fn then(&self, other: &Permutation) -> Self {
        Self(other.0.iter().map(|&j| self.0[j]).collect())
    }

    /// Reorders columns: column `j` of the result is column `self(j)` of `x`.
    pub fn apply(&self, x: &PointSet) -> Result<PointSet> {
        if self.len() != x.count() {
            return Err(GeoError::CountMismatch {
                expected: x.count(),
                got: self.len(),
            });
        }
        let m = x.matrix();
        PointSet::from_matrix(DMatrix::from_fn(x.dim(), x.count(), |i, j| {
            m[(i, self.0[j])]
        }))
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = GeoError;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

/// `(π, R, t)` acting by `(gX)_j = R·x_{π(j)} + t`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub perm: Permutation,
    pub rot: DMatrix<f64>,
    pub trans: DVector<f64>,
    /// `det(rot) = +1`.
    pub proper: bool,
}

impl GroupElement {
    pub fn new(perm: Permutation, rot: DMatrix<f64>, trans: DVector<f64>) -> Result<Self> {
        let d = rot.nrows();
        if rot.ncols() != d || trans.len() != d {
            return Err(GeoError::InvalidGroupElement(format!(
                "rotation {}x{} and translation of length {} are inconsistent",
                rot.nrows(),
                rot.ncols(),
                trans.len()
            )));
        }
        let err = linalg::orthogonality_error(&rot);
        if err > GROUP_TOL {
            return Err(GeoError::InvalidGroupElement(format!(
                "rotation is not orthogonal (error {err:e})"
            )));
        }
        let det = rot.determinant();
        let proper = (det - 1.0).abs() <= GROUP_TOL;
        if !proper && (det + 1.0).abs() > GROUP_TOL {
            return Err(GeoError::InvalidGroupElement(format!(
                "determinant {det} is not ±1"
            )));
        }
        Ok(Self {
            perm,
            rot,
            trans,
            proper,
        })
    }

    pub fn identity(dim: usize, count: usize) -> Self {
        Self {
            perm: Permutation::identity(count),
            rot: DMatrix::identity(dim, dim),
            trans: DVector::zeros(dim),
            proper: true,
        }
    }

    pub fn translation(count: usize, t: DVector<f64>) -> Self {
        let d = t.len();
        Self {
            perm: Permutation::identity(count),
            rot: DMatrix::identity(d, d),
            trans: t,
            proper: true,
        }
    }

    pub fn rotation(count: usize, rot: DMatrix<f64>) -> Result<Self> {
        let d = rot.nrows();
        Self::new(Permutation::identity(count), rot, DVector::zeros(d))
    }

    /// Random element with Haar rotation of the given orientation, uniform
    /// permutation and standard normal translation.
    pub fn random(dim: usize, count: usize, orientation: Orientation, rng: &mut Rng) -> Self {
        let rot = linalg::random_orthogonal(dim, orientation, rng);
        let trans = DVector::from_fn(dim, |_, _| StandardNormal.sample(rng));
        let perm = Permutation::random(count, rng);
        let proper = rot.determinant() > 0.0;
        Self {
            perm,
            rot,
            trans,
            proper,
        }
    }

    pub fn dim(&self) -> usize {
        self.rot.nrows()
    }

    pub fn apply(&self, x: &PointSet) -> Result<PointSet> {
        if x.dim() != self.dim() {
            return Err(GeoError::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        let permuted = self.perm.apply(x)?;
        permuted.left_mul(&self.rot)?.translated(&self.trans)
    }

    /// The element acting as `self ∘ other`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.dim() != other.dim() || self.perm.len() != other.perm.len() {
            return Err(GeoError::InvalidGroupElement(
                "composing elements of different groups".into(),
            ));
        }
        Ok(GroupElement {
            perm: other.perm.then(&self.perm),
            rot: &self.rot * &other.rot,
            trans: &self.rot * &other.trans + &self.trans,
            proper: self.proper == other.proper,
        })
    }
}
