//! Point sets: `d × n` matrices whose columns are points in `R^d`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

/// Tolerance on row means for [`PointSet::is_centralized`].
pub const CENTRALIZED_TOL: f64 = 1e-12;

/// Default Frobenius tolerance used by [`PointSet::approx_eq`].
pub const DEFAULT_EQ_TOL: f64 = 1e-9;

/// A finite `d × n` real matrix; column `j` is the point `x_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointSetJson", into = "PointSetJson")]
pub struct PointSet {
    data: DMatrix<f64>,
}

impl PointSet {
    /// Builds a point set from a `dim × count` matrix.
    pub fn from_matrix(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 {
            return Err(GeoError::InvalidArgument("dim must be at least 1".into()));
        }
        if data.ncols() == 0 {
            return Err(GeoError::InvalidArgument("count must be at least 1".into()));
        }
        if let Some(idx) = data.iter().position(|v| !v.is_finite()) {
            return Err(GeoError::NonFinite(idx));
        }
        Ok(Self { data })
    }

    /// Builds a point set from column-major storage of length `dim * count`.
    pub fn from_column_major(dim: usize, count: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != dim * count {
            return Err(GeoError::Malformed(format!(
                "expected {} values for a {dim}x{count} point set, got {}",
                dim * count,
                values.len()
            )));
        }
        Self::from_matrix(DMatrix::from_vec(dim, count, values))
    }

    /// Builds a point set from its points.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let count = points.len();
        let dim = points.first().map_or(0, Vec::len);
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(GeoError::DimensionMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        Self::from_column_major(dim, count, points.concat())
    }

    /// Builds a point set from `dim` rows, each of length `count`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let count = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != count) {
            return Err(GeoError::CountMismatch {
                expected: count,
                got: bad.len(),
            });
        }
        Self::from_matrix(DMatrix::from_fn(dim, count, |i, j| rows[i][j]))
    }

    pub fn zeros(dim: usize, count: usize) -> Result<Self> {
        Self::from_matrix(DMatrix::zeros(dim, count))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn count(&self) -> usize {
        self.data.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    /// Point `j` as an owned vector.
    pub fn point(&self, j: usize) -> DVector<f64> {
        self.data.column(j).into_owned()
    }

    pub fn points(&self) -> impl Iterator<Item = DVector<f64>> + '_ {
        self.data.column_iter().map(|c| c.into_owned())
    }

    /// Column-major copy of the entries.
    pub fn column_major(&self) -> Vec<f64> {
        self.data.as_slice().to_vec()
    }

    pub fn mean(&self) -> DVector<f64> {
        self.data.column_mean()
    }

    pub fn is_centralized(&self) -> bool {
        self.mean().iter().all(|m| m.abs() <= CENTRALIZED_TOL)
    }

    /// Translates the points so that their mean is the origin.
    pub fn centralize(&self) -> PointSet {
        let mean = self.mean();
        let mut data = self.data.clone();
        for mut col in data.column_iter_mut() {
            col -= &mean;
        }
        PointSet { data }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.norm()
    }

    /// `||X||_{1,2}`: the largest Euclidean norm of a point.
    pub fn op_norm_12(&self) -> f64 {
        self.data
            .column_iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// `t · X`.
    pub fn scaled(&self, t: f64) -> PointSet {
        PointSet {
            data: &self.data * t,
        }
    }

    /// `X + c`, with `c` added to every point.
    pub fn translated(&self, c: &DVector<f64>) -> Result<PointSet> {
        self.check_vec_dim(c.len())?;
        let mut data = self.data.clone();
        for mut col in data.column_iter_mut() {
            col += c;
        }
        Ok(PointSet { data })
    }

    /// `R · X` for a `d × d` matrix `R`.
    pub fn left_mul(&self, r: &DMatrix<f64>) -> Result<PointSet> {
        if r.nrows() != self.dim() || r.ncols() != self.dim() {
            return Err(GeoError::DimensionMismatch {
                expected: self.dim(),
                got: r.nrows().max(r.ncols()),
            });
        }
        Ok(PointSet {
            data: r * &self.data,
        })
    }

    /// Gram matrix `XᵀX`.
    pub fn gram(&self) -> GramMatrix {
        GramMatrix(self.data.transpose() * &self.data)
    }

    /// Frobenius distance `||X - Y||_F` without any alignment.
    pub fn frobenius_distance(&self, other: &PointSet) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok((&self.data - &other.data).norm())
    }

    pub fn approx_eq(&self, other: &PointSet, tol: f64) -> bool {
        self.frobenius_distance(other).is_ok_and(|d| d <= tol)
    }

    pub fn check_same_shape(&self, other: &PointSet) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(GeoError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        if self.count() != other.count() {
            return Err(GeoError::CountMismatch {
                expected: self.count(),
                got: other.count(),
            });
        }
        Ok(())
    }

    fn check_vec_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(GeoError::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    /// Compact binary form: little-endian `u32 d`, `u32 n`, then `d·n`
    /// column-major `f64`s.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 8 * self.data.len());
        out.extend_from_slice(&(self.dim() as u32).to_le_bytes());
        out.extend_from_slice(&(self.count() as u32).to_le_bytes());
        for v in self.data.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(GeoError::Malformed(
                "binary point set shorter than header".into(),
            ));
        }
        let dim = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
        let count = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let body = &bytes[8..];
        if body.len() != 8 * dim * count {
            return Err(GeoError::Malformed(format!(
                "binary body has {} bytes, expected {}",
                body.len(),
                8 * dim * count
            )));
        }
        let values = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::from_column_major(dim, count, values)
    }
}

/// JSON wire form: `{"dim": d, "count": n, "points": [[..n..] × d]}` with rows
/// of the `d × n` matrix.
#[derive(Serialize, Deserialize)]
struct PointSetJson {
    dim: usize,
    count: usize,
    points: Vec<Vec<f64>>,
}

impl From<PointSet> for PointSetJson {
    fn from(p: PointSet) -> Self {
        let points = p
            .data
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        PointSetJson {
            dim: p.dim(),
            count: p.count(),
            points,
        }
    }
}

impl TryFrom<PointSetJson> for PointSet {
    type Error = GeoError;

    fn try_from(j: PointSetJson) -> Result<Self> {
        if j.points.len() != j.dim {
            return Err(GeoError::Malformed(format!(
                "dim is {} but {} rows were given",
                j.dim,
                j.points.len()
            )));
        }
        if j.points.iter().any(|r| r.len() != j.count) {
            return Err(GeoError::Malformed(format!(
                "every row must hold count = {} entries",
                j.count
            )));
        }
        PointSet::from_rows(&j.points)
    }
}

/// Symmetric PSD Gram matrix `G(X) = XᵀX`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix(pub DMatrix<f64>);

impl GramMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Principal square root, see [`crate::linalg::sqrt_psd`].
    pub fn sqrt(&self) -> Result<DMatrix<f64>> {
        crate::linalg::sqrt_psd(&self.0)
    }
}
