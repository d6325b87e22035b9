//! Small dense kernels: orthogonal Procrustes, PSD square roots, trace
//! norms, Haar-random orthogonal matrices and generalized cross products.
//!
//! Everything here assumes low-dimensional points (`d ≤ 16`).

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{GeoError, Result};
use crate::rng::Rng;

/// Largest ambient dimension accepted by the dense kernels.
pub const MAX_DIM: usize = 16;

/// Eigenvalues in `[-PSD_TOL, 0)` (relative to the spectral scale) are
/// clamped to zero; anything more negative is rejected.
pub const PSD_TOL: f64 = 1e-8;

pub fn check_dim(d: usize) -> Result<()> {
    if d > MAX_DIM {
        return Err(GeoError::DimensionTooLarge(d, MAX_DIM));
    }
    Ok(())
}

/// Which orthogonal matrices a rotation search or sampler ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `SO(d)`, determinant `+1`.
    Proper,
    /// `O(d) \ SO(d)`, determinant `-1`.
    Improper,
    /// All of `O(d)`.
    Any,
}

/// Orthogonal `R` minimizing `||target − R·source||_F`, optionally
/// restricted to `SO(d)`.
pub fn orthogonal_procrustes(
    target: &DMatrix<f64>,
    source: &DMatrix<f64>,
    proper: bool,
) -> DMatrix<f64> {
    let m = target * source.transpose();
    let svd = m.svd(true, true);
    let mut u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    if proper && (&u * &v_t).determinant() < 0.0 {
        let k = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        u.column_mut(k).neg_mut();
    }
    u * v_t
}

/// `max_R tr(Rᵀ M)` over `O(d)` (or `SO(d)` when `proper`), where
/// `M = target · sourceᵀ`. The optimal squared residual is then
/// `||target||² + ||source||² − 2·score`.
pub fn procrustes_score(m: &DMatrix<f64>, proper: bool) -> f64 {
    let sv = m.singular_values();
    let total: f64 = sv.iter().sum();
    if proper && m.determinant() < 0.0 {
        let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
        total - 2.0 * smallest
    } else {
        total
    }
}

/// Square root of a symmetric PSD matrix via its eigendecomposition.
pub fn sqrt_psd(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if g.nrows() != g.ncols() {
        return Err(GeoError::InvalidArgument(
            "sqrt_psd needs a square matrix".into(),
        ));
    }
    let sym = (g + g.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let min_eig = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -PSD_TOL * scale {
        return Err(GeoError::NotPsd { min_eig });
    }
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let q = &eig.eigenvectors;
    Ok(q * DMatrix::from_diagonal(&roots) * q.transpose())
}

/// `√(XᵀX)` computed from the SVD of `X`; exact in rank-deficient cases where
/// the eigenvalue route would amplify rounding noise through the square root.
pub fn sqrt_gram(x: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = x.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd v_t");
    v_t.transpose() * DMatrix::from_diagonal(&svd.singular_values) * v_t
}

/// Nuclear norm of a symmetric matrix (sum of absolute eigenvalues).
pub fn trace_norm_sym(s: &DMatrix<f64>) -> f64 {
    let sym = (s + s.transpose()) * 0.5;
    sym.symmetric_eigenvalues().iter().map(|v| v.abs()).sum()
}

/// Haar-distributed orthogonal matrix with the requested orientation.
pub fn random_orthogonal(d: usize, orientation: Orientation, rng: &mut Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    let qr = a.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let det = q.determinant();
    let flip = match orientation {
        Orientation::Proper => det < 0.0,
        Orientation::Improper => det > 0.0,
        Orientation::Any => false,
    };
    if flip {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Planar rotation by `angle` radians.
pub fn rotation_2d(angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

pub fn orthogonality_error(r: &DMatrix<f64>) -> f64 {
    (r.transpose() * r - DMatrix::identity(r.nrows(), r.ncols())).amax()
}

/// Generalized cross product of `d − 1` vectors in `R^d`: the unique `z` with
/// `⟨z, y⟩ = det(v_1 ⋯ v_{d−1} y)` for all `y`, by cofactor expansion along
/// the last column.
pub fn generalized_cross(vectors: &[DVector<f64>]) -> Result<DVector<f64>> {
    let d = vectors.len() + 1;
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return Err(GeoError::DimensionMismatch {
            expected: d,
            got: v.len(),
        });
    }
    let mut z = DVector::zeros(d);
    for r in 0..d {
        let minor = DMatrix::from_fn(d - 1, d - 1, |i, j| {
            let row = if i < r { i } else { i + 1 };
            vectors[j][row]
        });
        let det = if d == 1 { 1.0 } else { small_det(&minor) };
        let sign = if (r + d - 1).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        z[r] = sign * det;
    }
    Ok(z)
}

fn small_det(m: &DMatrix<f64>) -> f64 {
    match m.nrows() {
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => m.determinant(),
    }
}
