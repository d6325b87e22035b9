use crate::error::Result;
use crate::linalg;
use crate::pointset::PointSet;

/// The sandwich `lower ≤ mid ≤ upper` relating orthogonal Procrustes and
/// Gram square roots, with the trace-norm bound on `mid²`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GramBounds {
    /// `min_{R ∈ O(d)} ||R·X − Y||_F`
    pub lower: f64,
    /// `||√G(X) − √G(Y)||_F`
    pub mid: f64,
    /// `√2 · lower`
    pub upper: f64,
    /// `||G(X) − G(Y)||_T` (nuclear norm)
    pub trace_norm: f64,
}

impl GramBounds {
    pub fn sandwich_holds(&self, tol: f64) -> bool {
        self.lower <= self.mid + tol && self.mid <= self.upper + tol
    }

    pub fn trace_bound_holds(&self, tol: f64) -> bool {
        self.mid * self.mid <= self.trace_norm + tol
    }
}

/// Evaluates the Gram-matrix bounds for `X`, `Y` as given (no centralization:
/// the inequalities hold for arbitrary matrices).
pub fn gram_procrustes_bounds(x: &PointSet, y: &PointSet) -> Result<GramBounds> {
    x.check_same_shape(y)?;
    linalg::check_dim(x.dim())?;
    let (xm, ym) = (x.matrix(), y.matrix());
    let r = linalg::orthogonal_procrustes(ym, xm, false);
    let lower = (&r * xm - ym).norm();
    let mid = (linalg::sqrt_gram(xm) - linalg::sqrt_gram(ym)).norm();
    let diff = x.gram().0 - y.gram().0;
    let trace_norm = linalg::trace_norm_sym(&diff);
    let bounds = GramBounds {
        lower,
        mid,
        upper: std::f64::consts::SQRT_2 * lower,
        trace_norm,
    };
    debug_assert!(bounds.sandwich_holds(1e-8), "{bounds:?}");
    Ok(bounds)
}
