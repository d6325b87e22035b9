use super::{MetricResult, Witness};
use crate::assignment::perfect_matching;
use crate::embeddings::MultiSet;
use crate::error::{GeoError, Result};
use crate::group::Permutation;

/// ∞-Wasserstein distance `min_τ max_i ||s_i − t_{τ(i)}||_∞` between
/// multisets of equal cardinality, solved as a bottleneck assignment: binary
/// search over the sorted candidate distances with a perfect-matching test.
pub fn wass_inf(s: &MultiSet, t: &MultiSet) -> Result<MetricResult> {
    if s.len() != t.len() {
        return Err(GeoError::CountMismatch {
            expected: s.len(),
            got: t.len(),
        });
    }
    if !s.is_empty() && s.elem_dim() != t.elem_dim() {
        return Err(GeoError::DimensionMismatch {
            expected: s.elem_dim(),
            got: t.elem_dim(),
        });
    }
    let n = s.len();
    if n == 0 {
        return Ok(MetricResult {
            value: 0.0,
            witness: Some(Witness::Perm(Permutation::identity(0))),
            exact: true,
        });
    }
    let dist: Vec<Vec<f64>> = s
        .elements()
        .iter()
        .map(|a| t.elements().iter().map(|b| sup_distance(a, b)).collect())
        .collect();
    let mut candidates: Vec<f64> = dist.iter().flatten().copied().collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // Smallest threshold admitting a perfect matching; the largest always does.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        let thr = candidates[mid];
        if perfect_matching(n, |i, j| dist[i][j] <= thr).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let thr = candidates[lo];
    let assign = perfect_matching(n, |i, j| dist[i][j] <= thr).expect("feasible threshold");
    Ok(MetricResult {
        value: thr,
        witness: Some(Witness::Perm(Permutation::new(assign)?)),
        exact: true,
    })
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
