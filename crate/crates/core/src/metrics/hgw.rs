use nalgebra::DMatrix;

use super::{enumerate_prefixes, MetricResult, Witness};
use crate::error::{GeoError, Result};
use crate::group::Permutation;
use crate::pointset::PointSet;

/// Largest point count accepted by [`hgw_exact`].
pub const DEFAULT_HGW_CAP: usize = 8;

#[derive(Clone, Debug)]
pub struct HgwOptions {
    pub cap: usize,
    /// Branch-and-bound pruning; switch off to get plain enumeration.
    pub prune: bool,
}

impl Default for HgwOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_HGW_CAP,
            prune: true,
        }
    }
}

/// Hard-Gromov-Wasserstein distance
/// `min_π Σ_{i,j} | ||x_i − x_j|| − ||y_{π(i)} − y_{π(j)}|| |`.
pub fn hgw_exact(x: &PointSet, y: &PointSet) -> Result<MetricResult> {
    hgw_exact_with(x, y, &HgwOptions::default())
}

pub fn hgw_exact_with(x: &PointSet, y: &PointSet, opts: &HgwOptions) -> Result<MetricResult> {
    if x.count() != y.count() {
        return Err(GeoError::CountMismatch {
            expected: x.count(),
            got: y.count(),
        });
    }
    let n = x.count();
    if n > opts.cap {
        return Err(GeoError::EnumerationInfeasible {
            count: n,
            cap: opts.cap,
        });
    }
    let dx = distance_matrix(x);
    let dy = distance_matrix(y);

    let mut best = f64::INFINITY;
    let mut best_perm: Vec<usize> = Vec::new();
    // partial[k]: cost of all ordered pairs among the first k assigned rows.
    let mut partial = vec![0.0f64; n + 1];
    let mut used = vec![false; n];
    enumerate_prefixes(
        n,
        &mut Vec::with_capacity(n),
        &mut used,
        &mut |p: &[usize]| {
            let k = p.len();
            if k > 0 {
                let c = p[k - 1];
                let row = k - 1;
                let added: f64 = (0..row).map(|i| (dx[(i, row)] - dy[(p[i], c)]).abs()).sum();
                partial[k] = partial[k - 1] + 2.0 * added;
            }
            if k == n {
                let value = hgw_cost(&dx, &dy, p);
                if value < best {
                    best = value;
                    best_perm = p.to_vec();
                }
                return false;
            }
            if opts.prune && best.is_finite() {
                let bound = partial[k] + remaining_bound(&dx, &dy, p);
                // The slack absorbs rounding between the bound and the leaf sum, so a
                // pruned subtree never holds a strictly better permutation.
                if bound > best + 1e-10 * (1.0 + best) {
                    return false;
                }
            }
            true
        },
    );
    Ok(MetricResult {
        value: best,
        witness: Some(Witness::Perm(Permutation::new(best_perm)?)),
        exact: true,
    })
}

/// Cost of a specific correspondence `i ↦ perm[i]`.
pub fn hgw_value(x: &PointSet, y: &PointSet, perm: &Permutation) -> Result<f64> {
    if x.count() != y.count() || perm.len() != x.count() {
        return Err(GeoError::CountMismatch {
            expected: x.count(),
            got: y.count().min(perm.len()),
        });
    }
    Ok(hgw_cost(
        &distance_matrix(x),
        &distance_matrix(y),
        perm.as_slice(),
    ))
}

fn hgw_cost(dx: &DMatrix<f64>, dy: &DMatrix<f64>, perm: &[usize]) -> f64 {
    let n = perm.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            total += (dx[(i, j)] - dy[(perm[i], perm[j])]).abs();
        }
    }
    total
}

/// Admissible bound on the cost still to come: each unassigned row pays at
/// least its cheapest interaction with the assigned rows over free columns.
fn remaining_bound(dx: &DMatrix<f64>, dy: &DMatrix<f64>, prefix: &[usize]) -> f64 {
    let n = dx.nrows();
    let k = prefix.len();
    if k == 0 {
        return 0.0;
    }
    let mut used = vec![false; n];
    for &c in prefix {
        used[c] = true;
    }
    let mut bound = 0.0;
    for row in k..n {
        let mut cheapest = f64::INFINITY;
        for col in (0..n).filter(|&c| !used[c]) {
            let cost: f64 = (0..k)
                .map(|i| (dx[(i, row)] - dy[(prefix[i], col)]).abs())
                .sum();
            cheapest = cheapest.min(cost);
        }
        bound += 2.0 * cheapest;
    }
    bound
}

fn distance_matrix(x: &PointSet) -> DMatrix<f64> {
    let n = x.count();
    let m = x.matrix();
    DMatrix::from_fn(n, n, |i, j| (m.column(i) - m.column(j)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement;
    use crate::linalg::Orientation;
    use crate::rng::rng_from_seed;
    use crate::testutil::{gaussian_points, permutations};

    #[test]
    fn orbit_points_have_zero_distance() {
        let mut rng = rng_from_seed(1);
        for orientation in [Orientation::Proper, Orientation::Improper] {
            let x = gaussian_points(3, 6, &mut rng);
            let y = GroupElement::random(3, 6, orientation, &mut rng)
                .apply(&x)
                .unwrap();
            assert!(hgw_exact(&x, &y).unwrap().value < 1e-9);
        }
    }

    #[test]
    fn two_points_by_hand() {
        let x = PointSet::from_points(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        let y = PointSet::from_points(&[vec![1.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let r = hgw_exact(&x, &y).unwrap();
        assert!((r.value - 2.0 * (5.0 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn pruning_agrees_with_unpruned_enumeration_and_brute_force() {
        let mut rng = rng_from_seed(2);
        for n in 3..=6 {
            for _ in 0..4 {
                let x = gaussian_points(2, n, &mut rng);
                let y = gaussian_points(2, n, &mut rng);
                let pruned = hgw_exact(&x, &y).unwrap();
                let plain = hgw_exact_with(
                    &x,
                    &y,
                    &HgwOptions {
                        prune: false,
                        ..Default::default()
                    },
                )
                .unwrap();
                assert_eq!(pruned.value, plain.value);
                assert_eq!(pruned.witness, plain.witness);
                let oracle = permutations(n)
                    .map(|p| hgw_value(&x, &y, &Permutation::new(p).unwrap()).unwrap())
                    .fold(f64::INFINITY, f64::min);
                assert!((pruned.value - oracle).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let mut rng = rng_from_seed(3);
        let x = gaussian_points(2, 9, &mut rng);
        assert!(matches!(
            hgw_exact(&x, &x),
            Err(GeoError::EnumerationInfeasible { count: 9, cap: 8 })
        ));
    }
}
