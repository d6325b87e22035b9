//! Symmetry-aware distances between point sets and between multisets.
//!
//! * [`pm_exact`] / [`pm_heuristic`]: the Procrustes-Matching distance
//!   `min_g ||X − gY||_F` over permutations and rigid motions.
//! * [`hgw_exact`]: the Hard-Gromov-Wasserstein distance comparing pairwise
//!   distance matrices up to a permutation.
//! * [`wass_inf`]: the ∞-Wasserstein distance between multisets.
//! * [`gram_procrustes_bounds`]: the Gram-matrix sandwich around the
//!   orthogonal Procrustes distance.
//!
//! All point-set metrics centralize internally and never mutate inputs.

mod gram;
mod hgw;
mod pm;
mod wass;

pub use gram::{gram_procrustes_bounds, GramBounds};
pub use hgw::{hgw_exact, hgw_exact_with, hgw_value, HgwOptions, DEFAULT_HGW_CAP};
pub use pm::{
    pm_exact, pm_exact_with_cap, pm_heuristic, HeuristicOptions, HeuristicOutcome, DEFAULT_PM_CAP,
};
pub use wass::wass_inf;

use crate::group::{GroupElement, Permutation};

/// What achieves a metric value.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// A full group element `g` with `gY ≈ X`.
    Group(GroupElement),
    /// A bare permutation (Hard-GW, W∞).
    Perm(Permutation),
}

impl Witness {
    pub fn perm(&self) -> &Permutation {
        match self {
            Witness::Group(g) => &g.perm,
            Witness::Perm(p) => p,
        }
    }
}

/// Value of a metric with the element that attains it.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricResult {
    pub value: f64,
    pub witness: Option<Witness>,
    /// The value is a certified global optimum.
    pub exact: bool,
}

/// Lexicographic depth-first enumeration of all permutations of `0..n` with
/// an optional subtree filter. `visit` is called at every internal node and
/// leaf with the current prefix; returning `false` skips the subtree.
pub(crate) fn enumerate_prefixes(
    n: usize,
    prefix: &mut Vec<usize>,
    used: &mut [bool],
    visit: &mut dyn FnMut(&[usize]) -> bool,
) {
    if !visit(prefix) || prefix.len() == n {
        return;
    }
    for c in 0..n {
        if used[c] {
            continue;
        }
        used[c] = true;
        prefix.push(c);
        enumerate_prefixes(n, prefix, used, visit);
        prefix.pop();
        used[c] = false;
    }
}
