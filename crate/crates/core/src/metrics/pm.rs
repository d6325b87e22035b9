use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{enumerate_prefixes, MetricResult, Witness};
use crate::assignment::hungarian;
use crate::error::{GeoError, Result};
use crate::group::{GroupElement, Permutation};
use crate::linalg::{self, Orientation};
use crate::pointset::PointSet;
use crate::rng::substream;

/// Largest point count accepted by [`pm_exact`].
pub const DEFAULT_PM_CAP: usize = 9;

/// Exact Procrustes-Matching distance `min_{g ∈ G±} ||X − gY||_F`
/// (`G+` when `proper`), by enumerating permutations and solving the
/// rotation in closed form for each.
pub fn pm_exact(x: &PointSet, y: &PointSet, proper: bool) -> Result<MetricResult> {
    pm_exact_with_cap(x, y, proper, DEFAULT_PM_CAP)
}

pub fn pm_exact_with_cap(
    x: &PointSet,
    y: &PointSet,
    proper: bool,
    cap: usize,
) -> Result<MetricResult> {
    x.check_same_shape(y)?;
    linalg::check_dim(x.dim())?;
    let n = x.count();
    if n > cap {
        return Err(GeoError::EnumerationInfeasible { count: n, cap });
    }
    let a = x.centralize();
    let b = y.centralize();
    let am = a.matrix();
    let bm = b.matrix();
    let d = x.dim();

    // Each first assignment is an independent subtree; the reduction keeps
    // the first (lexicographically smallest) permutation among equal scores.
    let best = (0..n)
        .into_par_iter()
        .map(|first| best_in_subtree(am, bm, d, first, proper))
        .reduce_with(|l, r| if r.0 > l.0 { r } else { l })
        .expect("n >= 1");

    let perm = Permutation::new(best.1)?;
    let b_perm = perm.apply(&b)?;
    let rot = linalg::orthogonal_procrustes(am, b_perm.matrix(), proper);
    let value = (am - &rot * b_perm.matrix()).norm();
    let trans = x.mean() - &rot * y.mean();
    let proper_flag = rot.determinant() > 0.0;
    Ok(MetricResult {
        value,
        witness: Some(Witness::Group(GroupElement {
            perm,
            rot,
            trans,
            proper: proper_flag,
        })),
        exact: true,
    })
}

fn best_in_subtree(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    d: usize,
    first: usize,
    proper: bool,
) -> (f64, Vec<usize>) {
    let n = a.ncols();
    // stack[k] holds Σ_{j<k} a_j b_{π(j)}ᵀ
    let mut stack = vec![DMatrix::<f64>::zeros(d, d); n + 1];
    let mut best_score = f64::NEG_INFINITY;
    let mut best_perm = Vec::new();
    let mut used = vec![false; n];
    used[first] = true;
    let mut prefix = vec![first];
    stack[1] = a.column(0) * b.column(first).transpose();
    enumerate_prefixes(n, &mut prefix, &mut used, &mut |p: &[usize]| {
        let k = p.len();
        if k > 1 {
            let (lo, hi) = stack.split_at_mut(k);
            hi[0].copy_from(&lo[k - 1]);
            hi[0].ger(1.0, &a.column(k - 1), &b.column(p[k - 1]), 1.0);
        }
        if k == n {
            let score = linalg::procrustes_score(&stack[n], proper);
            if score > best_score {
                best_score = score;
                best_perm = p.to_vec();
            }
        }
        true
    });
    (best_score, best_perm)
}

/// Settings for the alternating (ICP-style) Procrustes-Matching heuristic.
#[derive(Clone, Debug)]
pub struct HeuristicOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Stop once an iteration improves the squared objective by less than this.
    pub tol: f64,
}

impl Default for HeuristicOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 0,
            max_iters: 1000,
            tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HeuristicOutcome {
    pub result: MetricResult,
    /// Squared objective after each iteration of the winning restart.
    pub objective_log: Vec<f64>,
    /// Final value of every restart, in order.
    pub restart_values: Vec<f64>,
}

/// Objective, assignment, rotation and descent trace of one restart.
type Candidate = (f64, Vec<usize>, DMatrix<f64>, Vec<f64>);

/// Upper bound on the Procrustes-Matching distance by alternating optimal
/// assignment (Hungarian) and optimal rotation (Procrustes). Restart 0 starts
/// from the identity rotation, the others from seeded random rotations.
pub fn pm_heuristic(
    x: &PointSet,
    y: &PointSet,
    proper: bool,
    opts: &HeuristicOptions,
) -> Result<HeuristicOutcome> {
    x.check_same_shape(y)?;
    linalg::check_dim(x.dim())?;
    let restarts = opts.restarts.max(1);
    let a = x.centralize();
    let b = y.centralize();
    let d = x.dim();
    let n = x.count();
    let orientation = if proper {
        Orientation::Proper
    } else {
        Orientation::Any
    };

    let mut best: Option<Candidate> = None;
    let mut restart_values = Vec::with_capacity(restarts);
    for r in 0..restarts {
        let mut rot = if r == 0 {
            DMatrix::identity(d, d)
        } else {
            linalg::random_orthogonal(d, orientation, &mut substream(opts.seed, r as u64))
        };
        let mut log = Vec::new();
        let mut assign = Vec::new();
        let mut prev = f64::INFINITY;
        for _ in 0..opts.max_iters {
            let rb = &rot * b.matrix();
            let cost = DMatrix::from_fn(n, n, |j, k| {
                (a.matrix().column(j) - rb.column(k)).norm_squared()
            });
            assign = hungarian(&cost).0;
            let b_perm = Permutation::new(assign.clone())?.apply(&b)?;
            rot = linalg::orthogonal_procrustes(a.matrix(), b_perm.matrix(), proper);
            let obj = (a.matrix() - &rot * b_perm.matrix()).norm_squared();
            log.push(obj);
            if prev - obj < opts.tol {
                break;
            }
            prev = obj;
        }
        let value = log.last().copied().unwrap_or(f64::INFINITY);
        restart_values.push(value.sqrt());
        if best.as_ref().is_none_or(|(v, ..)| value < *v) {
            best = Some((value, assign, rot, log));
        }
    }
    let (obj, assign, rot, log) = best.expect("at least one restart");
    let trans = x.mean() - &rot * y.mean();
    let proper_flag = rot.determinant() > 0.0;
    Ok(HeuristicOutcome {
        result: MetricResult {
            value: obj.max(0.0).sqrt(),
            witness: Some(Witness::Group(GroupElement {
                perm: Permutation::new(assign)?,
                rot,
                trans,
                proper: proper_flag,
            })),
            exact: false,
        },
        objective_log: log,
        restart_values,
    })
}
