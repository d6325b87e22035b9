//! Point-cloud correspondence from invariant node features: entropic
//! (Sinkhorn) relaxation, per-row argmax rounding and accuracy scoring.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::group::Permutation;
use crate::models::{node_features, BiLipConfig};
use crate::pointset::PointSet;

/// Largest allowed deviation of a row or column sum from 1.
pub const MARGINAL_TOL: f64 = 1e-6;

const ANNEAL_FACTOR: f64 = 0.5;
const ANNEAL_SWEEPS: usize = 20;
/// Sweeps at the target regularization before Newton steps are tried.
const PLAIN_SWEEPS: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct DoublyStochastic {
    pub q: DMatrix<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Largest deviation of a row or column sum from 1.
    pub marginal_error: f64,
}

fn logsumexp(vals: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = vals.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + vals.map(|v| (v - max).exp()).sum::<f64>().ln()
}

fn marginal_error(q: &DMatrix<f64>) -> f64 {
    let rows = q.row_iter().map(|r| (r.sum() - 1.0).abs());
    let cols = q.column_iter().map(|c| (c.sum() - 1.0).abs());
    rows.chain(cols).fold(0.0, f64::max)
}

/// One Sinkhorn sweep on log potentials; returns the largest row-marginal
/// error (columns are exact after the `g` update).
fn sweep(logk: &DMatrix<f64>, f: &mut DVector<f64>, g: &mut DVector<f64>) -> f64 {
    let n = logk.nrows();
    for i in 0..n {
        f[i] = -logsumexp((0..n).map(|j| logk[(i, j)] + g[j]));
    }
    for j in 0..n {
        g[j] = -logsumexp((0..n).map(|i| logk[(i, j)] + f[i]));
    }
    row_error(logk, f, g)
}

fn row_error(logk: &DMatrix<f64>, f: &DVector<f64>, g: &DVector<f64>) -> f64 {
    let n = logk.nrows();
    (0..n)
        .map(|i| {
            (logsumexp((0..n).map(|j| logk[(i, j)] + g[j])) + f[i])
                .exp_m1()
                .abs()
        })
        .fold(0.0, f64::max)
}

fn plan(logk: &DMatrix<f64>, f: &DVector<f64>, g: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(logk.nrows(), logk.ncols(), |i, j| {
        (logk[(i, j)] + f[i] + g[j]).exp()
    })
}

/// Concave dual `Σf + Σg − Σ exp(logK + f + g)` of the entropic problem.
fn dual(logk: &DMatrix<f64>, f: &DVector<f64>, g: &DVector<f64>) -> f64 {
    f.sum() + g.sum() - plan(logk, f, g).sum()
}

/// Damped Newton step on the dual. Returns `false` when no ascent was found.
fn newton_step(logk: &DMatrix<f64>, f: &mut DVector<f64>, g: &mut DVector<f64>) -> bool {
    let n = logk.nrows();
    let q = plan(logk, f, g);
    let rows = q.column_sum();
    let cols = q.row_sum().transpose();
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    let mut grad = DVector::zeros(2 * n);
    for i in 0..n {
        h[(i, i)] = rows[i];
        h[(n + i, n + i)] = cols[i];
        grad[i] = 1.0 - rows[i];
        grad[n + i] = 1.0 - cols[i];
        for j in 0..n {
            h[(i, n + j)] = q[(i, j)];
            h[(n + j, i)] = q[(i, j)];
        }
    }
    // (1, −1) spans the kernel; a small ridge makes the system definite.
    let ridge = 1e-12 * h.diagonal().amax().max(1.0);
    for k in 0..2 * n {
        h[(k, k)] += ridge;
    }
    let Some(step) = h.cholesky().map(|c| c.solve(&grad)) else {
        return false;
    };
    let base = dual(logk, f, g);
    let slope = grad.dot(&step);
    let mut alpha = 1.0;
    for _ in 0..40 {
        let nf = &*f + step.rows(0, n) * alpha;
        let ng = &*g + step.rows(n, n) * alpha;
        if dual(logk, &nf, &ng) >= base + 1e-4 * alpha * slope {
            *f = nf;
            *g = ng;
            return true;
        }
        alpha *= 0.5;
    }
    false
}

/// Scales `exp(−cost/reg)` to a doubly-stochastic matrix, working with log
/// potentials so large costs do not underflow.
///
/// The regularization is first annealed geometrically from the cost range
/// down to `reg` with warm-started potentials. At `reg`, plain sweeps run
/// first; if they stall, damped Newton steps on the same dual take over.
/// Each sweep or Newton step at `reg` counts as one iteration. Stops once
/// every marginal is within `tol` of 1, or after `max_iter` iterations with
/// `converged = false`.
pub fn sinkhorn(
    cost: &DMatrix<f64>,
    reg: f64,
    max_iter: usize,
    tol: f64,
) -> Result<DoublyStochastic> {
    let n = cost.nrows();
    if n == 0 || cost.ncols() != n {
        return Err(GeoError::InvalidArgument(
            "cost must be a non-empty square matrix".into(),
        ));
    }
    if !(reg > 0.0 && reg.is_finite()) {
        return Err(GeoError::InvalidArgument("reg must be positive".into()));
    }
    if let Some(i) = cost.iter().position(|v| !v.is_finite()) {
        return Err(GeoError::NonFinite(i));
    }
    let mut f = DVector::<f64>::zeros(n);
    let mut g = DVector::<f64>::zeros(n);
    let range = cost.max() - cost.min();
    let mut eps = range.max(reg);
    while eps > reg {
        let scaled = cost.map(|c| -c / eps);
        for _ in 0..ANNEAL_SWEEPS {
            sweep(&scaled, &mut f, &mut g);
        }
        // Potentials are in units of eps; rescale for the next level.
        let next = (eps * ANNEAL_FACTOR).max(reg);
        f *= eps / next;
        g *= eps / next;
        eps = next;
    }
    let logk = cost.map(|c| -c / reg);
    let mut iterations = 0;
    let mut err = f64::INFINITY;
    while iterations < max_iter {
        iterations += 1;
        if iterations > PLAIN_SWEEPS && newton_step(&logk, &mut f, &mut g) {
            // Restore exact columns so the error check below stays one-sided.
            for j in 0..n {
                g[j] = -logsumexp((0..n).map(|i| logk[(i, j)] + f[i]));
            }
            err = row_error(&logk, &f, &g);
        } else {
            err = sweep(&logk, &mut f, &mut g);
        }
        if err < tol {
            break;
        }
    }
    let q = plan(&logk, &f, &g);
    let marginal_error = marginal_error(&q);
    Ok(DoublyStochastic {
        q,
        iterations,
        converged: err < tol,
        marginal_error,
    })
}

/// Row-wise argmax; ties go to the smallest column index.
pub fn round_rows(q: &DMatrix<f64>) -> Vec<usize> {
    q.row_iter()
        .map(|r| {
            let mut best = 0;
            for j in 1..r.len() {
                if r[j] > r[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchOptions {
    pub reg: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            reg: 0.05,
            max_iter: 1000,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    /// Row `i` of `X` is matched to point `assignment[i]` of `Y`.
    pub assignment: Vec<usize>,
    pub is_permutation: bool,
    /// Fraction of rows with `truth[assignment[i]] == i`, when truth is known.
    pub accuracy: Option<f64>,
    pub sinkhorn_iterations: usize,
    pub converged: bool,
}

/// Fraction of rows matched correctly, where `truth` maps `Y` indices to `X`
/// indices.
pub fn accuracy(assignment: &[usize], truth: &Permutation) -> f64 {
    let correct = assignment
        .iter()
        .enumerate()
        .filter(|&(i, &j)| truth.get(j) == i)
        .count();
    correct as f64 / assignment.len() as f64
}

/// Matches the points of `X` to those of `Y` through the cost
/// `||h_i(X) − h_j(Y)||` between invariant node features.
pub fn match_pair(
    x: &PointSet,
    y: &PointSet,
    cfg: &BiLipConfig,
    opts: &MatchOptions,
    truth: Option<&Permutation>,
) -> Result<MatchResult> {
    x.check_same_shape(y)?;
    if let Some(t) = truth {
        if t.len() != x.count() {
            return Err(GeoError::CountMismatch {
                expected: x.count(),
                got: t.len(),
            });
        }
    }
    let hx = node_features(x, cfg)?;
    let hy = node_features(y, cfg)?;
    let n = x.count();
    let cost = DMatrix::from_fn(n, n, |i, j| (&hx.features[i] - &hy.features[j]).norm());
    let ds = sinkhorn(&cost, opts.reg, opts.max_iter, opts.tol)?;
    let assignment = round_rows(&ds.q);
    let mut seen = vec![false; n];
    let is_permutation = assignment
        .iter()
        .all(|&j| !std::mem::replace(&mut seen[j], true));
    Ok(MatchResult {
        accuracy: truth.map(|t| accuracy(&assignment, t)),
        assignment,
        is_permutation,
        sinkhorn_iterations: ds.iterations,
        converged: ds.converged,
    })
}
