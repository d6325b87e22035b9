//! Brute-force references written against nalgebra directly, sharing no code
//! with the library's solvers.
#![allow(dead_code)]

use geolip::{PointSet, SortEmbedParams};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(d: usize, n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(d, n, |_, _| StandardNormal.sample(&mut *rng))
}

pub fn ps(m: DMatrix<f64>) -> PointSet {
    PointSet::from_matrix(m).unwrap()
}

/// Heap's algorithm.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    let mut out = vec![a.clone()];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

pub fn shuffled(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    p
}

/// Haar orthogonal matrix from the QR factorization of a Gaussian matrix,
/// flipped to the requested determinant sign.
pub fn orthogonal(d: usize, det_sign: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let qr = gaussian(d, d, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = DMatrix::from_fn(d, d, |i, j| q[(i, j)] * r[(j, j)].signum());
    if q.determinant() * det_sign < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

pub fn centered(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mean = x.column_mean();
    DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] - mean[i])
}

/// Columns of `y` reordered so that column `j` is `y_{perm[j]}`.
pub fn permute_columns(y: &DMatrix<f64>, perm: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(y.nrows(), y.ncols(), |i, j| y[(i, perm[j])])
}

/// `g·X` with `(gX)_j = R·x_{π(j)} + t`.
pub fn act(x: &DMatrix<f64>, perm: &[usize], r: &DMatrix<f64>, t: &DVector<f64>) -> DMatrix<f64> {
    let mut out = r * permute_columns(x, perm);
    for mut c in out.column_iter_mut() {
        c += t;
    }
    out
}

/// `max_R tr(Rᵀ M)` over orthogonal `R`, or over rotations when `proper`.
fn best_alignment(m: &DMatrix<f64>, proper: bool) -> f64 {
    let svd = m.clone().svd(true, true);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    if proper {
        let det = (svd.u.unwrap() * svd.v_t.unwrap()).determinant();
        if det < 0.0 {
            let k = s
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(k, _)| k)
                .unwrap();
            s[k] = -s[k];
        }
    }
    s.iter().sum()
}

/// `min_{π,R,t} ||X − R·Y_π − t||_F` by enumerating every permutation.
pub fn pm_brute(x: &DMatrix<f64>, y: &DMatrix<f64>, proper: bool) -> f64 {
    let (xc, yc) = (centered(x), centered(y));
    let base = xc.norm_squared() + yc.norm_squared();
    let best = all_permutations(x.ncols())
        .iter()
        .map(|p| best_alignment(&(&xc * permute_columns(&yc, p).transpose()), proper))
        .fold(f64::NEG_INFINITY, f64::max);
    (base - 2.0 * best).max(0.0).sqrt()
}

pub fn distances(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.ncols();
    DMatrix::from_fn(n, n, |i, j| (x.column(i) - x.column(j)).norm())
}

/// `min_π Σ_{i,j} |D_X(i,j) − D_Y(π(i),π(j))|` by enumeration.
pub fn hgw_brute(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let (dx, dy) = (distances(x), distances(y));
    let n = x.ncols();
    all_permutations(n)
        .iter()
        .map(|p| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += (dx[(i, j)] - dy[(p[i], p[j])]).abs();
                }
            }
            s
        })
        .fold(f64::INFINITY, f64::min)
}

/// `min_π max_j ||s_j − t_{π(j)}||_∞` by enumeration.
pub fn winf_brute(s: &DMatrix<f64>, t: &DMatrix<f64>) -> f64 {
    all_permutations(s.ncols())
        .iter()
        .map(|p| {
            (0..s.ncols())
                .map(|j| (s.column(j) - t.column(p[j])).amax())
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Minimum-cost assignment `i ↦ p[i]` by enumeration.
pub fn lap_brute(cost: &DMatrix<f64>) -> (Vec<usize>, f64) {
    all_permutations(cost.nrows())
        .into_iter()
        .map(|p| {
            let c = p
                .iter()
                .enumerate()
                .map(|(i, &j)| cost[(i, j)])
                .sum::<f64>();
            (p, c)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

/// `β_i(S) = ⟨b_i, sort(a_i·s_1, …, a_i·s_n)⟩` evaluated one coordinate at a
/// time from the exposed parameters.
pub fn sort_embed_hand(p: &SortEmbedParams, elems: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_fn(p.output_dim(), |i, _| {
        let a = p.direction(i);
        let mut proj: Vec<f64> = elems.column_iter().map(|s| a.dot(&s)).collect();
        proj.sort_by(f64::total_cmp);
        let b = p.coefficient(i);
        proj.iter().zip(b.iter()).map(|(u, v)| u * v).sum()
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// `||X||_{1,2}`: the largest column norm.
pub fn op_norm_12(x: &DMatrix<f64>) -> f64 {
    x.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn trace_norm(s: &DMatrix<f64>) -> f64 {
    s.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .sum()
}

/// `√(XᵀX) = V·Σ·Vᵀ` from the thin SVD `X = U·Σ·Vᵀ`.
pub fn gram_sqrt(x: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = x.clone().svd(false, true);
    let vt = svd.v_t.unwrap();
    vt.transpose() * DMatrix::from_diagonal(&svd.singular_values) * vt
}

/// `min_R ||R·X − Y||_F` over orthogonal `R`.
pub fn procrustes_brute(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let base = x.norm_squared() + y.norm_squared();
    (base - 2.0 * best_alignment(&(y * x.transpose()), false))
        .max(0.0)
        .sqrt()
}
