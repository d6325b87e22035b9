//! Homogeneous multiset embeddings.
//!
//! The sort embedding projects every element onto `m` random unit directions
//! `a_i`, sorts each projection list and takes its inner product with a
//! random coefficient vector `b_i`:
//!
//! ```text
//! β_i(S) = ⟨b_i, sort(a_i·s_1, …, a_i·s_n)⟩
//! ```
//!
//! It is permutation invariant, positively homogeneous and, for generic
//! parameters with `m ≥ (2n − 1)k`, bi-Lipschitz with respect to the
//! ∞-Wasserstein distance.

use nalgebra::{DMatrix, DVector, DVectorView};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::metrics::wass_inf;
use crate::rng::{derive_seed, rng_from_seed, substream};

/// Unordered collection of `k`-vectors.
#[derive(Clone, Debug)]
pub struct MultiSet {
    k: usize,
    elems: Vec<Vec<f64>>,
}

impl MultiSet {
    pub fn new(elems: Vec<Vec<f64>>) -> Result<Self> {
        let k = elems.first().map_or(0, Vec::len);
        Self::with_dim(k, elems)
    }

    /// Like [`MultiSet::new`] but keeps the element dimension for empty sets.
    pub fn with_dim(k: usize, elems: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(bad) = elems.iter().find(|e| e.len() != k) {
            return Err(GeoError::DimensionMismatch {
                expected: k,
                got: bad.len(),
            });
        }
        if elems.iter().flatten().any(|v| !v.is_finite()) {
            return Err(GeoError::InvalidArgument(
                "multiset entries must be finite".into(),
            ));
        }
        Ok(Self { k, elems })
    }

    /// Columns of a `k × n` matrix as a multiset.
    pub fn from_columns(m: &DMatrix<f64>) -> Result<Self> {
        Self::with_dim(
            m.nrows(),
            m.column_iter()
                .map(|c| c.iter().copied().collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elem_dim(&self) -> usize {
        self.k
    }

    pub fn elements(&self) -> &[Vec<f64>] {
        &self.elems
    }

    /// `k × n` matrix with the elements as columns (in stored order).
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.k, self.elems.len(), |i, j| self.elems[j][i])
    }

    pub fn scaled(&self, t: f64) -> MultiSet {
        MultiSet {
            k: self.k,
            elems: self
                .elems
                .iter()
                .map(|e| e.iter().map(|v| v * t).collect())
                .collect(),
        }
    }

    /// Elements in lexicographic order; equal multisets give equal output.
    pub fn canonical(&self) -> Vec<Vec<f64>> {
        let mut v = self.elems.clone();
        v.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        v
    }
}

impl PartialEq for MultiSet {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.canonical() == other.canonical()
    }
}

/// Default output dimension `(2n − 1)·k`.
pub fn default_output_dim(n: usize, k: usize) -> usize {
    ((2 * n).saturating_sub(1) * k).max(1)
}

/// Parameters of the sort embedding. Only `(seed, m, n, k)` are stored; the
/// directions and coefficients are regenerated from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SortEmbedSpec", into = "SortEmbedSpec")]
pub struct SortEmbedParams {
    seed: u64,
    n: usize,
    k: usize,
    /// `k × m`, column `i` is the unit direction `a_i`.
    directions: DMatrix<f64>,
    /// `n × m`, column `i` is the weight vector `b_i`.
    coefficients: DMatrix<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortEmbedSpec {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub k: usize,
}

impl From<SortEmbedParams> for SortEmbedSpec {
    fn from(p: SortEmbedParams) -> Self {
        p.spec()
    }
}

impl TryFrom<SortEmbedSpec> for SortEmbedParams {
    type Error = GeoError;
    fn try_from(s: SortEmbedSpec) -> Result<Self> {
        SortEmbedParams::new(s.seed, s.m, s.n, s.k)
    }
}

impl SortEmbedParams {
    /// Seeded parameters: `a_i` uniform on the unit sphere of `R^k`, `b_i`
    /// with independent standard normal entries.
    pub fn new(seed: u64, m: usize, n: usize, k: usize) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(GeoError::InvalidArgument(
                "sort embedding needs m ≥ 1 and k ≥ 1".into(),
            ));
        }
        let shape_tag = derive_seed(derive_seed(m as u64, n as u64), k as u64);
        let mut rng = rng_from_seed(derive_seed(seed, shape_tag));
        let mut directions = DMatrix::zeros(m, k);
        for i in 0..m {
            loop {
                let v: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-6 {
                    for (c, x) in v.iter().enumerate() {
                        directions[(i, c)] = x / norm;
                    }
                    break;
                }
            }
        }
        let coefficients = DMatrix::from_fn(m, n, |_, _| StandardNormal.sample(&mut rng));
        Ok(Self {
            seed,
            n,
            k,
            directions: directions.transpose(),
            coefficients: coefficients.transpose(),
        })
    }

    /// Parameters with the default output dimension `(2n − 1)·k`.
    pub fn with_default_dim(seed: u64, n: usize, k: usize) -> Result<Self> {
        Self::new(seed, default_output_dim(n, k), n, k)
    }

    pub fn spec(&self) -> SortEmbedSpec {
        SortEmbedSpec {
            seed: self.seed,
            m: self.output_dim(),
            n: self.n,
            k: self.k,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn output_dim(&self) -> usize {
        self.directions.ncols()
    }

    pub fn cardinality(&self) -> usize {
        self.n
    }

    pub fn elem_dim(&self) -> usize {
        self.k
    }

    /// `a_i`, a unit vector in `R^k`.
    pub fn direction(&self, i: usize) -> DVectorView<'_, f64> {
        self.directions.column(i)
    }

    /// `b_i`, the weights of the sorted projections.
    pub fn coefficient(&self, i: usize) -> DVectorView<'_, f64> {
        self.coefficients.column(i)
    }

    /// `max_i ||b_i||_1 · ||a_i||_1`, an upper Lipschitz constant of the
    /// embedding from `W∞` to the sup norm.
    pub fn lipschitz_upper(&self) -> f64 {
        (0..self.output_dim())
            .map(|i| {
                let b: f64 = self.coefficients.column(i).iter().map(|v| v.abs()).sum();
                let a: f64 = self.directions.column(i).iter().map(|v| v.abs()).sum();
                a * b
            })
            .fold(0.0, f64::max)
    }

    fn check_shape(&self, k: usize, n: usize) -> Result<()> {
        if k != self.k {
            return Err(GeoError::DimensionMismatch {
                expected: self.k,
                got: k,
            });
        }
        if n != self.n {
            return Err(GeoError::CountMismatch {
                expected: self.n,
                got: n,
            });
        }
        Ok(())
    }

    /// Embeds the columns of a `k × n` matrix, treated as a multiset.
    pub fn embed_columns(&self, elems: &DMatrix<f64>) -> Result<DVector<f64>> {
        self.check_shape(elems.nrows(), elems.ncols())?;
        // Entry (j, i) is ⟨a_i, s_j⟩ summed over c in a fixed order, so the
        // result does not depend on the position of s_j.
        let proj = elems.tr_mul(&self.directions);
        let mut out = DVector::zeros(self.output_dim());
        let mut buf = vec![0.0f64; self.n];
        for (i, o) in out.iter_mut().enumerate() {
            buf.copy_from_slice(proj.column(i).as_slice());
            buf.sort_unstable_by(f64::total_cmp);
            let b = self.coefficients.column(i);
            let mut acc = 0.0;
            for (j, p) in buf.iter().enumerate() {
                acc += b[j] * p;
            }
            *o = acc;
        }
        Ok(out)
    }
}

/// `β(S)`.
pub fn sort_embed(s: &MultiSet, p: &SortEmbedParams) -> Result<DVector<f64>> {
    p.check_shape(s.elem_dim(), s.len())?;
    p.embed_columns(&s.to_matrix())
}

/// `ψ(v, S) = (v, β(S))`.
pub fn pair_embed(v: &DVector<f64>, s: &MultiSet, p: &SortEmbedParams) -> Result<DVector<f64>> {
    let beta = sort_embed(s, p)?;
    Ok(concat(v, &beta))
}

pub(crate) fn concat(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// Empirical distortion of the sort embedding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiLipEstimate {
    pub c_low: f64,
    pub c_high: f64,
    pub pairs_used: usize,
    pub pairs_skipped: usize,
}

/// Samples `trials` multiset pairs and reports the extreme ratios
/// `||β(S) − β(S')||_∞ / W∞(S, S')`. Half the pairs are independent, half are
/// permuted small perturbations of each other (scales down to `1e-3`), which
/// probes the local lower bound. Pairs with `W∞ < 1e-12` are skipped.
pub fn estimate_bilip(p: &SortEmbedParams, trials: usize, seed: u64) -> Result<BiLipEstimate> {
    if trials < 2 {
        return Err(GeoError::InvalidArgument(
            "estimate_bilip needs at least 2 trials".into(),
        ));
    }
    let (n, k) = (p.cardinality(), p.elem_dim());
    let mut c_low = f64::INFINITY;
    let mut c_high: f64 = 0.0;
    let mut used = 0;
    let mut skipped = 0;
    for t in 0..trials {
        let mut rng = substream(seed, t as u64);
        let s = DMatrix::from_fn(k, n, |_, _| StandardNormal.sample(&mut rng));
        let other = if t % 2 == 0 {
            DMatrix::from_fn(k, n, |_, _| StandardNormal.sample(&mut rng))
        } else {
            let scale = 10f64.powf(rng.random_range(-3.0..0.0));
            let mut o = &s
                + DMatrix::from_fn(k, n, |_, _| {
                    scale * {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        z
                    }
                });
            let perm = crate::group::Permutation::random(n, &mut rng);
            o = DMatrix::from_fn(k, n, |i, j| o[(i, perm.get(j))]);
            o
        };
        match pair_ratio(p, &s, &other)? {
            Some(ratio) => {
                c_low = c_low.min(ratio);
                c_high = c_high.max(ratio);
                used += 1;
            }
            None => skipped += 1,
        }
    }
    if used == 0 {
        return Err(GeoError::SamplerExhausted { attempts: trials });
    }
    Ok(BiLipEstimate {
        c_low,
        c_high,
        pairs_used: used,
        pairs_skipped: skipped,
    })
}

/// `||β(S) − β(S')||_∞ / W∞(S, S')`, or `None` when `W∞ < 1e-12`.
fn pair_ratio(p: &SortEmbedParams, s: &DMatrix<f64>, t: &DMatrix<f64>) -> Result<Option<f64>> {
    let w = wass_inf(&MultiSet::from_columns(s)?, &MultiSet::from_columns(t)?)?.value;
    if w < 1e-12 {
        return Ok(None);
    }
    let diff = (p.embed_columns(s)? - p.embed_columns(t)?).amax();
    Ok(Some(diff / w))
}
