use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::NodeFeatures;
use crate::embeddings::{concat, default_output_dim, SortEmbedParams};
use crate::error::{GeoError, Result};
use crate::linalg::generalized_cross;
use crate::pointset::PointSet;
use crate::rng::derive_seed;

/// Largest ambient dimension accepted by the tuple models.
pub const MAX_CROSS_DIM: usize = 6;

/// Serialized form of a [`BiLipConfig`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiLipSpec {
    pub dim: usize,
    pub n: usize,
    pub seed: u64,
    pub psi_m: usize,
    pub phi_m: usize,
    pub omega_c: f64,
}

/// Parameters of the bi-Lipschitz models for `n` points in `R^d`.
///
/// `psi` embeds the message multiset of each (d−1)-tuple, `phi` embeds the
/// multiset of tuple features. `phi` is large for big `n` and is only built
/// when a global output is requested.
#[derive(Clone, Debug)]
pub struct BiLipConfig {
    spec: BiLipSpec,
    psi: SortEmbedParams,
    phi: OnceLock<SortEmbedParams>,
    pool: OnceLock<SortEmbedParams>,
}

impl BiLipConfig {
    /// Config with default embedding widths and `omega_c = 0.1`.
    pub fn new(dim: usize, n: usize, seed: u64) -> Result<Self> {
        if !(2..=MAX_CROSS_DIM).contains(&dim) {
            return Err(GeoError::DimensionTooLarge(dim, MAX_CROSS_DIM));
        }
        if n < dim {
            return Err(GeoError::TooFewPoints {
                needed: dim,
                got: n,
            });
        }
        let psi_m = default_output_dim(n - dim + 1, dim + 1);
        let feature_dim = (dim - 1) * (dim - 1) + psi_m;
        let phi_m = default_output_dim(tuple_count(n, dim - 1), feature_dim);
        Self::from_spec(BiLipSpec {
            dim,
            n,
            seed,
            psi_m,
            phi_m,
            omega_c: 0.1,
        })
    }

    pub fn from_spec(spec: BiLipSpec) -> Result<Self> {
        let BiLipSpec { dim, n, .. } = spec;
        if !(2..=MAX_CROSS_DIM).contains(&dim) {
            return Err(GeoError::DimensionTooLarge(dim, MAX_CROSS_DIM));
        }
        if n < dim {
            return Err(GeoError::TooFewPoints {
                needed: dim,
                got: n,
            });
        }
        if !(spec.omega_c > 0.0 && spec.omega_c.is_finite()) {
            return Err(GeoError::InvalidArgument("omega_c must be positive".into()));
        }
        if spec.phi_m == 0 {
            return Err(GeoError::InvalidArgument("phi needs m ≥ 1".into()));
        }
        let psi =
            SortEmbedParams::new(derive_seed(spec.seed, 1), spec.psi_m, n - dim + 1, dim + 1)?;
        Ok(Self {
            spec,
            psi,
            phi: OnceLock::new(),
            pool: OnceLock::new(),
        })
    }

    pub fn with_omega_c(mut self, c: f64) -> Result<Self> {
        self.spec.omega_c = c;
        Self::from_spec(self.spec)
    }

    pub fn with_phi_dim(mut self, m: usize) -> Result<Self> {
        self.spec.phi_m = m;
        Self::from_spec(self.spec)
    }

    pub fn spec(&self) -> BiLipSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn count(&self) -> usize {
        self.spec.n
    }

    pub fn omega_c(&self) -> f64 {
        self.spec.omega_c
    }

    pub fn psi(&self) -> &SortEmbedParams {
        &self.psi
    }

    /// Length of one tuple feature `h`.
    pub fn feature_dim(&self) -> usize {
        let d = self.spec.dim;
        (d - 1) * (d - 1) + self.psi.output_dim()
    }

    pub fn phi(&self) -> &SortEmbedParams {
        self.phi.get_or_init(|| {
            SortEmbedParams::new(
                derive_seed(self.spec.seed, 2),
                self.spec.phi_m,
                tuple_count(self.spec.n, self.spec.dim - 1),
                self.feature_dim(),
            )
            .expect("validated shape")
        })
    }

    fn pool(&self) -> &SortEmbedParams {
        self.pool.get_or_init(|| {
            let per_node = tuple_count(self.spec.n - 1, self.spec.dim - 2);
            SortEmbedParams::with_default_dim(
                derive_seed(self.spec.seed, 3),
                per_node,
                self.feature_dim(),
            )
            .expect("validated shape")
        })
    }

    pub fn output_dim(&self) -> usize {
        self.spec.phi_m
    }

    fn check_input(&self, x: &PointSet) -> Result<()> {
        if x.dim() != self.spec.dim {
            return Err(GeoError::DimensionMismatch {
                expected: self.spec.dim,
                got: x.dim(),
            });
        }
        if x.count() != self.spec.n {
            return Err(GeoError::CountMismatch {
                expected: self.spec.n,
                got: x.count(),
            });
        }
        Ok(())
    }
}

/// Number of ordered `r`-tuples of distinct indices from `0..n`.
fn tuple_count(n: usize, r: usize) -> usize {
    (0..r).map(|i| n - i).product()
}

/// All ordered `r`-tuples of distinct indices from `0..n`, lexicographic.
pub fn ordered_tuples(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, r: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, r, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(
        n,
        r,
        &mut Vec::with_capacity(r),
        &mut vec![false; n],
        &mut out,
    );
    out
}

fn ascending_tuples(n: usize, r: usize) -> Vec<Vec<usize>> {
    ordered_tuples(n, r)
        .into_iter()
        .filter(|t| t.windows(2).all(|w| w[0] < w[1]))
        .collect()
}

fn dot_cols(m: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    let mut acc = 0.0;
    for r in 0..m.nrows() {
        acc += m[(r, i)] * m[(r, j)];
    }
    acc
}

fn dot_vec(z: &DVector<f64>, m: &DMatrix<f64>, j: usize) -> f64 {
    let mut acc = 0.0;
    for r in 0..m.nrows() {
        acc += z[r] * m[(r, j)];
    }
    acc
}

/// Centralized input with its inner products and norms.
struct Prepared {
    x: DMatrix<f64>,
    dots: DMatrix<f64>,
    norms: Vec<f64>,
    frob: f64,
}

fn prepare(x: &PointSet) -> Prepared {
    let x = x.centralize().into_matrix();
    let n = x.ncols();
    let dots = DMatrix::from_fn(n, n, |i, j| dot_cols(&x, i, j));
    let norms = (0..n).map(|i| dots[(i, i)].sqrt()).collect();
    let frob = x.norm();
    Prepared {
        x,
        dots,
        norms,
        frob,
    }
}

/// Planar node features
/// `h_i = ψ(||x_i||, {(x_i·x_j/||X||, x_i⊥·x_j/||X||, ||x_j||) : j ≠ i})`.
pub fn bilip_2d_nodes(x: &PointSet, cfg: &BiLipConfig) -> Result<NodeFeatures> {
    cfg.check_input(x)?;
    if x.dim() != 2 {
        return Err(GeoError::DimensionMismatch {
            expected: 2,
            got: x.dim(),
        });
    }
    let p = prepare(x);
    let n = x.count();
    let index = (0..n).map(|i| vec![i]).collect();
    if p.frob == 0.0 {
        return Ok(NodeFeatures {
            index,
            features: vec![DVector::zeros(cfg.feature_dim()); n],
        });
    }
    let features = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut elems = DMatrix::zeros(3, n - 1);
            for (col, j) in (0..n).filter(|&j| j != i).enumerate() {
                let perp = -p.x[(1, i)] * p.x[(0, j)] + p.x[(0, i)] * p.x[(1, j)];
                elems[(0, col)] = p.dots[(i, j)] / p.frob;
                elems[(1, col)] = perp / p.frob;
                elems[(2, col)] = p.norms[j];
            }
            let beta = cfg.psi.embed_columns(&elems)?;
            Ok(concat(&DVector::from_element(1, p.norms[i]), &beta))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NodeFeatures { index, features })
}

/// Planar model `H(X) = φ({h_i})`, invariant under proper rigid motions and
/// permutations, with `H(0) = 0`.
pub fn bilip_2d(x: &PointSet, cfg: &BiLipConfig) -> Result<(DVector<f64>, NodeFeatures)> {
    let nodes = bilip_2d_nodes(x, cfg)?;
    let global = readout(&nodes, cfg)?;
    Ok((global, nodes))
}

fn readout(nodes: &NodeFeatures, cfg: &BiLipConfig) -> Result<DVector<f64>> {
    cfg.phi().embed_columns(&nodes.to_matrix())
}

/// Tuple features `h_𝐢` for every ordered (d−1)-tuple of distinct indices.
pub fn bilip_general_tuples(x: &PointSet, cfg: &BiLipConfig) -> Result<NodeFeatures> {
    cfg.check_input(x)?;
    let d = x.dim();
    let n = x.count();
    let tuples = ordered_tuples(n, d - 1);
    let p = prepare(x);
    if p.frob == 0.0 {
        let features = vec![DVector::zeros(cfg.feature_dim()); tuples.len()];
        return Ok(NodeFeatures {
            index: tuples,
            features,
        });
    }
    let cross_scale = p.frob.powi(d as i32 - 1);
    let features = tuples
        .par_iter()
        .map(|t| {
            let mut head = DVector::zeros((d - 1) * (d - 1));
            for (a, &ia) in t.iter().enumerate() {
                for (b, &ib) in t.iter().enumerate() {
                    head[a * (d - 1) + b] = if a == b {
                        p.norms[ia]
                    } else {
                        p.dots[(ia, ib)] / p.frob
                    };
                }
            }
            let vecs: Vec<DVector<f64>> = t.iter().map(|&i| p.x.column(i).into_owned()).collect();
            let z = generalized_cross(&vecs)?;
            let mut elems = DMatrix::zeros(d + 1, n - d + 1);
            for (col, k) in (0..n).filter(|k| !t.contains(k)).enumerate() {
                for (a, &ia) in t.iter().enumerate() {
                    elems[(a, col)] = p.dots[(ia, k)] / p.frob;
                }
                elems[(d - 1, col)] = dot_vec(&z, &p.x, k) / cross_scale;
                elems[(d, col)] = p.norms[k];
            }
            let beta = cfg.psi.embed_columns(&elems)?;
            Ok(concat(&head, &beta))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NodeFeatures {
        index: tuples,
        features,
    })
}

/// General-dimension model `H(X) = φ({h_𝐢})`.
pub fn bilip_general(x: &PointSet, cfg: &BiLipConfig) -> Result<(DVector<f64>, NodeFeatures)> {
    let tuples = bilip_general_tuples(x, cfg)?;
    let global = readout(&tuples, cfg)?;
    Ok((global, tuples))
}

/// Per-point features for correspondence: the planar node features for
/// `d = 2`, and `(||x_i||, β({h_𝐢 : 𝐢 starts with i}))` otherwise.
pub fn node_features(x: &PointSet, cfg: &BiLipConfig) -> Result<NodeFeatures> {
    if x.dim() == 2 {
        return bilip_2d_nodes(x, cfg);
    }
    let tuples = bilip_general_tuples(x, cfg)?;
    let n = x.count();
    let pool = cfg.pool();
    let norms = prepare(x).norms;
    let features = (0..n)
        .map(|i| {
            let cols: Vec<DVector<f64>> = tuples
                .index
                .iter()
                .zip(&tuples.features)
                .filter(|(t, _)| t[0] == i)
                .map(|(_, f)| f.clone())
                .collect();
            let beta = pool.embed_columns(&DMatrix::from_columns(&cols))?;
            Ok(concat(&DVector::from_element(1, norms[i]), &beta))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NodeFeatures {
        index: (0..n).map(|i| vec![i]).collect(),
        features,
    })
}

/// Membership in `Ω_c`: after centralization, some (d−1)-tuple has
/// `||x_𝐢⊥|| ≥ c·||X||_F^{d−1}`.
pub fn in_omega_c(x: &PointSet, c: f64) -> Result<bool> {
    let d = x.dim();
    if x.count() < d {
        return Err(GeoError::TooFewPoints {
            needed: d,
            got: x.count(),
        });
    }
    let xc = x.centralize().into_matrix();
    let threshold = c * xc.norm().powi(d as i32 - 1);
    let mut best = 0.0f64;
    for t in ascending_tuples(x.count(), d - 1) {
        let vecs: Vec<DVector<f64>> = t.iter().map(|&i| xc.column(i).into_owned()).collect();
        best = best.max(generalized_cross(&vecs)?.norm());
    }
    Ok(best >= threshold)
}
