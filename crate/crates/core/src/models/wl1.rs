use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::NodeFeatures;
use crate::embeddings::{default_output_dim, SortEmbedParams};
use crate::error::{GeoError, Result};
use crate::pointset::PointSet;
use crate::rng::{derive_seed, rng_from_seed};

/// Negative-side slope of the leaky piecewise-linear activation.
pub const LEAK_SLOPE: f64 = 0.1;

/// Serialized form of a [`Wl1Config`]: everything else is regenerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wl1Spec {
    pub seed: u64,
    pub n: usize,
    pub iterations: usize,
    pub hidden: usize,
}

#[derive(Clone, Debug)]
struct Layer {
    /// Sort embedding of the message multiset `{(c_i, c_j, ||x_i − x_j||) : j ≠ i}`.
    message: SortEmbedParams,
    /// `hidden × (hidden + m)`
    combine: DMatrix<f64>,
}

/// Seeded, untrained parameters of a 1-WL geometric model for `n` points.
#[derive(Clone, Debug)]
pub struct Wl1Config {
    spec: Wl1Spec,
    layers: Vec<Layer>,
    readout: SortEmbedParams,
}

impl Wl1Config {
    pub fn new(seed: u64, n: usize, iterations: usize, hidden: usize) -> Result<Self> {
        if n < 2 || iterations == 0 || hidden == 0 {
            return Err(GeoError::InvalidArgument(
                "1-WL model needs n ≥ 2, at least one iteration and a hidden width".into(),
            ));
        }
        let k = 2 * hidden + 1;
        let layers = (0..iterations)
            .map(|t| {
                let message = SortEmbedParams::new(
                    derive_seed(seed, 2 * t as u64),
                    default_output_dim(n - 1, k),
                    n - 1,
                    k,
                )?;
                let fan_in = hidden + message.output_dim();
                let mut rng = rng_from_seed(derive_seed(seed, 2 * t as u64 + 1));
                let scale = 1.0 / (fan_in as f64).sqrt();
                let combine = DMatrix::from_fn(hidden, fan_in, |_, _| {
                    scale * {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        z
                    }
                });
                Ok(Layer { message, combine })
            })
            .collect::<Result<Vec<_>>>()?;
        let readout = SortEmbedParams::with_default_dim(derive_seed(seed, u64::MAX), n, hidden)?;
        Ok(Self {
            spec: Wl1Spec {
                seed,
                n,
                iterations,
                hidden,
            },
            layers,
            readout,
        })
    }

    pub fn from_spec(spec: Wl1Spec) -> Result<Self> {
        Self::new(spec.seed, spec.n, spec.iterations, spec.hidden)
    }

    pub fn spec(&self) -> Wl1Spec {
        self.spec
    }

    pub fn output_dim(&self) -> usize {
        self.readout.output_dim()
    }
}

fn leaky(v: f64) -> f64 {
    if v >= 0.0 {
        v
    } else {
        LEAK_SLOPE * v
    }
}

/// Runs `T` rounds of
/// `c_i ← σ(W·[c_i; ψ_t({(c_i, c_j, ||x_i − x_j||) : j ≠ i})])` from `c⁰ = 0`
/// and reads out a sort embedding of the final node features.
pub fn wl1_forward(x: &PointSet, cfg: &Wl1Config) -> Result<(DVector<f64>, NodeFeatures)> {
    let n = x.count();
    if n != cfg.spec.n {
        return Err(GeoError::CountMismatch {
            expected: cfg.spec.n,
            got: n,
        });
    }
    let h = cfg.spec.hidden;
    let m = x.matrix();
    let dist = DMatrix::from_fn(n, n, |i, j| (m.column(i) - m.column(j)).norm());

    let mut feats = DMatrix::<f64>::zeros(h, n);
    let mut elems = DMatrix::<f64>::zeros(2 * h + 1, n - 1);
    for layer in &cfg.layers {
        let mut next = DMatrix::zeros(h, n);
        for i in 0..n {
            for (col, j) in (0..n).filter(|&j| j != i).enumerate() {
                for r in 0..h {
                    elems[(r, col)] = feats[(r, i)];
                    elems[(h + r, col)] = feats[(r, j)];
                }
                elems[(2 * h, col)] = dist[(i, j)];
            }
            let q = layer.message.embed_columns(&elems)?;
            let input = crate::embeddings::concat(&feats.column(i).into_owned(), &q);
            let out = (&layer.combine * input).map(leaky);
            next.set_column(i, &out);
        }
        feats = next;
    }
    let global = cfg.readout.embed_columns(&feats)?;
    let nodes = NodeFeatures {
        index: (0..n).map(|i| vec![i]).collect(),
        features: feats.column_iter().map(|c| c.into_owned()).collect(),
    };
    Ok((global, nodes))
}
