//! Synthetic planar matching data: Gaussian-mixture clouds, per-point
//! perturbation, a random rotation and a random relabeling.

use std::f64::consts::TAU;
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::group::Permutation;
use crate::linalg::rotation_2d;
use crate::pointset::PointSet;
use crate::rng::{derive_seed, rng_from_seed, Rng};

/// Version tag written into every dataset line.
pub const FORMAT_VERSION: u32 = 1;

/// Tag mixed into the seed of the held-out split.
const TEST_SPLIT_TAG: u64 = 0x07e5_75e7;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    /// Every point moves by exactly the noise level in a uniform direction.
    #[default]
    Fixed,
    /// Isotropic Gaussian displacement with `E||δ||² = level²`.
    Gaussian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub n: usize,
    pub components: usize,
    /// Means are uniform on `[−r, r]²`.
    pub mean_range: f64,
    pub noise_level: f64,
    pub noise: NoiseModel,
    pub seed: u64,
}

impl Default for PairSpec {
    fn default() -> Self {
        Self {
            n: 90,
            components: 3,
            mean_range: 6.0,
            noise_level: 0.0,
            noise: NoiseModel::Fixed,
            seed: 0,
        }
    }
}

/// Equally weighted planar Gaussian mixture.
#[derive(Clone, Debug, PartialEq)]
pub struct Mixture {
    pub means: Vec<DVector<f64>>,
    pub covariances: Vec<DMatrix<f64>>,
}

impl Mixture {
    /// Means uniform on `[−r, r]²`, covariances `Rᵀ·diag(u₁, u₂)·R` with
    /// `u_i ~ U[0, 1]` and `R` a uniform planar rotation.
    pub fn random(components: usize, mean_range: f64, rng: &mut Rng) -> Self {
        let mut means = Vec::with_capacity(components);
        let mut covariances = Vec::with_capacity(components);
        for _ in 0..components {
            let m = DVector::from_fn(2, |_, _| rng.random_range(-mean_range..=mean_range));
            let u = DVector::from_fn(2, |_, _| rng.random::<f64>());
            let r = rotation_2d(rng.random_range(0.0..TAU));
            means.push(m);
            covariances.push(r.transpose() * DMatrix::from_diagonal(&u) * r);
        }
        Self { means, covariances }
    }

    pub fn weights(&self) -> Vec<f64> {
        vec![1.0 / self.means.len() as f64; self.means.len()]
    }

    pub fn sample(&self, n: usize, rng: &mut Rng) -> Result<PointSet> {
        let factors: Vec<DMatrix<f64>> = self
            .covariances
            .iter()
            .map(|c| {
                let eig = c.clone().symmetric_eigen();
                let root = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
                &eig.eigenvectors * DMatrix::from_diagonal(&root)
            })
            .collect();
        let mut m = DMatrix::zeros(2, n);
        for j in 0..n {
            let k = rng.random_range(0..self.means.len());
            let z = DVector::from_fn(2, |_, _| StandardNormal.sample(&mut *rng));
            m.set_column(j, &(&self.means[k] + &factors[k] * z));
        }
        PointSet::from_matrix(m)
    }
}

/// `Y_j = R_α·(x_{truth[j]} + δ_j)`: `truth_perm` maps indices of `Y` to
/// indices of `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub x: PointSet,
    pub y: PointSet,
    pub truth_perm: Permutation,
    pub truth_angle: f64,
    pub noise_level: f64,
}

fn displacement(model: NoiseModel, level: f64, rng: &mut Rng) -> DVector<f64> {
    match model {
        NoiseModel::Fixed => {
            let (s, c) = rng.random_range(0.0..TAU).sin_cos();
            DVector::from_vec(vec![level * c, level * s])
        }
        NoiseModel::Gaussian => DVector::from_fn(2, |_, _| {
            let z: f64 = StandardNormal.sample(&mut *rng);
            level * z / 2f64.sqrt()
        }),
    }
}

pub fn gen_pair(spec: &PairSpec) -> Result<LabeledPair> {
    if spec.n == 0 || spec.components == 0 {
        return Err(GeoError::InvalidArgument(
            "need at least one point and one mixture component".into(),
        ));
    }
    if !(spec.noise_level >= 0.0 && spec.noise_level.is_finite()) {
        return Err(GeoError::InvalidArgument(
            "noise level must be non-negative".into(),
        ));
    }
    let mut rng = rng_from_seed(spec.seed);
    let mixture = Mixture::random(spec.components, spec.mean_range, &mut rng);
    let x = mixture.sample(spec.n, &mut rng)?;
    let truth = Permutation::random(spec.n, &mut rng);
    let angle = rng.random_range(0.0..TAU);
    let rot = rotation_2d(angle);
    let mut y = truth.apply(&x)?.into_matrix();
    for j in 0..spec.n {
        let moved = y.column(j) + displacement(spec.noise, spec.noise_level, &mut rng);
        y.set_column(j, &(&rot * moved));
    }
    Ok(LabeledPair {
        x,
        y: PointSet::from_matrix(y)?,
        truth_perm: truth,
        truth_angle: angle,
        noise_level: spec.noise_level,
    })
}

/// Noise level of pair `k` out of `count`: linear from `start` to `end`.
pub fn curriculum_level(k: usize, count: usize, start: f64, end: f64) -> f64 {
    start + k as f64 * (end - start) / (count - 1) as f64
}

/// `count` pairs whose noise rises linearly from `start` to `end`.
pub fn gen_curriculum_dataset(
    count: usize,
    start: f64,
    end: f64,
    seed: u64,
    base: &PairSpec,
) -> Result<Vec<LabeledPair>> {
    if count < 2 {
        return Err(GeoError::InvalidArgument(
            "a curriculum needs at least 2 pairs".into(),
        ));
    }
    (0..count)
        .into_par_iter()
        .map(|k| {
            gen_pair(&PairSpec {
                noise_level: curriculum_level(k, count, start, end),
                seed: derive_seed(seed, k as u64),
                ..base.clone()
            })
        })
        .collect()
}

/// `per_level` pairs at each listed noise level, grouped in order. Pair `k`
/// of every group shares its seed, so groups differ only in noise magnitude.
pub fn gen_level_groups(
    levels: &[f64],
    per_level: usize,
    seed: u64,
    base: &PairSpec,
) -> Result<Vec<LabeledPair>> {
    let jobs: Vec<(usize, usize)> = (0..levels.len())
        .flat_map(|g| (0..per_level).map(move |k| (g, k)))
        .collect();
    jobs.into_par_iter()
        .map(|(g, k)| {
            gen_pair(&PairSpec {
                noise_level: levels[g],
                seed: derive_seed(seed, k as u64),
                ..base.clone()
            })
        })
        .collect()
}

/// Seed of the held-out split drawn with the same generator.
pub fn test_split_seed(seed: u64) -> u64 {
    derive_seed(seed, TEST_SPLIT_TAG)
}

#[derive(Serialize)]
struct LineOut<'a, C: Serialize> {
    format_version: u32,
    run_config: &'a C,
    #[serde(flatten)]
    pair: &'a LabeledPair,
}

/// Writes one JSON object per line, each carrying the format version and the
/// run configuration next to the pair fields.
pub fn write_ndjson<W: Write, C: Serialize>(
    mut w: W,
    pairs: &[LabeledPair],
    run_config: &C,
) -> Result<()> {
    for pair in pairs {
        let line = LineOut {
            format_version: FORMAT_VERSION,
            run_config,
            pair,
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct LineIn {
    format_version: Option<u32>,
    #[serde(flatten)]
    pair: LabeledPair,
}

pub fn read_ndjson<R: BufRead>(r: R) -> Result<Vec<LabeledPair>> {
    let mut out = Vec::new();
    for (no, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: LineIn = serde_json::from_str(&line)
            .map_err(|e| GeoError::Malformed(format!("line {}: {e}", no + 1)))?;
        if let Some(v) = parsed.format_version {
            if v != FORMAT_VERSION {
                return Err(GeoError::Malformed(format!(
                    "line {}: unsupported format version {v}",
                    no + 1
                )));
            }
        }
        let p = parsed.pair;
        if p.x.dim() != p.y.dim() || p.x.count() != p.y.count() || p.truth_perm.len() != p.x.count()
        {
            return Err(GeoError::Malformed(format!(
                "line {}: inconsistent pair shapes",
                no + 1
            )));
        }
        out.push(p);
    }
    Ok(out)
}
