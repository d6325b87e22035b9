use std::io::Write;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::epsilon::make_epsilon_family;
use super::holder::{fit_holder, HolderFit};
use crate::error::{GeoError, Result};
use crate::group::GroupElement;
use crate::linalg::Orientation;
use crate::metrics::{hgw_exact, pm_exact};
use crate::models::in_omega_c;
use crate::pointset::PointSet;
use crate::rng::{substream, Rng};

/// Metric values below this are skipped rather than divided by.
pub const MIN_METRIC: f64 = 1e-10;

/// Source of point-set pairs. `index` is the pair number; `rng` is that
/// pair's private stream.
pub trait PairSampler: Sync {
    fn sample(&self, index: u64, rng: &mut Rng) -> Result<(PointSet, PointSet)>;
}

impl<F> PairSampler for F
where
    F: Fn(u64, &mut Rng) -> Result<(PointSet, PointSet)> + Sync,
{
    fn sample(&self, index: u64, rng: &mut Rng) -> Result<(PointSet, PointSet)> {
        self(index, rng)
    }
}

/// Gaussian point sets with a point count drawn from `n_min..=n_max`.
/// Every other pair is independent; the rest are `Y = g·(X + δ·N)` with a
/// random motion `g` of the given orientation and `δ = 10^U(−3, 0)`, which
/// probes the small-distance regime.
#[derive(Clone, Debug)]
pub struct RandomPairs {
    pub dim: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub orientation: Orientation,
}

fn gaussian(d: usize, n: usize, rng: &mut Rng) -> Result<PointSet> {
    PointSet::from_matrix(DMatrix::from_fn(d, n, |_, _| {
        StandardNormal.sample(&mut *rng)
    }))
}

impl PairSampler for RandomPairs {
    fn sample(&self, index: u64, rng: &mut Rng) -> Result<(PointSet, PointSet)> {
        let n = rng.random_range(self.n_min..=self.n_max);
        let x = gaussian(self.dim, n, rng)?;
        if index.is_multiple_of(2) {
            return Ok((x, gaussian(self.dim, n, rng)?));
        }
        let delta = 10f64.powf(rng.random_range(-3.0..0.0));
        let noise = gaussian(self.dim, n, rng)?;
        let moved = PointSet::from_matrix(x.matrix() + noise.matrix() * delta)?;
        let g = GroupElement::random(self.dim, n, self.orientation, rng);
        Ok((x.clone(), g.apply(&moved)?))
    }
}

/// Pairs `(X⁰, X^ε)` from a fresh ε-family per pair, cycling through the
/// listed ε.
#[derive(Clone, Debug)]
pub struct EpsilonPairs {
    pub n: usize,
    pub dim: usize,
    pub epsilons: Vec<f64>,
}

impl PairSampler for EpsilonPairs {
    fn sample(&self, index: u64, rng: &mut Rng) -> Result<(PointSet, PointSet)> {
        let eps = self.epsilons[index as usize % self.epsilons.len()];
        let fam = make_epsilon_family(self.n, self.dim, &[eps], rng.random())?;
        Ok((fam.base(), fam.sets[0].clone()))
    }
}

/// Metrics available to the scan and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// Procrustes matching over all rigid motions.
    Pm,
    /// Procrustes matching over proper rigid motions.
    PmProper,
    /// Hard Gromov-Wasserstein.
    Hgw,
}

impl MetricKind {
    pub fn eval(self, x: &PointSet, y: &PointSet) -> Result<f64> {
        Ok(match self {
            MetricKind::Pm => pm_exact(x, y, false)?.value,
            MetricKind::PmProper => pm_exact(x, y, true)?.value,
            MetricKind::Hgw => hgw_exact(x, y)?.value,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Pm => "pm",
            MetricKind::PmProper => "pm+",
            MetricKind::Hgw => "hgw",
        }
    }
}

impl FromStr for MetricKind {
    type Err = GeoError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pm" => Ok(MetricKind::Pm),
            "pm+" | "pm-proper" => Ok(MetricKind::PmProper),
            "hgw" => Ok(MetricKind::Hgw),
            _ => Err(GeoError::InvalidArgument(format!("unknown metric '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub pairs: usize,
    pub seed: u64,
    /// Keep only pairs with both sets in `Ω_c`.
    pub omega_c: Option<f64>,
    /// Draws per pair before giving up on it.
    pub max_attempts: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            pairs: 100,
            seed: 0,
            omega_c: None,
            max_attempts: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub pair_id: usize,
    pub count: usize,
    pub metric: f64,
    pub model_dist: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub pairs_sampled: usize,
    pub pairs_rejected: usize,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Fit of `log model_dist` against `log metric`, when at least four
    /// pairs have a positive model distance.
    pub holder: Option<HolderFit>,
    pub per_pair: Vec<PairRow>,
}

impl DistortionReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["pair_id", "metric", "model_dist", "ratio"])?;
        for r in &self.per_pair {
            out.write_record([
                r.pair_id.to_string(),
                r.metric.to_string(),
                r.model_dist.to_string(),
                r.ratio.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn sup_distance(a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
    if a.len() != b.len() {
        return Err(GeoError::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok((a - b).amax())
}

/// Samples pairs and reports the distortion
/// `||model(X) − model(Y)||_∞ / metric(X, Y)`.
pub fn distortion_scan<M, D>(
    model: M,
    metric: D,
    sampler: &dyn PairSampler,
    opts: &ScanOptions,
) -> Result<DistortionReport>
where
    M: Fn(&PointSet) -> Result<DVector<f64>> + Sync,
    D: Fn(&PointSet, &PointSet) -> Result<f64> + Sync,
{
    if opts.pairs == 0 {
        return Err(GeoError::InvalidArgument("need at least one pair".into()));
    }
    let outcomes: Vec<Result<(Option<PairRow>, usize)>> = (0..opts.pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(opts.seed, k as u64);
            let mut rejected = 0;
            for _ in 0..opts.max_attempts.max(1) {
                let (x, y) = sampler.sample(k as u64, &mut rng)?;
                if let Some(c) = opts.omega_c {
                    if !in_omega_c(&x, c)? || !in_omega_c(&y, c)? {
                        rejected += 1;
                        continue;
                    }
                }
                let m = metric(&x, &y)?;
                if m < MIN_METRIC {
                    rejected += 1;
                    continue;
                }
                let dist = sup_distance(&model(&x)?, &model(&y)?)?;
                let row = PairRow {
                    pair_id: k,
                    count: x.count(),
                    metric: m,
                    model_dist: dist,
                    ratio: dist / m,
                };
                return Ok((Some(row), rejected));
            }
            Ok((None, rejected))
        })
        .collect();

    let mut per_pair = Vec::new();
    let mut pairs_rejected = 0;
    for o in outcomes {
        let (row, rejected) = o?;
        pairs_rejected += rejected;
        per_pair.extend(row);
    }
    if per_pair.is_empty() {
        return Err(GeoError::SamplerExhausted {
            attempts: opts.pairs * opts.max_attempts.max(1),
        });
    }
    let ratio_min = per_pair
        .iter()
        .map(|r| r.ratio)
        .fold(f64::INFINITY, f64::min);
    let ratio_max = per_pair.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let logs: Vec<(f64, f64)> = per_pair
        .iter()
        .filter(|r| r.model_dist > 0.0)
        .map(|r| (r.metric, r.model_dist))
        .collect();
    let holder = if logs.len() >= 4 {
        fit_holder(&logs).ok()
    } else {
        None
    };
    Ok(DistortionReport {
        pairs_sampled: per_pair.len(),
        pairs_rejected,
        ratio_min,
        ratio_max,
        holder,
        per_pair,
    })
}
