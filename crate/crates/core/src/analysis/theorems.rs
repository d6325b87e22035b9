use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distortion::{PairSampler, RandomPairs};
use crate::error::{GeoError, Result};
use crate::linalg::Orientation;
use crate::metrics::{
    gram_procrustes_bounds, hgw_exact_with, pm_exact, GramBounds, HgwOptions, DEFAULT_HGW_CAP,
    DEFAULT_PM_CAP,
};
use crate::pointset::PointSet;
use crate::rng::substream;

const METRIC_TOL: f64 = 1e-9;
const GRAM_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremOptions {
    pub pairs: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
    /// Replaces the Hard-GW constant by zero so the suite must fail.
    pub sabotage: bool,
}

impl Default for TheoremOptions {
    fn default() -> Self {
        Self {
            pairs: 200,
            n_min: 4,
            n_max: 7,
            dims: vec![2, 3],
            seed: 0,
            sabotage: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `hgw ≤ 2n^{3/2}·pm`
    HgwUpper,
    /// `pm² ≤ (4n + 2)·hgw`
    PmHolder,
    /// `min_R ||RX − Y|| ≤ ||√G(X) − √G(Y)||`
    GramLower,
    /// `||√G(X) − √G(Y)|| ≤ √2·min_R ||RX − Y||`
    GramUpper,
    /// `||√G(X) − √G(Y)||² ≤ ||G(X) − G(Y)||_T`
    GramTrace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub pair_id: usize,
    pub dim: usize,
    pub count: usize,
    pub pm: f64,
    pub hgw: f64,
    pub gram: GramBounds,
    pub failed: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub pair_id: usize,
    pub check: Check,
    pub lhs: f64,
    pub rhs: f64,
    pub x: PointSet,
    pub y: PointSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub options: TheoremOptions,
    pub all_passed: bool,
    pub records: Vec<PairRecord>,
    pub violations: Vec<Violation>,
}

/// Centralizes both sets and scales them jointly so every point has norm ≤ 1.
fn normalize(x: &PointSet, y: &PointSet) -> (PointSet, PointSet) {
    let (x, y) = (x.centralize(), y.centralize());
    let s = x.op_norm_12().max(y.op_norm_12());
    if s > 0.0 {
        (x.scaled(1.0 / s), y.scaled(1.0 / s))
    } else {
        (x, y)
    }
}

/// Runs the metric inequality suite over seeded pairs. Odd pairs are small
/// perturbations of a moved copy, even pairs are independent.
pub fn verify_theorems(opts: &TheoremOptions) -> Result<TheoremReport> {
    if opts.n_min < 2 || opts.n_min > opts.n_max {
        return Err(GeoError::InvalidArgument(format!(
            "invalid size range {}..={}",
            opts.n_min, opts.n_max
        )));
    }
    if opts.n_max > DEFAULT_PM_CAP {
        return Err(GeoError::EnumerationInfeasible {
            count: opts.n_max,
            cap: DEFAULT_PM_CAP,
        });
    }
    if opts.dims.is_empty() || opts.dims.contains(&0) {
        return Err(GeoError::InvalidArgument(
            "need at least one positive dimension".into(),
        ));
    }
    let hgw_opts = HgwOptions {
        cap: opts.n_max.max(DEFAULT_HGW_CAP),
        prune: true,
    };
    let results: Vec<Result<(PairRecord, Vec<Violation>)>> = (0..opts.pairs)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(opts.seed, k as u64);
            let dim = opts.dims[rng.random_range(0..opts.dims.len())];
            let sampler = RandomPairs {
                dim,
                n_min: opts.n_min,
                n_max: opts.n_max,
                orientation: Orientation::Any,
            };
            let (x, y) = sampler.sample(k as u64, &mut rng)?;
            let (x, y) = normalize(&x, &y);
            let n = x.count() as f64;
            let pm = pm_exact(&x, &y, false)?.value;
            let hgw = hgw_exact_with(&x, &y, &hgw_opts)?.value;
            let gram = gram_procrustes_bounds(&x, &y)?;
            let hgw_factor = if opts.sabotage {
                0.0
            } else {
                2.0 * n.powf(1.5)
            };
            let checks = [
                (Check::HgwUpper, hgw, hgw_factor * pm + METRIC_TOL),
                (Check::PmHolder, pm * pm, (4.0 * n + 2.0) * hgw + METRIC_TOL),
                (Check::GramLower, gram.lower, gram.mid + GRAM_TOL),
                (Check::GramUpper, gram.mid, gram.upper + GRAM_TOL),
                (
                    Check::GramTrace,
                    gram.mid * gram.mid,
                    gram.trace_norm + GRAM_TOL,
                ),
            ];
            let violations: Vec<Violation> = checks
                .iter()
                .filter(|(_, lhs, rhs)| lhs > rhs)
                .map(|&(check, lhs, rhs)| Violation {
                    pair_id: k,
                    check,
                    lhs,
                    rhs,
                    x: x.clone(),
                    y: y.clone(),
                })
                .collect();
            let record = PairRecord {
                pair_id: k,
                dim,
                count: x.count(),
                pm,
                hgw,
                gram,
                failed: violations.iter().map(|v| v.check).collect(),
            };
            Ok((record, violations))
        })
        .collect();
    let mut records = Vec::with_capacity(opts.pairs);
    let mut violations = Vec::new();
    for r in results {
        let (rec, v) = r?;
        records.push(rec);
        violations.extend(v);
    }
    Ok(TheoremReport {
        options: opts.clone(),
        all_passed: violations.is_empty(),
        records,
        violations,
    })
}
