use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{GeoError, Result};
use crate::pointset::PointSet;
use crate::rng::rng_from_seed;

pub const DEFAULT_EPSILONS: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];

const ANCHOR_RADIUS: f64 = 0.4;
const MIN_SEPARATION: f64 = 0.1;
const MAX_ATTEMPTS: usize = 100_000;

/// Point sets `X^ε` whose first `d − 1` rows are fixed anchors and whose last
/// row is `(ε, −ε, 0, …, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonFamily {
    /// `(d − 1) × n`, first column zero, columns summing to zero.
    pub anchors: DMatrix<f64>,
    pub epsilons: Vec<f64>,
    /// `sets[i]` is `X^{epsilons[i]}`.
    pub sets: Vec<PointSet>,
}

impl EpsilonFamily {
    pub fn dim(&self) -> usize {
        self.anchors.nrows() + 1
    }

    pub fn count(&self) -> usize {
        self.anchors.ncols()
    }

    /// `X⁰`: the anchors padded with a zero row.
    pub fn base(&self) -> PointSet {
        Self::assemble(&self.anchors, 0.0)
    }

    pub fn member(&self, eps: f64) -> PointSet {
        Self::assemble(&self.anchors, eps)
    }

    fn assemble(anchors: &DMatrix<f64>, eps: f64) -> PointSet {
        let (r, n) = anchors.shape();
        let mut m = DMatrix::zeros(r + 1, n);
        m.rows_mut(0, r).copy_from(anchors);
        m[(r, 0)] = eps;
        m[(r, 1)] = -eps;
        PointSet::from_matrix(m).expect("finite anchors")
    }
}

fn sample_ball(dim: usize, radius: f64, rng: &mut crate::rng::Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut *rng)).collect();
    let norm = v
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
    v.into_iter().map(|x| x * r / norm).collect()
}

/// Samples anchors `a_1 = 0`, `a_2, …, a_{n−1}` uniform in a ball of radius
/// 0.4 and `a_n = −Σ a_j`, rejecting draws where `||a_n|| ≥ 1`, two anchors
/// are closer than 0.1, or some `a_j` (`j ≥ 2`) is shorter than `2·max ε`.
pub fn make_epsilon_family(
    n: usize,
    d: usize,
    epsilons: &[f64],
    seed: u64,
) -> Result<EpsilonFamily> {
    if n < 3 {
        return Err(GeoError::TooFewPoints { needed: 3, got: n });
    }
    if d < 2 {
        return Err(GeoError::InvalidArgument("ε-family needs d ≥ 2".into()));
    }
    if epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(GeoError::InvalidArgument(
            "epsilons must be positive".into(),
        ));
    }
    let eps_max = epsilons.iter().copied().fold(0.0, f64::max);
    let min_norm = 2.0 * eps_max;
    if min_norm >= ANCHOR_RADIUS {
        return Err(GeoError::InvalidArgument(format!(
            "ε = {eps_max} is too large for anchors of radius {ANCHOR_RADIUS}"
        )));
    }
    let r = d - 1;
    let mut rng = rng_from_seed(seed);
    let mut anchors = None;
    for _ in 0..MAX_ATTEMPTS {
        let mut a = DMatrix::zeros(r, n);
        for j in 1..n - 1 {
            let p = sample_ball(r, ANCHOR_RADIUS, &mut rng);
            for (i, v) in p.into_iter().enumerate() {
                a[(i, j)] = v;
            }
        }
        let last = -a.columns(1, n - 2).column_sum();
        a.set_column(n - 1, &last);
        let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
        if norms[n - 1] >= 1.0 || norms[1..].iter().any(|&v| v < min_norm) {
            continue;
        }
        let separated = (0..n)
            .all(|i| (i + 1..n).all(|j| (a.column(i) - a.column(j)).norm() >= MIN_SEPARATION));
        if separated {
            anchors = Some(a);
            break;
        }
    }
    let anchors = anchors.ok_or(GeoError::SamplerExhausted {
        attempts: MAX_ATTEMPTS,
    })?;
    let sets: Vec<PointSet> = epsilons
        .iter()
        .map(|&e| EpsilonFamily::assemble(&anchors, e))
        .collect();
    if let Some((e, _)) = epsilons
        .iter()
        .zip(&sets)
        .find(|(_, s)| s.op_norm_12() > 1.0)
    {
        return Err(GeoError::InvalidArgument(format!(
            "ε = {e} pushes a point outside the unit ball"
        )));
    }
    Ok(EpsilonFamily {
        anchors,
        epsilons: epsilons.to_vec(),
        sets,
    })
}
