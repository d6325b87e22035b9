use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

/// Least-squares slope of `log d2` against `log d1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub points: usize,
}

pub fn fit_holder(pairs: &[(f64, f64)]) -> Result<HolderFit> {
    if pairs.len() < 4 {
        return Err(GeoError::InvalidArgument(format!(
            "power-law fit needs at least 4 pairs, got {}",
            pairs.len()
        )));
    }
    if let Some(p) = pairs
        .iter()
        .find(|(a, b)| !(*a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite()))
    {
        return Err(GeoError::InvalidArgument(format!(
            "power-law fit needs positive finite values, got {p:?}"
        )));
    }
    let m = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(GeoError::InvalidArgument(
            "power-law fit needs at least two distinct abscissae".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (ssr / (m - 2.0) / sxx).sqrt();
    Ok(HolderFit {
        slope,
        intercept,
        stderr,
        points: pairs.len(),
    })
}
