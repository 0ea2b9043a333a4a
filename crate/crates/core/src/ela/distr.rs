//! Distribution of objective values (`ela_distr`).

use alloc::vec::Vec;

use super::{ElaConfig, FeatureVector, MissingReason};
use crate::math::{exp, floor, pow, sqrt};
use crate::preprocess::ProcessedDesign;

pub(super) const NAMES: [&str; 3] = [
    "ela_distr.skewness",
    "ela_distr.kurtosis",
    "ela_distr.number_of_peaks",
];

/// Population skewness and excess kurtosis; `None` at zero variance.
pub(crate) fn moments(y: &[f64]) -> Option<(f64, f64)> {
    let n = y.len() as f64;
    let m = y.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in y {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    if m2 <= 0.0 {
        return None;
    }
    Some((m3 / (m2 * sqrt(m2)), m4 / (m2 * m2) - 3.0))
}

/// Type-7 sample quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Silverman's rule of thumb, `0.9 * min(sd, IQR / 1.34) * n^(-1/5)`, with
/// the usual fallbacks when the spread collapses.
pub(crate) fn silverman_bandwidth(y: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let sd = crate::math::sd(y);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let mut lo = sd.min(iqr / 1.34);
    if lo <= 0.0 {
        lo = if sd > 0.0 {
            sd
        } else if y[0] != 0.0 {
            y[0].abs()
        } else {
            1.0
        };
    }
    0.9 * lo * pow(y.len() as f64, -0.2)
}

/// Gaussian KDE of `y` on `points` evenly spaced grid values over `[0, 1]`.
pub(crate) fn kde_on_unit_grid(y: &[f64], bandwidth: f64, points: usize) -> Vec<f64> {
    let norm = 1.0 / (y.len() as f64 * bandwidth * sqrt(2.0 * core::f64::consts::PI));
    (0..points)
        .map(|k| {
            let g = k as f64 / (points - 1) as f64;
            norm * y
                .iter()
                .map(|v| {
                    let u = (g - v) / bandwidth;
                    exp(-0.5 * u * u)
                })
                .sum::<f64>()
        })
        .collect()
}

/// Grid points strictly above their neighbors; an end point only has one.
pub(crate) fn count_peaks(density: &[f64]) -> usize {
    let n = density.len();
    (0..n)
        .filter(|&i| {
            let left = i == 0 || density[i] > density[i - 1];
            let right = i + 1 == n || density[i] > density[i + 1];
            left && right
        })
        .count()
}

pub fn ela_distr(pd: &ProcessedDesign, cfg: &ElaConfig) -> FeatureVector {
    let mut fv = FeatureVector::new();
    let y = pd.yn();
    if y.len() < 4 {
        NAMES.iter().for_each(|n| fv.push_missing(*n, MissingReason::InsufficientSample));
        return fv;
    }
    match moments(y) {
        Some((skew, kurt)) => {
            fv.push_value(NAMES[0], skew);
            fv.push_value(NAMES[1], kurt);
            let h = silverman_bandwidth(y);
            let density = kde_on_unit_grid(y, h, cfg.kde_grid_points);
            fv.push_value(NAMES[2], count_peaks(&density) as f64);
        }
        None => {
            fv.push_missing(NAMES[0], MissingReason::ZeroVariance);
            fv.push_missing(NAMES[1], MissingReason::ZeroVariance);
            fv.push_value(NAMES[2], 1.0);
        }
    }
    fv
}
