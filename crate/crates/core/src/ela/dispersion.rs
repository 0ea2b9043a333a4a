//! Spread of the best points relative to the whole sample (`disp`).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{ElaConfig, FeatureVector, MissingReason};
use crate::math::{ceil, euclidean, mean, median, round};
use crate::preprocess::ProcessedDesign;

fn suffix(q: f64) -> String {
    format!("{:02}", round(q * 100.0) as u64)
}

pub(super) fn names(quantiles: &[f64]) -> Vec<String> {
    let mut out = Vec::new();
    for stat in ["ratio", "diff"] {
        for agg in ["mean", "median"] {
            for q in quantiles {
                out.push(format!("disp.{stat}_{agg}_{}", suffix(*q)));
            }
        }
    }
    out
}

fn pairwise(points: &[&[f64]]) -> Vec<f64> {
    let mut d = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            d.push(euclidean(points[i], points[j]));
        }
    }
    d
}

/// Size of the best-`q` subset; the epsilon absorbs products like
/// `0.1 * 30 = 3.0000000000000004`.
pub(crate) fn subset_size(q: f64, n: usize) -> usize {
    (ceil(q * n as f64 - 1e-9) as usize).clamp(1, n)
}

pub fn dispersion(pd: &ProcessedDesign, cfg: &ElaConfig) -> FeatureVector {
    let n = pd.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pd.yn()[a].total_cmp(&pd.yn()[b]).then(a.cmp(&b)));

    let all: Vec<&[f64]> = pd.xn().iter().map(Vec::as_slice).collect();
    let full = pairwise(&all);
    let (full_mean, full_median) = if full.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        (mean(&full), median(&full))
    };

    // [stat][agg][quantile]
    let mut values: Vec<[[Option<f64>; 2]; 2]> = Vec::new();
    for &q in &cfg.dispersion_quantiles {
        let k = subset_size(q, n);
        let subset: Vec<&[f64]> = order[..k].iter().map(|&i| all[i]).collect();
        let d = pairwise(&subset);
        if d.is_empty() || full.is_empty() {
            values.push([[None; 2]; 2]);
            continue;
        }
        let (m, md) = (mean(&d), median(&d));
        let ratio = |a: f64, b: f64| if b > 0.0 { Some(a / b) } else { None };
        values.push([
            [ratio(m, full_mean), ratio(md, full_median)],
            [Some(m - full_mean), Some(md - full_median)],
        ]);
    }
    let mut fv = FeatureVector::new();
    let names = names(&cfg.dispersion_quantiles);
    let mut it = names.into_iter();
    for stat in 0..2 {
        for agg in 0..2 {
            for (qi, q) in cfg.dispersion_quantiles.iter().enumerate() {
                let name = it.next().expect("name per feature");
                match values[qi][stat][agg] {
                    Some(v) => fv.push_value(name, v),
                    None if subset_size(*q, n) < 2 => fv.push_missing(name, MissingReason::InsufficientSample),
                    None => fv.push_missing(name, MissingReason::Degenerate),
                }
            }
        }
    }
    fv
}
