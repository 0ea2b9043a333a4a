//! Fitness-distance correlation (`fdc`).

use alloc::vec::Vec;

use super::{FeatureVector, MissingReason};
use crate::math::{cov, euclidean, mean, pearson, sd};
use crate::preprocess::ProcessedDesign;

pub(super) const NAMES: [&str; 7] = [
    "fdc.coef",
    "fdc.dist.mean",
    "fdc.dist.sd",
    "fdc.fitness.mean",
    "fdc.fitness.sd",
    "fdc.dist.max",
    "fdc.cov",
];

pub fn fitness_distance_correlation(pd: &ProcessedDesign) -> FeatureVector {
    let mut fv = FeatureVector::new();
    let y = pd.yn();
    if y.len() < 3 {
        NAMES.iter().for_each(|n| fv.push_missing(*n, MissingReason::InsufficientSample));
        return fv;
    }
    let mut best = 0;
    for (i, &v) in y.iter().enumerate() {
        if v < y[best] {
            best = i;
        }
    }
    let x_best = &pd.xn()[best];
    let d: Vec<f64> = pd.xn().iter().map(|r| euclidean(r, x_best)).collect();
    match pearson(y, &d) {
        Some(c) => fv.push_value(NAMES[0], c),
        None => fv.push_missing(NAMES[0], MissingReason::ZeroVariance),
    }
    fv.push_value(NAMES[1], mean(&d));
    fv.push_value(NAMES[2], sd(&d));
    fv.push_value(NAMES[3], mean(y));
    fv.push_value(NAMES[4], sd(y));
    fv.push_value(NAMES[5], d.iter().copied().fold(0.0, f64::max));
    fv.push_value(NAMES[6], cov(y, &d));
    fv
}
