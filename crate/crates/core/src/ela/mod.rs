//! Exploratory landscape analysis features that need nothing beyond the
//! initial design.
//!
//! Six sets are computed on a [`ProcessedDesign`]: `ela_meta`, `ela_distr`,
//! `disp`, `ic`, `nbc` and `fdc`. Every feature is a function of the
//! normalized data only, so two designs whose normalized data agree yield
//! identical features.

mod dispersion;
mod distr;
mod fdc;
pub mod ic;
mod meta;
pub mod nbc;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::pow;
use crate::preprocess::ProcessedDesign;

pub use dispersion::dispersion;
pub use distr::ela_distr;
pub use fdc::fitness_distance_correlation;
pub use ic::information_content;
pub use meta::{ela_meta, fit_least_squares};
pub use nbc::nearest_better_clustering;

/// Why a feature has no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingReason {
    /// Too few rows for the model or subset the feature needs.
    InsufficientSample,
    /// A variance or spread in a denominator is zero.
    ZeroVariance,
    /// All points coincide or all objective values are equal.
    Degenerate,
    /// No epsilon on the grid satisfies the threshold.
    NoThreshold,
    /// The computation produced a non-finite number.
    NonFinite,
}

impl MissingReason {
    pub fn code(&self) -> &'static str {
        match self {
            MissingReason::InsufficientSample => "insufficient_sample",
            MissingReason::ZeroVariance => "zero_variance",
            MissingReason::Degenerate => "degenerate",
            MissingReason::NoThreshold => "no_threshold",
            MissingReason::NonFinite => "non_finite",
        }
    }
}

impl fmt::Display for MissingReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureValue {
    Value(f64),
    Missing(MissingReason),
}

impl FeatureValue {
    /// Stores `v`, or `NonFinite` when it is NaN or infinite.
    pub fn from_f64(v: f64) -> Self {
        if v.is_finite() {
            FeatureValue::Value(v)
        } else {
            FeatureValue::Missing(MissingReason::NonFinite)
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            FeatureValue::Value(v) => Some(v),
            FeatureValue::Missing(_) => None,
        }
    }
}

impl From<Option<f64>> for FeatureValue {
    fn from(v: Option<f64>) -> Self {
        v.map_or(FeatureValue::Missing(MissingReason::ZeroVariance), FeatureValue::from_f64)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureMeta {
    pub n: usize,
    pub dim: usize,
    pub seed: u64,
    /// `(set, version)` pairs.
    pub versions: Vec<(String, String)>,
    pub moment_estimator: String,
}

/// Ordered `<set>.<feature>` name to value map.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector {
    entries: Vec<(String, FeatureValue)>,
    pub meta: FeatureMeta,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, value: FeatureValue) {
        let value = match value {
            FeatureValue::Value(v) if !v.is_finite() => FeatureValue::Missing(MissingReason::NonFinite),
            other => other,
        };
        self.entries.push((name.into(), value));
    }

    pub fn push_value(&mut self, name: impl Into<String>, v: f64) {
        self.push(name, FeatureValue::from_f64(v));
    }

    pub fn push_missing(&mut self, name: impl Into<String>, reason: MissingReason) {
        self.push(name, FeatureValue::Missing(reason));
    }

    pub fn extend(&mut self, other: FeatureVector) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, name: &str) -> Option<FeatureValue> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// Value of `name`, `None` when missing or absent.
    pub fn value(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(|v| v.value())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, FeatureValue)> {
        self.entries.iter().map(|(n, v)| (n.as_str(), *v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    /// Number of features carrying a value.
    pub fn defined(&self) -> usize {
        self.entries.iter().filter(|(_, v)| v.value().is_some()).count()
    }
}

/// Tuning knobs for the feature sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ElaConfig {
    /// Best-fraction quantiles for the dispersion set.
    pub dispersion_quantiles: Vec<f64>,
    /// Positive, ascending epsilon grid for information content; `0` is
    /// always evaluated in addition.
    pub ic_epsilons: Vec<f64>,
    /// Entropy threshold defining `ic.eps.s`.
    pub ic_settling: f64,
    /// Number of KDE evaluation points on `[0, 1]`.
    pub kde_grid_points: usize,
}

impl Default for ElaConfig {
    fn default() -> Self {
        Self {
            dispersion_quantiles: alloc::vec![0.02, 0.05, 0.10, 0.25],
            ic_epsilons: log_grid(-5.0, 15.0, 1000),
            ic_settling: 0.05,
            kde_grid_points: 512,
        }
    }
}

/// `count` points `10^k`, `k` evenly spaced over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let t = if count > 1 { i as f64 / (count - 1) as f64 } else { 0.0 };
            pow(10.0, lo + (hi - lo) * t)
        })
        .collect()
}

impl ElaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dispersion_quantiles.is_empty()
            || self.dispersion_quantiles.iter().any(|q| !(*q > 0.0 && *q < 1.0))
        {
            return Err(Error::InvalidArgument("dispersion quantiles must lie in (0, 1)".into()));
        }
        if self.ic_epsilons.is_empty()
            || self.ic_epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0))
            || self.ic_epsilons.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidArgument(
                "ic epsilons must be positive, finite and strictly ascending".into(),
            ));
        }
        if !(self.ic_settling > 0.0 && self.ic_settling < 1.0) {
            return Err(Error::InvalidArgument("ic settling threshold must lie in (0, 1)".into()));
        }
        if self.kde_grid_points < 3 {
            return Err(Error::InvalidArgument("kde grid needs at least 3 points".into()));
        }
        Ok(())
    }
}

/// Every feature set, in canonical order.
pub fn compute_all(pd: &ProcessedDesign, cfg: &ElaConfig, seed: u64) -> Result<FeatureVector> {
    cfg.validate()?;
    pd.validate()?;
    if !pd.is_normalized() {
        return Err(Error::InvalidArgument("features need a normalized design".into()));
    }
    let mut fv = FeatureVector::new();
    fv.extend(ela_meta(pd));
    fv.extend(ela_distr(pd, cfg));
    fv.extend(dispersion(pd, cfg));
    fv.extend(information_content(pd, cfg, seed));
    fv.extend(nearest_better_clustering(pd));
    fv.extend(fitness_distance_correlation(pd));
    fv.meta = FeatureMeta {
        n: pd.n(),
        dim: pd.dim(),
        seed,
        versions: ["ela_meta", "ela_distr", "disp", "ic", "nbc", "fdc"]
            .iter()
            .map(|s| (s.to_string(), "1".to_string()))
            .collect(),
        moment_estimator: "population".to_string(),
    };
    Ok(fv)
}

/// Names produced by [`compute_all`] for `cfg`, in order.
pub fn feature_names(cfg: &ElaConfig) -> Vec<String> {
    let mut names: Vec<String> = meta::NAMES.iter().map(|s| s.to_string()).collect();
    names.extend(distr::NAMES.iter().map(|s| s.to_string()));
    names.extend(dispersion::names(&cfg.dispersion_quantiles));
    names.extend(ic::NAMES.iter().map(|s| s.to_string()));
    names.extend(nbc::NAMES.iter().map(|s| s.to_string()));
    names.extend(fdc::NAMES.iter().map(|s| s.to_string()));
    names
}
