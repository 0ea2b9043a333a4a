//! Run configuration read from TOML. Every key is optional and unknown
//! keys are rejected; command-line flags override the file.
//!
//! ```toml
//! seed = 7
//!
//! [sample]
//! n = 200
//! strategy = "sobol"
//!
//! [preprocess]
//! encoding = "target"
//! smoothing = 0.0
//!
//! [features.ela]
//! dispersion_quantiles = [0.02, 0.05, 0.1, 0.25]
//!
//! [fitmap]
//! mode = "rmc"
//! resolution = 224
//! k = 5
//!
//! [aas]
//! scheme = "leave_fid_out"
//! kind = "knn"
//! k = 3
//! cost_sensitive = true
//! feature_cost = 100
//! penalty = 10.0
//! ```

use std::path::Path;

use landscape_core::aas::{CvScheme, SelectorKind, DEFAULT_PENALTY};
use landscape_core::ela::ElaConfig;
use landscape_core::preprocess::Encoding;
use landscape_core::sampling::SamplingStrategy;
use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub sample: SampleConfig,
    pub preprocess: PreprocessConfig,
    pub features: FeaturesConfig,
    pub fitmap: FitmapConfig,
    pub aas: AasConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    /// `None` means 50 per dimension.
    pub n: Option<usize>,
    pub strategy: SamplingStrategy,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    pub encoding: Encoding,
    pub smoothing: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesConfig {
    pub ela: ElaConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitmapMode {
    #[default]
    Raw2d,
    Pca,
    PcaFunc,
    Mc,
    Rmc,
    Cloud,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitmapConfig {
    pub mode: FitmapMode,
    pub resolution: usize,
    pub k: usize,
}

impl Default for FitmapConfig {
    fn default() -> Self {
        Self {
            mode: FitmapMode::Raw2d,
            resolution: landscape_core::fitmap::DEFAULT_RESOLUTION,
            k: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AasConfig {
    pub scheme: CvScheme,
    pub kind: SelectorKind,
    pub k: usize,
    pub cost_sensitive: bool,
    pub feature_cost: u64,
    pub penalty: f64,
}

impl Default for AasConfig {
    fn default() -> Self {
        Self {
            scheme: CvScheme::LeaveIidOut,
            kind: SelectorKind::Knn,
            k: 1,
            cost_sensitive: false,
            feature_cost: 0,
            penalty: DEFAULT_PENALTY,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
        Self::parse(&text).map_err(|e| Error::format(path, e))
    }
}
