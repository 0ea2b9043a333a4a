//! File formats, the full Sobol direction-number table and the
//! command-line front end for `landscape-core`.

use std::path::Path;

pub mod cli;
pub mod config;
pub mod design_csv;
pub mod error;
pub mod features_io;
pub mod fitmap_io;
pub mod joe_kuo;
pub mod performance;
pub mod processed_csv;
pub mod space_json;

pub use error::{Error, Result};

/// Shortest representation that parses back to the same value.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Writes `bytes`, creating missing parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let wrap = |source| Error::Write { path: path.into(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(wrap)?;
    }
    std::fs::write(path, bytes).map_err(wrap)
}
