//! Feature-free representations of an initial design: 2D fitness maps,
//! principal-component projections, multi-channel map stacks and
//! nearest-neighbor point clouds.
//!
//! Map coordinates: the first selected column is the horizontal axis
//! (`ix`), the second the vertical axis (`iy`). Pixel values are the
//! normalized objective, so 0 marks the best observed region.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::math::{euclidean, floor, sqrt};
use crate::preprocess::ProcessedDesign;

pub const DEFAULT_RESOLUTION: usize = 224;

/// Square grayscale raster; `None` marks pixels no observation fell into.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessMap {
    resolution: usize,
    pixels: Vec<Option<f64>>,
    pub channel_label: String,
}

impl FitnessMap {
    pub fn empty(resolution: usize, channel_label: impl Into<String>) -> Self {
        Self {
            resolution,
            pixels: vec![None; resolution * resolution],
            channel_label: channel_label.into(),
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn get(&self, ix: usize, iy: usize) -> Option<f64> {
        self.pixels[iy * self.resolution + ix]
    }

    /// Pixels in row-major `(iy, ix)` order.
    pub fn pixels(&self) -> &[Option<f64>] {
        &self.pixels
    }

    pub fn occupied(&self) -> usize {
        self.pixels.iter().filter(|p| p.is_some()).count()
    }

    /// Keeps the smaller value on collision.
    fn splat(&mut self, u: f64, v: f64, value: f64) {
        let idx = |t: f64| (floor(t * self.resolution as f64).max(0.0) as usize).min(self.resolution - 1);
        let slot = &mut self.pixels[idx(v) * self.resolution + idx(u)];
        *slot = Some(match *slot {
            Some(old) => old.min(value),
            None => value,
        });
    }
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!("resolution must be >= 2, got {resolution}")));
    }
    Ok(())
}

/// Rasterizes unit-square points carrying values in `[0, 1]`.
pub fn rasterize_points(points: &[[f64; 2]], values: &[f64], resolution: usize, label: &str) -> Result<FitnessMap> {
    check_resolution(resolution)?;
    if points.len() != values.len() {
        return Err(Error::InvalidArgument("one value per point required".into()));
    }
    let mut map = FitnessMap::empty(resolution, label);
    for (p, &v) in points.iter().zip(values) {
        map.splat(p[0], p[1], v);
    }
    Ok(map)
}

/// Fitness map of columns `cols.0` (horizontal) and `cols.1` (vertical).
pub fn rasterize_2d(pd: &ProcessedDesign, cols: (usize, usize), resolution: usize) -> Result<FitnessMap> {
    if pd.dim() < 2 {
        return Err(Error::InvalidArgument(format!(
            "a fitness map needs two columns, design has {}",
            pd.dim()
        )));
    }
    if cols.0 >= pd.dim() || cols.1 >= pd.dim() {
        return Err(Error::InvalidArgument(format!("columns {cols:?} out of range")));
    }
    let points: Vec<[f64; 2]> = pd.xn().iter().map(|r| [r[cols.0], r[cols.1]]).collect();
    rasterize_points(&points, pd.yn(), resolution, &format!("{}_{}", cols.0, cols.1))
}

/// Two-dimensional principal-component view of a design.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// Per-row coordinates, each axis rescaled to `[0, 1]`.
    pub coords: Vec<[f64; 2]>,
    /// Fraction of total variance carried by each of the two components.
    pub explained: [f64; 2],
    /// Loadings of the two components on the standardized input columns.
    pub components: [Vec<f64>; 2],
}

/// Projects the standardized design (optionally with the objective as an
/// extra column) onto its two leading principal components. Each loading
/// vector is signed so its largest-magnitude entry is positive.
pub fn pca_project(pd: &ProcessedDesign, include_y: bool) -> Result<Projection> {
    let n = pd.n();
    let m = pd.dim() + usize::from(include_y);
    if n <= 2 {
        return Err(Error::InvalidArgument(format!("projection needs n > 2, got {n}")));
    }
    if m < 2 {
        return Err(Error::InvalidArgument("projection needs at least two input columns".into()));
    }
    let mut data: Vec<Vec<f64>> = pd
        .xn()
        .iter()
        .zip(pd.yn())
        .map(|(r, &y)| {
            let mut row = r.clone();
            if include_y {
                row.push(y);
            }
            row
        })
        .collect();
    let mut any_spread = false;
    for j in 0..m {
        let col: Vec<f64> = data.iter().map(|r| r[j]).collect();
        let mean = crate::math::mean(&col);
        let sd = crate::math::sd(&col);
        let widen = sd > 0.0;
        any_spread |= widen;
        for r in data.iter_mut() {
            r[j] = if widen { (r[j] - mean) / sd } else { 0.0 };
        }
    }
    if !any_spread {
        return Err(Error::Degenerate("all points identical".into()));
    }
    let mut cov = vec![vec![0.0; m]; m];
    for r in &data {
        for a in 0..m {
            for b in a..m {
                cov[a][b] += r[a] * r[b];
            }
        }
    }
    for a in 0..m {
        for b in a..m {
            cov[a][b] /= (n - 1) as f64;
            cov[b][a] = cov[a][b];
        }
    }
    let (values, mut vectors) = symmetric_eigen(&cov);
    let total: f64 = values.iter().map(|v| v.max(0.0)).sum();
    let explained = [values[0].max(0.0) / total, values[1].max(0.0) / total];
    for v in vectors.iter_mut().take(2) {
        let mut lead = 0;
        for (i, c) in v.iter().enumerate() {
            if c.abs() > v[lead].abs() {
                lead = i;
            }
        }
        if v[lead] < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
    }
    let mut coords = vec![[0.0; 2]; n];
    for axis in 0..2 {
        let proj: Vec<f64> = data
            .iter()
            .map(|r| r.iter().zip(&vectors[axis]).map(|(a, b)| a * b).sum())
            .collect();
        let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = proj.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // an axis without variance collapses to 0 instead of amplifying noise
        let flat = explained[axis] <= 1e-12 || hi - lo <= 1e-12 * sqrt(total);
        for (c, p) in coords.iter_mut().zip(proj) {
            c[axis] = if flat { 0.0 } else { ((p - lo) / (hi - lo)).clamp(0.0, 1.0) };
        }
    }
    Ok(Projection {
        coords,
        explained,
        components: [vectors[0].clone(), vectors[1].clone()],
    })
}

/// Fitness map of the PCA (or, with `include_y`, PCA-Func) projection.
pub fn pca_map(pd: &ProcessedDesign, include_y: bool, resolution: usize) -> Result<FitnessMap> {
    let proj = pca_project(pd, include_y)?;
    let label = if include_y { "pca_func" } else { "pca" };
    rasterize_points(&proj.coords, pd.yn(), resolution, label)
}

/// One fitness map per unordered column pair `(i, j)`, `i < j`, in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct MapStack {
    pub channels: Vec<FitnessMap>,
    pub pairs: Vec<(usize, usize)>,
}

pub fn multichannel(pd: &ProcessedDesign, resolution: usize) -> Result<MapStack> {
    let d = pd.dim();
    if d < 2 {
        return Err(Error::InvalidArgument(format!("multi-channel maps need >= 2 columns, got {d}")));
    }
    let mut stack = MapStack {
        channels: Vec::with_capacity(d * (d - 1) / 2),
        pairs: Vec::with_capacity(d * (d - 1) / 2),
    };
    for i in 0..d {
        for j in (i + 1)..d {
            stack.channels.push(rasterize_2d(pd, (i, j), resolution)?);
            stack.pairs.push((i, j));
        }
    }
    Ok(stack)
}

/// Per-pixel mean over channels, counting an empty pixel as 1 (worst). A
/// pixel stays empty only when every channel leaves it empty.
pub fn reduce_mean(stack: &MapStack) -> Result<FitnessMap> {
    let first = stack
        .channels
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty map stack".into()))?;
    let r = first.resolution;
    if stack.channels.iter().any(|c| c.resolution != r) {
        return Err(Error::InvalidArgument("channels differ in resolution".into()));
    }
    let k = stack.channels.len() as f64;
    let mut out = FitnessMap::empty(r, "rmc");
    for (p, slot) in out.pixels.iter_mut().enumerate() {
        if stack.channels.iter().all(|c| c.pixels[p].is_none()) {
            continue;
        }
        // offsets from the first channel keep a stack of equal maps exact
        let base = stack.channels[0].pixels[p].unwrap_or(1.0);
        let s: f64 = stack.channels.iter().map(|c| c.pixels[p].unwrap_or(1.0) - base).sum();
        *slot = Some((base + s / k).clamp(0.0, 1.0));
    }
    Ok(out)
}

/// A point followed by its `k` nearest neighbors (nearest first).
#[derive(Debug, Clone, PartialEq)]
pub struct CloudRecord {
    pub index: usize,
    pub neighbors: Vec<usize>,
    pub distances: Vec<f64>,
    /// `(k + 1) * (D' + 1)` values: own coordinates and objective, then
    /// each neighbor's coordinates and objective.
    pub values: Vec<f64>,
}

pub fn knn_cloud(pd: &ProcessedDesign, k: usize) -> Result<Vec<CloudRecord>> {
    let n = pd.n();
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!("need 1 <= k < n, got k = {k}, n = {n}")));
    }
    let x = pd.xn();
    let y = pd.yn();
    let point = |i: usize, out: &mut Vec<f64>| {
        out.extend_from_slice(&x[i]);
        out.push(y[i]);
    };
    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (euclidean(&x[i], &x[j]), j))
            .collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        others.truncate(k);
        let mut values = Vec::with_capacity((k + 1) * (pd.dim() + 1));
        point(i, &mut values);
        for &(_, j) in &others {
            point(j, &mut values);
        }
        records.push(CloudRecord {
            index: i,
            neighbors: others.iter().map(|o| o.1).collect(),
            distances: others.iter().map(|o| o.0).collect(),
            values,
        });
    }
    Ok(records)
}
