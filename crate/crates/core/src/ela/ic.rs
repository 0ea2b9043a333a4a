//! Information content along a nearest-neighbor tour (`ic`).
//!
//! Rows are first sorted canonically (lexicographically by coordinates,
//! then objective), so the features do not depend on the input row order.
//! The tour starts at a seeded random row and greedily walks to the nearest
//! unvisited row, ties going to the lower canonical index. Along the tour
//! each step gets the slope `(y[i+1] - y[i]) / |x[i+1] - x[i]|`; steps of
//! length zero are skipped.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ElaConfig, FeatureVector, MissingReason};
use crate::math::{euclidean, log, log10};
use crate::preprocess::ProcessedDesign;

pub(super) const NAMES: [&str; 5] = ["ic.h.max", "ic.eps.s", "ic.eps.max", "ic.eps.ratio", "ic.m0"];

/// Greedy nearest-neighbor ordering of `points` starting at `start`.
pub fn nearest_neighbor_tour(points: &[Vec<f64>], start: usize) -> Vec<usize> {
    let n = points.len();
    let mut visited = vec![false; n];
    let mut tour = Vec::with_capacity(n);
    let mut current = start;
    visited[current] = true;
    tour.push(current);
    for _ in 1..n {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, p) in points.iter().enumerate() {
            if visited[j] {
                continue;
            }
            let d = euclidean(&points[current], p);
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        visited[best] = true;
        tour.push(best);
        current = best;
    }
    tour
}

/// Slopes between consecutive tour points, skipping zero-length steps.
pub fn tour_slopes(points: &[Vec<f64>], y: &[f64], tour: &[usize]) -> Vec<f64> {
    tour.windows(2)
        .filter_map(|w| {
            let d = euclidean(&points[w[0]], &points[w[1]]);
            (d > 0.0).then(|| (y[w[1]] - y[w[0]]) / d)
        })
        .collect()
}

fn symbol(slope: f64, eps: f64) -> i8 {
    if slope.abs() > eps {
        if slope > 0.0 {
            1
        } else {
            -1
        }
    } else {
        0
    }
}

/// Entropy (base 6) of unequal consecutive symbol pairs at threshold `eps`.
pub fn symbol_entropy(slopes: &[f64], eps: f64) -> f64 {
    if slopes.len() < 2 {
        return 0.0;
    }
    let mut counts = [[0usize; 3]; 3];
    let mut prev = symbol(slopes[0], eps);
    for &s in &slopes[1..] {
        let cur = symbol(s, eps);
        counts[(prev + 1) as usize][(cur + 1) as usize] += 1;
        prev = cur;
    }
    let total = (slopes.len() - 1) as f64;
    let ln6 = log(6.0);
    let mut h = 0.0;
    for (a, row) in counts.iter().enumerate() {
        for (b, &c) in row.iter().enumerate() {
            if a != b && c > 0 {
                let p = c as f64 / total;
                h -= p * log(p) / ln6;
            }
        }
    }
    h
}

/// Length of the symbol string after dropping zeros and collapsing runs,
/// relative to the number of tour steps.
pub fn partial_information(slopes: &[f64], eps: f64) -> f64 {
    if slopes.is_empty() {
        return 0.0;
    }
    let mut len = 0usize;
    let mut last = 0i8;
    for &s in slopes {
        let c = symbol(s, eps);
        if c != 0 && c != last {
            len += 1;
            last = c;
        }
    }
    len as f64 / slopes.len() as f64
}

/// Features from precomputed tour slopes.
pub fn features_from_slopes(slopes: &[f64], cfg: &ElaConfig) -> FeatureVector {
    let mut fv = FeatureVector::new();
    let grid = &cfg.ic_epsilons;
    let h0 = symbol_entropy(slopes, 0.0);
    let m0 = partial_information(slopes, 0.0);
    let h: Vec<f64> = grid.iter().map(|&e| symbol_entropy(slopes, e)).collect();
    let m: Vec<f64> = grid.iter().map(|&e| partial_information(slopes, e)).collect();

    fv.push_value(NAMES[0], h.iter().copied().fold(h0, f64::max));
    match h.iter().position(|&v| v < cfg.ic_settling) {
        Some(i) => fv.push_value(NAMES[1], log10(grid[i])),
        None => fv.push_missing(NAMES[1], MissingReason::NoThreshold),
    }
    let mut arg = 0;
    for (i, &v) in h.iter().enumerate() {
        if v > h[arg] {
            arg = i;
        }
    }
    fv.push_value(NAMES[2], log10(grid[arg]));
    match m.iter().position(|&v| v <= 0.5 * m0) {
        Some(i) => fv.push_value(NAMES[3], log10(grid[i])),
        None => fv.push_missing(NAMES[3], MissingReason::NoThreshold),
    }
    fv.push_value(NAMES[4], m0);
    fv
}

/// Canonical row order: lexicographic on coordinates, then objective, then
/// original index.
pub fn canonical_order(pd: &ProcessedDesign) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pd.n()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&pd.xn()[a], &pd.xn()[b]);
        ra.iter()
            .zip(rb)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(pd.yn()[a].total_cmp(&pd.yn()[b]))
            .then(a.cmp(&b))
    });
    order
}

pub fn information_content(pd: &ProcessedDesign, cfg: &ElaConfig, seed: u64) -> FeatureVector {
    let n = pd.n();
    if n < 3 {
        let mut fv = FeatureVector::new();
        NAMES.iter().for_each(|name| fv.push_missing(*name, MissingReason::InsufficientSample));
        return fv;
    }
    let order = canonical_order(pd);
    let points: Vec<Vec<f64>> = order.iter().map(|&i| pd.xn()[i].clone()).collect();
    let y: Vec<f64> = order.iter().map(|&i| pd.yn()[i]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.random_range(0..n);
    let tour = nearest_neighbor_tour(&points, start);
    let slopes = tour_slopes(&points, &y, &tour);
    if slopes.is_empty() {
        let mut fv = FeatureVector::new();
        NAMES.iter().for_each(|name| fv.push_missing(*name, MissingReason::Degenerate));
        return fv;
    }
    features_from_slopes(&slopes, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| vec![i as f64 / (n - 1) as f64]).collect()
    }

    #[test]
    fn constant_landscape() {
        let pd = ProcessedDesign::from_unit(line(20), vec![0.0; 20]).unwrap();
        let fv = information_content(&pd, &ElaConfig::default(), 3);
        assert_eq!(fv.value("ic.h.max"), Some(0.0));
        assert_eq!(fv.value("ic.m0"), Some(0.0));
    }

    #[test]
    fn alternating_entropy_by_hand() {
        let pts = line(12);
        let y: Vec<f64> = (0..12).map(|i| (i % 2) as f64).collect();
        let tour = nearest_neighbor_tour(&pts, 0);
        assert_eq!(tour, (0..12).collect::<Vec<_>>());
        let slopes = tour_slopes(&pts, &y, &tour);
        // 11 symbols, 10 pairs: 5 of (+,-) and 5 of (-,+)
        let h = symbol_entropy(&slopes, 0.0);
        let by_hand = -(0.5 * log(0.5) / log(6.0)) * 2.0;
        assert!((h - by_hand).abs() < 1e-12);
        assert!((h - 0.3869).abs() < 1e-4);
    }

    #[test]
    fn monotone_sequence() {
        let pts = line(10);
        let y: Vec<f64> = (0..10).map(|i| i as f64 / 9.0).collect();
        let slopes = tour_slopes(&pts, &y, &nearest_neighbor_tour(&pts, 0));
        assert_eq!(symbol_entropy(&slopes, 0.0), 0.0);
        assert!(partial_information(&slopes, 0.0) <= 1.0 / 9.0 + 1e-15);
    }

    #[test]
    fn duplicates_are_skipped() {
        let pts = vec![vec![0.0], vec![0.0], vec![0.0]];
        let pd = ProcessedDesign::from_unit(pts, vec![0.0, 0.5, 1.0]).unwrap();
        let fv = information_content(&pd, &ElaConfig::default(), 0);
        assert_eq!(fv.value("ic.h.max"), None);
        assert_eq!(fv.len(), 5);
    }

    #[test]
    fn row_order_does_not_matter() {
        let pts: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![((i * 7) % 30) as f64 / 29.0, ((i * 11) % 30) as f64 / 29.0])
            .collect();
        let y: Vec<f64> = pts.iter().map(|p| ((p[0] - 0.3).abs() + p[1] * p[1] / 2.0) / 1.2).collect();
        let a = information_content(&ProcessedDesign::from_unit(pts.clone(), y.clone()).unwrap(), &ElaConfig::default(), 9);
        let mut idx: Vec<usize> = (0..30).collect();
        idx.reverse();
        let pts2 = idx.iter().map(|&i| pts[i].clone()).collect();
        let y2 = idx.iter().map(|&i| y[i]).collect();
        let b = information_content(&ProcessedDesign::from_unit(pts2, y2).unwrap(), &ElaConfig::default(), 9);
        assert_eq!(a, b);
    }
}
