//! Nearest-better clustering (`nbc`).

use alloc::vec;
use alloc::vec::Vec;

use super::{FeatureValue, FeatureVector, MissingReason};
use crate::math::{euclidean, mean, pearson, sd};
use crate::preprocess::ProcessedDesign;

pub(super) const NAMES: [&str; 5] = [
    "nbc.nn_nb.sd_ratio",
    "nbc.nn_nb.mean_ratio",
    "nbc.nn_nb.cor",
    "nbc.dist_ratio.coeff_var",
    "nbc.nb_fitness.cor",
];

/// Nearest-neighbor and nearest-better structure of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestBetter {
    /// Index of the best row (lowest objective, then lowest index).
    pub best: usize,
    /// Distance to the nearest other row, for every row.
    pub nn_dist: Vec<f64>,
    /// Nearest strictly better row and its distance; `None` for the best.
    pub nearest_better: Vec<Option<(usize, f64)>>,
}

/// `j` is better than `i` when its objective is lower, or equal with a
/// lower row index.
fn better(y: &[f64], j: usize, i: usize) -> bool {
    y[j] < y[i] || (y[j] == y[i] && j < i)
}

pub fn nearest_better(points: &[Vec<f64>], y: &[f64]) -> NearestBetter {
    let n = y.len();
    let mut nn_dist = vec![f64::INFINITY; n];
    let mut nearest_better = vec![None; n];
    for i in 0..n {
        let mut nb: Option<(usize, f64)> = None;
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = euclidean(&points[i], &points[j]);
            if d < nn_dist[i] {
                nn_dist[i] = d;
            }
            if better(y, j, i) && nb.is_none_or(|(_, bd)| d < bd) {
                nb = Some((j, d));
            }
        }
        nearest_better[i] = nb;
    }
    let best = (0..n).find(|&i| nearest_better[i].is_none()).unwrap_or(0);
    NearestBetter {
        best,
        nn_dist,
        nearest_better,
    }
}

pub fn nearest_better_clustering(pd: &ProcessedDesign) -> FeatureVector {
    let mut fv = FeatureVector::new();
    let y = pd.yn();
    let n = y.len();
    let all_equal = y.iter().all(|&v| v == y[0]);
    if n < 3 || all_equal {
        let reason = if n < 3 { MissingReason::InsufficientSample } else { MissingReason::Degenerate };
        NAMES.iter().for_each(|name| fv.push_missing(*name, reason));
        return fv;
    }
    let nb = nearest_better(pd.xn(), y);
    let mut d_nn = Vec::with_capacity(n - 1);
    let mut d_nb = Vec::with_capacity(n - 1);
    let mut indegree = vec![0.0; n];
    for i in 0..n {
        if let Some((j, d)) = nb.nearest_better[i] {
            d_nn.push(nb.nn_dist[i]);
            d_nb.push(d);
            indegree[j] += 1.0;
        }
    }
    let ratio = |a: f64, b: f64| {
        if b > 0.0 {
            FeatureValue::from_f64(a / b)
        } else {
            FeatureValue::Missing(MissingReason::ZeroVariance)
        }
    };
    fv.push(NAMES[0], ratio(sd(&d_nn), sd(&d_nb)));
    fv.push(NAMES[1], ratio(mean(&d_nn), mean(&d_nb)));
    fv.push(NAMES[2], pearson(&d_nn, &d_nb).into());
    if d_nn.iter().all(|&d| d > 0.0) {
        let r: Vec<f64> = d_nb.iter().zip(&d_nn).map(|(b, a)| b / a).collect();
        fv.push(NAMES[3], ratio(sd(&r), mean(&r)));
    } else {
        fv.push_missing(NAMES[3], MissingReason::Degenerate);
    }
    fv.push(NAMES[4], pearson(y, &indegree).into());
    fv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_by_hand() {
        // X = [0, 1, 2, 3] scaled by 1/4 so every gap is exact
        let x = vec![vec![0.0], vec![0.25], vec![0.5], vec![0.75]];
        let y = vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        let nb = nearest_better(&x, &y);
        assert_eq!(nb.best, 0);
        for i in 1..4 {
            let (j, d) = nb.nearest_better[i].unwrap();
            assert_eq!(j, i - 1);
            assert_eq!(d, nb.nn_dist[i]);
        }
        let fv = nearest_better_clustering(&ProcessedDesign::from_unit(x, y).unwrap());
        assert_eq!(fv.value("nbc.nn_nb.mean_ratio"), Some(1.0));
        assert_eq!(fv.value("nbc.nn_nb.sd_ratio"), None);
    }

    #[test]
    fn flat_objective_missing() {
        let x = vec![vec![0.0], vec![0.5], vec![1.0]];
        let fv = nearest_better_clustering(&ProcessedDesign::from_unit(x, vec![0.0; 3]).unwrap());
        assert_eq!(fv.defined(), 0);
        assert_eq!(fv.len(), 5);
    }

    #[test]
    fn ties_broken_by_index() {
        let x = vec![vec![0.0], vec![1.0], vec![0.5]];
        let y = vec![0.5, 0.5, 0.0];
        let nb = nearest_better(&x, &y);
        assert_eq!(nb.best, 2);
        assert_eq!(nb.nearest_better[1].unwrap().0, 2);
        assert_eq!(nb.nearest_better[0].unwrap().0, 2);
    }
}
