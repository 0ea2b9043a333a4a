//! Small dense linear algebra: one-sided Jacobi SVD for least squares and a
//! cyclic Jacobi eigensolver for symmetric matrices.
//!
//! Problem sizes here are tiny (tens of columns), so the Jacobi methods are
//! accurate and fast enough without pulling in a BLAS.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;

const MAX_SWEEPS: usize = 60;

/// Result of an ordinary least-squares fit with intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub r2: f64,
    pub adjusted_r2: f64,
    /// Numerical rank of the centered design matrix.
    pub rank: usize,
    /// Set when the centered design was rank deficient and the minimum-norm
    /// solution was returned.
    pub rank_deficient: bool,
}

/// One-sided Jacobi SVD in raw form: `W = A V` with mutually orthogonal
/// columns.
struct JacobiSvd {
    /// Columns of `A V`; the norm of column k is singular value k.
    w: Vec<Vec<f64>>,
    /// Right singular vectors as columns.
    v: Vec<Vec<f64>>,
    sigma: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(a: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = a.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// `columns` holds the matrix column by column.
fn jacobi_svd(columns: Vec<Vec<f64>>) -> JacobiSvd {
    let p = columns.len();
    let mut w = columns;
    let mut v: Vec<Vec<f64>> = (0..p)
        .map(|k| {
            let mut e = vec![0.0; p];
            e[k] = 1.0;
            e
        })
        .collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..p {
            for j in (i + 1)..p {
                let alpha = dot(&w[i], &w[i]);
                let beta = dot(&w[j], &w[j]);
                let gamma = dot(&w[i], &w[j]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + sqrt(1.0 + zeta * zeta));
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut w, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = w.iter().map(|c| sqrt(dot(c, c))).collect();
    JacobiSvd { w, v, sigma }
}

/// Ordinary least squares of `y` on the columns of `z` plus an intercept.
///
/// `z` is row-major with `p` columns. The intercept is handled by centering,
/// so a rank-deficient `z` yields the minimum-norm slope vector.
pub fn fit_least_squares(z: &[Vec<f64>], y: &[f64]) -> LeastSquaresFit {
    let n = y.len();
    let p = z.first().map_or(0, Vec::len);
    let ybar = y.iter().sum::<f64>() / n as f64;
    let means: Vec<f64> = (0..p)
        .map(|j| z.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let columns: Vec<Vec<f64>> = (0..p)
        .map(|j| z.iter().map(|r| r[j] - means[j]).collect())
        .collect();
    let yc: Vec<f64> = y.iter().map(|v| v - ybar).collect();

    let svd = jacobi_svd(columns);
    let smax = svd.sigma.iter().cloned().fold(0.0, f64::max);
    let tol = smax * (n.max(p) as f64) * f64::EPSILON;
    let mut coefficients = vec![0.0; p];
    let mut rank = 0;
    for k in 0..p {
        let s = svd.sigma[k];
        if s <= tol || s == 0.0 {
            continue;
        }
        rank += 1;
        let scale = dot(&svd.w[k], &yc) / (s * s);
        for (c, vk) in coefficients.iter_mut().zip(&svd.v[k]) {
            *c += scale * vk;
        }
    }
    let intercept = ybar - dot(&means, &coefficients);

    let sst: f64 = yc.iter().map(|v| v * v).sum();
    let sse: f64 = z
        .iter()
        .zip(y)
        .map(|(row, yi)| {
            let r = yi - intercept - dot(row, &coefficients);
            r * r
        })
        .sum();
    let r2 = if sst > 0.0 { 1.0 - sse / sst } else { 0.0 };
    let adjusted_r2 = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - p as f64 - 1.0);
    LeastSquaresFit {
        coefficients,
        intercept,
        r2,
        adjusted_r2,
        rank,
        rank_deficient: rank < p,
    }
}

/// Eigendecomposition of a symmetric matrix (row-major, `m x m`).
///
/// Returns eigenvalues in descending order with matching unit eigenvectors.
pub fn symmetric_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..m)
        .map(|k| {
            let mut e = vec![0.0; m];
            e[k] = 1.0;
            e
        })
        .collect();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..m).map(|i| a[i][i] * a[i][i]).sum();
        if off <= f64::EPSILON * f64::EPSILON * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + sqrt(1.0 + theta * theta));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]).then(i.cmp(&j)));
    let values = order.iter().map(|&k| a[k][k]).collect();
    let vectors = order
        .iter()
        .map(|&k| v.iter().map(|row| row[k]).collect())
        .collect();
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_linear_fit() {
        let z: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let a = i as f64 / 19.0;
                alloc::vec![a, (a * 7.3).sin().abs()]
            })
            .collect();
        let y: Vec<f64> = z.iter().map(|r| 2.0 * r[0] + 3.0 * r[1]).collect();
        let fit = fit_least_squares(&z, &y);
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-10);
        assert!((fit.coefficients[1] - 3.0).abs() < 1e-10);
        assert!(fit.intercept.abs() < 1e-10);
        assert!(fit.adjusted_r2 > 1.0 - 1e-9);
        assert!(!fit.rank_deficient);
    }

    #[test]
    fn constant_response() {
        let z: Vec<Vec<f64>> = (0..10).map(|i| alloc::vec![i as f64, (i * i) as f64]).collect();
        let fit = fit_least_squares(&z, &[4.0; 10]);
        assert_eq!(fit.r2, 0.0);
        assert!(fit.coefficients.iter().all(|c| c.abs() < 1e-12));
        assert!((fit.intercept - 4.0).abs() < 1e-12);
    }

    #[test]
    fn duplicated_column_takes_minimum_norm() {
        let z: Vec<Vec<f64>> = (0..10).map(|i| alloc::vec![i as f64, i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| 2.0 * i as f64).collect();
        let fit = fit_least_squares(&z, &y);
        assert!(fit.rank_deficient);
        assert_eq!(fit.rank, 1);
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-10);
        assert!((fit.coefficients[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eigen_of_known_matrix() {
        let a = alloc::vec![alloc::vec![2.0, 1.0], alloc::vec![1.0, 2.0]];
        let (vals, vecs) = symmetric_eigen(&a);
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        let v0 = &vecs[0];
        assert!((v0[0].abs() - v0[1].abs()).abs() < 1e-12);
        assert!((v0[0] * v0[0] + v0[1] * v0[1] - 1.0).abs() < 1e-12);
    }
}
