//! Linear and quadratic surrogate models (`ela_meta`).

use alloc::format;
use alloc::vec::Vec;

use super::{FeatureVector, MissingReason};
use crate::error::{Error, Result};
use crate::linalg::{self, LeastSquaresFit};
use crate::preprocess::ProcessedDesign;

pub(super) const NAMES: [&str; 9] = [
    "ela_meta.lin_simple.adj_r2",
    "ela_meta.lin_simple.intercept",
    "ela_meta.lin_simple.coef.min",
    "ela_meta.lin_simple.coef.max",
    "ela_meta.lin_simple.coef.max_by_min",
    "ela_meta.lin_w_interact.adj_r2",
    "ela_meta.quad_simple.adj_r2",
    "ela_meta.quad_simple.cond",
    "ela_meta.quad_w_interact.adj_r2",
];

/// Coefficients below this magnitude (normalized objective per unit of a
/// normalized column) are numerical noise; ratios over them are undefined.
const NEGLIGIBLE: f64 = 1e-9;

/// Least squares with intercept; requires `n > p + 1`.
///
/// Rank-deficient `z` gets the minimum-norm solution, flagged in the result.
pub fn fit_least_squares(z: &[Vec<f64>], y: &[f64]) -> Result<LeastSquaresFit> {
    let n = y.len();
    if z.len() != n {
        return Err(Error::InvalidArgument(format!("{} rows but {} responses", z.len(), n)));
    }
    let p = z.first().map_or(0, Vec::len);
    if z.iter().any(|r| r.len() != p) {
        return Err(Error::InvalidArgument("ragged design matrix".into()));
    }
    if n <= p + 1 {
        return Err(Error::InvalidArgument(format!("need n > p + 1, got n = {n}, p = {p}")));
    }
    Ok(linalg::fit_least_squares(z, y))
}

#[derive(Clone, Copy)]
enum Model {
    Linear,
    LinearInteract,
    Quadratic,
    QuadraticInteract,
}

/// Model terms in order: linear terms, then squares (quadratic models),
/// then cross products `i < j` (interaction models).
fn terms(x: &[f64], model: Model) -> Vec<f64> {
    let d = x.len();
    let mut t: Vec<f64> = x.to_vec();
    if matches!(model, Model::Quadratic | Model::QuadraticInteract) {
        t.extend(x.iter().map(|v| v * v));
    }
    if matches!(model, Model::LinearInteract | Model::QuadraticInteract) {
        for i in 0..d {
            for j in (i + 1)..d {
                t.push(x[i] * x[j]);
            }
        }
    }
    t
}

fn fit(pd: &ProcessedDesign, model: Model) -> Option<LeastSquaresFit> {
    let z: Vec<Vec<f64>> = pd.xn().iter().map(|r| terms(r, model)).collect();
    fit_least_squares(&z, pd.yn()).ok()
}

fn abs_extremes(coefs: &[f64]) -> (f64, f64) {
    coefs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), c| {
        (lo.min(c.abs()), hi.max(c.abs()))
    })
}

pub fn ela_meta(pd: &ProcessedDesign) -> FeatureVector {
    let mut fv = FeatureVector::new();
    let d = pd.dim();
    let short = MissingReason::InsufficientSample;

    match fit(pd, Model::Linear) {
        Some(lin) => {
            fv.push_value(NAMES[0], lin.adjusted_r2);
            fv.push_value(NAMES[1], lin.intercept);
            let (lo, hi) = abs_extremes(&lin.coefficients);
            fv.push_value(NAMES[2], lo);
            fv.push_value(NAMES[3], hi);
            if lo > NEGLIGIBLE {
                fv.push_value(NAMES[4], hi / lo);
            } else {
                fv.push_missing(NAMES[4], MissingReason::ZeroVariance);
            }
        }
        None => NAMES[..5].iter().for_each(|n| fv.push_missing(*n, short)),
    }
    match fit(pd, Model::LinearInteract) {
        Some(f) => fv.push_value(NAMES[5], f.adjusted_r2),
        None => fv.push_missing(NAMES[5], short),
    }
    match fit(pd, Model::Quadratic) {
        Some(f) => {
            fv.push_value(NAMES[6], f.adjusted_r2);
            let (lo, hi) = abs_extremes(&f.coefficients[d..2 * d]);
            if lo > NEGLIGIBLE {
                fv.push_value(NAMES[7], hi / lo);
            } else {
                fv.push_missing(NAMES[7], MissingReason::ZeroVariance);
            }
        }
        None => {
            fv.push_missing(NAMES[6], short);
            fv.push_missing(NAMES[7], short);
        }
    }
    match fit(pd, Model::QuadraticInteract) {
        Some(f) => fv.push_value(NAMES[8], f.adjusted_r2),
        None => fv.push_missing(NAMES[8], short),
    }
    fv
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn grid2(n: usize) -> Vec<Vec<f64>> {
        let mut pts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                pts.push(vec![i as f64 / (n - 1) as f64, ((j * 7 + i * 3) % n) as f64 / (n - 1) as f64]);
            }
        }
        pts
    }

    /// Normal-equations oracle on a 2-column problem with intercept.
    fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> [f64; 3] {
        // solve (A^T A) b = A^T y with A = [1, x1, x2] by Cramer's rule
        let mut m = [[0.0; 3]; 3];
        let mut r = [0.0; 3];
        for (row, yi) in x.iter().zip(y) {
            let a = [1.0, row[0], row[1]];
            for i in 0..3 {
                r[i] += a[i] * yi;
                for j in 0..3 {
                    m[i][j] += a[i] * a[j];
                }
            }
        }
        let det = |m: &[[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let d = det(&m);
        let mut out = [0.0; 3];
        for k in 0..3 {
            let mut mk = m;
            for i in 0..3 {
                mk[i][k] = r[i];
            }
            out[k] = det(&mk) / d;
        }
        out
    }

    #[test]
    fn linear_response_matches_normal_equations() {
        let x = grid2(9);
        let y: Vec<f64> = x.iter().map(|r| 2.0 * r[0] + 3.0 * r[1]).collect();
        let oracle = normal_equations(&x, &y);
        let fit = fit_least_squares(&x, &y).unwrap();
        assert!((fit.intercept - oracle[0]).abs() < 1e-9);
        assert!((fit.coefficients[0] - oracle[1]).abs() < 1e-9);
        assert!((fit.coefficients[1] - oracle[2]).abs() < 1e-9);
        assert!(oracle[0].abs() < 1e-9 && (oracle[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn linear_features() {
        let x = grid2(9);
        let raw: Vec<f64> = x.iter().map(|r| 2.0 * r[0] + 3.0 * r[1]).collect();
        let yn = crate::preprocess::normalize_objective(&raw).unwrap();
        let pd = ProcessedDesign::from_unit(x, yn).unwrap();
        let fv = ela_meta(&pd);
        assert!(fv.value("ela_meta.lin_simple.adj_r2").unwrap() > 1.0 - 1e-9);
        assert!((fv.value("ela_meta.lin_simple.coef.max_by_min").unwrap() - 1.5).abs() < 1e-9);
        assert!(fv.value("ela_meta.quad_simple.adj_r2").unwrap() > 1.0 - 1e-9);
        assert!(fv.value("ela_meta.quad_w_interact.adj_r2").unwrap() > 1.0 - 1e-9);
        assert!(fv.value("ela_meta.lin_w_interact.adj_r2").unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn sphere_condition_is_one() {
        let x = grid2(8);
        let raw: Vec<f64> = x.iter().map(|r| (r[0] - 0.4).powi(2) + (r[1] - 0.6).powi(2)).collect();
        let yn = crate::preprocess::normalize_objective(&raw).unwrap();
        let pd = ProcessedDesign::from_unit(x, yn).unwrap();
        let fv = ela_meta(&pd);
        assert!((fv.value("ela_meta.quad_simple.cond").unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn too_small_sample_marks_models_missing() {
        // d = 3: linear needs n > 4, quadratic simple n > 7, quadratic interact n > 10
        let x: Vec<Vec<f64>> = (0..6)
            .map(|i| vec![i as f64 / 5.0, ((i * 2) % 6) as f64 / 5.0, ((i * 5) % 6) as f64 / 5.0])
            .collect();
        let y: Vec<f64> = (0..6).map(|i| i as f64 / 5.0).collect();
        let fv = ela_meta(&ProcessedDesign::from_unit(x, y).unwrap());
        assert!(fv.value("ela_meta.lin_simple.adj_r2").is_some());
        assert_eq!(
            fv.get("ela_meta.quad_simple.cond"),
            Some(super::super::FeatureValue::Missing(MissingReason::InsufficientSample))
        );
        assert!(fv.value("ela_meta.quad_w_interact.adj_r2").is_none());
        assert_eq!(fv.len(), 9);
    }

    #[test]
    fn fit_rejects_small_n() {
        assert!(fit_least_squares(&[vec![1.0], vec![2.0]], &[1.0, 2.0]).is_err());
    }
}
