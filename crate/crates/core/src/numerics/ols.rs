//! Ordinary least squares via Householder QR with an explicit rank check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::mat::{invert_upper, qr_solve_prep, solve_upper, Matrix};

/// A fitted least-squares regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub r_squared: f64,
    pub n_obs: usize,
    pub n_params: usize,
}

/// Ratio of the smallest to largest R diagonal below which the design is
/// declared rank deficient.
const RANK_TOL: f64 = 1e-10;

/// Fits `y = X b + e` and reports coefficient standard errors from
/// `s^2 (X'X)^{-1}`. The design must have more rows than columns and full
/// column rank; a dependent column is reported by index.
pub fn ols(design: &Matrix, response: &[f64]) -> Result<OlsFit> {
    let n = design.rows();
    let k = design.cols();
    if response.len() != n {
        return Err(Error::input(format!(
            "design has {n} rows but response has {}",
            response.len()
        )));
    }
    if n <= k {
        return Err(Error::input(format!(
            "need more observations ({n}) than parameters ({k})"
        )));
    }
    for (j, v) in response.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::input(format!("response contains non-finite value at row {j}")));
        }
    }

    let (r, qty) = qr_solve_prep(design, response)?;
    let max_diag = (0..k).fold(0.0f64, |m, i| m.max(r.get(i, i).abs()));
    for j in 0..k {
        if r.get(j, j).abs() <= RANK_TOL * max_diag {
            return Err(Error::numeric(format!(
                "design is rank deficient: column {j} is linearly dependent"
            )));
        }
    }
    let coefficients = solve_upper(&r, &qty[..k])?;

    let fitted = design.matvec(&coefficients)?;
    let residuals: Vec<f64> = response
        .iter()
        .zip(&fitted)
        .map(|(y, f)| y - f)
        .collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = rss / (n - k) as f64;

    // diag of (X'X)^{-1} = row norms of R^{-1}.
    let r_inv = invert_upper(&r)?;
    let mut std_errors = vec![0.0; k];
    for i in 0..k {
        let mut acc = 0.0;
        for j in 0..k {
            acc += r_inv.get(i, j) * r_inv.get(i, j);
        }
        std_errors[i] = (sigma2 * acc).sqrt();
    }
    let t_stats: Vec<f64> = coefficients
        .iter()
        .zip(&std_errors)
        .map(|(b, s)| if *s > 0.0 { b / s } else { f64::NAN })
        .collect();

    // Center the total sum of squares only when the design spans a constant.
    let has_constant = (0..k).any(|j| {
        let first = design.get(0, j);
        first != 0.0 && (0..n).all(|i| design.get(i, j) == first)
    });
    let tss = if has_constant {
        let mean = response.iter().sum::<f64>() / n as f64;
        response.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>()
    } else {
        response.iter().map(|y| y * y).sum::<f64>()
    };
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { f64::NAN };

    Ok(OlsFit {
        coefficients,
        std_errors,
        t_stats,
        residuals,
        rss,
        r_squared,
        n_obs: n,
        n_params: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(cols: &[Vec<f64>]) -> Matrix {
        Matrix::from_columns(cols).unwrap()
    }

    #[test]
    fn exact_line_is_recovered() {
        let x = design(&[vec![1.0; 5], vec![0.0, 1.0, 2.0, 3.0, 4.0]]);
        let y: Vec<f64> = (0..5).map(|i| 2.0 + 3.0 * i as f64).collect();
        let fit = ols(&x, &y).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 3.0).abs() < 1e-12);
        assert!(fit.rss < 1e-20);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_frozen_three_column_fit() {
        // Coefficients, standard errors, RSS, and R^2 for this fixed
        // 12-row problem were computed with an independent linear algebra
        // stack and frozen.
        let c2 = vec![0.5, 1.5, -0.7, 2.2, 0.1, -1.3, 3.0, 0.8, -2.1, 1.1, 0.4, -0.9];
        let c3 = vec![-1.2, 0.3, 2.1, -0.4, 1.1, -0.8, 0.6, -1.9, 0.2, 1.4, -0.6, 2.5];
        let y = vec![1.2, 3.4, 0.1, 5.0, 1.8, -1.5, 6.6, 2.4, -3.1, 3.3, 1.9, -0.2];
        let x = design(&[vec![1.0; 12], c2, c3]);
        let fit = ols(&x, &y).unwrap();
        let want_b = [0.9809916812419501, 1.844803286349476, 0.19454688117848554];
        let want_se = [0.09308356588815007, 0.06246429105854423, 0.0690764652336165];
        for i in 0..3 {
            assert!((fit.coefficients[i] - want_b[i]).abs() < 1e-10, "beta {i}");
            assert!((fit.std_errors[i] - want_se[i]).abs() < 1e-10, "se {i}");
        }
        assert!((fit.rss - 0.8181034322469323).abs() < 1e-10);
        assert!((fit.r_squared - 0.9898459489393552).abs() < 1e-10);
    }

    #[test]
    fn duplicate_column_is_flagged() {
        let a = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let x = design(&[vec![1.0; 5], a.clone(), a]);
        let err = ols(&x, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("rank deficient"), "{msg}");
        assert!(msg.contains("column 2"), "{msg}");
    }

    #[test]
    fn too_few_rows_is_an_error() {
        let x = design(&[vec![1.0, 1.0], vec![0.5, 0.6]]);
        assert!(ols(&x, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn residuals_orthogonal_to_design() {
        // Deterministic pseudo-random design; the normal equations force
        // X'e = 0 up to rounding.
        let mut state = 123456789u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        let n = 60;
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|j| {
                (0..n)
                    .map(|_| if j == 0 { 1.0 } else { next() })
                    .collect()
            })
            .collect();
        let y: Vec<f64> = (0..n).map(|_| next() * 2.0).collect();
        let x = design(&cols);
        let fit = ols(&x, &y).unwrap();
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for j in 0..4 {
            let dot: f64 = (0..n).map(|i| x.get(i, j) * fit.residuals[i]).sum();
            assert!(dot.abs() <= 1e-8 * ynorm.max(1.0), "column {j} dot {dot}");
        }
    }
}
