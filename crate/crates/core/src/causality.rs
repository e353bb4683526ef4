//! Granger causality: nested-regression F tests for lead-lag predictive
//! content between two aligned stationary series, in both directions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{run_batch, ExecMode};
use crate::numerics::{dist_cdf, ols, Dist, Matrix};

/// Two-directional Granger test at a single lag order. The F statistics
/// compare the unrestricted regression (own lags plus the other series'
/// lags) against the restriction that the other series' lags are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerResult {
    pub lag: usize,
    pub f_x_to_y: f64,
    pub p_x_to_y: f64,
    pub f_y_to_x: f64,
    pub p_y_to_x: f64,
    /// Shared estimation sample length, n - lag.
    pub n_effective: usize,
}

fn lagged_design(dep: &[f64], other: &[f64], lag: usize, with_other: bool) -> Matrix {
    let n = dep.len();
    let rows = n - lag;
    let n_cols = 1 + lag + if with_other { lag } else { 0 };
    let mut design = Matrix::zeros(rows, n_cols);
    for (r, t) in (lag..n).enumerate() {
        design.set(r, 0, 1.0);
        for j in 1..=lag {
            design.set(r, j, dep[t - j]);
            if with_other {
                design.set(r, lag + j, other[t - j]);
            }
        }
    }
    design
}

/// F test that `other` fails to Granger-cause `dep` at the given lag.
/// Returns (F, p).
fn direction_test(dep: &[f64], other: &[f64], lag: usize) -> Result<(f64, f64)> {
    let response: Vec<f64> = dep[lag..].to_vec();
    let unrestricted = ols(&lagged_design(dep, other, lag, true), &response)
        .map_err(|e| Error::numeric(format!("lag regression failed (collinear lags?): {e}")))?;
    let restricted = ols(&lagged_design(dep, other, lag, false), &response)?;
    let t_eff = response.len() as f64;
    let df_den = t_eff - 2.0 * lag as f64 - 1.0;
    let num = (restricted.rss - unrestricted.rss) / lag as f64;
    let den = unrestricted.rss / df_den;
    if den <= 0.0 {
        return Err(Error::numeric(
            "unrestricted regression has zero residual variance",
        ));
    }
    // Nesting guarantees RSS_r >= RSS_u up to roundoff.
    let f_stat = (num / den).max(0.0);
    let p = 1.0
        - dist_cdf(
            Dist::F {
                d1: lag as f64,
                d2: df_den,
            },
            f_stat,
        )?;
    Ok((f_stat, p.clamp(0.0, 1.0)))
}

/// Granger test between aligned samples at one lag order, reporting both
/// directions on the shared effective sample.
pub fn granger_test(y: &[f64], x: &[f64], lag: usize) -> Result<GrangerResult> {
    if lag == 0 {
        return Err(Error::input("lag order must be at least 1"));
    }
    if y.len() != x.len() {
        return Err(Error::input(format!(
            "samples differ in length: {} vs {}",
            y.len(),
            x.len()
        )));
    }
    let n = y.len();
    if n <= 3 * lag + 2 {
        return Err(Error::input(format!(
            "{n} observations are too few for a lag-{lag} causality test"
        )));
    }
    if y.iter().chain(x.iter()).any(|v| !v.is_finite()) {
        return Err(Error::input("samples contain a non-finite value"));
    }
    let (f_x_to_y, p_x_to_y) = direction_test(y, x, lag)?;
    let (f_y_to_x, p_y_to_x) = direction_test(x, y, lag)?;
    Ok(GrangerResult {
        lag,
        f_x_to_y,
        p_x_to_y,
        f_y_to_x,
        p_y_to_x,
        n_effective: n - lag,
    })
}

/// Runs `granger_test` for every lag 1..=max_lag; lags are independent,
/// so the batch can execute in parallel.
pub fn granger_scan(
    y: &[f64],
    x: &[f64],
    max_lag: usize,
    mode: ExecMode,
) -> Result<Vec<GrangerResult>> {
    if max_lag == 0 {
        return Err(Error::input("maximum lag must be at least 1"));
    }
    run_batch(mode, max_lag, |i| granger_test(y, x, i + 1))
        .into_iter()
        .collect()
}
