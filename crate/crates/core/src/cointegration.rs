//! Long-run equilibrium analysis: Engle-Granger two-step cointegration,
//! the Johansen rank test, and error-correction model estimation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{gen_eigen_sym, ols, spd_inverse, Matrix, OlsFit};
use crate::series::{LogSeries, TimeSeries};
use crate::unitroot::{adf_test_for_eg_residuals, AdfResult, InfoCriterion, LagOrder};

/// Result of the Engle-Granger two-step procedure: a static regression of
/// `y` on a constant and `x`, then a unit-root test on its residuals
/// against the residual-specific critical values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgResult {
    pub static_fit: OlsFit,
    pub intercept: f64,
    pub slope: f64,
    /// Residuals of the static regression, kept for error-correction
    /// model estimation.
    pub residuals: Vec<f64>,
    /// Absent when the residuals carry no variation (degenerate case).
    pub residual_adf: Option<AdfResult>,
    /// True when y is an exact affine function of x; the residual test is
    /// then undefined and the pair is trivially in equilibrium.
    pub degenerate: bool,
    pub cointegrated_at_5pct: bool,
}

/// Johansen trace / maximum-eigenvalue rank test under an unrestricted
/// constant. Statistics are indexed by candidate rank r = 0..k-1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohansenResult {
    /// Squared canonical correlations, descending, in [0, 1).
    pub eigenvalues: Vec<f64>,
    pub trace_stats: Vec<f64>,
    pub max_eig_stats: Vec<f64>,
    pub trace_cv_5pct: Vec<f64>,
    pub max_eig_cv_5pct: Vec<f64>,
    /// Smallest rank whose trace test fails to reject at 5%; equals k
    /// when every candidate rank rejects.
    pub selected_rank: usize,
    pub t_effective: usize,
    pub n_vars: usize,
    pub var_lags: usize,
}

/// Deterministic specification for the Johansen test. Only the
/// unrestricted-constant (drift) case is implemented.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum JohansenDet {
    #[default]
    UnrestrictedConstant,
}

/// Term selection for the error-correction model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EcmTerms {
    pub include_constant: bool,
    /// Adds the lagged dependent difference as a short-run regressor.
    pub include_lagged_dy: bool,
}

impl Default for EcmTerms {
    fn default() -> Self {
        EcmTerms {
            include_constant: true,
            include_lagged_dy: false,
        }
    }
}

/// Fitted error-correction model
/// `dy_t = a0 + b1 dx_t + c u_{t-1} (+ d dy_{t-1})`, where `u` is the
/// equilibrium error from the static regression. `adjustment_coef` is the
/// signed coefficient c (negative when the system corrects toward
/// equilibrium); `pi` carries the sign convention of writing the model
/// with a `- pi u_{t-1}` term, so `pi = -c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcmFit {
    pub adjustment_coef: f64,
    pub pi: f64,
    pub b1: f64,
    pub a0: Option<f64>,
    pub lagged_dy_coef: Option<f64>,
    pub included_terms: EcmTerms,
    pub fit: OlsFit,
    pub n_effective: usize,
}

fn check_same_dates(y: &LogSeries, x: &LogSeries) -> Result<()> {
    if y.dates() != x.dates() {
        return Err(Error::input(format!(
            "series '{}' and '{}' are not aligned on the same dates",
            y.label(),
            x.label()
        )));
    }
    Ok(())
}

/// Engle-Granger two-step test. Residual lag order follows the unit-root
/// module default (information-criterion choice up to the Schwert bound).
pub fn engle_granger(y: &LogSeries, x: &LogSeries) -> Result<EgResult> {
    engle_granger_with_lags(
        y,
        x,
        &LagOrder::Auto {
            max_lag: None,
            criterion: InfoCriterion::Bic,
        },
    )
}

/// Engle-Granger with an explicit residual-test lag order.
pub fn engle_granger_with_lags(
    y: &LogSeries,
    x: &LogSeries,
    residual_lags: &LagOrder,
) -> Result<EgResult> {
    check_same_dates(y, x)?;
    let n = y.len();
    if n < 25 {
        return Err(Error::input(format!(
            "cointegration test needs at least 25 shared observations, got {n}"
        )));
    }
    let mut design = Matrix::zeros(n, 2);
    for (r, v) in x.values().iter().enumerate() {
        design.set(r, 0, 1.0);
        design.set(r, 1, *v);
    }
    let static_fit = ols(&design, y.values())?;
    let residuals = static_fit.residuals.clone();
    let y_scale = y
        .values()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    let degenerate = residuals
        .iter()
        .all(|u| u.abs() < 1e-10 * y_scale);
    let (residual_adf, cointegrated) = if degenerate {
        (None, true)
    } else {
        let adf = adf_test_for_eg_residuals(&residuals, 2, residual_lags)?;
        let flag = adf.statistic < adf.critical_values.pct5;
        (Some(adf), flag)
    };
    Ok(EgResult {
        intercept: static_fit.coefficients[0],
        slope: static_fit.coefficients[1],
        residuals,
        residual_adf,
        degenerate,
        cointegrated_at_5pct: cointegrated,
        static_fit,
    })
}

// 5% critical values for the unrestricted-constant case, indexed by
// k - r = 1..4 (number of common trends under the null). Source:
// MacKinnon, Haug, Michelis, "Numerical Distribution Functions of
// Likelihood Ratio Tests for Cointegration" (J. Applied Econometrics 14,
// 1999), as tabulated for the drift case.
const TRACE_CV5: [f64; 4] = [3.8415, 15.4943, 29.7961, 47.8545];
const MAXEIG_CV5: [f64; 4] = [3.8415, 14.2639, 21.1314, 27.5858];

/// Residuals of each column of `targets` after projecting out `design`.
fn partial_out(design: &Matrix, targets: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    targets
        .iter()
        .map(|col| Ok(ols(design, col)?.residuals))
        .collect()
}

fn cross_moment(a: &[Vec<f64>], b: &[Vec<f64>], t_eff: f64) -> Matrix {
    let mut m = Matrix::zeros(a.len(), b.len());
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            let s: f64 = ai.iter().zip(bj).map(|(u, v)| u * v).sum();
            m.set(i, j, s / t_eff);
        }
    }
    m
}

/// Johansen rank test on a k-variate system (k between 2 and 4) with
/// `var_lags` lagged differences in the auxiliary regressions.
pub fn johansen(z: &[Vec<f64>], var_lags: usize, det_case: JohansenDet) -> Result<JohansenResult> {
    let JohansenDet::UnrestrictedConstant = det_case;
    let k = z.len();
    if !(2..=4).contains(&k) {
        return Err(Error::input(format!(
            "rank test supports 2 to 4 variables, got {k}"
        )));
    }
    let t_len = z[0].len();
    if z.iter().any(|col| col.len() != t_len) {
        return Err(Error::input("system variables differ in length"));
    }
    if z.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::input("system contains a non-finite value"));
    }
    if t_len <= 10 * k * var_lags.max(1) {
        return Err(Error::input(format!(
            "{t_len} observations are too few for {k} variables with {var_lags} lags"
        )));
    }

    // First differences per variable.
    let dz: Vec<Vec<f64>> = z
        .iter()
        .map(|col| (1..t_len).map(|t| col[t] - col[t - 1]).collect())
        .collect();
    let t_eff = t_len - 1 - var_lags;

    // Auxiliary design: constant plus var_lags lagged differences of
    // every variable.
    let n_cols = 1 + k * var_lags;
    let mut design = Matrix::zeros(t_eff, n_cols);
    for (r, t) in (var_lags..t_len - 1).enumerate() {
        design.set(r, 0, 1.0);
        let mut c = 1;
        for lag in 1..=var_lags {
            for var in dz.iter() {
                design.set(r, c, var[t - lag]);
                c += 1;
            }
        }
    }
    let d_now: Vec<Vec<f64>> = dz
        .iter()
        .map(|var| (var_lags..t_len - 1).map(|t| var[t]).collect())
        .collect();
    let level_lag: Vec<Vec<f64>> = z
        .iter()
        .map(|var| (var_lags..t_len - 1).map(|t| var[t]).collect())
        .collect();

    let r0 = partial_out(&design, &d_now)
        .map_err(|e| Error::numeric(format!("short-run regression failed: {e}")))?;
    let r1 = partial_out(&design, &level_lag)
        .map_err(|e| Error::numeric(format!("level regression failed: {e}")))?;

    let tf = t_eff as f64;
    let s00 = cross_moment(&r0, &r0, tf);
    let s11 = cross_moment(&r1, &r1, tf);
    let s01 = cross_moment(&r0, &r1, tf);
    let s00_inv = spd_inverse(&s00)
        .map_err(|_| Error::numeric("short-run moment matrix is singular"))?;
    // M = S10 S00^-1 S01, symmetrized against roundoff.
    let s10 = s01.transpose();
    let m_raw = s10.matmul(&s00_inv)?.matmul(&s01)?;
    let mut m = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            m.set(i, j, 0.5 * (m_raw.get(i, j) + m_raw.get(j, i)));
        }
    }
    let (raw_eigs, _) = gen_eigen_sym(&m, &s11)
        .map_err(|_| Error::numeric("level moment matrix is singular"))?;

    let mut eigenvalues = Vec::with_capacity(k);
    for lambda in raw_eigs {
        if lambda < -1e-8 || lambda > 1.0 + 1e-8 {
            return Err(Error::numeric(format!(
                "canonical correlation {lambda} outside [0, 1]"
            )));
        }
        eigenvalues.push(lambda.clamp(0.0, 1.0 - 1e-12));
    }

    let mut trace_stats = Vec::with_capacity(k);
    let mut max_eig_stats = Vec::with_capacity(k);
    let mut trace_cv = Vec::with_capacity(k);
    let mut max_cv = Vec::with_capacity(k);
    for r in 0..k {
        let trace: f64 = eigenvalues[r..]
            .iter()
            .map(|l| -(tf) * (1.0 - l).ln())
            .sum();
        trace_stats.push(trace);
        max_eig_stats.push(-(tf) * (1.0 - eigenvalues[r]).ln());
        trace_cv.push(TRACE_CV5[k - r - 1]);
        max_cv.push(MAXEIG_CV5[k - r - 1]);
    }
    let selected_rank = (0..k)
        .find(|&r| trace_stats[r] < trace_cv[r])
        .unwrap_or(k);

    Ok(JohansenResult {
        eigenvalues,
        trace_stats,
        max_eig_stats,
        trace_cv_5pct: trace_cv,
        max_eig_cv_5pct: max_cv,
        selected_rank,
        t_effective: t_eff,
        n_vars: k,
        var_lags,
    })
}

/// Error-correction model for `y` given `x` and the equilibrium errors
/// `residuals` from the static cointegrating regression (one residual per
/// shared observation).
pub fn fit_ecm(
    y: &LogSeries,
    x: &LogSeries,
    residuals: &[f64],
    terms: EcmTerms,
) -> Result<EcmFit> {
    check_same_dates(y, x)?;
    let n = y.len();
    if residuals.len() != n {
        return Err(Error::input(format!(
            "{} equilibrium errors for {n} observations",
            residuals.len()
        )));
    }
    let start = if terms.include_lagged_dy { 2 } else { 1 };
    let rows = n.checked_sub(start).unwrap_or(0);
    let n_cols = usize::from(terms.include_constant) + 2 + usize::from(terms.include_lagged_dy);
    if rows < n_cols + 3 {
        return Err(Error::input(format!(
            "{n} observations are too few for the error-correction regression"
        )));
    }
    let yv = y.values();
    let xv = x.values();
    let mut design = Matrix::zeros(rows, n_cols);
    let mut response = Vec::with_capacity(rows);
    for (r, t) in (start..n).enumerate() {
        let mut c = 0;
        if terms.include_constant {
            design.set(r, c, 1.0);
            c += 1;
        }
        design.set(r, c, xv[t] - xv[t - 1]);
        c += 1;
        design.set(r, c, residuals[t - 1]);
        c += 1;
        if terms.include_lagged_dy {
            design.set(r, c, yv[t - 1] - yv[t - 2]);
        }
        response.push(yv[t] - yv[t - 1]);
    }
    let fit = ols(&design, &response)?;
    let base = usize::from(terms.include_constant);
    let adjustment_coef = fit.coefficients[base + 1];
    Ok(EcmFit {
        adjustment_coef,
        pi: -adjustment_coef,
        b1: fit.coefficients[base],
        a0: terms.include_constant.then(|| fit.coefficients[0]),
        lagged_dy_coef: terms
            .include_lagged_dy
            .then(|| fit.coefficients[base + 2]),
        included_terms: terms,
        n_effective: rows,
        fit,
    })
}
