//! Descriptive diagnostics for return series: moment summaries,
//! autocorrelation and partial autocorrelation, Ljung-Box portmanteau
//! statistics, and histogram binning for distribution plots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::dist::{chi2_cdf, quantile_by_bisection};

/// Moment summary of a sample.
///
/// Skewness and kurtosis use the biased moment estimators (denominator n);
/// the standard deviation uses the n-1 denominator. `kurtosis_raw` is the
/// plain fourth standardized moment, so 3 for a normal sample in the
/// limit; `kurtosis_excess` subtracts the 3. For constant samples the
/// shape statistics are undefined and reported as `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n_obs: usize,
    pub mean: f64,
    /// Arithmetic mean of the log-return sample, which is the per-period
    /// geometric growth rate of the underlying price level.
    pub geo_mean_rate: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub skewness: Option<f64>,
    pub kurtosis_raw: Option<f64>,
    pub kurtosis_excess: Option<f64>,
}

/// One correlogram line: autocorrelation, partial autocorrelation, and the
/// cumulative Ljung-Box statistic at this lag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelogramRow {
    pub lag: usize,
    pub ac: f64,
    pub pac: f64,
    pub q_stat: f64,
    pub p_value: f64,
}

/// Distribution-of-coefficients view of a correlogram: moment summaries of
/// the AC and PAC vectors together with the final portmanteau statistic
/// and its chi-square reference point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelogramSummary {
    pub lags: usize,
    pub ac: SummaryStats,
    pub pac: SummaryStats,
    pub q_final: f64,
    pub q_final_p: f64,
    /// Degrees of freedom used for the printed chi-square reference,
    /// one less than the lag count in the conventional table layout.
    pub chi2_df: usize,
    pub chi2_5pct: f64,
}

/// Equal-width histogram. `edges` has one more entry than `counts`; every
/// bin is half-open except the rightmost, which includes its upper edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramData {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Moment summary of a nonempty sample.
pub fn summary(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::input("summary needs a nonempty sample"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let std_dev = if values.len() > 1 {
        (m2 * n / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let (skewness, kurtosis_raw, kurtosis_excess) = if m2 > 0.0 {
        let sk = m3 / m2.powf(1.5);
        let kr = m4 / (m2 * m2);
        (Some(sk), Some(kr), Some(kr - 3.0))
    } else {
        (None, None, None)
    };
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(SummaryStats {
        n_obs: values.len(),
        mean,
        geo_mean_rate: mean,
        std_dev,
        min,
        max,
        skewness,
        kurtosis_raw,
        kurtosis_excess,
    })
}

fn check_correlation_input(values: &[f64], max_lag: usize) -> Result<f64> {
    if max_lag == 0 {
        return Err(Error::input("max_lag must be at least 1"));
    }
    if values.len() <= max_lag {
        return Err(Error::input(format!(
            "max_lag {max_lag} requires more than {max_lag} observations, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let denom: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    if denom <= 0.0 {
        return Err(Error::input("series is constant; autocorrelation undefined"));
    }
    Ok(denom)
}

/// Sample autocorrelations for lags `0..=max_lag`, with the usual biased
/// estimator (full-sample denominator).
pub fn acf(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let denom = check_correlation_input(values, max_lag)?;
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut out = Vec::with_capacity(max_lag + 1);
    out.push(1.0);
    for k in 1..=max_lag {
        let mut num = 0.0;
        for t in 0..(n - k) {
            num += (values[t] - mean) * (values[t + k] - mean);
        }
        out.push(num / denom);
    }
    Ok(out)
}

/// Partial autocorrelations for lags `0..=max_lag` via the Durbin-Levinson
/// recursion on the sample autocorrelations. Lag 0 is reported as 1.
pub fn pacf(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let r = acf(values, max_lag)?;
    let mut out = vec![1.0];
    let mut phi_prev: Vec<f64> = Vec::new();
    for k in 1..=max_lag {
        let phi_kk = if k == 1 {
            r[1]
        } else {
            let num = r[k]
                - phi_prev
                    .iter()
                    .enumerate()
                    .map(|(j, p)| p * r[k - 1 - j])
                    .sum::<f64>();
            let den = 1.0
                - phi_prev
                    .iter()
                    .enumerate()
                    .map(|(j, p)| p * r[j + 1])
                    .sum::<f64>();
            if den.abs() < 1e-14 {
                return Err(Error::numeric(format!(
                    "partial autocorrelation recursion degenerate at lag {k}"
                )));
            }
            num / den
        };
        let mut phi_new = Vec::with_capacity(k);
        for j in 0..(k - 1) {
            phi_new.push(phi_prev[j] - phi_kk * phi_prev[k - 2 - j]);
        }
        phi_new.push(phi_kk);
        out.push(phi_kk);
        phi_prev = phi_new;
    }
    Ok(out)
}

/// One cumulative Ljung-Box line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LjungBoxRow {
    pub lag: usize,
    pub q_stat: f64,
    pub p_value: f64,
}

/// Ljung-Box portmanteau statistics for lags `1..=max_lag`, with p-values
/// from the chi-square distribution with `lag` degrees of freedom.
pub fn ljung_box(values: &[f64], max_lag: usize) -> Result<Vec<LjungBoxRow>> {
    let r = acf(values, max_lag)?;
    let n = values.len() as f64;
    let mut rows = Vec::with_capacity(max_lag);
    let mut acc = 0.0;
    for k in 1..=max_lag {
        acc += r[k] * r[k] / (n - k as f64);
        let q = n * (n + 2.0) * acc;
        rows.push(LjungBoxRow {
            lag: k,
            q_stat: q,
            p_value: 1.0 - chi2_cdf(q, k as f64),
        });
    }
    Ok(rows)
}

/// AC, PAC, and cumulative Q in one table, lags `1..=max_lag`.
pub fn correlogram(values: &[f64], max_lag: usize) -> Result<Vec<CorrelogramRow>> {
    let ac_v = acf(values, max_lag)?;
    let pac_v = pacf(values, max_lag)?;
    let lb = ljung_box(values, max_lag)?;
    Ok((1..=max_lag)
        .map(|k| CorrelogramRow {
            lag: k,
            ac: ac_v[k],
            pac: pac_v[k],
            q_stat: lb[k - 1].q_stat,
            p_value: lb[k - 1].p_value,
        })
        .collect())
}

/// Collapses a correlogram into the distribution-of-coefficients layout.
pub fn correlogram_summary(rows: &[CorrelogramRow]) -> Result<CorrelogramSummary> {
    if rows.is_empty() {
        return Err(Error::input("correlogram summary needs at least one row"));
    }
    let ac_vals: Vec<f64> = rows.iter().map(|r| r.ac).collect();
    let pac_vals: Vec<f64> = rows.iter().map(|r| r.pac).collect();
    let last = rows.last().unwrap();
    let lags = rows.len();
    let chi2_df = lags.saturating_sub(1).max(1);
    let chi2_5pct = quantile_by_bisection(|x| chi2_cdf(x, chi2_df as f64), 0.95)?;
    Ok(CorrelogramSummary {
        lags,
        ac: summary(&ac_vals)?,
        pac: summary(&pac_vals)?,
        q_final: last.q_stat,
        q_final_p: last.p_value,
        chi2_df,
        chi2_5pct,
    })
}

/// Equal-width histogram over `[min, max]` with `n_bins` bins. A constant
/// sample gets a single unit-width bin centered on the value.
pub fn histogram(values: &[f64], n_bins: usize) -> Result<HistogramData> {
    if values.is_empty() {
        return Err(Error::input("histogram needs a nonempty sample"));
    }
    if n_bins == 0 {
        return Err(Error::input("histogram needs at least one bin"));
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Ok(HistogramData {
            edges: vec![min - 0.5, min + 0.5],
            counts: vec![values.len()],
        });
    }
    let width = (max - min) / n_bins as f64;
    let mut edges: Vec<f64> = (0..=n_bins).map(|i| min + i as f64 * width).collect();
    edges[n_bins] = max;
    let mut counts = vec![0usize; n_bins];
    for v in values {
        let mut idx = ((v - min) / width) as usize;
        if idx >= n_bins {
            idx = n_bins - 1;
        }
        counts[idx] += 1;
    }
    Ok(HistogramData { edges, counts })
}
