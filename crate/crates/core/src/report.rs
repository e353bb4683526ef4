//! Report assembly and rendering. The serialized report is the source of
//! truth: every number printed in the markdown view is a stored field, so
//! rendering does no arithmetic and re-rendering from JSON reproduces the
//! document byte for byte.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::causality::GrangerResult;
use crate::cointegration::JohansenResult;
use crate::descriptive::{CorrelogramRow, CorrelogramSummary, HistogramData, SummaryStats};
use crate::series::{PriceSeries, TimeSeries};
use crate::unitroot::AdfResult;
use crate::volatility::ArchLmResult;

/// Section identifiers used for report blocks, matching the layout the
/// report reproduces.
pub mod labels {
    pub const SUMMARY: &str = "Table 4.1";
    pub const CORRELOGRAM: &str = "Table 4.2";
    pub const ADF_RETURNS: &str = "Table 5.1.1";
    pub const ADF_SUBPERIODS: &str = "Table 5.2.1";
    pub const ARCH_LM: &str = "Table 5.2.2";
    pub const GARCH: &str = "Table 5.2.3";
    pub const TGARCH: &str = "Table 5.2.4";
    pub const ADF_BATTERY: &str = "Table A.5.3.1";
    pub const LONG_RUN: &str = "Eq. (A.5.3.1)";
    pub const JOHANSEN: &str = "Appendix A2";
    pub const ECM_FULL: &str = "Table A.5.3.6 (I)";
    pub const ECM_ADJUSTED: &str = "Table A.5.3.6 (II)";
    pub const GRANGER: &str = "Table 5.4.1";
    pub const DATA_FILE: &str = "Data file";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum BlockStatus {
    Ok,
    Skipped { reason: String },
    Failed { error: String },
}

/// One labeled section of a study report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub label: String,
    pub title: String,
    pub status: BlockStatus,
    /// Present exactly when `status` is `Ok`.
    pub content: Option<BlockContent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub series: String,
    pub window: String,
    pub stats: SummaryStats,
    /// True when the window's returns carry no variation.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelogramEntry {
    pub series: String,
    pub window: String,
    pub rows: Vec<CorrelogramRow>,
    pub summary: CorrelogramSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfRow {
    pub series: String,
    pub window: String,
    /// Which view of the series was tested: level, log level, return, or
    /// first difference.
    pub transform: String,
    pub result: AdfResult,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchLmRow {
    pub series: String,
    pub window: String,
    pub result: ArchLmResult,
    pub arch_effect_at_5pct: bool,
}

/// One estimated coefficient. Standard errors and p-values are absent
/// when the curvature matrix could not be inverted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefRow {
    pub name: String,
    pub estimate: f64,
    pub std_error: Option<f64>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolFitSummary {
    pub window: String,
    pub n_used: usize,
    pub converged: bool,
    pub log_likelihood: f64,
    pub persistence: f64,
    pub rows: Vec<CoefRow>,
    pub alpha_sum: f64,
    pub beta_sum: f64,
    pub gamma_sum: Option<f64>,
    /// News-asymmetry composite for threshold fits.
    pub alpha_plus_gamma: Option<f64>,
    pub warnings: Vec<String>,
}

/// Window-to-window coefficient changes for the fit comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub d_alpha: f64,
    pub d_gamma: Option<f64>,
    pub d_beta: f64,
    pub d_persistence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRunEquation {
    pub y_series: String,
    pub x_series: String,
    pub n_obs: usize,
    pub intercept: f64,
    pub slope: f64,
    pub intercept_se: Option<f64>,
    pub slope_se: Option<f64>,
    pub slope_t: Option<f64>,
    pub residual_stat: Option<f64>,
    pub residual_cv_5pct: Option<f64>,
    pub residual_lags: Option<usize>,
    pub cointegrated_at_5pct: bool,
    pub degenerate: bool,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcmCoefRow {
    pub name: String,
    pub coeff: f64,
    pub std_err: Option<f64>,
    pub t_stat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerRow {
    pub lag: usize,
    pub f_x_to_y: f64,
    pub p_x_to_y: f64,
    pub x_causes_y_at_5pct: bool,
    pub f_y_to_x: f64,
    pub p_y_to_x: f64,
    pub y_causes_x_at_5pct: bool,
    pub n_effective: usize,
}

impl GrangerRow {
    pub fn from_result(r: &GrangerResult) -> Self {
        GrangerRow {
            lag: r.lag,
            f_x_to_y: r.f_x_to_y,
            p_x_to_y: r.p_x_to_y,
            x_causes_y_at_5pct: r.p_x_to_y < 0.05,
            f_y_to_x: r.f_y_to_x,
            p_y_to_x: r.p_y_to_x,
            y_causes_x_at_5pct: r.p_y_to_x < 0.05,
            n_effective: r.n_effective,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockContent {
    Summary {
        rows: Vec<SummaryRow>,
    },
    Correlogram {
        entries: Vec<CorrelogramEntry>,
    },
    AdfBattery {
        rows: Vec<AdfRow>,
    },
    ArchLm {
        rows: Vec<ArchLmRow>,
    },
    VolComparison {
        family: String,
        fits: Vec<VolFitSummary>,
        delta: Option<DeltaRow>,
    },
    LongRun {
        equation: LongRunEquation,
    },
    Johansen {
        result: JohansenResult,
    },
    Ecm {
        variant: String,
        n_effective: usize,
        rows: Vec<EcmCoefRow>,
    },
    GrangerScan {
        y_series: String,
        x_series: String,
        rows: Vec<GrangerRow>,
    },
    DataFile {
        path: String,
        series: String,
        n_obs: usize,
        first_date: String,
        last_date: String,
    },
}

/// Full study report: header metadata plus labeled blocks in a fixed
/// order decided by the producing command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub command: String,
    /// Key/value header lines (files, windows, seed, model options).
    pub meta: Vec<(String, String)>,
    pub blocks: Vec<Block>,
}

impl StudyReport {
    pub fn failed_blocks(&self) -> Vec<&str> {
        self.blocks
            .iter()
            .filter(|b| matches!(b.status, BlockStatus::Failed { .. }))
            .map(|b| b.label.as_str())
            .collect()
    }
}

/// Fixed four-decimal display used for statistics.
pub fn fmt4(v: f64) -> String {
    if !v.is_finite() {
        return "NA".to_string();
    }
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

fn fmt4_opt(v: Option<f64>) -> String {
    v.map(fmt4).unwrap_or_else(|| "NA".to_string())
}

/// P-value display: four decimals, switching to the tabular scientific
/// form ("6.E-08") below 1e-4.
pub fn fmt_p(p: f64) -> String {
    if !p.is_finite() {
        return "NA".to_string();
    }
    if p >= 1e-4 {
        return fmt4(p);
    }
    if p <= 0.0 {
        return "0.0000".to_string();
    }
    let mut e = p.log10().floor() as i32;
    let mut m = (p / 10f64.powi(e)).round();
    if m >= 10.0 {
        m = 1.0;
        e += 1;
    }
    format!("{m:.0}.E{e:+03}")
}

fn fmt_p_opt(p: Option<f64>) -> String {
    p.map(fmt_p).unwrap_or_else(|| "NA".to_string())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn push_table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    out.push('|');
    for h in header {
        out.push_str(&format!(" {h} |"));
    }
    out.push('\n');
    out.push('|');
    for _ in header {
        out.push_str(" --- |");
    }
    out.push('\n');
    for row in rows {
        out.push('|');
        for cell in row {
            out.push_str(&format!(" {cell} |"));
        }
        out.push('\n');
    }
}

fn render_content(out: &mut String, content: &BlockContent) {
    match content {
        BlockContent::Summary { rows } => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.series.clone(),
                        r.window.clone(),
                        r.stats.n_obs.to_string(),
                        fmt4(r.stats.mean),
                        fmt4(r.stats.std_dev),
                        fmt4(r.stats.min),
                        fmt4(r.stats.max),
                        fmt4_opt(r.stats.skewness),
                        fmt4_opt(r.stats.kurtosis_raw),
                        yes_no(r.degenerate).to_string(),
                    ]
                })
                .collect();
            push_table(
                out,
                &[
                    "series", "window", "n", "mean", "std dev", "min", "max", "skewness",
                    "kurtosis", "degenerate",
                ],
                &table,
            );
        }
        BlockContent::Correlogram { entries } => {
            for (i, e) in entries.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                out.push_str(&format!("**{} — {}**\n\n", e.series, e.window));
                let table: Vec<Vec<String>> = e
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.lag.to_string(),
                            fmt4(r.ac),
                            fmt4(r.pac),
                            fmt4(r.q_stat),
                            fmt_p(r.p_value),
                        ]
                    })
                    .collect();
                push_table(out, &["lag", "AC", "PAC", "Q-stat", "p"], &table);
                out.push_str(&format!(
                    "\nFinal Q({}) = {} (p = {}); chi-square 5% reference with {} df = {}\n",
                    e.summary.lags,
                    fmt4(e.summary.q_final),
                    fmt_p(e.summary.q_final_p),
                    e.summary.chi2_df,
                    fmt4(e.summary.chi2_5pct),
                ));
            }
        }
        BlockContent::AdfBattery { rows } => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.series.clone(),
                        r.window.clone(),
                        r.transform.clone(),
                        r.result.lags_used.to_string(),
                        fmt4(r.result.statistic),
                        fmt4(r.result.critical_values.pct1),
                        fmt4(r.result.critical_values.pct5),
                        fmt4(r.result.critical_values.pct10),
                        fmt_p(r.result.p_value),
                        r.verdict.clone(),
                    ]
                })
                .collect();
            push_table(
                out,
                &[
                    "series", "window", "transform", "lags", "ADF", "1% cv", "5% cv", "10% cv",
                    "p", "result",
                ],
                &table,
            );
        }
        BlockContent::ArchLm { rows } => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.series.clone(),
                        r.window.clone(),
                        r.result.lags.to_string(),
                        fmt4(r.result.f_stat),
                        fmt_p(r.result.f_pvalue),
                        fmt4(r.result.lm_stat),
                        fmt_p(r.result.lm_pvalue),
                        yes_no(r.arch_effect_at_5pct).to_string(),
                    ]
                })
                .collect();
            push_table(
                out,
                &[
                    "series",
                    "window",
                    "lags",
                    "F",
                    "p(F)",
                    "obs*R^2",
                    "p(chi2)",
                    "ARCH effect",
                ],
                &table,
            );
        }
        BlockContent::VolComparison {
            family,
            fits,
            delta,
        } => {
            out.push_str(&format!("Model family: {family}\n\n"));
            for f in fits {
                out.push_str(&format!(
                    "**{}** (n = {}, converged = {})\n\n",
                    f.window,
                    f.n_used,
                    yes_no(f.converged)
                ));
                let table: Vec<Vec<String>> = f
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.name.clone(),
                            fmt4(r.estimate),
                            fmt4_opt(r.std_error),
                            fmt_p_opt(r.p_value),
                        ]
                    })
                    .collect();
                push_table(out, &["parameter", "estimate", "std error", "p"], &table);
                out.push_str(&format!(
                    "\nlog-likelihood = {}; persistence = {}; alpha total = {}; beta total = {}",
                    fmt4(f.log_likelihood),
                    fmt4(f.persistence),
                    fmt4(f.alpha_sum),
                    fmt4(f.beta_sum),
                ));
                if let Some(g) = f.gamma_sum {
                    out.push_str(&format!("; gamma total = {}", fmt4(g)));
                }
                if let Some(ag) = f.alpha_plus_gamma {
                    out.push_str(&format!("; alpha + gamma = {}", fmt4(ag)));
                }
                out.push('\n');
                for w in &f.warnings {
                    out.push_str(&format!("\n> note: {w}\n"));
                }
                out.push('\n');
            }
            if let Some(d) = delta {
                out.push_str("**Change across windows**\n\n");
                let mut header = vec!["d alpha"];
                let mut row = vec![fmt4(d.d_alpha)];
                if let Some(g) = d.d_gamma {
                    header.push("d gamma");
                    row.push(fmt4(g));
                }
                header.push("d beta");
                row.push(fmt4(d.d_beta));
                header.push("d persistence");
                row.push(fmt4(d.d_persistence));
                push_table(out, &header, &[row]);
            }
        }
        BlockContent::LongRun { equation: e } => {
            out.push_str(&format!(
                "ln({}) = {} + {} ln({}) + u\n\n",
                e.y_series,
                fmt4(e.intercept),
                fmt4(e.slope),
                e.x_series
            ));
            let table = vec![
                vec![
                    "intercept".to_string(),
                    fmt4(e.intercept),
                    fmt4_opt(e.intercept_se),
                    "".to_string(),
                ],
                vec![
                    "slope".to_string(),
                    fmt4(e.slope),
                    fmt4_opt(e.slope_se),
                    fmt4_opt(e.slope_t),
                ],
            ];
            push_table(out, &["coefficient", "estimate", "std error", "t"], &table);
            out.push_str(&format!(
                "\nn = {}; residual ADF = {} (5% cv {}, lags {}); {}\n",
                e.n_obs,
                fmt4_opt(e.residual_stat),
                fmt4_opt(e.residual_cv_5pct),
                e.residual_lags
                    .map(|l| l.to_string())
                    .unwrap_or_else(|| "NA".to_string()),
                e.verdict,
            ));
        }
        BlockContent::Johansen { result } => {
            let table: Vec<Vec<String>> = (0..result.n_vars)
                .map(|r| {
                    vec![
                        r.to_string(),
                        fmt4(result.eigenvalues[r]),
                        fmt4(result.trace_stats[r]),
                        fmt4(result.trace_cv_5pct[r]),
                        fmt4(result.max_eig_stats[r]),
                        fmt4(result.max_eig_cv_5pct[r]),
                    ]
                })
                .collect();
            push_table(
                out,
                &[
                    "rank under null",
                    "eigenvalue",
                    "trace",
                    "trace 5% cv",
                    "max-eig",
                    "max-eig 5% cv",
                ],
                &table,
            );
            out.push_str(&format!(
                "\nSelected rank: {} (effective sample {}, {} lagged differences)\n",
                result.selected_rank, result.t_effective, result.var_lags
            ));
        }
        BlockContent::Ecm {
            variant,
            n_effective,
            rows,
        } => {
            out.push_str(&format!("Specification: {variant} (n = {n_effective})\n\n"));
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        fmt4(r.coeff),
                        fmt4_opt(r.std_err),
                        fmt4_opt(r.t_stat),
                    ]
                })
                .collect();
            push_table(out, &["term", "coeff", "std err", "t-stat"], &table);
        }
        BlockContent::GrangerScan {
            y_series,
            x_series,
            rows,
        } => {
            out.push_str(&format!(
                "X = {x_series} differences, Y = {y_series} differences\n\n"
            ));
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.lag.to_string(),
                        fmt4(r.f_x_to_y),
                        fmt_p(r.p_x_to_y),
                        yes_no(r.x_causes_y_at_5pct).to_string(),
                        fmt4(r.f_y_to_x),
                        fmt_p(r.p_y_to_x),
                        yes_no(r.y_causes_x_at_5pct).to_string(),
                        r.n_effective.to_string(),
                    ]
                })
                .collect();
            push_table(
                out,
                &[
                    "lags",
                    "F: X->Y",
                    "p: X->Y",
                    "X causes Y",
                    "F: Y->X",
                    "p: Y->X",
                    "Y causes X",
                    "n",
                ],
                &table,
            );
        }
        BlockContent::DataFile {
            path,
            series,
            n_obs,
            first_date,
            last_date,
        } => {
            out.push_str(&format!(
                "Wrote `{path}`: series {series}, {n_obs} rows, {first_date} to {last_date}\n"
            ));
        }
    }
}

/// Renders the markdown view of a report. Pure: equal inputs produce
/// byte-identical output.
pub fn render_markdown(report: &StudyReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("# voltlab {} report\n\n", report.command));
    for (k, v) in &report.meta {
        out.push_str(&format!("- {k}: {v}\n"));
    }
    for block in &report.blocks {
        out.push_str(&format!("\n## {} — {}\n\n", block.label, block.title));
        match &block.status {
            BlockStatus::Ok => {
                if let Some(content) = &block.content {
                    render_content(&mut out, content);
                }
            }
            BlockStatus::Skipped { reason } => {
                out.push_str(&format!("_Skipped: {reason}_\n"));
            }
            BlockStatus::Failed { error } => {
                out.push_str(&format!("_Failed: {error}_\n"));
            }
        }
    }
    out
}

/// Histogram plot data. Full-precision values, `.` decimal separator.
pub fn histogram_csv(h: &HistogramData) -> String {
    let mut out = String::from("bin_edge_lo,bin_edge_hi,count\n");
    for (i, c) in h.counts.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", h.edges[i], h.edges[i + 1], c));
    }
    out
}

/// Correlogram plot data.
pub fn correlogram_csv(rows: &[CorrelogramRow]) -> String {
    let mut out = String::from("lag,ac,pac,q,p\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.lag, r.ac, r.pac, r.q_stat, r.p_value
        ));
    }
    out
}

/// Conditional-variance path plot data; dates and values are zipped.
pub fn variance_path_csv(dates: &[NaiveDate], sigma2: &[f64]) -> String {
    let mut out = String::from("date,sigma2\n");
    for (d, v) in dates.iter().zip(sigma2) {
        out.push_str(&format!("{d},{v}\n"));
    }
    out
}

/// News-impact curve plot data.
pub fn news_impact_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("epsilon,sigma2\n");
    for (e, s) in points {
        out.push_str(&format!("{e},{s}\n"));
    }
    out
}

/// Price file writer, using the same `date,close` layout the parser
/// accepts, so simulated data round-trips through the pipeline.
pub fn prices_csv(series: &PriceSeries) -> String {
    let mut out = String::from("date,close\n");
    for (d, v) in series.dates().iter().zip(series.values()) {
        out.push_str(&format!("{d},{v}\n"));
    }
    out
}
