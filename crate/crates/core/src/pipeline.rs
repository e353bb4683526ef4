//! Study pipeline: turns two price files into the full set of labeled
//! report blocks (descriptives, unit roots, ARCH-LM, volatility fits,
//! cointegration, causality), mirroring the before/after event-study
//! layout, and writes the JSON/markdown/CSV artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::causality::granger_scan;
use crate::cointegration::{engle_granger, fit_ecm, johansen, EcmTerms, EgResult, JohansenDet};
use crate::descriptive::{correlogram, correlogram_summary, histogram, summary};
use crate::error::{Error, Result};
use crate::exec::{run_batch, ExecMode};
use crate::report::{
    correlogram_csv, histogram_csv, labels, news_impact_csv, prices_csv, render_markdown,
    variance_path_csv, AdfRow, ArchLmRow, Block, BlockContent, BlockStatus, CoefRow,
    CorrelogramEntry, DeltaRow, EcmCoefRow, GrangerRow, LongRunEquation, StudyReport, SummaryRow,
    VolFitSummary,
};
use crate::series::{
    align, parse_prices, slice_by_date, to_returns, AlignedPair, Bounds, ColumnFormat, LogSeries,
    PriceSeries, ReturnSeries, TimeSeries,
};
use crate::unitroot::{adf_test, AdfResult, AdfSpec, Deterministic, InfoCriterion, LagOrder};
use crate::volatility::{
    arch_lm_test, fit, news_impact_curve, simulate, VolFamily, VolModelFit, VolModelSpec,
    VolParams,
};

/// Inclusive calendar window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DateWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Self {
        DateWindow { start, end }
    }

    pub fn describe(&self) -> String {
        format!("{}..{}", self.start, self.end)
    }
}

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid calendar date")
}

/// Volatility-model options shared by the fitting commands.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOptions {
    pub family: VolFamily,
    pub p: usize,
    pub q: usize,
    pub mean_lags: Vec<usize>,
    pub mean_constant: bool,
    pub constrained: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            family: VolFamily::Garch,
            p: 1,
            q: 1,
            mean_lags: Vec::new(),
            mean_constant: true,
            constrained: true,
        }
    }
}

impl ModelOptions {
    fn spec_for(&self, family: VolFamily) -> Result<VolModelSpec> {
        let mut spec = VolModelSpec::new(family, self.p, self.q)?;
        spec = spec.with_mean_lags(&self.mean_lags)?;
        if !self.mean_constant {
            spec = spec.without_mean_constant();
        }
        if !self.constrained {
            spec = spec.unconstrained();
        }
        Ok(spec)
    }

    fn describe(&self) -> String {
        let name = family_name(self.family);
        let mut s = format!("{name}(p={}, q={})", self.p, self.q);
        if !self.mean_lags.is_empty() {
            s.push_str(&format!(", mean lags {:?}", self.mean_lags));
        }
        if !self.mean_constant {
            s.push_str(", no mean constant");
        }
        if !self.constrained {
            s.push_str(", unconstrained");
        }
        s
    }
}

pub fn family_name(family: VolFamily) -> &'static str {
    match family {
        VolFamily::Arch => "arch",
        VolFamily::Garch => "garch",
        VolFamily::Tgarch => "tgarch",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputFormats {
    pub markdown: bool,
    pub json: bool,
    pub csv: bool,
}

impl Default for OutputFormats {
    fn default() -> Self {
        OutputFormats {
            markdown: true,
            json: true,
            csv: true,
        }
    }
}

/// Configuration for the study commands. Window defaults cover the
/// 2005-2016 sample with the April 2010 event split.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub spot_file: PathBuf,
    pub futures_file: Option<PathBuf>,
    pub event_date: NaiveDate,
    pub pre_window: DateWindow,
    pub post_window: DateWindow,
    pub full_window: DateWindow,
    pub causality_window: DateWindow,
    pub model: ModelOptions,
    pub max_lag: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub formats: OutputFormats,
    pub exec_mode: ExecMode,
}

impl StudyConfig {
    pub fn new(spot_file: impl Into<PathBuf>) -> Self {
        StudyConfig {
            spot_file: spot_file.into(),
            futures_file: None,
            event_date: date(2010, 4, 16),
            pre_window: DateWindow::new(date(2007, 4, 16), date(2010, 4, 16)),
            post_window: DateWindow::new(date(2010, 4, 16), date(2013, 4, 19)),
            full_window: DateWindow::new(date(2005, 4, 8), date(2016, 4, 8)),
            causality_window: DateWindow::new(date(2010, 4, 16), date(2016, 4, 8)),
            model: ModelOptions::default(),
            max_lag: 10,
            seed: 42,
            out_dir: PathBuf::from("."),
            formats: OutputFormats::default(),
            exec_mode: ExecMode::Sequential,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("pre", self.pre_window),
            ("post", self.post_window),
            ("full", self.full_window),
            ("causality", self.causality_window),
        ] {
            if w.end < w.start {
                return Err(Error::input(format!(
                    "{name} window end {} precedes start {}",
                    w.end, w.start
                )));
            }
        }
        if self.pre_window.end > self.event_date {
            return Err(Error::input(format!(
                "pre window must close by the event date {} (ends {})",
                self.event_date, self.pre_window.end
            )));
        }
        if self.post_window.start < self.event_date {
            return Err(Error::input(format!(
                "post window must open at or after the event date {} (starts {})",
                self.event_date, self.post_window.start
            )));
        }
        if self.max_lag == 0 {
            return Err(Error::input("maximum causality lag must be at least 1"));
        }
        Ok(())
    }
}

/// A finished command: the structured report plus any plot-data CSVs
/// keyed by file name.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub report: StudyReport,
    pub csv_files: Vec<(String, String)>,
}

impl CommandOutput {
    /// 0 when every block succeeded (skips included), 2 when any block
    /// failed. Fatal errors never reach a `CommandOutput`.
    pub fn exit_code(&self) -> i32 {
        if self.report.failed_blocks().is_empty() {
            0
        } else {
            2
        }
    }
}

/// Writes the selected artifact formats under `out_dir`, returning the
/// paths written.
pub fn write_artifacts(
    out: &CommandOutput,
    out_dir: &Path,
    formats: OutputFormats,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    if formats.json {
        let path = out_dir.join(format!("{}.json", out.report.command));
        let mut body = serde_json::to_string_pretty(&out.report)?;
        body.push('\n');
        fs::write(&path, body)?;
        written.push(path);
    }
    if formats.markdown {
        let path = out_dir.join(format!("{}.md", out.report.command));
        fs::write(&path, render_markdown(&out.report))?;
        written.push(path);
    }
    if formats.csv {
        for (name, content) in &out.csv_files {
            let path = out_dir.join(name);
            fs::write(&path, content)?;
            written.push(path);
        }
    }
    Ok(written)
}

struct Ctx {
    spot: PriceSeries,
    futures: Option<PriceSeries>,
}

fn load_prices(path: &Path, label: &str) -> Result<PriceSeries> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    parse_prices(&text, label, &ColumnFormat::default())
}

fn load_ctx(config: &StudyConfig, need_futures: bool) -> Result<Ctx> {
    config.validate()?;
    let spot = load_prices(&config.spot_file, "spot")?;
    let futures = match &config.futures_file {
        Some(path) => Some(load_prices(path, "futures")?),
        None if need_futures => {
            return Err(Error::input("this command needs a futures file"));
        }
        None => None,
    };
    Ok(Ctx { spot, futures })
}

fn window_prices(prices: &PriceSeries, w: DateWindow) -> Result<PriceSeries> {
    slice_by_date(prices, w.start, w.end, Bounds::default())
}

fn window_returns(prices: &PriceSeries, w: DateWindow) -> Result<ReturnSeries> {
    to_returns(&window_prices(prices, w)?)
}

/// Intersects both price series on the window's shared dates.
fn aligned_window(ctx: &Ctx, w: DateWindow) -> Result<AlignedPair> {
    let futures = ctx
        .futures
        .as_ref()
        .ok_or_else(|| Error::input("this command needs a futures file"))?;
    align(&window_prices(&ctx.spot, w)?, &window_prices(futures, w)?)
}

fn log_pair(pair: &AlignedPair) -> Result<(LogSeries, LogSeries)> {
    let ln = |v: &[f64]| v.iter().map(|p| p.ln()).collect::<Vec<f64>>();
    let y = LogSeries::from_parts(pair.y_label.clone(), pair.dates.clone(), ln(&pair.y))?;
    let x = LogSeries::from_parts(pair.x_label.clone(), pair.dates.clone(), ln(&pair.x))?;
    Ok((y, x))
}

/// Percentage log returns of both legs of an aligned price pair.
fn pair_returns(pair: &AlignedPair) -> (Vec<f64>, Vec<f64>) {
    let diff = |v: &[f64]| {
        v.windows(2)
            .map(|w| 100.0 * (w[1].ln() - w[0].ln()))
            .collect::<Vec<f64>>()
    };
    (diff(&pair.y), diff(&pair.x))
}

enum Outcome {
    Content(BlockContent),
    Skip(String),
}

fn make_block(label: &str, title: &str, outcome: Result<Outcome>) -> Block {
    let (status, content) = match outcome {
        Ok(Outcome::Content(c)) => (BlockStatus::Ok, Some(c)),
        Ok(Outcome::Skip(reason)) => (BlockStatus::Skipped { reason }, None),
        Err(e) => (
            BlockStatus::Failed {
                error: e.to_string(),
            },
            None,
        ),
    };
    Block {
        label: label.to_string(),
        title: title.to_string(),
        status,
        content,
    }
}

fn base_meta(config: &StudyConfig) -> Vec<(String, String)> {
    let meta = vec![
        (
            "spot file".to_string(),
            config.spot_file.display().to_string(),
        ),
        (
            "futures file".to_string(),
            config
                .futures_file
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "none".to_string()),
        ),
        ("event date".to_string(), config.event_date.to_string()),
        ("full window".to_string(), config.full_window.describe()),
        ("pre window".to_string(), config.pre_window.describe()),
        ("post window".to_string(), config.post_window.describe()),
        (
            "causality window".to_string(),
            config.causality_window.describe(),
        ),
        ("model".to_string(), config.model.describe()),
        ("max causality lag".to_string(), config.max_lag.to_string()),
        ("seed".to_string(), config.seed.to_string()),
        (
            "execution".to_string(),
            match config.exec_mode {
                ExecMode::Sequential => "sequential".to_string(),
                ExecMode::Parallel => "parallel".to_string(),
            },
        ),
    ];
    meta
}

const CORRELOGRAM_LAGS: usize = 36;
const HISTOGRAM_BINS: usize = 40;
const ARCH_LM_LAGS: usize = 5;
const JOHANSEN_VAR_LAGS: usize = 2;

fn window_list(config: &StudyConfig) -> [(&'static str, DateWindow); 3] {
    [
        ("full", config.full_window),
        ("pre", config.pre_window),
        ("post", config.post_window),
    ]
}

fn series_list(ctx: &Ctx) -> Vec<&PriceSeries> {
    let mut list = vec![&ctx.spot];
    if let Some(f) = &ctx.futures {
        list.push(f);
    }
    list
}

fn summary_block(ctx: &Ctx, name: &str, w: DateWindow) -> Block {
    let title = format!("Descriptive statistics of daily returns — {name} window");
    let outcome = (|| {
        let mut rows = Vec::new();
        for prices in series_list(ctx) {
            let sliced = window_prices(prices, w)?;
            if sliced.len() < 2 {
                return Ok(Outcome::Skip(format!(
                    "window {} has fewer than 2 prices for series {}",
                    w.describe(),
                    prices.label()
                )));
            }
            let returns = to_returns(&sliced)?;
            let stats = summary(returns.values())?;
            let degenerate = stats.std_dev == 0.0;
            rows.push(SummaryRow {
                series: prices.label().to_string(),
                window: name.to_string(),
                stats,
                degenerate,
            });
        }
        Ok(Outcome::Content(BlockContent::Summary { rows }))
    })();
    make_block(labels::SUMMARY, &title, outcome)
}

fn correlogram_block(ctx: &Ctx, config: &StudyConfig) -> (Block, Vec<(String, String)>) {
    let mut csv_files = Vec::new();
    let outcome = (|| {
        let mut entries = Vec::new();
        for prices in series_list(ctx) {
            let returns = window_returns(prices, config.full_window)?;
            if returns.len() <= CORRELOGRAM_LAGS + 1 {
                return Ok(Outcome::Skip(format!(
                    "series {} has too few full-window returns for {CORRELOGRAM_LAGS} lags",
                    prices.label()
                )));
            }
            let stats = summary(returns.values())?;
            if stats.std_dev == 0.0 {
                return Ok(Outcome::Skip(format!(
                    "series {} returns are constant; correlogram undefined",
                    prices.label()
                )));
            }
            let rows = correlogram(returns.values(), CORRELOGRAM_LAGS)?;
            let summary = correlogram_summary(&rows)?;
            csv_files.push((
                format!("correlogram_{}_full.csv", prices.label()),
                correlogram_csv(&rows),
            ));
            let hist = histogram(returns.values(), HISTOGRAM_BINS)?;
            csv_files.push((
                format!("histogram_{}_full.csv", prices.label()),
                histogram_csv(&hist),
            ));
            entries.push(CorrelogramEntry {
                series: prices.label().to_string(),
                window: "full".to_string(),
                rows,
                summary,
            });
        }
        Ok(Outcome::Content(BlockContent::Correlogram { entries }))
    })();
    let block = make_block(
        labels::CORRELOGRAM,
        &format!("Correlogram of daily returns ({CORRELOGRAM_LAGS} lags)"),
        outcome,
    );
    if !matches!(block.status, BlockStatus::Ok) {
        csv_files.clear();
    }
    (block, csv_files)
}

fn adf_row(
    series: &str,
    window: &str,
    transform: &str,
    values: &[f64],
    spec: &AdfSpec,
) -> Result<AdfRow> {
    let result: AdfResult = adf_test(values, spec)?;
    let verdict = if result.stationary_at_5pct {
        "stationary"
    } else {
        "nonstationary"
    };
    Ok(AdfRow {
        series: series.to_string(),
        window: window.to_string(),
        transform: transform.to_string(),
        result,
        verdict: verdict.to_string(),
    })
}

fn default_adf_spec() -> AdfSpec {
    AdfSpec {
        deterministic: Deterministic::ConstantTrend,
        lag_order: LagOrder::Auto {
            max_lag: None,
            criterion: InfoCriterion::Bic,
        },
    }
}

fn adf_returns_block(ctx: &Ctx, config: &StudyConfig) -> Block {
    let outcome = (|| {
        let returns = window_returns(&ctx.spot, config.full_window)?;
        let row = adf_row(
            ctx.spot.label(),
            "full",
            "return",
            returns.values(),
            &default_adf_spec(),
        )?;
        Ok(Outcome::Content(BlockContent::AdfBattery {
            rows: vec![row],
        }))
    })();
    make_block(
        labels::ADF_RETURNS,
        "Unit-root test for daily returns",
        outcome,
    )
}

fn adf_subperiod_block(ctx: &Ctx, config: &StudyConfig) -> Block {
    let outcome = (|| {
        let mut rows = Vec::new();
        for (name, w) in [("pre", config.pre_window), ("post", config.post_window)] {
            let returns = window_returns(&ctx.spot, w)?;
            rows.push(adf_row(
                ctx.spot.label(),
                name,
                "return",
                returns.values(),
                &default_adf_spec(),
            )?);
        }
        Ok(Outcome::Content(BlockContent::AdfBattery { rows }))
    })();
    make_block(
        labels::ADF_SUBPERIODS,
        "Unit-root tests by subperiod",
        outcome,
    )
}

fn arch_lm_block(ctx: &Ctx, config: &StudyConfig) -> Block {
    let outcome = (|| {
        let mut rows = Vec::new();
        for (name, w) in [("pre", config.pre_window), ("post", config.post_window)] {
            let returns = window_returns(&ctx.spot, w)?;
            let mean = returns.values().iter().sum::<f64>() / returns.len() as f64;
            let centered: Vec<f64> = returns.values().iter().map(|r| r - mean).collect();
            let result = arch_lm_test(&centered, ARCH_LM_LAGS)?;
            rows.push(ArchLmRow {
                series: ctx.spot.label().to_string(),
                window: name.to_string(),
                arch_effect_at_5pct: result.f_pvalue < 0.05,
                result,
            });
        }
        Ok(Outcome::Content(BlockContent::ArchLm { rows }))
    })();
    make_block(labels::ARCH_LM, "ARCH-LM test by subperiod", outcome)
}

fn finite_opt(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn vol_fit_summary(window: &str, fit: &VolModelFit) -> Result<VolFitSummary> {
    let names = fit.spec.param_names();
    let flat = fit.params.flatten(&fit.spec)?;
    let rows = names
        .into_iter()
        .zip(&flat)
        .zip(fit.std_errors.iter().zip(&fit.p_values))
        .map(|((name, est), (se, p))| CoefRow {
            name,
            estimate: *est,
            std_error: finite_opt(*se),
            p_value: finite_opt(*p),
        })
        .collect();
    let alpha_sum: f64 = fit.params.alpha.iter().sum();
    let beta_sum: f64 = fit.params.beta.iter().sum();
    let gamma_sum = fit
        .spec
        .has_threshold()
        .then(|| fit.params.gamma.iter().sum::<f64>());
    Ok(VolFitSummary {
        window: window.to_string(),
        n_used: fit.n_used,
        converged: fit.converged,
        log_likelihood: fit.log_likelihood,
        persistence: fit.persistence,
        rows,
        alpha_sum,
        beta_sum,
        gamma_sum,
        alpha_plus_gamma: gamma_sum.map(|g| alpha_sum + g),
        warnings: fit.warnings.clone(),
    })
}

/// Symmetric shock grid for the news-impact curve, sized to the sample
/// spread.
fn news_grid(returns: &[f64]) -> Result<Vec<f64>> {
    let stats = summary(returns)?;
    let span = 4.0 * stats.std_dev.max(1e-6);
    Ok((0..=80).map(|i| -span + i as f64 * (span / 40.0)).collect())
}

fn vol_block(
    ctx: &Ctx,
    config: &StudyConfig,
    family: VolFamily,
) -> (Block, Vec<(String, String)>) {
    let name = family_name(family);
    let label = match family {
        VolFamily::Tgarch => labels::TGARCH,
        _ => labels::GARCH,
    };
    let title = format!(
        "{}({},{}) estimates before and after the event",
        name.to_uppercase(),
        config.model.p,
        config.model.q
    );
    let mut csv_files = Vec::new();
    let outcome = (|| {
        let spec = config.model.spec_for(family)?;
        let windows = [("pre", config.pre_window), ("post", config.post_window)];
        let returns: Vec<ReturnSeries> = windows
            .iter()
            .map(|(_, w)| window_returns(&ctx.spot, *w))
            .collect::<Result<_>>()?;
        let fits: Vec<VolModelFit> = run_batch(config.exec_mode, 2, |i| {
            fit(&spec, returns[i].values())
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let mut summaries = Vec::new();
        for ((wname, _), (r, f)) in windows.iter().zip(returns.iter().zip(&fits)) {
            summaries.push(vol_fit_summary(wname, f)?);
            let dates = &r.dates()[f.sample_start..];
            csv_files.push((
                format!("variance_{name}_{wname}.csv"),
                variance_path_csv(dates, &f.variance_path),
            ));
            let grid = news_grid(r.values())?;
            csv_files.push((
                format!("news_impact_{name}_{wname}.csv"),
                news_impact_csv(&news_impact_curve(f, &grid)),
            ));
        }
        let (pre, post) = (&summaries[0], &summaries[1]);
        let delta = DeltaRow {
            d_alpha: post.alpha_sum - pre.alpha_sum,
            d_gamma: match (pre.gamma_sum, post.gamma_sum) {
                (Some(a), Some(b)) => Some(b - a),
                _ => None,
            },
            d_beta: post.beta_sum - pre.beta_sum,
            d_persistence: post.persistence - pre.persistence,
        };
        Ok(Outcome::Content(BlockContent::VolComparison {
            family: name.to_string(),
            fits: summaries,
            delta: Some(delta),
        }))
    })();
    let block = make_block(label, &title, outcome);
    if !matches!(block.status, BlockStatus::Ok) {
        csv_files.clear();
    }
    (block, csv_files)
}

fn adf_battery_block(pair: &AlignedPair) -> Block {
    let outcome = (|| {
        let (y_log, x_log) = log_pair(pair)?;
        let (dy, dx) = pair_returns(pair);
        let spec = default_adf_spec();
        let mut rows = Vec::new();
        for (series, log_series, d) in [
            (pair.y_label.as_str(), &y_log, &dy),
            (pair.x_label.as_str(), &x_log, &dx),
        ] {
            rows.push(adf_row(series, "full", "ln level", log_series.values(), &spec)?);
            rows.push(adf_row(series, "full", "return", d, &spec)?);
            let diffs: Vec<f64> = log_series.values().windows(2).map(|w| w[1] - w[0]).collect();
            rows.push(adf_row(series, "full", "d ln level", &diffs, &spec)?);
        }
        Ok(Outcome::Content(BlockContent::AdfBattery { rows }))
    })();
    make_block(
        labels::ADF_BATTERY,
        "Unit-root battery for levels, returns, and differences",
        outcome,
    )
}

fn long_run_equation(pair: &AlignedPair, eg: &EgResult) -> LongRunEquation {
    let verdict = if eg.degenerate {
        "degenerate equilibrium: the series are affinely identical".to_string()
    } else if eg.cointegrated_at_5pct {
        "cointegrated at 5%".to_string()
    } else {
        "no cointegration at 5%".to_string()
    };
    let slope_se = finite_opt(eg.static_fit.std_errors[1]);
    LongRunEquation {
        y_series: pair.y_label.clone(),
        x_series: pair.x_label.clone(),
        n_obs: eg.residuals.len(),
        intercept: eg.intercept,
        slope: eg.slope,
        intercept_se: finite_opt(eg.static_fit.std_errors[0]),
        slope_se,
        slope_t: finite_opt(eg.static_fit.t_stats[1]),
        residual_stat: eg.residual_adf.as_ref().map(|a| a.statistic),
        residual_cv_5pct: eg.residual_adf.as_ref().map(|a| a.critical_values.pct5),
        residual_lags: eg.residual_adf.as_ref().map(|a| a.lags_used),
        cointegrated_at_5pct: eg.cointegrated_at_5pct,
        degenerate: eg.degenerate,
        verdict,
    }
}

fn ecm_block(
    label: &str,
    title: &str,
    pair: &AlignedPair,
    eg: Option<&EgResult>,
    terms: EcmTerms,
) -> Block {
    let outcome = (|| {
        let eg = match eg {
            Some(e) => e,
            None => return Ok(Outcome::Skip("long-run regression unavailable".to_string())),
        };
        if eg.degenerate {
            return Ok(Outcome::Skip(
                "degenerate equilibrium; error-correction terms are identically zero".to_string(),
            ));
        }
        if !eg.cointegrated_at_5pct {
            return Ok(Outcome::Skip("no cointegration at 5%".to_string()));
        }
        let (y_log, x_log) = log_pair(pair)?;
        let ecm = fit_ecm(&y_log, &x_log, &eg.residuals, terms)?;
        let mut names = Vec::new();
        if terms.include_constant {
            names.push("a0".to_string());
        }
        names.push(format!("d ln({})", pair.x_label));
        names.push("u(t-1)".to_string());
        if terms.include_lagged_dy {
            names.push(format!("d ln({})(t-1)", pair.y_label));
        }
        let rows = names
            .into_iter()
            .zip(&ecm.fit.coefficients)
            .zip(ecm.fit.std_errors.iter().zip(&ecm.fit.t_stats))
            .map(|((name, c), (se, t))| EcmCoefRow {
                name,
                coeff: *c,
                std_err: finite_opt(*se),
                t_stat: finite_opt(*t),
            })
            .collect();
        Ok(Outcome::Content(BlockContent::Ecm {
            variant: title.to_string(),
            n_effective: ecm.n_effective,
            rows,
        }))
    })();
    make_block(label, title, outcome)
}

fn coint_blocks(pair: &AlignedPair) -> Vec<Block> {
    let mut blocks = vec![adf_battery_block(pair)];

    let eg_outcome: Result<EgResult> = (|| {
        let (y_log, x_log) = log_pair(pair)?;
        engle_granger(&y_log, &x_log)
    })();
    let eg_ref = eg_outcome.as_ref().ok();

    blocks.push(match &eg_outcome {
        Ok(eg) => make_block(
            labels::LONG_RUN,
            "Long-run equilibrium regression",
            Ok(Outcome::Content(BlockContent::LongRun {
                equation: long_run_equation(pair, eg),
            })),
        ),
        Err(e) => make_block(
            labels::LONG_RUN,
            "Long-run equilibrium regression",
            Err(Error::input(e.to_string())),
        ),
    });

    blocks.push(make_block(
        labels::JOHANSEN,
        "Johansen rank test",
        (|| {
            let (y_log, x_log) = log_pair(pair)?;
            let z = vec![y_log.values().to_vec(), x_log.values().to_vec()];
            let result = johansen(&z, JOHANSEN_VAR_LAGS, JohansenDet::default())?;
            Ok(Outcome::Content(BlockContent::Johansen { result }))
        })(),
    ));

    blocks.push(ecm_block(
        labels::ECM_FULL,
        "Error-correction model (full)",
        pair,
        eg_ref,
        EcmTerms {
            include_constant: true,
            include_lagged_dy: true,
        },
    ));
    blocks.push(ecm_block(
        labels::ECM_ADJUSTED,
        "Error-correction model (adjusted)",
        pair,
        eg_ref,
        EcmTerms {
            include_constant: false,
            include_lagged_dy: false,
        },
    ));
    blocks
}

fn granger_block(pair: &AlignedPair, config: &StudyConfig) -> Block {
    let outcome = (|| {
        let (dy, dx) = pair_returns(pair);
        let results = granger_scan(&dy, &dx, config.max_lag, config.exec_mode)?;
        let rows = results.iter().map(GrangerRow::from_result).collect();
        Ok(Outcome::Content(BlockContent::GrangerScan {
            y_series: pair.y_label.clone(),
            x_series: pair.x_label.clone(),
            rows,
        }))
    })();
    make_block(labels::GRANGER, "Granger causality scan", outcome)
}

fn finish(command: &str, config: &StudyConfig, blocks: Vec<Block>, csv: Vec<(String, String)>) -> CommandOutput {
    CommandOutput {
        report: StudyReport {
            command: command.to_string(),
            meta: base_meta(config),
            blocks,
        },
        csv_files: csv,
    }
}

/// Descriptive statistics per window plus the full-window correlogram
/// and histogram plot data.
pub fn cmd_describe(config: &StudyConfig) -> Result<CommandOutput> {
    let ctx = load_ctx(config, false)?;
    let mut blocks = Vec::new();
    for (name, w) in window_list(config) {
        blocks.push(summary_block(&ctx, name, w));
    }
    let (block, csv) = correlogram_block(&ctx, config);
    blocks.push(block);
    Ok(finish("describe", config, blocks, csv))
}

/// Pre/post volatility-model comparison for the configured family.
pub fn cmd_fit(config: &StudyConfig) -> Result<CommandOutput> {
    let ctx = load_ctx(config, false)?;
    let (block, csv) = vol_block(&ctx, config, config.model.family);
    Ok(finish("fit", config, vec![block], csv))
}

/// Long-run analysis: unit-root battery, static regression, rank test,
/// and error-correction models on the full window.
pub fn cmd_coint(config: &StudyConfig) -> Result<CommandOutput> {
    let ctx = load_ctx(config, true)?;
    let pair = aligned_window(&ctx, config.full_window)?;
    let blocks = coint_blocks(&pair);
    Ok(finish("coint", config, blocks, Vec::new()))
}

/// Bidirectional causality scan over the causality window.
pub fn cmd_granger(config: &StudyConfig) -> Result<CommandOutput> {
    let ctx = load_ctx(config, true)?;
    let pair = aligned_window(&ctx, config.causality_window)?;
    let block = granger_block(&pair, config);
    Ok(finish("granger", config, vec![block], Vec::new()))
}

/// The full pipeline in fixed block order: descriptives, unit roots,
/// ARCH-LM, both volatility families, cointegration, causality.
pub fn cmd_report(config: &StudyConfig) -> Result<CommandOutput> {
    let ctx = load_ctx(config, false)?;
    let mut blocks = Vec::new();
    let mut csv = Vec::new();

    for (name, w) in window_list(config) {
        blocks.push(summary_block(&ctx, name, w));
    }
    let (block, mut files) = correlogram_block(&ctx, config);
    blocks.push(block);
    csv.append(&mut files);

    blocks.push(adf_returns_block(&ctx, config));
    blocks.push(adf_subperiod_block(&ctx, config));
    blocks.push(arch_lm_block(&ctx, config));

    for family in [VolFamily::Garch, VolFamily::Tgarch] {
        let (block, mut files) = vol_block(&ctx, config, family);
        blocks.push(block);
        csv.append(&mut files);
    }

    let two_series_labels: [(&str, &str); 6] = [
        (labels::ADF_BATTERY, "Unit-root battery for levels, returns, and differences"),
        (labels::LONG_RUN, "Long-run equilibrium regression"),
        (labels::JOHANSEN, "Johansen rank test"),
        (labels::ECM_FULL, "Error-correction model (full)"),
        (labels::ECM_ADJUSTED, "Error-correction model (adjusted)"),
        (labels::GRANGER, "Granger causality scan"),
    ];
    if ctx.futures.is_none() {
        for (label, title) in two_series_labels {
            blocks.push(make_block(
                label,
                title,
                Ok(Outcome::Skip("futures file not supplied".to_string())),
            ));
        }
    } else {
        match aligned_window(&ctx, config.full_window) {
            Ok(pair) => blocks.extend(coint_blocks(&pair)),
            Err(e) => {
                for (label, title) in &two_series_labels[..5] {
                    blocks.push(make_block(label, title, Err(Error::input(e.to_string()))));
                }
            }
        }
        match aligned_window(&ctx, config.causality_window) {
            Ok(pair) => blocks.push(granger_block(&pair, config)),
            Err(e) => blocks.push(make_block(
                labels::GRANGER,
                "Granger causality scan",
                Err(e),
            )),
        }
    }

    Ok(finish("report", config, blocks, csv))
}

/// Inputs for the data-generation command.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateConfig {
    pub family: VolFamily,
    pub p: usize,
    pub q: usize,
    /// Flattened parameter vector in model order; `None` uses the
    /// family's built-in stable defaults.
    pub params: Option<Vec<f64>>,
    pub t_len: usize,
    pub seed: u64,
    pub out_file: PathBuf,
}

const SIMULATE_BURN_IN: usize = 500;

fn default_sim_params(spec: &VolModelSpec) -> VolParams {
    let p = spec.p as f64;
    let (alpha_total, gamma_total, beta_total) = match spec.family {
        VolFamily::Arch => (0.5, 0.0, 0.0),
        VolFamily::Garch => (0.05, 0.0, 0.90),
        VolFamily::Tgarch => (0.03, 0.10, 0.85),
    };
    let beta = if spec.q == 0 {
        Vec::new()
    } else {
        vec![beta_total / spec.q as f64; spec.q]
    };
    VolParams {
        mean_constant: spec.include_mean_constant.then_some(0.03),
        ar: vec![0.0; spec.mean_lags.len()],
        alpha0: 0.05,
        alpha: vec![alpha_total / p; spec.p],
        gamma: if spec.has_threshold() {
            vec![gamma_total / p; spec.p]
        } else {
            vec![0.0; spec.p]
        },
        beta,
    }
}

/// Simulates a return path and writes it as a price file
/// (P_t = 100 exp(cumulative r / 100)) that the other commands accept.
pub fn cmd_simulate(config: &SimulateConfig) -> Result<CommandOutput> {
    if config.t_len < 30 {
        return Err(Error::input(format!(
            "simulated length must be at least 30, got {}",
            config.t_len
        )));
    }
    let spec = VolModelSpec::new(config.family, config.p, config.q)?;
    let params = match &config.params {
        Some(flat) => VolParams::unflatten(&spec, flat)?,
        None => default_sim_params(&spec),
    };
    let returns = simulate(&spec, &params, config.t_len, SIMULATE_BURN_IN, config.seed)?;

    // Anchor the price path one weekday before the first return so the
    // returns derived from prices reproduce the simulated sample exactly.
    let first = returns.dates()[0];
    let mut anchor = first.pred_opt().expect("valid date");
    while matches!(
        chrono::Datelike::weekday(&anchor),
        chrono::Weekday::Sat | chrono::Weekday::Sun
    ) {
        anchor = anchor.pred_opt().expect("valid date");
    }
    let mut dates = Vec::with_capacity(returns.len() + 1);
    dates.push(anchor);
    dates.extend_from_slice(returns.dates());
    let mut prices = Vec::with_capacity(returns.len() + 1);
    let mut log_level = 0.0;
    prices.push(100.0);
    for r in returns.values() {
        log_level += r / 100.0;
        prices.push(100.0 * log_level.exp());
    }
    let series = PriceSeries::from_parts("simulated".to_string(), dates, prices)?;

    if let Some(parent) = config.out_file.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(&config.out_file, prices_csv(&series))?;

    let meta = vec![
        ("family".to_string(), family_name(config.family).to_string()),
        ("p".to_string(), config.p.to_string()),
        ("q".to_string(), config.q.to_string()),
        (
            "parameters".to_string(),
            format!("{:?}", params.flatten(&spec)?),
        ),
        ("t".to_string(), config.t_len.to_string()),
        ("seed".to_string(), config.seed.to_string()),
    ];
    let block = make_block(
        labels::DATA_FILE,
        "Simulated price file",
        Ok(Outcome::Content(BlockContent::DataFile {
            path: config.out_file.display().to_string(),
            series: series.label().to_string(),
            n_obs: series.len(),
            first_date: series.dates()[0].to_string(),
            last_date: series.dates()[series.len() - 1].to_string(),
        })),
    );
    Ok(CommandOutput {
        report: StudyReport {
            command: "simulate".to_string(),
            meta,
            blocks: vec![block],
        },
        csv_files: Vec::new(),
    })
}
