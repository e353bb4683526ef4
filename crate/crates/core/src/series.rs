//! Dated series types and transforms: price ingestion from delimited text,
//! log and log-return construction, differencing, window slicing, and
//! date-intersection alignment of two series.

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly positive close prices on strictly increasing dates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    label: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

/// Natural logs of prices, one per source observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogSeries {
    label: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

/// Percentage log returns; one fewer observation than the source prices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    label: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

/// Two series restricted to their common dates, in date order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub dates: Vec<NaiveDate>,
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    pub y_label: String,
    pub x_label: String,
}

/// Common accessors for the dated series kinds, plus reconstruction from
/// parts so generic window and alignment helpers can return the same kind
/// they were given.
pub trait TimeSeries: Sized {
    fn label(&self) -> &str;
    fn dates(&self) -> &[NaiveDate];
    fn values(&self) -> &[f64];
    fn from_parts(label: String, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self>;

    fn len(&self) -> usize {
        self.values().len()
    }

    fn is_empty(&self) -> bool {
        self.values().is_empty()
    }
}

fn check_dated(dates: &[NaiveDate], values: &[f64]) -> Result<()> {
    if dates.len() != values.len() {
        return Err(Error::input("dates and values must have equal length"));
    }
    for w in dates.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::input(format!(
                "dates must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::input(format!("non-finite value at index {i}")));
    }
    Ok(())
}

macro_rules! impl_series {
    ($ty:ident) => {
        impl TimeSeries for $ty {
            fn label(&self) -> &str {
                &self.label
            }
            fn dates(&self) -> &[NaiveDate] {
                &self.dates
            }
            fn values(&self) -> &[f64] {
                &self.values
            }
            fn from_parts(
                label: String,
                dates: Vec<NaiveDate>,
                values: Vec<f64>,
            ) -> Result<Self> {
                check_dated(&dates, &values)?;
                $ty::validate_values(&values)?;
                Ok($ty {
                    label,
                    dates,
                    values,
                })
            }
        }
    };
}

impl PriceSeries {
    fn validate_values(values: &[f64]) -> Result<()> {
        if let Some(i) = values.iter().position(|v| *v <= 0.0) {
            return Err(Error::input(format!("price at index {i} is not positive")));
        }
        Ok(())
    }
}

impl LogSeries {
    fn validate_values(_values: &[f64]) -> Result<()> {
        Ok(())
    }
}

impl ReturnSeries {
    fn validate_values(_values: &[f64]) -> Result<()> {
        Ok(())
    }
}

impl_series!(PriceSeries);
impl_series!(LogSeries);
impl_series!(ReturnSeries);

/// How columns are located in the input text.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnFormat {
    /// First line is a header; columns are found by name, case-insensitively.
    Header { date: String, close: String },
    /// No header; fixed zero-based column positions.
    Positional { date: usize, close: usize },
}

impl Default for ColumnFormat {
    fn default() -> Self {
        ColumnFormat::Header {
            date: "date".to_string(),
            close: "close".to_string(),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum DateStyle {
    Iso,
    DayMonthYear,
}

fn parse_date(text: &str, style: &mut Option<DateStyle>, line: usize) -> Result<NaiveDate> {
    let attempt = |s: DateStyle| -> Option<NaiveDate> {
        let fmt = match s {
            DateStyle::Iso => "%Y-%m-%d",
            DateStyle::DayMonthYear => "%d/%m/%Y",
        };
        NaiveDate::parse_from_str(text, fmt).ok()
    };
    match *style {
        Some(s) => attempt(s).ok_or_else(|| Error::Parse {
            line,
            message: format!("date '{text}' does not match the file's date format"),
        }),
        None => {
            for s in [DateStyle::Iso, DateStyle::DayMonthYear] {
                if let Some(d) = attempt(s) {
                    *style = Some(s);
                    return Ok(d);
                }
            }
            Err(Error::Parse {
                line,
                message: format!("unrecognized date '{text}' (expected ISO-8601 or DD/MM/YYYY)"),
            })
        }
    }
}

/// Parses delimited price text into a [`PriceSeries`].
///
/// The delimiter (comma or tab) is taken from the first line. Dates may be
/// ISO-8601 or DD/MM/YYYY, detected once per file. Rows are sorted by date;
/// duplicate dates, non-positive prices, and malformed fields are errors
/// that name the offending 1-based line.
pub fn parse_prices(text: &str, label: &str, format: &ColumnFormat) -> Result<PriceSeries> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let delim_of = |l: &str| if l.contains('\t') { '\t' } else { ',' };

    let (date_idx, close_idx, skip_first) = match format {
        ColumnFormat::Header { date, close } => {
            let (line_no, header) = lines
                .next()
                .ok_or_else(|| Error::input("input has no data rows"))?;
            let delim = delim_of(header);
            let cells: Vec<String> = header
                .split(delim)
                .map(|c| c.trim().trim_matches('"').to_ascii_lowercase())
                .collect();
            let find = |name: &str| {
                cells
                    .iter()
                    .position(|c| c == &name.to_ascii_lowercase())
                    .ok_or_else(|| Error::Parse {
                        line: line_no + 1,
                        message: format!("header is missing a '{name}' column"),
                    })
            };
            (find(date)?, find(close)?, true)
        }
        ColumnFormat::Positional { date, close } => (*date, *close, false),
    };
    let _ = skip_first;

    let mut style: Option<DateStyle> = None;
    let mut rows: Vec<(NaiveDate, f64, usize)> = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let delim = delim_of(raw);
        let cells: Vec<&str> = raw.split(delim).map(|c| c.trim().trim_matches('"')).collect();
        let need = date_idx.max(close_idx);
        if cells.len() <= need {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected at least {} columns, found {}", need + 1, cells.len()),
            });
        }
        let date = parse_date(cells[date_idx], &mut style, line_no)?;
        let close: f64 = cells[close_idx].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid number '{}'", cells[close_idx]),
        })?;
        if !close.is_finite() || close <= 0.0 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("close price must be positive and finite, got '{close}'"),
            });
        }
        rows.push((date, close, line_no));
    }
    if rows.is_empty() {
        return Err(Error::input("input has no data rows"));
    }
    rows.sort_by_key(|r| r.0);
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::Parse {
                line: w[1].2,
                message: format!("duplicate date {}", w[1].0),
            });
        }
    }
    let dates: Vec<NaiveDate> = rows.iter().map(|r| r.0).collect();
    let values: Vec<f64> = rows.iter().map(|r| r.1).collect();
    PriceSeries::from_parts(label.to_string(), dates, values)
}

/// Percentage log returns `100 (ln p_t - ln p_{t-1})`, dated by the later
/// observation of each pair.
pub fn to_returns(prices: &PriceSeries) -> Result<ReturnSeries> {
    if prices.len() < 2 {
        return Err(Error::input("need at least two prices to form returns"));
    }
    let values: Vec<f64> = prices
        .values
        .windows(2)
        .map(|w| 100.0 * (w[1].ln() - w[0].ln()))
        .collect();
    let dates = prices.dates[1..].to_vec();
    ReturnSeries::from_parts(prices.label.clone(), dates, values)
}

/// Natural log of each price, keeping dates.
pub fn to_log(prices: &PriceSeries) -> Result<LogSeries> {
    let values: Vec<f64> = prices.values.iter().map(|p| p.ln()).collect();
    LogSeries::from_parts(prices.label.clone(), prices.dates.clone(), values)
}

/// Iterated first differences of a dated series; each pass drops the first
/// observation. `order` zero returns the series unchanged.
pub fn difference<T: TimeSeries>(series: &T, order: usize) -> Result<T> {
    if series.len() <= order {
        return Err(Error::input(format!(
            "cannot difference {} observations {order} times",
            series.len()
        )));
    }
    let mut dates = series.dates().to_vec();
    let mut values = series.values().to_vec();
    for _ in 0..order {
        values = values.windows(2).map(|w| w[1] - w[0]).collect();
        dates = dates[1..].to_vec();
    }
    T::from_parts(series.label().to_string(), dates, values)
}

/// Whether each end of a date window is inclusive. Both default to inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub start_inclusive: bool,
    pub end_inclusive: bool,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            start_inclusive: true,
            end_inclusive: true,
        }
    }
}

/// Restricts a series to a date window. An empty result is legal.
pub fn slice_by_date<T: TimeSeries>(
    series: &T,
    start: NaiveDate,
    end: NaiveDate,
    bounds: Bounds,
) -> Result<T> {
    if end < start {
        return Err(Error::input(format!("window end {end} precedes start {start}")));
    }
    let keep = |d: &NaiveDate| {
        let lo = if bounds.start_inclusive { *d >= start } else { *d > start };
        let hi = if bounds.end_inclusive { *d <= end } else { *d < end };
        lo && hi
    };
    let mut dates = Vec::new();
    let mut values = Vec::new();
    for (d, v) in series.dates().iter().zip(series.values()) {
        if keep(d) {
            dates.push(*d);
            values.push(*v);
        }
    }
    T::from_parts(series.label().to_string(), dates, values)
}

/// Intersects two series on shared dates. Errors if no dates overlap.
pub fn align<A: TimeSeries, B: TimeSeries>(a: &A, b: &B) -> Result<AlignedPair> {
    let mut dates = Vec::new();
    let mut y = Vec::new();
    let mut x = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    let (da, db) = (a.dates(), b.dates());
    while i < da.len() && j < db.len() {
        match da[i].cmp(&db[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dates.push(da[i]);
                y.push(a.values()[i]);
                x.push(b.values()[j]);
                i += 1;
                j += 1;
            }
        }
    }
    if dates.is_empty() {
        return Err(Error::input(format!(
            "series '{}' and '{}' share no dates",
            a.label(),
            b.label()
        )));
    }
    Ok(AlignedPair {
        dates,
        y,
        x,
        y_label: a.label().to_string(),
        x_label: b.label().to_string(),
    })
}

/// `n` consecutive weekday dates starting at `start` (rolled forward to a
/// weekday if needed), for dating synthetic series.
pub fn synthetic_weekdays(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d.succ_opt().expect("date range exhausted");
    }
    out
}
