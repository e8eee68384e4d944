//! Price and return series, cumulative return paths and rolling windows.
//!
//! Every downstream module consumes [`CumulativeReturnPath`]s: cumulative
//! simple returns anchored at zero at the start of the path.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{CedError, Result};

/// How per-period returns accumulate into a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathMode {
    /// `X_j = r_1 + ... + r_j`. The LP and the drawdown recursion use this.
    #[default]
    Additive,
    /// `X_j = (1 + r_1)...(1 + r_j) - 1`.
    Compound,
}

impl std::str::FromStr for PathMode {
    type Err = CedError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "additive" => Ok(PathMode::Additive),
            "compound" => Ok(PathMode::Compound),
            other => Err(CedError::InvalidParameter(format!(
                "unknown path mode `{other}` (expected additive|compound)"
            ))),
        }
    }
}

/// Price levels (or net asset values) observed at equally spaced dates.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    dates: Option<Vec<NaiveDate>>,
    prices: Vec<f64>,
}

impl PriceSeries {
    /// Undated series; positions serve as the ordering.
    pub fn new(prices: Vec<f64>) -> Result<Self> {
        if prices.len() < 2 {
            return Err(CedError::TooShort {
                required: 2,
                actual: prices.len(),
            });
        }
        for (index, &value) in prices.iter().enumerate() {
            if !value.is_finite() {
                return Err(CedError::NonFinite { index });
            }
            if value <= 0.0 {
                return Err(CedError::NonPositivePrice { index, value });
            }
        }
        Ok(Self {
            dates: None,
            prices,
        })
    }

    pub fn with_dates(dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        if dates.len() != prices.len() {
            return Err(CedError::DimensionMismatch(format!(
                "{} dates for {} prices",
                dates.len(),
                prices.len()
            )));
        }
        if let Some(index) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(CedError::UnorderedTimestamps { index: index + 1 });
        }
        let mut series = Self::new(prices)?;
        series.dates = Some(dates);
        Ok(series)
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn dates(&self) -> Option<&[NaiveDate]> {
        self.dates.as_deref()
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    /// Simple per-period returns `P_t / P_{t-1} - 1`.
    pub fn period_returns(&self) -> PeriodReturnSeries {
        PeriodReturnSeries(self.prices.windows(2).map(|w| w[1] / w[0] - 1.0).collect())
    }
}

/// Cumulative simple returns `X_{t_1..t_n}` measured from the path start.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeReturnPath(Vec<f64>);

impl CumulativeReturnPath {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(CedError::NonFinite { index });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Portfolio path `sum_i w_i X_i` for aligned asset paths.
    pub fn weighted_sum(paths: &[CumulativeReturnPath], weights: &[f64]) -> Result<Self> {
        if paths.len() != weights.len() || paths.is_empty() {
            return Err(CedError::DimensionMismatch(format!(
                "{} paths for {} weights",
                paths.len(),
                weights.len()
            )));
        }
        let n = paths[0].len();
        if paths.iter().any(|p| p.len() != n) {
            return Err(CedError::DimensionMismatch(
                "asset paths have different lengths".into(),
            ));
        }
        let mut out = vec![0.0; n];
        for (path, &w) in paths.iter().zip(weights) {
            for (acc, &x) in out.iter_mut().zip(path.values()) {
                *acc += w * x;
            }
        }
        Ok(Self(out))
    }
}

/// Per-period arithmetic returns `r_t`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeriodReturnSeries(Vec<f64>);

impl PeriodReturnSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(CedError::NonFinite { index });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `X_j = P_j / P_1 - 1`.
pub fn prices_to_cumulative_path(prices: &PriceSeries) -> CumulativeReturnPath {
    let base = prices.prices[0];
    CumulativeReturnPath(prices.prices.iter().map(|p| p / base - 1.0).collect())
}

/// Accumulates per-period returns into a path with a leading zero, so `r` of
/// length `T` yields a path of length `T + 1`.
pub fn periods_to_cumulative_path(
    returns: &PeriodReturnSeries,
    mode: PathMode,
) -> Result<CumulativeReturnPath> {
    let mut values = Vec::with_capacity(returns.len() + 1);
    values.push(0.0);
    match mode {
        PathMode::Additive => {
            let mut acc = 0.0;
            for &r in returns.values() {
                acc += r;
                values.push(acc);
            }
        }
        PathMode::Compound => {
            let mut growth = 1.0;
            for (index, &r) in returns.values().iter().enumerate() {
                if r <= -1.0 {
                    return Err(CedError::ReturnWipeout { index, value: r });
                }
                growth *= 1.0 + r;
                values.push(growth - 1.0);
            }
        }
    }
    Ok(CumulativeReturnPath(values))
}

/// Overlapping windows of `window_len` points, each re-anchored to start at 0.
///
/// With step 1 a source of length `T` gives `T - window_len + 1` windows.
pub fn rolling_windows(
    series: &CumulativeReturnPath,
    window_len: usize,
    step: usize,
) -> Result<Vec<CumulativeReturnPath>> {
    Ok(window_starts(series.len(), window_len, step)?
        .map(|start| {
            let slice = &series.values()[start..start + window_len];
            let anchor = slice[0];
            CumulativeReturnPath(slice.iter().map(|x| x - anchor).collect())
        })
        .collect())
}

/// Start offsets of the rolling windows over a source of `length` points.
pub fn window_starts(
    length: usize,
    window_len: usize,
    step: usize,
) -> Result<impl Iterator<Item = usize>> {
    if window_len == 0 || step == 0 {
        return Err(CedError::InvalidParameter(
            "window length and step must be at least 1".into(),
        ));
    }
    if window_len > length {
        return Err(CedError::WindowTooLong {
            window: window_len,
            length,
        });
    }
    Ok((0..=length - window_len).step_by(step))
}

/// Whether the numeric columns of a CSV hold price levels or period returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeriesKind {
    #[default]
    Prices,
    Returns,
}

impl std::str::FromStr for SeriesKind {
    type Err = CedError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prices" => Ok(SeriesKind::Prices),
            "returns" => Ok(SeriesKind::Returns),
            other => Err(CedError::InvalidParameter(format!(
                "unknown series kind `{other}` (expected prices|returns)"
            ))),
        }
    }
}

/// Date-aligned multi-asset table as read from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct AssetPanel {
    pub dates: Vec<NaiveDate>,
    pub names: Vec<String>,
    /// One column per asset, each `dates.len()` long.
    pub columns: Vec<Vec<f64>>,
    /// Rows skipped because a field was missing.
    pub dropped_rows: usize,
}

impl AssetPanel {
    pub fn n_assets(&self) -> usize {
        self.names.len()
    }

    pub fn n_rows(&self) -> usize {
        self.dates.len()
    }

    pub fn price_series(&self, asset: usize) -> Result<PriceSeries> {
        PriceSeries::with_dates(self.dates.clone(), self.columns[asset].clone())
    }

    /// Per-asset period returns. For price panels the first date is consumed,
    /// so the returns line up with `dates[1..]`.
    pub fn period_returns(&self, kind: SeriesKind) -> Result<Vec<PeriodReturnSeries>> {
        (0..self.n_assets())
            .map(|a| match kind {
                SeriesKind::Prices => Ok(self.price_series(a)?.period_returns()),
                SeriesKind::Returns => PeriodReturnSeries::new(self.columns[a].clone()),
            })
            .collect()
    }

    /// Dates matching the output of [`AssetPanel::period_returns`].
    pub fn return_dates(&self, kind: SeriesKind) -> &[NaiveDate] {
        match kind {
            SeriesKind::Prices => &self.dates[1..],
            SeriesKind::Returns => &self.dates,
        }
    }
}

/// Reads a `date,<asset>,<asset>...` CSV file.
pub fn load_csv(path: impl AsRef<Path>) -> Result<AssetPanel> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| CedError::io(path, e))?;
    parse_csv(&text)
}

/// Parses panel CSV text. Row numbers in errors are 1-based file lines.
pub fn parse_csv(text: &str) -> Result<AssetPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.len() < 2 || header.get(0) != Some("date") {
        return Err(CedError::Parse {
            row: 1,
            message: "header must be `date` followed by one column per asset".into(),
        });
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut dates = Vec::new();
    let mut columns = vec![Vec::new(); names.len()];
    let mut dropped_rows = 0;

    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let date_field = record.get(0).unwrap_or("");
        let date = NaiveDate::parse_from_str(date_field, "%Y-%m-%d").map_err(|e| {
            CedError::Parse {
                row,
                message: format!("bad date `{date_field}`: {e}"),
            }
        })?;
        let fields: Vec<&str> = (1..=names.len())
            .map(|c| record.get(c).unwrap_or(""))
            .collect();
        if fields.iter().any(|f| f.is_empty()) {
            dropped_rows += 1;
            continue;
        }
        let mut values = Vec::with_capacity(names.len());
        for field in fields {
            let v: f64 = field.parse().map_err(|_| CedError::Parse {
                row,
                message: format!("bad number `{field}`"),
            })?;
            if !v.is_finite() {
                return Err(CedError::Parse {
                    row,
                    message: format!("non-finite number `{field}`"),
                });
            }
            values.push(v);
        }
        if let Some(&last) = dates.last() {
            if date <= last {
                return Err(CedError::Parse {
                    row,
                    message: format!("date {date} is not after {last}"),
                });
            }
        }
        dates.push(date);
        for (col, v) in columns.iter_mut().zip(values) {
            col.push(v);
        }
    }

    if dates.len() < 2 {
        return Err(CedError::TooShort {
            required: 2,
            actual: dates.len(),
        });
    }
    Ok(AssetPanel {
        dates,
        names,
        columns,
        dropped_rows,
    })
}
