//! Drawdown paths, maximum drawdown and empirical maximum-drawdown samples.
//!
//! Drawdowns are absolute differences of cumulative returns (peak minus
//! trough), not percentages of the peak NAV.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{CedError, Result};
use crate::timeseries::{window_starts, CumulativeReturnPath, PeriodReturnSeries};

/// `d_j = max_{i <= j} X_i - X_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawdownPath(Vec<f64>);

impl DrawdownPath {
    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Largest peak-to-trough drop of a path and where it happens.
///
/// When several (peak, trough) pairs realise the maximum, the earliest trough
/// wins, then the earliest peak for that trough. A path that never falls
/// reports `(0, 0)` as its indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxDrawdown {
    pub value: f64,
    pub peak_index: usize,
    pub trough_index: usize,
}

impl MaxDrawdown {
    pub const ZERO: MaxDrawdown = MaxDrawdown {
        value: 0.0,
        peak_index: 0,
        trough_index: 0,
    };

    pub fn is_zero(&self) -> bool {
        self.value == 0.0
    }
}

pub fn drawdown_path(x: &CumulativeReturnPath) -> Result<DrawdownPath> {
    let values = x.values();
    if values.is_empty() {
        return Err(CedError::TooShort {
            required: 1,
            actual: 0,
        });
    }
    let mut peak = f64::NEG_INFINITY;
    Ok(DrawdownPath(
        values
            .iter()
            .map(|&v| {
                peak = peak.max(v);
                peak - v
            })
            .collect(),
    ))
}

pub fn max_drawdown(x: &CumulativeReturnPath) -> Result<MaxDrawdown> {
    if x.len() < 2 {
        return Err(CedError::TooShort {
            required: 2,
            actual: x.len(),
        });
    }
    Ok(max_drawdown_of(x.values()))
}

/// Single pass running-maximum scan over raw values. Empty or one-point input
/// yields [`MaxDrawdown::ZERO`].
pub fn max_drawdown_of(values: &[f64]) -> MaxDrawdown {
    let mut best = MaxDrawdown::ZERO;
    let mut peak = 0;
    for (j, &v) in values.iter().enumerate() {
        if v > values[peak] {
            peak = j;
        }
        let d = values[peak] - v;
        if d > best.value {
            best = MaxDrawdown {
                value: d,
                peak_index: peak,
                trough_index: j,
            };
        }
    }
    best
}

/// Maximum drawdown through `d_j = max(d_{j-1} - r_j, 0)`, `d_0 = 0`.
pub fn max_drawdown_recursive(returns: &PeriodReturnSeries) -> f64 {
    max_drawdown_recursive_of(returns.values().iter().copied())
}

pub fn max_drawdown_recursive_of(returns: impl IntoIterator<Item = f64>) -> f64 {
    let mut d = 0.0_f64;
    let mut best = 0.0_f64;
    for r in returns {
        d = (d - r).max(0.0);
        best = best.max(d);
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSource {
    Rolling,
    Scenario,
}

/// Maximum drawdown of one window, indices relative to the window start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowDrawdown {
    pub window_start: usize,
    pub drawdown: MaxDrawdown,
}

/// Empirical distribution of maximum drawdowns over windows or scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxDrawdownSample {
    pub windows: Vec<WindowDrawdown>,
    pub window_len: usize,
    pub source: SampleSource,
}

impl MaxDrawdownSample {
    pub fn values(&self) -> Vec<f64> {
        self.windows.iter().map(|w| w.drawdown.value).collect()
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// One sample entry per scenario path. Paths need not share a length;
    /// `window_len` records the longest.
    pub fn from_scenarios(paths: &[CumulativeReturnPath]) -> Result<Self> {
        if paths.is_empty() {
            return Err(CedError::InvalidParameter("no scenario paths".into()));
        }
        let windows = paths
            .iter()
            .enumerate()
            .map(|(i, p)| {
                Ok(WindowDrawdown {
                    window_start: i,
                    drawdown: max_drawdown(p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            windows,
            window_len: paths.iter().map(|p| p.len()).max().unwrap_or(0),
            source: SampleSource::Scenario,
        })
    }

    /// Columns `window_start,peak_index,trough_index,mdd`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["window_start", "peak_index", "trough_index", "mdd"])?;
        for win in &self.windows {
            w.write_record([
                win.window_start.to_string(),
                win.drawdown.peak_index.to_string(),
                win.drawdown.trough_index.to_string(),
                win.drawdown.value.to_string(),
            ])?;
        }
        w.flush().map_err(|e| CedError::io("<csv>", e))?;
        Ok(())
    }
}

/// Maximum drawdown of every rolling window of `window_len` points.
pub fn mdd_distribution(
    source: &CumulativeReturnPath,
    window_len: usize,
    step: usize,
) -> Result<MaxDrawdownSample> {
    if window_len < 2 {
        return Err(CedError::InvalidParameter(
            "drawdown windows need at least 2 points".into(),
        ));
    }
    let starts: Vec<usize> = window_starts(source.len(), window_len, step)?.collect();
    let values = source.values();
    // Drawdowns are shift invariant, so scanning the raw slice equals
    // scanning the re-anchored window.
    let windows = starts
        .par_iter()
        .with_min_len(256)
        .map(|&start| WindowDrawdown {
            window_start: start,
            drawdown: max_drawdown_of(&values[start..start + window_len]),
        })
        .collect();
    Ok(MaxDrawdownSample {
        windows,
        window_len,
        source: SampleSource::Rolling,
    })
}
