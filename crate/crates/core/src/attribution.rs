//! Euler decomposition of volatility, Expected Shortfall and CED into
//! marginal, total and fractional risk contributions.
//!
//! The ES and CED estimators select their tail once, on the portfolio, and
//! every asset contribution averages over exactly those scenarios. That makes
//! `sum_i w_i mrc_i` equal the portfolio estimate up to rounding.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::drawdown::mdd_distribution;
use crate::error::{CedError, Result};
use crate::riskmeasures::{
    ced, expected_shortfall, mean, sample_variance, tail_size, top_k_indices, volatility, ConfidenceLevel,
};
use crate::timeseries::{
    periods_to_cumulative_path, CumulativeReturnPath, PathMode, PeriodReturnSeries,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RiskMeasure {
    Volatility,
    ExpectedShortfall,
    Ced,
}

impl RiskMeasure {
    pub const ALL: [RiskMeasure; 3] = [
        RiskMeasure::Volatility,
        RiskMeasure::ExpectedShortfall,
        RiskMeasure::Ced,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            RiskMeasure::Volatility => "vol",
            RiskMeasure::ExpectedShortfall => "es",
            RiskMeasure::Ced => "ced",
        }
    }
}

impl fmt::Display for RiskMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for RiskMeasure {
    type Err = CedError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vol" => Ok(RiskMeasure::Volatility),
            "es" => Ok(RiskMeasure::ExpectedShortfall),
            "ced" => Ok(RiskMeasure::Ced),
            other => Err(CedError::InvalidParameter(format!(
                "unknown measure `{other}` (expected vol|es|ced)"
            ))),
        }
    }
}

/// A risk measure together with its estimator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureSpec {
    Volatility {
        periods_per_year: f64,
    },
    ExpectedShortfall {
        alpha: ConfidenceLevel,
    },
    /// CED over rolling drawdown windows of `window` points (additive paths).
    Ced {
        alpha: ConfidenceLevel,
        window: usize,
        step: usize,
    },
}

impl MeasureSpec {
    pub fn measure(&self) -> RiskMeasure {
        match self {
            MeasureSpec::Volatility { .. } => RiskMeasure::Volatility,
            MeasureSpec::ExpectedShortfall { .. } => RiskMeasure::ExpectedShortfall,
            MeasureSpec::Ced { .. } => RiskMeasure::Ced,
        }
    }

    /// Standalone risk of a single return series.
    pub fn risk(&self, returns: &[f64]) -> Result<f64> {
        match *self {
            MeasureSpec::Volatility { periods_per_year } => volatility(returns, periods_per_year),
            MeasureSpec::ExpectedShortfall { alpha } => expected_shortfall(returns, alpha),
            MeasureSpec::Ced {
                alpha,
                window,
                step,
            } => ced(&additive_path(returns)?, window, step, alpha),
        }
    }
}

fn additive_path(returns: &[f64]) -> Result<CumulativeReturnPath> {
    periods_to_cumulative_path(
        &PeriodReturnSeries::new(returns.to_vec())?,
        PathMode::Additive,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssetContribution {
    pub weight: f64,
    /// Marginal contribution, the derivative of portfolio risk along `w_i`.
    pub mrc: f64,
    /// `weight * mrc`.
    pub rc: f64,
    /// `rc / total`; NaN when the portfolio risk is zero.
    pub frc: f64,
    /// Risk of the asset on its own.
    pub standalone: f64,
    /// `mrc / standalone`; NaN when the standalone risk is zero.
    pub gen_corr: f64,
}

/// Per-asset risk decomposition of a portfolio under one measure.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    pub measure: RiskMeasure,
    pub total: f64,
    pub assets: Vec<AssetContribution>,
}

impl RiskReport {
    fn assemble(
        measure: RiskMeasure,
        total: f64,
        weights: &[f64],
        mrc: Vec<f64>,
        standalone: Vec<f64>,
    ) -> Self {
        let assets = weights
            .iter()
            .zip(mrc)
            .zip(standalone)
            .map(|((&weight, mrc), standalone)| {
                let rc = weight * mrc;
                AssetContribution {
                    weight,
                    mrc,
                    rc,
                    frc: if total != 0.0 { rc / total } else { f64::NAN },
                    standalone,
                    gen_corr: if standalone != 0.0 {
                        mrc / standalone
                    } else {
                        f64::NAN
                    },
                }
            })
            .collect();
        Self {
            measure,
            total,
            assets,
        }
    }

    pub fn frc(&self) -> Vec<f64> {
        self.assets.iter().map(|a| a.frc).collect()
    }

    pub fn rc_sum(&self) -> f64 {
        self.assets.iter().map(|a| a.rc).sum()
    }
}

fn check_inputs(columns: &[Vec<f64>], weights: &[f64], min_rows: usize) -> Result<usize> {
    if columns.is_empty() || columns.len() != weights.len() {
        return Err(CedError::DimensionMismatch(format!(
            "{} assets for {} weights",
            columns.len(),
            weights.len()
        )));
    }
    let t = columns[0].len();
    if columns.iter().any(|c| c.len() != t) {
        return Err(CedError::DimensionMismatch(
            "asset return columns differ in length".into(),
        ));
    }
    if t < min_rows {
        return Err(CedError::TooShort {
            required: min_rows,
            actual: t,
        });
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(CedError::InvalidParameter("weights must be finite".into()));
    }
    Ok(t)
}

/// Portfolio return per period, `sum_i w_i r_{i,t}`.
pub fn portfolio_returns(columns: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let t = columns.first().map_or(0, Vec::len);
    let mut out = vec![0.0; t];
    for (col, &w) in columns.iter().zip(weights) {
        for (acc, &r) in out.iter_mut().zip(col) {
            *acc += w * r;
        }
    }
    out
}

/// Sample covariance matrix (`T - 1` denominator) of the asset columns.
pub fn covariance_matrix(columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let t = columns[0].len();
    let means: Vec<f64> = columns.iter().map(|c| mean(c)).collect();
    let n = columns.len();
    let mut cov = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let s: f64 = columns[i]
                .iter()
                .zip(&columns[j])
                .map(|(a, b)| (a - means[i]) * (b - means[j]))
                .sum();
            cov[i][j] = s / (t - 1) as f64;
            cov[j][i] = cov[i][j];
        }
    }
    cov
}

/// Volatility contributions: `mrc_i = Cov(X_i, P) / sigma(P)`, annualized.
pub fn vol_contributions(
    columns: &[Vec<f64>],
    weights: &[f64],
    periods_per_year: f64,
) -> Result<RiskReport> {
    check_inputs(columns, weights, 2)?;
    let port = portfolio_returns(columns, weights);
    let variance = sample_variance(&port);
    if !(variance > 0.0) {
        return Err(CedError::ZeroPortfolioRisk);
    }
    let pm = mean(&port);
    let denom = (port.len() - 1) as f64;
    let cov_w: Vec<f64> = columns
        .iter()
        .map(|c| {
            let cm = mean(c);
            c.iter().zip(&port).map(|(a, p)| (a - cm) * (p - pm)).sum::<f64>() / denom
        })
        .collect();
    let scale = periods_per_year.sqrt();
    let sigma = variance.sqrt();
    let mrc = cov_w.iter().map(|c| c / sigma * scale).collect();
    let standalone = (0..columns.len())
        .map(|i| sample_variance(&columns[i]).sqrt() * scale)
        .collect();
    Ok(RiskReport::assemble(
        RiskMeasure::Volatility,
        sigma * scale,
        weights,
        mrc,
        standalone,
    ))
}

/// Expected Shortfall contributions: each `mrc_i` averages asset-`i` losses
/// over the `K` worst portfolio scenarios.
pub fn es_contributions(
    columns: &[Vec<f64>],
    weights: &[f64],
    alpha: ConfidenceLevel,
) -> Result<RiskReport> {
    let t = check_inputs(columns, weights, 1)?;
    let k = tail_size(t, alpha)?;
    let losses: Vec<f64> = portfolio_returns(columns, weights)
        .into_iter()
        .map(|r| -r)
        .collect();
    let tail = top_k_indices(&losses, k);
    let total = tail.iter().map(|&s| losses[s]).sum::<f64>() / k as f64;
    let mrc = columns
        .iter()
        .map(|col| -tail.iter().map(|&s| col[s]).sum::<f64>() / k as f64)
        .collect();
    let standalone = columns
        .iter()
        .map(|col| expected_shortfall(col, alpha))
        .collect::<Result<_>>()?;
    Ok(RiskReport::assemble(
        RiskMeasure::ExpectedShortfall,
        total,
        weights,
        mrc,
        standalone,
    ))
}

/// CED contributions from aligned per-asset cumulative paths.
///
/// For each of the `K` worst portfolio windows the portfolio's own peak and
/// trough indices are applied to every asset path; `mrc_i` is the mean asset
/// drop `X_i[peak] - X_i[trough]` over those windows.
pub fn ced_contributions(
    asset_paths: &[CumulativeReturnPath],
    weights: &[f64],
    window: usize,
    step: usize,
    alpha: ConfidenceLevel,
) -> Result<RiskReport> {
    let portfolio = CumulativeReturnPath::weighted_sum(asset_paths, weights)?;
    let sample = mdd_distribution(&portfolio, window, step)?;
    let values = sample.values();
    let k = tail_size(values.len(), alpha)?;
    let tail = top_k_indices(&values, k);
    let total = tail.iter().map(|&s| values[s]).sum::<f64>() / k as f64;
    let mrc = asset_paths
        .iter()
        .map(|path| {
            let x = path.values();
            tail.iter()
                .map(|&s| {
                    let w = &sample.windows[s];
                    x[w.window_start + w.drawdown.peak_index]
                        - x[w.window_start + w.drawdown.trough_index]
                })
                .sum::<f64>()
                / k as f64
        })
        .collect();
    let standalone = asset_paths
        .iter()
        .map(|p| ced(p, window, step, alpha))
        .collect::<Result<_>>()?;
    Ok(RiskReport::assemble(
        RiskMeasure::Ced,
        total,
        weights,
        mrc,
        standalone,
    ))
}

/// Contributions under `spec` for per-period asset returns. CED uses additive
/// cumulative paths built from the returns.
pub fn contributions(columns: &[Vec<f64>], weights: &[f64], spec: &MeasureSpec) -> Result<RiskReport> {
    match *spec {
        MeasureSpec::Volatility { periods_per_year } => {
            vol_contributions(columns, weights, periods_per_year)
        }
        MeasureSpec::ExpectedShortfall { alpha } => es_contributions(columns, weights, alpha),
        MeasureSpec::Ced {
            alpha,
            window,
            step,
        } => {
            check_inputs(columns, weights, 1)?;
            let paths = columns
                .iter()
                .map(|c| additive_path(c))
                .collect::<Result<Vec<_>>>()?;
            ced_contributions(&paths, weights, window, step, alpha)
        }
    }
}

/// One row of the weight x standalone risk x generalized correlation split.
#[derive(Debug, Clone, PartialEq)]
pub struct XSigmaRhoRow {
    pub weight: f64,
    pub standalone: f64,
    /// None when the standalone risk is zero but the contribution is not.
    pub correlation: Option<f64>,
    pub rc: f64,
}

impl XSigmaRhoRow {
    pub fn flagged(&self) -> bool {
        self.correlation.is_none()
    }
}

pub fn x_sigma_rho(report: &RiskReport) -> Vec<XSigmaRhoRow> {
    report
        .assets
        .iter()
        .map(|a| {
            let correlation = if a.standalone != 0.0 {
                Some(a.mrc / a.standalone)
            } else if a.rc == 0.0 {
                Some(0.0)
            } else {
                None
            };
            XSigmaRhoRow {
                weight: a.weight,
                standalone: a.standalone,
                correlation,
                rc: a.rc,
            }
        })
        .collect()
}

/// A report evaluated on the trailing `lookback` periods ending before `end`.
#[derive(Debug, Clone, PartialEq)]
pub struct DatedReport {
    /// Exclusive end index into the return columns.
    pub end: usize,
    pub report: RiskReport,
}

/// Reports on trailing windows of `lookback` periods, one every `step` periods.
pub fn rolling_attribution(
    columns: &[Vec<f64>],
    weights: &[f64],
    spec: &MeasureSpec,
    lookback: usize,
    step: usize,
) -> Result<Vec<DatedReport>> {
    let t = check_inputs(columns, weights, 1)?;
    if lookback == 0 || step == 0 {
        return Err(CedError::InvalidParameter(
            "lookback and step must be at least 1".into(),
        ));
    }
    if lookback > t {
        return Err(CedError::WindowTooLong {
            window: lookback,
            length: t,
        });
    }
    let ends: Vec<usize> = (lookback..=t).step_by(step).collect();
    ends.par_iter()
        .map(|&end| {
            let slice: Vec<Vec<f64>> = columns
                .iter()
                .map(|c| c[end - lookback..end].to_vec())
                .collect();
            Ok(DatedReport {
                end,
                report: contributions(&slice, weights, spec)?,
            })
        })
        .collect()
}

/// Columns `date,asset,mrc,rc,frc,standalone,gen_corr`, one row per asset per
/// labelled report.
pub fn write_reports_csv<W: Write>(
    out: W,
    names: &[String],
    reports: &[(String, &RiskReport)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "asset", "mrc", "rc", "frc", "standalone", "gen_corr"])?;
    for (label, report) in reports {
        for (name, a) in names.iter().zip(&report.assets) {
            w.write_record([
                label.clone(),
                name.clone(),
                a.mrc.to_string(),
                a.rc.to_string(),
                a.frc.to_string(),
                a.standalone.to_string(),
                a.gen_corr.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| CedError::io("<csv>", e))?;
    Ok(())
}
