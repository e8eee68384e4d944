//! Quantiles, tail means and the three risk measures built on them:
//! volatility, Expected Shortfall and Conditional Expected Drawdown.
//!
//! Sign convention: returns are gains. Expected Shortfall works on losses
//! (negated returns); CED works on maximum drawdowns, which are already
//! non-negative.

use std::sync::OnceLock;

use crate::drawdown::{mdd_distribution, MaxDrawdownSample};
use crate::error::{CedError, Result};
use crate::timeseries::CumulativeReturnPath;

/// Slack used when flooring/ceiling `m * (1 - alpha)` and `m * alpha` so that
/// e.g. `10 * (1 - 0.9)` counts as 1.
const COUNT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ConfidenceLevel(f64);

impl ConfidenceLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(CedError::InvalidAlpha(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Number of tail observations `K = floor(m (1 - alpha))`.
pub fn tail_size(m: usize, alpha: ConfidenceLevel) -> Result<usize> {
    let exact = m as f64 * (1.0 - alpha.0);
    let k = (exact + COUNT_EPS * exact.max(1.0)).floor() as usize;
    if k == 0 {
        Err(CedError::EmptyTail {
            size: m,
            alpha: alpha.0,
        })
    } else {
        Ok(k.min(m))
    }
}

/// Indices of the `k` largest values in descending value order. Equal values
/// are taken in index order, so the selection is deterministic.
pub fn top_k_indices(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Finite sample of losses or maximum drawdowns.
#[derive(Debug, Clone)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    sorted: OnceLock<Vec<f64>>,
}

impl PartialEq for EmpiricalSample {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl EmpiricalSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(CedError::TooShort {
                required: 1,
                actual: 0,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(CedError::NonFinite { index });
        }
        Ok(Self {
            values,
            sorted: OnceLock::new(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Ascending copy, built on first use.
    pub fn sorted(&self) -> &[f64] {
        self.sorted.get_or_init(|| {
            let mut v = self.values.clone();
            v.sort_by(f64::total_cmp);
            v
        })
    }

    /// `inf { x : P(X <= x) >= alpha }`: the `ceil(alpha m)`-th smallest value.
    pub fn lower_quantile(&self, alpha: ConfidenceLevel) -> f64 {
        let m = self.len();
        let exact = alpha.0 * m as f64;
        let rank = ((exact - COUNT_EPS * exact.max(1.0)).ceil() as usize).clamp(1, m);
        self.sorted()[rank - 1]
    }

    /// Mean of the `K = floor(m (1 - alpha))` largest values.
    pub fn tail_mean(&self, alpha: ConfidenceLevel) -> Result<f64> {
        let k = tail_size(self.len(), alpha)?;
        let sorted = self.sorted();
        Ok(sorted[sorted.len() - k..].iter().sum::<f64>() / k as f64)
    }
}

/// `DT_alpha`: the lower alpha-quantile of the maximum-drawdown sample.
pub fn drawdown_threshold(sample: &MaxDrawdownSample, alpha: ConfidenceLevel) -> Result<f64> {
    Ok(EmpiricalSample::new(sample.values())?.lower_quantile(alpha))
}

/// CED of an already built maximum-drawdown sample.
pub fn ced_of_sample(sample: &MaxDrawdownSample, alpha: ConfidenceLevel) -> Result<f64> {
    EmpiricalSample::new(sample.values())?.tail_mean(alpha)
}

/// Conditional Expected Drawdown: the tail mean of rolling-window maximum
/// drawdowns of `source`.
pub fn ced(
    source: &CumulativeReturnPath,
    window_len: usize,
    step: usize,
    alpha: ConfidenceLevel,
) -> Result<f64> {
    ced_of_sample(&mdd_distribution(source, window_len, step)?, alpha)
}

/// Expected Shortfall of a return sample: tail mean of the losses `-r`.
pub fn expected_shortfall(returns: &[f64], alpha: ConfidenceLevel) -> Result<f64> {
    // Adding 0.0 turns the -0.0 of an all-zero sample into 0.0.
    Ok(EmpiricalSample::new(returns.iter().map(|r| -r).collect())?.tail_mean(alpha)? + 0.0)
}

/// Sample standard deviation (`m - 1` denominator) times `sqrt(periods_per_year)`.
pub fn volatility(returns: &[f64], periods_per_year: f64) -> Result<f64> {
    if returns.len() < 2 {
        return Err(CedError::TooShort {
            required: 2,
            actual: returns.len(),
        });
    }
    if !(periods_per_year > 0.0) {
        return Err(CedError::InvalidParameter(
            "periods per year must be positive".into(),
        ));
    }
    Ok(sample_variance(returns).sqrt() * periods_per_year.sqrt())
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn sample_variance(values: &[f64]) -> f64 {
    // The rounded mean of a constant sample can differ from the constant.
    if values.iter().all(|v| *v == values[0]) {
        return 0.0;
    }
    let mu = mean(values);
    values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / (values.len() - 1) as f64
}
