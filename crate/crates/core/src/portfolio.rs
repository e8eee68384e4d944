//! Fixed-mix rebalancing and risk-parity construction.

use crate::attribution::{contributions, MeasureSpec, RiskMeasure, RiskReport};
use crate::error::{CedError, Result};

/// Default trailing estimation window: three years of daily periods.
pub const DEFAULT_ESTIMATION_WINDOW: usize = 756;
/// Monthly rebalancing on daily data.
pub const MONTHLY: usize = 21;
pub const QUARTERLY: usize = 63;

#[derive(Debug, Clone, PartialEq)]
pub struct RebalancePolicy {
    targets: Vec<f64>,
    frequency: usize,
}

impl RebalancePolicy {
    pub fn new(targets: Vec<f64>, frequency: usize) -> Result<Self> {
        validate_weights(&targets)?;
        if frequency == 0 {
            return Err(CedError::InvalidParameter("rebalance frequency must be at least 1".into()));
        }
        Ok(Self { targets, frequency })
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn frequency(&self) -> usize {
        self.frequency
    }
}

fn validate_weights(w: &[f64]) -> Result<()> {
    if w.is_empty() {
        return Err(CedError::InvalidParameter("no weights".into()));
    }
    if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(CedError::InvalidParameter("weights must be finite and non-negative".into()));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(CedError::InvalidParameter(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedMixResult {
    pub returns: Vec<f64>,
    /// Weights held at the start of each period.
    pub weights: Vec<Vec<f64>>,
    /// NAV after each period from per-asset holdings, starting from 1.
    pub nav: Vec<f64>,
}

fn check_columns(columns: &[Vec<f64>], n_weights: usize) -> Result<usize> {
    if columns.len() != n_weights {
        return Err(CedError::DimensionMismatch(format!(
            "{} return columns for {} weights",
            columns.len(),
            n_weights
        )));
    }
    let t = columns[0].len();
    if columns.iter().any(|c| c.len() != t) {
        return Err(CedError::DimensionMismatch("return columns differ in length".into()));
    }
    for c in columns {
        if let Some(index) = c.iter().position(|r| !r.is_finite()) {
            return Err(CedError::NonFinite { index });
        }
        if let Some(index) = c.iter().position(|&r| r <= -1.0) {
            return Err(CedError::ReturnWipeout {
                index,
                value: c[index],
            });
        }
    }
    Ok(t)
}

/// Holds `start` weights and lets them drift with asset performance over
/// `columns[..][from..to]`, appending to `out`.
fn drift(
    columns: &[Vec<f64>],
    start: &[f64],
    from: usize,
    to: usize,
    nav: &mut f64,
    out: &mut FixedMixResult,
) {
    let mut holdings: Vec<f64> = start.iter().map(|w| w * *nav).collect();
    for t in from..to {
        let total: f64 = holdings.iter().sum();
        let w: Vec<f64> = holdings.iter().map(|h| h / total).collect();
        let rp: f64 = w.iter().zip(columns).map(|(wi, c)| wi * c[t]).sum();
        for (h, c) in holdings.iter_mut().zip(columns) {
            *h *= 1.0 + c[t];
        }
        *nav = holdings.iter().sum();
        out.returns.push(rp);
        out.weights.push(w);
        out.nav.push(*nav);
    }
}

/// Fixed-mix portfolio: weights drift between rebalances and are reset to
/// the targets every `frequency` periods, starting with period 0.
pub fn fixed_mix(columns: &[Vec<f64>], policy: &RebalancePolicy) -> Result<FixedMixResult> {
    let t = check_columns(columns, policy.targets.len())?;
    let mut out = FixedMixResult {
        returns: Vec::with_capacity(t),
        weights: Vec::with_capacity(t),
        nav: Vec::with_capacity(t),
    };
    let mut nav = 1.0;
    for start in (0..t).step_by(policy.frequency) {
        drift(
            columns,
            &policy.targets,
            start,
            (start + policy.frequency).min(t),
            &mut nav,
            &mut out,
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParitySpec {
    pub measure: MeasureSpec,
    pub estimation_window: usize,
    pub rebalance: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityOptions {
    /// Exponent on the step toward `1 / mrc`; 1 is the undamped update.
    pub damping: f64,
    /// Target for `max |frc_i - 1/m|`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ParityOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            tolerance: 1e-4,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParitySolution {
    pub weights: Vec<f64>,
    /// `max |frc_i - 1/m|` at `weights`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Some mrc was not positive at equal weights, so those were kept.
    pub fallback: bool,
}

fn parity_residual(report: &RiskReport) -> f64 {
    let m = report.assets.len() as f64;
    report
        .assets
        .iter()
        .map(|a| (a.frc - 1.0 / m).abs())
        .fold(0.0, f64::max)
}

/// Equal-risk-contribution weights for `spec` on `columns`.
///
/// Iterates `w_i <- normalize(w_i^(1-d) * (1/mrc_i)^d)` from equal weights.
/// Its fixed points have `w_i * mrc_i` equal across assets. The damping `d`
/// halves whenever the residual fails to improve, and the best iterate seen
/// is returned.
pub fn parity_weights(
    columns: &[Vec<f64>],
    spec: &MeasureSpec,
    opts: &ParityOptions,
) -> Result<ParitySolution> {
    let m = columns.len();
    if m == 0 {
        return Err(CedError::InvalidParameter("no assets".into()));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(CedError::InvalidParameter("damping must be in (0, 1]".into()));
    }
    let equal = vec![1.0 / m as f64; m];
    let mut w = equal.clone();
    let mut damping = opts.damping;
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut last = f64::INFINITY;
    let mut iterations = 0;
    loop {
        let report = contributions(columns, &w, spec)?;
        if report.assets.iter().any(|a| !(a.mrc > 0.0)) {
            if iterations == 0 {
                return Ok(ParitySolution {
                    weights: equal,
                    residual: parity_residual(&report),
                    iterations,
                    converged: false,
                    fallback: true,
                });
            }
            // Stepped out of the region where the measure is positive.
            damping *= 0.5;
            w = best.as_ref().map(|b| b.0.clone()).unwrap_or_else(|| equal.clone());
            iterations += 1;
            if iterations >= opts.max_iterations {
                break;
            }
            continue;
        }
        let residual = parity_residual(&report);
        if best.as_ref().is_none_or(|b| residual < b.1) {
            best = Some((w.clone(), residual));
        }
        if residual <= opts.tolerance || iterations >= opts.max_iterations {
            break;
        }
        // Tail-based measures jump between tail sets; shrink the step when
        // the iteration stops improving.
        if residual >= last {
            damping = (damping * 0.5).max(1e-6);
        }
        last = residual;
        let raw: Vec<f64> = w
            .iter()
            .zip(&report.assets)
            .map(|(wi, a)| wi.powf(1.0 - damping) * a.mrc.powf(-damping))
            .collect();
        let sum: f64 = raw.iter().sum();
        w = raw.iter().map(|v| v / sum).collect();
        iterations += 1;
    }
    let (weights, residual) = best.expect("first iterate is always scored");
    Ok(ParitySolution {
        weights,
        residual,
        iterations,
        converged: residual <= opts.tolerance,
        fallback: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityDate {
    /// First period held with these weights.
    pub period: usize,
    pub solution: ParitySolution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityHistory {
    pub dates: Vec<ParityDate>,
    /// Portfolio from the first allocation onward; period `p` of this series
    /// is period `first + p` of the input.
    pub portfolio: FixedMixResult,
    pub first: usize,
}

/// Rolling risk parity: every `rebalance` periods, solve parity on the
/// trailing `estimation_window` returns and hold the result (drifting) until
/// the next allocation.
pub fn risk_parity(
    columns: &[Vec<f64>],
    spec: &ParitySpec,
    opts: &ParityOptions,
) -> Result<ParityHistory> {
    let t = check_columns(columns, columns.len().max(1))?;
    if spec.rebalance == 0 || spec.estimation_window < 2 {
        return Err(CedError::InvalidParameter(
            "rebalance must be >= 1 and estimation window >= 2".into(),
        ));
    }
    if spec.estimation_window >= t {
        return Err(CedError::TooShort {
            required: spec.estimation_window + 1,
            actual: t,
        });
    }
    let mut portfolio = FixedMixResult {
        returns: Vec::new(),
        weights: Vec::new(),
        nav: Vec::new(),
    };
    let mut dates = Vec::new();
    let mut nav = 1.0;
    for start in (spec.estimation_window..t).step_by(spec.rebalance) {
        let trailing: Vec<Vec<f64>> = columns
            .iter()
            .map(|c| c[start - spec.estimation_window..start].to_vec())
            .collect();
        let solution = parity_weights(&trailing, &spec.measure, opts)?;
        drift(
            columns,
            &solution.weights,
            start,
            (start + spec.rebalance).min(t),
            &mut nav,
            &mut portfolio,
        );
        dates.push(ParityDate {
            period: start,
            solution,
        });
    }
    Ok(ParityHistory {
        dates,
        portfolio,
        first: spec.estimation_window,
    })
}

/// Fractional contributions of one portfolio under one measure.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossEntry {
    pub portfolio: String,
    pub measure: RiskMeasure,
    pub frc: Vec<f64>,
}

/// Evaluates every portfolio under every measure on the same returns.
pub fn parity_cross_report(
    columns: &[Vec<f64>],
    portfolios: &[(String, Vec<f64>)],
    measures: &[MeasureSpec],
) -> Result<Vec<CrossEntry>> {
    let mut out = Vec::with_capacity(portfolios.len() * measures.len());
    for (name, w) in portfolios {
        for spec in measures {
            out.push(CrossEntry {
                portfolio: name.clone(),
                measure: spec.measure(),
                frc: contributions(columns, w, spec)?.frc(),
            });
        }
    }
    Ok(out)
}

/// Static parity portfolio per measure on the full sample, labelled by the
/// measure tag, followed by the cross report.
pub fn parity_cross_study(
    columns: &[Vec<f64>],
    measures: &[MeasureSpec],
    opts: &ParityOptions,
) -> Result<(Vec<ParitySolution>, Vec<CrossEntry>)> {
    let solutions = measures
        .iter()
        .map(|spec| parity_weights(columns, spec, opts))
        .collect::<Result<Vec<_>>>()?;
    let portfolios: Vec<(String, Vec<f64>)> = measures
        .iter()
        .zip(&solutions)
        .map(|(spec, s)| (spec.measure().to_string(), s.weights.clone()))
        .collect();
    let report = parity_cross_report(columns, &portfolios, measures)?;
    Ok((solutions, report))
}
