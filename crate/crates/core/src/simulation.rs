//! AR(1) Monte-Carlo studies of how serial correlation feeds drawdown risk.
//!
//! Random streams: a run seeded with `seed` gives cell `c` the ChaCha8 stream
//! `(seed, c)`, so cells are independent and can be evaluated in any order.
//! Within one κ-sweep every κ reuses the same innovations (common random
//! numbers), so differences between rows come from κ alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::attribution::{contributions, MeasureSpec, RiskReport};
use crate::error::{CedError, Result};
use crate::optimizer::ScenarioSet;
use crate::riskmeasures::{
    ced, expected_shortfall, mean, sample_variance, volatility, ConfidenceLevel,
};
use crate::timeseries::{periods_to_cumulative_path, PathMode, PeriodReturnSeries};

/// Independent random stream `cell` of the run seeded with `seed`.
pub fn stream_rng(seed: u64, cell: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(cell);
    rng
}

pub fn standard_normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    StandardNormal.sample_iter(rng).take(n).collect()
}

/// `r_t = kappa r_{t-1} + eps_t`, `eps_t ~ N(0, sigma_eps^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Params {
    kappa: f64,
    sigma_eps: f64,
}

impl Ar1Params {
    pub fn new(kappa: f64, sigma_eps: f64) -> Result<Self> {
        if !(kappa.abs() < 1.0) {
            return Err(CedError::NonStationary(kappa));
        }
        if !(sigma_eps > 0.0 && sigma_eps.is_finite()) {
            return Err(CedError::InvalidParameter(format!(
                "innovation sd must be positive, got {sigma_eps}"
            )));
        }
        Ok(Self { kappa, sigma_eps })
    }

    /// Innovation sd chosen so the stationary volatility, annualized over
    /// `periods_per_year`, equals `annual_vol`.
    pub fn from_annual_vol(kappa: f64, annual_vol: f64, periods_per_year: f64) -> Result<Self> {
        Self::new(kappa, 1.0)?;
        Self::new(
            kappa,
            annual_vol / periods_per_year.sqrt() * (1.0 - kappa * kappa).sqrt(),
        )
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn sigma_eps(&self) -> f64 {
        self.sigma_eps
    }

    /// `sigma_eps^2 / (1 - kappa^2)`.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma_eps * self.sigma_eps / (1.0 - self.kappa * self.kappa)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialCondition {
    /// `r_0 ~ N(0, sigma_eps^2 / (1 - kappa^2))`.
    #[default]
    Stationary,
    /// Start at zero and discard this many leading periods.
    Burnin(usize),
}

/// Number of standard normal draws needed for `length` periods.
pub fn draws_needed(length: usize, init: InitialCondition) -> usize {
    match init {
        InitialCondition::Stationary => length,
        InitialCondition::Burnin(b) => length + b,
    }
}

/// Drives the recursion with standard normal draws `z` (scaled by
/// `sigma_eps` here).
pub fn ar1_from_normals(p: &Ar1Params, z: &[f64], init: InitialCondition) -> Vec<f64> {
    match init {
        InitialCondition::Stationary => {
            let mut out = Vec::with_capacity(z.len());
            let mut prev = 0.0;
            for (t, &e) in z.iter().enumerate() {
                prev = if t == 0 {
                    e * p.stationary_variance().sqrt()
                } else {
                    p.kappa * prev + p.sigma_eps * e
                };
                out.push(prev);
            }
            out
        }
        InitialCondition::Burnin(b) => {
            let mut prev = 0.0;
            z.iter()
                .map(|&e| {
                    prev = p.kappa * prev + p.sigma_eps * e;
                    prev
                })
                .skip(b)
                .collect()
        }
    }
}

pub fn ar1_simulate(
    p: &Ar1Params,
    length: usize,
    seed: u64,
    init: InitialCondition,
) -> Result<PeriodReturnSeries> {
    if length == 0 {
        return Err(CedError::InvalidParameter("length must be at least 1".into()));
    }
    let z = standard_normals(&mut stream_rng(seed, 0), draws_needed(length, init));
    PeriodReturnSeries::new(ar1_from_normals(p, &z, init))
}

/// Gaussian conditional maximum-likelihood fit of a zero-intercept AR(1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Fit {
    pub kappa: f64,
    pub sigma_eps: f64,
    /// Standard error of `kappa`.
    pub std_error: f64,
}

impl Ar1Fit {
    pub fn residuals(&self, series: &[f64]) -> Vec<f64> {
        series.windows(2).map(|w| w[1] - self.kappa * w[0]).collect()
    }
}

/// Least squares of `r_t` on `r_{t-1}`, which is the conditional MLE.
pub fn fit_ar1(series: &[f64]) -> Result<Ar1Fit> {
    if series.len() < 10 {
        return Err(CedError::TooShort {
            required: 10,
            actual: series.len(),
        });
    }
    if sample_variance(series) == 0.0 {
        return Err(CedError::ZeroVariance);
    }
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for w in series.windows(2) {
        sxy += w[0] * w[1];
        sxx += w[0] * w[0];
    }
    if sxx == 0.0 {
        return Err(CedError::ZeroVariance);
    }
    let kappa = sxy / sxx;
    let n = (series.len() - 1) as f64;
    let ssr: f64 = series
        .windows(2)
        .map(|w| (w[1] - kappa * w[0]).powi(2))
        .sum();
    let sigma2 = ssr / n;
    Ok(Ar1Fit {
        kappa,
        sigma_eps: sigma2.sqrt(),
        std_error: (sigma2 / sxx).sqrt(),
    })
}

/// Risk of one simulated AR(1) series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub kappa: f64,
    pub volatility: f64,
    pub es: f64,
    pub ced: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub sigma_eps: f64,
    pub length: usize,
    pub alpha: ConfidenceLevel,
    /// Drawdown window in path points.
    pub window: usize,
    pub init: InitialCondition,
}

/// Volatility (per period), ES and CED of an AR(1) series for each κ. All
/// rows share the innovations drawn from `seed`.
pub fn kappa_sweep(kappas: &[f64], cfg: &SweepConfig, seed: u64) -> Result<Vec<SweepRow>> {
    let params = kappas
        .iter()
        .map(|&k| Ar1Params::new(k, cfg.sigma_eps))
        .collect::<Result<Vec<_>>>()?;
    let z = standard_normals(&mut stream_rng(seed, 0), draws_needed(cfg.length, cfg.init));
    params
        .par_iter()
        .map(|p| {
            let r = ar1_from_normals(p, &z, cfg.init);
            let path = periods_to_cumulative_path(&PeriodReturnSeries::new(r.clone())?, PathMode::Additive)?;
            Ok(SweepRow {
                kappa: p.kappa(),
                volatility: volatility(&r, 1.0)?,
                es: expected_shortfall(&r, cfg.alpha)?,
                ced: ced(&path, cfg.window, 1, cfg.alpha)?,
            })
        })
        .collect()
}

/// Last row divided by first row, per measure: (vol, es, ced).
pub fn growth_ratios(rows: &[SweepRow]) -> Option<(f64, f64, f64)> {
    let (first, last) = (rows.first()?, rows.last()?);
    Some((
        last.volatility / first.volatility,
        last.es / first.es,
        last.ced / first.ced,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoAssetConfig {
    pub kappa_e: f64,
    pub kappa_b: f64,
    /// Annualized stationary volatilities.
    pub vol_e: f64,
    pub vol_b: f64,
    pub weights: [f64; 2],
    pub length: usize,
    pub alpha: ConfidenceLevel,
    pub window: usize,
    pub periods_per_year: f64,
    pub init: InitialCondition,
}

impl Default for TwoAssetConfig {
    fn default() -> Self {
        Self {
            kappa_e: 0.43,
            kappa_b: 0.35,
            vol_e: 0.184,
            vol_b: 0.055,
            weights: [0.6, 0.4],
            length: 100_000,
            alpha: ConfidenceLevel::new(0.9).expect("valid"),
            window: 126,
            periods_per_year: 252.0,
            init: InitialCondition::Stationary,
        }
    }
}

/// Contribution reports for vol, ES and CED, on the simulated returns and on
/// the control built from fitted AR(1) residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoAssetStudy {
    pub raw: Vec<RiskReport>,
    pub residual: Vec<RiskReport>,
    pub fits: [Ar1Fit; 2],
}

impl TwoAssetStudy {
    /// Fractional contribution of asset E per measure: (vol, es, ced).
    pub fn frc_e(reports: &[RiskReport]) -> (f64, f64, f64) {
        (
            reports[0].assets[0].frc,
            reports[1].assets[0].frc,
            reports[2].assets[0].frc,
        )
    }
}

fn measure_specs(alpha: ConfidenceLevel, window: usize, periods_per_year: f64) -> [MeasureSpec; 3] {
    [
        MeasureSpec::Volatility { periods_per_year },
        MeasureSpec::ExpectedShortfall { alpha },
        MeasureSpec::Ced {
            alpha,
            window,
            step: 1,
        },
    ]
}

/// Simulates two independent AR(1) assets held in a constant-weight mix.
///
/// The control fits an AR(1) to each asset, keeps only the residuals and
/// rescales them so that `w_i * sd_i` is equal across assets; without serial
/// correlation every measure should then split risk evenly.
pub fn two_asset_study(cfg: &TwoAssetConfig, seed: u64) -> Result<TwoAssetStudy> {
    let pe = Ar1Params::from_annual_vol(cfg.kappa_e, cfg.vol_e, cfg.periods_per_year)?;
    let pb = Ar1Params::from_annual_vol(cfg.kappa_b, cfg.vol_b, cfg.periods_per_year)?;
    let n = draws_needed(cfg.length, cfg.init);
    let e = ar1_from_normals(&pe, &standard_normals(&mut stream_rng(seed, 0), n), cfg.init);
    let b = ar1_from_normals(&pb, &standard_normals(&mut stream_rng(seed, 1), n), cfg.init);
    let fits = [fit_ar1(&e)?, fit_ar1(&b)?];

    let mut resid = vec![fits[0].residuals(&e), fits[1].residuals(&b)];
    let budgets: Vec<f64> = resid
        .iter()
        .zip(cfg.weights)
        .map(|(r, w)| w * sample_variance(r).sqrt())
        .collect();
    let nonzero: Vec<f64> = budgets.iter().copied().filter(|b| *b > 0.0).collect();
    if !nonzero.is_empty() {
        let target = mean(&nonzero);
        for (r, &budget) in resid.iter_mut().zip(&budgets) {
            if budget > 0.0 {
                let s = target / budget;
                r.iter_mut().for_each(|v| *v *= s);
            }
        }
    }

    let raw_cols = vec![e, b];
    let specs = measure_specs(cfg.alpha, cfg.window, cfg.periods_per_year);
    let run = |cols: &Vec<Vec<f64>>| {
        specs
            .par_iter()
            .map(|spec| contributions(cols, &cfg.weights, spec))
            .collect::<Result<Vec<_>>>()
    };
    Ok(TwoAssetStudy {
        raw: run(&raw_cols)?,
        residual: run(&resid)?,
        fits,
    })
}

/// Pearson correlations of rolling fitted κ with rolling vol, ES and CED.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaCorrelations {
    pub vol: f64,
    pub es: f64,
    pub ced: f64,
    pub windows: usize,
}

/// Rolling blocks of `window` returns every `step` periods. Each block gets a
/// fitted κ, its volatility, its ES, and the CED of its additive path with
/// drawdown sub-windows of `mdd_window` points.
pub fn kappa_risk_correlation(
    returns: &[f64],
    window: usize,
    mdd_window: usize,
    step: usize,
    alpha: ConfidenceLevel,
) -> Result<KappaCorrelations> {
    if step == 0 || window == 0 {
        return Err(CedError::InvalidParameter("window and step must be at least 1".into()));
    }
    if window > returns.len() {
        return Err(CedError::WindowTooLong {
            window,
            length: returns.len(),
        });
    }
    let starts: Vec<usize> = (0..=returns.len() - window).step_by(step).collect();
    if starts.len() < 30 {
        return Err(CedError::TooShort {
            required: 30,
            actual: starts.len(),
        });
    }
    let rows = starts
        .par_iter()
        .map(|&s| {
            let block = &returns[s..s + window];
            let path = periods_to_cumulative_path(&PeriodReturnSeries::new(block.to_vec())?, PathMode::Additive)?;
            Ok([
                fit_ar1(block)?.kappa,
                volatility(block, 1.0)?,
                expected_shortfall(block, alpha)?,
                ced(&path, mdd_window, 1, alpha)?,
            ])
        })
        .collect::<Result<Vec<[f64; 4]>>>()?;
    let col = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<f64>>();
    let kappa = col(0);
    Ok(KappaCorrelations {
        vol: pearson(&kappa, &col(1)),
        es: pearson(&kappa, &col(2)),
        ced: pearson(&kappa, &col(3)),
        windows: rows.len(),
    })
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// AR(1) whose κ cycles through `kappas`, switching every `regime_len`
/// periods. Each regime's innovation sd is set so the stationary sd equals
/// `stationary_sd`, so only the serial correlation changes between regimes.
pub fn regime_switching_ar1(
    kappas: &[f64],
    regime_len: usize,
    stationary_sd: f64,
    length: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if kappas.is_empty() || regime_len == 0 {
        return Err(CedError::InvalidParameter("need kappas and a positive regime length".into()));
    }
    let params = kappas
        .iter()
        .map(|&k| {
            Ar1Params::new(k, 1.0)?;
            Ar1Params::new(k, stationary_sd * (1.0 - k * k).sqrt())
        })
        .collect::<Result<Vec<_>>>()?;
    let z = standard_normals(&mut stream_rng(seed, 0), length);
    let mut prev = 0.0;
    Ok(z.iter()
        .enumerate()
        .map(|(t, &e)| {
            let p = &params[(t / regime_len) % params.len()];
            prev = if t == 0 {
                e * stationary_sd
            } else {
                p.kappa * prev + p.sigma_eps * e
            };
            prev
        })
        .collect())
}

/// One simulated asset for scenario generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioAsset {
    pub params: Ar1Params,
    /// Constant added to every period return.
    pub drift: f64,
}

/// `scenarios` independent paths of `periods` returns; asset `a` of scenario
/// `i` uses stream `i * assets + a`.
pub fn simulate_scenarios(
    assets: &[ScenarioAsset],
    scenarios: usize,
    periods: usize,
    seed: u64,
) -> Result<ScenarioSet> {
    let m = assets.len();
    let nested = (0..scenarios)
        .map(|i| {
            let series: Vec<Vec<f64>> = assets
                .iter()
                .enumerate()
                .map(|(a, asset)| {
                    let z = standard_normals(&mut stream_rng(seed, (i * m + a) as u64), periods);
                    ar1_from_normals(&asset.params, &z, InitialCondition::Stationary)
                        .into_iter()
                        .map(|r| r + asset.drift)
                        .collect()
                })
                .collect();
            (0..periods)
                .map(|j| series.iter().map(|s| s[j]).collect())
                .collect()
        })
        .collect();
    ScenarioSet::new(nested)
}
