//! Minimum-CED portfolio construction over a scenario set.
//!
//! The sample problem "minimize the mean of the K largest scenario maximum
//! drawdowns" becomes a linear program: a tail-mean split `t + (1/K) sum z_i`
//! with `z_i + t >= u_{i,j}`, where `u_{i,j}` bounds the drawdown of scenario
//! `i` at period `j` through `u_{i,j} >= u_{i,j-1} - w'r_{i,j}`, `u_{i,0} = 0`.

pub mod simplex;

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;

use crate::drawdown::max_drawdown_recursive_of;
use crate::error::{CedError, Result};
use crate::riskmeasures::{tail_size, ConfidenceLevel, EmpiricalSample};
pub use simplex::{LinearProgram, LpSolution, LpStatus, RowKind, SimplexOptions};

/// Per-period returns `r[i][j][a]`: scenario `i`, period `j`, asset `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    data: Vec<f64>,
    scenarios: usize,
    periods: usize,
    assets: usize,
}

impl ScenarioSet {
    /// Builds from nested `[scenario][period][asset]` vectors.
    pub fn new(returns: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let scenarios = returns.len();
        let periods = returns.first().map_or(0, Vec::len);
        let assets = returns
            .first()
            .and_then(|s| s.first())
            .map_or(0, Vec::len);
        if scenarios == 0 || periods == 0 || assets == 0 {
            return Err(CedError::InvalidParameter(
                "scenario set must have at least one scenario, period and asset".into(),
            ));
        }
        let mut data = Vec::with_capacity(scenarios * periods * assets);
        for s in &returns {
            if s.len() != periods || s.iter().any(|p| p.len() != assets) {
                return Err(CedError::DimensionMismatch(
                    "scenario set is not rectangular".into(),
                ));
            }
            for p in s {
                data.extend_from_slice(p);
            }
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(CedError::NonFinite { index });
        }
        Ok(Self {
            data,
            scenarios,
            periods,
            assets,
        })
    }

    pub fn scenarios(&self) -> usize {
        self.scenarios
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn assets(&self) -> usize {
        self.assets
    }

    /// Asset returns of scenario `i` at period `j` (0-based).
    pub fn period(&self, i: usize, j: usize) -> &[f64] {
        let start = (i * self.periods + j) * self.assets;
        &self.data[start..start + self.assets]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    /// Mean per-period return of each asset over all scenarios and periods.
    pub fn mean_returns(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.assets];
        for chunk in self.data.chunks(self.assets) {
            for (m, v) in means.iter_mut().zip(chunk) {
                *m += v;
            }
        }
        let n = (self.scenarios * self.periods) as f64;
        means.iter_mut().for_each(|m| *m /= n);
        means
    }

    /// Maximum drawdown of the additive portfolio path in each scenario.
    pub fn portfolio_drawdowns(&self, weights: &[f64]) -> Vec<f64> {
        (0..self.scenarios)
            .map(|i| {
                max_drawdown_recursive_of((0..self.periods).map(|j| {
                    self.period(i, j)
                        .iter()
                        .zip(weights)
                        .map(|(r, w)| r * w)
                        .sum::<f64>()
                }))
            })
            .collect()
    }

    /// Reads `scenario_id,period,<asset>...` CSV text. Scenarios keep their
    /// order of first appearance; periods are sorted numerically.
    pub fn parse_csv(text: &str) -> Result<(Self, Vec<String>)> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader.headers()?.clone();
        if header.len() < 3 || header.get(0) != Some("scenario_id") || header.get(1) != Some("period")
        {
            return Err(CedError::Parse {
                row: 1,
                message: "header must be `scenario_id,period` followed by asset columns".into(),
            });
        }
        let names: Vec<String> = header.iter().skip(2).map(str::to_owned).collect();
        let mut order: Vec<String> = Vec::new();
        let mut rows: HashMap<String, Vec<(i64, Vec<f64>)>> = HashMap::new();
        for (i, record) in reader.records().enumerate() {
            let row = i + 2;
            let record = record?;
            let bad = |message: String| CedError::Parse { row, message };
            if record.len() != names.len() + 2 {
                return Err(bad(format!("expected {} fields", names.len() + 2)));
            }
            let id = record[0].to_string();
            let period: i64 = record[1]
                .parse()
                .map_err(|_| bad(format!("bad period `{}`", &record[1])))?;
            let values = (2..record.len())
                .map(|c| {
                    record[c]
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| bad(format!("bad number `{}`", &record[c])))
                })
                .collect::<Result<Vec<_>>>()?;
            if !rows.contains_key(&id) {
                order.push(id.clone());
            }
            rows.entry(id).or_default().push((period, values));
        }
        let nested = order
            .iter()
            .map(|id| {
                let mut s = rows.remove(id).unwrap_or_default();
                s.sort_by_key(|(p, _)| *p);
                s.into_iter().map(|(_, v)| v).collect()
            })
            .collect();
        Ok((Self::new(nested)?, names))
    }

    pub fn write_csv<W: Write>(&self, out: W, names: &[String]) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["scenario_id".to_string(), "period".to_string()];
        header.extend(names.iter().cloned());
        w.write_record(&header)?;
        for i in 0..self.scenarios {
            for j in 0..self.periods {
                let mut rec = vec![i.to_string(), (j + 1).to_string()];
                rec.extend(self.period(i, j).iter().map(f64::to_string));
                w.write_record(&rec)?;
            }
        }
        w.flush().map_err(|e| CedError::io("<csv>", e))?;
        Ok(())
    }
}

/// Sample CED of the portfolio `weights` over the scenario set: mean of the
/// `K = floor(T'(1 - alpha))` largest additive-path maximum drawdowns.
pub fn scenario_ced(scenarios: &ScenarioSet, weights: &[f64], alpha: ConfidenceLevel) -> Result<f64> {
    EmpiricalSample::new(scenarios.portfolio_drawdowns(weights))?.tail_mean(alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraints {
    /// `sum w = 1`
    pub budget: bool,
    /// `w >= 0`
    pub long_only: bool,
    /// Minimum mean per-period portfolio return.
    pub min_return: Option<f64>,
}

impl Default for Constraints {
    fn default() -> Self {
        Self {
            budget: true,
            long_only: true,
            min_return: None,
        }
    }
}

/// Column offsets of the variable blocks `w | t | z | u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableLayout {
    pub assets: usize,
    pub scenarios: usize,
    pub periods: usize,
}

impl VariableLayout {
    pub fn w(&self, a: usize) -> usize {
        a
    }

    pub fn t(&self) -> usize {
        self.assets
    }

    pub fn z(&self, i: usize) -> usize {
        self.assets + 1 + i
    }

    /// `u_{i,j}` for period `j` in `1..=periods`; `u_{i,0}` is the constant 0.
    pub fn u(&self, i: usize, j: usize) -> usize {
        debug_assert!(j >= 1 && j <= self.periods);
        self.assets + 1 + self.scenarios + i * self.periods + (j - 1)
    }

    pub fn n_vars(&self) -> usize {
        self.assets + 1 + self.scenarios + self.scenarios * self.periods
    }
}

/// The CED minimization LP together with its variable layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CedProgram {
    pub lp: LinearProgram,
    pub layout: VariableLayout,
    /// Tail size `K`.
    pub tail: usize,
    /// Number of `z + t >= u` and `u`-recursion rows (`2 T' N`).
    pub drawdown_rows: usize,
}

pub fn build_ced_lp(
    scenarios: &ScenarioSet,
    alpha: ConfidenceLevel,
    constraints: &Constraints,
) -> Result<CedProgram> {
    let k = tail_size(scenarios.scenarios(), alpha)?;
    let layout = VariableLayout {
        assets: scenarios.assets(),
        scenarios: scenarios.scenarios(),
        periods: scenarios.periods(),
    };
    let mut lp = LinearProgram::new(layout.n_vars());
    lp.objective[layout.t()] = 1.0;
    lp.set_free(layout.t());
    for i in 0..layout.scenarios {
        lp.objective[layout.z(i)] = 1.0 / k as f64;
    }
    if !constraints.long_only {
        for a in 0..layout.assets {
            lp.set_free(layout.w(a));
        }
    }

    let rows: Vec<[Vec<(usize, f64)>; 2]> = (0..layout.scenarios)
        .into_par_iter()
        .flat_map_iter(|i| {
            (1..=layout.periods).map(move |j| {
                let cover = vec![(layout.z(i), 1.0), (layout.t(), 1.0), (layout.u(i, j), -1.0)];
                let mut recursion = vec![(layout.u(i, j), 1.0)];
                if j > 1 {
                    recursion.push((layout.u(i, j - 1), -1.0));
                }
                for (a, &r) in scenarios.period(i, j - 1).iter().enumerate() {
                    if r != 0.0 {
                        recursion.push((layout.w(a), r));
                    }
                }
                [cover, recursion]
            })
        })
        .collect();
    for [cover, recursion] in rows {
        lp.add_row(cover, RowKind::Ge, 0.0);
        lp.add_row(recursion, RowKind::Ge, 0.0);
    }
    let drawdown_rows = lp.rows.len();

    if constraints.budget {
        lp.add_row(
            (0..layout.assets).map(|a| (layout.w(a), 1.0)).collect(),
            RowKind::Eq,
            1.0,
        );
    }
    if let Some(target) = constraints.min_return {
        lp.add_row(
            scenarios
                .mean_returns()
                .into_iter()
                .enumerate()
                .map(|(a, m)| (layout.w(a), m))
                .collect(),
            RowKind::Ge,
            target,
        );
    }
    Ok(CedProgram {
        lp,
        layout,
        tail: k,
        drawdown_rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub weights: Vec<f64>,
    /// Minimized sample CED; NaN unless the status is optimal.
    pub objective: f64,
    pub status: LpStatus,
    pub iterations: usize,
    pub t: f64,
    pub z: Vec<f64>,
}

pub fn solve_lp(program: &CedProgram, opts: &SimplexOptions) -> OptResult {
    let sol = simplex::solve(&program.lp, opts);
    let layout = program.layout;
    let optimal = sol.status == LpStatus::Optimal;
    OptResult {
        weights: (0..layout.assets).map(|a| sol.x[layout.w(a)]).collect(),
        objective: if optimal { sol.objective } else { f64::NAN },
        status: sol.status,
        iterations: sol.iterations,
        t: sol.x[layout.t()],
        z: (0..layout.scenarios).map(|i| sol.x[layout.z(i)]).collect(),
    }
}

pub fn minimize_ced(
    scenarios: &ScenarioSet,
    alpha: ConfidenceLevel,
    constraints: &Constraints,
) -> Result<OptResult> {
    let program = build_ced_lp(scenarios, alpha, constraints)?;
    Ok(solve_lp(&program, &SimplexOptions::default()))
}

/// One LP per return target; infeasible targets report their status and do
/// not stop the remaining points.
pub fn efficient_frontier(
    scenarios: &ScenarioSet,
    alpha: ConfidenceLevel,
    constraints: &Constraints,
    targets: &[f64],
) -> Result<Vec<OptResult>> {
    tail_size(scenarios.scenarios(), alpha)?;
    targets
        .par_iter()
        .map(|&target| {
            minimize_ced(
                scenarios,
                alpha,
                &Constraints {
                    min_return: Some(target),
                    ..*constraints
                },
            )
        })
        .collect()
}

/// Every long-only budget-feasible weight vector with entries in multiples of
/// `1 / steps`, in lexicographic order of the leading weights.
pub fn simplex_grid(assets: usize, steps: usize) -> Vec<Vec<f64>> {
    fn fill(rest: usize, slots: usize, steps: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if slots == 1 {
            prefix.push(rest);
            out.push(prefix.iter().map(|&k| k as f64 / steps as f64).collect());
            prefix.pop();
            return;
        }
        for k in 0..=rest {
            prefix.push(k);
            fill(rest - k, slots - 1, steps, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if assets > 0 && steps > 0 {
        fill(steps, assets, steps, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridOptimum {
    pub weights: Vec<f64>,
    pub objective: f64,
    pub evaluations: usize,
}

/// Exhaustive minimization of the scenario CED over `grid`; the first
/// minimizer in grid order wins.
pub fn brute_force_ced(
    scenarios: &ScenarioSet,
    alpha: ConfidenceLevel,
    grid: &[Vec<f64>],
) -> Result<GridOptimum> {
    tail_size(scenarios.scenarios(), alpha)?;
    let values = grid
        .par_iter()
        .map(|w| scenario_ced(scenarios, w, alpha))
        .collect::<Result<Vec<f64>>>()?;
    let (best, &objective) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .ok_or_else(|| CedError::InvalidParameter("empty weight grid".into()))?;
    Ok(GridOptimum {
        weights: grid[best].clone(),
        objective,
        evaluations: grid.len(),
    })
}
