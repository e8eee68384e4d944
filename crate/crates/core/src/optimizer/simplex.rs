//! Two-phase primal simplex on a dense tableau.
//!
//! General bounds and free variables are mapped onto a non-negative standard
//! form first. Pricing is Dantzig's rule; after a run of degenerate pivots
//! the solver switches to Bland's rule until the objective moves again, which
//! rules out cycling. Row updates only touch the non-zeros of the pivot row,
//! so the sparse CED programs stay cheap.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// `a'x <= b`
    Le,
    /// `a'x >= b`
    Ge,
    /// `a'x = b`
    Eq,
}

/// One sparse linear constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub kind: RowKind,
    pub rhs: f64,
}

/// `min c'x` subject to sparse rows and per-variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// `n_vars` variables, zero objective, every variable `>= 0`.
    pub fn new(n_vars: usize) -> Self {
        Self {
            objective: vec![0.0; n_vars],
            rows: Vec::new(),
            lower: vec![0.0; n_vars],
            upper: vec![f64::INFINITY; n_vars],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, kind: RowKind, rhs: f64) {
        self.rows.push(Row { coeffs, kind, rhs });
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn set_free(&mut self, var: usize) {
        self.set_bounds(var, f64::NEG_INFINITY, f64::INFINITY);
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let v = match row.kind {
                RowKind::Le => lhs - row.rhs,
                RowKind::Ge => row.rhs - lhs,
                RowKind::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (j, &xj) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - xj).max(xj - self.upper[j]);
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    /// The final basis violates the original constraints beyond tolerance.
    NumericalFailure,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
            LpStatus::IterationLimit => "iteration_limit",
            LpStatus::NumericalFailure => "numerical_failure",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point in the caller's variables; meaningful when optimal.
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Reduced-cost threshold for optimality.
    pub optimality_tol: f64,
    /// Smallest acceptable pivot element.
    pub pivot_tol: f64,
    /// Allowed violation of the original constraints at the reported point.
    pub feasibility_tol: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_limit: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            optimality_tol: 1e-10,
            pivot_tol: 1e-10,
            feasibility_tol: 1e-8,
            degenerate_limit: 50,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = offset + y`
    Shift { col: usize, offset: f64 },
    /// `x = offset - y`
    Mirror { col: usize, offset: f64 },
    /// `x = y_pos - y_neg`
    Split { pos: usize, neg: usize },
}

type SparseRow = (Vec<(usize, f64)>, RowKind, f64);

/// Entries this small after an update are treated as exact zeros.
const DROP_TOL: f64 = 1e-13;

/// Relative size of the right-hand-side perturbation.
const PERTURBATION: f64 = 1e-7;

struct Tableau {
    rows: usize,
    /// Columns including the two trailing right-hand sides: the perturbed
    /// one that drives pivoting, then the original one.
    width: usize,
    data: Vec<f64>,
    /// Reduced costs; the two right-hand-side entries hold minus the
    /// objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Columns that may not enter the basis.
    barred: Vec<bool>,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.width - 2
    }

    fn orig_col(&self) -> usize {
        self.width - 1
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.width..(r + 1) * self.width]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let inv = 1.0 / self.at(pr, pc);
        let mut nz: Vec<(usize, f64)> = Vec::new();
        for k in 0..w {
            let v = &mut self.data[pr * w + k];
            if *v != 0.0 {
                *v *= inv;
                if v.abs() < DROP_TOL {
                    *v = 0.0;
                } else {
                    nz.push((k, *v));
                }
            }
        }
        self.data[pr * w + pc] = 1.0;

        let eliminate = |row: &mut [f64]| {
            let f = row[pc];
            if f != 0.0 {
                for &(k, v) in &nz {
                    let e = &mut row[k];
                    *e -= f * v;
                    if e.abs() < DROP_TOL {
                        *e = 0.0;
                    }
                }
                row[pc] = 0.0;
            }
        };
        for r in 0..self.rows {
            if r != pr {
                eliminate(&mut self.data[r * w..(r + 1) * w]);
            }
        }
        eliminate(&mut self.cost);

        let old = self.basis[pr];
        self.is_basic[old] = false;
        self.is_basic[pc] = true;
        self.basis[pr] = pc;
    }

    /// Runs simplex iterations on the current cost row.
    ///
    /// With `bounded` set the objective cannot fall without limit, so an
    /// entering column without a pivot only carries rounding noise; it is
    /// barred for the rest of the run instead of reporting unboundedness.
    fn optimize(&mut self, opts: &SimplexOptions, iterations: &mut usize, bounded: bool) -> LpStatus {
        let rhs = self.rhs_col();
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            let entering = if bland {
                (0..rhs).find(|&j| {
                    !self.is_basic[j] && !self.barred[j] && self.cost[j] < -opts.optimality_tol
                })
            } else {
                let mut best: Option<(usize, f64)> = None;
                for j in 0..rhs {
                    let d = self.cost[j];
                    if d < -opts.optimality_tol
                        && !self.is_basic[j]
                        && !self.barred[j]
                        && best.is_none_or(|(_, b)| d < b)
                    {
                        best = Some((j, d));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(q) = entering else {
                return LpStatus::Optimal;
            };
            if *iterations >= opts.max_iterations {
                return LpStatus::IterationLimit;
            }

            let leave = if bland {
                self.bland_ratio(q, opts)
            } else {
                self.harris_ratio(q, opts)
            };
            let Some((pr, ratio)) = leave else {
                if bounded {
                    self.barred[q] = true;
                    continue;
                }
                return LpStatus::Unbounded;
            };

            self.pivot(pr, q);
            *iterations += 1;
            if ratio <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run >= opts.degenerate_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

    /// Minimum ratio, ties to the smallest basic column.
    fn bland_ratio(&self, q: usize, opts: &SimplexOptions) -> Option<(usize, f64)> {
        let rhs = self.rhs_col();
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows {
            let a = self.at(r, q);
            if a <= opts.pivot_tol {
                continue;
            }
            let ratio = self.at(r, rhs).max(0.0) / a;
            let better = match best {
                None => true,
                Some((br, bratio)) => {
                    if (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs()) {
                        self.basis[r] < self.basis[br]
                    } else {
                        ratio < bratio
                    }
                }
            };
            if better {
                best = Some((r, ratio));
            }
        }
        best
    }

    /// Harris two-pass test: bound the step with slightly relaxed rows, then
    /// take the largest pivot among rows whose ratio fits under that bound.
    fn harris_ratio(&self, q: usize, opts: &SimplexOptions) -> Option<(usize, f64)> {
        let rhs = self.rhs_col();
        let relax = opts.feasibility_tol * 0.1;
        let mut bound = f64::INFINITY;
        for r in 0..self.rows {
            let a = self.at(r, q);
            if a > opts.pivot_tol {
                bound = bound.min((self.at(r, rhs).max(0.0) + relax) / a);
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let mut best: Option<(usize, f64, f64)> = None;
        for r in 0..self.rows {
            let a = self.at(r, q);
            if a <= opts.pivot_tol {
                continue;
            }
            let ratio = self.at(r, rhs).max(0.0) / a;
            if ratio <= bound && best.is_none_or(|(_, _, ba)| a > ba) {
                best = Some((r, ratio, a));
            }
        }
        best.map(|(r, ratio, _)| (r, ratio))
    }

    /// Dual simplex on the original right-hand side. The perturbed optimum
    /// can leave some original basic values slightly negative; this restores
    /// primal feasibility while keeping the reduced costs non-negative.
    fn remove_perturbation(&mut self, opts: &SimplexOptions, iterations: &mut usize) -> LpStatus {
        let orig = self.orig_col();
        let rhs = self.rhs_col();
        loop {
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let v = self.at(r, orig);
                if v < -DROP_TOL && leave.is_none_or(|(_, b)| v < b) {
                    leave = Some((r, v));
                }
            }
            let Some((pr, _)) = leave else {
                return LpStatus::Optimal;
            };
            if *iterations >= opts.max_iterations {
                return LpStatus::IterationLimit;
            }
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..rhs {
                let a = self.at(pr, j);
                if self.is_basic[j] || self.barred[j] || a >= -opts.pivot_tol {
                    continue;
                }
                let ratio = self.cost[j].max(0.0) / -a;
                if enter.is_none_or(|(_, b)| ratio < b) {
                    enter = Some((j, ratio));
                }
            }
            let Some((q, _)) = enter else {
                return LpStatus::Infeasible;
            };
            self.pivot(pr, q);
            *iterations += 1;
        }
    }

    fn set_cost(&mut self, costs: &[f64]) {
        let w = self.width;
        self.cost = costs.to_vec();
        self.cost.extend([0.0, 0.0]);
        for r in 0..self.rows {
            let cb = costs[self.basis[r]];
            if cb != 0.0 {
                let row = &self.data[r * w..(r + 1) * w];
                for (c, &v) in self.cost.iter_mut().zip(row) {
                    *c -= cb * v;
                }
            }
        }
        for r in 0..self.rows {
            self.cost[self.basis[r]] = 0.0;
        }
    }
}

/// Solves `lp`. Deterministic for a given input.
pub fn solve(lp: &LinearProgram, opts: &SimplexOptions) -> LpSolution {
    let n = lp.n_vars();
    let fail = |status, iterations| LpSolution {
        status,
        x: vec![0.0; n],
        objective: f64::NAN,
        iterations,
    };

    // Variable mapping onto y >= 0.
    let mut maps = Vec::with_capacity(n);
    let mut n_struct = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (l, u) = (lp.lower[j], lp.upper[j]);
        if l > u {
            return fail(LpStatus::Infeasible, 0);
        }
        let map = if l.is_finite() {
            if u.is_finite() {
                bound_rows.push((n_struct, u - l));
            }
            VarMap::Shift {
                col: n_struct,
                offset: l,
            }
        } else if u.is_finite() {
            VarMap::Mirror {
                col: n_struct,
                offset: u,
            }
        } else {
            n_struct += 1;
            VarMap::Split {
                pos: n_struct - 1,
                neg: n_struct,
            }
        };
        n_struct += 1;
        maps.push(map);
    }

    // Rows in y-space: (sparse coeffs, kind, rhs).
    let mut rows: Vec<SparseRow> = Vec::new();
    for row in &lp.rows {
        let mut coeffs = Vec::with_capacity(row.coeffs.len());
        let mut rhs = row.rhs;
        for &(j, a) in &row.coeffs {
            match maps[j] {
                VarMap::Shift { col, offset } => {
                    coeffs.push((col, a));
                    rhs -= a * offset;
                }
                VarMap::Mirror { col, offset } => {
                    coeffs.push((col, -a));
                    rhs -= a * offset;
                }
                VarMap::Split { pos, neg } => {
                    coeffs.push((pos, a));
                    coeffs.push((neg, -a));
                }
            }
        }
        rows.push((coeffs, row.kind, rhs));
    }
    for &(col, span) in &bound_rows {
        rows.push((vec![(col, 1.0)], RowKind::Le, span));
    }
    let mut costs = vec![0.0; n_struct];
    let mut cost_offset = 0.0;
    for (j, &c) in lp.objective.iter().enumerate() {
        match maps[j] {
            VarMap::Shift { col, offset } => {
                costs[col] += c;
                cost_offset += c * offset;
            }
            VarMap::Mirror { col, offset } => {
                costs[col] -= c;
                cost_offset += c * offset;
            }
            VarMap::Split { pos, neg } => {
                costs[pos] += c;
                costs[neg] -= c;
            }
        }
    }

    // Normalize to rhs >= 0 and decide slack / artificial columns.
    let m = rows.len();
    let mut n_slack = 0;
    let mut n_art = 0;
    let mut plan = Vec::with_capacity(m);
    for (coeffs, kind, rhs) in &mut rows {
        if *rhs < 0.0 || (*rhs == 0.0 && *kind == RowKind::Ge) {
            *rhs = -*rhs;
            for c in coeffs.iter_mut() {
                c.1 = -c.1;
            }
            *kind = match *kind {
                RowKind::Le => RowKind::Ge,
                RowKind::Ge => RowKind::Le,
                RowKind::Eq => RowKind::Eq,
            };
        }
        // (has slack, slack sign, needs artificial)
        let p = match kind {
            RowKind::Le => (true, 1.0, false),
            RowKind::Ge => (true, -1.0, true),
            RowKind::Eq => (false, 0.0, true),
        };
        n_slack += p.0 as usize;
        n_art += p.2 as usize;
        plan.push(p);
    }

    let n_cols = n_struct + n_slack + n_art;
    let width = n_cols + 2;
    let mut t = Tableau {
        rows: m,
        width,
        data: vec![0.0; m * width],
        cost: Vec::new(),
        basis: vec![0; m],
        is_basic: vec![false; n_cols],
        barred: vec![false; n_cols],
    };
    let art_start = n_struct + n_slack;
    let mut next_slack = n_struct;
    let mut next_art = art_start;
    for (r, ((coeffs, _, rhs), &(has_slack, sign, needs_art))) in rows.iter().zip(&plan).enumerate() {
        let base = r * width;
        for &(c, a) in coeffs {
            t.data[base + c] += a;
        }
        // Distinct positive shifts make every basic solution non-degenerate.
        let spread = 1.0 + ((r as f64 * 0.618_033_988_749_895) % 1.0);
        t.data[base + n_cols] = *rhs + PERTURBATION * spread * (1.0 + rhs.abs());
        t.data[base + n_cols + 1] = *rhs;
        if has_slack {
            t.data[base + next_slack] = sign;
            if !needs_art {
                t.basis[r] = next_slack;
            }
            next_slack += 1;
        }
        if needs_art {
            t.data[base + next_art] = 1.0;
            t.basis[r] = next_art;
            next_art += 1;
        }
    }
    for r in 0..m {
        t.is_basic[t.basis[r]] = true;
    }

    let mut iterations = 0;
    if n_art > 0 {
        let mut phase1 = vec![0.0; n_cols];
        for c in phase1.iter_mut().skip(art_start) {
            *c = 1.0;
        }
        t.set_cost(&phase1);
        match t.optimize(opts, &mut iterations, true) {
            LpStatus::Optimal => {}
            other => return fail(other, iterations),
        }
        t.barred.iter_mut().for_each(|b| *b = false);
        let scale = 1.0 + rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
        if -t.cost[t.orig_col()] > opts.feasibility_tol * scale {
            return fail(LpStatus::Infeasible, iterations);
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if t.basis[r] >= art_start {
                if let Some(c) = (0..art_start).find(|&c| !t.is_basic[c] && t.at(r, c).abs() > 1e-9) {
                    t.pivot(r, c);
                    iterations += 1;
                }
            }
        }
        for c in art_start..n_cols {
            t.barred[c] = true;
        }
    }

    let mut phase2 = costs.clone();
    phase2.resize(n_cols, 0.0);
    t.set_cost(&phase2);
    match t.optimize(opts, &mut iterations, false) {
        LpStatus::Optimal => {}
        other => return fail(other, iterations),
    }
    match t.remove_perturbation(opts, &mut iterations) {
        LpStatus::Optimal => {}
        other => return fail(other, iterations),
    }

    let mut y = vec![0.0; n_cols];
    for r in 0..m {
        y[t.basis[r]] = t.row(r)[t.orig_col()].max(0.0);
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shift { col, offset } => offset + y[col],
            VarMap::Mirror { col, offset } => offset - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective = costs.iter().zip(&y).map(|(c, v)| c * v).sum::<f64>() + cost_offset;
    let status = if lp.max_violation(&x) <= opts.feasibility_tol {
        LpStatus::Optimal
    } else {
        LpStatus::NumericalFailure
    };
    LpSolution {
        status,
        x,
        objective,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SimplexOptions {
        SimplexOptions::default()
    }

    #[test]
    fn single_free_variable() {
        let mut lp = LinearProgram::new(1);
        lp.objective[0] = 1.0;
        lp.set_free(0);
        lp.add_row(vec![(0, 1.0)], RowKind::Ge, 3.0);
        let s = solve(&lp, &opts());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 3.0).abs() < 1e-12);
        assert!((s.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_pair() {
        let mut lp = LinearProgram::new(1);
        lp.set_free(0);
        lp.add_row(vec![(0, 1.0)], RowKind::Ge, 1.0);
        lp.add_row(vec![(0, 1.0)], RowKind::Le, 0.0);
        assert_eq!(solve(&lp, &opts()).status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new(1);
        lp.set_bounds(0, 1.0, 0.0);
        assert_eq!(solve(&lp, &opts()).status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![-1.0, 0.0];
        lp.add_row(vec![(0, 1.0), (1, -1.0)], RowKind::Le, 1.0);
        assert_eq!(solve(&lp, &opts()).status, LpStatus::Unbounded);
    }

    #[test]
    fn three_variable_vertex() {
        // max 3x + 2y + 4z  s.t.  x + y + 2z <= 4,  2x + z <= 5,  x + 3y + z <= 7,
        // checked against enumeration of every vertex of the polytope.
        let a = [[1.0, 1.0, 2.0], [2.0, 0.0, 1.0], [1.0, 3.0, 1.0]];
        let b = [4.0, 5.0, 7.0];
        let c = [3.0, 2.0, 4.0];
        let best = brute_force_vertices(&a, &b, &c);

        let mut lp = LinearProgram::new(3);
        lp.objective = c.iter().map(|v| -v).collect();
        for (row, &rhs) in a.iter().zip(&b) {
            lp.add_row(row.iter().copied().enumerate().collect(), RowKind::Le, rhs);
        }
        let s = solve(&lp, &opts());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((-s.objective - best).abs() < 1e-10);
    }

    // Enumerates every basis of {A x <= b, x >= 0} for 3 variables.
    fn brute_force_vertices(a: &[[f64; 3]; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
        let mut planes: Vec<([f64; 3], f64)> = a.iter().zip(b).map(|(r, &v)| (*r, v)).collect();
        for i in 0..3 {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            planes.push((e, 0.0));
        }
        let det3 = |m: [[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let mut best = f64::NEG_INFINITY;
        for i in 0..planes.len() {
            for j in i + 1..planes.len() {
                for k in j + 1..planes.len() {
                    let m = [planes[i].0, planes[j].0, planes[k].0];
                    let rhs = [planes[i].1, planes[j].1, planes[k].1];
                    let d = det3(m);
                    if d.abs() < 1e-12 {
                        continue;
                    }
                    let mut x = [0.0; 3];
                    for col in 0..3 {
                        let mut mc = m;
                        for row in 0..3 {
                            mc[row][col] = rhs[row];
                        }
                        x[col] = det3(mc) / d;
                    }
                    let feasible = x.iter().all(|&v| v >= -1e-12)
                        && a.iter().zip(b).all(|(r, &v)| {
                            r[0] * x[0] + r[1] * x[1] + r[2] * x[2] <= v + 1e-12
                        });
                    if feasible {
                        best = best.max(c[0] * x[0] + c[1] * x[1] + c[2] * x[2]);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn equality_and_bounds() {
        // min x - y  s.t.  x + y = 2, 0.5 <= x <= 1.5, y <= 1.2
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, -1.0];
        lp.set_bounds(0, 0.5, 1.5);
        lp.set_bounds(1, f64::NEG_INFINITY, 1.2);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], RowKind::Eq, 2.0);
        let s = solve(&lp, &opts());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 0.8).abs() < 1e-12);
        assert!((s.x[1] - 1.2).abs() < 1e-12);
        assert!((s.objective + 0.4).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 2.0];
        lp.add_row(vec![(0, 1.0), (1, 1.0)], RowKind::Eq, 1.0);
        lp.add_row(vec![(0, 2.0), (1, 2.0)], RowKind::Eq, 2.0);
        let s = solve(&lp, &opts());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn iteration_limit_reported() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![-1.0, -1.0];
        lp.add_row(vec![(0, 1.0)], RowKind::Le, 1.0);
        lp.add_row(vec![(1, 1.0)], RowKind::Le, 1.0);
        let s = solve(
            &lp,
            &SimplexOptions {
                max_iterations: 1,
                ..opts()
            },
        );
        assert_eq!(s.status, LpStatus::IterationLimit);
    }
}
