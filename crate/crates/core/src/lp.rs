//! Dense simplex solver for small and moderate linear programs.
//!
//! Problems are `min c'x` subject to rows `a_i'x (<=|=|>=) b_i` and
//! `x >= lower`. Internally every inequality gets a slack and the solver works
//! on a dense tableau:
//!
//! * when the slack basis is dual feasible (`c >= 0`, no equality rows) the
//!   dual simplex runs straight from it, which is the shape of every Dantzig
//!   selector program;
//! * otherwise a two-phase primal simplex with artificial variables is used.
//!
//! Pricing is Dantzig's largest-coefficient rule; after a run of degenerate
//! pivots the solver switches to Bland's smallest-index rule for the rest of
//! the phase, which guarantees termination. At the end the basis is
//! refactored with a dense LU, the primal point and duals are recomputed
//! from the original data and checked; if the check fails the tableau is
//! rebuilt from the factorization and the simplex resumes.

use std::fmt::Write as _;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Lu;

const PIVOT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;
const MAX_REFINEMENTS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

/// `min c'x  s.t.  A x (senses) b,  x >= lower`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    objective: Vec<f64>,
    constraints: Array2<f64>,
    rhs: Vec<f64>,
    senses: Vec<Sense>,
    lower: Vec<f64>,
}

impl LpProblem {
    pub fn new(
        objective: Vec<f64>,
        constraints: Array2<f64>,
        rhs: Vec<f64>,
        senses: Vec<Sense>,
    ) -> Result<Self> {
        let n = objective.len();
        if n == 0 {
            return Err(Error::InvalidInput("LP needs at least one variable".into()));
        }
        if constraints.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "LP constraint columns",
                expected: n,
                found: constraints.ncols(),
            });
        }
        if rhs.len() != constraints.nrows() || senses.len() != constraints.nrows() {
            return Err(Error::DimensionMismatch {
                context: "LP rows (rhs / senses)",
                expected: constraints.nrows(),
                found: if rhs.len() != constraints.nrows() { rhs.len() } else { senses.len() },
            });
        }
        let finite = objective.iter().chain(&rhs).chain(constraints.iter()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput("LP data must be finite".into()));
        }
        Ok(Self {
            lower: vec![0.0; n],
            objective,
            constraints,
            rhs,
            senses,
        })
    }

    pub fn with_lower_bounds(mut self, lower: Vec<f64>) -> Result<Self> {
        crate::error::check_len("LP lower bounds", self.num_vars(), lower.len())?;
        if lower.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("LP lower bounds must be finite".into()));
        }
        self.lower = lower;
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &Array2<f64> {
        &self.constraints
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn senses(&self) -> &[Sense] {
        &self.senses
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    /// Largest violation of the rows and lower bounds at `x`.
    pub fn primal_residual(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.constraints.rows().into_iter().enumerate() {
            let ax: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            let b = self.rhs[i];
            let viol = match self.senses[i] {
                Sense::Le => (ax - b).max(0.0),
                Sense::Ge => (b - ax).max(0.0),
                Sense::Eq => (ax - b).abs(),
            };
            worst = worst.max(viol);
        }
        for (v, l) in x.iter().zip(&self.lower) {
            worst = worst.max(l - v);
        }
        worst
    }

    /// Text dump: an `objective` line, a `lower` line, then one `row` line per
    /// constraint (`row <sense> <rhs> : <coefficients>`).
    pub fn to_text(&self) -> String {
        let mut out = format!("lp {} {}\n", self.num_rows(), self.num_vars());
        let join = |v: &mut dyn Iterator<Item = f64>| {
            v.map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
        };
        let _ = writeln!(out, "objective {}", join(&mut self.objective.iter().copied()));
        let _ = writeln!(out, "lower {}", join(&mut self.lower.iter().copied()));
        for (i, row) in self.constraints.rows().into_iter().enumerate() {
            let _ = writeln!(
                out,
                "row {} {:?} : {}",
                self.senses[i].symbol(),
                self.rhs[i],
                join(&mut row.iter().copied())
            );
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidInput(format!("LP text: {msg}"));
        let parse_nums = |s: &str| -> Result<Vec<f64>> {
            s.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| bad(&format!("bad number {t:?}"))))
                .collect()
        };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty"))?.split_whitespace().collect();
        if header.len() != 3 || header[0] != "lp" {
            return Err(bad("missing header"));
        }
        let m: usize = header[1].parse().map_err(|_| bad("row count"))?;
        let n: usize = header[2].parse().map_err(|_| bad("column count"))?;
        let objective = parse_nums(
            lines.next().and_then(|l| l.strip_prefix("objective")).ok_or_else(|| bad("objective"))?,
        )?;
        let lower = parse_nums(lines.next().and_then(|l| l.strip_prefix("lower")).ok_or_else(|| bad("lower"))?)?;
        let mut a = Array2::zeros((m, n));
        let mut rhs = Vec::with_capacity(m);
        let mut senses = Vec::with_capacity(m);
        for i in 0..m {
            let line = lines.next().and_then(|l| l.strip_prefix("row")).ok_or_else(|| bad("row"))?;
            let (head, coeffs) = line.split_once(':').ok_or_else(|| bad("row separator"))?;
            let mut head = head.split_whitespace();
            senses.push(match head.next() {
                Some("<=") => Sense::Le,
                Some(">=") => Sense::Ge,
                Some("=") => Sense::Eq,
                _ => return Err(bad("sense")),
            });
            rhs.push(head.next().ok_or_else(|| bad("rhs"))?.parse().map_err(|_| bad("rhs"))?);
            let coeffs = parse_nums(coeffs)?;
            if coeffs.len() != n {
                return Err(bad("row length"));
            }
            for (j, c) in coeffs.into_iter().enumerate() {
                a[[i, j]] = c;
            }
        }
        Self::new(objective, a, rhs, senses)?.with_lower_bounds(lower)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; empty unless `status` is `Optimal`.
    pub x: Vec<f64>,
    pub objective_value: f64,
    /// Row duals of the original constraints (sign convention of `min`:
    /// `<=` rows have `y <= 0`, `>=` rows `y >= 0`).
    pub duals: Vec<f64>,
    pub primal_residual: f64,
    /// Largest negative reduced cost (0 when dual feasible).
    pub dual_residual: f64,
    pub duality_gap: f64,
    pub iterations: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, iterations: usize) -> Self {
        Self {
            status,
            x: Vec::new(),
            objective_value: f64::NAN,
            duals: Vec::new(),
            primal_residual: f64::NAN,
            dual_residual: f64::NAN,
            duality_gap: f64::NAN,
            iterations,
        }
    }
}

/// Problem in equality form `A x = b, x >= 0` (slacks and artificials included).
struct Standard {
    a: Array2<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    /// +1 or -1: multiplier applied to the original row.
    row_sign: Vec<f64>,
    n_struct: usize,
    artificial: Vec<bool>,
}

struct Tableau {
    m: usize,
    width: usize,
    /// `m` rows of `ncols + 1` entries; the last entry is the rhs.
    rows: Vec<f64>,
    /// Reduced costs; the last entry is minus the objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    barred: Vec<bool>,
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.width - 1
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.rows[i * self.width + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i * self.width + self.width - 1]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let piv = self.rows[r * w + q];
        {
            let row = &mut self.rows[r * w..(r + 1) * w];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[q] = 1.0;
        }
        let (before, rest) = self.rows.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        let eliminate = |row: &mut [f64]| {
            let f = row[q];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[q] = 0.0;
            }
        };
        before.chunks_exact_mut(w).for_each(eliminate);
        after.chunks_exact_mut(w).for_each(eliminate);
        eliminate(&mut self.obj);
        let leaving = self.basis[r];
        self.in_basis[leaving] = false;
        self.in_basis[q] = true;
        self.basis[r] = q;
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
    Infeasible,
    IterationLimit,
}

struct Counter {
    used: usize,
    limit: usize,
}

fn primal_simplex(t: &mut Tableau, it: &mut Counter) -> PhaseEnd {
    let mut bland = false;
    let mut degenerate = 0;
    loop {
        let entering = if bland {
            (0..t.ncols()).find(|&j| !t.in_basis[j] && !t.barred[j] && t.obj[j] < -OPT_TOL)
        } else {
            (0..t.ncols())
                .filter(|&j| !t.in_basis[j] && !t.barred[j] && t.obj[j] < -OPT_TOL)
                .min_by(|&a, &b| t.obj[a].total_cmp(&t.obj[b]))
        };
        let Some(q) = entering else {
            return PhaseEnd::Optimal;
        };
        if it.used >= it.limit {
            return PhaseEnd::IterationLimit;
        }
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..t.m {
            let a = t.at(i, q);
            if a > PIVOT_TOL {
                let ratio = t.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        let better = if tie {
                            if bland {
                                t.basis[i] < t.basis[r]
                            } else {
                                a > t.at(r, q)
                            }
                        } else {
                            ratio < best
                        };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        let Some((r, ratio)) = leave else {
            return PhaseEnd::Unbounded;
        };
        if ratio <= FEAS_TOL {
            degenerate += 1;
            if degenerate > DEGENERATE_RUN {
                bland = true;
            }
        } else {
            degenerate = 0;
        }
        t.pivot(r, q);
        it.used += 1;
    }
}

fn dual_simplex(t: &mut Tableau, it: &mut Counter, feas_tol: f64) -> PhaseEnd {
    let mut bland = false;
    let mut degenerate = 0;
    loop {
        let leaving = if bland {
            (0..t.m)
                .filter(|&i| t.rhs(i) < -feas_tol)
                .min_by_key(|&i| t.basis[i])
        } else {
            (0..t.m)
                .filter(|&i| t.rhs(i) < -feas_tol)
                .min_by(|&a, &b| t.rhs(a).total_cmp(&t.rhs(b)))
        };
        let Some(r) = leaving else {
            return PhaseEnd::Optimal;
        };
        if it.used >= it.limit {
            return PhaseEnd::IterationLimit;
        }
        let mut enter: Option<(usize, f64)> = None;
        for j in 0..t.ncols() {
            if t.in_basis[j] || t.barred[j] {
                continue;
            }
            let a = t.at(r, j);
            if a < -PIVOT_TOL {
                let ratio = t.obj[j].max(0.0) / -a;
                enter = match enter {
                    None => Some((j, ratio)),
                    Some((q, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        let better = if tie {
                            // bland keeps the smaller index, which came first
                            !bland && a.abs() > t.at(r, q).abs()
                        } else {
                            ratio < best
                        };
                        if better {
                            Some((j, ratio))
                        } else {
                            Some((q, best))
                        }
                    }
                };
            }
        }
        let Some((q, ratio)) = enter else {
            return PhaseEnd::Infeasible;
        };
        if ratio <= OPT_TOL {
            degenerate += 1;
            if degenerate > DEGENERATE_RUN {
                bland = true;
            }
        } else {
            degenerate = 0;
        }
        t.pivot(r, q);
        it.used += 1;
    }
}

fn standardize(problem: &LpProblem) -> (Standard, bool) {
    let m = problem.num_rows();
    let n = problem.num_vars();
    let shift: Vec<f64> = problem
        .constraints
        .rows()
        .into_iter()
        .map(|row| row.iter().zip(&problem.lower).map(|(a, l)| a * l).sum())
        .collect();
    let n_slack = problem.senses.iter().filter(|s| **s != Sense::Eq).count();
    let mut row_sign = vec![1.0; m];
    let mut b = vec![0.0; m];
    for i in 0..m {
        if problem.senses[i] == Sense::Ge {
            row_sign[i] = -1.0;
        }
        b[i] = row_sign[i] * (problem.rhs[i] - shift[i]);
    }
    let dual_start = problem.senses.iter().all(|s| *s != Sense::Eq)
        && problem.objective.iter().all(|c| *c >= -OPT_TOL);
    // primal start: rows whose slack cannot start basic need an artificial
    let needs_art: Vec<bool> = (0..m)
        .map(|i| !dual_start && (problem.senses[i] == Sense::Eq || b[i] < 0.0))
        .collect();
    let n_art = needs_art.iter().filter(|x| **x).count();
    let ncols = n + n_slack + n_art;
    let mut a = Array2::zeros((m, ncols));
    let mut artificial = vec![false; ncols];
    let mut slack = n;
    let mut art = n + n_slack;
    for i in 0..m {
        let flip = if needs_art[i] && b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            a[[i, j]] = flip * row_sign[i] * problem.constraints[[i, j]];
        }
        if problem.senses[i] != Sense::Eq {
            a[[i, slack]] = flip;
            slack += 1;
        }
        if needs_art[i] {
            a[[i, art]] = 1.0;
            artificial[art] = true;
            art += 1;
        }
        row_sign[i] *= flip;
        b[i] *= flip;
    }
    let mut c = vec![0.0; ncols];
    c[..n].copy_from_slice(&problem.objective);
    (
        Standard {
            a,
            b,
            c,
            row_sign,
            n_struct: n,
            artificial,
        },
        dual_start,
    )
}

fn initial_tableau(std: &Standard) -> Tableau {
    let (m, ncols) = std.a.dim();
    let width = ncols + 1;
    let mut rows = vec![0.0; m * width];
    for i in 0..m {
        for j in 0..ncols {
            rows[i * width + j] = std.a[[i, j]];
        }
        rows[i * width + ncols] = std.b[i];
    }
    // every row has a +1 unit column (artificial if present, else slack)
    let mut basis = vec![usize::MAX; m];
    for i in 0..m {
        for j in (std.n_struct..ncols).rev() {
            if std.a[[i, j]] == 1.0 && (0..m).all(|k| k == i || std.a[[k, j]] == 0.0) {
                basis[i] = j;
                break;
            }
        }
    }
    let mut in_basis = vec![false; ncols];
    for &j in &basis {
        in_basis[j] = true;
    }
    Tableau {
        m,
        width,
        rows,
        obj: vec![0.0; width],
        basis,
        in_basis,
        barred: vec![false; ncols],
    }
}

fn set_costs(t: &mut Tableau, costs: &[f64]) {
    let w = t.width;
    t.obj.iter_mut().for_each(|v| *v = 0.0);
    t.obj[..costs.len()].copy_from_slice(costs);
    for i in 0..t.m {
        let cb = costs[t.basis[i]];
        if cb != 0.0 {
            for j in 0..w {
                t.obj[j] -= cb * t.rows[i * w + j];
            }
        }
    }
    for &j in &t.basis {
        t.obj[j] = 0.0;
    }
}

struct Certificate {
    x: Vec<f64>,
    y: Vec<f64>,
    reduced: Vec<f64>,
    primal_ok: bool,
    dual_ok: bool,
}

fn certify(std: &Standard, t: &Tableau, scale_b: f64) -> Result<(Certificate, Lu)> {
    let m = t.m;
    let ncols = t.ncols();
    let mut bmat = Array2::zeros((m, m));
    for (k, &j) in t.basis.iter().enumerate() {
        for i in 0..m {
            bmat[[i, k]] = std.a[[i, j]];
        }
    }
    let lu = Lu::factor(bmat.view())?;
    let xb = lu.solve(&std.b);
    let cb: Vec<f64> = t.basis.iter().map(|&j| std.c[j]).collect();
    let y = lu.solve_transpose(&cb);
    let mut x = vec![0.0; ncols];
    for (k, &j) in t.basis.iter().enumerate() {
        x[j] = xb[k];
    }
    let reduced: Vec<f64> = (0..ncols)
        .map(|j| std.c[j] - (0..m).map(|i| std.a[[i, j]] * y[i]).sum::<f64>())
        .collect();
    let primal_ok = x
        .iter()
        .enumerate()
        .all(|(j, v)| *v >= -FEAS_TOL * scale_b && !(std.artificial[j] && v.abs() > FEAS_TOL * scale_b));
    let dual_ok = (0..ncols).all(|j| t.barred[j] || reduced[j] >= -1e-9);
    Ok((
        Certificate {
            x,
            y,
            reduced,
            primal_ok,
            dual_ok,
        },
        lu,
    ))
}

fn rebuild(std: &Standard, t: &mut Tableau, lu: &Lu, cert: &Certificate) {
    let (m, ncols) = std.a.dim();
    let w = t.width;
    for j in 0..ncols {
        let col: Vec<f64> = (0..m).map(|i| std.a[[i, j]]).collect();
        let solved = lu.solve(&col);
        for (k, v) in solved.into_iter().enumerate() {
            t.rows[k * w + j] = v;
        }
    }
    for (k, &j) in t.basis.iter().enumerate() {
        t.rows[k * w + ncols] = cert.x[j];
    }
    for j in 0..ncols {
        t.obj[j] = if t.in_basis[j] { 0.0 } else { cert.reduced[j] };
    }
    let value: f64 = (0..ncols).map(|j| std.c[j] * cert.x[j]).sum();
    t.obj[ncols] = -value;
}

/// Solves `problem`, spending at most `iteration_limit` pivots.
pub fn solve(problem: &LpProblem, iteration_limit: usize) -> Result<LpSolution> {
    let (std, dual_start) = standardize(problem);
    let mut t = initial_tableau(&std);
    let mut it = Counter {
        used: 0,
        limit: iteration_limit,
    };
    let scale_b = 1.0 + std.b.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    if problem.num_rows() == 0 {
        // only bounds: optimal at the lower bound unless some cost is negative
        if problem.objective.iter().any(|c| *c < 0.0) {
            return Ok(LpSolution::without_point(LpStatus::Unbounded, 0));
        }
        let x = problem.lower.clone();
        let value = x.iter().zip(&problem.objective).map(|(a, b)| a * b).sum();
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            x,
            objective_value: value,
            duals: Vec::new(),
            primal_residual: 0.0,
            dual_residual: 0.0,
            duality_gap: 0.0,
            iterations: 0,
        });
    }

    let end = if dual_start {
        set_costs(&mut t, &std.c);
        dual_simplex(&mut t, &mut it, FEAS_TOL)
    } else {
        let phase1: Vec<f64> = std.artificial.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        set_costs(&mut t, &phase1);
        match primal_simplex(&mut t, &mut it) {
            PhaseEnd::IterationLimit => PhaseEnd::IterationLimit,
            _ => {
                let infeasibility = -t.obj[t.ncols()];
                if infeasibility > FEAS_TOL * scale_b {
                    PhaseEnd::Infeasible
                } else {
                    drive_out_artificials(&std, &mut t);
                    for j in 0..t.ncols() {
                        t.barred[j] = std.artificial[j];
                    }
                    set_costs(&mut t, &std.c);
                    primal_simplex(&mut t, &mut it)
                }
            }
        }
    };
    match end {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => return Ok(LpSolution::without_point(LpStatus::Unbounded, it.used)),
        PhaseEnd::Infeasible => return Ok(LpSolution::without_point(LpStatus::Infeasible, it.used)),
        PhaseEnd::IterationLimit => {
            return Ok(LpSolution::without_point(LpStatus::IterationLimit, it.used))
        }
    }

    let mut refinements = 0;
    let cert = loop {
        let (cert, lu) = certify(&std, &t, scale_b)?;
        if (cert.primal_ok && cert.dual_ok) || refinements == MAX_REFINEMENTS {
            break cert;
        }
        refinements += 1;
        log::debug!("lp: refactoring after certificate failure (round {refinements})");
        rebuild(&std, &mut t, &lu, &cert);
        let end = if cert.dual_ok {
            dual_simplex(&mut t, &mut it, FEAS_TOL * scale_b)
        } else {
            primal_simplex(&mut t, &mut it)
        };
        match end {
            PhaseEnd::Optimal => {}
            PhaseEnd::Unbounded => return Ok(LpSolution::without_point(LpStatus::Unbounded, it.used)),
            PhaseEnd::Infeasible => return Ok(LpSolution::without_point(LpStatus::Infeasible, it.used)),
            PhaseEnd::IterationLimit => {
                return Ok(LpSolution::without_point(LpStatus::IterationLimit, it.used))
            }
        }
    };
    if !(cert.primal_ok && cert.dual_ok) {
        return Err(Error::Solver(
            "simplex could not certify an optimal basis after refactoring".into(),
        ));
    }

    let n = std.n_struct;
    let x: Vec<f64> = (0..n)
        .map(|j| problem.lower[j] + cert.x[j].max(0.0))
        .collect();
    let objective_value: f64 = x.iter().zip(&problem.objective).map(|(a, b)| a * b).sum();
    let duals: Vec<f64> = cert.y.iter().zip(&std.row_sign).map(|(y, s)| y * s).collect();
    let dual_objective: f64 = duals.iter().zip(&problem.rhs).map(|(y, b)| y * b).sum::<f64>()
        + (0..n)
            .map(|j| {
                let aty: f64 = (0..problem.num_rows())
                    .map(|i| problem.constraints[[i, j]] * duals[i])
                    .sum();
                (problem.objective[j] - aty) * problem.lower[j]
            })
            .sum::<f64>();
    let dual_residual = cert
        .reduced
        .iter()
        .enumerate()
        .filter(|(j, _)| !std.artificial[*j])
        .fold(0.0f64, |m, (_, d)| m.max(-d));
    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal_residual: problem.primal_residual(&x),
        duality_gap: (objective_value - dual_objective).abs(),
        x,
        objective_value,
        duals,
        dual_residual,
        iterations: it.used,
    })
}

fn drive_out_artificials(std: &Standard, t: &mut Tableau) {
    for r in 0..t.m {
        if !std.artificial[t.basis[r]] {
            continue;
        }
        let candidate = (0..t.ncols())
            .filter(|&j| !std.artificial[j] && !t.in_basis[j])
            .max_by(|&a, &b| t.at(r, a).abs().total_cmp(&t.at(r, b).abs()));
        if let Some(q) = candidate {
            if t.at(r, q).abs() > PIVOT_TOL {
                t.pivot(r, q);
            }
        }
        // otherwise the row is redundant and the artificial stays basic at zero
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn lp(c: Vec<f64>, a: Array2<f64>, b: Vec<f64>, s: Vec<Sense>) -> LpProblem {
        LpProblem::new(c, a, b, s).unwrap()
    }

    #[test]
    fn lower_bound_by_constraint() {
        let p = lp(vec![1.0], array![[1.0]], vec![2.0], vec![Sense::Ge]);
        let s = solve(&p, 100).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 2.0).abs() < 1e-12);
        assert!((s.objective_value - 2.0).abs() < 1e-12);
        assert!(s.duality_gap < 1e-9);
    }

    #[test]
    fn unbounded() {
        let p = lp(vec![-1.0], array![[1.0]], vec![0.0], vec![Sense::Ge]);
        assert_eq!(solve(&p, 100).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn infeasible() {
        let p = lp(vec![1.0, 1.0], array![[1.0, 1.0]], vec![-1.0], vec![Sense::Le]);
        assert_eq!(solve(&p, 100).unwrap().status, LpStatus::Infeasible);
        // same thing through the primal path
        let p = lp(vec![1.0, -1.0], array![[1.0, 1.0]], vec![-1.0], vec![Sense::Le]);
        assert_eq!(solve(&p, 100).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_rows_and_lower_bounds() {
        // min x + 2y  s.t. x + y = 3, x <= 1, x >= -1, y >= 0.5
        let p = lp(
            vec![1.0, 2.0],
            array![[1.0, 1.0], [1.0, 0.0]],
            vec![3.0, 1.0],
            vec![Sense::Eq, Sense::Le],
        )
        .with_lower_bounds(vec![-1.0, 0.5])
        .unwrap();
        let s = solve(&p, 100).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-10 && (s.x[1] - 2.0).abs() < 1e-10);
        assert!((s.objective_value - 5.0).abs() < 1e-10);
        assert!(s.duality_gap < 1e-9, "gap {}", s.duality_gap);
    }

    #[test]
    fn redundant_equalities() {
        let p = lp(
            vec![1.0, 1.0],
            array![[1.0, 1.0], [2.0, 2.0]],
            vec![1.0, 2.0],
            vec![Sense::Eq, Sense::Eq],
        );
        let s = solve(&p, 100).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn iteration_limit() {
        let p = lp(vec![1.0], array![[1.0]], vec![2.0], vec![Sense::Ge]);
        assert_eq!(solve(&p, 0).unwrap().status, LpStatus::IterationLimit);
    }

    #[test]
    fn malformed() {
        assert!(LpProblem::new(vec![1.0], array![[1.0, 2.0]], vec![1.0], vec![Sense::Le]).is_err());
        assert!(LpProblem::new(vec![1.0], array![[1.0]], vec![1.0, 2.0], vec![Sense::Le]).is_err());
        assert!(LpProblem::new(vec![], Array2::zeros((0, 0)), vec![], vec![]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let p = lp(
            vec![1.0, -0.1],
            array![[1.0, 1.0 / 3.0], [2.0, 0.0]],
            vec![3.0, 1e-7],
            vec![Sense::Eq, Sense::Ge],
        )
        .with_lower_bounds(vec![-1.0, 0.5])
        .unwrap();
        assert_eq!(LpProblem::from_text(&p.to_text()).unwrap(), p);
        assert!(LpProblem::from_text("lp 1 1\nobjective 1\n").is_err());
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling instance for the largest-coefficient rule.
        let p = lp(
            vec![-0.75, 150.0, -0.02, 6.0],
            array![
                [0.25, -60.0, -0.04, 9.0],
                [0.5, -90.0, -0.02, 3.0],
                [0.0, 0.0, 1.0, 0.0]
            ],
            vec![0.0, 0.0, 1.0],
            vec![Sense::Le, Sense::Le, Sense::Le],
        );
        let s = solve(&p, 10_000).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value + 0.05).abs() < 1e-9, "{}", s.objective_value);
    }
}
