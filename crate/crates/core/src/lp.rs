//! Small dense two-phase simplex solver.
//!
//! Problems are stated as maximization over real variables, each free unless
//! bounded, subject to `<=` and `=` rows. Sizes in this crate are tiny (a few
//! dozen columns, at most a few hundred rows), so a dense tableau is fine.

use std::fmt;

use crate::tol;

/// Entering-column rule is Dantzig until this many consecutive degenerate
/// pivots, then Bland for the rest of the phase.
const DEGENERATE_SWITCH: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bounds {
    pub const FREE: Bounds = Bounds {
        lower: None,
        upper: None,
    };
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    bounds: Vec<Bounds>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; meaningful only when `status` is `Optimal`.
    pub x: Vec<f64>,
    pub objective_value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpError {
    Malformed(String),
    NumericalFailure { pivots: usize, detail: &'static str },
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::Malformed(m) => write!(f, "malformed linear program: {m}"),
            LpError::NumericalFailure { pivots, detail } => {
                write!(f, "simplex failed after {pivots} pivots: {detail}")
            }
        }
    }
}

impl std::error::Error for LpError {}

impl LinearProgram {
    /// Maximize `<objective, x>` over free variables; add rows and bounds after.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            bounds: vec![Bounds::FREE; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn le(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs,
        });
        self
    }

    pub fn equal(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation: Relation::Eq,
            rhs,
        });
        self
    }

    pub fn bound(&mut self, var: usize, lower: Option<f64>, upper: Option<f64>) -> &mut Self {
        self.bounds[var] = Bounds { lower, upper };
        self
    }

    pub fn nonneg(&mut self, var: usize) -> &mut Self {
        self.bound(var, Some(0.0), None)
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (b, xi) in self.bounds.iter().zip(x) {
            if let Some(l) = b.lower {
                worst = worst.max(l - xi);
            }
            if let Some(u) = b.upper {
                worst = worst.max(xi - u);
            }
        }
        worst
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Malformed("non-finite objective".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::Malformed(format!(
                    "row {i} has {} coefficients for {n} variables",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(LpError::Malformed(format!("row {i} is not finite")));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if let (Some(l), Some(u)) = (b.lower, b.upper) {
                if l > u {
                    return Err(LpError::Malformed(format!(
                        "variable {j} has lower > upper"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        self.validate()?;
        let n = self.num_vars();

        // x_j = offset_j + sign_j * y_pos - y_neg  (y_neg only for free variables)
        struct Map {
            pos: usize,
            neg: Option<usize>,
            offset: f64,
            sign: f64,
        }
        let mut maps = Vec::with_capacity(n);
        let mut ncols = 0;
        let mut extra_rows: Vec<(usize, f64)> = Vec::new();
        for b in &self.bounds {
            let m = match (b.lower, b.upper) {
                (Some(l), u) => {
                    if let Some(u) = u {
                        extra_rows.push((ncols, u - l));
                    }
                    Map {
                        pos: ncols,
                        neg: None,
                        offset: l,
                        sign: 1.0,
                    }
                }
                (None, Some(u)) => Map {
                    pos: ncols,
                    neg: None,
                    offset: u,
                    sign: -1.0,
                },
                (None, None) => {
                    ncols += 1;
                    Map {
                        pos: ncols - 1,
                        neg: Some(ncols),
                        offset: 0.0,
                        sign: 1.0,
                    }
                }
            };
            ncols += 1;
            maps.push(m);
        }

        // rows in y-space, all `<=`
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut push_row = |coeffs: &[f64], rhs: f64, scale: f64| {
            let mut r = vec![0.0; ncols];
            let mut b = rhs * scale;
            for (a, m) in coeffs.iter().zip(&maps) {
                let a = a * scale;
                b -= a * m.offset;
                r[m.pos] += a * m.sign;
                if let Some(k) = m.neg {
                    r[k] -= a;
                }
            }
            rows.push((r, b));
        };
        for c in &self.constraints {
            push_row(&c.coeffs, c.rhs, 1.0);
            if c.relation == Relation::Eq {
                push_row(&c.coeffs, c.rhs, -1.0);
            }
        }
        for &(col, cap) in &extra_rows {
            let mut r = vec![0.0; ncols];
            r[col] = 1.0;
            rows.push((r, cap));
        }

        let mut cost = vec![0.0; ncols];
        for (c, m) in self.objective.iter().zip(&maps) {
            cost[m.pos] += c * m.sign;
            if let Some(k) = m.neg {
                cost[k] -= c;
            }
        }

        let mut tab = Tableau::new(&rows, ncols);
        let pivot_cap = 50 * (tab.rows + tab.cols) + 1000;

        if tab.n_art > 0 {
            let mut phase1 = vec![0.0; tab.cols];
            for c in tab.art_start..tab.cols {
                phase1[c] = -1.0;
            }
            tab.set_cost(&phase1);
            match tab.run(tab.cols, pivot_cap)? {
                Run::Optimal => {}
                Run::Unbounded => {
                    return Err(LpError::NumericalFailure {
                        pivots: tab.pivots,
                        detail: "phase one reported unbounded",
                    })
                }
            }
            let scale = 1.0 + rows.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
            if tab.objective() < -1e-9 * scale {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    x: vec![0.0; n],
                    objective_value: f64::NAN,
                });
            }
            tab.drive_out_artificials();
        }

        let mut full_cost = vec![0.0; tab.cols];
        full_cost[..ncols].copy_from_slice(&cost);
        tab.set_cost(&full_cost);
        if let Run::Unbounded = tab.run(tab.art_start, pivot_cap)? {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                x: vec![0.0; n],
                objective_value: f64::INFINITY,
            });
        }

        let y = tab.primal(ncols);
        let x: Vec<f64> = maps
            .iter()
            .map(|m| m.offset + m.sign * y[m.pos] - m.neg.map_or(0.0, |k| y[k]))
            .collect();
        let viol = self.max_violation(&x);
        let scale = 1.0
            + self
                .constraints
                .iter()
                .map(|c| c.rhs.abs())
                .fold(0.0, f64::max)
            + x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if viol > 1e-7 * scale {
            return Err(LpError::NumericalFailure {
                pivots: tab.pivots,
                detail: "solution violates constraints",
            });
        }
        let objective_value = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            x,
            objective_value,
        })
    }
}

enum Run {
    Optimal,
    Unbounded,
}

/// Row-major tableau `[A | b]` with a separate reduced-cost row.
struct Tableau {
    rows: usize,
    cols: usize,
    width: usize,
    a: Vec<f64>,
    basis: Vec<usize>,
    /// reduced costs `c_j - z_j`, last entry is minus the objective value
    red: Vec<f64>,
    art_start: usize,
    n_art: usize,
    pivots: usize,
}

impl Tableau {
    fn new(rows: &[(Vec<f64>, f64)], ncols: usize) -> Self {
        let m = rows.len();
        let n_art = rows.iter().filter(|r| r.1 < 0.0).count();
        let art_start = ncols + m;
        let cols = art_start + n_art;
        let width = cols + 1;
        let mut a = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut next_art = art_start;
        for (i, (r, b)) in rows.iter().enumerate() {
            let row = &mut a[i * width..(i + 1) * width];
            let s = if *b < 0.0 { -1.0 } else { 1.0 };
            for (j, v) in r.iter().enumerate() {
                row[j] = s * v;
            }
            row[ncols + i] = s;
            row[cols] = s * b;
            if *b < 0.0 {
                row[next_art] = 1.0;
                basis[i] = next_art;
                next_art += 1;
            } else {
                basis[i] = ncols + i;
            }
        }
        Self {
            rows: m,
            cols,
            width,
            a,
            basis,
            red: vec![0.0; width],
            art_start,
            n_art,
            pivots: 0,
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.a[i * self.width + self.cols]
    }

    fn set_cost(&mut self, c: &[f64]) {
        self.red[..self.cols].copy_from_slice(c);
        self.red[self.cols] = 0.0;
        for i in 0..self.rows {
            let cb = c[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * self.width..(i + 1) * self.width];
                for (r, v) in self.red.iter_mut().zip(row) {
                    *r -= cb * v;
                }
            }
        }
    }

    fn objective(&self) -> f64 {
        -self.red[self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.at(r, c);
        for v in &mut self.a[r * w..(r + 1) * w] {
            *v /= p;
        }
        let (before, rest) = self.a.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[c];
            if f != 0.0 {
                for (x, y) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
                row[c] = 0.0;
            }
        }
        let f = self.red[c];
        if f != 0.0 {
            for (x, y) in self.red.iter_mut().zip(prow.iter()) {
                *x -= f * y;
            }
            self.red[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Primal simplex over columns `< allowed`.
    fn run(&mut self, allowed: usize, cap: usize) -> Result<Run, LpError> {
        let mut degenerate = 0;
        let mut bland = false;
        loop {
            if self.pivots > cap {
                return Err(LpError::NumericalFailure {
                    pivots: self.pivots,
                    detail: "pivot limit reached",
                });
            }
            let entering = if bland {
                (0..allowed).find(|&j| self.red[j] > tol::LP)
            } else {
                let mut best = None;
                let mut best_v = tol::LP;
                for j in 0..allowed {
                    if self.red[j] > best_v {
                        best_v = self.red[j];
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else {
                return Ok(Run::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let aic = self.at(i, c);
                if aic > tol::LP {
                    let ratio = self.rhs(i).max(0.0) / aic;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(Run::Unbounded);
            };
            if ratio <= 1e-12 {
                degenerate += 1;
                if degenerate > DEGENERATE_SWITCH {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }

    fn drive_out_artificials(&mut self) {
        for i in 0..self.rows {
            if self.basis[i] >= self.art_start {
                let mut best = None;
                let mut best_v = 1e-9;
                for j in 0..self.art_start {
                    let v = self.at(i, j).abs();
                    if v > best_v {
                        best_v = v;
                        best = Some(j);
                    }
                }
                if let Some(j) = best {
                    self.pivot(i, j);
                }
            }
        }
    }

    fn primal(&self, ncols: usize) -> Vec<f64> {
        let mut y = vec![0.0; ncols];
        for i in 0..self.rows {
            if self.basis[i] < ncols {
                y[self.basis[i]] = self.rhs(i).max(0.0);
            }
        }
        y
    }
}
