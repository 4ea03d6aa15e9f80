//! Dense two-phase simplex over free variables, with Bland's rule.
//!
//! Problems here are tiny (a dozen variables, a few dozen constraints), so a
//! plain tableau is enough. Free variables are split as `x = x+ - x-`.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const COST_EPS: f64 = 1e-12;
/// Phase-one residual below which the constraints count as satisfied.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// Constraint set `A_ub x <= b_ub`, `A_eq x = b_eq` over `n` free variables.
#[derive(Debug, Clone, Default)]
pub struct Constraints {
    pub n: usize,
    pub ub: Vec<(Vec<f64>, f64)>,
    pub eq: Vec<(Vec<f64>, f64)>,
}

impl Constraints {
    pub fn new(n: usize) -> Self {
        Self { n, ub: Vec::new(), eq: Vec::new() }
    }

    pub fn less_eq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.ub.push((row, rhs));
        self
    }

    pub fn equal(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.eq.push((row, rhs));
        self
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    obj: Vec<f64>,
    obj_val: f64,
    max_iter: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        self.rhs[r] /= piv;
        let (prow, prhs) = (self.rows[r].clone(), self.rhs[r]);
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f != 0.0 {
                for (v, p) in self.rows[i].iter_mut().zip(&prow) {
                    *v -= f * p;
                }
                self.rhs[i] -= f * prhs;
                if self.rhs[i].abs() < 1e-15 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        let f = self.obj[c];
        for (v, p) in self.obj.iter_mut().zip(&prow) {
            *v -= f * p;
        }
        self.obj_val += f * prhs;
        self.basis[r] = c;
    }

    fn run(&mut self, allowed: usize) -> Result<Phase> {
        for _ in 0..self.max_iter {
            let Some(enter) = (0..allowed).find(|&j| self.obj[j] > COST_EPS) else {
                return Ok(Phase::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > PIVOT_EPS {
                    let ratio = self.rhs[i] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14
                                || (ratio <= lr + 1e-14 && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(Phase::Unbounded),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
        Err(Error::SolverFailure("simplex iteration limit reached".into()))
    }
}

/// Maximizes `c . x` subject to the constraints.
pub fn maximize(c: &[f64], cons: &Constraints) -> Result<LpOutcome> {
    solve(Some(c), cons)
}

/// Whether the constraint set admits a point, up to [`FEASIBILITY_TOL`].
pub fn is_feasible(cons: &Constraints) -> Result<bool> {
    Ok(!matches!(solve(None, cons)?, LpOutcome::Infeasible))
}

fn solve(c: Option<&[f64]>, cons: &Constraints) -> Result<LpOutcome> {
    let n = cons.n;
    let m_ub = cons.ub.len();
    let m = m_ub + cons.eq.len();
    for (row, rhs) in cons.ub.iter().chain(&cons.eq) {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
        if !rhs.is_finite() || row.iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverFailure("non-finite constraint data".into()));
        }
    }
    if let Some(c) = c {
        if c.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: c.len() });
        }
    }

    // Columns: x+ (n), x- (n), slacks (m_ub), artificials.
    let n_struct = 2 * n + m_ub;
    let mut art_rows = Vec::new();
    for (i, (_, rhs)) in cons.ub.iter().enumerate() {
        if *rhs < 0.0 {
            art_rows.push(i);
        }
    }
    art_rows.extend(m_ub..m);
    let n_cols = n_struct + art_rows.len();

    let mut rows = vec![vec![0.0; n_cols]; m];
    let mut rhs = vec![0.0; m];
    let mut basis = vec![usize::MAX; m];
    for (i, (a, b)) in cons.ub.iter().chain(&cons.eq).enumerate() {
        let sign = if *b < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            rows[i][j] = sign * a[j];
            rows[i][n + j] = -sign * a[j];
        }
        if i < m_ub {
            rows[i][2 * n + i] = sign;
            if sign > 0.0 {
                basis[i] = 2 * n + i;
            }
        }
        rhs[i] = sign * b;
    }
    for (t, &i) in art_rows.iter().enumerate() {
        rows[i][n_struct + t] = 1.0;
        basis[i] = n_struct + t;
    }

    // Phase one: maximize -sum(artificials).
    let mut obj = vec![0.0; n_cols];
    let mut obj_val = 0.0;
    for (t, &i) in art_rows.iter().enumerate() {
        for j in 0..n_cols {
            obj[j] += rows[i][j];
        }
        obj[n_struct + t] -= 1.0;
        obj_val -= rhs[i];
    }
    let max_iter = 50 * (m + n_cols) + 100;
    let mut tab = Tableau { rows, rhs, basis, obj, obj_val, max_iter };
    if !art_rows.is_empty() {
        match tab.run(n_cols)? {
            Phase::Optimal => {}
            Phase::Unbounded => {
                return Err(Error::SolverFailure("phase one reported unbounded".into()))
            }
        }
        if !tab.obj_val.is_finite() {
            return Err(Error::SolverFailure("non-finite phase-one objective".into()));
        }
        if -tab.obj_val > FEASIBILITY_TOL {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= n_struct {
                match (0..n_struct).find(|&j| tab.rows[i][j].abs() > 1e-9) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.rhs.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let Some(c) = c else {
        return Ok(LpOutcome::Optimal { value: 0.0, x: extract(&tab, n) });
    };
    let mut cost = vec![0.0; n_cols];
    cost[..n].copy_from_slice(c);
    for j in 0..n {
        cost[n + j] = -c[j];
    }
    tab.obj = cost.clone();
    tab.obj_val = 0.0;
    for i in 0..tab.rows.len() {
        let cb = cost[tab.basis[i]];
        if cb != 0.0 {
            for j in 0..n_cols {
                tab.obj[j] -= cb * tab.rows[i][j];
            }
            tab.obj_val += cb * tab.rhs[i];
        }
    }
    match tab.run(n_struct)? {
        Phase::Unbounded => Ok(LpOutcome::Unbounded),
        Phase::Optimal => Ok(LpOutcome::Optimal { value: tab.obj_val, x: extract(&tab, n) }),
    }
}

fn extract(tab: &Tableau, n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] += tab.rhs[i];
        } else if b < 2 * n {
            x[b - n] -= tab.rhs[i];
        }
    }
    x
}
