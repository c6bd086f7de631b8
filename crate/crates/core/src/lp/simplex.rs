//! Revised simplex for bounded-variable problems.
//!
//! Rows are turned into equalities `A x - w = 0` where each activity
//! variable `w_i` carries the row bounds, so box constraints never expand
//! into extra rows. Phase 1 minimizes the total artificial infeasibility;
//! phase 2 optimizes the real objective. Pivoting is deterministic: Dantzig
//! pricing with lowest-index tie-breaking, falling back to Bland's rule once
//! the iteration stalls on degenerate steps.

use super::problem::{LpError, LpProblem};

/// Outcome classification of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solution of an [`LpProblem`]. Primal/dual vectors are populated only
/// when `status` is [`LpStatus::Optimal`].
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal_values: Vec<f64>,
    pub objective_value: f64,
    /// One dual multiplier per row; positive when the upper row bound binds,
    /// negative when the lower one does.
    pub dual_values: Vec<f64>,
    /// Reduced costs `c - A'y` per structural variable.
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-10;
const DEGENERATE_STEP: f64 = 1e-12;
const STALL_LIMIT: usize = 50;
const REFACTOR_EVERY: usize = 64;
const INFEASIBILITY_TOL: f64 = 1e-7;

#[derive(Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic free variable, held at zero.
    Free,
}

enum Priced {
    Optimal,
    Enter { col: usize, dir: f64 },
}

enum Ratio {
    Unbounded,
    BoundFlip { step: f64 },
    Pivot { step: f64, row: usize, to_upper: bool },
}

/// Solves the problem to proven optimality or reports
/// infeasibility/unboundedness. Deterministic for identical input.
pub fn solve(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.validate()?;

    // A lower bound of +inf (or an upper bound of -inf) is structurally
    // valid but unsatisfiable by any finite point.
    let unsatisfiable = |lo: &[f64], hi: &[f64]| {
        lo.iter().any(|&l| l == f64::INFINITY) || hi.iter().any(|&u| u == f64::NEG_INFINITY)
    };
    if unsatisfiable(&problem.var_lower, &problem.var_upper)
        || unsatisfiable(&problem.row_lower, &problem.row_upper)
    {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            primal_values: Vec::new(),
            objective_value: 0.0,
            dual_values: Vec::new(),
            reduced_costs: Vec::new(),
            iterations: 0,
        });
    }

    let mut t = Tableau::new(problem);
    t.init_artificial_basis();

    t.phase1 = true;
    match t.optimize()? {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => {
            return Err(LpError::Numeric(
                "phase-1 objective unbounded: arithmetic breakdown".into(),
            ))
        }
    }
    let infeasibility: f64 = (0..t.m).map(|i| t.x[t.art_col(i)]).sum();
    if infeasibility > INFEASIBILITY_TOL {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            primal_values: Vec::new(),
            objective_value: 0.0,
            dual_values: Vec::new(),
            reduced_costs: Vec::new(),
            iterations: t.iterations,
        });
    }

    // Pin the artificials to zero and switch to the real objective.
    for i in 0..t.m {
        let a = t.art_col(i);
        t.upper[a] = 0.0;
    }
    t.phase1 = false;
    t.degenerate_run = 0;
    match t.optimize()? {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                primal_values: Vec::new(),
                objective_value: 0.0,
                dual_values: Vec::new(),
                reduced_costs: Vec::new(),
                iterations: t.iterations,
            })
        }
    }

    // Refresh the factorization and basic values once more so the reported
    // vertex is as tight as the arithmetic allows.
    t.refactor()?;
    Ok(t.extract())
}

struct Tableau<'a> {
    prob: &'a LpProblem,
    n: usize,
    m: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    /// Dense basis inverse, row-major m x m.
    binv: Vec<f64>,
    /// +-1 orientation of each artificial column.
    art_sign: Vec<f64>,
    phase1: bool,
    bland: bool,
    degenerate_run: usize,
    iterations: usize,
    pivots_since_refactor: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl<'a> Tableau<'a> {
    fn new(prob: &'a LpProblem) -> Self {
        let n = prob.num_vars();
        let m = prob.num_rows();
        let ncols = n + 2 * m;
        let mut lower = Vec::with_capacity(ncols);
        let mut upper = Vec::with_capacity(ncols);
        lower.extend_from_slice(&prob.var_lower);
        upper.extend_from_slice(&prob.var_upper);
        lower.extend_from_slice(&prob.row_lower);
        upper.extend_from_slice(&prob.row_upper);
        lower.extend(std::iter::repeat(0.0).take(m));
        upper.extend(std::iter::repeat(f64::INFINITY).take(m));
        Tableau {
            prob,
            n,
            m,
            lower,
            upper,
            x: vec![0.0; ncols],
            state: vec![VarState::AtLower; ncols],
            basis: Vec::new(),
            binv: vec![0.0; m * m],
            art_sign: vec![1.0; m],
            phase1: true,
            bland: false,
            degenerate_run: 0,
            iterations: 0,
            pivots_since_refactor: 0,
        }
    }

    fn art_col(&self, i: usize) -> usize {
        self.n + self.m + i
    }

    fn ncols(&self) -> usize {
        self.n + 2 * self.m
    }

    /// Places each structural/activity column at its finite bound nearest
    /// zero and starts from the all-artificial basis that absorbs the
    /// resulting row residuals.
    fn init_artificial_basis(&mut self) {
        for j in 0..self.n + self.m {
            let (l, u) = (self.lower[j], self.upper[j]);
            let (value, state) = match (l.is_finite(), u.is_finite()) {
                (true, true) => {
                    if l.abs() <= u.abs() {
                        (l, VarState::AtLower)
                    } else {
                        (u, VarState::AtUpper)
                    }
                }
                (true, false) => (l, VarState::AtLower),
                (false, true) => (u, VarState::AtUpper),
                (false, false) => (0.0, VarState::Free),
            };
            self.x[j] = value;
            self.state[j] = state;
        }
        self.basis = (0..self.m).map(|i| self.art_col(i)).collect();
        for i in 0..self.m {
            let mut lhs = -self.x[self.n + i];
            for (j, &a) in self.prob.rows[i].iter().enumerate() {
                lhs += a * self.x[j];
            }
            let sign = if lhs <= 0.0 { 1.0 } else { -1.0 };
            self.art_sign[i] = sign;
            let a = self.art_col(i);
            self.x[a] = lhs.abs();
            self.state[a] = VarState::Basic(i);
            // B = diag(sign) is its own inverse.
            self.binv[i * self.m + i] = sign;
        }
    }

    fn objective_coeff(&self, j: usize) -> f64 {
        if self.phase1 {
            if j >= self.n + self.m {
                -1.0
            } else {
                0.0
            }
        } else if j < self.n {
            self.prob.objective[j]
        } else {
            0.0
        }
    }

    /// y' A_j for a full column of the extended matrix.
    fn col_dot(&self, y: &[f64], j: usize) -> f64 {
        if j < self.n {
            (0..self.m).map(|i| y[i] * self.prob.rows[i][j]).sum()
        } else if j < self.n + self.m {
            -y[j - self.n]
        } else {
            self.art_sign[j - self.n - self.m] * y[j - self.n - self.m]
        }
    }

    /// alpha = B^-1 A_j.
    fn ftran(&self, j: usize, alpha: &mut [f64]) {
        if j < self.n {
            for i in 0..self.m {
                let mut s = 0.0;
                for k in 0..self.m {
                    s += self.binv[i * self.m + k] * self.prob.rows[k][j];
                }
                alpha[i] = s;
            }
        } else if j < self.n + self.m {
            let r = j - self.n;
            for i in 0..self.m {
                alpha[i] = -self.binv[i * self.m + r];
            }
        } else {
            let r = j - self.n - self.m;
            let s = self.art_sign[r];
            for i in 0..self.m {
                alpha[i] = s * self.binv[i * self.m + r];
            }
        }
    }

    /// y = B^-T c_B.
    fn btran_basic_costs(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (k, &bj) in self.basis.iter().enumerate() {
            let c = self.objective_coeff(bj);
            if c != 0.0 {
                for i in 0..self.m {
                    y[i] += c * self.binv[k * self.m + i];
                }
            }
        }
        y
    }

    fn price(&self, y: &[f64]) -> Priced {
        let mut best: Option<(usize, f64, f64)> = None; // (col, dir, score)
        for j in 0..self.ncols() {
            if matches!(self.state[j], VarState::Basic(_)) {
                continue;
            }
            if self.upper[j] - self.lower[j] <= 0.0 {
                continue; // fixed, can never move
            }
            let d = self.objective_coeff(j) - self.col_dot(y, j);
            let dir = match self.state[j] {
                VarState::AtLower => {
                    if d > COST_TOL {
                        1.0
                    } else {
                        continue;
                    }
                }
                VarState::AtUpper => {
                    if d < -COST_TOL {
                        -1.0
                    } else {
                        continue;
                    }
                }
                VarState::Free => {
                    if d > COST_TOL {
                        1.0
                    } else if d < -COST_TOL {
                        -1.0
                    } else {
                        continue;
                    }
                }
                VarState::Basic(_) => unreachable!(),
            };
            if self.bland {
                return Priced::Enter { col: j, dir };
            }
            let score = d.abs();
            match best {
                Some((_, _, s)) if score <= s => {}
                _ => best = Some((j, dir, score)),
            }
        }
        match best {
            Some((col, dir, _)) => Priced::Enter { col, dir },
            None => Priced::Optimal,
        }
    }

    fn ratio_test(&self, entering: usize, dir: f64, alpha: &[f64]) -> Ratio {
        let flip_step = self.upper[entering] - self.lower[entering]; // inf for free
        let mut best: Option<(f64, usize, f64, bool)> = None; // (step, row, |pivot|, to_upper)
        for k in 0..self.m {
            let a = alpha[k];
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let bk = self.basis[k];
            let rate = -dir * a; // change of x_B[k] per unit step
            let (room, to_upper) = if rate > 0.0 {
                (self.upper[bk] - self.x[bk], true)
            } else {
                (self.x[bk] - self.lower[bk], false)
            };
            if !room.is_finite() {
                continue;
            }
            let step = room.max(0.0) / rate.abs();
            let take = match best {
                None => true,
                Some((bs, brow, bp, _)) => {
                    if self.bland {
                        step < bs || (step == bs && bk < self.basis[brow])
                    } else {
                        step < bs || (step == bs && (a.abs() > bp || (a.abs() == bp && k < brow)))
                    }
                }
            };
            if take {
                best = Some((step, k, a.abs(), to_upper));
            }
        }
        match best {
            Some((step, row, _, to_upper)) if step < flip_step => Ratio::Pivot { step, row, to_upper },
            _ if flip_step.is_finite() => Ratio::BoundFlip { step: flip_step },
            _ => Ratio::Unbounded,
        }
    }

    fn apply_step(&mut self, entering: usize, dir: f64, step: f64, alpha: &[f64]) {
        if step != 0.0 {
            for k in 0..self.m {
                let bk = self.basis[k];
                self.x[bk] -= dir * step * alpha[k];
            }
            self.x[entering] += dir * step;
        }
    }

    fn pivot(&mut self, entering: usize, row: usize, to_upper: bool, alpha: &[f64]) {
        let leaving = self.basis[row];
        self.state[leaving] = if to_upper {
            self.x[leaving] = self.upper[leaving];
            VarState::AtUpper
        } else {
            self.x[leaving] = self.lower[leaving];
            VarState::AtLower
        };
        self.basis[row] = entering;
        self.state[entering] = VarState::Basic(row);

        // Product-form update of the explicit inverse.
        let m = self.m;
        let inv_piv = 1.0 / alpha[row];
        for c in 0..m {
            self.binv[row * m + c] *= inv_piv;
        }
        for k in 0..m {
            if k == row {
                continue;
            }
            let f = alpha[k];
            if f != 0.0 {
                for c in 0..m {
                    self.binv[k * m + c] -= f * self.binv[row * m + c];
                }
            }
        }
        self.pivots_since_refactor += 1;
    }

    fn optimize(&mut self) -> Result<PhaseEnd, LpError> {
        let iter_limit = 200 * (self.ncols() + self.m) + 20_000;
        let mut alpha = vec![0.0; self.m];
        loop {
            self.iterations += 1;
            if self.iterations > iter_limit {
                return Err(LpError::Numeric(format!(
                    "iteration limit {iter_limit} exceeded"
                )));
            }
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            let y = self.btran_basic_costs();
            let (entering, dir) = match self.price(&y) {
                Priced::Optimal => return Ok(PhaseEnd::Optimal),
                Priced::Enter { col, dir } => (col, dir),
            };
            self.ftran(entering, &mut alpha);
            let step = match self.ratio_test(entering, dir, &alpha) {
                Ratio::Unbounded => return Ok(PhaseEnd::Unbounded),
                Ratio::BoundFlip { step } => {
                    self.apply_step(entering, dir, step, &alpha);
                    // Land exactly on the opposite bound.
                    self.state[entering] = if dir > 0.0 {
                        self.x[entering] = self.upper[entering];
                        VarState::AtUpper
                    } else {
                        self.x[entering] = self.lower[entering];
                        VarState::AtLower
                    };
                    step
                }
                Ratio::Pivot { step, row, to_upper } => {
                    self.apply_step(entering, dir, step, &alpha);
                    self.pivot(entering, row, to_upper, &alpha);
                    step
                }
            };
            if step.abs() <= DEGENERATE_STEP {
                self.degenerate_run += 1;
                if self.degenerate_run >= STALL_LIMIT {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
        }
    }

    /// Rebuilds the basis inverse from scratch and recomputes the basic
    /// values from the nonbasic point.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        self.pivots_since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        // Gauss-Jordan on [B | I] with partial pivoting.
        let mut b = vec![0.0; m * m];
        for (k, &bj) in self.basis.iter().enumerate() {
            if bj < self.n {
                for i in 0..m {
                    b[i * m + k] = self.prob.rows[i][bj];
                }
            } else if bj < self.n + self.m {
                b[(bj - self.n) * m + k] = -1.0;
            } else {
                let r = bj - self.n - self.m;
                b[r * m + k] = self.art_sign[r];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv_row = col;
            let mut piv_val = b[col * m + col].abs();
            for r in col + 1..m {
                let v = b[r * m + col].abs();
                if v > piv_val {
                    piv_row = r;
                    piv_val = v;
                }
            }
            if piv_val < 1e-11 {
                return Err(LpError::Numeric("singular basis matrix".into()));
            }
            if piv_row != col {
                for c in 0..m {
                    b.swap(col * m + c, piv_row * m + c);
                    inv.swap(col * m + c, piv_row * m + c);
                }
            }
            let inv_piv = 1.0 / b[col * m + col];
            for c in 0..m {
                b[col * m + c] *= inv_piv;
                inv[col * m + c] *= inv_piv;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = b[r * m + col];
                if f != 0.0 {
                    for c in 0..m {
                        b[r * m + c] -= f * b[col * m + c];
                        inv[r * m + c] -= f * inv[col * m + c];
                    }
                }
            }
        }
        self.binv = inv;

        // x_B = B^-1 (0 - N x_N)
        let mut act = vec![0.0; m];
        for j in 0..self.ncols() {
            if matches!(self.state[j], VarState::Basic(_)) {
                continue;
            }
            let v = self.x[j];
            if v == 0.0 {
                continue;
            }
            if j < self.n {
                for i in 0..m {
                    act[i] += self.prob.rows[i][j] * v;
                }
            } else if j < self.n + self.m {
                act[j - self.n] -= v;
            } else {
                let r = j - self.n - self.m;
                act[r] += self.art_sign[r] * v;
            }
        }
        for k in 0..m {
            let mut s = 0.0;
            for i in 0..m {
                s -= self.binv[k * m + i] * act[i];
            }
            if !s.is_finite() {
                return Err(LpError::Numeric("non-finite basic value".into()));
            }
            self.x[self.basis[k]] = s;
        }
        Ok(())
    }

    fn extract(&self) -> LpSolution {
        let primal: Vec<f64> = self.x[..self.n].to_vec();
        let objective: f64 = self
            .prob
            .objective
            .iter()
            .zip(&primal)
            .map(|(c, v)| c * v)
            .sum();
        let y = self.btran_basic_costs();
        let reduced: Vec<f64> = (0..self.n)
            .map(|j| self.prob.objective[j] - self.col_dot(&y, j))
            .collect();
        LpSolution {
            status: LpStatus::Optimal,
            primal_values: primal,
            objective_value: objective,
            dual_values: y,
            reduced_costs: reduced,
            iterations: self.iterations,
        }
    }
}
