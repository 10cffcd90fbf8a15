//! Exact l1-quotient norms and basis-pursuit solvers on top of a dense
//! two-phase revised simplex.
//!
//! Vertex solutions and dual certificates matter more than speed here: the
//! quotient norm *is* the membership oracle for the random polytope, so
//! every optimal return carries a dual vector `y` with `||A^T y||_inf <= 1`
//! and `<y, w> = value` (weak-duality sandwich), and infeasibility is a
//! legal status, not an error. Anti-cycling is Bland's rule with an
//! iteration cap as a backstop.
//!
//! The inequality-constrained denoiser does not fit the simplex core; it is
//! a first-order primal-dual scheme (proximal splitting with projection
//! onto the l2 ball) with a gap-surrogate stopping rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::{dot, norm1, norm2, norm_inf, Mat};

/// Default simplex tolerances.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Feasibility: `||Av - w||` and phase-1 objective threshold.
    pub feas: f64,
    /// Dual feasibility slack on reduced costs.
    pub dual: f64,
    /// Primal-dual gap slack.
    pub gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feas: 1e-8,
            dual: 1e-8,
            gap: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Primal/dual solution of an equality-form LP.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    /// Duals of the equality rows (`A^T y <= c` at optimality).
    pub dual: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// For unbounded problems, an improving ray in variable space.
    pub ray: Option<Vec<f64>>,
}

// ---------------------------------------------------------------------------
// Standard-form core: min c^T x  s.t.  A x = b, x >= 0.
// ---------------------------------------------------------------------------

const PIVOT_TOL: f64 = 1e-11;
const REDUCED_COST_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 128;

struct Standard<'a> {
    rows: Vec<Vec<f64>>, // m x k, rows already sign-flipped so b >= 0
    b: Vec<f64>,
    flip: Vec<f64>, // +-1 per row, to map duals back
    k: usize,
    c: &'a [f64],
}

struct BasisState {
    basis: Vec<usize>,   // variable index per row; >= k means artificial
    in_basis: Vec<bool>, // over real variables only
    binv: Vec<Vec<f64>>, // m x m basis inverse
    xb: Vec<f64>,        // basic values
    iterations: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded { entering: usize, d: Vec<f64> },
    IterationLimit,
}

impl<'a> Standard<'a> {
    fn column(&self, j: usize, out: &mut [f64]) {
        let m = self.rows.len();
        if j < self.k {
            for i in 0..m {
                out[i] = self.rows[i][j];
            }
        } else {
            out.fill(0.0);
            out[j - self.k] = 1.0;
        }
    }

    /// `y^T A_j` without materializing the column.
    fn price(&self, y: &[f64], j: usize) -> f64 {
        if j < self.k {
            let mut acc = 0.0;
            for (i, row) in self.rows.iter().enumerate() {
                acc += y[i] * row[j];
            }
            acc
        } else {
            y[j - self.k]
        }
    }

    fn refactor(&self, state: &mut BasisState) -> Result<()> {
        let m = self.rows.len();
        // Rebuild the basis inverse by Gauss-Jordan with partial pivoting.
        let mut aug: Vec<Vec<f64>> = vec![vec![0.0; 2 * m]; m];
        let mut col = vec![0.0; m];
        for (r, &j) in state.basis.iter().enumerate() {
            self.column(j, &mut col);
            for i in 0..m {
                aug[i][r] = col[i];
            }
        }
        for i in 0..m {
            aug[i][m + i] = 1.0;
        }
        for piv in 0..m {
            let (mut best, mut mag) = (piv, aug[piv][piv].abs());
            for i in piv + 1..m {
                if aug[i][piv].abs() > mag {
                    best = i;
                    mag = aug[i][piv].abs();
                }
            }
            if mag < 1e-13 {
                return Err(Error::Solver(
                    "singular basis during refactorization".into(),
                ));
            }
            aug.swap(piv, best);
            let inv = 1.0 / aug[piv][piv];
            for v in aug[piv].iter_mut() {
                *v *= inv;
            }
            for i in 0..m {
                if i != piv {
                    let f = aug[i][piv];
                    if f != 0.0 {
                        for c in 0..2 * m {
                            aug[i][c] -= f * aug[piv][c];
                        }
                    }
                }
            }
        }
        // The permutation applied by row swaps acts on both halves at once,
        // so the right half already holds B^{-1} in original row order.
        for i in 0..m {
            for j in 0..m {
                state.binv[i][j] = aug[i][m + j];
            }
        }
        for i in 0..m {
            state.xb[i] = dot(&state.binv[i], &self.b).max(0.0);
        }
        Ok(())
    }

    /// One simplex phase with Bland's rule. `cost` is the phase objective,
    /// indexed over all variables (real then artificial).
    /// `pin_artificials` is set in phase 2, where basic artificials sit at
    /// zero and must not grow: a negative direction through such a row
    /// forces a degenerate swap instead.
    fn run_phase(
        &self,
        state: &mut BasisState,
        cost: impl Fn(usize) -> f64,
        pin_artificials: bool,
        max_iter: usize,
    ) -> Result<PhaseEnd> {
        let m = self.rows.len();
        let mut y = vec![0.0; m];
        let mut col = vec![0.0; m];
        let mut since_refactor = 0usize;
        loop {
            if state.iterations >= max_iter {
                return Ok(PhaseEnd::IterationLimit);
            }
            // y = binv^T c_B
            for i in 0..m {
                let mut acc = 0.0;
                for r in 0..m {
                    acc += cost(state.basis[r]) * state.binv[r][i];
                }
                y[i] = acc;
            }
            // Bland: smallest real index with negative reduced cost.
            let mut entering = None;
            for j in 0..self.k {
                if state.in_basis[j] {
                    continue;
                }
                if cost(j) - self.price(&y, j) < -REDUCED_COST_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(enter) = entering else {
                return Ok(PhaseEnd::Optimal);
            };
            // d = binv * A_enter
            self.column(enter, &mut col);
            let mut d = vec![0.0; m];
            for i in 0..m {
                d[i] = dot(&state.binv[i], &col);
            }
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let candidate = if d[i] > PIVOT_TOL {
                    Some(state.xb[i].max(0.0) / d[i])
                } else if pin_artificials && d[i] < -PIVOT_TOL && state.basis[i] >= self.k {
                    Some(0.0)
                } else {
                    None
                };
                if let Some(ratio) = candidate {
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-12
                                || (ratio <= lr + 1e-12 && state.basis[i] < state.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((leave_row, _)) = leave else {
                return Ok(PhaseEnd::Unbounded { entering: enter, d });
            };
            // Pivot: basis exchange plus in-place update of binv and xb.
            let step = if d[leave_row] > PIVOT_TOL {
                state.xb[leave_row].max(0.0) / d[leave_row]
            } else {
                0.0
            };
            for i in 0..m {
                if i != leave_row {
                    state.xb[i] -= step * d[i];
                    if state.xb[i] < 0.0 && state.xb[i] > -1e-12 {
                        state.xb[i] = 0.0;
                    }
                }
            }
            state.xb[leave_row] = step;
            let piv = d[leave_row];
            let inv = 1.0 / piv;
            for c in 0..m {
                state.binv[leave_row][c] *= inv;
            }
            for i in 0..m {
                if i != leave_row && d[i] != 0.0 {
                    let f = d[i];
                    for c in 0..m {
                        state.binv[i][c] -= f * state.binv[leave_row][c];
                    }
                }
            }
            let old = state.basis[leave_row];
            if old < self.k {
                state.in_basis[old] = false;
            }
            state.basis[leave_row] = enter;
            state.in_basis[enter] = true;
            state.iterations += 1;
            since_refactor += 1;
            if since_refactor >= REFACTOR_EVERY {
                self.refactor(state)?;
                since_refactor = 0;
            }
        }
    }
}

/// Solve `min c^T x  s.t.  A x = b, x >= 0` by two-phase revised simplex.
pub fn solve_standard_form(
    c: &[f64],
    a: &Mat,
    b: &[f64],
    tol: &Tolerances,
    max_iter: usize,
) -> Result<LpSolution> {
    let m = a.n_rows();
    let k = a.n_cols();
    if c.len() != k || b.len() != m {
        return Err(Error::Parameter("LP dimension mismatch".into()));
    }
    if !c.iter().chain(b.iter()).all(|v| v.is_finite()) {
        return Err(Error::Parameter("LP data must be finite".into()));
    }
    let mut rows: Vec<Vec<f64>> = (0..m).map(|i| a.row(i).to_vec()).collect();
    let mut bw = b.to_vec();
    let mut flip = vec![1.0; m];
    for i in 0..m {
        if bw[i] < 0.0 {
            bw[i] = -bw[i];
            flip[i] = -1.0;
            for v in rows[i].iter_mut() {
                *v = -*v;
            }
        }
    }
    let std = Standard {
        rows,
        b: bw.clone(),
        flip,
        k,
        c,
    };
    let mut state = BasisState {
        basis: (k..k + m).collect(),
        in_basis: vec![false; k],
        binv: (0..m)
            .map(|i| {
                let mut r = vec![0.0; m];
                r[i] = 1.0;
                r
            })
            .collect(),
        xb: bw,
        iterations: 0,
    };

    // Phase 1: minimize the artificial mass.
    let phase1 = |j: usize| if j >= k { 1.0 } else { 0.0 };
    match std.run_phase(&mut state, phase1, false, max_iter)? {
        PhaseEnd::IterationLimit => {
            return Ok(partial_solution(&std, &state, LpStatus::IterationLimit))
        }
        PhaseEnd::Unbounded { .. } => {
            return Err(Error::Solver("phase 1 cannot be unbounded".into()))
        }
        PhaseEnd::Optimal => {}
    }
    let artificial_mass: f64 = (0..m)
        .filter(|&i| state.basis[i] >= k)
        .map(|i| state.xb[i].max(0.0))
        .sum();
    if artificial_mass > tol.feas * (1.0 + norm1(&std.b)) {
        let mut sol = partial_solution(&std, &state, LpStatus::Infeasible);
        sol.objective = f64::NAN;
        return Ok(sol);
    }
    // Drive remaining artificials out of the basis where possible.
    for r in 0..m {
        if state.basis[r] < k {
            continue;
        }
        let w = state.binv[r].clone();
        let mut pivot_col = None;
        for j in 0..k {
            if state.in_basis[j] {
                continue;
            }
            let mut val = 0.0;
            for i in 0..m {
                val += w[i] * std.rows[i][j];
            }
            if val.abs() > 1e-8 {
                pivot_col = Some(j);
                break;
            }
        }
        if let Some(j) = pivot_col {
            let mut col = vec![0.0; m];
            std.column(j, &mut col);
            let mut d = vec![0.0; m];
            for i in 0..m {
                d[i] = dot(&state.binv[i], &col);
            }
            let inv = 1.0 / d[r];
            for cidx in 0..m {
                state.binv[r][cidx] *= inv;
            }
            for i in 0..m {
                if i != r && d[i] != 0.0 {
                    let f = d[i];
                    for cidx in 0..m {
                        state.binv[i][cidx] -= f * state.binv[r][cidx];
                    }
                }
            }
            state.basis[r] = j;
            state.in_basis[j] = true;
            // The entering variable takes over the artificial's zero value.
        }
        // A row with no available pivot is redundant; its artificial stays
        // basic at zero and is blocked from growing by the ratio-test guard.
    }

    // Phase 2 on the real objective.
    let phase2 = |j: usize| if j < k { c[j] } else { 0.0 };
    let end = std.run_phase(&mut state, phase2, true, max_iter)?;
    match end {
        PhaseEnd::Optimal => Ok(finish(&std, &state, LpStatus::Optimal, None)),
        PhaseEnd::IterationLimit => Ok(partial_solution(&std, &state, LpStatus::IterationLimit)),
        PhaseEnd::Unbounded { entering, d } => {
            // Improving ray: entering variable grows, basics move along -d.
            let mut ray = vec![0.0; k];
            ray[entering] = 1.0;
            for i in 0..m {
                if state.basis[i] < k {
                    ray[state.basis[i]] = -d[i];
                }
            }
            Ok(finish(&std, &state, LpStatus::Unbounded, Some(ray)))
        }
    }
}

fn scatter_x(std: &Standard<'_>, state: &BasisState) -> Vec<f64> {
    let mut x = vec![0.0; std.k];
    for (i, &j) in state.basis.iter().enumerate() {
        if j < std.k {
            x[j] = state.xb[i].max(0.0);
        }
    }
    x
}

fn finish(
    std: &Standard<'_>,
    state: &BasisState,
    status: LpStatus,
    ray: Option<Vec<f64>>,
) -> LpSolution {
    let m = std.rows.len();
    let k = std.k;
    let c = std.c;
    let x = scatter_x(std, state);
    let mut dual = vec![0.0; m];
    for i in 0..m {
        let mut acc = 0.0;
        for r in 0..m {
            let j = state.basis[r];
            let cost = if j < k { c[j] } else { 0.0 };
            acc += cost * state.binv[r][i];
        }
        // Undo the row sign flips.
        dual[i] = acc * std.flip[i];
    }
    LpSolution {
        status,
        objective: dot(c, &x),
        dual,
        x,
        iterations: state.iterations,
        ray,
    }
}

fn partial_solution(std: &Standard<'_>, state: &BasisState, status: LpStatus) -> LpSolution {
    let mut sol = finish(std, state, status, None);
    if status == LpStatus::Infeasible {
        sol.x.fill(0.0);
    }
    sol
}

/// General-bounds front end: `min c^T x  s.t.  A x = b, lo <= x <= hi`.
///
/// Bounds may be `(-inf, inf)` (free), half-open, or finite; everything is
/// reduced to standard form by shifts, mirrors, splits and slack rows.
/// Returned duals cover the original equality rows.
pub fn lp_solve(
    c: &[f64],
    a_eq: &Mat,
    b_eq: &[f64],
    bounds: &[(f64, f64)],
    tol: &Tolerances,
) -> Result<LpSolution> {
    let m = a_eq.n_rows();
    let n = a_eq.n_cols();
    if bounds.len() != n || c.len() != n || b_eq.len() != m {
        return Err(Error::Parameter("LP dimension mismatch".into()));
    }
    for &(lo, hi) in bounds {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Parameter(format!("bad bound interval [{lo}, {hi}]")));
        }
    }

    enum ColPlan {
        Shifted { col: usize, lo: f64 },  // x = lo + u
        Mirrored { col: usize, hi: f64 }, // x = hi - u
        Split { pos: usize, neg: usize }, // x = u+ - u-
    }
    let mut plans = Vec::with_capacity(n);
    let mut n_std = 0usize;
    let mut extra_rows = 0usize;
    for &(lo, hi) in bounds {
        if lo.is_finite() {
            plans.push(ColPlan::Shifted { col: n_std, lo });
            n_std += 1;
            if hi.is_finite() {
                extra_rows += 1; // u + s = hi - lo
            }
        } else if hi.is_finite() {
            plans.push(ColPlan::Mirrored { col: n_std, hi });
            n_std += 1;
        } else {
            plans.push(ColPlan::Split {
                pos: n_std,
                neg: n_std + 1,
            });
            n_std += 2;
        }
    }
    let slack_base = n_std;
    n_std += extra_rows;

    let mut sa = Mat::zeros(m + extra_rows, n_std);
    let mut sb = vec![0.0; m + extra_rows];
    let mut sc = vec![0.0; n_std];
    let mut obj_offset = 0.0;
    sb[..m].copy_from_slice(b_eq);
    let mut slack_idx = 0usize;
    for (j, plan) in plans.iter().enumerate() {
        match *plan {
            ColPlan::Shifted { col, lo } => {
                for i in 0..m {
                    sa[(i, col)] = a_eq[(i, j)];
                    sb[i] -= a_eq[(i, j)] * lo;
                }
                sc[col] = c[j];
                obj_offset += c[j] * lo;
                let (blo, bhi) = bounds[j];
                if bhi.is_finite() {
                    let r = m + slack_idx;
                    sa[(r, col)] = 1.0;
                    sa[(r, slack_base + slack_idx)] = 1.0;
                    sb[r] = bhi - blo;
                    slack_idx += 1;
                }
            }
            ColPlan::Mirrored { col, hi } => {
                for i in 0..m {
                    sa[(i, col)] = -a_eq[(i, j)];
                    sb[i] -= a_eq[(i, j)] * hi;
                }
                sc[col] = -c[j];
                obj_offset += c[j] * hi;
            }
            ColPlan::Split { pos, neg } => {
                for i in 0..m {
                    sa[(i, pos)] = a_eq[(i, j)];
                    sa[(i, neg)] = -a_eq[(i, j)];
                }
                sc[pos] = c[j];
                sc[neg] = -c[j];
            }
        }
    }

    let max_iter = 10_000.max(50 * (m + extra_rows + n_std));
    let inner = solve_standard_form(&sc, &sa, &sb, tol, max_iter)?;
    let mut x = vec![0.0; n];
    for (j, plan) in plans.iter().enumerate() {
        x[j] = match *plan {
            ColPlan::Shifted { col, lo } => lo + inner.x[col],
            ColPlan::Mirrored { col, hi } => hi - inner.x[col],
            ColPlan::Split { pos, neg } => inner.x[pos] - inner.x[neg],
        };
    }
    Ok(LpSolution {
        status: inner.status,
        objective: if inner.status == LpStatus::Optimal {
            inner.objective + obj_offset
        } else {
            inner.objective
        },
        dual: inner.dual[..m].to_vec(),
        x,
        iterations: inner.iterations,
        ray: None,
    })
}

// ---------------------------------------------------------------------------
// Quotient norms and basis pursuit.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

/// Which hull the gauge refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientMode {
    /// Gauge of `absconv(+-X_1, ..., +-X_N)`: `min ||v||_1, A v = w`.
    Symmetric,
    /// Gauge of the one-sided hull: `min sum v_i, A v = w, v >= 0`.
    OneSided,
}

/// Value and certificate of the l1-quotient program.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientResult {
    pub status: SolveStatus,
    /// Optimal `||v||_1` (or `sum v_i` in one-sided mode); NaN off-optimal.
    pub value: f64,
    /// One optimal preimage `v` with `A v = w`.
    pub minimizer: Vec<f64>,
    /// `||A v - w||_2`.
    pub residual: f64,
    /// Dual certificate: `||A^T y||_inf <= 1 + tol` and `<y, w> >= value - tol`.
    pub dual: Vec<f64>,
    pub iterations: usize,
}

/// `min { ||v||_1 : A v = w }` (symmetric) or the one-sided variant.
pub fn quotient_norm(
    a: &Mat,
    w: &[f64],
    mode: QuotientMode,
    tol: &Tolerances,
) -> Result<QuotientResult> {
    let n = a.n_rows();
    let big_n = a.n_cols();
    if w.len() != n {
        return Err(Error::Parameter(
            "w length must match the row count of A".into(),
        ));
    }
    let cols = match mode {
        QuotientMode::Symmetric => 2 * big_n,
        QuotientMode::OneSided => big_n,
    };
    let mut sa = Mat::zeros(n, cols);
    for i in 0..n {
        let row = a.row(i).to_vec();
        let out = sa.row_mut(i);
        out[..big_n].copy_from_slice(&row);
        if mode == QuotientMode::Symmetric {
            for j in 0..big_n {
                out[big_n + j] = -row[j];
            }
        }
    }
    let c = vec![1.0; cols];
    let max_iter = 10_000.max(50 * (n + cols));
    let sol = solve_standard_form(&c, &sa, w, tol, max_iter)?;
    let status = match sol.status {
        LpStatus::Optimal => SolveStatus::Optimal,
        LpStatus::Infeasible => SolveStatus::Infeasible,
        LpStatus::IterationLimit => SolveStatus::IterationLimit,
        LpStatus::Unbounded => {
            return Err(Error::Solver(
                "quotient program is bounded below by zero; unbounded status is a bug".into(),
            ))
        }
    };
    let mut v = vec![0.0; big_n];
    match mode {
        QuotientMode::Symmetric => {
            for j in 0..big_n {
                v[j] = sol.x[j] - sol.x[big_n + j];
            }
        }
        QuotientMode::OneSided => v.copy_from_slice(&sol.x[..big_n]),
    }
    let av = a.mul_vec(&v);
    let mut acc = 0.0;
    for i in 0..n {
        let d = av[i] - w[i];
        acc += d * d;
    }
    let value = match mode {
        QuotientMode::Symmetric => norm1(&v),
        QuotientMode::OneSided => v.iter().sum(),
    };
    Ok(QuotientResult {
        status,
        value: if status == SolveStatus::Optimal {
            value
        } else {
            f64::NAN
        },
        minimizer: v,
        residual: acc.sqrt(),
        dual: sol.dual,
        iterations: sol.iterations,
    })
}

/// Equality-constrained l1 minimization: `min ||z||_1  s.t.  A z = y`.
/// Same program as the symmetric quotient norm; the minimizer is the
/// recovered vector.
pub fn basis_pursuit(a: &Mat, y: &[f64], tol: &Tolerances) -> Result<QuotientResult> {
    quotient_norm(a, y, QuotientMode::Symmetric, tol)
}

/// Result of the inequality-constrained denoiser.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DenoiseResult {
    pub status: SolveStatus,
    pub z: Vec<f64>,
    /// `||z||_1`.
    pub objective: f64,
    /// `max(0, ||A z - y|| - eta)`.
    pub constraint_violation: f64,
    /// Duality-gap surrogate at termination.
    pub gap: f64,
    pub iterations: usize,
}

/// `min ||z||_1  s.t.  ||A z - y_bar||_2 <= eta`, by a primal-dual
/// (Chambolle-Pock) iteration. Stops when the constraint violation, the
/// iterate movement, and the gap surrogate all fall below `tol`; iteration
/// cap 10^5.
pub fn bp_denoise(a: &Mat, y_bar: &[f64], eta: f64, tol: f64) -> Result<DenoiseResult> {
    if eta < 0.0 || eta.is_nan() {
        return Err(Error::Domain(format!(
            "noise radius eta = {eta} must be >= 0"
        )));
    }
    let n = a.n_rows();
    let big_n = a.n_cols();
    if y_bar.len() != n {
        return Err(Error::Parameter(
            "y length must match the row count of A".into(),
        ));
    }
    let y_norm = norm2(y_bar);
    // z = 0 is feasible and l1-minimal when the ball contains the origin.
    if eta >= y_norm {
        return Ok(DenoiseResult {
            status: SolveStatus::Optimal,
            z: vec![0.0; big_n],
            objective: 0.0,
            constraint_violation: 0.0,
            gap: 0.0,
            iterations: 0,
        });
    }

    // Spectral norm of A by power iteration on A^T A.
    let mut v = vec![1.0 / (big_n as f64).sqrt(); big_n];
    let mut lmax = 0.0;
    for _ in 0..100 {
        let av = a.mul_vec(&v);
        let atav = a.mul_transpose_vec(&av);
        lmax = norm2(&atav);
        if lmax <= 0.0 {
            break;
        }
        for (vi, ai) in v.iter_mut().zip(&atav) {
            *vi = ai / lmax;
        }
    }
    let op_norm = lmax.sqrt().max(1e-12) * 1.001;
    let step = 0.99 / op_norm;
    let (tau, sigma) = (step, step);

    let max_iter = 100_000usize;
    let mut z = vec![0.0; big_n];
    let mut z_bar = z.clone();
    let mut dual = vec![0.0; n];
    let mut iterations = 0usize;
    while iterations < max_iter {
        // Dual ascent + Moreau identity for the projection onto the
        // eta-ball around y_bar.
        let az = a.mul_vec(&z_bar);
        for i in 0..n {
            dual[i] += sigma * az[i];
        }
        let mut diff_norm = 0.0;
        for i in 0..n {
            let d = dual[i] / sigma - y_bar[i];
            diff_norm += d * d;
        }
        diff_norm = diff_norm.sqrt();
        let ball_factor = if diff_norm > eta && diff_norm > 0.0 {
            eta / diff_norm
        } else {
            1.0
        };
        for i in 0..n {
            let u = dual[i] / sigma;
            let proj = y_bar[i] + (u - y_bar[i]) * ball_factor;
            dual[i] -= sigma * proj;
        }
        // Primal soft-threshold step with over-relaxation.
        let grad = a.mul_transpose_vec(&dual);
        let mut movement = 0.0;
        for j in 0..big_n {
            let mut znew = z[j] - tau * grad[j];
            let mag = znew.abs() - tau;
            znew = if mag > 0.0 { znew.signum() * mag } else { 0.0 };
            let delta = znew - z[j];
            movement += delta * delta;
            z_bar[j] = znew + delta; // 2 z_new - z_old
            z[j] = znew;
        }
        let last_move = movement.sqrt();
        iterations += 1;

        if iterations % 20 == 0 || last_move == 0.0 {
            let az = a.mul_vec(&z);
            let mut r = 0.0;
            for i in 0..n {
                let d = az[i] - y_bar[i];
                r += d * d;
            }
            let violation = (r.sqrt() - eta).max(0.0);
            // Dual candidate lambda = -dual, scaled into ||A^T lambda||_inf <= 1.
            let lambda: Vec<f64> = dual.iter().map(|d| -d).collect();
            let at_lambda = a.mul_transpose_vec(&lambda);
            let scale = norm_inf(&at_lambda).max(1.0);
            let dual_obj = (dot(y_bar, &lambda) - eta * norm2(&lambda)) / scale;
            let gap = norm1(&z) - dual_obj;
            let obj_scale = norm1(&z).max(1.0);
            if violation <= tol * y_norm.max(1.0)
                && gap.abs() <= tol * obj_scale
                && last_move <= tol * obj_scale
            {
                return Ok(DenoiseResult {
                    status: SolveStatus::Optimal,
                    objective: norm1(&z),
                    constraint_violation: violation,
                    gap,
                    z,
                    iterations,
                });
            }
        }
    }
    let az = a.mul_vec(&z);
    let mut r = 0.0;
    for i in 0..n {
        let d = az[i] - y_bar[i];
        r += d * d;
    }
    Ok(DenoiseResult {
        status: SolveStatus::IterationLimit,
        objective: norm1(&z),
        constraint_violation: (r.sqrt() - eta).max(0.0),
        gap: f64::NAN,
        z,
        iterations,
    })
}
