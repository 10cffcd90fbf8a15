//! Desk-scale sparse-recovery lab: exact null-space-property constants by
//! support/sign enumeration, empirical l1-quotient constants against a
//! floating body, and noise-blind vs noise-informed recovery trials.
//!
//! NSP verification is worst-case hard, so [`nsp_constant`] is explicitly
//! budgeted: it refuses to start when `C(N, s) * 2^s` exceeds the LP
//! budget, rather than silently running for hours.

use serde::{Deserialize, Serialize};

use crate::bodies::{PolarRadial, StarBody};
use crate::error::{Error, Result};
use crate::l1opt::{
    basis_pursuit, bp_denoise, quotient_norm, solve_standard_form, LpStatus, QuotientMode,
    SolveStatus, Tolerances,
};
use crate::mat::{norm2, Mat};
use crate::rng::RngStream;

/// Default cap on the number of LP solves in one NSP enumeration.
pub const DEFAULT_NSP_BUDGET: u64 = 100_000;

/// Best l1 approximation error by s-sparse vectors: the sum of all but the
/// s largest magnitudes.
pub fn sparse_approx_error(x: &[f64], s: usize) -> f64 {
    if s >= x.len() {
        return 0.0;
    }
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(f64::total_cmp);
    mags[..x.len() - s].iter().sum()
}

/// A kernel vector violating (or witnessing) the NSP bound on a support.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NspWitness {
    /// Kernel vector normalized to `||v_{S^c}||_1 = 1` (finite rho) or
    /// `||v_{S^c}||_1 = 0` (infinite rho).
    pub v: Vec<f64>,
    pub support: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NspReport {
    /// `max_{|S|=s} max_{v in ker A \ 0} ||v_S||_1 / ||v_{S^c}||_1`;
    /// 0 for a trivial kernel, infinite when some kernel vector is
    /// supported inside an S.
    pub rho: f64,
    pub witness: Option<NspWitness>,
    pub lp_count: u64,
    pub kernel_dim: usize,
}

/// Kernel basis of `a` by row reduction with a relative rank tolerance.
fn kernel_basis(a: &Mat, rank_tol: f64) -> Vec<Vec<f64>> {
    let m = a.n_rows();
    let n = a.n_cols();
    let mut rows: Vec<Vec<f64>> = (0..m).map(|i| a.row(i).to_vec()).collect();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..n {
        if rank == m {
            break;
        }
        let (mut best, mut mag) = (rank, rows[rank][col].abs());
        for i in rank + 1..m {
            if rows[i][col].abs() > mag {
                best = i;
                mag = rows[i][col].abs();
            }
        }
        if mag <= rank_tol * scale {
            continue;
        }
        rows.swap(rank, best);
        let inv = 1.0 / rows[rank][col];
        for c in col..n {
            rows[rank][c] *= inv;
        }
        for i in 0..m {
            if i != rank && rows[i][col] != 0.0 {
                let f = rows[i][col];
                for c in col..n {
                    rows[i][c] -= f * rows[rank][c];
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    free_cols
        .iter()
        .map(|&fc| {
            let mut v = vec![0.0; n];
            v[fc] = 1.0;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -rows[r][fc];
            }
            v
        })
        .collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

struct Combinations {
    idx: Vec<usize>,
    n: usize,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            idx: (0..k).collect(),
            n,
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self.idx.clone();
        let k = self.idx.len();
        if k == 0 {
            self.done = true;
            return Some(current);
        }
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - (k - i) {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(current)
    }
}

/// Exact NSP constant of order `s`:
/// `rho = max over supports S (|S| = s) and sign patterns sigma of the LP
/// max sigma^T v_S  s.t.  v in ker A, ||v_{S^c}||_1 <= 1`.
///
/// The work estimate `C(N,s) * 2^s` is checked against `budget` before any
/// solve starts (by kernel symmetry, only half the sign patterns are
/// actually solved).
pub fn nsp_constant(a: &Mat, s: usize, budget: u64) -> Result<NspReport> {
    let n_cols = a.n_cols();
    if s > n_cols {
        return Err(Error::Parameter(format!(
            "sparsity s = {s} exceeds the number of columns {n_cols}"
        )));
    }
    let estimated = binomial(n_cols as u64, s as u64).saturating_mul(1u64 << s.min(63));
    if estimated > budget {
        return Err(Error::BudgetExceeded { estimated, budget });
    }
    let basis = kernel_basis(a, 1e-10);
    let kernel_dim = basis.len();
    if kernel_dim == 0 || s == 0 {
        return Ok(NspReport {
            rho: 0.0,
            witness: None,
            lp_count: 0,
            kernel_dim,
        });
    }
    let k = kernel_dim;
    let tol = Tolerances::default();
    let mut rho = 0.0f64;
    let mut witness: Option<NspWitness> = None;
    let mut lp_count = 0u64;

    for support in Combinations::new(n_cols, s) {
        let complement: Vec<usize> = (0..n_cols).filter(|j| !support.contains(j)).collect();
        let nc = complement.len();
        // Sign patterns with the first sign fixed positive (sigma and
        // -sigma give equal values on a symmetric kernel).
        for pattern in 0..(1u64 << (s - 1)) {
            let mut sigma = vec![1.0; s];
            for (bit, sig) in sigma.iter_mut().enumerate().skip(1) {
                if pattern >> (bit - 1) & 1 == 1 {
                    *sig = -1.0;
                }
            }
            // Variables: zp (k), zn (k), u (nc), s1 (nc), s2 (nc), s0 (1).
            // Rows: per j in S^c: B_j (zp - zn) - u_j + s1_j = 0
            //                    -B_j (zp - zn) - u_j + s2_j = 0
            //       sum u + s0 = 1.
            let cols = 2 * k + 3 * nc + 1;
            let rows = 2 * nc + 1;
            let mut sa = Mat::zeros(rows, cols);
            let mut sb = vec![0.0; rows];
            for (jj, &j) in complement.iter().enumerate() {
                for b in 0..k {
                    sa[(2 * jj, b)] = basis[b][j];
                    sa[(2 * jj, k + b)] = -basis[b][j];
                    sa[(2 * jj + 1, b)] = -basis[b][j];
                    sa[(2 * jj + 1, k + b)] = basis[b][j];
                }
                sa[(2 * jj, 2 * k + jj)] = -1.0;
                sa[(2 * jj + 1, 2 * k + jj)] = -1.0;
                sa[(2 * jj, 2 * k + nc + jj)] = 1.0;
                sa[(2 * jj + 1, 2 * k + 2 * nc + jj)] = 1.0;
            }
            for jj in 0..nc {
                sa[(2 * nc, 2 * k + jj)] = 1.0;
            }
            sa[(2 * nc, cols - 1)] = 1.0;
            sb[2 * nc] = 1.0;
            // Objective: maximize sigma^T (B z)_S  =>  minimize the negative.
            let mut sc = vec![0.0; cols];
            for b in 0..k {
                let mut coef = 0.0;
                for (si, &j) in support.iter().enumerate() {
                    coef += sigma[si] * basis[b][j];
                }
                sc[b] = -coef;
                sc[k + b] = coef;
            }
            let sol = solve_standard_form(&sc, &sa, &sb, &tol, 200_000)?;
            lp_count += 1;
            match sol.status {
                LpStatus::Optimal => {
                    let value = -sol.objective;
                    if value > rho {
                        rho = value;
                        let z: Vec<f64> = (0..k).map(|b| sol.x[b] - sol.x[k + b]).collect();
                        witness = Some(NspWitness {
                            v: kernel_combination(&basis, &z, n_cols),
                            support: support.clone(),
                        });
                    }
                }
                LpStatus::Unbounded => {
                    // A kernel direction supported inside S.
                    let ray = sol.ray.unwrap_or_default();
                    let z: Vec<f64> = (0..k).map(|b| ray[b] - ray[k + b]).collect();
                    return Ok(NspReport {
                        rho: f64::INFINITY,
                        witness: Some(NspWitness {
                            v: kernel_combination(&basis, &z, n_cols),
                            support,
                        }),
                        lp_count,
                        kernel_dim,
                    });
                }
                LpStatus::Infeasible => {
                    return Err(Error::Solver(
                        "NSP subproblem cannot be infeasible (z = 0 is feasible)".into(),
                    ))
                }
                LpStatus::IterationLimit => {
                    return Err(Error::Solver("NSP subproblem hit the iteration cap".into()))
                }
            }
        }
    }
    Ok(NspReport {
        rho,
        witness,
        lp_count,
        kernel_dim,
    })
}

fn kernel_combination(basis: &[Vec<f64>], z: &[f64], n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    for (b, zb) in basis.iter().zip(z) {
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi += zb * bi;
        }
    }
    v
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientSample {
    pub quotient: f64,
    pub gauge: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientConstant {
    /// `max_w quotient(A, w) / gauge(w)` over the sampled directions; the
    /// inclusion of the scaled polar inside the polytope predicts a value
    /// of at most 2 with high probability.
    pub d_hat: f64,
    pub worst_direction: Vec<f64>,
    pub samples: Vec<QuotientSample>,
    /// Set when the gauge came from an empirical direction table (a lower
    /// bound on the true support, so `d_hat` is then an upper estimate).
    pub gauge_approximate: bool,
}

/// Empirical quotient constant of `A` against the gauge whose unit ball is
/// the polar of `body`: `|||w||| = h_{conv(body)}(w)`. Directions are
/// uniform on the sphere (the zero direction cannot occur); scaling `w` is
/// immaterial by joint homogeneity of both sides.
pub fn quotient_constant(
    matrix: &crate::samplers::SampleMatrix,
    body: &StarBody,
    m_dirs: usize,
    stream: RngStream,
    tol: &Tolerances,
) -> Result<QuotientConstant> {
    if body.dim() != matrix.dim() {
        return Err(Error::Parameter(
            "body dimension does not match the sampled matrix".into(),
        ));
    }
    if m_dirs == 0 {
        return Err(Error::Parameter("need at least one direction".into()));
    }
    let a = matrix.design();
    let dirs = crate::floating::uniform_directions(matrix.dim(), m_dirs, stream);
    let mut samples = Vec::with_capacity(dirs.len());
    let mut d_hat = 0.0f64;
    let mut worst = 0usize;
    let mut approx = false;
    for (idx, w) in dirs.iter().enumerate() {
        let gauge = match body.support(w)? {
            PolarRadial::Exact(h) => h,
            PolarRadial::Approximate(h) => {
                approx = true;
                h
            }
            PolarRadial::Bounds { .. } => {
                return Err(Error::Unsupported(
                    "quotient constant needs an exact or table support function".into(),
                ))
            }
        };
        let res = quotient_norm(&a, w, QuotientMode::Symmetric, tol)?;
        let quotient = match res.status {
            SolveStatus::Optimal => res.value,
            SolveStatus::Infeasible => f64::INFINITY,
            SolveStatus::IterationLimit => {
                return Err(Error::Solver("quotient solve hit the iteration cap".into()))
            }
        };
        let ratio = quotient / gauge;
        if ratio > d_hat {
            d_hat = ratio;
            worst = idx;
        }
        samples.push(QuotientSample {
            quotient,
            gauge,
            ratio,
        });
    }
    Ok(QuotientConstant {
        d_hat,
        worst_direction: dirs[worst].clone(),
        samples,
        gauge_approximate: approx,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RecoveryMode {
    /// Equality-constrained l1 minimization on the noisy data; no noise
    /// level is supplied.
    Blind,
    /// Inequality-constrained minimization with a known noise radius.
    Informed { eta: f64 },
}

/// Per-trial sparse-recovery diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub x_sharp: Vec<f64>,
    /// `||x_sharp - x||_1`.
    pub err_l1: f64,
    /// `sigma_s(x)_1`.
    pub sigma_s: f64,
    pub s: usize,
    pub mode: RecoveryMode,
    pub noise_l2: f64,
    /// Gauge of the polar floating body at the noise vector, when a body
    /// was supplied.
    pub noise_gauge: Option<f64>,
    /// `sigma_s + noise_gauge`.
    pub bound_value: Option<f64>,
    /// `err_l1 / (sigma_s + noise_gauge)` when the denominator is positive.
    pub empirical_c: Option<f64>,
    /// `2 (1 + rho) / (1 - rho)` when a (finite, < 1) NSP constant was
    /// supplied.
    pub nsp_factor: Option<f64>,
    pub solver_status: SolveStatus,
    pub solver_iterations: usize,
}

/// One recovery trial on data `y = A x + w`.
pub fn run_recovery_trial(
    a: &Mat,
    x: &[f64],
    w: &[f64],
    mode: RecoveryMode,
    s: usize,
    body: Option<&StarBody>,
    rho: Option<f64>,
    tol: &Tolerances,
) -> Result<RecoveryReport> {
    if x.len() != a.n_cols() || w.len() != a.n_rows() {
        return Err(Error::Parameter("trial dimension mismatch".into()));
    }
    let ax = a.mul_vec(x);
    let y: Vec<f64> = ax.iter().zip(w).map(|(ai, wi)| ai + wi).collect();
    let (x_sharp, status, iterations) = match mode {
        RecoveryMode::Blind => {
            let res = basis_pursuit(a, &y, tol)?;
            (res.minimizer, res.status, res.iterations)
        }
        RecoveryMode::Informed { eta } => {
            let res = bp_denoise(a, &y, eta, 1e-6)?;
            (res.z, res.status, res.iterations)
        }
    };
    let err_l1 = x_sharp
        .iter()
        .zip(x)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>();
    let sigma_s = sparse_approx_error(x, s);
    let noise_gauge = match body {
        None => None,
        Some(b) => Some(match b.support(w)? {
            PolarRadial::Exact(h) | PolarRadial::Approximate(h) => h,
            PolarRadial::Bounds { lower, upper } => 0.5 * (lower + upper),
        }),
    };
    let bound_value = noise_gauge.map(|g| sigma_s + g);
    let empirical_c = bound_value.and_then(|b| if b > 0.0 { Some(err_l1 / b) } else { None });
    let nsp_factor = rho.and_then(|r| {
        if r.is_finite() && r < 1.0 {
            Some(2.0 * (1.0 + r) / (1.0 - r))
        } else {
            None
        }
    });
    Ok(RecoveryReport {
        x_sharp,
        err_l1,
        sigma_s,
        s,
        mode,
        noise_l2: norm2(w),
        noise_gauge,
        bound_value,
        empirical_c,
        nsp_factor,
        solver_status: status,
        solver_iterations: iterations,
    })
}
