//! Shared test oracles. Everything here is deliberately independent of the
//! solver paths it checks: brute-force enumeration and quadrature only.

#![allow(dead_code)]

use polyfloat_core::mat::Mat;

/// Solve a square linear system by Gaussian elimination with partial
/// pivoting; `None` when (numerically) singular.
pub fn solve_square(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (mut best, mut mag) = (col, m[col][col].abs());
        for r in col + 1..n {
            if m[r][col].abs() > mag {
                best = r;
                mag = m[r][col].abs();
            }
        }
        if mag < 1e-11 {
            return None;
        }
        m.swap(col, best);
        rhs.swap(col, best);
        let inv = 1.0 / m[col][col];
        for c in col..n {
            m[col][c] *= inv;
        }
        rhs[col] *= inv;
        for r in 0..n {
            if r != col && m[r][col] != 0.0 {
                let f = m[r][col];
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    Some(rhs)
}

/// Exhaustive basic-feasible-solution oracle for
/// `min ||v||_1  s.t.  A v = w` (columns split into [A | -A]): enumerate
/// every square basis, keep feasible ones, take the best objective.
/// `None` = infeasible (no basis solves the system nonnegatively).
pub fn min_l1_by_enumeration(a: &Mat, w: &[f64]) -> Option<f64> {
    let n = a.n_rows();
    let big_n = a.n_cols();
    let cols = 2 * big_n;
    let column = |j: usize| -> Vec<f64> {
        if j < big_n {
            (0..n).map(|i| a[(i, j)]).collect()
        } else {
            (0..n).map(|i| -a[(i, j - big_n)]).collect()
        }
    };
    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = (0..n).collect();
    if n > cols {
        return None;
    }
    loop {
        // Basis matrix from the current column subset.
        let bm: Vec<Vec<f64>> = (0..n)
            .map(|i| subset.iter().map(|&j| column(j)[i]).collect())
            .collect();
        if let Some(x) = solve_square(&bm, w) {
            if x.iter().all(|&v| v >= -1e-10) {
                let obj: f64 = x.iter().map(|v| v.max(0.0)).sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        // Next lexicographic subset of size n from 0..cols.
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] < cols - (n - i) {
                subset[i] += 1;
                for j in i + 1..n {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Half-space enumeration oracle for the gauge of
/// `absconv(columns of A)`: enumerate hyperplanes through n signed
/// columns, keep those supporting the hull, and evaluate
/// `max |<h, w>|`. `None` when the hull is not full-dimensional.
pub fn gauge_by_facet_enumeration(a: &Mat, w: &[f64]) -> Option<f64> {
    let n = a.n_rows();
    let big_n = a.n_cols();
    if big_n < n {
        return None;
    }
    let cols: Vec<Vec<f64>> = (0..big_n).map(|j| a.col(j)).collect();
    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        // All sign choices for the selected columns, first sign fixed: a
        // facet normal h and -h carry the same |<h, w>|.
        for pattern in 0..(1u64 << (n - 1)) {
            let rows: Vec<Vec<f64>> = subset
                .iter()
                .enumerate()
                .map(|(pos, &j)| {
                    let sign = if pos > 0 && (pattern >> (pos - 1)) & 1 == 1 {
                        -1.0
                    } else {
                        1.0
                    };
                    cols[j].iter().map(|v| sign * v).collect()
                })
                .collect();
            if let Some(h) = solve_square(&rows, &vec![1.0; n]) {
                let sup = cols
                    .iter()
                    .map(|c| c.iter().zip(&h).map(|(ci, hi)| ci * hi).sum::<f64>().abs())
                    .fold(0.0f64, f64::max);
                if sup <= 1.0 + 1e-9 {
                    let val = w.iter().zip(&h).map(|(wi, hi)| wi * hi).sum::<f64>().abs();
                    best = Some(best.map_or(val, |b: f64| b.max(val)));
                }
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] < big_n - (n - i) {
                subset[i] += 1;
                for j in i + 1..n {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Exhaustive basic-feasible-solution oracle for a general standard-form
/// LP `min c^T x  s.t.  A x = b, x >= 0`: `None` = infeasible or the
/// objective is unbounded over the feasible bases... more precisely,
/// `None` when no feasible basis exists; the caller pairs it with the
/// solver's own unbounded/infeasible verdict.
pub fn lp_min_by_enumeration(c: &[f64], a: &Mat, b: &[f64]) -> Option<f64> {
    let n = a.n_rows();
    let cols = a.n_cols();
    if n > cols {
        return None;
    }
    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let bm: Vec<Vec<f64>> = (0..n)
            .map(|i| subset.iter().map(|&j| a[(i, j)]).collect())
            .collect();
        if let Some(x) = solve_square(&bm, b) {
            if x.iter().all(|&v| v >= -1e-10) {
                let obj: f64 = x.iter().zip(&subset).map(|(v, &j)| v.max(0.0) * c[j]).sum();
                best = Some(best.map_or(obj, |bst: f64| bst.min(obj)));
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if subset[i] < cols - (n - i) {
                subset[i] += 1;
                for j in i + 1..n {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Boundary-scan oracle for `min ||z||_1 s.t. ||A z - y|| <= eta` with
/// exactly two rows.
///
/// Either z = 0 is feasible, or the optimum sits on the constraint
/// boundary `A z = y + eta u(phi)` for some angle phi; and for a fixed
/// right-hand side the l1 minimizer can be taken at a vertex with at most
/// two nonzeros. So the exhaustive search is: single columns (closed-form
/// quadratic), plus every invertible column pair swept over phi with local
/// refinement.
pub fn denoise_by_boundary_scan(a: &Mat, y: &[f64], eta: f64) -> f64 {
    assert_eq!(a.n_rows(), 2, "oracle is specific to two measurement rows");
    let n_cols = a.n_cols();
    let y_norm = (y[0] * y[0] + y[1] * y[1]).sqrt();
    if y_norm <= eta {
        return 0.0;
    }
    let mut best = f64::INFINITY;

    // Single-column faces: || a_j t - y ||^2 = eta^2 is a quadratic in t.
    for j in 0..n_cols {
        let col = a.col(j);
        let qa = col[0] * col[0] + col[1] * col[1];
        if qa < 1e-14 {
            continue;
        }
        let qb = -2.0 * (col[0] * y[0] + col[1] * y[1]);
        let qc = y_norm * y_norm - eta * eta;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let root = disc.sqrt();
            for t in [(-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)] {
                best = best.min(t.abs());
            }
        }
    }

    // Column-pair faces: z_T = A_T^{-1} (y + eta u(phi)), scanned in phi.
    for j in 0..n_cols {
        for k in j + 1..n_cols {
            let cj = a.col(j);
            let ck = a.col(k);
            let det = cj[0] * ck[1] - cj[1] * ck[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let objective = |phi: f64| -> f64 {
                let b0 = y[0] + eta * phi.cos();
                let b1 = y[1] + eta * phi.sin();
                let zj = (b0 * ck[1] - b1 * ck[0]) / det;
                let zk = (cj[0] * b1 - cj[1] * b0) / det;
                zj.abs() + zk.abs()
            };
            let coarse = 8192usize;
            let mut center = 0.0f64;
            let mut local = f64::INFINITY;
            for i in 0..coarse {
                let phi = 2.0 * std::f64::consts::PI * i as f64 / coarse as f64;
                let v = objective(phi);
                if v < local {
                    local = v;
                    center = phi;
                }
            }
            let mut span = 2.0 * std::f64::consts::PI / coarse as f64;
            for _ in 0..14 {
                for i in 0..33 {
                    let phi = center - span + 2.0 * span * i as f64 / 32.0;
                    let v = objective(phi);
                    if v < local {
                        local = v;
                        center = phi;
                    }
                }
                span *= 0.25;
            }
            best = best.min(local);
        }
    }
    best
}

/// Two-sample Kolmogorov-Smirnov distance (sorts in place). Ties are
/// consumed on both sides before the gap is evaluated, so atomic laws are
/// handled correctly.
pub fn ks_distance(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut d = 0.0f64;
    while i < a.len() || j < b.len() {
        let v = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Standard normal CDF by Simpson quadrature of the density (an oracle
/// independent of the quantile code).
pub fn normal_cdf_quadrature(z: f64) -> f64 {
    let steps = 4000;
    let h = z / steps as f64;
    let dens = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = dens(0.0) + dens(z);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * dens(i as f64 * h);
    }
    0.5 + acc * h / 3.0
}

/// Cauchy(scale 1/2) CDF in closed form.
pub fn cauchy_half_cdf(x: f64) -> f64 {
    0.5 + (2.0 * x).atan() / std::f64::consts::PI
}
