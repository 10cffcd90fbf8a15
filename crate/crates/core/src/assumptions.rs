//! Empirical estimation of the non-degeneracy constants behind the main
//! inclusion (small-ball and L_r conditions with respect to a working
//! norm), the moment-regularity constant, and stochastic-domination checks
//! between pairs of random vectors.
//!
//! Every comparison that can produce a "violation" uses plain Hoeffding
//! bands at the 95% level, Bonferroni-corrected across the whole grid, and
//! calls a violation confident only when the two intervals separate.
//! Corroboration, not proof.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::lq_norm;
use crate::error::{Error, Result};
use crate::floating::{estimate_floating_body, RadialEstimate};
use crate::rng::{Rng, RngStream};
use crate::samplers::DistributionSpec;

fn normalize_in(directions: &[Vec<f64>], q: f64) -> Result<Vec<Vec<f64>>> {
    directions
        .iter()
        .map(|t| {
            let norm = lq_norm(t, q)?;
            if !(norm > 0.0) {
                return Err(Error::Parameter("zero direction".into()));
            }
            Ok(t.iter().map(|x| x / norm).collect())
        })
        .collect()
}

/// Two-sided Hoeffding half width at 95%, Bonferroni-corrected over
/// `cells` simultaneous estimates: `sqrt(ln(2 cells / 0.05) / (2 m))`.
pub fn hoeffding_half_width(cells: usize, m: usize) -> f64 {
    ((2.0 * cells as f64 / 0.05).ln() / (2.0 * m as f64)).sqrt()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmallBallEstimate {
    /// `min_t P(|<X,t>| >= gamma ||t||)` over the tested directions.
    pub delta_hat: f64,
    pub half_width: f64,
    pub worst_direction: Vec<f64>,
    pub per_direction: Vec<f64>,
    pub gamma: f64,
}

/// Estimate the small-ball constant `delta` at threshold `gamma` with
/// respect to the `l_q` working norm. `gamma = 0` is the degenerate
/// threshold and gives `delta_hat = 1`.
pub fn estimate_small_ball(
    spec: &DistributionSpec,
    norm_q: f64,
    gamma: f64,
    directions: &[Vec<f64>],
    m: usize,
    stream: RngStream,
) -> Result<SmallBallEstimate> {
    spec.validate()?;
    if gamma < 0.0 || gamma.is_nan() {
        return Err(Error::Parameter(format!("gamma = {gamma} must be >= 0")));
    }
    if directions.is_empty() || m == 0 {
        return Err(Error::Parameter("need directions and samples".into()));
    }
    let dirs = normalize_in(directions, norm_q)?;
    let per_direction: Vec<f64> = dirs
        .par_iter()
        .enumerate()
        .map(|(idx, t)| {
            let mut rng = stream.substream(idx as u64).rng();
            let mut scratch = vec![0.0; spec.dim];
            let hits = (0..m)
                .filter(|_| spec.sample_marginal(&mut rng, t, &mut scratch).abs() >= gamma)
                .count();
            hits as f64 / m as f64
        })
        .collect();
    let (worst_idx, &delta_hat) = per_direction
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    Ok(SmallBallEstimate {
        delta_hat,
        half_width: hoeffding_half_width(dirs.len(), m),
        worst_direction: dirs[worst_idx].clone(),
        per_direction,
        gamma,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LrEstimate {
    /// `max_t (E |<X,t>|^r)^{1/r} / ||t||` over the tested directions.
    pub l_hat: f64,
    /// Delta-method three-sigma half width at the worst direction.
    pub half_width: f64,
    pub worst_direction: Vec<f64>,
    pub per_direction: Vec<f64>,
    pub r: f64,
}

/// Estimate the `L_r` constant with respect to the `l_q` working norm.
/// `r` must sit strictly below the family's moment barrier.
pub fn estimate_lr(
    spec: &DistributionSpec,
    norm_q: f64,
    r: f64,
    directions: &[Vec<f64>],
    m: usize,
    stream: RngStream,
) -> Result<LrEstimate> {
    spec.validate()?;
    if !(r > 0.0) {
        return Err(Error::Parameter(format!(
            "moment order r = {r} must be > 0"
        )));
    }
    let barrier = spec.moment_barrier();
    if r >= barrier {
        return Err(Error::MomentBarrier {
            what: format!("{:?}", spec.family),
            order: r,
            barrier,
        });
    }
    if directions.is_empty() || m == 0 {
        return Err(Error::Parameter("need directions and samples".into()));
    }
    let dirs = normalize_in(directions, norm_q)?;
    let stats: Vec<(f64, f64)> = dirs
        .par_iter()
        .enumerate()
        .map(|(idx, t)| {
            let mut rng = stream.substream(idx as u64).rng();
            let mut scratch = vec![0.0; spec.dim];
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..m {
                let xr = spec
                    .sample_marginal(&mut rng, t, &mut scratch)
                    .abs()
                    .powf(r);
                sum += xr;
                sumsq += xr * xr;
            }
            let mean = sum / m as f64;
            let var = (sumsq / m as f64 - mean * mean).max(0.0);
            let norm = mean.powf(1.0 / r);
            let half = if mean > 0.0 {
                3.0 * norm * (var / m as f64).sqrt() / (r * mean)
            } else {
                f64::INFINITY
            };
            (norm, half)
        })
        .collect();
    let (worst_idx, &(l_hat, half_width)) = stats
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .expect("nonempty");
    Ok(LrEstimate {
        l_hat,
        half_width,
        worst_direction: dirs[worst_idx].clone(),
        per_direction: stats.iter().map(|s| s.0).collect(),
        r,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularityEstimate {
    /// `max over (direction, q in grid) of ||<X,t>||_{2q} / ||<X,t>||_q`.
    pub d_hat: f64,
    pub worst_direction: Vec<f64>,
    pub worst_q: f64,
    /// Ratio per (direction, q) cell, direction-major.
    pub ratios: Vec<f64>,
}

/// Estimate the moment-regularity constant over a grid of exponents
/// (each `q >= 2`, each `2q` below the moment barrier). Moments at `q` and
/// `2q` share the same samples per direction.
pub fn regularity_constant(
    spec: &DistributionSpec,
    q_grid: &[f64],
    directions: &[Vec<f64>],
    m: usize,
    stream: RngStream,
) -> Result<RegularityEstimate> {
    spec.validate()?;
    if q_grid.is_empty() || directions.is_empty() || m == 0 {
        return Err(Error::Parameter(
            "need a grid, directions and samples".into(),
        ));
    }
    for &q in q_grid {
        if !(q >= 2.0) {
            return Err(Error::Parameter(format!(
                "regularity grid needs q >= 2, got {q}"
            )));
        }
        let barrier = spec.moment_barrier();
        if 2.0 * q >= barrier {
            return Err(Error::MomentBarrier {
                what: format!("{:?} at grid point q = {q}", spec.family),
                order: 2.0 * q,
                barrier,
            });
        }
    }
    let dirs = normalize_in(directions, 2.0)?;
    let per_dir: Vec<Vec<f64>> = dirs
        .par_iter()
        .enumerate()
        .map(|(idx, t)| {
            let mut rng = stream.substream(idx as u64).rng();
            let mut scratch = vec![0.0; spec.dim];
            let samples: Vec<f64> = (0..m)
                .map(|_| spec.sample_marginal(&mut rng, t, &mut scratch).abs())
                .collect();
            q_grid
                .iter()
                .map(|&q| {
                    let mq: f64 = samples.iter().map(|x| x.powf(q)).sum::<f64>() / m as f64;
                    let m2q: f64 = samples.iter().map(|x| x.powf(2.0 * q)).sum::<f64>() / m as f64;
                    m2q.powf(1.0 / (2.0 * q)) / mq.powf(1.0 / q)
                })
                .collect()
        })
        .collect();
    let mut d_hat = f64::NEG_INFINITY;
    let mut worst = (0usize, 0usize);
    let mut ratios = Vec::with_capacity(dirs.len() * q_grid.len());
    for (di, row) in per_dir.iter().enumerate() {
        for (qi, &ratio) in row.iter().enumerate() {
            if ratio > d_hat {
                d_hat = ratio;
                worst = (di, qi);
            }
            ratios.push(ratio);
        }
    }
    Ok(RegularityEstimate {
        d_hat,
        worst_direction: dirs[worst.0].clone(),
        worst_q: q_grid[worst.1],
        ratios,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DominationCell {
    pub direction: usize,
    pub u: f64,
    /// `P(<X,t> >= u)`.
    pub p_x: f64,
    /// `P(<Y,t> >= lambda2 u)`.
    pub p_y: f64,
    /// `p_x - lambda1 p_y` (negative = pointwise violation).
    pub margin: f64,
    /// Violation with separated Hoeffding intervals.
    pub confident: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DominationReport {
    pub cells: Vec<DominationCell>,
    pub confident_violations: usize,
    pub half_width: f64,
}

/// Core of the domination check, generic over the two samplers.
pub fn domination_check_with<FX, FY>(
    dim: usize,
    sample_x: FX,
    sample_y: FY,
    lambda1: f64,
    lambda2: f64,
    directions: &[Vec<f64>],
    u_grid: &[f64],
    m: usize,
    stream: RngStream,
) -> Result<DominationReport>
where
    FX: Fn(&mut Rng, &mut [f64]) + Sync,
    FY: Fn(&mut Rng, &mut [f64]) + Sync,
{
    if !(lambda1 > 0.0 && lambda1 <= 1.0) {
        return Err(Error::Parameter(format!(
            "lambda1 = {lambda1} must lie in (0, 1]"
        )));
    }
    if !(lambda2 > 0.0) {
        return Err(Error::Parameter(format!("lambda2 = {lambda2} must be > 0")));
    }
    if directions.is_empty() || u_grid.is_empty() || m == 0 {
        return Err(Error::Parameter(
            "need directions, a u grid and samples".into(),
        ));
    }
    let dirs = normalize_in(directions, 2.0)?;
    let half = hoeffding_half_width(2 * dirs.len() * u_grid.len(), m);
    let cells: Vec<Vec<DominationCell>> = dirs
        .par_iter()
        .enumerate()
        .map(|(idx, t)| {
            let mut rng_x = stream.substream(2 * idx as u64).rng();
            let mut rng_y = stream.substream(2 * idx as u64 + 1).rng();
            let mut scratch = vec![0.0; dim];
            let mut xs: Vec<f64> = (0..m)
                .map(|_| {
                    sample_x(&mut rng_x, &mut scratch);
                    crate::mat::dot(&scratch, t)
                })
                .collect();
            let mut ys: Vec<f64> = (0..m)
                .map(|_| {
                    sample_y(&mut rng_y, &mut scratch);
                    crate::mat::dot(&scratch, t)
                })
                .collect();
            xs.sort_unstable_by(f64::total_cmp);
            ys.sort_unstable_by(f64::total_cmp);
            let tail = |sorted: &[f64], thr: f64| -> f64 {
                let pos = sorted.partition_point(|&v| v < thr);
                (m - pos) as f64 / m as f64
            };
            u_grid
                .iter()
                .map(|&u| {
                    let p_x = tail(&xs, u);
                    let p_y = tail(&ys, lambda2 * u);
                    let margin = p_x - lambda1 * p_y;
                    let confident = p_x + half < lambda1 * (p_y - half);
                    DominationCell {
                        direction: idx,
                        u,
                        p_x,
                        p_y,
                        margin,
                        confident,
                    }
                })
                .collect()
        })
        .collect();
    let cells: Vec<DominationCell> = cells.into_iter().flatten().collect();
    let confident_violations = cells.iter().filter(|c| c.confident).count();
    Ok(DominationReport {
        cells,
        confident_violations,
        half_width: half,
    })
}

/// Check whether `X` dominates `Y` with constants `(lambda1, lambda2)`:
/// `P(<X,t> >= u) >= lambda1 P(<Y,t> >= lambda2 u)` over the grid.
/// Only confidently separated violations are counted.
pub fn domination_check(
    spec_x: &DistributionSpec,
    spec_y: &DistributionSpec,
    lambda1: f64,
    lambda2: f64,
    directions: &[Vec<f64>],
    u_grid: &[f64],
    m: usize,
    stream: RngStream,
) -> Result<DominationReport> {
    spec_x.validate()?;
    spec_y.validate()?;
    if spec_x.dim != spec_y.dim {
        return Err(Error::Parameter(
            "dimension mismatch between X and Y".into(),
        ));
    }
    domination_check_with(
        spec_x.dim,
        |rng, out| spec_x.sample_into(rng, out),
        |rng, out| spec_y.sample_into(rng, out),
        lambda1,
        lambda2,
        directions,
        u_grid,
        m,
        stream,
    )
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UncondEntry {
    pub direction: usize,
    /// Radial of the floating body of `X`.
    pub r_x: f64,
    /// `(c(delta)/gamma) *` radial of the Rademacher floating body.
    pub bound: f64,
    pub confident_violation: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UncondReport {
    pub c_delta: f64,
    /// `c(delta) / gamma`.
    pub factor: f64,
    pub entries: Vec<UncondEntry>,
    pub confident_violations: usize,
}

/// The explicit unconditional-comparison constant
/// `c(delta) = sqrt(2) e (4 log(8/delta) + log(4/e)) / delta`.
pub fn uncond_constant(delta: f64) -> f64 {
    (2.0f64).sqrt()
        * std::f64::consts::E
        * (4.0 * (8.0 / delta).ln() + (4.0 / std::f64::consts::E).ln())
        / delta
}

/// For an unconditional `X` with coordinate small-ball constants
/// `(gamma_hat, delta_hat)`, check `K_p(X) subset (c(delta)/gamma) K_p(E)`
/// direction-wise against a Rademacher estimate, with order-statistic
/// bands on both sides.
pub fn unconditional_comparison(
    spec_x: &DistributionSpec,
    p: f64,
    gamma_hat: f64,
    delta_hat: f64,
    directions: &[Vec<f64>],
    m: usize,
    stream: RngStream,
) -> Result<UncondReport> {
    spec_x.validate()?;
    if !(gamma_hat > 0.0) || !(delta_hat > 0.0 && delta_hat <= 1.0) {
        return Err(Error::Parameter(
            "need gamma_hat > 0 and delta_hat in (0, 1]".into(),
        ));
    }
    let gate = 4.0 * (8.0 / delta_hat).ln() + (4.0f64).ln();
    if !(p > gate) {
        return Err(Error::Precondition(format!(
            "comparison needs p > 4 log(8/delta) + log 4 = {gate}, got p = {p}"
        )));
    }
    let c_delta = uncond_constant(delta_hat);
    let factor = c_delta / gamma_hat;
    let kx = estimate_floating_body(spec_x, p, directions, m, stream.substream(1))?;
    let spec_e = DistributionSpec::rademacher(spec_x.dim);
    let ke = estimate_floating_body(&spec_e, p, directions, m, stream.substream(2))?;
    let entries: Vec<UncondEntry> = kx
        .radials
        .iter()
        .zip(&ke.radials)
        .enumerate()
        .map(
            |(idx, (rx, re)): (usize, (&RadialEstimate, &RadialEstimate))| {
                let bound = factor * re.value;
                let confident_violation = rx.ci_lo > factor * re.ci_hi;
                UncondEntry {
                    direction: idx,
                    r_x: rx.value,
                    bound,
                    confident_violation,
                }
            },
        )
        .collect();
    let confident_violations = entries.iter().filter(|e| e.confident_violation).count();
    Ok(UncondReport {
        c_delta,
        factor,
        entries,
        confident_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floating::{axis_directions, uniform_directions};
    use crate::samplers::Family;

    #[test]
    fn small_ball_rademacher_axis_is_one() {
        let spec = DistributionSpec::rademacher(3);
        let est = estimate_small_ball(
            &spec,
            2.0,
            1.0,
            &[vec![1.0, 0.0, 0.0]],
            10_000,
            RngStream::new(1, 0),
        )
        .unwrap();
        assert_eq!(est.delta_hat, 1.0);
    }

    #[test]
    fn small_ball_degenerate_threshold() {
        let spec = DistributionSpec::gaussian(2);
        let est = estimate_small_ball(
            &spec,
            2.0,
            0.0,
            &uniform_directions(2, 4, RngStream::new(2, 0)),
            5_000,
            RngStream::new(3, 0),
        )
        .unwrap();
        assert_eq!(est.delta_hat, 1.0);
        assert!(matches!(
            estimate_small_ball(
                &spec,
                2.0,
                -0.5,
                &[vec![1.0, 0.0]],
                100,
                RngStream::new(4, 0)
            ),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn small_ball_cauchy_matches_closed_form_tail() {
        // l1 working norm: <X, t> ~ ||t||_1 xi, so the probability is
        // P(|xi| >= 0.1) = 1 - (2/pi) atan(0.2).
        let spec = DistributionSpec::stable(1.0, 4);
        let expected = 1.0 - (2.0 / std::f64::consts::PI) * (0.2f64).atan();
        let est = estimate_small_ball(
            &spec,
            1.0,
            0.1,
            &uniform_directions(4, 8, RngStream::new(5, 0)),
            200_000,
            RngStream::new(6, 0),
        )
        .unwrap();
        assert!(
            (est.delta_hat - expected).abs() < est.half_width + 0.01,
            "delta {} vs {expected}",
            est.delta_hat
        );
        assert!((expected - 0.87433).abs() < 1e-5);
    }

    #[test]
    fn small_ball_monotone_in_gamma_on_shared_stream() {
        let spec = DistributionSpec::gaussian(3);
        let dirs = uniform_directions(3, 6, RngStream::new(7, 0));
        let d1 = estimate_small_ball(&spec, 2.0, 0.3, &dirs, 20_000, RngStream::new(8, 0))
            .unwrap()
            .delta_hat;
        let d2 = estimate_small_ball(&spec, 2.0, 0.6, &dirs, 20_000, RngStream::new(8, 0))
            .unwrap()
            .delta_hat;
        assert!(d2 <= d1);
    }

    #[test]
    fn lr_gaussian_and_rademacher_unit_variance() {
        for spec in [
            DistributionSpec::gaussian(4),
            DistributionSpec::rademacher(4),
        ] {
            let est = estimate_lr(
                &spec,
                2.0,
                2.0,
                &uniform_directions(4, 6, RngStream::new(9, 0)),
                100_000,
                RngStream::new(10, 0),
            )
            .unwrap();
            assert!(
                (est.l_hat - 1.0).abs() < 0.02,
                "{:?}: L = {}",
                spec.family,
                est.l_hat
            );
        }
    }

    #[test]
    fn lr_monotone_in_r_on_shared_stream() {
        let spec = DistributionSpec::gaussian(3);
        let dirs = uniform_directions(3, 4, RngStream::new(11, 0));
        let l1 = estimate_lr(&spec, 2.0, 1.0, &dirs, 50_000, RngStream::new(12, 0))
            .unwrap()
            .l_hat;
        let l2 = estimate_lr(&spec, 2.0, 2.0, &dirs, 50_000, RngStream::new(12, 0))
            .unwrap()
            .l_hat;
        assert!(l2 >= l1);
    }

    #[test]
    fn lr_cauchy_half_moment_is_direction_free() {
        // F1: with the l1 norm, every direction has the same scalar moment,
        // (E |xi|^{1/2})^2.
        let spec = DistributionSpec::stable(1.0, 3);
        let est = estimate_lr(
            &spec,
            1.0,
            0.5,
            &uniform_directions(3, 6, RngStream::new(13, 0)),
            200_000,
            RngStream::new(14, 0),
        )
        .unwrap();
        assert!(est.l_hat.is_finite());
        let spread = est
            .per_direction
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        assert!(
            (spread.1 - spread.0) / est.l_hat < 0.10,
            "direction spread {spread:?}"
        );
        // At the barrier the moment does not exist.
        assert!(matches!(
            estimate_lr(
                &spec,
                1.0,
                1.0,
                &[vec![1.0, 0.0, 0.0]],
                100,
                RngStream::new(15, 0)
            ),
            Err(Error::MomentBarrier { .. })
        ));
    }

    #[test]
    fn regularity_gaussian_fourth_over_second() {
        let spec = DistributionSpec::gaussian(3);
        let est = regularity_constant(
            &spec,
            &[2.0],
            &uniform_directions(3, 4, RngStream::new(16, 0)),
            200_000,
            RngStream::new(17, 0),
        )
        .unwrap();
        let expected = 3f64.powf(0.25);
        assert!(
            (est.d_hat - expected).abs() / expected < 0.03,
            "D = {} vs {expected}",
            est.d_hat
        );
    }

    #[test]
    fn regularity_ratios_at_least_one() {
        // Lyapunov: moment norms are nondecreasing in the order.
        for family in [Family::Gaussian, Family::Rademacher, Family::LogConcaveExp] {
            let spec = DistributionSpec::new(family, 3);
            let est = regularity_constant(
                &spec,
                &[2.0, 3.0],
                &uniform_directions(3, 3, RngStream::new(18, 0)),
                50_000,
                RngStream::new(19, 0),
            )
            .unwrap();
            for &ratio in &est.ratios {
                assert!(ratio >= 1.0 - 1e-3, "ratio {ratio}");
            }
        }
    }

    #[test]
    fn regularity_log_concave_within_borell_bound() {
        let spec = DistributionSpec::new(Family::LogConcaveExp, 4);
        let est = regularity_constant(
            &spec,
            &[2.0, 4.0, 8.0],
            &uniform_directions(4, 6, RngStream::new(20, 0)),
            150_000,
            RngStream::new(21, 0),
        )
        .unwrap();
        assert!(est.d_hat <= 24.0, "D = {}", est.d_hat);
    }

    #[test]
    fn regularity_reports_offending_grid_point() {
        let spec = DistributionSpec::stable(1.0, 2);
        assert!(matches!(
            regularity_constant(&spec, &[2.0], &[vec![1.0, 0.0]], 100, RngStream::new(22, 0)),
            Err(Error::MomentBarrier { .. })
        ));
    }

    #[test]
    fn domination_self_holds() {
        let spec = DistributionSpec::gaussian(3);
        let report = domination_check(
            &spec,
            &spec,
            1.0,
            1.0,
            &uniform_directions(3, 5, RngStream::new(23, 0)),
            &[0.25, 0.5, 1.0, 2.0],
            50_000,
            RngStream::new(24, 0),
        )
        .unwrap();
        assert_eq!(report.confident_violations, 0);
    }

    #[test]
    fn domination_fails_against_scaled_gaussian() {
        // Y = 10 X has much heavier reach: X cannot dominate it with
        // lambda = 1 at moderate thresholds.
        let spec = DistributionSpec::gaussian(2);
        let report = domination_check_with(
            2,
            |rng, out| spec.sample_into(rng, out),
            |rng, out| {
                spec.sample_into(rng, out);
                for v in out.iter_mut() {
                    *v *= 10.0;
                }
            },
            1.0,
            1.0,
            &uniform_directions(2, 4, RngStream::new(25, 0)),
            &[1.0, 2.0],
            50_000,
            RngStream::new(26, 0),
        )
        .unwrap();
        assert!(report.confident_violations > 0);
    }

    #[test]
    fn domination_scalar_rademacher_comparison() {
        // A symmetric x with P(|x| >= gamma0) >= delta0 dominates the
        // Rademacher tail: P(x >= u) >= delta0 P(eps > u / gamma0).
        let spec = DistributionSpec::gaussian(1);
        let gamma0 = 1.0;
        let delta0 = 0.31; // slightly below P(|g| >= 1) = 0.3173
        let rad = DistributionSpec::rademacher(1);
        let report = domination_check(
            &spec,
            &rad,
            delta0,
            1.0 / gamma0,
            &[vec![1.0]],
            &[0.1, 0.5, 0.9, 1.1, 2.0],
            100_000,
            RngStream::new(27, 0),
        )
        .unwrap();
        assert_eq!(report.confident_violations, 0);
    }

    #[test]
    fn unconditional_gate_and_self_comparison() {
        let spec = DistributionSpec::rademacher(4);
        let dirs = axis_directions(4);
        // Gate: delta = 1 needs p > 4 ln 8 + ln 4 ~ 9.70.
        assert!(matches!(
            unconditional_comparison(&spec, 5.0, 1.0, 1.0, &dirs, 10_000, RngStream::new(28, 0)),
            Err(Error::Precondition(_))
        ));
        let p = 10.0;
        let m = crate::floating::required_samples(p);
        let report =
            unconditional_comparison(&spec, p, 1.0, 1.0, &dirs, m, RngStream::new(29, 0)).unwrap();
        assert_eq!(report.confident_violations, 0);
        assert!(report.c_delta > 1.0);
    }
}
