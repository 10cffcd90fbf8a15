//! Monte Carlo estimation of the floating body `K_p(X)`, the moment ball
//! `B(L_p(X))`, and the centroid-body reading of the same table, together
//! with the sandwich and moment-equivalence diagnostics.
//!
//! The radial estimator at a direction `theta` is `1 / Q` where `Q` is the
//! upper order statistic of rank `ceil((1 - exp(-p)) m)` of `m` draws of
//! `<X, theta>`. This rank convention is deliberately conservative: it
//! biases the radial downward, which is the safe side for verifying
//! inclusions of the polar body. For atomic laws the target quantile and
//! the radial function can disagree at atoms, so quantitative checks on,
//! e.g., the Rademacher vector should use levels strictly between atoms.
//!
//! Confidence intervals on radials are distribution-free, from the order
//! statistics at ranks `k -+ 3 sqrt(m u (1-u))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

use crate::bodies::{lq_norm, StarBody};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::samplers::DistributionSpec;

/// Smallest admissible sample count for level `p`: at least 100 expected
/// samples beyond the quantile.
pub fn required_samples(p: f64) -> usize {
    (100.0 * p.exp()).ceil() as usize
}

/// Default sample count: `max(10^5, required_samples(p))`.
pub fn default_samples(p: f64) -> usize {
    required_samples(p).max(100_000)
}

/// A per-direction radial estimate with an order-statistic confidence band.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RadialEstimate {
    /// `1 / Q`, the estimated radial value.
    pub value: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// The estimated marginal quantile `Q` itself.
    pub quantile: f64,
}

/// An estimated floating body: an empirical star body plus the metadata
/// needed to reproduce and band it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FloatingBodyEstimate {
    pub body: StarBody,
    /// Parallel to the body's direction table.
    pub radials: Vec<RadialEstimate>,
    pub p: f64,
    pub m: usize,
    pub spec: DistributionSpec,
    /// `1 - exp(-p)`.
    pub quantile_level: f64,
    pub stream: RngStream,
}

/// Radial estimator core on an ascending-sorted marginal sample, at a
/// general threshold `a`: the radial of `{t : P(<X,t> >= a) <= exp(-p)}`
/// along the sampled direction is exactly `a / Q`, so rescaling the
/// threshold rescales the output by the same factor.
pub fn radial_from_sorted(sorted: &[f64], p: f64, threshold: f64) -> Result<RadialEstimate> {
    let m = sorted.len();
    let level = 1.0 - (-p).exp();
    let rank = ((level * m as f64).ceil() as usize).clamp(1, m);
    let q = sorted[rank - 1];
    if q <= 0.0 {
        return Err(Error::OutOfModel { quantile: q });
    }
    let half = (3.0 * (m as f64 * level * (1.0 - level)).sqrt()).ceil() as usize;
    let lo_rank = rank.saturating_sub(half).max(1);
    let hi_rank = (rank + half).min(m);
    let q_lo = sorted[lo_rank - 1];
    let q_hi = sorted[hi_rank - 1];
    let ci_hi = if q_lo > 0.0 {
        threshold / q_lo
    } else {
        f64::INFINITY
    };
    Ok(RadialEstimate {
        value: threshold / q,
        ci_lo: threshold / q_hi,
        ci_hi,
        quantile: q,
    })
}

fn marginal_samples(
    spec: &DistributionSpec,
    theta: &[f64],
    m: usize,
    stream: RngStream,
) -> Vec<f64> {
    let mut rng = stream.rng();
    let mut scratch = vec![0.0; spec.dim];
    let mut samples: Vec<f64> = (0..m)
        .map(|_| spec.sample_marginal(&mut rng, theta, &mut scratch))
        .collect();
    samples.sort_unstable_by(f64::total_cmp);
    samples
}

/// Estimate the floating-body radial `r(theta) = 1/Q` at one direction.
pub fn estimate_radial(
    spec: &DistributionSpec,
    theta: &[f64],
    p: f64,
    m: usize,
    stream: RngStream,
) -> Result<RadialEstimate> {
    spec.validate()?;
    if theta.len() != spec.dim {
        return Err(Error::Parameter("direction/dimension mismatch".into()));
    }
    if !(p > 0.0) {
        return Err(Error::Parameter(format!("level p = {p} must be positive")));
    }
    let required = required_samples(p);
    if m < required {
        return Err(Error::SamplesTooFew { required, given: m });
    }
    let sorted = marginal_samples(spec, theta, m, stream);
    radial_from_sorted(&sorted, p, 1.0)
}

/// Estimate `K_p(X)` over a set of directions, one fresh substream per
/// direction. Parallel execution over directions does not change the
/// result: each direction's stream is fixed by its index.
pub fn estimate_floating_body(
    spec: &DistributionSpec,
    p: f64,
    directions: &[Vec<f64>],
    m: usize,
    stream: RngStream,
) -> Result<FloatingBodyEstimate> {
    spec.validate()?;
    if directions.is_empty() {
        return Err(Error::Parameter("need at least one direction".into()));
    }
    if !(p > 0.0) {
        return Err(Error::Parameter(format!("level p = {p} must be positive")));
    }
    let required = required_samples(p);
    if m < required {
        return Err(Error::SamplesTooFew { required, given: m });
    }
    let outcomes: Vec<Result<RadialEstimate>> = directions
        .par_iter()
        .enumerate()
        .map(|(idx, theta)| {
            if theta.len() != spec.dim {
                return Err(Error::Parameter("direction/dimension mismatch".into()));
            }
            let sorted = marginal_samples(spec, theta, m, stream.substream(idx as u64));
            radial_from_sorted(&sorted, p, 1.0)
        })
        .collect();
    let mut failures = Vec::new();
    let mut radials = Vec::with_capacity(directions.len());
    for (idx, out) in outcomes.into_iter().enumerate() {
        match out {
            Ok(est) => radials.push(est),
            Err(e) => failures.push((idx, e)),
        }
    }
    if !failures.is_empty() {
        return Err(Error::DirectionFailures(failures));
    }
    let entries: Vec<(Vec<f64>, f64)> = directions
        .iter()
        .zip(&radials)
        .map(|(theta, est)| (theta.clone(), est.value))
        .collect();
    Ok(FloatingBodyEstimate {
        body: StarBody::empirical(entries, spec.dim)?,
        radials,
        p,
        m,
        spec: spec.clone(),
        quantile_level: 1.0 - (-p).exp(),
        stream,
    })
}

/// A per-direction `L_p` moment-norm estimate with a delta-method band.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MomentEstimate {
    /// `|| <X, theta> ||_{L_p}`; read as the support function of `Z_p(X)`.
    pub norm: f64,
    /// Three-sigma half width on `norm`.
    pub half_width: f64,
    /// `1 / norm`, the radial of `B(L_p(X))`.
    pub radial: f64,
}

/// An estimated moment ball `B(L_p(X))`; the same table read as a support
/// function `h(theta) = || <X, theta> ||_{L_p}` describes the centroid body
/// `Z_p(X)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpBallEstimate {
    pub body: StarBody,
    pub moments: Vec<MomentEstimate>,
    pub p: f64,
    pub m: usize,
    pub spec: DistributionSpec,
    pub stream: RngStream,
}

/// Estimate `B(L_p(X))` over the given directions.
///
/// `p` may lie in (0, 1) — the table is then a quasi-norm ball, which the
/// moment-equivalence check needs — but the moment must exist: families
/// with a finite moment barrier reject `p` at or above it (the reason the
/// floating body, not the moment ball, is the right object for heavy
/// tails).
pub fn estimate_lp_ball(
    spec: &DistributionSpec,
    p: f64,
    directions: &[Vec<f64>],
    m: usize,
    stream: RngStream,
) -> Result<LpBallEstimate> {
    spec.validate()?;
    if directions.is_empty() {
        return Err(Error::Parameter("need at least one direction".into()));
    }
    if !(p > 0.0) {
        return Err(Error::Parameter(format!(
            "moment order p = {p} must be positive"
        )));
    }
    if m == 0 {
        return Err(Error::SamplesTooFew {
            required: 1,
            given: 0,
        });
    }
    let barrier = spec.moment_barrier();
    if p >= barrier {
        return Err(Error::MomentBarrier {
            what: format!("{:?}", spec.family),
            order: p,
            barrier,
        });
    }
    let moments: Vec<MomentEstimate> = directions
        .par_iter()
        .enumerate()
        .map(|(idx, theta)| {
            let mut rng = stream.substream(idx as u64).rng();
            let mut scratch = vec![0.0; spec.dim];
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..m {
                let x = spec.sample_marginal(&mut rng, theta, &mut scratch).abs();
                let xp = x.powf(p);
                sum += xp;
                sumsq += xp * xp;
            }
            let mean = sum / m as f64;
            let var = (sumsq / m as f64 - mean * mean).max(0.0);
            let se_mean = (var / m as f64).sqrt();
            let norm = mean.powf(1.0 / p);
            // Delta method: d(mean^{1/p}) = norm / (p * mean) d(mean).
            let half_width = if mean > 0.0 {
                3.0 * norm * se_mean / (p * mean)
            } else {
                f64::INFINITY
            };
            MomentEstimate {
                norm,
                half_width,
                radial: 1.0 / norm,
            }
        })
        .collect();
    let entries: Vec<(Vec<f64>, f64)> = directions
        .iter()
        .zip(&moments)
        .map(|(theta, mom)| (theta.clone(), mom.radial))
        .collect();
    Ok(LpBallEstimate {
        body: StarBody::empirical(entries, spec.dim)?,
        moments,
        p,
        m,
        spec: spec.clone(),
        stream,
    })
}

// ---------------------------------------------------------------------------
// Diagnostics.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandStatus {
    Inside,
    /// The whole confidence band sits outside the admissible interval.
    ConfidentViolation,
    /// The point value is outside but the band straddles the boundary.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichEntry {
    pub direction: usize,
    /// `r(theta) * ||theta||` in the working norm.
    pub value: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub status: BandStatus,
    /// Distance to the nearest bound (negative = amount violated).
    pub slack: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichReport {
    /// `(1/L) exp(-p/r)`.
    pub lower: f64,
    /// `1 / gamma`.
    pub upper: f64,
    pub entries: Vec<SandwichEntry>,
    pub confident_violations: usize,
}

/// Check the two-sided sandwich: for every stored direction,
/// `(1/L) exp(-p/r) <= radial(theta) * ||theta|| <= 1/gamma`
/// in the working norm `l_{norm_q}`. Report-only; violations count as
/// confident only when the whole order-statistic band is outside.
pub fn sandwich_check(
    est: &FloatingBodyEstimate,
    norm_q: f64,
    gamma: f64,
    delta: f64,
    l_const: f64,
    r: f64,
) -> Result<SandwichReport> {
    if !(l_const > 0.0) {
        return Err(Error::Parameter(format!("L = {l_const} must be positive")));
    }
    if !(gamma > 0.0) || !(delta > 0.0 && delta <= 1.0) || !(r > 0.0) {
        return Err(Error::Parameter(
            "need gamma > 0, delta in (0,1], r > 0".into(),
        ));
    }
    if !(est.p > (2.0 / delta).ln()) {
        return Err(Error::Precondition(format!(
            "sandwich needs p > ln(2/delta) = {}, got p = {}",
            (2.0 / delta).ln(),
            est.p
        )));
    }
    let lower = (1.0 / l_const) * (-est.p / r).exp();
    let upper = 1.0 / gamma;
    let table = est.body.table().ok_or(Error::EmptyTable)?;
    let mut entries = Vec::with_capacity(table.len());
    let mut confident = 0usize;
    for (idx, ((theta, _), rad)) in table.iter().zip(&est.radials).enumerate() {
        let wn = lq_norm(theta, norm_q)?;
        let value = rad.value * wn;
        let ci_lo = rad.ci_lo * wn;
        let ci_hi = rad.ci_hi * wn;
        let status = if value >= lower && value <= upper {
            BandStatus::Inside
        } else if ci_hi < lower || ci_lo > upper {
            confident += 1;
            BandStatus::ConfidentViolation
        } else {
            BandStatus::Inconclusive
        };
        entries.push(SandwichEntry {
            direction: idx,
            value,
            ci_lo,
            ci_hi,
            status,
            slack: (value - lower).min(upper - value),
        });
    }
    Ok(SandwichReport {
        lower,
        upper,
        entries,
        confident_violations: confident,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InclusionMargin {
    pub direction: usize,
    /// Positive margin = inclusion satisfied with room.
    pub margin: f64,
    pub status: BandStatus,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SideReport {
    Checked {
        margins: Vec<InclusionMargin>,
        confident_violations: usize,
    },
    Skipped {
        reason: String,
    },
}

impl SideReport {
    pub fn confident_violations(&self) -> usize {
        match self {
            SideReport::Checked {
                confident_violations,
                ..
            } => *confident_violations,
            SideReport::Skipped { .. } => 0,
        }
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self, SideReport::Skipped { .. })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpEquivalenceReport {
    /// `(1/e) B(L_p) subset K_p`.
    pub left: SideReport,
    /// `K_p subset 2 B(L_{c1 p})` with `c1 = 1 / (4 log(4 D / 3))`.
    pub right: SideReport,
    pub c1: f64,
}

/// Check the moment-ball equivalence at level `p` under regularity
/// constant `d_const`, on shared directions. Sides whose moment does not
/// exist are skipped with the surfaced error as the reason.
pub fn lp_equivalence_check(
    spec: &DistributionSpec,
    p: f64,
    d_const: f64,
    directions: &[Vec<f64>],
    m: usize,
    stream: RngStream,
) -> Result<LpEquivalenceReport> {
    if !(d_const >= 1.0) {
        return Err(Error::Parameter(format!(
            "regularity constant D = {d_const} must be >= 1"
        )));
    }
    let c1 = 1.0 / (4.0 * (4.0 * d_const / 3.0).ln());
    let p_min = (2.0 * c1).max(2.0 * (2.0f64).ln());
    if !(p >= p_min) {
        return Err(Error::Precondition(format!(
            "equivalence check needs p >= {p_min}, got {p}"
        )));
    }
    let kp = estimate_floating_body(
        spec,
        p,
        directions,
        default_samples(p).max(m),
        stream.substream(1),
    )?;

    let left = match estimate_lp_ball(spec, p, directions, m, stream.substream(2)) {
        Err(e @ Error::MomentBarrier { .. }) => SideReport::Skipped {
            reason: e.to_string(),
        },
        Err(e) => return Err(e),
        Ok(lp) => {
            let mut margins = Vec::with_capacity(directions.len());
            let mut confident = 0usize;
            for (idx, (mom, rad)) in lp.moments.iter().zip(&kp.radials).enumerate() {
                // (1/e) radial_B <= radial_K
                let lhs = mom.radial / std::f64::consts::E;
                let lhs_lo = (1.0 / (mom.norm + mom.half_width)) / std::f64::consts::E;
                let margin = rad.value - lhs;
                let status = if margin >= 0.0 {
                    BandStatus::Inside
                } else if lhs_lo > rad.ci_hi {
                    confident += 1;
                    BandStatus::ConfidentViolation
                } else {
                    BandStatus::Inconclusive
                };
                margins.push(InclusionMargin {
                    direction: idx,
                    margin,
                    status,
                });
            }
            SideReport::Checked {
                margins,
                confident_violations: confident,
            }
        }
    };

    let right = match estimate_lp_ball(spec, c1 * p, directions, m, stream.substream(3)) {
        Err(e @ Error::MomentBarrier { .. }) => SideReport::Skipped {
            reason: e.to_string(),
        },
        Err(e) => return Err(e),
        Ok(lp) => {
            let mut margins = Vec::with_capacity(directions.len());
            let mut confident = 0usize;
            for (idx, (mom, rad)) in lp.moments.iter().zip(&kp.radials).enumerate() {
                // radial_K <= 2 radial_{B, c1 p}
                let rhs = 2.0 * mom.radial;
                let rhs_hi = 2.0 / (mom.norm - mom.half_width).max(1e-300);
                let margin = rhs - rad.value;
                let status = if margin >= 0.0 {
                    BandStatus::Inside
                } else if rad.ci_lo > rhs_hi {
                    confident += 1;
                    BandStatus::ConfidentViolation
                } else {
                    BandStatus::Inconclusive
                };
                margins.push(InclusionMargin {
                    direction: idx,
                    margin,
                    status,
                });
            }
            SideReport::Checked {
                margins,
                confident_violations: confident,
            }
        }
    };

    Ok(LpEquivalenceReport { left, right, c1 })
}

// ---------------------------------------------------------------------------
// Direction generation and the empirical-body CSV format.
// ---------------------------------------------------------------------------

/// `count` directions drawn uniformly on the Euclidean sphere (normalized
/// Gaussian draws), each from its own substream.
pub fn uniform_directions(dim: usize, count: usize, stream: RngStream) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let mut rng = stream.substream(i as u64).rng();
            loop {
                let mut v: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
                if crate::mat::normalize(&mut v) > 1e-12 {
                    return v;
                }
            }
        })
        .collect()
}

/// `count` antipodal pairs `theta, -theta`, interleaved, so central
/// symmetry of estimates is testable rather than assumed.
pub fn uniform_direction_pairs(dim: usize, count: usize, stream: RngStream) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * count);
    for theta in uniform_directions(dim, count, stream) {
        let neg = theta.iter().map(|x| -x).collect();
        out.push(theta);
        out.push(neg);
    }
    out
}

/// The 2n signed axis directions `+-e_i`.
pub fn axis_directions(dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        let mut plus = vec![0.0; dim];
        plus[i] = 1.0;
        let mut minus = vec![0.0; dim];
        minus[i] = -1.0;
        out.push(plus);
        out.push(minus);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct CsvHeader {
    spec: DistributionSpec,
    p: f64,
    m: usize,
    stream: RngStream,
}

impl FloatingBodyEstimate {
    /// Write the direction table as CSV with a JSON metadata comment line:
    ///
    /// ```text
    /// # {"spec":...,"p":...,"m":...,"stream":...}
    /// theta_1,...,theta_n,r
    /// ```
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header = CsvHeader {
            spec: self.spec.clone(),
            p: self.p,
            m: self.m,
            stream: self.stream,
        };
        writeln!(out, "# {}", serde_json::to_string(&header)?)?;
        let dim = self.spec.dim;
        let mut cols: Vec<String> = (1..=dim).map(|i| format!("theta_{i}")).collect();
        cols.push("r".into());
        writeln!(out, "{}", cols.join(","))?;
        if let Some(table) = self.body.table() {
            for (theta, r) in table {
                let mut fields: Vec<String> = theta.iter().map(|x| x.to_string()).collect();
                fields.push(r.to_string());
                writeln!(out, "{}", fields.join(","))?;
            }
        }
        Ok(())
    }

    /// Parse the format written by [`write_csv`](Self::write_csv).
    /// Confidence bands are not stored in the file, so they come back
    /// degenerate (equal to the value).
    pub fn read_csv<R: BufRead>(input: R) -> std::io::Result<FloatingBodyEstimate> {
        use std::io::{Error as IoError, ErrorKind};
        let mut lines = input.lines();
        let header_line = lines
            .next()
            .ok_or_else(|| IoError::new(ErrorKind::InvalidData, "empty file"))??;
        let json = header_line
            .strip_prefix("# ")
            .ok_or_else(|| IoError::new(ErrorKind::InvalidData, "missing '# ' header"))?;
        let header: CsvHeader = serde_json::from_str(json)?;
        let _columns = lines
            .next()
            .ok_or_else(|| IoError::new(ErrorKind::InvalidData, "missing column row"))??;
        let mut entries = Vec::new();
        let mut radials = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != header.spec.dim + 1 {
                return Err(IoError::new(ErrorKind::InvalidData, "bad field count"));
            }
            let parse = |s: &str| -> std::io::Result<f64> {
                s.parse::<f64>()
                    .map_err(|e| IoError::new(ErrorKind::InvalidData, e))
            };
            let theta: Vec<f64> = fields[..header.spec.dim]
                .iter()
                .map(|s| parse(s))
                .collect::<std::io::Result<_>>()?;
            let r = parse(fields[header.spec.dim])?;
            entries.push((theta, r));
            radials.push(RadialEstimate {
                value: r,
                ci_lo: r,
                ci_hi: r,
                quantile: 1.0 / r,
            });
        }
        let body = StarBody::empirical(entries, header.spec.dim)
            .map_err(|e| IoError::new(ErrorKind::InvalidData, e.to_string()))?;
        Ok(FloatingBodyEstimate {
            body,
            radials,
            p: header.p,
            m: header.m,
            quantile_level: 1.0 - (-header.p).exp(),
            spec: header.spec,
            stream: header.stream,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::{stable_quantile, QuantileMode};

    #[test]
    fn radial_precondition_reports_required_m() {
        let spec = DistributionSpec::gaussian(2);
        let err = estimate_radial(&spec, &[1.0, 0.0], 40f64.ln(), 100, RngStream::new(1, 0));
        match err {
            Err(Error::SamplesTooFew { required, given }) => {
                assert_eq!(required, 4000);
                assert_eq!(given, 100);
            }
            other => panic!("expected SamplesTooFew, got {other:?}"),
        }
    }

    #[test]
    fn rademacher_radial_at_p2_is_exactly_one() {
        let spec = DistributionSpec::rademacher(3);
        let est =
            estimate_radial(&spec, &[1.0, 0.0, 0.0], 2.0, 100_000, RngStream::new(2, 0)).unwrap();
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn gaussian_radial_matches_quantile_oracle() {
        let spec = DistributionSpec::gaussian(2);
        let p = 40f64.ln();
        let est = estimate_radial(&spec, &[0.0, 1.0], p, 200_000, RngStream::new(3, 0)).unwrap();
        let exact = 1.0 / stable_quantile(2.0, 0.975, QuantileMode::ClosedForm).unwrap();
        assert!(
            (est.value - exact).abs() / exact < 0.05,
            "est {} vs exact {exact}",
            est.value
        );
        assert!(est.ci_lo <= exact && exact <= est.ci_hi);
    }

    #[test]
    fn threshold_rescaling_is_algebraic() {
        // Scaling law: the radial at threshold a is exactly a times the
        // radial at threshold 1, on the same sample array.
        let spec = DistributionSpec::gaussian(2);
        let mut rng = RngStream::new(5, 0).rng();
        let mut scratch = vec![0.0; 2];
        let mut sorted: Vec<f64> = (0..10_000)
            .map(|_| spec.sample_marginal(&mut rng, &[1.0, 0.0], &mut scratch))
            .collect();
        sorted.sort_unstable_by(f64::total_cmp);
        let base = radial_from_sorted(&sorted, 2.0, 1.0).unwrap();
        for a in [0.5, 2.0, 7.25] {
            let scaled = radial_from_sorted(&sorted, 2.0, a).unwrap();
            assert_eq!(scaled.value, a * base.value);
        }
    }

    #[test]
    fn rank_monotonicity_in_p() {
        let spec = DistributionSpec::gaussian(2);
        let mut rng = RngStream::new(6, 0).rng();
        let mut scratch = vec![0.0; 2];
        let mut sorted: Vec<f64> = (0..50_000)
            .map(|_| spec.sample_marginal(&mut rng, &[1.0, 0.0], &mut scratch))
            .collect();
        sorted.sort_unstable_by(f64::total_cmp);
        let r1 = radial_from_sorted(&sorted, 1.5, 1.0).unwrap().value;
        let r2 = radial_from_sorted(&sorted, 2.5, 1.0).unwrap().value;
        assert!(r2 <= r1);
    }

    #[test]
    fn out_of_model_flag_for_sub_median_levels() {
        // At p < ln 2 the target quantile of a symmetric law is <= 0.
        let spec = DistributionSpec::gaussian(2);
        let err = estimate_radial(&spec, &[1.0, 0.0], 0.2, 100_000, RngStream::new(7, 0));
        assert!(matches!(err, Err(Error::OutOfModel { .. })));
    }

    #[test]
    fn lp_ball_gaussian_moments() {
        let spec = DistributionSpec::gaussian(3);
        let dirs = uniform_directions(3, 5, RngStream::new(8, 0));
        let est = estimate_lp_ball(&spec, 2.0, &dirs, 100_000, RngStream::new(9, 0)).unwrap();
        for mom in &est.moments {
            assert!((mom.radial - 1.0).abs() < 0.02, "radial {}", mom.radial);
        }
        let est4 = estimate_lp_ball(&spec, 4.0, &dirs, 100_000, RngStream::new(10, 0)).unwrap();
        let expected = 1.0 / 3f64.powf(0.25);
        for mom in &est4.moments {
            assert!(
                (mom.radial - expected).abs() / expected < 0.03,
                "radial {} vs {expected}",
                mom.radial
            );
        }
    }

    #[test]
    fn lp_ball_respects_moment_barrier() {
        let spec = DistributionSpec::stable(1.0, 2);
        let dirs = vec![vec![1.0, 0.0]];
        let err = estimate_lp_ball(&spec, 2.0, &dirs, 1000, RngStream::new(11, 0));
        assert!(matches!(err, Err(Error::MomentBarrier { .. })));
    }

    #[test]
    fn sandwich_gates_and_parameter_errors() {
        let spec = DistributionSpec::gaussian(2);
        let dirs = uniform_direction_pairs(2, 4, RngStream::new(12, 0));
        let est =
            estimate_floating_body(&spec, 2.0, &dirs, 100_000, RngStream::new(13, 0)).unwrap();
        // delta too small for p = 2: the gate needs p > ln(2/delta).
        assert!(matches!(
            sandwich_check(&est, 2.0, 0.5, 0.2, 1.0, 2.0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            sandwich_check(&est, 2.0, 0.5, 0.8, 0.0, 2.0),
            Err(Error::Parameter(_))
        ));
        let report = sandwich_check(&est, 2.0, 0.5, 0.6, 1.0, 2.0).unwrap();
        assert_eq!(report.confident_violations, 0);
        assert_eq!(report.entries.len(), dirs.len());
    }

    #[test]
    fn csv_round_trip() {
        let spec = DistributionSpec::gaussian(3);
        let dirs = uniform_direction_pairs(3, 3, RngStream::new(14, 0));
        let est =
            estimate_floating_body(&spec, 2.0, &dirs, 100_000, RngStream::new(15, 0)).unwrap();
        let mut buf = Vec::new();
        est.write_csv(&mut buf).unwrap();
        let back = FloatingBodyEstimate::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.spec, est.spec);
        assert_eq!(back.p, est.p);
        assert_eq!(back.m, est.m);
        assert_eq!(back.body.table().unwrap(), est.body.table().unwrap());
    }
}
