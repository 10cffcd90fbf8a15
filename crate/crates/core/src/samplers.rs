//! Seeded sampling of every random vector family used in the experiments.
//!
//! All families are symmetric: `X` and `-X` are equidistributed. Coordinates
//! are i.i.d. for every family (the unconditional wrapper preserves this
//! when its base does).
//!
//! Specs serialize to JSON as `{"family": <name>, "params": {...}, "dim": n}`
//! with snake_case family names and `params` omitted for parameter-free
//! families, e.g. `{"family":"stable","params":{"q":1.0},"dim":16}`.
//!
//! Conventions that matter downstream:
//! - A standard q-stable variable here has characteristic function
//!   `exp(-|t|^q / 2)`. In particular q = 1 is a Cauchy with scale 1/2, not
//!   the common scale-1 convention, and q = 2 is exactly N(0,1). Samples
//!   come from the Chambers-Mallows-Stuck transform (which produces the
//!   `exp(-|t|^q)` normalization) scaled by `2^{-1/q}`.
//! - Student-t coordinates are rescaled by `sqrt((d-2)/d)` so each
//!   coordinate has unit variance; degrees of freedom `d <= 2` are rejected.
//! - The log-concave instance is the product of i.i.d. symmetric (Laplace)
//!   exponentials with density `exp(-|x|)/2`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::rng::{normal_quantile, Rng, RngStream};

/// Default memory budget for sample matrices (1 GiB).
pub const DEFAULT_MATRIX_BUDGET_BYTES: u128 = 1 << 30;

/// The law of one coordinate-wise random vector family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    Rademacher,
    Stable { q: f64 },
    StudentT { d: f64 },
    Unconditional { base: Box<Family> },
    LogConcaveExp,
}

impl Family {
    fn validate(&self) -> Result<()> {
        match self {
            Family::Stable { q } => {
                if !(1.0..=2.0).contains(q) {
                    return Err(Error::Parameter(format!(
                        "stable index q = {q} must lie in [1, 2]"
                    )));
                }
            }
            Family::StudentT { d } => {
                if !(*d > 2.0) {
                    return Err(Error::Parameter(format!(
                        "student-t degrees d = {d} must exceed 2 (unit-variance rescaling)"
                    )));
                }
            }
            Family::Unconditional { base } => base.validate()?,
            _ => {}
        }
        Ok(())
    }

    /// Largest r such that E |<X,t>|^s exists for all s < r.
    pub fn moment_barrier(&self) -> f64 {
        match self {
            Family::Stable { q } if *q < 2.0 => *q,
            Family::StudentT { d } => *d,
            Family::Unconditional { base } => base.moment_barrier(),
            _ => f64::INFINITY,
        }
    }

    /// Draw one coordinate.
    #[inline]
    fn draw(&self, rng: &mut Rng) -> f64 {
        match self {
            Family::Gaussian => rng.normal(),
            Family::Rademacher => rng.sign(),
            Family::Stable { q } => stable_standard(*q, rng),
            Family::StudentT { d } => {
                let z = rng.normal();
                let chi2 = 2.0 * rng.gamma(d / 2.0);
                let t = z / (chi2 / d).sqrt();
                t * ((d - 2.0) / d).sqrt()
            }
            Family::Unconditional { base } => base.draw(rng) * rng.sign(),
            Family::LogConcaveExp => rng.sign() * rng.exponential(),
        }
    }
}

/// Which random vector to sample: a family plus the ambient dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    #[serde(flatten)]
    pub family: Family,
    pub dim: usize,
}

impl DistributionSpec {
    pub fn new(family: Family, dim: usize) -> Self {
        DistributionSpec { family, dim }
    }

    pub fn gaussian(dim: usize) -> Self {
        Self::new(Family::Gaussian, dim)
    }

    pub fn rademacher(dim: usize) -> Self {
        Self::new(Family::Rademacher, dim)
    }

    pub fn stable(q: f64, dim: usize) -> Self {
        Self::new(Family::Stable { q }, dim)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        self.family.validate()
    }

    pub fn moment_barrier(&self) -> f64 {
        self.family.moment_barrier()
    }

    /// Fill `out` with one draw of the random vector.
    pub fn sample_into(&self, rng: &mut Rng, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        match &self.family {
            // The unconditional wrapper draws the whole base vector first,
            // then one independent sign per coordinate.
            Family::Unconditional { base } => {
                for x in out.iter_mut() {
                    *x = base.draw(rng);
                }
                for x in out.iter_mut() {
                    *x *= rng.sign();
                }
            }
            f => {
                for x in out.iter_mut() {
                    *x = f.draw(rng);
                }
            }
        }
    }

    /// One draw of the scalar marginal `<X, theta>`.
    #[inline]
    pub fn sample_marginal(&self, rng: &mut Rng, theta: &[f64], scratch: &mut [f64]) -> f64 {
        self.sample_into(rng, scratch);
        crate::mat::dot(scratch, theta)
    }
}

/// One draw of the random vector, as a fresh allocation.
pub fn sample_vector(spec: &DistributionSpec, stream: RngStream) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut rng = stream.rng();
    let mut out = vec![0.0; spec.dim];
    spec.sample_into(&mut rng, &mut out);
    Ok(out)
}

/// Symmetric standard q-stable draw, characteristic function
/// `exp(-|t|^q / 2)`, via Chambers-Mallows-Stuck.
///
/// The single formula below covers q in [1, 2]: at q = 1 the second factor
/// has exponent 0 and the draw reduces to `tan(V) / 2`; at q = 2 it reduces
/// to `sin(V) * sqrt(2 W)`, an exact standard normal.
#[inline]
pub fn stable_standard(q: f64, rng: &mut Rng) -> f64 {
    let v = PI * (rng.uniform() - 0.5);
    let w = rng.exponential();
    let x =
        ((q * v).sin() / v.cos().powf(1.0 / q)) * (((1.0 - q) * v).cos() / w).powf((1.0 - q) / q);
    x * 2f64.powf(-1.0 / q)
}

/// How a quantile should be computed.
#[derive(Clone, Copy, Debug)]
pub enum QuantileMode {
    /// Exact inverse CDF; available for q = 1 (Cauchy, scale 1/2) and
    /// q = 2 (standard normal).
    ClosedForm,
    /// Empirical quantile of `m` fresh draws from the given stream, using
    /// the upper order statistic of rank `ceil(u * m)`.
    MonteCarlo { m: usize, stream: RngStream },
}

/// Quantile of the standard q-stable law: the value `Q` with
/// `P(xi <= Q) = u`.
pub fn stable_quantile(q: f64, u: f64, mode: QuantileMode) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!(
            "quantile level u = {u} not in (0,1)"
        )));
    }
    if !(1.0..=2.0).contains(&q) {
        return Err(Error::Parameter(format!(
            "stable index q = {q} must lie in [1, 2]"
        )));
    }
    match mode {
        QuantileMode::ClosedForm => {
            if q == 1.0 {
                // Cauchy with scale 1/2.
                Ok(0.5 * (PI * (u - 0.5)).tan())
            } else if q == 2.0 {
                Ok(normal_quantile(u))
            } else {
                Err(Error::Unsupported(format!(
                    "no closed-form quantile for q = {q}; use QuantileMode::MonteCarlo"
                )))
            }
        }
        QuantileMode::MonteCarlo { m, stream } => {
            if m == 0 {
                return Err(Error::Parameter("monte-carlo quantile needs m > 0".into()));
            }
            let mut rng = stream.rng();
            let mut samples: Vec<f64> = (0..m).map(|_| stable_standard(q, &mut rng)).collect();
            samples.sort_unstable_by(f64::total_cmp);
            Ok(upper_quantile(&samples, u))
        }
    }
}

/// Upper empirical quantile: the order statistic of rank `ceil(u * m)`
/// (1-indexed) of an ascending-sorted sample.
#[inline]
pub fn upper_quantile(sorted: &[f64], u: f64) -> f64 {
    let m = sorted.len();
    debug_assert!(m > 0 && u > 0.0 && u < 1.0);
    let rank = (u * m as f64).ceil() as usize;
    sorted[rank.clamp(1, m) - 1]
}

/// The matrix Gamma whose N rows are independent draws `X_1, ..., X_N`
/// (equivalently `A = Gamma^T` with the draws as columns).
#[derive(Clone, Debug)]
pub struct SampleMatrix {
    rows: Mat,
    spec: DistributionSpec,
    stream: RngStream,
}

impl SampleMatrix {
    /// Wrap an externally supplied matrix (file input, fixed test data) as
    /// if its rows had been drawn from `spec`.
    pub fn from_rows(rows: Mat, spec: DistributionSpec, stream: RngStream) -> Result<Self> {
        spec.validate()?;
        if rows.n_cols() != spec.dim {
            return Err(Error::Parameter(
                "matrix width does not match the spec dimension".into(),
            ));
        }
        Ok(SampleMatrix { rows, spec, stream })
    }

    pub fn rows(&self) -> &Mat {
        &self.rows
    }

    /// Number of sampled vectors N.
    pub fn n_vectors(&self) -> usize {
        self.rows.n_rows()
    }

    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        self.rows.n_cols()
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    pub fn stream(&self) -> RngStream {
        self.stream
    }

    /// The i-th sampled vector `X_i`.
    pub fn vector(&self, i: usize) -> &[f64] {
        self.rows.row(i)
    }

    /// `Gamma t`: the vector of marginals `(<X_i, t>)_i`.
    pub fn gamma_mul(&self, t: &[f64]) -> Vec<f64> {
        self.rows.mul_vec(t)
    }

    /// The measurement matrix `A = Gamma^T` (columns are the draws).
    pub fn design(&self) -> Mat {
        self.rows.transpose()
    }
}

/// Sample N independent copies of X. Row i is drawn from `stream.substream(i)`,
/// so the result is deterministic in `(spec, N, stream)` and rows can be
/// regenerated independently.
pub fn sample_matrix(
    spec: &DistributionSpec,
    n_vectors: usize,
    stream: RngStream,
) -> Result<SampleMatrix> {
    sample_matrix_with_budget(spec, n_vectors, stream, DEFAULT_MATRIX_BUDGET_BYTES)
}

pub fn sample_matrix_with_budget(
    spec: &DistributionSpec,
    n_vectors: usize,
    stream: RngStream,
    budget_bytes: u128,
) -> Result<SampleMatrix> {
    spec.validate()?;
    if n_vectors == 0 {
        return Err(Error::Parameter("need at least one sampled vector".into()));
    }
    let bytes = n_vectors as u128 * spec.dim as u128 * 8;
    if bytes > budget_bytes {
        return Err(Error::SizeBudget {
            requested: bytes,
            budget: budget_bytes,
        });
    }
    let mut rows = Mat::zeros(n_vectors, spec.dim);
    for i in 0..n_vectors {
        let mut rng = stream.substream(i as u64).rng();
        spec.sample_into(&mut rng, rows.row_mut(i));
    }
    Ok(SampleMatrix {
        rows,
        spec: spec.clone(),
        stream,
    })
}
