//! Centrally symmetric star bodies given by radial functions, and the polar
//! (support-function) side of each.
//!
//! Every body is parametrized against Euclidean-unit directions: the radial
//! value stored or returned for a direction `theta` is the largest `beta`
//! with `beta * theta` inside the body. Closed forms (`l_q` balls, hulls and
//! intersections of them) evaluate anywhere; empirical bodies carry an
//! explicit direction table, with both `theta` and `-theta` stored so that
//! central symmetry is testable rather than assumed.
//!
//! The `ConvHullUnion` radial is the radial of the *union* (the star hull):
//! the pointwise max over members. Its polar side uses the true convex hull,
//! whose support function is exactly the max of the member support
//! functions, so polar evaluations are exact for this representation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::{stable_quantile, DistributionSpec, Family, QuantileMode};

/// `l_q` norm for q in [1, infinity].
pub fn lq_norm(t: &[f64], q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::Domain(format!(
            "l_q norm needs q >= 1 or q = inf, got {q}"
        )));
    }
    Ok(lq_norm_unchecked(t, q))
}

#[inline]
fn lq_norm_unchecked(t: &[f64], q: f64) -> f64 {
    if q == f64::INFINITY {
        t.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    } else if q == 1.0 {
        t.iter().map(|x| x.abs()).sum()
    } else if q == 2.0 {
        t.iter().map(|x| x * x).sum::<f64>().sqrt()
    } else {
        t.iter().map(|x| x.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Conjugate exponent: 1/q + 1/q' = 1.
pub fn conjugate_exponent(q: f64) -> f64 {
    if q == 1.0 {
        f64::INFINITY
    } else if q == f64::INFINITY {
        1.0
    } else {
        q / (q - 1.0)
    }
}

/// A scaled `l_q` ball: `radius * B_q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LqBall {
    pub radius: f64,
    pub q: f64,
}

impl LqBall {
    pub fn new(radius: f64, q: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Parameter(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        if q.is_nan() || q < 1.0 {
            return Err(Error::Parameter(format!("ball exponent q = {q} invalid")));
        }
        Ok(LqBall { radius, q })
    }

    fn radial(&self, theta: &[f64]) -> f64 {
        self.radius / lq_norm_unchecked(theta, self.q)
    }

    /// Support function `h(psi) = radius * ||psi||_{q'}`.
    fn support(&self, psi: &[f64]) -> f64 {
        self.radius * lq_norm_unchecked(psi, conjugate_exponent(self.q))
    }

    /// A functional `u` with `<u, t> = gauge(t)` and `u` in the polar ball.
    fn norming_functional(&self, t: &[f64]) -> Vec<f64> {
        let q = self.q;
        if q == f64::INFINITY {
            let mut best = 0usize;
            for (i, x) in t.iter().enumerate() {
                if x.abs() > t[best].abs() {
                    best = i;
                }
            }
            let mut u = vec![0.0; t.len()];
            u[best] = t[best].signum() / self.radius;
            u
        } else if q == 1.0 {
            t.iter()
                .map(|x| {
                    if *x == 0.0 {
                        0.0
                    } else {
                        x.signum() / self.radius
                    }
                })
                .collect()
        } else {
            let norm = lq_norm_unchecked(t, q);
            let scale = self.radius * norm.powf(q - 1.0);
            t.iter()
                .map(|x| x.signum() * x.abs().powf(q - 1.0) / scale)
                .collect()
        }
    }
}

/// How a closed-form floating body relates to the true `K_p(X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fidelity {
    Exact,
    EquivalentUpToConstants,
}

/// The shape of a star body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BodyRepr {
    LqBall(LqBall),
    /// Star hull of the members (radial = max over members); polar
    /// evaluations treat it as the convex hull of the union.
    ConvHullUnion(Vec<LqBall>),
    Intersection(Vec<LqBall>),
    /// Direction table of (euclidean-unit theta, radial value) pairs.
    Empirical(Vec<(Vec<f64>, f64)>),
}

/// A radial evaluation; `nearest_fallback` is set when an empirical body had
/// no stored entry for the queried direction and the nearest one was used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialValue {
    pub value: f64,
    pub nearest_fallback: bool,
}

/// A polar radial evaluation (the radial of the polar body, `1/h`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PolarRadial {
    Exact(f64),
    /// Intersections only admit member-wise support bounds.
    Bounds {
        lower: f64,
        upper: f64,
    },
    /// Empirical bodies evaluate the support over their direction table,
    /// which underestimates the true support.
    Approximate(f64),
}

impl PolarRadial {
    /// Point value where one exists; the midpoint of the bounds otherwise.
    pub fn value(&self) -> f64 {
        match self {
            PolarRadial::Exact(v) | PolarRadial::Approximate(v) => *v,
            PolarRadial::Bounds { lower, upper } => 0.5 * (lower + upper),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, PolarRadial::Exact(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarBody {
    repr: BodyRepr,
    dim: usize,
}

impl StarBody {
    pub fn lq_ball(radius: f64, q: f64, dim: usize) -> Result<Self> {
        Ok(StarBody {
            repr: BodyRepr::LqBall(LqBall::new(radius, q)?),
            dim,
        })
    }

    pub fn conv_hull_union(members: Vec<LqBall>, dim: usize) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Parameter("hull needs at least one member".into()));
        }
        Ok(StarBody {
            repr: BodyRepr::ConvHullUnion(members),
            dim,
        })
    }

    pub fn intersection(members: Vec<LqBall>, dim: usize) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Parameter(
                "intersection needs at least one member".into(),
            ));
        }
        Ok(StarBody {
            repr: BodyRepr::Intersection(members),
            dim,
        })
    }

    /// Build an empirical body from (unit direction, radial) pairs.
    pub fn empirical(entries: Vec<(Vec<f64>, f64)>, dim: usize) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyTable);
        }
        for (theta, r) in &entries {
            if theta.len() != dim {
                return Err(Error::Parameter(
                    "direction length does not match body dimension".into(),
                ));
            }
            if !(r.is_finite() && *r > 0.0) {
                return Err(Error::Parameter(format!(
                    "radial values must be positive and finite, got {r}"
                )));
            }
        }
        Ok(StarBody {
            repr: BodyRepr::Empirical(entries),
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn repr(&self) -> &BodyRepr {
        &self.repr
    }

    pub fn table(&self) -> Option<&[(Vec<f64>, f64)]> {
        match &self.repr {
            BodyRepr::Empirical(t) => Some(t),
            _ => None,
        }
    }

    /// Radial function: the largest `beta` with `beta * theta` in the body.
    pub fn radial(&self, theta: &[f64]) -> Result<RadialValue> {
        if theta.len() != self.dim {
            return Err(Error::Parameter(
                "direction length does not match body dimension".into(),
            ));
        }
        match &self.repr {
            BodyRepr::LqBall(b) => Ok(RadialValue {
                value: b.radial(theta),
                nearest_fallback: false,
            }),
            BodyRepr::ConvHullUnion(members) => Ok(RadialValue {
                value: members
                    .iter()
                    .map(|b| b.radial(theta))
                    .fold(f64::NEG_INFINITY, f64::max),
                nearest_fallback: false,
            }),
            BodyRepr::Intersection(members) => Ok(RadialValue {
                value: members
                    .iter()
                    .map(|b| b.radial(theta))
                    .fold(f64::INFINITY, f64::min),
                nearest_fallback: false,
            }),
            BodyRepr::Empirical(entries) => {
                if entries.is_empty() {
                    return Err(Error::EmptyTable);
                }
                let mut best = 0usize;
                let mut best_cos = f64::NEG_INFINITY;
                for (i, (dir, _)) in entries.iter().enumerate() {
                    let c = crate::mat::dot(dir, theta);
                    if c > best_cos {
                        best_cos = c;
                        best = i;
                    }
                }
                let theta_norm = crate::mat::norm2(theta);
                Ok(RadialValue {
                    value: entries[best].1,
                    nearest_fallback: best_cos < theta_norm * (1.0 - 1e-10),
                })
            }
        }
    }

    /// Support function of the convex hull of the body, where computable.
    pub fn support(&self, psi: &[f64]) -> Result<PolarRadial> {
        if psi.len() != self.dim {
            return Err(Error::Parameter(
                "direction length does not match body dimension".into(),
            ));
        }
        match &self.repr {
            BodyRepr::LqBall(b) => Ok(PolarRadial::Exact(b.support(psi))),
            BodyRepr::ConvHullUnion(members) => Ok(PolarRadial::Exact(
                members
                    .iter()
                    .map(|b| b.support(psi))
                    .fold(f64::NEG_INFINITY, f64::max),
            )),
            BodyRepr::Intersection(members) => {
                // h is sandwiched between the reach along psi and the
                // member-wise minimum; the inf-convolution itself is not
                // computed.
                let upper = members
                    .iter()
                    .map(|b| b.support(psi))
                    .fold(f64::INFINITY, f64::min);
                let reach = members
                    .iter()
                    .map(|b| b.radial(psi))
                    .fold(f64::INFINITY, f64::min);
                // h(psi) >= <reach * psi, psi> = reach * |psi|_2^2.
                let psi_norm2 = crate::mat::dot(psi, psi);
                Ok(PolarRadial::Bounds {
                    lower: reach * psi_norm2,
                    upper,
                })
            }
            BodyRepr::Empirical(entries) => {
                if entries.is_empty() {
                    return Err(Error::EmptyTable);
                }
                let h = entries
                    .iter()
                    .map(|(dir, r)| r * crate::mat::dot(dir, psi))
                    .fold(f64::NEG_INFINITY, f64::max);
                Ok(PolarRadial::Approximate(h))
            }
        }
    }

    /// Radial of the polar body: `1 / h_{conv(body)}(psi)`.
    pub fn polar_radial(&self, psi: &[f64]) -> Result<PolarRadial> {
        Ok(match self.support(psi)? {
            PolarRadial::Exact(h) => PolarRadial::Exact(1.0 / h),
            PolarRadial::Approximate(h) => PolarRadial::Approximate(1.0 / h),
            // Reciprocation swaps the roles of the two bounds.
            PolarRadial::Bounds { lower, upper } => PolarRadial::Bounds {
                lower: 1.0 / upper,
                upper: 1.0 / lower,
            },
        })
    }

    /// For closed-form bodies: a functional `u0` with `<u0, t> = gauge(t)`,
    /// normalized so that `<u0, t> = 1` when `t` lies on the boundary. Used
    /// by duality cross-checks. `None` for intersections and tables.
    pub fn norming_functional(&self, t: &[f64]) -> Option<Vec<f64>> {
        match &self.repr {
            BodyRepr::LqBall(b) => Some(b.norming_functional(t)),
            BodyRepr::ConvHullUnion(members) => {
                // The achieving member (max radial = min gauge) carries the
                // pairing for the union's boundary point.
                let best = members
                    .iter()
                    .max_by(|a, b| a.radial(t).total_cmp(&b.radial(t)))?;
                Some(best.norming_functional(t))
            }
            _ => None,
        }
    }
}

/// A closed-form floating body and how faithfully it matches `K_p(X)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormBody {
    pub body: StarBody,
    pub fidelity: Fidelity,
}

/// The floating body `K_p(X)` in closed form, where the family admits one.
///
/// - Gaussian: exactly `(1/z) B_2` with `z` the normal quantile at
///   `1 - exp(-p)`.
/// - Stable(q), q in {1, 2}: exactly `(1/Q) B_q` with `Q` the stable
///   quantile at the same level (the marginal of `<X, t>` is `||t||_q xi`).
/// - Rademacher: the shape template `conv(B_1 union (1/sqrt(p)) B_2)`,
///   correct only up to unspecified absolute constants.
pub fn closed_form_floating_body(spec: &DistributionSpec, p: f64) -> Result<ClosedFormBody> {
    spec.validate()?;
    if !(p > (2.0f64).ln()) {
        return Err(Error::Precondition(format!(
            "floating body is unbounded unless p > ln 2, got p = {p}"
        )));
    }
    let level = 1.0 - (-p).exp();
    match &spec.family {
        Family::Gaussian => {
            let z = stable_quantile(2.0, level, QuantileMode::ClosedForm)?;
            Ok(ClosedFormBody {
                body: StarBody::lq_ball(1.0 / z, 2.0, spec.dim)?,
                fidelity: Fidelity::Exact,
            })
        }
        Family::Stable { q } => {
            let quantile =
                stable_quantile(*q, level, QuantileMode::ClosedForm).map_err(|e| match e {
                    Error::Unsupported(_) => Error::Unsupported(format!(
                        "no closed-form floating body for stable q = {q}; \
                         use stable_floating_body with a Monte Carlo quantile \
                         or floating::estimate_floating_body"
                    )),
                    other => other,
                })?;
            Ok(ClosedFormBody {
                body: StarBody::lq_ball(1.0 / quantile, *q, spec.dim)?,
                fidelity: Fidelity::Exact,
            })
        }
        Family::Rademacher => Ok(ClosedFormBody {
            body: StarBody::conv_hull_union(
                vec![LqBall::new(1.0, 1.0)?, LqBall::new(1.0 / p.sqrt(), 2.0)?],
                spec.dim,
            )?,
            fidelity: Fidelity::EquivalentUpToConstants,
        }),
        other => Err(Error::Unsupported(format!(
            "no closed-form floating body for {other:?}; \
             use floating::estimate_floating_body"
        ))),
    }
}

/// The q-stable floating body `(1/Q) B_q` with the quantile computed in the
/// requested mode; the shape is exact for every q in [1, 2].
pub fn stable_floating_body(q: f64, p: f64, dim: usize, mode: QuantileMode) -> Result<StarBody> {
    if !(p > (2.0f64).ln()) {
        return Err(Error::Precondition(format!(
            "floating body is unbounded unless p > ln 2, got p = {p}"
        )));
    }
    let level = 1.0 - (-p).exp();
    let quantile = stable_quantile(q, level, mode)?;
    StarBody::lq_ball(1.0 / quantile, q, dim)
}
