//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by samplers, estimators, solvers and checks.
///
/// Solver outcomes that are legal results (infeasible programs, iteration
/// caps) are reported through status enums on the result structs, not here.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range (invalid stable index,
    /// non-positive dimension, negative noise level, ...).
    Parameter(String),
    /// A mathematical domain violation (quantile level outside (0,1),
    /// `l_q` norm with q < 1, ...).
    Domain(String),
    /// The requested closed form does not exist for this family.
    Unsupported(String),
    /// A Monte Carlo precondition `m >= required` failed.
    SamplesTooFew { required: usize, given: usize },
    /// A moment of the requested order does not exist for the family.
    MomentBarrier {
        what: String,
        order: f64,
        barrier: f64,
    },
    /// A stated hypothesis (for example a lower bound on `p`) is violated.
    Precondition(String),
    /// An empirical body with no stored directions was queried.
    EmptyTable,
    /// The sample matrix would exceed the configured memory budget.
    SizeBudget { requested: u128, budget: u128 },
    /// An enumeration would exceed the configured solve budget.
    BudgetExceeded { estimated: u64, budget: u64 },
    /// The estimated quantile was not strictly positive, so no radial value
    /// can be formed at this direction.
    OutOfModel { quantile: f64 },
    /// Per-direction failures collected by a body estimator.
    DirectionFailures(Vec<(usize, Error)>),
    /// A fit was requested with too few data points.
    UnderDetermined(String),
    /// A solver failed in a way that cannot be reported as a status.
    Solver(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            Error::SamplesTooFew { required, given } => {
                write!(f, "too few samples: got m = {given}, need m >= {required}")
            }
            Error::MomentBarrier {
                what,
                order,
                barrier,
            } => write!(
                f,
                "moment of order {order} does not exist for {what} (barrier {barrier})"
            ),
            Error::Precondition(msg) => write!(f, "precondition failed: {msg}"),
            Error::EmptyTable => write!(f, "empirical body has an empty direction table"),
            Error::SizeBudget { requested, budget } => write!(
                f,
                "sample matrix needs {requested} bytes, budget is {budget}"
            ),
            Error::BudgetExceeded { estimated, budget } => write!(
                f,
                "refusing to run: estimated {estimated} LP solves exceeds budget {budget}"
            ),
            Error::OutOfModel { quantile } => write!(
                f,
                "estimated quantile {quantile} is not positive; the radial value is undefined"
            ),
            Error::DirectionFailures(list) => {
                write!(f, "{} direction estimate(s) failed:", list.len())?;
                for (idx, err) in list.iter().take(4) {
                    write!(f, " [dir {idx}: {err}]")?;
                }
                if list.len() > 4 {
                    write!(f, " ...")?;
                }
                Ok(())
            }
            Error::UnderDetermined(msg) => write!(f, "under-determined: {msg}"),
            Error::Solver(msg) => write!(f, "solver failure: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
