//! Floating bodies of symmetric random vectors and the geometry of the
//! random polytopes they generate.
//!
//! The library is organized around one object: for a symmetric random vector
//! `X` in R^n and a level `p`, the floating body
//!
//! ```text
//! K_p(X) = { t : P(<X,t> >= 1) <= exp(-p) }
//! ```
//!
//! is a star-shaped, centrally symmetric set whose polar is (with high
//! probability, at the right scale of `p`) contained in the symmetric convex
//! hull of `N` independent draws of `X`. Everything here is in service of
//! constructing these bodies (in closed form or by Monte Carlo), checking
//! that inclusion empirically, and exploiting it: the inclusion is exactly an
//! l1-quotient property of the matrix with columns `X_i`, which enables
//! noise-blind sparse recovery experiments.
//!
//! Module map:
//! - [`samplers`]: seeded, reproducible sampling of the random vector
//!   families (Gaussian, Rademacher, q-stable, Student-t, unconditional,
//!   log-concave), plus exact stable quantiles.
//! - [`bodies`]: star bodies given by radial functions: `l_q` balls, hulls
//!   and intersections of them, empirical direction tables, and the polar
//!   (support-function) side of each.
//! - [`floating`]: Monte Carlo estimation of `K_p(X)`, `B(L_p(X))` and
//!   `Z_p(X)`, with sandwich and equivalence diagnostics.
//! - [`l1opt`]: dense two-phase simplex, l1-quotient norms, basis pursuit,
//!   and an equality-relaxed denoising solver.
//! - [`inclusion`]: boundary sweeps and exact point certificates for the
//!   polytope inclusion, Chernoff counting, and the heavy-tailed scaling fit.
//! - [`assumptions`]: empirical small-ball / L_r / regularity constants and
//!   stochastic-domination checks.
//! - [`recovery`]: null space property constants, quotient constants against
//!   a floating body, and noise-blind recovery trials.
//!
//! All randomness flows through [`rng::RngStream`]; identical seeds and
//! stream ids give bit-identical outputs, sequentially or in parallel.

pub mod assumptions;
pub mod bodies;
pub mod error;
pub mod floating;
pub mod inclusion;
pub mod l1opt;
pub mod mat;
pub mod recovery;
pub mod rng;
pub mod samplers;

pub use bodies::{BodyRepr, Fidelity, LqBall, StarBody};
pub use error::{Error, Result};
pub use floating::FloatingBodyEstimate;
pub use inclusion::InclusionReport;
pub use l1opt::{QuotientResult, SolveStatus};
pub use mat::Mat;
pub use recovery::RecoveryReport;
pub use rng::{derive_stream, Rng, RngStream};
pub use samplers::{DistributionSpec, Family, SampleMatrix};
