//! The estimated constants must be mutually consistent: the moment ball
//! sits between the working-norm ball scaled by 1/L and by
//! 1/(gamma delta^{1/r}), direction by direction.

use polyfloat_core::assumptions::{estimate_lr, estimate_small_ball};
use polyfloat_core::floating::uniform_directions;
use polyfloat_core::rng::derive_stream;
use polyfloat_core::samplers::DistributionSpec;

#[test]
fn polarity_chain_of_estimated_constants() {
    let r = 2.0;
    for (spec, gamma) in [
        (DistributionSpec::gaussian(4), 0.5),
        (DistributionSpec::rademacher(4), 0.25),
        (
            DistributionSpec::new(polyfloat_core::samplers::Family::LogConcaveExp, 4),
            0.3,
        ),
    ] {
        let dirs = uniform_directions(4, 20, derive_stream(31, 0, "chain-dirs"));
        let m = 50_000;
        let sb =
            estimate_small_ball(&spec, 2.0, gamma, &dirs, m, derive_stream(31, 1, "sb")).unwrap();
        let lr = estimate_lr(&spec, 2.0, r, &dirs, m, derive_stream(31, 2, "lr")).unwrap();
        let lower = gamma * sb.delta_hat.powf(1.0 / r);
        for (idx, &moment) in lr.per_direction.iter().enumerate() {
            // gamma delta^{1/r} <= ||<X, theta>||_r <= L, within bands.
            assert!(
                moment + lr.half_width + 0.02 >= lower,
                "{:?} dir {idx}: moment {moment} below {lower}",
                spec.family
            );
            assert!(
                moment <= lr.l_hat + 1e-12,
                "{:?} dir {idx}: moment above the supremum estimate",
                spec.family
            );
        }
    }
}
