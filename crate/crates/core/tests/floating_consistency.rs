//! Consistency checks on the Monte Carlo body estimators: invariance
//! properties of the underlying laws and the moment-equivalence bands.

mod common;

use polyfloat_core::floating::{
    estimate_floating_body, lp_equivalence_check, uniform_direction_pairs, uniform_directions,
    SideReport,
};
use polyfloat_core::rng::derive_stream;
use polyfloat_core::samplers::DistributionSpec;

#[test]
fn gaussian_radials_are_rotation_invariant() {
    let spec = DistributionSpec::gaussian(3);
    let dirs = uniform_directions(3, 200, derive_stream(21, 0, "dirs"));
    let est =
        estimate_floating_body(&spec, 2.0, &dirs, 100_000, derive_stream(21, 0, "body")).unwrap();
    let values: Vec<f64> = est.radials.iter().map(|r| r.value).collect();
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(
        (hi - lo) / lo < 0.05,
        "radial spread [{lo}, {hi}] exceeds 5%"
    );
}

#[test]
fn cauchy_axis_radials_are_exchangeable() {
    let spec = DistributionSpec::stable(1.0, 6);
    let axes: Vec<Vec<f64>> = (0..6)
        .map(|i| {
            let mut e = vec![0.0; 6];
            e[i] = 1.0;
            e
        })
        .collect();
    let est = estimate_floating_body(
        &spec,
        10f64.ln(),
        &axes,
        200_000,
        derive_stream(22, 0, "axes"),
    )
    .unwrap();
    let first = est.radials[0];
    for rad in &est.radials[1..] {
        // Same scalar law on every axis: bands must overlap.
        assert!(
            rad.ci_lo <= first.ci_hi && first.ci_lo <= rad.ci_hi,
            "axis radials not exchangeable: {rad:?} vs {first:?}"
        );
    }
}

#[test]
fn antipodal_radials_agree_within_bands() {
    for spec in [
        DistributionSpec::gaussian(4),
        DistributionSpec::stable(1.0, 4),
        DistributionSpec::rademacher(4),
    ] {
        let dirs = uniform_direction_pairs(4, 20, derive_stream(23, 1, "dirs"));
        let est = estimate_floating_body(&spec, 2.0, &dirs, 100_000, derive_stream(23, 2, "body"))
            .unwrap();
        for pair in est.radials.chunks(2) {
            let (plus, minus) = (pair[0], pair[1]);
            assert!(
                plus.ci_lo <= minus.ci_hi && minus.ci_lo <= plus.ci_hi,
                "{:?}: +-theta bands disjoint: {plus:?} vs {minus:?}",
                spec.family
            );
        }
    }
}

#[test]
fn gaussian_equivalence_has_positive_margins() {
    let spec = DistributionSpec::gaussian(4);
    let dirs = uniform_direction_pairs(4, 15, derive_stream(24, 0, "dirs"));
    // Gaussian regularity constant over a modest grid is below 1.5.
    let report =
        lp_equivalence_check(&spec, 4.0, 1.5, &dirs, 100_000, derive_stream(24, 1, "eq")).unwrap();
    for side in [&report.left, &report.right] {
        match side {
            SideReport::Checked {
                margins,
                confident_violations,
            } => {
                assert_eq!(*confident_violations, 0);
                for m in margins {
                    assert!(m.margin > 0.0, "non-positive margin {m:?}");
                }
            }
            SideReport::Skipped { reason } => panic!("unexpected skip: {reason}"),
        }
    }
}

#[test]
fn cauchy_equivalence_left_side_is_untestable() {
    // No second moment: the level-p ball does not exist; the low-order
    // right side still checks (c1 p < 1 keeps the quasi-norm moment
    // finite).
    let spec = DistributionSpec::stable(1.0, 3);
    let dirs = uniform_directions(3, 8, derive_stream(25, 0, "dirs"));
    let report =
        lp_equivalence_check(&spec, 2.0, 3.0, &dirs, 150_000, derive_stream(25, 1, "eq")).unwrap();
    match &report.left {
        SideReport::Skipped { reason } => {
            assert!(reason.contains("order 2"), "reason: {reason}")
        }
        other => panic!("left side should be skipped, got {other:?}"),
    }
    assert!(report.c1 * 2.0 < 1.0);
    match &report.right {
        SideReport::Checked {
            confident_violations,
            ..
        } => assert_eq!(*confident_violations, 0),
        SideReport::Skipped { reason } => panic!("right side should check: {reason}"),
    }
}
