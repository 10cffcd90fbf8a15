//! Distributional law checks on the samplers: sign symmetry and the
//! stable marginal identity, both via two-sample Kolmogorov-Smirnov
//! distances at the 3/sqrt(m) scale.

mod common;

use polyfloat_core::rng::{derive_stream, RngStream};
use polyfloat_core::samplers::{stable_standard, DistributionSpec, Family};

fn marginals(spec: &DistributionSpec, t: &[f64], m: usize, stream: RngStream) -> Vec<f64> {
    let mut rng = stream.rng();
    let mut scratch = vec![0.0; spec.dim];
    (0..m)
        .map(|_| spec.sample_marginal(&mut rng, t, &mut scratch))
        .collect()
}

#[test]
fn sign_symmetry_across_families() {
    let m = 100_000;
    let bound = 3.0 / (m as f64).sqrt();
    let families = [
        Family::Gaussian,
        Family::Rademacher,
        Family::Stable { q: 1.0 },
        Family::Stable { q: 1.5 },
        Family::StudentT { d: 8.0 },
        Family::Unconditional {
            base: Box::new(Family::StudentT { d: 5.0 }),
        },
        Family::LogConcaveExp,
    ];
    for (fi, family) in families.into_iter().enumerate() {
        let spec = DistributionSpec::new(family, 4);
        let t = [0.9, -0.3, 0.2, 0.4];
        let neg: Vec<f64> = t.iter().map(|x| -x).collect();
        let mut a = marginals(&spec, &t, m, derive_stream(11, fi as u64, "sym-plus"));
        let mut b = marginals(&spec, &neg, m, derive_stream(11, fi as u64, "sym-minus"));
        let d = common::ks_distance(&mut a, &mut b);
        assert!(d <= bound, "{:?}: KS = {d} > {bound}", spec.family);
    }
}

#[test]
fn stable_marginals_match_scalar_law() {
    // <X, t> has the same law as ||t||_q xi.
    let m = 100_000;
    let bound = 3.0 / (m as f64).sqrt();
    for (qi, q) in [1.0, 1.5, 2.0].into_iter().enumerate() {
        let spec = DistributionSpec::stable(q, 5);
        let t = [0.2f64, -1.3, 0.7, 0.05, -0.6];
        let norm_q = t.iter().map(|x| x.abs().powf(q)).sum::<f64>().powf(1.0 / q);
        let mut a = marginals(&spec, &t, m, derive_stream(12, qi as u64, "stable-vec"));
        let mut rng = derive_stream(12, qi as u64, "stable-scalar").rng();
        let mut b: Vec<f64> = (0..m)
            .map(|_| norm_q * stable_standard(q, &mut rng))
            .collect();
        let d = common::ks_distance(&mut a, &mut b);
        assert!(d <= bound, "q = {q}: KS = {d} > {bound}");
    }
}

#[test]
fn stable_q2_matches_gaussian_family() {
    let m = 100_000;
    let bound = 3.0 / (m as f64).sqrt();
    let t = [0.5, 0.5, -0.2];
    let mut a = marginals(
        &DistributionSpec::stable(2.0, 3),
        &t,
        m,
        derive_stream(13, 0, "q2"),
    );
    let mut b = marginals(
        &DistributionSpec::gaussian(3),
        &t,
        m,
        derive_stream(13, 0, "gauss"),
    );
    let d = common::ks_distance(&mut a, &mut b);
    assert!(d <= bound, "KS = {d} > {bound}");
}

#[test]
fn normal_quantile_agrees_with_quadrature_cdf() {
    for &u in &[0.55, 0.7, 0.86466, 0.975, 0.99995] {
        let z = polyfloat_core::rng::normal_quantile(u);
        let back = common::normal_cdf_quadrature(z);
        assert!((back - u).abs() < 1e-12, "u = {u}: round trip {back}");
    }
}

#[test]
fn cauchy_tail_matches_closed_form_cdf() {
    let m = 400_000;
    let mut rng = derive_stream(14, 0, "cauchy-cdf").rng();
    let samples: Vec<f64> = (0..m).map(|_| stable_standard(1.0, &mut rng)).collect();
    for &x in &[0.1, 0.5, 1.53884] {
        let emp = samples.iter().filter(|&&v| v <= x).count() as f64 / m as f64;
        let exact = common::cauchy_half_cdf(x);
        assert!(
            (emp - exact).abs() < 3.0 / (m as f64).sqrt() + 0.002,
            "x = {x}: {emp} vs {exact}"
        );
    }
}
