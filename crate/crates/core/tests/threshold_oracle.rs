mod common;

use common::{t_cdf_quadrature, t_quantile_quadrature};
use relsort::discovery::correlation_threshold;
use relsort::stats::{student_t_cdf, student_t_quantile};

#[test]
fn cdf_matches_quadrature() {
    for df in [1.0, 2.0, 5.0, 30.0, 9998.0] {
        for t in [-3.0, -0.7, 0.0, 0.4, 1.96, 6.0] {
            let d = (student_t_cdf(t, df) - t_cdf_quadrature(t, df)).abs();
            assert!(d < 1e-9, "df={df} t={t} diff={d}");
        }
    }
}

#[test]
fn quantile_matches_quadrature() {
    for (p, df) in [(0.975, 2.0), (0.975, 9998.0), (0.9, 7.0), (0.995, 40.0)] {
        let d = (student_t_quantile(p, df).unwrap() - t_quantile_quadrature(p, df)).abs();
        assert!(d < 1e-7, "p={p} df={df} diff={d}");
    }
}

#[test]
fn threshold_from_quadrature_quantile() {
    for m in [4usize, 50, 10_000] {
        let df = (m - 2) as f64;
        let t = t_quantile_quadrature(0.975, df);
        let expected = t / (df + t * t).sqrt();
        let got = correlation_threshold(m, 0.05).unwrap();
        assert!((got - expected).abs() < 1e-8, "m={m} {got} vs {expected}");
    }
    let eps = correlation_threshold(10_000, 0.05).unwrap();
    assert!((0.0195..=0.0197).contains(&eps));
}
