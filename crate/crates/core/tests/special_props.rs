use fracsub::quad::integrate;
use fracsub::special::{gamma, mittag_leffler, omega, MLParams, EULER_GAMMA};
use proptest::prelude::*;
use statrs::function::erf::erfc;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn gamma_recurrence(x in 0.01f64..30.0) {
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        prop_assert!(((lhs - rhs) / rhs).abs() <= 1e-12, "x = {x}: {lhs} vs {rhs}");
    }
}

#[test]
fn gamma_agrees_with_statrs() {
    for i in 1..400 {
        let x = -9.95 + i as f64 * 0.1;
        if (x - x.round()).abs() < 1e-9 && x <= 0.0 {
            continue;
        }
        let ours = gamma(x).unwrap();
        let theirs = statrs::function::gamma::gamma(x);
        assert!(((ours - theirs) / theirs).abs() < 1e-12, "x = {x}: {ours} vs {theirs}");
    }
}

#[test]
fn omega_semigroup() {
    let orders = [0.3, 0.7, 1.0];
    for &a in &orders {
        for &b in &orders {
            for &t in &[0.2, 1.0, 2.7] {
                // Split at t/2 and reflect the second half so both weak
                // singularities sit at the origin, where bisection can resolve them.
                let f = |p: f64, q: f64| move |s: f64| omega(p, t - s).unwrap() * omega(q, s).unwrap();
                let lhs = integrate(f(a, b), 0.0, t / 2.0, 1e-13, 1e-13).unwrap()
                    + integrate(f(b, a), 0.0, t / 2.0, 1e-13, 1e-13).unwrap();
                let rhs = omega(a + b, t).unwrap();
                assert!((lhs - rhs).abs() < 1e-8, "a = {a}, b = {b}, t = {t}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn ml_reduces_to_exp() {
    let p = MLParams::new(1.0, 1.0).unwrap();
    for i in 0..=200 {
        let z = -5.0 + i as f64 * 0.05;
        let e = z.exp();
        let v = mittag_leffler(p, z).unwrap();
        assert!((v - e).abs() <= 1e-11 * e.max(1.0), "z = {z}: {v} vs {e}");
    }
}

#[test]
fn ml_reduces_to_cosh_sqrt() {
    let p = MLParams::new(2.0, 1.0).unwrap();
    for i in 0..=100 {
        let z = i as f64 * 0.05;
        let e = z.sqrt().cosh();
        let v = mittag_leffler(p, z).unwrap();
        assert!((v - e).abs() <= 1e-10, "z = {z}: {v} vs {e}");
    }
}

#[test]
fn ml_half_order_is_scaled_erfc() {
    // E_{1/2}(z) = exp(z²) erfc(-z).
    // erfc(-z) = 1 + erf(z) is well conditioned for z >= 0 only; negative
    // arguments use 30-digit reference values.
    let p = MLParams::one(0.5).unwrap();
    for i in 0..=20 {
        let z = i as f64 * 0.1;
        let e = (z * z).exp() * erfc(-z);
        let v = mittag_leffler(p, z).unwrap();
        // statrs erf carries about 1e-11 relative error.
        assert!((v - e).abs() <= 1e-10 * e, "z = {z}: {v} vs {e}");
    }
    for (z, e) in [
        (-2.0, 0.255_395_676_310_505_74),
        (-1.5, 0.321_585_416_454_317_5),
        (-1.0, 0.427_583_576_155_807_0),
        (-0.5, 0.615_690_344_192_925_9),
    ] {
        let v = mittag_leffler(p, z).unwrap();
        assert!((v - e).abs() <= 1e-13, "z = {z}: {v} vs {e}");
    }
    let at_one = mittag_leffler(p, 1.0).unwrap();
    assert!((at_one - 5.008_980_080_762_283_5).abs() < 1e-13);
}

#[test]
fn ml_monotone_on_positive_axis() {
    for &alpha in &[0.1, 0.3, 0.5, 0.75, 0.95, 1.0, 1.5] {
        for &beta_extra in &[0.0, 0.25, 1.0] {
            let p = MLParams::new(alpha, alpha + beta_extra).unwrap();
            let mut prev = mittag_leffler(p, 0.0).unwrap();
            let z_max = 3f64.min(0.99 * 700f64.powf(alpha));
            for i in 1..=300 {
                let z = i as f64 * z_max / 300.0;
                let v = mittag_leffler(p, z).unwrap();
                assert!(v >= prev, "alpha = {alpha}, beta = {}, z = {z}", p.beta());
                prev = v;
            }
        }
    }
}

#[test]
fn ml_at_zero_is_reciprocal_gamma() {
    for &(a, b) in &[(0.3, 0.4), (0.9, 1.0), (1.5, 2.5), (0.5, 0.7)] {
        let v = mittag_leffler(MLParams::new(a, b).unwrap(), 0.0).unwrap();
        assert!((v - 1.0 / gamma(b).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn euler_constant() {
    // Γ'(1) = -γ, from a central difference of ln Γ.
    let h = 1e-5;
    let d = (gamma(1.0 + h).unwrap().ln() - gamma(1.0 - h).unwrap().ln()) / (2.0 * h);
    assert!((d + EULER_GAMMA).abs() < 1e-8);
}

proptest! {
    #[test]
    fn omega_is_positive_and_finite(theta in 0.05f64..3.0, t in 1e-6f64..50.0) {
        let v = omega(theta, t).unwrap();
        prop_assert!(v > 0.0 && v.is_finite());
    }
}
