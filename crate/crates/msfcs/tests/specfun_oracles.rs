mod common;

use std::f64::consts::PI;

use common::simpson;
use msfcs::specfun::{self, RealOrder};
use proptest::prelude::*;

/// `e^{-x} I_nu(x)` from the integral representation valid for real order and `x > 0`.
fn bessel_i_scaled_integral(nu: f64, x: f64) -> f64 {
    let first = simpson(|t| (x * (t.cos() - 1.0)).exp() * (nu * t).cos(), 0.0, PI, 40_000) / PI;
    let s = (nu * PI).sin();
    if s == 0.0 {
        return first;
    }
    let t_max = ((800.0 / x).max(2.0)).acosh() + 1.0;
    let second = simpson(|t| (-x * (t.cosh() + 1.0) - nu * t).exp(), 0.0, t_max, 40_000);
    first - s / PI * second
}

/// `J_nu(x)` from the Schlafli integral.
fn bessel_j_integral(nu: f64, x: f64) -> f64 {
    let first = simpson(|t| (nu * t - x * t.sin()).cos(), 0.0, PI, 40_000) / PI;
    let s = (nu * PI).sin();
    if s == 0.0 {
        return first;
    }
    let t_max = ((800.0 / x).max(2.0)).asinh() + 1.0;
    let second = simpson(|t| (-x * t.sinh() - nu * t).exp(), 0.0, t_max, 40_000);
    first - s / PI * second
}

fn order(a: f64) -> RealOrder {
    RealOrder::new(a).unwrap()
}

#[test]
fn bessel_i_matches_integral_representation() {
    for nu in [-0.7, -0.3, 0.0, 0.3, 0.5, 1.0, 1.6, 2.4] {
        for x in [0.3, 2.0, 7.5, 20.0, 55.0] {
            let got = specfun::bessel_i_scaled(order(nu), x).unwrap();
            let want = bessel_i_scaled_integral(nu, x);
            assert!(
                (got - want).abs() <= 1e-10 * want.abs().max(1e-3),
                "I_{nu}({x}): {got} vs {want}"
            );
        }
    }
}

#[test]
fn bessel_i_sample_point() {
    // ascending series at (0.3, 2.0), summed in pairs to limit cancellation-free roundoff
    let (nu, x) = (0.3f64, 2.0f64);
    let mut term = (0.5 * x).powf(nu) / statrs::function::gamma::gamma(nu + 1.0);
    let mut sum = 0.0;
    for k in 0..60 {
        sum += term;
        let kf = k as f64;
        term *= 0.25 * x * x / ((kf + 1.0) * (kf + nu + 1.0));
    }
    let got = specfun::bessel_i(order(nu), x).unwrap();
    assert!((got - sum).abs() <= 1e-14 * sum);
}

#[test]
fn half_order_bessel_i() {
    let a = specfun::bessel_i(order(0.5), 1.0).unwrap();
    let b = specfun::bessel_i(order(-0.5), 1.0).unwrap();
    assert!((a - (2.0 / PI).sqrt() * 1f64.sinh()).abs() < 1e-14);
    assert!((b - (2.0 / PI).sqrt() * 1f64.cosh()).abs() < 1e-14);
    assert!((a - 0.937_674_888_2).abs() < 1e-9);
    assert!((b - 1.231_200_214_6).abs() < 1e-9);
}

#[test]
fn bessel_j_matches_schlafli_integral() {
    for nu in [-0.6, 0.0, 0.4, 1.0, 1.7] {
        for x in [0.5, 3.0, 9.0, 25.0] {
            let got = specfun::bessel_j(order(nu), x).unwrap();
            let want = bessel_j_integral(nu, x);
            assert!((got - want).abs() <= 1e-10, "J_{nu}({x}): {got} vs {want}");
        }
    }
}

#[test]
fn ln_gamma_matches_statrs() {
    for i in 1..400 {
        let x = 0.013 * i as f64 * (1.0 + 0.1 * i as f64);
        let got = specfun::ln_gamma(x).unwrap();
        let want = statrs::function::gamma::ln_gamma(x);
        assert!((got - want).abs() <= 1e-13 * want.abs().max(1.0), "ln_gamma({x})");
    }
    assert!(specfun::ln_gamma(0.0).is_err());
    assert!(specfun::ln_gamma(-1.5).is_err());
}

#[test]
fn laguerre_function_explicit_second_order() {
    let l2 = |a: f64, r: f64| (a + 1.0) * (a + 2.0) / 2.0 - (a + 2.0) * r + r * r / 2.0;
    for (a, r) in [(0.7f64, 1.5f64), (-0.4, 0.2), (1.3, 6.0), (0.0, 3.3)] {
        let norm = (2.0 / statrs::function::gamma::gamma(a + 3.0)).sqrt();
        let want = norm * (-0.5 * r).exp() * r.powf(0.5 * a) * l2(a, r);
        let got = specfun::laguerre_fn(2, order(a), r).unwrap();
        assert!((got - want).abs() <= 1e-14 * want.abs().max(1e-3), "({a}, {r}): {got} vs {want}");
        assert!((specfun::laguerre_poly(2, a, r) - l2(a, r)).abs() < 1e-13);
    }
}

#[test]
fn laguerre_function_at_origin() {
    assert_eq!(specfun::laguerre_fn(3, order(0.4), 0.0).unwrap(), 0.0);
    assert_eq!(specfun::laguerre_fn(3, order(0.0), 0.0).unwrap(), 1.0);
    assert!(specfun::laguerre_fn(3, order(-0.4), 0.0).is_err());
}

#[test]
fn incomplete_gamma_matches_statrs() {
    for a in [0.2, 0.7, 1.0, 3.5, 12.0] {
        for x in [0.01, 0.5, 2.0, 9.0, 30.0] {
            let got = specfun::gamma_q(a, x).unwrap();
            let want = statrs::function::gamma::gamma_ur(a, x);
            assert!((got - want).abs() <= 1e-12 * want.max(1e-200) + 1e-300, "Q({a}, {x})");
        }
    }
}

proptest! {
    #[test]
    fn bessel_i_three_term_recurrence(nu in 0.05f64..2.5, x in 0.05f64..60.0) {
        let lo = specfun::bessel_i_scaled(order(nu - 1.0), x).unwrap();
        let mid = specfun::bessel_i_scaled(order(nu), x).unwrap();
        let hi = specfun::bessel_i_scaled(order(nu + 1.0), x).unwrap();
        let lhs = lo - hi;
        let rhs = 2.0 * nu / x * mid;
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lo.abs().max(mid.abs()));
    }

    #[test]
    fn laguerre_functions_stay_bounded(m in 0usize..60, a in -0.9f64..2.0, rho in 0.01f64..80.0) {
        // orthonormal functions on (0, inf) with a bounded envelope for alpha >= 0
        let f = specfun::laguerre_fn(m, order(a), rho).unwrap();
        prop_assert!(f.is_finite());
        if a >= 0.0 {
            prop_assert!(f.abs() <= 1.0 + 1e-12);
        }
    }
}
