mod common;

use std::f64::consts::PI;

use common::{logderiv, logderiv_fd, rel, theta1, theta1_prime0, theta2, I};
use csos::elliptic::{jacobi_transform, theta1_logderiv, theta_eval, DEFAULT_TOL};
use csos::{Complex64 as C, JacobiLine, ThetaContext};
use proptest::prelude::*;

const TAU: C = C { re: 0.0, im: 1.0 };

#[test]
fn theta1_frozen_at_imaginary_tau() {
    // Naive 200-term series; the sum is real on the real line for τ = i.
    let z = C::new(0.3, 0.0);
    let want = 0.7371971637186816;
    assert!((theta1(z, TAU, 200) - want).norm() < 1e-15);
    let got = ThetaContext::with_tau(TAU).unwrap().theta1(z).unwrap();
    assert!((got - want).norm() < 1e-12, "{got}");
}

#[test]
fn logderiv_frozen_at_imaginary_tau() {
    let z = C::new(0.3, 0.0);
    let want = 2.304835039993462;
    assert!((logderiv(z, TAU) - want).norm() < 1e-14);
    assert!((logderiv_fd(z, TAU, 1e-4) - want).norm() < 1e-6);
    let ctx = ThetaContext::with_tau(TAU).unwrap();
    let got = theta1_logderiv(z, &ctx).unwrap();
    assert!((got - want).norm() < 1e-12, "{got}");
}

#[test]
fn matches_naive_series_off_axis() {
    let taus = [TAU, C::new(0.0, 0.3), C::new(0.2, 0.8), C::new(-0.4, 1.7)];
    let zs = [
        C::new(0.13, 0.05),
        C::new(-0.41, 0.22),
        C::new(0.7, -0.3),
        C::new(1.9, 0.4),
    ];
    for &tau in &taus {
        let ctx = ThetaContext::with_tau(tau).unwrap();
        for &z in &zs {
            assert!(
                rel(ctx.theta1(z).unwrap(), theta1(z, tau, 200)) < 1e-12,
                "θ1 τ={tau} z={z}"
            );
            assert!(
                rel(ctx.theta(2, z).unwrap(), theta2(z, tau, 200)) < 1e-12,
                "θ2 τ={tau} z={z}"
            );
        }
        assert!(rel(ctx.theta1_prime_zero().unwrap(), theta1_prime0(tau, 200)) < 1e-12);
    }
}

#[test]
fn derivative_matches_finite_difference() {
    let tau = C::new(0.1, 0.9);
    let ctx = ThetaContext::with_tau(tau).unwrap();
    let z = C::new(0.21, -0.07);
    let h = 1e-6;
    let fd = (theta1(z + h, tau, 200) - theta1(z - h, tau, 200)) / (2.0 * h);
    let (_, d) = ctx.theta1_with_deriv(z).unwrap();
    assert!(rel(d, fd) < 1e-8);
}

#[test]
fn jacobi_transformation_lines() {
    for z in [C::new(0.3, 0.1), C::new(-0.2, 0.45)] {
        for tau in [TAU, C::new(0.0, 0.4), C::new(0.3, 1.1)] {
            for line in [JacobiLine::Theta1, JacobiLine::Theta2To4] {
                let (a, b) = jacobi_transform(z, tau, line).unwrap();
                assert!(rel(a, b) < 1e-12, "{line:?} τ={tau} z={z}");
            }
        }
    }
}

#[test]
fn free_functions_agree_with_context() {
    let ctx = ThetaContext::with_tau(C::new(0.0, 0.6)).unwrap();
    let z = C::new(0.17, 0.02);
    for kind in 1..=4 {
        assert_eq!(theta_eval(kind, z, &ctx).unwrap(), ctx.theta(kind, z).unwrap());
    }
}

#[test]
fn context_rejects_bad_quasi_period() {
    assert!(ThetaContext::with_tau(C::new(0.3, -0.1)).is_err());
    assert!(ThetaContext::new(TAU, 0.0).is_err());
    assert!(ThetaContext::with_tau(TAU).unwrap().theta(5, C::new(0.1, 0.0)).is_err());
    assert_eq!(ThetaContext::with_tau(TAU).unwrap().tol, DEFAULT_TOL);
}

proptest! {
    #[test]
    fn odd_and_quasi_periodic(re in -1.0f64..1.0, im in -0.4f64..0.4, ti in 0.3f64..2.0, tr in -0.5f64..0.5) {
        let tau = C::new(tr, ti);
        let ctx = ThetaContext::with_tau(tau).unwrap();
        let z = C::new(re, im);
        let t = ctx.theta1(z).unwrap();
        let scale = t.norm().max(1e-3);
        prop_assert!((ctx.theta1(-z).unwrap() + t).norm() < 1e-12 * scale);
        prop_assert!((ctx.theta1(z + 1.0).unwrap() + t).norm() < 1e-12 * scale);
        let shifted = -(-I * PI * tau - 2.0 * PI * I * z).exp() * t;
        let got = ctx.theta1(z + tau).unwrap();
        prop_assert!((got - shifted).norm() < 1e-11 * shifted.norm().max(1e-3));
    }
}
