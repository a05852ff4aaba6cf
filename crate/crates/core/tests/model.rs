mod common;

use common::{rel, Consts, I};
use csos::model::{fn_d, fn_d_inhomogeneous, omega, omega_pow, weight_b, weight_c, XI_HOMOGENEOUS};
use csos::{Complex64 as C, ModelParams};

fn p8() -> ModelParams {
    ModelParams::imaginary(1, 3, 1.0, 8).unwrap()
}

#[test]
fn derived_constants() {
    let p = p8();
    let k = Consts::new(1, 3, I);
    assert!((p.eta - 1.0 / 3.0).abs() < 1e-16);
    assert!((p.eta_tilde - k.eta_t).norm() < 1e-16);
    assert!((p.tau_tilde - k.tau_t).norm() < 1e-16);
    assert!((p.s0 - k.s0).norm() < 1e-16);
    assert_eq!(p.n, 4);
    assert_eq!(p.ground_state_count(), 4);
}

#[test]
fn weight_b_frozen() {
    let p = p8();
    let s = p.s0 + 1.0;
    let want = C::new(0.1086032321922225, -0.18810631602312916);
    let got = weight_b(C::new(0.2, 0.0), s, &p).unwrap();
    assert!(rel(got, want) < 1e-12, "{got}");
}

#[test]
fn weight_c_frozen() {
    let p = p8();
    let s = p.s0 + 1.0;
    let want = C::new(0.9124491123746261, -0.193947046025214);
    let got = weight_c(C::new(0.2, 0.0), s, &p).unwrap();
    assert!(rel(got, want) < 1e-12, "{got}");
}

#[test]
fn fn_d_frozen_and_zero_at_inhomogeneity() {
    let p = p8();
    let got = fn_d(C::new(0.31, 0.0), &p).unwrap();
    assert!(rel(got, C::new(2.2524989075984055e-5, 0.0)) < 1e-12, "{got}");
    assert_eq!(fn_d(C::new(XI_HOMOGENEOUS, 0.0), &p).unwrap(), C::new(0.0, 0.0));
    let xi = [C::new(0.1, 0.0), C::new(0.4, 0.0)];
    assert_eq!(fn_d_inhomogeneous(C::new(0.4, 0.0), &xi, &p).unwrap(), C::new(0.0, 0.0));
}

#[test]
fn weights_reject_poles() {
    let p = p8();
    let s_pole = C::new(0.0, 0.0);
    assert!(weight_b(C::new(0.2, 0.0), s_pole, &p).is_err());
    assert!(weight_c(C::new(-1.0, 0.0), p.s0, &p).is_err());
}

#[test]
fn twist_powers() {
    let beta = 0.7;
    assert!((omega_pow(beta, C::new(3.0, 0.0)) - omega(beta).powi(3)).norm() < 1e-14);
    let s = C::new(0.2, 1.5);
    assert!((omega_pow(beta, s) * omega_pow(-beta, s) - 1.0).norm() < 1e-14);
}

#[test]
fn invalid_parameters_rejected() {
    assert!(ModelParams::imaginary(0, 3, 1.0, 8).is_err());
    assert!(ModelParams::imaginary(2, 4, 1.0, 8).is_err());
    assert!(ModelParams::imaginary(2, 3, 1.0, 8).is_err());
    assert!(ModelParams::imaginary(1, 3, 1.0, 7).is_err());
    assert!(ModelParams::imaginary(1, 3, -1.0, 8).is_err());
    assert!(ModelParams::with_tol(1, 3, I, 8, 1.0).is_err());
}

#[test]
fn params_json_roundtrip() {
    let p = ModelParams::with_tol(2, 5, C::new(0.0, 0.7), 12, 1e-15).unwrap();
    let s = serde_json::to_string(&p).unwrap();
    let q: ModelParams = serde_json::from_str(&s).unwrap();
    assert_eq!(q.r, 2);
    assert_eq!(q.l, 5);
    assert_eq!(q.n_sites, 12);
    assert_eq!(q.tau, p.tau);
    assert_eq!(q.theta_tol(), 1e-15);
}
