//! Thermodynamic-limit closed forms: Fredholm determinants of the difference
//! kernels, the limiting form factor and four equivalent expressions for the
//! spontaneous staggered polarization.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::BetheState;
use crate::density::{kernel_k, DensityModel};
use crate::elliptic::ThetaContext;
use crate::error::{CsosError, Result};
use crate::formfactor::{det_phi_tilde, log_det};
use crate::model::ModelParams;

type C = Complex64;
const I: C = C { re: 0.0, im: 1.0 };

/// Minimum number of factors in a truncated infinite product.
pub const MIN_PRODUCT_FACTORS: usize = 30;
const MAX_PRODUCT_FACTORS: usize = 100_000;
/// Regularization points for the even-L α → 0 limit.
pub const ALPHA_STEPS: [f64; 3] = [1e-5, 5e-6, 2.5e-6];

/// `Π_{m≥1} f(m)`, stopped at the first factor within 1e-16 of 1 once at
/// least [`MIN_PRODUCT_FACTORS`] factors are in.
pub fn truncated_product(f: impl Fn(usize) -> C) -> Result<(C, usize)> {
    let mut acc = C::new(1.0, 0.0);
    for m in 1..=MAX_PRODUCT_FACTORS {
        let x = f(m);
        acc *= x;
        if m >= MIN_PRODUCT_FACTORS && (x - 1.0).norm() < 1e-16 {
            return Ok((acc, m));
        }
    }
    Err(CsosError::SeriesConvergence {
        terms: MAX_PRODUCT_FACTORS,
    })
}

/// `q̃^m`, `p̃^m` and `p̃^m q̃^{−m}` with exponents combined.
fn nome_powers(p: &ModelParams, m: f64) -> (C, C, C) {
    let qm = (2.0 * PI * I * p.eta_tilde * m).exp();
    let pm = (2.0 * PI * I * p.tau_tilde * m).exp();
    let pq = (2.0 * PI * I * (p.tau_tilde - p.eta_tilde) * m).exp();
    (qm, pm, pq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FredholmKind {
    /// `det[1 + K̂ − V̂_0]`
    KMinusV0,
    /// `det[1 + (−1)^k K̂ + (1−(−1)^k)/2 · V̂]`
    KPlusV { k: i64 },
    /// `det[1 + (−1)^k K̂ − (1−(−1)^k)/2 · V̂]`
    KMinusV { k: i64 },
    /// `det[1 + (−1)^k K̂]`
    Staggered { k: i64 },
}

/// Closed product form of the Fredholm determinant.
pub fn fredholm_closed(kind: FredholmKind, p: &ModelParams) -> Result<C> {
    let sigma = |k: i64| if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let modes = |s: f64| {
        truncated_product(|m| {
            let (qm, pm, pq) = nome_powers(p, m as f64);
            let f = (1.0 + s * qm) * (1.0 - s * pq) / (1.0 - pm);
            f * f
        })
        .map(|x| x.0)
    };
    match kind {
        FredholmKind::KMinusV0 => Ok(modes(1.0)? * 2.0 * (1.0 - p.eta)),
        FredholmKind::KPlusV { k } | FredholmKind::KMinusV { k } => {
            let s = sigma(k);
            let pm = if matches!(kind, FredholmKind::KPlusV { .. }) {
                1.0
            } else {
                -1.0
            };
            let zero_mode = 1.0 + s + pm * I * (1.0 - s) * p.th_prime_zero()? / (2.0 * PI);
            Ok(zero_mode * modes(s)?)
        }
        FredholmKind::Staggered { k } => {
            let s = sigma(k);
            Ok(modes(s)? * (1.0 + s))
        }
    }
}

/// `det(I + h[K(z_i−z_j) − 2η])` on a periodic `grid`-point rule.
pub fn fredholm_nystrom(grid: usize, p: &ModelParams) -> Result<C> {
    if grid < 8 {
        return Err(CsosError::InvalidParams(format!("grid size {grid} too small")));
    }
    let h = 1.0 / grid as f64;
    let kd: Vec<f64> = (0..grid).map(|d| kernel_k(d as f64 * h, p)).collect::<Result<_>>()?;
    let a = DMatrix::<C>::from_fn(grid, grid, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        C::new(delta + h * (kd[(i + grid - j) % grid] - 2.0 * p.eta), 0.0)
    });
    Ok(log_det(a)?.value())
}

/// `|det Φ̃ / [(−2πiη̃N)^n Π ρ(y_l)] / det[1+K̂−V̂_0] − 1|`.
pub fn fred_norm_gap(state: &BetheState, p: &ModelParams) -> Result<f64> {
    let dm = DensityModel::new(p)?;
    let det = det_phi_tilde(&state.roots, p)?;
    let n = state.roots.len() as f64;
    let mut ln = det.ln() - n * (-2.0 * PI * I * p.eta_tilde * p.n_sites as f64).ln();
    for &y in &state.roots {
        ln -= dm.rho(y).ln();
    }
    let closed = fredholm_closed(FredholmKind::KMinusV0, p)?;
    Ok((ln.exp() / closed - 1.0).norm())
}

/// `Π (1−q̃^m)²(1+p̃^m q̃^{−m})² / ((1+q̃^m)²(1−p̃^m q̃^{−m})²)`.
pub fn product_factor(p: &ModelParams) -> Result<C> {
    Ok(truncated_product(|m| {
        let (qm, _, pq) = nome_powers(p, m as f64);
        let f = (1.0 - qm) * (1.0 + pq) / ((1.0 + qm) * (1.0 - pq));
        f * f
    })?
    .0)
}

fn site_sign(m: usize) -> f64 {
    if (m + 1) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Richardson extrapolation to α = 0 from values at h, h/2, h/4.
fn richardson(f: impl Fn(f64) -> Result<C>) -> Result<C> {
    let [a, b, c] = ALPHA_STEPS;
    let (fa, fb, fc) = (f(a)?, f(b)?, f(c)?);
    let r1 = fb * 2.0 - fa;
    let r2 = fc * 2.0 - fb;
    Ok((r2 * 4.0 - r1) / 3.0)
}

/// `Σ_s e^{2πi(c + ηα)(s − t)} θ1(η̃(s0+s)+g+α)θ1'(0)/(θ1(η̃(s0+s))θ1(g+α))`.
fn s_sum(p: &ModelParams, s0: C, c: f64, g: f64, alpha: f64, t: i64) -> Result<C> {
    let et = p.eta_tilde;
    let tp = p.th_prime_zero()?;
    let ga = C::new(g + alpha, 0.0);
    let den_g = p.th(ga)?;
    let mut tot = C::new(0.0, 0.0);
    for s in 0..p.l as i64 {
        let sc = s0 + s as f64;
        tot += (2.0 * PI * I * (c + p.eta * alpha) * (s - t) as f64).exp() * p.th(et * sc + ga)? * tp
            / (p.th(et * sc)? * den_g);
    }
    Ok(tot)
}

/// Thermodynamic limit of the normalized σ^z form factor between the ground
/// states `(0, ℓ)` and `(k, ℓ + dell)`, k odd. Only the label difference
/// `dell` enters, through γ̃ and the twist ratio.
pub fn ff_limit(k: i64, dell: i64, m: usize, p: &ModelParams) -> Result<C> {
    if k.rem_euclid(2) == 0 {
        return Ok(C::new(0.0, 0.0));
    }
    let lr = (p.l - p.r) as f64;
    let g = (p.l as f64 + 2.0 * dell as f64) / (2.0 * lr);
    let c = (p.r as f64 + 2.0 * dell as f64) / (2.0 * lr);
    // The sum runs over s ∈ s0 + Z/LZ, so the twist factor keeps its s0 part.
    let full =
        |a: f64| -> Result<C> { Ok((2.0 * PI * I * (c + p.eta * a) * p.s0).exp() * s_sum(p, p.s0, c, g, a, 0)?) };
    let sum = if p.l % 2 == 1 { full(0.0)? } else { richardson(full)? };
    Ok(product_factor(p)? * site_sign(m) * I / (PI * lr) * sum)
}

/// Even-L limit of the opposite-twist form factor:
/// `(−1)^{m−1} Π · i e^{−iπs0}/(π(L−r)) · {Σ_s (−1)^s θ1'/θ1(η̃(s0+s)) − iπηL}`.
pub fn ff_limit_bis(m: usize, p: &ModelParams) -> Result<C> {
    if p.l % 2 != 0 {
        return Err(CsosError::NotApplicable(format!("L = {} is odd", p.l)));
    }
    let mut sum = C::new(0.0, 0.0);
    for s in 0..p.l {
        let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
        sum += p.th_logderiv(p.eta_tilde * (p.s0 + s as f64))? * sign;
    }
    sum -= I * PI * p.eta * p.l as f64;
    let lr = (p.l - p.r) as f64;
    Ok(product_factor(p)? * site_sign(m) * I * (-I * PI * p.s0).exp() / (PI * lr) * sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    Result1,
    Result2,
    Result3,
    Result4,
}

impl std::str::FromStr for Formula {
    type Err = CsosError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "result1" => Ok(Formula::Result1),
            "result2" => Ok(Formula::Result2),
            "result3" => Ok(Formula::Result3),
            "result4" => Ok(Formula::Result4),
            _ => Err(CsosError::InvalidParams(format!("unknown formula {s}"))),
        }
    }
}

/// Polarized ground state `(ε, t)` and the site parity at which σ^z acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationQuery {
    pub epsilon: i64,
    pub t: i64,
    /// m mod 2.
    pub site_parity: u8,
    pub formula: Formula,
}

impl PolarizationQuery {
    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        if !(0..=1).contains(&self.epsilon) {
            return Err(CsosError::InvalidParams(format!(
                "epsilon {} not in {{0,1}}",
                self.epsilon
            )));
        }
        if !(0..(p.l - p.r) as i64).contains(&self.t) {
            return Err(CsosError::InvalidParams(format!(
                "t = {} outside 0..{}",
                self.t,
                p.l - p.r
            )));
        }
        if self.site_parity > 1 {
            return Err(CsosError::InvalidParams(format!(
                "site parity {} not in {{0,1}}",
                self.site_parity
            )));
        }
        Ok(())
    }

    /// A representative site with this parity.
    pub fn site(&self) -> usize {
        if self.site_parity == 1 {
            1
        } else {
            2
        }
    }

    /// `(−1)^{m−1+ε}`.
    fn sign(&self) -> f64 {
        site_sign(self.site()) * if self.epsilon == 0 { 1.0 } else { -1.0 }
    }
}

/// Spontaneous staggered polarization in the state `(ε, t)`.
pub fn polarization(q: &PolarizationQuery, p: &ModelParams) -> Result<C> {
    q.validate(p)?;
    match q.formula {
        Formula::Result1 => result1(q, p),
        Formula::Result2 => result2(q, p),
        Formula::Result3 => result3(q, p),
        Formula::Result4 => result4(q, p),
    }
}

/// Double sum over ℓ and s, at the gauge `p.s0`.
fn result1(q: &PolarizationQuery, p: &ModelParams) -> Result<C> {
    let lr = (p.l - p.r) as f64;
    let mut tot = C::new(0.0, 0.0);
    for ell in 0..(p.l - p.r) {
        let g = (p.l as f64 + 2.0 * ell as f64) / (2.0 * lr);
        let c = (p.r as f64 + 2.0 * ell as f64) / (2.0 * lr);
        // A term is singular only when g is an integer, which needs L even.
        let singular = (g - g.round()).abs() < 1e-12;
        tot += if singular {
            richardson(|a| s_sum(p, p.s0, c, g, a, q.t))?
        } else {
            s_sum(p, p.s0, c, g, 0.0, q.t)?
        };
    }
    Ok(I * q.sign() / (PI * lr) * product_factor(p)? * tot)
}

fn require_default_gauge(p: &ModelParams) -> Result<()> {
    if !p.is_default_gauge() {
        return Err(CsosError::Gauge("closed forms assume s0 = -1/(2 eta_tilde)".into()));
    }
    Ok(())
}

/// `(−1)^{m+ε} (i/π) θ1'(0;ητ̃)θ1(η̃t;(1−η)τ̃) / (θ2(0;ητ̃)θ2(η̃t;(1−η)τ̃))`.
fn result2(q: &PolarizationQuery, p: &ModelParams) -> Result<C> {
    require_default_gauge(p)?;
    let tol = p.theta_tol();
    let a = ThetaContext::new(p.tau_tilde * p.eta, tol)?;
    let b = ThetaContext::new(p.tau_tilde * (1.0 - p.eta), tol)?;
    let zero = C::new(0.0, 0.0);
    let z = p.eta_tilde * q.t as f64;
    Ok(-q.sign() * I / PI * a.theta1_prime_zero()? * b.theta(1, z)? / (a.theta(2, zero)? * b.theta(2, z)?))
}

/// Product form.
fn result3(q: &PolarizationQuery, p: &ModelParams) -> Result<C> {
    require_default_gauge(p)?;
    let t = q.t as f64;
    let e = |x: C| (2.0 * PI * I * x).exp();
    let (tt, et) = (p.tau_tilde, p.eta_tilde);
    let (a, _) = truncated_product(|k| {
        let k = k as f64;
        let qk = e(et * k);
        let w = e(tt * k - et * (k + t));
        (1.0 - qk) * (1.0 - qk) * (1.0 - w) / ((1.0 + qk) * (1.0 + qk) * (1.0 + w))
    })?;
    // k = 0 factor of the second product, then k ≥ 1.
    let w0 = e(-et * (-t));
    let (b, _) = truncated_product(|k| {
        let k = k as f64;
        let w = e(tt * k - et * (k - t));
        (1.0 - w) / (1.0 + w)
    })?;
    Ok(q.sign() * a * b * (1.0 - w0) / (1.0 + w0))
}

/// Jacobi-transformed form with θ4 at τ/η and τ/(1−η).
fn result4(q: &PolarizationQuery, p: &ModelParams) -> Result<C> {
    require_default_gauge(p)?;
    let tol = p.theta_tol();
    let a = ThetaContext::new(p.tau / p.eta, tol)?;
    let b = ThetaContext::new(p.tau / (1.0 - p.eta), tol)?;
    let zero = C::new(0.0, 0.0);
    let z = C::new(p.eta * q.t as f64 / (1.0 - p.eta), 0.0);
    Ok(
        -q.sign() * I * p.tau / (PI * p.eta) * a.theta1_prime_zero()? * b.theta(1, z)?
            / (a.theta(4, zero)? * b.theta(4, z)?),
    )
}

/// `|result1 − result2|`.
pub fn identity_result1_eq_result2(p: &ModelParams, q: &PolarizationQuery) -> Result<f64> {
    let a = polarization(
        &PolarizationQuery {
            formula: Formula::Result1,
            ..*q
        },
        p,
    )?;
    let b = polarization(
        &PolarizationQuery {
            formula: Formula::Result2,
            ..*q
        },
        p,
    )?;
    Ok((a - b).norm())
}

/// `|result3 / [(−1)^{m−1+ε}(1−q̃^t)/(1+q̃^t)] − 1|`, the deviation from
/// the completely ordered low-temperature value.
pub fn low_temperature_gap(q: &PolarizationQuery, p: &ModelParams) -> Result<f64> {
    let v = polarization(
        &PolarizationQuery {
            formula: Formula::Result3,
            ..*q
        },
        p,
    )?;
    let qt = (2.0 * PI * I * p.eta_tilde * q.t as f64).exp();
    let ordered = q.sign() * (1.0 - qt) / (1.0 + qt);
    Ok((v / ordered - 1.0).norm())
}
