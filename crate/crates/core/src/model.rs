//! Model parameters, face weights, `d(u)` and the transfer-matrix eigenvalue.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::bethe::BetheState;
use crate::elliptic::{ThetaContext, DEFAULT_TOL};
use crate::error::{CsosError, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The ℵ of the sector `N = 2n + ℵL`. Only `ℵ = 0` is treated, but the sign
/// factors `(-1)^{rℵ}` stay in the formulas.
pub const ALEPH: i64 = 0;

/// The homogeneous inhomogeneity point ξ.
pub const XI_HOMOGENEOUS: f64 = 0.5;

/// Cyclic SOS model on a lattice of width `n_sites`.
///
/// Serialized as `{r, L, tau_re, tau_im, N, tol}`; everything else is derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct ModelParams {
    pub r: u32,
    pub l: u32,
    pub tau: Complex64,
    pub n_sites: usize,
    pub eta: f64,
    pub eta_tilde: Complex64,
    pub tau_tilde: Complex64,
    pub q_tilde: Complex64,
    pub p_tilde: Complex64,
    pub s0: Complex64,
    pub n: usize,
    ctx: ThetaContext,
    ctx_tilde: ThetaContext,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ParamsRepr {
    r: u32,
    #[serde(rename = "L")]
    l: u32,
    tau_re: f64,
    tau_im: f64,
    #[serde(rename = "N")]
    n_sites: usize,
    #[serde(default = "default_tol")]
    tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl TryFrom<ParamsRepr> for ModelParams {
    type Error = CsosError;
    fn try_from(p: ParamsRepr) -> Result<Self> {
        ModelParams::with_tol(p.r, p.l, Complex64::new(p.tau_re, p.tau_im), p.n_sites, p.tol)
    }
}

impl From<ModelParams> for ParamsRepr {
    fn from(p: ModelParams) -> Self {
        ParamsRepr {
            r: p.r,
            l: p.l,
            tau_re: p.tau.re,
            tau_im: p.tau.im,
            n_sites: p.n_sites,
            tol: p.ctx.tol,
        }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ModelParams {
    pub fn new(r: u32, l: u32, tau: Complex64, n_sites: usize) -> Result<Self> {
        Self::with_tol(r, l, tau, n_sites, DEFAULT_TOL)
    }

    /// Purely imaginary quasi-period `tau = i·tau_im`.
    pub fn imaginary(r: u32, l: u32, tau_im: f64, n_sites: usize) -> Result<Self> {
        Self::new(r, l, Complex64::new(0.0, tau_im), n_sites)
    }

    pub fn with_tol(r: u32, l: u32, tau: Complex64, n_sites: usize, tol: f64) -> Result<Self> {
        if r == 0 || l == 0 {
            return Err(CsosError::InvalidParams("r and L must be positive".into()));
        }
        if gcd(r, l) != 1 {
            return Err(CsosError::InvalidParams(format!("r={r} and L={l} are not coprime")));
        }
        if 2 * r >= l {
            return Err(CsosError::InvalidParams(format!(
                "eta = r/L = {r}/{l} must lie in (0, 1/2)"
            )));
        }
        if n_sites == 0 || n_sites % 2 != 0 {
            return Err(CsosError::InvalidParams(format!(
                "N = {n_sites} must be even and positive"
            )));
        }
        if tau.im.is_nan() || tau.im <= 0.0 {
            return Err(CsosError::InvalidParams(format!("tau = {tau} must have Im > 0")));
        }
        let eta = r as f64 / l as f64;
        let tau_tilde = -1.0 / tau;
        let eta_tilde = -eta / tau;
        let ctx = ThetaContext::new(tau, tol)?;
        let ctx_tilde = ThetaContext::new(tau_tilde, tol)?;
        Ok(ModelParams {
            r,
            l,
            tau,
            n_sites,
            eta,
            eta_tilde,
            tau_tilde,
            q_tilde: (I * 2.0 * PI * eta_tilde).exp(),
            p_tilde: (I * 2.0 * PI * tau_tilde).exp(),
            s0: tau / (2.0 * eta),
            n: n_sites / 2,
            ctx,
            ctx_tilde,
        })
    }

    /// Same model at another lattice width.
    pub fn with_n_sites(&self, n_sites: usize) -> Result<Self> {
        let mut p = Self::with_tol(self.r, self.l, self.tau, n_sites, self.ctx.tol)?;
        p.s0 = self.s0;
        Ok(p)
    }

    /// Move the dynamical gauge `s0` away from `tau/(2 eta)`.
    ///
    /// Only the finite-size formulas and the oracle depend on `s0`; closed
    /// thermodynamic forms other than result1 assume the default gauge.
    pub fn with_s0(mut self, s0: Complex64) -> Self {
        self.s0 = s0;
        self
    }

    pub fn is_default_gauge(&self) -> bool {
        (self.s0 - self.tau / (2.0 * self.eta)).norm() < 1e-14 * self.s0.norm().max(1.0)
    }

    /// Theta context at quasi-period `tau`.
    pub fn ctx(&self) -> &ThetaContext {
        &self.ctx
    }

    /// Theta context at the Jacobi-transformed quasi-period `-1/tau`.
    pub fn ctx_tilde(&self) -> &ThetaContext {
        &self.ctx_tilde
    }

    pub fn theta_tol(&self) -> f64 {
        self.ctx.tol
    }

    /// Number of degenerate ground states, `2(L-r)`.
    pub fn ground_state_count(&self) -> usize {
        2 * (self.l - self.r) as usize
    }

    /// `[u] = θ1(ηu; τ)`.
    pub fn bracket(&self, u: Complex64) -> Result<Complex64> {
        self.ctx.theta1(u * self.eta)
    }

    /// `d[u]/du`.
    pub fn bracket_deriv(&self, u: Complex64) -> Result<Complex64> {
        Ok(self.ctx.theta1_deriv(u * self.eta)? * self.eta)
    }

    /// `[u]'/[u]`.
    pub fn bracket_logderiv(&self, u: Complex64) -> Result<Complex64> {
        Ok(self.ctx.theta1_logderiv(u * self.eta)? * self.eta)
    }

    /// A logarithm of `[u]`.
    pub fn ln_bracket(&self, u: Complex64) -> Result<Complex64> {
        self.ctx.ln_theta1(u * self.eta)
    }

    /// `iπηη̃u² + ln θ1(η̃u; τ̃)`: the log of `[u]` up to the u-independent
    /// constant `ln(-i(-iτ)^{-1/2})` of Jacobi's transformation.
    pub fn ln_bracket_tilde(&self, u: Complex64) -> Result<Complex64> {
        Ok(I * PI * self.eta * self.eta_tilde * u * u + self.ctx_tilde.ln_theta1(self.eta_tilde * u)?)
    }

    /// `[u]'/[u]` evaluated through the transformed theta function.
    pub fn bracket_logderiv_tilde(&self, u: Complex64) -> Result<Complex64> {
        let et = self.eta_tilde;
        Ok(I * 2.0 * PI * self.eta * et * u + et * self.ctx_tilde.theta1_logderiv(et * u)?)
    }

    /// θ1(z; τ̃).
    pub fn th(&self, z: Complex64) -> Result<Complex64> {
        self.ctx_tilde.theta1(z)
    }

    /// θ1'(z; τ̃)/θ1(z; τ̃).
    pub fn th_logderiv(&self, z: Complex64) -> Result<Complex64> {
        self.ctx_tilde.theta1_logderiv(z)
    }

    /// θ1'(0; τ̃).
    pub fn th_prime_zero(&self) -> Result<Complex64> {
        self.ctx_tilde.theta1_prime_zero()
    }

    /// Is `[u]` zero, i.e. is `ηu` on the lattice `Z + τZ`?
    pub fn bracket_vanishes(&self, u: Complex64) -> bool {
        on_lattice(u * self.eta, self.tau)
    }

    /// Untransformed root `v = z/η̃`.
    pub fn untransform(&self, z: f64) -> Complex64 {
        Complex64::new(z, 0.0) / self.eta_tilde
    }
}

/// Is `w` within 1e-12 of a point of `Z + tau Z`?
pub fn on_lattice(w: Complex64, tau: Complex64) -> bool {
    let m = (w.im / tau.im).round();
    let w1 = w - tau * m;
    let w2 = w1 - w1.re.round();
    w2.norm() < 1e-12
}

/// The twist `ω = e^{iπβ}`.
pub fn omega(beta: f64) -> Complex64 {
    (I * PI * beta).exp()
}

/// `ω^s := e^{iπβs}` for complex `s`; the power is tied to β, not to a
/// branch of `log ω`.
pub fn omega_pow(beta: f64, s: Complex64) -> Complex64 {
    (I * PI * beta * s).exp()
}

/// `b(u;s) = [s+1][u]/([s][u+1])`.
pub fn weight_b(u: Complex64, s: Complex64, p: &ModelParams) -> Result<Complex64> {
    check_weight_poles(u, s, p)?;
    Ok(p.bracket(s + 1.0)? * p.bracket(u)? / (p.bracket(s)? * p.bracket(u + 1.0)?))
}

/// `c(u;s) = [s+u][1]/([s][u+1])`.
pub fn weight_c(u: Complex64, s: Complex64, p: &ModelParams) -> Result<Complex64> {
    check_weight_poles(u, s, p)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(p.bracket(s + u)? * p.bracket(one)? / (p.bracket(s)? * p.bracket(u + 1.0)?))
}

fn check_weight_poles(u: Complex64, s: Complex64, p: &ModelParams) -> Result<()> {
    if p.bracket_vanishes(s) {
        return Err(CsosError::SingularWeight(format!("[s] = 0 at s = {s}")));
    }
    if p.bracket_vanishes(u + 1.0) {
        return Err(CsosError::SingularWeight(format!("[u+1] = 0 at u = {u}")));
    }
    Ok(())
}

/// `d(u) = Π_j [u-ξ_j]/[u-ξ_j+1]` at the homogeneous point.
pub fn fn_d(u: Complex64, p: &ModelParams) -> Result<Complex64> {
    let xi = vec![Complex64::new(XI_HOMOGENEOUS, 0.0); p.n_sites];
    fn_d_inhomogeneous(u, &xi, p)
}

/// `d(u)` for an explicit inhomogeneity array.
pub fn fn_d_inhomogeneous(u: Complex64, xi: &[Complex64], p: &ModelParams) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for &x in xi {
        if p.bracket_vanishes(u - x + 1.0) {
            return Err(CsosError::Pole(format!("d(u) has a pole at u = {u}")));
        }
        if p.bracket_vanishes(u - x) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        acc += p.ln_bracket(u - x)? - p.ln_bracket(u - x + 1.0)?;
    }
    Ok(acc.exp())
}

/// Eigenvalue of the transfer matrix on the Bethe state.
pub fn eigenvalue_tau(u: Complex64, state: &BetheState, p: &ModelParams) -> Result<Complex64> {
    let vs = state.untransformed_roots(p);
    eigenvalue_from_roots(u, &vs, state.beta, p)
}

/// Eigenvalue for explicit untransformed roots `v_l` and twist exponent β:
/// `ω a(u) Π[v_l-u+1]/[v_l-u] + (-1)^{rℵ} ω^{-1} d(u) Π[u-v_l+1]/[u-v_l]`.
pub fn eigenvalue_from_roots(u: Complex64, vs: &[Complex64], beta: f64, p: &ModelParams) -> Result<Complex64> {
    let w = omega(beta);
    let mut l1 = Complex64::new(0.0, 0.0);
    let mut l2 = Complex64::new(0.0, 0.0);
    for &v in vs {
        if p.bracket_vanishes(v - u) {
            return Err(CsosError::Pole(format!(
                "spectral parameter {u} collides with root {v}"
            )));
        }
        l1 += p.ln_bracket(v - u + 1.0)? - p.ln_bracket(v - u)?;
        l2 += p.ln_bracket(u - v + 1.0)? - p.ln_bracket(u - v)?;
    }
    let a = 1.0;
    let sign = if (p.r as i64 * ALEPH) % 2 == 0 { 1.0 } else { -1.0 };
    let d = fn_d(u, p)?;
    let t1 = w * a * l1.exp();
    let t2 = if d == Complex64::new(0.0, 0.0) {
        Complex64::new(0.0, 0.0)
    } else {
        d * l2.exp() * sign / w
    };
    Ok(t1 + t2)
}
