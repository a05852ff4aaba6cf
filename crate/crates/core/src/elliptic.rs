//! Jacobi theta functions with quasi-periods 1 and `tau`.
//!
//! θ1 is summed from its defining series
//! `θ1(z;τ) = -i Σ_k (-1)^k e^{iπτ(k+1/2)^2} e^{2iπ(k+1/2)z}`
//! after pulling the argument back to the fundamental cell, so arguments far
//! from the origin (the dynamical parameter can sit at `Im z ~ L Im τ`) cost
//! nothing extra. θ2, θ3 and θ4 are built from θ1:
//!
//! - `θ2(z) = θ1(z + 1/2)`
//! - `θ4(z) = -i e^{iπτ/4} e^{iπz} θ1(z + τ/2)`
//! - `θ3(z) = θ4(z + 1/2)`

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{CsosError, Result};

/// Hard cap on the number of summed term pairs.
pub const MAX_TERMS: usize = 500;
/// Default relative truncation tolerance.
pub const DEFAULT_TOL: f64 = 1e-17;
/// Distance to a lattice zero below which θ1 is treated as vanishing.
pub const POLE_EPS: f64 = 1e-12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Evaluation settings for one quasi-period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaContext {
    pub quasi_period: Complex64,
    pub tol: f64,
}

impl ThetaContext {
    pub fn new(quasi_period: Complex64, tol: f64) -> Result<Self> {
        let ctx = ThetaContext { quasi_period, tol };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn with_tau(quasi_period: Complex64) -> Result<Self> {
        Self::new(quasi_period, DEFAULT_TOL)
    }

    pub fn validate(&self) -> Result<()> {
        if self.quasi_period.im.is_nan() || self.quasi_period.im <= 0.0 || !self.quasi_period.re.is_finite() {
            return Err(CsosError::InvalidContext(format!(
                "quasi-period {} must have positive imaginary part",
                self.quasi_period
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1e-6) {
            return Err(CsosError::InvalidContext(format!(
                "tolerance {} outside (0, 1e-6)",
                self.tol
            )));
        }
        Ok(())
    }

    /// θ1(z).
    pub fn theta1(&self, z: Complex64) -> Result<Complex64> {
        let r = self.theta1_reduced(z)?;
        Ok(r.factor_ln.exp() * r.value)
    }

    /// θ1(z) and θ1'(z).
    pub fn theta1_with_deriv(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let r = self.theta1_reduced(z)?;
        let f = r.factor_ln.exp();
        Ok((f * r.value, f * (r.deriv + r.shift * r.value)))
    }

    /// θ1'(z).
    pub fn theta1_deriv(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.theta1_with_deriv(z)?.1)
    }

    /// θ1'(0), the constant that appears in every residue computation.
    pub fn theta1_prime_zero(&self) -> Result<Complex64> {
        self.theta1_deriv(Complex64::new(0.0, 0.0))
    }

    /// A logarithm of θ1(z) (not the principal one), exact up to 2πi.
    ///
    /// Products of many theta values are formed as the exponential of sums of
    /// these logs so that large lattices neither overflow nor underflow.
    pub fn ln_theta1(&self, z: Complex64) -> Result<Complex64> {
        let r = self.theta1_reduced(z)?;
        if r.value == Complex64::new(0.0, 0.0) {
            return Err(CsosError::Pole(format!("log of θ1 at its zero {z}")));
        }
        Ok(r.factor_ln + r.value.ln())
    }

    /// θ1'(z)/θ1(z) by term-wise differentiation.
    pub fn theta1_logderiv(&self, z: Complex64) -> Result<Complex64> {
        let r = self.theta1_reduced(z)?;
        if near_lattice_zero(r.reduced, self.quasi_period) {
            return Err(CsosError::Pole(format!(
                "θ1'/θ1 evaluated within {POLE_EPS:e} of a zero at {z}"
            )));
        }
        Ok(r.deriv / r.value + r.shift)
    }

    /// θ_kind(z) for kind in 1..=4.
    pub fn theta(&self, kind: u8, z: Complex64) -> Result<Complex64> {
        Ok(self.ln_theta_kind(kind, z)?.exp())
    }

    fn ln_theta_kind(&self, kind: u8, z: Complex64) -> Result<Complex64> {
        let tau = self.quasi_period;
        match kind {
            1 => self.ln_theta1_allow_zero(z),
            2 => self.ln_theta1_allow_zero(z + 0.5),
            4 => {
                let pre = -I * PI * 0.5 + I * PI * tau / 4.0 + I * PI * z;
                Ok(pre + self.ln_theta1_allow_zero(z + tau / 2.0)?)
            }
            3 => self.ln_theta_kind(4, z + 0.5),
            _ => Err(CsosError::InvalidParams(format!("theta kind {kind} not in 1..=4"))),
        }
    }

    // ln θ1 that maps an exact zero to -inf so exp() returns 0.
    fn ln_theta1_allow_zero(&self, z: Complex64) -> Result<Complex64> {
        let r = self.theta1_reduced(z)?;
        if r.value == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
        }
        Ok(r.factor_ln + r.value.ln())
    }

    fn theta1_reduced(&self, z: Complex64) -> Result<Reduced> {
        self.validate()?;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(CsosError::InvalidParams(format!("non-finite argument {z}")));
        }
        let tau = self.quasi_period;
        let m = (z.im / tau.im).round();
        let z1 = z - tau * m;
        let n = z1.re.round();
        let z2 = z1 - n;
        // θ1(z2 + n + mτ) = (-1)^{m+n} e^{-iπτm²} e^{-2iπ m z2} θ1(z2)
        let factor_ln = I * PI * (m + n) - I * PI * tau * (m * m) - I * 2.0 * PI * m * z2;
        let (value, deriv) = theta1_series(z2, tau, self.tol)?;
        Ok(Reduced {
            reduced: z2,
            factor_ln,
            shift: -I * 2.0 * PI * m,
            value,
            deriv,
        })
    }
}

struct Reduced {
    reduced: Complex64,
    factor_ln: Complex64,
    shift: Complex64,
    value: Complex64,
    deriv: Complex64,
}

fn near_lattice_zero(z: Complex64, tau: Complex64) -> bool {
    for a in -1..=1 {
        for b in -1..=1 {
            let w = tau * (b as f64) + (a as f64);
            if (z - w).norm() < POLE_EPS {
                return true;
            }
        }
    }
    false
}

/// Raw series for θ1 and θ1' near the fundamental cell. Term pairs k and
/// -1-k are summed together; summation stops once three consecutive pairs
/// fall below `tol` times the largest pair seen.
fn theta1_series(z: Complex64, tau: Complex64, tol: f64) -> Result<(Complex64, Complex64)> {
    let mut val = Complex64::new(0.0, 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    let mut largest = 0.0_f64;
    let mut quiet = 0;
    for j in 0..MAX_TERMS {
        let h = j as f64 + 0.5;
        let g = (I * PI * tau * (h * h)).exp();
        let ep = (I * 2.0 * PI * h * z).exp();
        let em = (-I * 2.0 * PI * h * z).exp();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let tv = g * (ep - em) * sign;
        let td = g * (ep + em) * (I * 2.0 * PI * h * sign);
        val += tv;
        der += td;
        let mag = g.norm() * (ep.norm() + em.norm());
        largest = largest.max(mag);
        if mag <= tol * largest {
            quiet += 1;
            if quiet >= 3 {
                return Ok((-I * val, -I * der));
            }
        } else {
            quiet = 0;
        }
    }
    Err(CsosError::SeriesConvergence { terms: MAX_TERMS })
}

/// Which line of Jacobi's imaginary transformation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JacobiLine {
    /// θ1(z;τ) = -i(-iτ)^{-1/2} e^{-iπz²/τ} θ1(-z/τ; -1/τ)
    Theta1,
    /// θ2(z;τ) = (-iτ)^{-1/2} e^{-iπz²/τ} θ4(-z/τ; -1/τ)
    Theta2To4,
}

/// Both sides of Jacobi's imaginary transformation, evaluated independently.
pub fn jacobi_transform(z: Complex64, tau: Complex64, line: JacobiLine) -> Result<(Complex64, Complex64)> {
    let direct = ThetaContext::with_tau(tau)?;
    let dual = ThetaContext::with_tau(-1.0 / tau)?;
    let w = -z / tau;
    let pre = (-I * tau).powf(-0.5) * (-I * PI * z * z / tau).exp();
    match line {
        JacobiLine::Theta1 => Ok((direct.theta(1, z)?, -I * pre * dual.theta(1, w)?)),
        JacobiLine::Theta2To4 => Ok((direct.theta(2, z)?, pre * dual.theta(4, w)?)),
    }
}

/// θ_kind(z) for the given context; free-function form of [`ThetaContext::theta`].
pub fn theta_eval(kind: u8, z: Complex64, ctx: &ThetaContext) -> Result<Complex64> {
    ctx.theta(kind, z)
}

/// θ1'(z)/θ1(z); free-function form of [`ThetaContext::theta1_logderiv`].
pub fn theta1_logderiv(z: Complex64, ctx: &ThetaContext) -> Result<Complex64> {
    ctx.theta1_logderiv(z)
}
