//! Ground-state root density, the kernel `K`, their Fourier data and the
//! thermodynamic counting function.
//!
//! All series here assume a purely imaginary quasi-period, for which
//! `q̃ = e^{2iπη̃}` and `p̃ = e^{2iπτ̃}` are real and every coefficient is real.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::bethe::BetheState;
use crate::error::{CsosError, Result};
use crate::model::ModelParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const MAX_CUTOFF: usize = 20_000;

/// Fourier description of the density for one parameter set.
#[derive(Debug, Clone)]
pub struct DensityModel {
    pub params: ModelParams,
    pub fourier_cutoff: usize,
    // indices 1..=cutoff; index 0 unused
    p_coeff: Vec<f64>,
    k_coeff: Vec<f64>,
    rho_coeff: Vec<f64>,
}

impl DensityModel {
    pub fn new(params: &ModelParams) -> Result<Self> {
        require_imaginary_tau(params)?;
        let t = params.tau.im;
        // |q̃|^{1/2} = e^{-πη/t} governs the slowest series (ρ and p0').
        let decay = PI * params.eta / t;
        let cutoff = ((17.0 * std::f64::consts::LN_10) / decay).ceil() as usize + 2;
        if cutoff > MAX_CUTOFF {
            return Err(CsosError::InvalidParams(format!(
                "Fourier cutoff {cutoff} needed for |q̃| = {:e} exceeds {MAX_CUTOFF}",
                params.q_tilde.norm()
            )));
        }
        let a = 2.0 * PI * params.eta / t; // -ln q̃
        let b = 2.0 * PI / t; // -ln p̃
        let mut p_coeff = vec![0.0; cutoff + 1];
        let mut k_coeff = vec![0.0; cutoff + 1];
        let mut rho_coeff = vec![0.0; cutoff + 1];
        for m in 1..=cutoff {
            let mf = m as f64;
            let den = -(-b * mf).exp_m1();
            // q̃^{m/2}(1 - p̃^m q̃^{-m}) with the exponents combined so that
            // q̃^{-m} never overflows on its own.
            p_coeff[m] = 2.0 * PI * ((-a * mf / 2.0).exp() - (-(b - a / 2.0) * mf).exp()) / den;
            k_coeff[m] = ((-a * mf).exp() - (-(b - a) * mf).exp()) / den;
            rho_coeff[m] = 1.0 / (2.0 * (PI * mf * params.eta / t).cosh());
        }
        Ok(DensityModel {
            params: params.clone(),
            fourier_cutoff: cutoff,
            p_coeff,
            k_coeff,
            rho_coeff,
        })
    }

    /// `(p'_m, k_m)`.
    pub fn coeffs(&self, m: i64) -> (f64, f64) {
        let m = m.unsigned_abs() as usize;
        if m == 0 {
            (2.0 * PI, 1.0)
        } else if m > self.fourier_cutoff {
            (0.0, 0.0)
        } else {
            (self.p_coeff[m], self.k_coeff[m])
        }
    }

    /// Fourier coefficient of ρ, `1/(2cosh(iπmη̃))`.
    pub fn rho_coeff(&self, m: i64) -> f64 {
        let m = m.unsigned_abs() as usize;
        if m == 0 {
            0.5
        } else if m > self.fourier_cutoff {
            0.0
        } else {
            self.rho_coeff[m]
        }
    }

    fn cos_sum(&self, c: &[f64], z: f64) -> f64 {
        (1..=self.fourier_cutoff)
            .map(|m| c[m] * (2.0 * PI * m as f64 * z).cos())
            .sum()
    }

    /// ρ(z) from its Fourier series.
    pub fn rho(&self, z: f64) -> f64 {
        0.5 + 2.0 * self.cos_sum(&self.rho_coeff, z)
    }

    /// ρ'(z).
    pub fn rho_deriv(&self, z: f64) -> f64 {
        -(1..=self.fourier_cutoff)
            .map(|m| {
                let w = 2.0 * PI * m as f64;
                2.0 * self.rho_coeff[m] * w * (w * z).sin()
            })
            .sum::<f64>()
    }

    /// `∫_0^z ρ`, integrated term by term.
    pub fn rho_antiderivative(&self, z: f64) -> f64 {
        0.5 * z
            + (1..=self.fourier_cutoff)
                .map(|m| {
                    let w = 2.0 * PI * m as f64;
                    2.0 * self.rho_coeff[m] * (w * z).sin() / w
                })
                .sum::<f64>()
    }

    /// ρ from the product form `½ Π(1-q̃^m)²/(1+q̃^m)² · θ3(z;η̃)/θ4(z;η̃)`.
    pub fn rho_theta_product(&self, z: f64) -> Result<f64> {
        let p = &self.params;
        let q = p.q_tilde.re;
        let mut prod = 1.0;
        let mut m = 1;
        loop {
            let qm = q.powi(m);
            let f = ((1.0 - qm) / (1.0 + qm)).powi(2);
            prod *= f;
            if (f - 1.0).abs() < 1e-17 && m >= 30 {
                break;
            }
            m += 1;
        }
        let ctx = crate::elliptic::ThetaContext::new(p.eta_tilde, p.theta_tol())?;
        let zc = Complex64::new(z, 0.0);
        let v = 0.5 * prod * ctx.theta(3, zc)? / ctx.theta(4, zc)?;
        Ok(v.re)
    }

    /// K(z) from its Fourier series `1 + 2Σ k_m cos(2πmz)`.
    pub fn kernel_fourier(&self, z: f64) -> f64 {
        1.0 + 2.0 * self.cos_sum(&self.k_coeff, z)
    }

    /// p0'(z) from its Fourier series.
    pub fn p0_deriv_fourier(&self, z: f64) -> f64 {
        2.0 * PI + 2.0 * self.cos_sum(&self.p_coeff, z)
    }

    /// p0(z) from its Fourier series.
    pub fn p0_fourier(&self, z: f64) -> f64 {
        2.0 * PI * z
            + (1..=self.fourier_cutoff)
                .map(|m| self.p_coeff[m] * (2.0 * PI * m as f64 * z).sin() / (PI * m as f64))
                .sum::<f64>()
    }

    /// ϑ(z) from its Fourier series.
    pub fn phase_fourier(&self, z: f64) -> f64 {
        2.0 * PI * z
            + (1..=self.fourier_cutoff)
                .map(|m| 2.0 * self.k_coeff[m] * (2.0 * PI * m as f64 * z).sin() / m as f64)
                .sum::<f64>()
    }

    /// Upper bound on |p0'| over the real line.
    pub fn p0_deriv_bound(&self) -> f64 {
        2.0 * PI + 2.0 * self.p_coeff.iter().map(|c| c.abs()).sum::<f64>()
    }

    /// Upper bound on |ϑ'| over the real line.
    pub fn phase_deriv_bound(&self) -> f64 {
        2.0 * PI * (1.0 + 2.0 * self.k_coeff.iter().map(|c| c.abs()).sum::<f64>())
    }

    /// Solves `2∫_0^z ρ = target` for z (the inverse thermodynamic counting
    /// function up to its additive constant).
    pub fn invert_double_antiderivative(&self, target: f64) -> f64 {
        let f = |z: f64| 2.0 * self.rho_antiderivative(z) - target;
        // 2∫ρ is z plus a bounded periodic part, so the root is within the
        // bound of that part from `target`.
        let osc: f64 = (1..=self.fourier_cutoff)
            .map(|m| 2.0 * self.rho_coeff[m] / (PI * m as f64))
            .sum();
        let mut lo = target - osc - 1e-9;
        let mut hi = target + osc + 1e-9;
        let mut z = target;
        for _ in 0..200 {
            let fz = f(z);
            if fz.abs() < 1e-15 {
                break;
            }
            if fz > 0.0 {
                hi = z;
            } else {
                lo = z;
            }
            let step = fz / (2.0 * self.rho(z));
            let next = z - step;
            z = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if (hi - lo).abs() < 1e-16 {
                break;
            }
        }
        z
    }

    /// Trapezoid approximation of `∫_{-1/2}^{1/2} f ρ` on `grid` points.
    pub fn integrate_against_rho(&self, grid: usize, f: impl Fn(f64) -> f64) -> f64 {
        let h = 1.0 / grid as f64;
        (0..grid)
            .map(|i| {
                let z = -0.5 + i as f64 * h;
                f(z) * self.rho(z)
            })
            .sum::<f64>()
            * h
    }
}

pub(crate) fn require_imaginary_tau(p: &ModelParams) -> Result<()> {
    if p.tau.re != 0.0 {
        return Err(CsosError::InvalidParams(format!(
            "real-root ground-state machinery requires purely imaginary tau, got {}",
            p.tau
        )));
    }
    Ok(())
}

/// `K(z) = (i/2π)[θ1'/θ1(z+η̃) − θ1'/θ1(z−η̃)]` at quasi-period τ̃.
pub fn kernel_k(z: f64, p: &ModelParams) -> Result<f64> {
    let zc = Complex64::new(z, 0.0);
    let v = I / (2.0 * PI) * (p.th_logderiv(zc + p.eta_tilde)? - p.th_logderiv(zc - p.eta_tilde)?);
    Ok(v.re)
}

/// `p0'(z) = i[θ1'/θ1(z+η̃/2) − θ1'/θ1(z−η̃/2)]` at quasi-period τ̃.
pub fn p0_deriv(z: f64, p: &ModelParams) -> Result<f64> {
    let zc = Complex64::new(z, 0.0);
    let h = p.eta_tilde / 2.0;
    Ok((I * (p.th_logderiv(zc + h)? - p.th_logderiv(zc - h)?)).re)
}

/// `(p'_m, k_m)`, the Fourier coefficients of p0' and K.
pub fn fourier_coeffs(m: i64, p: &ModelParams) -> Result<(f64, f64)> {
    Ok(DensityModel::new(p)?.coeffs(m))
}

/// ρ(z) from the Fourier series.
pub fn rho_eval(z: f64, p: &ModelParams) -> Result<f64> {
    Ok(DensityModel::new(p)?.rho(z))
}

/// Max over a periodic grid of `|ρ + K*ρ − p0'/2π|`, where `K` and `p0'`
/// come from theta functions and ρ from its Fourier series.
pub fn lieb_residual(p: &ModelParams, grid_size: usize) -> Result<f64> {
    if grid_size < 64 {
        return Err(CsosError::InvalidParams(format!("grid size {grid_size} < 64")));
    }
    let dm = DensityModel::new(p)?;
    let h = 1.0 / grid_size as f64;
    let zs: Vec<f64> = (0..grid_size).map(|i| -0.5 + i as f64 * h).collect();
    let rho: Vec<f64> = zs.iter().map(|&z| dm.rho(z)).collect();
    // K is 1-periodic, so K(z_i - z_j) only depends on (i - j) mod grid.
    let kdiff: Vec<f64> = (0..grid_size)
        .map(|d| kernel_k(d as f64 * h, p))
        .collect::<Result<_>>()?;
    let mut worst = 0.0_f64;
    for (i, &z) in zs.iter().enumerate() {
        let conv: f64 = (0..grid_size)
            .map(|j| kdiff[(i + grid_size - j) % grid_size] * rho[j])
            .sum::<f64>()
            * h;
        let r = rho[i] + conv - p0_deriv(z, p)? / (2.0 * PI);
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Thermodynamic counting function `2∫_0^z ρ + (n+1)/N − (2/N)Σ x_j`.
pub fn thermo_counting(z: f64, state: &BetheState, p: &ModelParams) -> Result<f64> {
    let dm = DensityModel::new(p)?;
    Ok(thermo_counting_with(&dm, z, state))
}

pub fn thermo_counting_with(dm: &DensityModel, z: f64, state: &BetheState) -> f64 {
    let nn = state.n_sites as f64;
    let n = (state.n_sites / 2) as f64;
    let sx: f64 = state.roots.iter().sum();
    2.0 * dm.rho_antiderivative(z) + (n + 1.0) / nn - 2.0 * sx / nn
}
