//! Independent reference evaluations used to freeze expected values.
//!
//! Everything here is deliberately naive: fixed-length theta sums with no
//! argument reduction, composite Simpson quadrature, bisection and a dense
//! Nyström solve. None of it calls into the library's numerical kernels.

#![allow(dead_code)]

use std::f64::consts::PI;

use csos::Complex64 as C;

pub const I: C = C { re: 0.0, im: 1.0 };

pub fn c(x: f64) -> C {
    C::new(x, 0.0)
}

/// `2Σ_{n<terms} (−1)^n q^{(n+½)²} sin((2n+1)πz)`, with each exponential
/// formed in one piece so large Im z cannot overflow against a tiny nome power.
pub fn theta1(z: C, tau: C, terms: usize) -> C {
    (0..terms)
        .map(|n| {
            let h = n as f64 + 0.5;
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            let a = I * PI * tau * (h * h);
            -I * s * ((a + 2.0 * PI * I * h * z).exp() - (a - 2.0 * PI * I * h * z).exp())
        })
        .sum()
}

/// `2Σ q^{(n+½)²} cos((2n+1)πz)`.
pub fn theta2(z: C, tau: C, terms: usize) -> C {
    (0..terms)
        .map(|n| {
            let h = n as f64 + 0.5;
            let a = I * PI * tau * (h * h);
            (a + 2.0 * PI * I * h * z).exp() + (a - 2.0 * PI * I * h * z).exp()
        })
        .sum()
}

/// `2π Σ (−1)^n (2n+1) q^{(n+½)²}`.
pub fn theta1_prime0(tau: C, terms: usize) -> C {
    (0..terms)
        .map(|n| {
            let h = n as f64 + 0.5;
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            2.0 * PI * s * 2.0 * h * (I * PI * tau * (h * h)).exp()
        })
        .sum()
}

/// Term-by-term derivative of [`theta1`].
pub fn theta1_deriv(z: C, tau: C, terms: usize) -> C {
    (0..terms)
        .map(|n| {
            let h = n as f64 + 0.5;
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            let a = I * PI * tau * (h * h);
            2.0 * PI * h * s * ((a + 2.0 * PI * I * h * z).exp() + (a - 2.0 * PI * I * h * z).exp())
        })
        .sum()
}

/// θ1 with the default 200 terms.
pub fn th(z: C, tau: C) -> C {
    theta1(z, tau, 200)
}

/// Central difference of `ln θ1` with step `h`.
pub fn logderiv_fd(z: C, tau: C, h: f64) -> C {
    (th(z + h, tau).ln() - th(z - h, tau).ln()) / (2.0 * h)
}

/// θ1'/θ1 from the two naive series.
pub fn logderiv(z: C, tau: C) -> C {
    theta1_deriv(z, tau, 200) / th(z, tau)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    assert!(fa * f(b) <= 0.0, "root not bracketed");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || (b - a) < 1e-16 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Model constants for `(r, L, τ)` recomputed from scratch.
#[derive(Debug, Clone, Copy)]
pub struct Consts {
    pub r: f64,
    pub l: f64,
    pub eta: f64,
    pub tau: C,
    pub tau_t: C,
    pub eta_t: C,
    pub s0: C,
}

impl Consts {
    pub fn new(r: u32, l: u32, tau: C) -> Self {
        let eta = r as f64 / l as f64;
        Consts {
            r: r as f64,
            l: l as f64,
            eta,
            tau,
            tau_t: -1.0 / tau,
            eta_t: -eta / tau,
            s0: tau / (2.0 * eta),
        }
    }

    /// `[u] = θ1(ηu; τ)`.
    pub fn bracket(&self, u: C) -> C {
        th(u * self.eta, self.tau)
    }

    /// θ1 at the transformed quasi-period.
    pub fn tht(&self, z: C) -> C {
        th(z, self.tau_t)
    }

    pub fn ld_t(&self, z: C) -> C {
        logderiv(z, self.tau_t)
    }

    /// `p0'(z) = i[ld(η̃/2+z) + ld(η̃/2−z)]`.
    pub fn p0_deriv(&self, z: f64) -> f64 {
        let h = self.eta_t / 2.0;
        (I * (self.ld_t(h + z) + self.ld_t(h - z))).re
    }

    /// `K(z) = (i/2π)[ld(z+η̃) − ld(z−η̃)]`.
    pub fn kernel(&self, z: f64) -> f64 {
        (I / (2.0 * PI) * (self.ld_t(c(z) + self.eta_t) - self.ld_t(c(z) - self.eta_t))).re
    }

    /// `p0(z)` by quadrature of `p0'` from 0.
    pub fn p0(&self, z: f64) -> f64 {
        simpson(|w| self.p0_deriv(w), 0.0, z, 400)
    }

    /// `ϑ(z)` by quadrature of `2πK` from 0.
    pub fn phase(&self, z: f64) -> f64 {
        simpson(|w| 2.0 * PI * self.kernel(w), 0.0, z, 400)
    }
}

/// Nyström solution of `ρ(z) + ∫K(z−w)ρ(w)dw = p0'(z)/(2π)` on a uniform
/// periodic grid, evaluated at the grid point nearest `z`.
pub fn lieb_nystrom(k: &Consts, grid: usize, z: f64) -> f64 {
    let h = 1.0 / grid as f64;
    let pts: Vec<f64> = (0..grid).map(|i| -0.5 + i as f64 * h).collect();
    let kv: Vec<f64> = (0..grid).map(|i| k.kernel(i as f64 * h)).collect();
    let mut a = nalgebra::DMatrix::<f64>::zeros(grid, grid);
    let mut b = nalgebra::DVector::<f64>::zeros(grid);
    for i in 0..grid {
        for j in 0..grid {
            let d = (i as isize - j as isize).rem_euclid(grid as isize) as usize;
            a[(i, j)] = h * kv[d] + if i == j { 1.0 } else { 0.0 };
        }
        b[i] = k.p0_deriv(pts[i]) / (2.0 * PI);
    }
    let sol = a.lu().solve(&b).expect("regular system");
    let idx = ((z + 0.5) / h).round() as usize % grid;
    sol[idx]
}

/// Relative difference with a floor on the scale.
pub fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}
