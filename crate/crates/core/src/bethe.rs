//! Logarithmic Bethe equations for the `2(L-r)` degenerate ground states.
//!
//! Roots are stored in the transformed variable `z = η̃ v`, in which ground
//! states have real roots. The equations read
//! `N p0(z_j) − Σ_l ϑ(z_j − z_l) = 2π(n_j − (n+1)/2 + β + 2η Σ_l z_l)`
//! with `n_j = j + k` and `β = (rn + 2ℓ)/L`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::density::{require_imaginary_tau, DensityModel};
use crate::error::{CsosError, Result};
use crate::model::{omega, ModelParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Newton iteration cap.
pub const MAX_NEWTON_ITERATIONS: usize = 50;
/// Residual (max-norm) a solved state must reach.
pub const RESIDUAL_TARGET: f64 = 1e-11;

/// Quantum numbers `(k, ℓ)` of a degenerate ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundStateLabel {
    pub k: i64,
    pub ell: i64,
}

impl GroundStateLabel {
    pub fn new(k: i64, ell: i64) -> Self {
        GroundStateLabel { k, ell }
    }

    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        let m = (p.l - p.r) as i64;
        if !(0..=1).contains(&self.k) || !(0..m).contains(&self.ell) {
            return Err(CsosError::InvalidParams(format!(
                "label (k={}, ell={}) outside k in {{0,1}}, 0 <= ell < {m}",
                self.k, self.ell
            )));
        }
        Ok(())
    }

    /// All `2(L-r)` canonical labels, k-major.
    pub fn all(p: &ModelParams) -> Vec<GroundStateLabel> {
        let m = (p.l - p.r) as i64;
        (0..2)
            .flat_map(|k| (0..m).map(move |ell| GroundStateLabel { k, ell }))
            .collect()
    }

    /// `β = (rn + 2ℓ)/L`.
    pub fn beta(&self, p: &ModelParams) -> f64 {
        (p.r as f64 * p.n as f64 + 2.0 * self.ell as f64) / p.l as f64
    }

    /// Thermodynamic value of `Σ_j x_j`, `(Lk + rn + 2ℓ)/(2(L−r))`.
    pub fn predicted_root_sum(&self, p: &ModelParams) -> f64 {
        (p.l as f64 * self.k as f64 + p.r as f64 * p.n as f64 + 2.0 * self.ell as f64) / (2.0 * (p.l - p.r) as f64)
    }
}

/// A solved ground state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheState {
    pub label: GroundStateLabel,
    pub roots: Vec<f64>,
    pub beta: f64,
    pub residual: f64,
    #[serde(rename = "N")]
    pub n_sites: usize,
}

impl BetheState {
    pub fn omega(&self) -> Complex64 {
        omega(self.beta)
    }

    /// Untransformed roots `v_j = z_j/η̃`.
    pub fn untransformed_roots(&self, p: &ModelParams) -> Vec<Complex64> {
        self.roots.iter().map(|&z| p.untransform(z)).collect()
    }

    pub fn root_sum(&self) -> f64 {
        self.roots.iter().sum()
    }

    /// Same roots, twist shifted to `-ω` (β → β − 1), as used for the even-L
    /// pair of states sharing one root set.
    pub fn with_opposite_twist(&self) -> BetheState {
        let mut s = self.clone();
        s.beta -= 1.0;
        s
    }
}

/// Path-unwrapped evaluation of `i log(θ1(c+z)/θ1(c−z))` on the real line,
/// with the branch fixed by value 0 at z = 0 and `f(z+1) = f(z) + 2π`.
fn unwrapped_log_ratio(z: f64, c: Complex64, deriv_bound: f64, p: &ModelParams) -> Result<f64> {
    let wraps = z.round();
    let f = z - wraps;
    let ratio_arg = |w: f64| -> Result<f64> {
        let wc = Complex64::new(w, 0.0);
        let lr = p.ctx_tilde().ln_theta1(c + wc)? - p.ctx_tilde().ln_theta1(c - wc)?;
        // i·log R = -arg R + i ln|R|; only the real part is kept.
        Ok(-lr.im)
    };
    // Each step changes the value by at most deriv_bound·|Δz| < 1 rad.
    let steps = ((f.abs() * deriv_bound).ceil() as usize).max(1);
    let mut prev = ratio_arg(0.0)?;
    let mut acc = 0.0;
    for i in 1..=steps {
        let w = f * i as f64 / steps as f64;
        let v = ratio_arg(w)?;
        let mut d = v - prev;
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        acc += d;
        prev = v;
    }
    Ok(acc + 2.0 * PI * wraps)
}

/// Shared evaluator with cached Fourier bounds.
pub struct BetheSystem<'a> {
    pub params: &'a ModelParams,
    pub density: DensityModel,
    p0_bound: f64,
    phase_bound: f64,
}

impl<'a> BetheSystem<'a> {
    pub fn new(p: &'a ModelParams) -> Result<Self> {
        require_imaginary_tau(p)?;
        let density = DensityModel::new(p)?;
        Ok(BetheSystem {
            params: p,
            p0_bound: density.p0_deriv_bound(),
            phase_bound: density.phase_deriv_bound(),
            density,
        })
    }

    /// Bare momentum p0(z).
    pub fn p0(&self, z: f64) -> Result<f64> {
        unwrapped_log_ratio(z, self.params.eta_tilde / 2.0, self.p0_bound, self.params)
    }

    /// Bare phase ϑ(z).
    pub fn phase(&self, z: f64) -> Result<f64> {
        unwrapped_log_ratio(z, self.params.eta_tilde, self.phase_bound, self.params)
    }

    /// p0'(z) = i[θ1'/θ1(η̃/2+z) + θ1'/θ1(η̃/2−z)].
    pub fn p0_deriv(&self, z: f64) -> Result<f64> {
        crate::density::p0_deriv(z, self.params)
    }

    /// ϑ'(z) = 2πK(z).
    pub fn phase_deriv(&self, z: f64) -> Result<f64> {
        Ok(2.0 * PI * crate::density::kernel_k(z, self.params)?)
    }

    pub fn residual(&self, roots: &[f64], label: GroundStateLabel, beta: f64) -> Result<Vec<f64>> {
        let p = self.params;
        let n = roots.len();
        check_distinct(roots)?;
        let nn = p.n_sites as f64;
        let sum: f64 = roots.iter().sum();
        let mut out = Vec::with_capacity(n);
        for (j, &zj) in roots.iter().enumerate() {
            let mut phase = 0.0;
            for &zl in roots {
                phase += self.phase(zj - zl)?;
            }
            let nj = (j + 1) as f64 + label.k as f64;
            let rhs = 2.0 * PI * (nj - (n as f64 + 1.0) / 2.0 + beta + 2.0 * p.eta * sum);
            out.push(nn * self.p0(zj)? - phase - rhs);
        }
        Ok(out)
    }

    /// Jacobian of [`BetheSystem::residual`].
    pub fn jacobian(&self, roots: &[f64]) -> Result<DMatrix<f64>> {
        let p = self.params;
        let n = roots.len();
        let nn = p.n_sites as f64;
        let mut phase_d = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            for l in 0..n {
                phase_d[(j, l)] = self.phase_deriv(roots[j] - roots[l])?;
            }
        }
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let row_sum: f64 = (0..n).map(|l| phase_d[(j, l)]).sum();
            for l in 0..n {
                jac[(j, l)] = phase_d[(j, l)] - 4.0 * PI * p.eta;
            }
            jac[(j, j)] += nn * self.p0_deriv(roots[j])? - row_sum;
        }
        Ok(jac)
    }

    /// Roots from inverting the thermodynamic counting function.
    pub fn initial_guess(&self, label: GroundStateLabel) -> Vec<f64> {
        let p = self.params;
        let n = p.n as f64;
        let nn = p.n_sites as f64;
        let sx = label.predicted_root_sum(p);
        (1..=p.n)
            .map(|j| {
                let target = j as f64 / n - (n + 1.0) / nn + 2.0 * sx / nn;
                self.density.invert_double_antiderivative(target)
            })
            .collect()
    }

    pub fn solve(&self, label: GroundStateLabel) -> Result<BetheState> {
        let p = self.params;
        label.validate(p)?;
        let beta = label.beta(p);
        let mut z = self.initial_guess(label);
        let mut res = self.residual(&z, label, beta)?;
        let mut norm = max_abs(&res);
        let mut iterations = 0;
        while norm >= 1e-13 && iterations < MAX_NEWTON_ITERATIONS {
            iterations += 1;
            let jac = self.jacobian(&z)?;
            let rhs = DVector::from_iterator(res.len(), res.iter().map(|r| -r));
            let step = jac
                .lu()
                .solve(&rhs)
                .ok_or_else(|| CsosError::Singular("Bethe Jacobian".into()))?;
            // Step halving until the residual norm decreases.
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial: Vec<f64> = z.iter().zip(step.iter()).map(|(a, b)| a + lambda * b).collect();
                if check_distinct(&trial).is_ok() && is_increasing(&trial) {
                    let tres = self.residual(&trial, label, beta)?;
                    let tnorm = max_abs(&tres);
                    if tnorm < norm {
                        z = trial;
                        res = tres;
                        norm = tnorm;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                // Rounding floor: no step can reduce the residual further.
                break;
            }
            log::debug!("newton iter {iterations}: residual {norm:e} (lambda {lambda})");
        }
        if norm >= RESIDUAL_TARGET {
            return Err(CsosError::NewtonConvergence {
                iterations,
                residual: norm,
            });
        }
        if !is_increasing(&z) {
            return Err(CsosError::Degenerate(
                "roots not strictly increasing after solve".into(),
            ));
        }
        Ok(BetheState {
            label,
            roots: z,
            beta,
            residual: norm,
            n_sites: p.n_sites,
        })
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn is_increasing(z: &[f64]) -> bool {
    z.windows(2).all(|w| w[1] > w[0])
}

fn check_distinct(z: &[f64]) -> Result<()> {
    for i in 0..z.len() {
        for j in 0..i {
            let d = z[i] - z[j];
            if (d - d.round()).abs() < 1e-14 {
                return Err(CsosError::Degenerate(format!(
                    "roots {} and {} coincide modulo 1",
                    z[j], z[i]
                )));
            }
        }
    }
    Ok(())
}

/// Bare momentum `p0(z) = i log[θ1(η̃/2+z)/θ1(η̃/2−z)]`.
pub fn bare_momentum(z: f64, p: &ModelParams) -> Result<f64> {
    BetheSystem::new(p)?.p0(z)
}

/// Bare phase `ϑ(z) = i log[θ1(η̃+z)/θ1(η̃−z)]`.
pub fn bare_phase(z: f64, p: &ModelParams) -> Result<f64> {
    BetheSystem::new(p)?.phase(z)
}

/// Components of the logarithmic Bethe equations at `roots`.
pub fn bethe_residual(roots: &[f64], label: GroundStateLabel, p: &ModelParams) -> Result<Vec<f64>> {
    BetheSystem::new(p)?.residual(roots, label, label.beta(p))
}

/// Newton solve for the ground state with the given label.
pub fn solve_ground_state(label: GroundStateLabel, p: &ModelParams) -> Result<BetheState> {
    BetheSystem::new(p)?.solve(label)
}

/// Predicted `x_j − y_j`: δ_j with `∫_{y_j}^{y_j+δ_j} ρ = (1/N)[L(k_x−k_y) + 2(ℓ_x−ℓ_y)]/(2(L−r))`.
pub fn predicted_root_shift(x: &BetheState, y: &BetheState, p: &ModelParams) -> Result<Vec<f64>> {
    let dm = DensityModel::new(p)?;
    let total = (p.l as f64 * (x.label.k - y.label.k) as f64 + 2.0 * (x.label.ell - y.label.ell) as f64)
        / (2.0 * (p.l - p.r) as f64);
    let target = total / p.n_sites as f64;
    Ok(y.roots
        .iter()
        .map(|&yj| {
            // The antiderivative is increasing, so bracket and run safeguarded
            // Newton; plain Newton overshoots where ρ is small near ±1/2.
            let f = |d: f64| dm.rho_antiderivative(yj + d) - dm.rho_antiderivative(yj) - target;
            let (mut lo, mut hi) = (-0.25, 0.25);
            while f(lo) > 0.0 {
                lo *= 2.0;
            }
            while f(hi) < 0.0 {
                hi *= 2.0;
            }
            let mut d = (target / dm.rho(yj)).clamp(lo, hi);
            for _ in 0..200 {
                let v = f(d);
                if v > 0.0 {
                    hi = d;
                } else {
                    lo = d;
                }
                let mut next = d - v / dm.rho(yj + d);
                if !(next > lo && next < hi) {
                    next = 0.5 * (lo + hi);
                }
                if (next - d).abs() < 1e-16 {
                    return next;
                }
                d = next;
            }
            d
        })
        .collect())
}

/// |Σx − (Lk + rn + 2ℓ)/(2(L−r))|.
pub fn sum_rule_gap(state: &BetheState, p: &ModelParams) -> f64 {
    (state.root_sum() - state.label.predicted_root_sum(p)).abs()
}

/// |Σ_j p0(x_j) − 2πΣ_j x_j|.
pub fn sum_px_gap(state: &BetheState, p: &ModelParams) -> Result<f64> {
    let sys = BetheSystem::new(p)?;
    let mut s = 0.0;
    for &x in &state.roots {
        s += sys.p0(x)?;
    }
    Ok((s - 2.0 * PI * state.root_sum()).abs())
}

/// |e^{2πi(1−η)Σ(x−y)} − e^{iπ(k_x−k_y)} ω_x/ω_y|.
pub fn twist_relation_gap(x: &BetheState, y: &BetheState, p: &ModelParams) -> f64 {
    let d = x.root_sum() - y.root_sum();
    let lhs = (I * 2.0 * PI * (1.0 - p.eta) * d).exp();
    let sign = if (x.label.k - y.label.k).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let rhs = x.omega() / y.omega() * sign;
    (lhs - rhs).norm()
}

/// Finite-size counting function ξ̂(z) built from the solved roots.
pub fn counting_function(z: f64, state: &BetheState, p: &ModelParams) -> Result<f64> {
    let sys = BetheSystem::new(p)?;
    let nn = p.n_sites as f64;
    let n = p.n as f64;
    let mut s = sys.p0(z)? / PI;
    for &x in &state.roots {
        s -= sys.phase(z - x)? / (PI * nn);
    }
    Ok(s + ((n + 1.0) / 2.0 - state.label.k as f64 - state.beta - 2.0 * p.eta * state.root_sum()) / n)
}

/// Derivative of the finite-size counting function.
pub fn counting_function_deriv(z: f64, state: &BetheState, p: &ModelParams) -> Result<f64> {
    let nn = p.n_sites as f64;
    let mut s = crate::density::p0_deriv(z, p)? / PI;
    for &x in &state.roots {
        s -= 2.0 * crate::density::kernel_k(z - x, p)? / nn;
    }
    Ok(s)
}

/// `ε(N) = max(floor, C e^{−cN})`, the N-dependent stand-in for "exponentially small".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpThreshold {
    pub c_pre: f64,
    pub rate: f64,
    pub floor: f64,
}

impl ExpThreshold {
    /// Least-squares fit of `ln gap = ln C − cN` on the supplied points.
    pub fn calibrate(ns: &[usize], gaps: &[f64], floor: f64) -> Option<Self> {
        let pts: Vec<(f64, f64)> = ns
            .iter()
            .zip(gaps)
            .filter(|(_, g)| **g > 0.0)
            .map(|(n, g)| (*n as f64, g.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx == 0.0 {
            return None;
        }
        let slope = sxy / sxx;
        Some(ExpThreshold {
            c_pre: (my - slope * mx).exp(),
            rate: -slope,
            floor,
        })
    }

    pub fn eval(&self, n_sites: usize) -> f64 {
        (self.c_pre * (-self.rate * n_sites as f64).exp()).max(self.floor)
    }
}
