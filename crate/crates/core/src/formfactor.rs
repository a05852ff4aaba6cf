//! Finite-size determinant representations: norms, σ^z form factors between
//! Bethe states, mean values and the even-L opposite-twist form factor.
//!
//! Large-N work goes through the theta-transformed matrices in the real root
//! variable `z = η̃v`. The untransformed determinants with complex roots are
//! kept for small-N comparisons with the oracle.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bethe::BetheState;
use crate::density::{kernel_k, p0_deriv, require_imaginary_tau, DensityModel};
use crate::error::{CsosError, Result};
use crate::model::{eigenvalue_from_roots, omega, omega_pow, ModelParams, XI_HOMOGENEOUS};

type C = Complex64;
const I: C = C { re: 0.0, im: 1.0 };

/// Determinant stored as `exp(ln_abs) · phase`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDet {
    pub ln_abs: f64,
    pub phase: C,
}

impl LogDet {
    pub fn value(&self) -> C {
        self.phase * self.ln_abs.exp()
    }

    /// A complex logarithm `ln|det| + i arg det`.
    pub fn ln(&self) -> C {
        C::new(self.ln_abs, self.phase.arg())
    }
}

/// Partial-pivot LU determinant in log form.
pub fn log_det(m: DMatrix<C>) -> Result<LogDet> {
    if m.nrows() != m.ncols() {
        return Err(CsosError::InvalidParams("determinant of a non-square matrix".into()));
    }
    if m.nrows() == 0 {
        return Ok(LogDet {
            ln_abs: 0.0,
            phase: C::new(1.0, 0.0),
        });
    }
    let lu = m.lu();
    let mut ln_abs = 0.0;
    let mut phase: C = lu.p().determinant();
    for d in lu.u().diagonal().iter() {
        let a = d.norm();
        if a == 0.0 || !a.is_finite() {
            return Err(CsosError::Singular("zero pivot in LU".into()));
        }
        ln_abs += a.ln();
        phase *= d / a;
    }
    Ok(LogDet { ln_abs, phase })
}

/// `det num / det den`; an exactly singular numerator gives zero.
fn det_ratio(num: DMatrix<C>, den: DMatrix<C>) -> Result<C> {
    let d = log_det(den)?;
    match log_det(num) {
        Ok(n) => Ok((n.ln() - d.ln()).exp()),
        Err(CsosError::Singular(_)) => Ok(C::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

/// A σ^z matrix element with its factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormFactorResult {
    pub value_re: f64,
    pub value_im: f64,
    pub site: usize,
    pub gamma_tilde: f64,
    pub parts: BTreeMap<String, C>,
}

impl FormFactorResult {
    pub fn value(&self) -> C {
        C::new(self.value_re, self.value_im)
    }

    pub fn parts_product(&self) -> C {
        self.parts.values().product()
    }
}

fn check_site(m: usize, p: &ModelParams) -> Result<()> {
    if m == 0 || m > p.n_sites {
        return Err(CsosError::InvalidParams(format!("site {m} outside 1..={}", p.n_sites)));
    }
    Ok(())
}

fn check_pair(x: &BetheState, y: &BetheState, p: &ModelParams) -> Result<()> {
    for s in [x, y] {
        if s.n_sites != p.n_sites || s.roots.len() != p.n {
            return Err(CsosError::InvalidParams(format!(
                "state solved at N = {} used with N = {}",
                s.n_sites, p.n_sites
            )));
        }
    }
    Ok(())
}

fn cz(x: f64) -> C {
    C::new(x, 0.0)
}

/// Transformed Gaudin matrix `Φ̃({y})`.
pub fn phi_tilde_matrix(ys: &[f64], p: &ModelParams) -> Result<DMatrix<C>> {
    let n = ys.len();
    let et = p.eta_tilde;
    let nn = p.n_sites as f64;
    let mut kmat = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            kmat[(j, k)] = kernel_k(ys[j] - ys[k], p)?;
        }
    }
    let mut phi = DMatrix::<C>::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            phi[(j, k)] = -2.0 * PI * I * et * kmat[(j, k)] + 4.0 * PI * I * et * p.eta;
        }
        let row: f64 = (0..n).map(|l| kmat[(j, l)]).sum();
        phi[(j, j)] += -2.0 * PI * I * et * nn * (p0_deriv(ys[j], p)? / (2.0 * PI) - row / nn);
    }
    Ok(phi)
}

/// `det Φ̃({y})`.
pub fn det_phi_tilde(ys: &[f64], p: &ModelParams) -> Result<LogDet> {
    log_det(phi_tilde_matrix(ys, p)?)
}

/// `log'[u]`, through the transformed theta function.
fn ld(u: C, p: &ModelParams) -> Result<C> {
    p.bracket_logderiv_tilde(u)
}

/// Untransformed Gaudin matrix `Φ({u})` at the homogeneous point.
pub fn phi_matrix(us: &[C], p: &ModelParams) -> Result<DMatrix<C>> {
    phi_matrix_signed(us, 1.0, p)
}

// sign = +1: Φ; sign = −1: Φ^{(−)} (off-diagonal part enters with + sign).
fn phi_matrix_signed(us: &[C], sign: f64, p: &ModelParams) -> Result<DMatrix<C>> {
    let n = us.len();
    let nn = p.n_sites as f64;
    let xi = cz(XI_HOMOGENEOUS);
    let mut phi = DMatrix::<C>::zeros(n, n);
    for j in 0..n {
        let mut diag = -nn * (ld(us[j] - xi, p)? - ld(us[j] - xi + 1.0, p)?);
        for k in 0..n {
            let g = ld(us[j] - us[k] - 1.0, p)? - ld(us[j] - us[k] + 1.0, p)?;
            diag += g;
            phi[(j, k)] -= g * sign;
        }
        phi[(j, j)] += diag;
    }
    Ok(phi)
}

/// Squared norm `⟨u|u⟩` in log form.
pub fn norm_determinant(state: &BetheState, p: &ModelParams) -> Result<LogDet> {
    let vs = state.untransformed_roots(p);
    let n = vs.len();
    let nn = p.n_sites as f64;
    let one = cz(1.0);
    let half = cz(0.5);
    let mut ln = C::new(0.0, 0.0);
    for &v in &vs {
        ln += nn * (p.ln_bracket(v - half)? - p.ln_bracket(v + half)?);
    }
    for j in 0..n {
        for k in 0..n {
            ln += p.ln_bracket(vs[j] - vs[k] + one)?;
            if j != k {
                ln -= p.ln_bracket(vs[j] - vs[k])?;
            }
        }
    }
    let d0 = -p.ctx().theta1_prime_zero()? * p.eta;
    ln -= n as f64 * d0.ln();
    let det = det_phi_tilde(&state.roots, p)?;
    let total = ln + det.ln();
    Ok(LogDet {
        ln_abs: total.re,
        phase: C::new(0.0, total.im).exp(),
    })
}

/// Transformed numerator pieces for bra roots `xs` and ket roots `ys`.
struct Ratio1 {
    base: C,
    s_sum: C,
    prefactor: C,
    det_ratio: C,
}

fn ratio1_transformed(xs: &[f64], beta_x: f64, ys: &[f64], beta_y: f64, p: &ModelParams) -> Result<Ratio1> {
    let n = xs.len();
    let et = p.eta_tilde;
    let eta = p.eta;
    let g: f64 = ys.iter().sum::<f64>() - xs.iter().sum::<f64>();
    if (g - g.round()).abs() < 1e-10 {
        return Err(CsosError::WrongEntryPoint(format!(
            "gamma_tilde = {g} is an integer; use mean_szm or opposite_omega_ff"
        )));
    }
    let gc = cz(g);
    let th = |z: C| p.th(z);
    let wx = omega(beta_x);
    let wy = omega(beta_y);
    let r = |z: f64| -> Result<C> { Ok(th(et / 2.0 + z)? / th(et / 2.0 - z)?) };
    let mut base = wx / wy * (-2.0 * PI * I * eta * g).exp();
    for (&x, &y) in xs.iter().zip(ys) {
        base *= r(x)? / r(y)?;
    }
    let mut s_sum = C::new(0.0, 0.0);
    for i in 0..p.l {
        let s = p.s0 + i as f64;
        s_sum += omega_pow(beta_y - beta_x, s) * (2.0 * PI * I * eta * g * s).exp() * th(et * s + gc)? / th(et * s)?;
    }
    s_sum /= p.l as f64;
    let c = (-et * p.th_prime_zero()? * (-2.0 * PI * I * eta * g).exp() * wx * wx / (wy * wy)).powi(n as i32);
    let mut vand = C::new(1.0, 0.0);
    for k in 0..n {
        for l in k + 1..n {
            vand *= th(cz(ys[k] - ys[l]))? / th(cz(xs[k] - xs[l]))?;
        }
    }
    let hq = tilde_numerator_matrix(xs, beta_x, ys, beta_y, p)?;
    let det_ratio = det_ratio(hq, phi_tilde_matrix(ys, p)?)?;
    Ok(Ratio1 {
        base,
        s_sum,
        prefactor: c * vand,
        det_ratio,
    })
}

/// `H̃ − 2Q̃` for bra roots `xs` and ket roots `ys`.
pub fn tilde_numerator_matrix(xs: &[f64], beta_x: f64, ys: &[f64], beta_y: f64, p: &ModelParams) -> Result<DMatrix<C>> {
    let n = xs.len();
    let et = p.eta_tilde;
    let g: f64 = ys.iter().sum::<f64>() - xs.iter().sum::<f64>();
    let gc = cz(g);
    let th = |z: C| p.th(z);
    let a = omega(beta_y) / omega(beta_x) * (2.0 * PI * I * p.eta * g).exp();
    let thg = th(gc)?;
    let mut hq = DMatrix::<C>::zeros(n, n);
    let mut qprod = C::new(1.0, 0.0);
    for l in 0..n {
        qprod *= th(xs[l] + et / 2.0)? / th(ys[l] + et / 2.0)?;
    }
    for k in 0..n {
        let mut pp = C::new(1.0, 0.0);
        let mut pm = C::new(1.0, 0.0);
        for l in 0..n {
            pp *= th(xs[l] - ys[k] + et)? / th(ys[l] - ys[k] + et)?;
            pm *= th(xs[l] - ys[k] - et)? / th(ys[l] - ys[k] - et)?;
        }
        for j in 0..n {
            let d = cz(xs[j] - ys[k]);
            let lead = th(d + gc)? / th(d)?;
            let h = ((lead - a * th(d + gc + et)? / th(d + et)?) * pp
                - (lead - th(d + gc - et)? / (a * th(d - et)?)) * a * a * pm)
                / thg;
            let xj = cz(xs[j]);
            let q = (th(xj - et / 2.0 + gc)? / th(xj - et / 2.0)? - a * th(xj + et / 2.0 + gc)? / th(xj + et / 2.0)?)
                / thg
                * qprod;
            hq[(j, k)] = h - 2.0 * q;
        }
    }
    Ok(hq)
}

/// `⟨v|v⟩/⟨u|u⟩` for bra roots `xs` (u) and ket roots `ys` (v).
pub fn ratio2(xs: &[f64], ys: &[f64], p: &ModelParams) -> Result<C> {
    let n = xs.len();
    let nn = p.n_sites as f64;
    let us: Vec<C> = xs.iter().map(|&x| p.untransform(x)).collect();
    let vs: Vec<C> = ys.iter().map(|&y| p.untransform(y)).collect();
    let lbr = |u: C| p.ln_bracket_tilde(u);
    let half = cz(0.5);
    let one = cz(1.0);
    let mut l = C::new(0.0, 0.0);
    for (&a, &b) in vs.iter().zip(&us) {
        l += nn * (lbr(a - half)? - lbr(a + half)?) - nn * (lbr(b - half)? - lbr(b + half)?);
    }
    for j in 0..n {
        for k in 0..n {
            l += lbr(vs[j] - vs[k] + one)? - lbr(us[j] - us[k] + one)?;
            if j != k {
                l += lbr(us[j] - us[k])? - lbr(vs[j] - vs[k])?;
            }
        }
    }
    let dv = det_phi_tilde(ys, p)?;
    let du = det_phi_tilde(xs, p)?;
    Ok((l + dv.ln() - du.ln()).exp())
}

/// Normalized `⟨x|σ^z_m|y⟩ / sqrt(⟨x|x⟩⟨y|y⟩)`.
///
/// The square root of the norm ratio is the one nearest `(ω_y/ω_x)^n`, its
/// thermodynamic value.
pub fn szm_between(bra: &BetheState, ket: &BetheState, m: usize, p: &ModelParams) -> Result<FormFactorResult> {
    require_imaginary_tau(p)?;
    check_site(m, p)?;
    check_pair(bra, ket, p)?;
    let r1 = ratio1_transformed(&bra.roots, bra.beta, &ket.roots, ket.beta, p)?;
    let r2 = ratio2(&bra.roots, &ket.roots, p)?;
    let target = omega_pow(ket.beta - bra.beta, cz(p.n as f64));
    let mut root = r2.sqrt();
    if (root - target).norm() > (root + target).norm() {
        root = -root;
    }
    let mut parts = BTreeMap::new();
    parts.insert("site_factor".to_string(), r1.base.powi(m as i32 - 1));
    parts.insert("dynamical_sum".to_string(), r1.s_sum);
    parts.insert("prefactor".to_string(), r1.prefactor);
    parts.insert("determinant_ratio".to_string(), r1.det_ratio);
    parts.insert("norm_ratio".to_string(), root);
    let value: C = parts.values().product();
    Ok(FormFactorResult {
        value_re: value.re,
        value_im: value.im,
        site: m,
        gamma_tilde: ket.root_sum() - bra.root_sum(),
        parts,
    })
}

/// Bare `⟨u|σ^z_m|v⟩` from untransformed roots.
pub fn raw_ff_from_roots(us: &[C], beta_u: f64, vs: &[C], beta_v: f64, m: usize, p: &ModelParams) -> Result<C> {
    check_site(m, p)?;
    let n = us.len();
    let nn = p.n_sites as i32;
    let xi = cz(XI_HOMOGENEOUS);
    let br = |u: C| p.bracket(u);
    let g: C = vs.iter().sum::<C>() - us.iter().sum::<C>();
    if p.bracket_vanishes(g) {
        return Err(CsosError::WrongEntryPoint(
            "gamma is a lattice point; use mean_szm".into(),
        ));
    }
    let wu = omega(beta_u);
    let wv = omega(beta_v);
    let tau_ratio = eigenvalue_from_roots(xi, us, beta_u, p)? / eigenvalue_from_roots(xi, vs, beta_v, p)?;
    let pre = tau_ratio.powi(m as i32 - 1);
    let mut s_sum = C::new(0.0, 0.0);
    for i in 0..p.l {
        let s = p.s0 + i as f64;
        s_sum += omega_pow(beta_u, -s) * omega_pow(beta_v, s) * br(g + s)? / br(s)?;
    }
    s_sum /= p.l as f64;
    let d = |x: C| -> Result<C> { Ok((br(x - xi)? / br(x - xi + 1.0)?).powi(nn)) };
    let mut pref = C::new(1.0, 0.0);
    for &u in us {
        pref *= d(u)?;
    }
    for k in 0..n {
        for l in k + 1..n {
            pref /= br(us[k] - us[l])? * br(vs[l] - vs[k])?;
        }
    }
    let bg = br(g)?;
    let mut mat = DMatrix::<C>::zeros(n, n);
    for k in 0..n {
        let mut prod_p = C::new(1.0, 0.0);
        let mut prod_m = C::new(1.0, 0.0);
        let mut prod_q = C::new(1.0, 0.0);
        for t in 0..n {
            prod_p *= br(us[t] - vs[k] + 1.0)?;
            prod_m *= br(us[t] - vs[k] - 1.0)?;
            prod_q *= br(vs[t] - vs[k] + 1.0)? * br(us[t] - xi + 1.0)? / br(vs[t] - xi + 1.0)?;
        }
        let dv = d(vs[k])?;
        for j in 0..n {
            let x = us[j] - vs[k];
            let lead = br(x + g)? / br(x)?;
            let t1 = (lead - wv / wu * br(x + g + 1.0)? / br(x + 1.0)?) * prod_p;
            let t2 = (lead - wu / wv * br(x + g - 1.0)? / br(x - 1.0)?) * omega_pow(beta_u, cz(-2.0)) * dv * prod_m;
            let y = us[j] - xi;
            let pm = (br(y + g)? / br(y)? - wv / wu * br(y + g + 1.0)? / br(y + 1.0)?) / bg * prod_q;
            mat[(j, k)] = (t1 + t2) / bg - 2.0 * pm;
        }
    }
    Ok(pre * s_sum * pref * log_det(mat)?.value())
}

/// Bare `⟨bra|σ^z_m|ket⟩` through the untransformed determinant.
pub fn raw_ff_sigmaz(bra: &BetheState, ket: &BetheState, m: usize, p: &ModelParams) -> Result<C> {
    check_pair(bra, ket, p)?;
    raw_ff_from_roots(
        &bra.untransformed_roots(p),
        bra.beta,
        &ket.untransformed_roots(p),
        ket.beta,
        m,
        p,
    )
}

/// `det[Φ + 2Q^{(+)}]/det Φ` for explicit untransformed roots.
pub fn mean_szm_from_roots(us: &[C], m: usize, p: &ModelParams) -> Result<C> {
    check_site(m, p)?;
    let n = us.len();
    let xi = cz(XI_HOMOGENEOUS);
    let phi = phi_matrix(us, p)?;
    let mut q = DMatrix::<C>::zeros(n, n);
    for j in 0..n {
        let v = ld(us[j] - xi, p)? - ld(us[j] - xi + 1.0, p)?;
        for k in 0..n {
            q[(j, k)] = v;
        }
    }
    det_ratio(&phi + q * C::new(2.0, 0.0), phi)
}

/// Mean value `⟨σ^z_m⟩` in a Bethe state.
pub fn mean_szm(state: &BetheState, m: usize, p: &ModelParams) -> Result<C> {
    mean_szm_from_roots(&state.untransformed_roots(p), m, p)
}

/// Normalized form factor between `|{u},ω⟩` (bra) and `|{u},−ω⟩` (ket), L even.
pub fn opposite_omega_from_roots(us: &[C], m: usize, p: &ModelParams) -> Result<C> {
    if p.l % 2 != 0 {
        return Err(CsosError::NotApplicable(format!("L = {} is odd", p.l)));
    }
    check_site(m, p)?;
    let n = us.len();
    let phi = phi_matrix(us, p)?;
    let phim = phi_matrix_signed(us, -1.0, p)?;
    let mut tot = C::new(0.0, 0.0);
    for i in 0..p.l {
        let s = p.s0 + i as f64;
        let q = C::new(2.0, 0.0) * p.bracket_logderiv(s)?;
        let mut mat = phim.clone();
        for j in 0..n {
            for k in 0..n {
                mat[(j, k)] += 2.0 * q;
            }
        }
        tot += (-I * PI * s).exp() * det_ratio(mat, phi.clone())?;
    }
    let sign = if (m - 1) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(tot * sign / p.l as f64)
}

pub fn opposite_omega_ff(state: &BetheState, m: usize, p: &ModelParams) -> Result<C> {
    if p.l % 2 != 0 {
        return Err(CsosError::NotApplicable(format!("L = {} is odd", p.l)));
    }
    opposite_omega_from_roots(&state.untransformed_roots(p), m, p)
}

/// Both sides of the determinant rewriting used for the thermodynamic limit:
/// `(−1)^n Π_{j<k} θ1(y_j−y_k)/θ1(x_j−x_k) det[H̃−2Q̃]` and
/// `(det[𝓗−𝓠] − det[𝓗+𝓠])/θ1(γ̃)`.
pub fn detbis_sides(x: &BetheState, y: &BetheState, p: &ModelParams) -> Result<(C, C)> {
    check_pair(x, y, p)?;
    let (xs, ys) = (&x.roots, &y.roots);
    let n = xs.len();
    let et = p.eta_tilde;
    let g: f64 = ys.iter().sum::<f64>() - xs.iter().sum::<f64>();
    let th = |z: C| p.th(z);
    let r1 = ratio1_transformed(xs, x.beta, ys, y.beta, p)?;
    // Undo the pieces of ratio1 that are not part of this identity.
    let c = (-et * p.th_prime_zero()? * (-2.0 * PI * I * p.eta * g).exp() * x.omega().powi(2) / y.omega().powi(2))
        .powi(n as i32);
    let den = det_phi_tilde(ys, p)?.value();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let lhs = r1.prefactor / c * r1.det_ratio * den * sign;

    let a = y.omega() / x.omega() * (2.0 * PI * I * p.eta * g).exp();
    let tp = p.th_prime_zero()?;
    let mut h = DMatrix::<C>::zeros(n, n);
    for k in 0..n {
        let yk = ys[k];
        for j in 0..n {
            let d = cz(ys[j] - yk);
            h[(j, k)] = a / tp * (p.th_logderiv(d + et)? - p.th_logderiv(d - et)?);
        }
        let mut num = C::new(1.0, 0.0);
        for l in 0..n {
            if l != k {
                num *= th(cz(yk - ys[l]))?;
            }
            num /= th(cz(yk - xs[l]))?;
        }
        let (mut pp, mut pm) = (C::new(1.0, 0.0), C::new(1.0, 0.0));
        for l in 0..n {
            pp *= th(xs[l] - yk + et)? / th(ys[l] - yk + et)?;
            pm *= th(xs[l] - yk - et)? / th(ys[l] - yk - et)?;
        }
        h[(k, k)] += num * (pp - a * a * pm);
    }
    let mut qv = C::new(1.0, 0.0);
    for l in 0..n {
        qv *= th(xs[l] + et / 2.0)? * th(ys[l] - et / 2.0)? / (th(ys[l] + et / 2.0)? * th(xs[l] - et / 2.0)?);
    }
    let q = DMatrix::<C>::from_element(n, n, a - qv);
    let rhs = (log_det(&h - &q)?.value() - log_det(&h + &q)?.value()) / th(cz(g))?;
    Ok((lhs, rhs))
}

/// `φ_±(y|{x},{y})`.
pub fn phi_pm(yv: f64, sign: f64, xs: &[f64], ys: &[f64], p: &ModelParams) -> Result<C> {
    let et = p.eta_tilde * sign;
    let mut l = C::new(0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        l += p.ctx_tilde().ln_theta1(x - yv + et)? - p.ctx_tilde().ln_theta1(y - yv + et)?;
    }
    Ok(l.exp())
}

/// `φ_j({x},{y}) = N Π_l θ1(y_j−x_l) / Π_{l≠j} θ1(y_j−y_l)`.
pub fn phi_j(j: usize, xs: &[f64], ys: &[f64], p: &ModelParams) -> Result<C> {
    let mut l = C::new(0.0, 0.0);
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        l += p.ctx_tilde().ln_theta1(cz(ys[j] - x))?;
        if i != j {
            l -= p.ctx_tilde().ln_theta1(cz(ys[j] - y))?;
        }
    }
    Ok(l.exp() * p.n_sites as f64)
}

/// Max over a 10-point grid of `|φ_± − e^{±iπγ̃}|`.
pub fn phi_pm_gap(x: &BetheState, y: &BetheState, p: &ModelParams) -> Result<f64> {
    let g = y.root_sum() - x.root_sum();
    let mut worst = 0.0_f64;
    for i in 0..10 {
        let yv = -0.45 + 0.1 * i as f64;
        for sign in [1.0, -1.0] {
            let v = phi_pm(yv, sign, &x.roots, &y.roots, p)?;
            worst = worst.max((v - (I * PI * g * sign).exp()).norm());
        }
    }
    Ok(worst)
}

/// Max over j of `|φ_j ρ(y_j) − sin(πγ̃)θ1'(0)/π|`.
pub fn lim_phi_gap(x: &BetheState, y: &BetheState, p: &ModelParams) -> Result<f64> {
    let dm = DensityModel::new(p)?;
    let g = y.root_sum() - x.root_sum();
    let target = (PI * g).sin() * p.th_prime_zero()? / PI;
    let mut worst = 0.0_f64;
    for j in 0..y.roots.len() {
        let v = phi_j(j, &x.roots, &y.roots, p)? * dm.rho(y.roots[j]);
        worst = worst.max((v - target).norm());
    }
    Ok(worst)
}

/// `|ratio2/(ω_y/ω_x)^{2n} − 1|`.
pub fn ratio2_limit_gap(x: &BetheState, y: &BetheState, p: &ModelParams) -> Result<f64> {
    let r = ratio2(&x.roots, &y.roots, p)?;
    let target = omega_pow(y.beta - x.beta, cz(2.0 * p.n as f64));
    Ok((r / target - 1.0).norm())
}
