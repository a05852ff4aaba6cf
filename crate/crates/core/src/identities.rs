//! Randomized numerical checks of the theta-function summation identities
//! and of the determinant identity behind the thermodynamic-limit rewriting.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bethe::BetheState;
use crate::elliptic::{JacobiLine, ThetaContext};
use crate::error::{CsosError, Result};
use crate::formfactor::{log_det, tilde_numerator_matrix};
use crate::model::{on_lattice, ModelParams};

type C = Complex64;
const I: C = C { re: 0.0, im: 1.0 };

/// Minimum distance of any sampled theta argument from a zero.
pub const ZERO_MARGIN: f64 = 1e-3;

/// Sampling setup for a randomized identity suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomTestConfig {
    pub seed: u64,
    pub trials: usize,
    /// Inclusive range of set sizes.
    pub n_range: (usize, usize),
    /// `(re_min, re_max, im_min, im_max)`.
    pub domain_box: (f64, f64, f64, f64),
    pub tau: C,
}

impl RandomTestConfig {
    pub fn new(seed: u64, trials: usize, n_range: (usize, usize)) -> Self {
        RandomTestConfig {
            seed,
            trials,
            n_range,
            domain_box: (-0.5, 0.5, -0.3, 0.3),
            tau: C::new(0.0, 1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(CsosError::InvalidParams("trials must be at least 1".into()));
        }
        if self.n_range.0 == 0 || self.n_range.0 > self.n_range.1 {
            return Err(CsosError::InvalidParams(format!("bad n range {:?}", self.n_range)));
        }
        let (a, b, c, d) = self.domain_box;
        if !(a < b && c < d) {
            return Err(CsosError::InvalidParams("empty sampling box".into()));
        }
        Ok(())
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub identity: String,
    pub n: usize,
    pub gap: f64,
    pub seed: u64,
}

fn rel_gap(a: C, b: C) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn far_from_zeros(args: &[C], tau: C) -> bool {
    args.iter().all(|&z| {
        let m = (z.im / tau.im).round();
        let w = z - tau * m;
        let w = w - w.re.round();
        w.norm() > ZERO_MARGIN
    })
}

/// `(1/n)Σ_ℓ e^{−2πikℓ/n} θ1(x+y+ℓ/n)θ1'(0)/(θ1(x)θ1(y+ℓ/n))` against
/// `e^{2πiky} θ1(x+ny+kτ;nτ)θ1'(0;nτ)/(θ1(x+kτ;nτ)θ1(ny;nτ))`.
pub fn check_sum_identity_1(n: usize, k: i64, x: C, y: C, tau: C) -> Result<f64> {
    let (l, r) = sum_identity_1_sides(n, k, x, y, tau)?;
    Ok(rel_gap(l, r))
}

fn sum_identity_1_sides(n: usize, k: i64, x: C, y: C, tau: C) -> Result<(C, C)> {
    let ctx = ThetaContext::with_tau(tau)?;
    let ctxn = ThetaContext::with_tau(tau * n as f64)?;
    let nf = n as f64;
    let tp = ctx.theta1_prime_zero()?;
    let mut lhs = C::new(0.0, 0.0);
    for l in 0..n {
        let lf = l as f64 / nf;
        lhs += (-2.0 * PI * I * k as f64 * lf).exp() * ctx.theta1(x + y + lf)? * tp
            / (ctx.theta1(x)? * ctx.theta1(y + lf)?);
    }
    lhs /= nf;
    let kt = tau * k as f64;
    let rhs = (2.0 * PI * I * k as f64 * y).exp() * ctxn.theta1(x + y * nf + kt)? * ctxn.theta1_prime_zero()?
        / (ctxn.theta1(x + kt)? * ctxn.theta1(y * nf)?);
    Ok((lhs, rhs))
}

/// `Σ_ℓ e^{2πiℓx/n} θ1(x+y+ℓτ/n)θ1'(0)/(θ1(x)θ1(y+ℓτ/n))` against
/// `θ1(x/n+y;τ/n)θ1'(0;τ/n)/(θ1(x/n;τ/n)θ1(y;τ/n))`.
pub fn check_sum_identity_2(n: usize, x: C, y: C, tau: C) -> Result<f64> {
    let ctx = ThetaContext::with_tau(tau)?;
    let lhs = sum_identity_2_lhs(n, x, y, tau, |z| ctx.theta1(z), ctx.theta1_prime_zero()?)?;
    Ok(rel_gap(lhs, sum_identity_2_rhs(n, x, y, tau)?))
}

fn sum_identity_2_lhs(n: usize, x: C, y: C, tau: C, th: impl Fn(C) -> Result<C>, tp: C) -> Result<C> {
    let nf = n as f64;
    let mut lhs = C::new(0.0, 0.0);
    for l in 0..n {
        let lf = l as f64;
        let sh = tau * lf / nf;
        lhs += (2.0 * PI * I * lf * x / nf).exp() * th(x + y + sh)? * tp / (th(x)? * th(y + sh)?);
    }
    Ok(lhs)
}

fn sum_identity_2_rhs(n: usize, x: C, y: C, tau: C) -> Result<C> {
    let nf = n as f64;
    let c = ThetaContext::with_tau(tau / nf)?;
    Ok(c.theta1(x / nf + y)? * c.theta1_prime_zero()? / (c.theta1(x / nf)? * c.theta1(y)?))
}

/// Second summation identity with every theta on the left evaluated through
/// Jacobi's imaginary transformation (at `−1/τ`), against the direct right side.
pub fn check_sum_identity_2_jacobi(n: usize, x: C, y: C, tau: C) -> Result<f64> {
    // θ1(z;τ) = −i(−iτ)^{−1/2} e^{−iπz²/τ} θ1(−z/τ; −1/τ), so
    // θ1'(0;τ) = i(−iτ)^{−1/2} θ1'(0; −1/τ)/τ.
    let dual = ThetaContext::with_tau(-1.0 / tau)?;
    let pre = -I * (-I * tau).powf(-0.5);
    let th = |z: C| -> Result<C> { Ok(pre * (-I * PI * z * z / tau).exp() * dual.theta1(-z / tau)?) };
    let tp = -pre * dual.theta1_prime_zero()? / tau;
    let lhs = sum_identity_2_lhs(n, x, y, tau, th, tp)?;
    Ok(rel_gap(lhs, sum_identity_2_rhs(n, x, y, tau)?))
}

/// Entries of the auxiliary matrix `X_t({x},{y})`.
pub fn matrix_x(xs: &[C], ys: &[C], t: C, ctx: &ThetaContext) -> Result<DMatrix<C>> {
    let n = xs.len();
    let th = |z: C| ctx.theta1(z);
    let mut m = DMatrix::<C>::zeros(n, n);
    for k in 0..n {
        let mut w = th(xs[k])? / (th(t)? * th(xs[k] - t)?);
        for l in 0..n {
            w *= th(xs[k] - ys[l])?;
            if l != k {
                w /= th(xs[k] - xs[l])?;
            }
        }
        for j in 0..n {
            m[(j, k)] = w * th(ys[j] - xs[k] + t)? / th(ys[j] - xs[k])?;
        }
    }
    Ok(m)
}

/// Closed form of `det X_t`.
pub fn det_x_closed(xs: &[C], ys: &[C], t: C, ctx: &ThetaContext) -> Result<C> {
    let n = xs.len();
    let th = |z: C| ctx.theta1(z);
    let g: C = ys.iter().sum::<C>() - xs.iter().sum::<C>();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut v = th(g + t)? / th(t)? * sign;
    for &x in xs {
        v *= th(x)? / th(x - t)?;
    }
    for j in 0..n {
        for k in j + 1..n {
            v *= th(ys[j] - ys[k])? / th(xs[j] - xs[k])?;
        }
    }
    Ok(v)
}

pub fn check_det_x(xs: &[C], ys: &[C], t: C, ctx: &ThetaContext) -> Result<f64> {
    let direct = log_det(matrix_x(xs, ys, t, ctx)?)?.value();
    Ok(rel_gap(direct, det_x_closed(xs, ys, t, ctx)?))
}

/// Residue identity for `Σ_b [X_t]_{jb} θ1(x_b−y_k+γ+εη̃)/θ1(x_b−y_k+εη̃)`,
/// maximized over all `(j, k)`. `eps` ∈ {−1, 0, 1}.
pub fn check_residue_identity(xs: &[C], ys: &[C], et: C, t: C, eps: i32, ctx: &ThetaContext) -> Result<f64> {
    let n = xs.len();
    let th = |z: C| ctx.theta1(z);
    let g: C = ys.iter().sum::<C>() - xs.iter().sum::<C>();
    let e = et * eps as f64;
    let x = matrix_x(xs, ys, t, ctx)?;
    let mut worst = 0.0_f64;
    for j in 0..n {
        for k in 0..n {
            let mut l = C::new(0.0, 0.0);
            for b in 0..n {
                l += x[(j, b)] * th(t)? * th(xs[b] - ys[k] + g + e)? / th(xs[b] - ys[k] + e)?;
            }
            let mut r = -th(t)? * th(t - ys[k] + g + e)? / th(t - ys[k] + e)? * th(ys[j])? / th(ys[j] - t)?;
            for (&xv, &yv) in xs.iter().zip(ys) {
                r *= th(t - yv)? / th(t - xv)?;
            }
            if eps != 0 {
                let mut q =
                    th(g)? * th(ys[j] - ys[k] + t + e)? / th(ys[j] - ys[k] + e)? * th(ys[k] - e)? / th(ys[k] - t - e)?;
                for l2 in 0..n {
                    q *= th(ys[k] - ys[l2] - e)? / th(ys[k] - xs[l2] - e)?;
                }
                r -= q;
            } else if j == k {
                let mut q = th(g)? * th(t)? * th(ys[j])? / th(ys[j] - t)?;
                for l2 in 0..n {
                    if l2 != j {
                        q *= th(ys[j] - ys[l2])?;
                    }
                    q /= th(ys[j] - xs[l2])?;
                }
                r += q;
            }
            worst = worst.max(rel_gap(l, r));
        }
    }
    Ok(worst)
}

/// Generic `H̃_α − 2Q̃_β` with nome argument `et`.
pub fn generic_numerator_matrix(
    xs: &[C],
    ys: &[C],
    alpha: [C; 4],
    beta: [C; 2],
    et: C,
    ctx: &ThetaContext,
) -> Result<DMatrix<C>> {
    let n = xs.len();
    let th = |z: C| ctx.theta1(z);
    let g: C = ys.iter().sum::<C>() - xs.iter().sum::<C>();
    let tg = th(g)?;
    let mut qprod = C::new(1.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        qprod *= th(x + et / 2.0)? / th(y + et / 2.0)?;
    }
    let mut m = DMatrix::<C>::zeros(n, n);
    for k in 0..n {
        let (mut pp, mut pm) = (C::new(1.0, 0.0), C::new(1.0, 0.0));
        for (&x, &y) in xs.iter().zip(ys) {
            pp *= th(x - ys[k] + et)? / th(y - ys[k] + et)?;
            pm *= th(x - ys[k] - et)? / th(y - ys[k] - et)?;
        }
        for j in 0..n {
            let d = xs[j] - ys[k];
            let lead = th(d + g)? / th(d)?;
            let h = (alpha[0] * lead - alpha[1] * th(d + g + et)? / th(d + et)?) * pp / tg
                - (alpha[2] * lead - alpha[3] * th(d + g - et)? / th(d - et)?) * pm / tg;
            let q = (beta[0] * th(xs[j] - et / 2.0 + g)? / th(xs[j] - et / 2.0)?
                - beta[1] * th(xs[j] + et / 2.0 + g)? / th(xs[j] + et / 2.0)?)
                / tg
                * qprod;
            m[(j, k)] = h - 2.0 * q;
        }
    }
    Ok(m)
}

/// Right side of the determinant identity:
/// `(−1)^n/θ1(γ) Π_{j<k} θ1(x_j−x_k)/θ1(y_j−y_k) (det[𝓗_α+𝓥] − det[𝓗_α−𝓥])`.
pub fn det_identity_rhs(xs: &[C], ys: &[C], alpha: [C; 4], beta: [C; 2], et: C, ctx: &ThetaContext) -> Result<C> {
    let (pre, dp, dm) = det_identity_parts(xs, ys, alpha, beta, et, ctx)?;
    Ok(pre * (dp - dm))
}

fn det_identity_parts(xs: &[C], ys: &[C], alpha: [C; 4], beta: [C; 2], et: C, ctx: &ThetaContext) -> Result<(C, C, C)> {
    let n = xs.len();
    let th = |z: C| ctx.theta1(z);
    let ld = |z: C| ctx.theta1_logderiv(z);
    let tp = ctx.theta1_prime_zero()?;
    let g: C = ys.iter().sum::<C>() - xs.iter().sum::<C>();
    let mut h = DMatrix::<C>::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let d = ys[j] - ys[k];
            h[(j, k)] = (alpha[1] * ld(d + et)? - alpha[3] * ld(d - et)?) / tp;
        }
        let (mut pp, mut pm) = (C::new(1.0, 0.0), C::new(1.0, 0.0));
        let mut w = C::new(1.0, 0.0);
        for l in 0..n {
            pp *= th(xs[l] - ys[j] + et)? / th(ys[l] - ys[j] + et)?;
            pm *= th(xs[l] - ys[j] - et)? / th(ys[l] - ys[j] - et)?;
            if l != j {
                w *= th(ys[j] - ys[l])?;
            }
            w /= th(ys[j] - xs[l])?;
        }
        h[(j, j)] += w * (alpha[0] * pp - alpha[2] * pm);
    }
    let mut qv = C::new(1.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        qv *= th(x + et / 2.0)? * th(y - et / 2.0)? / (th(x - et / 2.0)? * th(y + et / 2.0)?);
    }
    let v = (alpha[1] - alpha[3]) / 2.0 - (beta[1] - beta[0] * qv);
    let vm = DMatrix::<C>::from_element(n, n, v);
    let mut pre = if n % 2 == 0 {
        C::new(1.0, 0.0)
    } else {
        C::new(-1.0, 0.0)
    } / th(g)?;
    for j in 0..n {
        for k in j + 1..n {
            pre *= th(xs[j] - xs[k])? / th(ys[j] - ys[k])?;
        }
    }
    Ok((pre, log_det(&h + &vm)?.value(), log_det(&h - &vm)?.value()))
}

/// Relative gap between `det[H̃_α − 2Q̃_β]` and the right side of the identity.
pub fn check_det_identity(xs: &[C], ys: &[C], alpha: [C; 4], beta: [C; 2], et: C, ctx: &ThetaContext) -> Result<f64> {
    let lhs = log_det(generic_numerator_matrix(xs, ys, alpha, beta, et, ctx)?)?.value();
    Ok(rel_gap(lhs, det_identity_rhs(xs, ys, alpha, beta, et, ctx)?))
}

/// The generic identity specialized to the form-factor coefficients, checked
/// against the form-factor module's own `H̃ − 2Q̃` on solved states.
///
/// Matrices are compared entrywise. The determinant side is measured against
/// `|pre|(|det₊|+|det₋|)`, since selection rules can make the determinant
/// itself cancel to round-off.
pub fn detbis_specialization_gap(x: &BetheState, y: &BetheState, p: &ModelParams) -> Result<f64> {
    let g = y.root_sum() - x.root_sum();
    let a = y.omega() / x.omega() * (2.0 * PI * I * p.eta * g).exp();
    let one = C::new(1.0, 0.0);
    let alpha = [one, a, a * a, a];
    let beta = [one, a];
    let xs: Vec<C> = x.roots.iter().map(|&v| C::new(v, 0.0)).collect();
    let ys: Vec<C> = y.roots.iter().map(|&v| C::new(v, 0.0)).collect();
    let ctx = p.ctx_tilde();
    let generic = generic_numerator_matrix(&xs, &ys, alpha, beta, p.eta_tilde, ctx)?;
    let own = tilde_numerator_matrix(&x.roots, x.beta, &y.roots, y.beta, p)?;
    let amax = |m: &DMatrix<C>| m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let entry_gap = amax(&(&generic - &own)) / amax(&own).max(1e-300);
    let lhs = log_det(own)?.value();
    let (pre, dp, dm) = det_identity_parts(&xs, &ys, alpha, beta, p.eta_tilde, ctx)?;
    let scale = pre.norm() * (dp.norm() + dm.norm());
    Ok(entry_gap.max((lhs - pre * (dp - dm)).norm() / scale.max(1e-300)))
}

struct Sampler {
    rng: ChaCha8Rng,
    cfg: RandomTestConfig,
}

impl Sampler {
    fn new(cfg: RandomTestConfig) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg,
        }
    }

    fn point(&mut self) -> C {
        let (a, b, c, d) = self.cfg.domain_box;
        C::new(self.rng.gen_range(a..b), self.rng.gen_range(c..d))
    }

    fn points(&mut self, n: usize) -> Vec<C> {
        (0..n).map(|_| self.point()).collect()
    }

    fn size(&mut self) -> usize {
        self.rng.gen_range(self.cfg.n_range.0..=self.cfg.n_range.1)
    }
}

const MAX_RESAMPLES: usize = 1000;

fn resample<T>(s: &mut Sampler, mut draw: impl FnMut(&mut Sampler) -> Option<T>) -> Result<T> {
    for _ in 0..MAX_RESAMPLES {
        if let Some(v) = draw(s) {
            return Ok(v);
        }
    }
    Err(CsosError::Degenerate("could not sample away from theta zeros".into()))
}

fn pairwise_diffs(a: &[C], b: &[C], skip_diag: bool) -> Vec<C> {
    let mut out = Vec::new();
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            if !(skip_diag && i == j) {
                out.push(x - y);
            }
        }
    }
    out
}

/// Summation identities: both families at random sizes and arguments.
pub fn suite_appendix_a(cfg: RandomTestConfig) -> Result<Vec<VerifyReport>> {
    cfg.validate()?;
    let tau = cfg.tau;
    let mut s = Sampler::new(cfg);
    let mut out = Vec::new();
    for _ in 0..cfg.trials {
        let n = s.size();
        let k = s.rng.gen_range(0..2 * n as i64);
        let (x, y) = resample(&mut s, |s| {
            let (x, y) = (s.point(), s.point());
            let nf = n as f64;
            let mut args = vec![x];
            for l in 0..n {
                args.push(y + l as f64 / nf);
                args.push(x + y + l as f64 / nf);
            }
            let ok = far_from_zeros(&args, tau)
                && far_from_zeros(&[x + tau * k as f64, y * nf, x + y * nf + tau * k as f64], tau * nf);
            ok.then_some((x, y))
        })?;
        out.push(VerifyReport {
            identity: "sum_identity_1".into(),
            n,
            gap: check_sum_identity_1(n, k, x, y, tau)?,
            seed: cfg.seed,
        });
    }
    for _ in 0..cfg.trials {
        let n = s.size();
        let (x, y) = resample(&mut s, |s| {
            let (x, y) = (s.point(), s.point());
            let nf = n as f64;
            let mut args = vec![x];
            for l in 0..n {
                let sh = tau * l as f64 / nf;
                args.push(y + sh);
                args.push(x + y + sh);
            }
            let ok = far_from_zeros(&args, tau) && far_from_zeros(&[x / nf, y, x / nf + y], tau / nf);
            ok.then_some((x, y))
        })?;
        out.push(VerifyReport {
            identity: "sum_identity_2".into(),
            n,
            gap: check_sum_identity_2(n, x, y, tau)?,
            seed: cfg.seed,
        });
        out.push(VerifyReport {
            identity: "sum_identity_2_jacobi".into(),
            n,
            gap: check_sum_identity_2_jacobi(n, x, y, tau)?,
            seed: cfg.seed,
        });
    }
    Ok(out)
}

/// Determinant identity, the closed form of `det X_t` (two values of t) and
/// the residue identity, on random sets.
pub fn suite_appendix_b(cfg: RandomTestConfig) -> Result<Vec<VerifyReport>> {
    cfg.validate()?;
    let tau = cfg.tau;
    let ctx = ThetaContext::with_tau(tau)?;
    let mut s = Sampler::new(cfg);
    let mut out = Vec::new();
    let report = |id: &str, n: usize, gap: f64| VerifyReport {
        identity: id.into(),
        n,
        gap,
        seed: cfg.seed,
    };
    for _ in 0..cfg.trials {
        let n = s.size();
        let (xs, ys, et, t1, t2) = resample(&mut s, |s| {
            let xs = s.points(n);
            let ys = s.points(n);
            let et = s.point();
            let (t1, t2) = (s.point(), s.point());
            let g: C = ys.iter().sum::<C>() - xs.iter().sum::<C>();
            let mut args = vec![g, et, et / 2.0, t1, t2];
            args.extend(pairwise_diffs(&xs, &xs, true));
            args.extend(pairwise_diffs(&ys, &ys, true));
            args.extend(pairwise_diffs(&xs, &ys, false));
            for &e in &[et, -et, et / 2.0, -et / 2.0] {
                args.extend(xs.iter().map(|&x| x + e));
                args.extend(ys.iter().map(|&y| y + e));
                args.extend(pairwise_diffs(&xs, &ys, false).into_iter().map(|d| d + e));
                args.extend(pairwise_diffs(&ys, &ys, true).into_iter().map(|d| d + e));
            }
            for &t in &[t1, t2] {
                args.extend(xs.iter().chain(&ys).map(|&x| x - t));
                args.push(g + t);
            }
            args.extend(xs.iter().chain(&ys).copied());
            let ok = far_from_zeros(&args, tau) && !on_lattice(et, tau);
            ok.then_some((xs, ys, et, t1, t2))
        })?;
        let alpha = [s.point() + 1.0, s.point() + 1.0, s.point() + 1.0, s.point() + 1.0];
        let beta = [s.point() + 1.0, s.point() + 1.0];
        out.push(report(
            "det_identity",
            n,
            check_det_identity(&xs, &ys, alpha, beta, et, &ctx)?,
        ));
        let dx = check_det_x(&xs, &ys, t1, &ctx)?.max(check_det_x(&xs, &ys, t2, &ctx)?);
        out.push(report("det_x", n, dx));
        let mut rg = 0.0_f64;
        for eps in [-1, 0, 1] {
            rg = rg.max(check_residue_identity(&xs, &ys, et, t1, eps, &ctx)?);
        }
        out.push(report("residue_identity", n, rg));
    }
    Ok(out)
}

/// Largest gap per identity name.
pub fn max_gaps(reports: &[VerifyReport]) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = Vec::new();
    for r in reports {
        match out.iter_mut().find(|(k, _)| *k == r.identity) {
            Some((_, g)) => *g = g.max(r.gap),
            None => out.push((r.identity.clone(), r.gap)),
        }
    }
    out
}

/// Jacobi transformation check on random arguments, both lines.
pub fn jacobi_gap(z: C, tau: C) -> Result<f64> {
    let mut worst = 0.0_f64;
    for line in [JacobiLine::Theta1, JacobiLine::Theta2To4] {
        let (a, b) = crate::elliptic::jacobi_transform(z, tau, line)?;
        worst = worst.max(rel_gap(a, b));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_one_reduces_exactly() {
        let tau = C::new(0.0, 1.0);
        let (x, y) = (C::new(0.13, 0.05), C::new(-0.21, 0.11));
        assert!(check_sum_identity_1(1, 0, x, y, tau).unwrap() < 1e-14);
        assert!(check_sum_identity_2(1, x, y, tau).unwrap() < 1e-14);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = RandomTestConfig::new(11, 3, (2, 3));
        let a = suite_appendix_a(cfg).unwrap();
        let b = suite_appendix_a(cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coarse_theta_tolerance_widens_gap() {
        // Small Im τ so the truncated tail is visible above round-off.
        let tau = C::new(0.0, 0.1);
        let xs = [C::new(0.1, 0.01), C::new(-0.2, 0.02), C::new(0.31, -0.007)];
        let ys = [C::new(0.02, -0.01), C::new(0.4, 0.012), C::new(-0.33, 0.02)];
        let t = C::new(0.17, 0.009);
        let gaps: Vec<f64> = [1e-7, 1e-9, 1e-17]
            .iter()
            .map(|&tol| check_det_x(&xs, &ys, t, &ThetaContext::new(tau, tol).unwrap()).unwrap())
            .collect();
        assert!(gaps[0] > 4.0 * gaps[2], "{gaps:?}");
        assert!(gaps[1] <= gaps[0] && gaps[2] <= 2.0 * gaps[1], "{gaps:?}");
        assert!(gaps[2] < 1e-11);
    }
}
