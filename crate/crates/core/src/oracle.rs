//! Brute-force dynamical monodromy matrix, Bethe vectors and direct σ^z
//! matrix elements on lattices of at most six sites.
//!
//! Spin up is bit value 0; site 1 is the most significant bit of the state
//! index. Dynamical vectors are maps `s ↦ C^{2^N}` on the orbit
//! `s0 + {0, …, L−1}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CsosError, Result};
use crate::model::{eigenvalue_from_roots, omega_pow, weight_b, weight_c, ModelParams, XI_HOMOGENEOUS};

/// Largest lattice the dense construction accepts.
pub const MAX_ORACLE_SITES: usize = 6;

/// The pairing carries `1/L` in front of the sum over heights; with it the
/// literal Bethe vector and its dual reproduce the Gaudin-type norm formula.
pub const PAIRING_WEIGHT_IS_INVERSE_L: bool = true;

type C = Complex64;
const ZERO: C = C { re: 0.0, im: 0.0 };
const ONE: C = C { re: 1.0, im: 0.0 };

/// Which sites feed the dynamical argument of each R-matrix factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftSide {
    /// `R_{0k}(u−ξ_k; s + Σ_{j<k} σ^z_j)`
    SmallerIndex,
    /// `R_{0k}(u−ξ_k; s + Σ_{j>k} σ^z_j)`
    LargerIndex,
}

/// Order in which the R-matrix factors act on the auxiliary space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SiteOrder {
    FirstSiteFirst,
    LastSiteFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convention {
    pub order: SiteOrder,
    pub side: ShiftSide,
}

impl Convention {
    /// Candidates in the order they are tried: larger-index shift first,
    /// then its two mirrors.
    pub const CANDIDATES: [Convention; 3] = [
        Convention {
            order: SiteOrder::FirstSiteFirst,
            side: ShiftSide::LargerIndex,
        },
        Convention {
            order: SiteOrder::FirstSiteFirst,
            side: ShiftSide::SmallerIndex,
        },
        Convention {
            order: SiteOrder::LastSiteFirst,
            side: ShiftSide::LargerIndex,
        },
    ];
}

fn spin(state: usize, site: usize, n_sites: usize) -> i32 {
    1 - 2 * ((state >> (n_sites - 1 - site)) & 1) as i32
}

fn check_size(p: &ModelParams) -> Result<()> {
    if p.n_sites > MAX_ORACLE_SITES {
        return Err(CsosError::InvalidParams(format!(
            "oracle limited to N <= {MAX_ORACLE_SITES}, got {}",
            p.n_sites
        )));
    }
    Ok(())
}

/// The four operator entries of the monodromy matrix at fixed `(u, s)`.
#[derive(Debug, Clone)]
pub struct Monodromy {
    pub a: DMatrix<C>,
    pub b: DMatrix<C>,
    pub c: DMatrix<C>,
    pub d: DMatrix<C>,
}

/// Ordered product of R-matrices along the row, with inhomogeneities `xi`.
pub fn build_monodromy_inhomogeneous(u: C, s: C, xi: &[C], conv: Convention, p: &ModelParams) -> Result<Monodromy> {
    check_size(p)?;
    let n = p.n_sites;
    if xi.len() != n {
        return Err(CsosError::InvalidParams(format!(
            "{} inhomogeneities for N = {n}",
            xi.len()
        )));
    }
    let dim = 1usize << n;
    let mut t = DMatrix::<C>::identity(2 * dim, 2 * dim);
    let sites: Vec<usize> = match conv.order {
        SiteOrder::FirstSiteFirst => (0..n).collect(),
        SiteOrder::LastSiteFirst => (0..n).rev().collect(),
    };
    for k in sites {
        let mut m = DMatrix::<C>::zeros(2 * dim, 2 * dim);
        for st in 0..dim {
            let w: i32 = match conv.side {
                ShiftSide::SmallerIndex => (0..k).map(|j| spin(st, j, n)).sum(),
                ShiftSide::LargerIndex => (k + 1..n).map(|j| spin(st, j, n)).sum(),
            };
            let sk = s + w as f64;
            let uk = u - xi[k];
            let (b1, c1) = (weight_b(uk, sk, p)?, weight_c(uk, sk, p)?);
            let (b2, c2) = (weight_b(uk, -sk, p)?, weight_c(uk, -sk, p)?);
            let r = [
                [ONE, ZERO, ZERO, ZERO],
                [ZERO, b1, c1, ZERO],
                [ZERO, c2, b2, ZERO],
                [ZERO, ZERO, ZERO, ONE],
            ];
            let bit = n - 1 - k;
            let site_in = (st >> bit) & 1;
            for a_out in 0..2 {
                for b_out in 0..2 {
                    let st_out = (st & !(1 << bit)) | (b_out << bit);
                    for a_in in 0..2 {
                        let v = r[a_out * 2 + b_out][a_in * 2 + site_in];
                        if v != ZERO {
                            m[(a_out * dim + st_out, a_in * dim + st)] += v;
                        }
                    }
                }
            }
        }
        t = m * t;
    }
    Ok(Monodromy {
        a: t.view((0, 0), (dim, dim)).into_owned(),
        b: t.view((0, dim), (dim, dim)).into_owned(),
        c: t.view((dim, 0), (dim, dim)).into_owned(),
        d: t.view((dim, dim), (dim, dim)).into_owned(),
    })
}

/// Monodromy at the homogeneous point.
pub fn build_monodromy(u: C, s: C, conv: Convention, p: &ModelParams) -> Result<Monodromy> {
    let xi = vec![C::new(XI_HOMOGENEOUS, 0.0); p.n_sites];
    build_monodromy_inhomogeneous(u, s, &xi, conv, p)
}

/// Function on the height orbit with values in the spin space.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalVector {
    pub blocks: Vec<DVector<C>>,
    pub n_sites: usize,
    pub l: u32,
    pub s0: C,
}

impl DynamicalVector {
    pub fn scale(&self, a: C) -> DynamicalVector {
        DynamicalVector {
            blocks: self.blocks.iter().map(|b| b * a).collect(),
            ..self.clone()
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum()
    }
}

/// Bethe vector `s ↦ ω^s Π_{j=1}^n [1]/[s−j] B(v_1;s)B(v_2;s−1)···B(v_n;s−n+1)|0⟩`,
/// or with `dual` the row vector `s ↦ ⟨0|C(v_n;s−n)···C(v_1;s−1) ω^{−s} Π_{j=0}^{n−1}[s+j]/[1]`.
pub fn build_bethe_vector(
    roots: &[C],
    beta: f64,
    dual: bool,
    conv: Convention,
    p: &ModelParams,
) -> Result<DynamicalVector> {
    check_size(p)?;
    let dim = 1usize << p.n_sites;
    let n = roots.len();
    let one = C::new(1.0, 0.0);
    let mut blocks = Vec::with_capacity(p.l as usize);
    for i in 0..p.l {
        let s = p.s0 + i as f64;
        let mut vec = DVector::<C>::zeros(dim);
        vec[0] = ONE;
        let mut pref = C::new(0.0, 0.0);
        if !dual {
            for j in 1..=n {
                if p.bracket_vanishes(s - j as f64) {
                    return Err(CsosError::Gauge(format!("[s-{j}] = 0 at s = {s}")));
                }
                pref += p.ln_bracket(one)? - p.ln_bracket(s - j as f64)?;
            }
            for k in (0..n).rev() {
                let m = build_monodromy(roots[k], s - k as f64, conv, p)?;
                vec = &m.b * vec;
            }
            blocks.push(vec * (pref.exp() * omega_pow(beta, s)));
        } else {
            for j in 0..n {
                if p.bracket_vanishes(s + j as f64) {
                    return Err(CsosError::Gauge(format!("[s+{j}] = 0 at s = {s}")));
                }
                pref += p.ln_bracket(s + j as f64)? - p.ln_bracket(one)?;
            }
            // Row vector ⟨0|C(v_n;s−n)···C(v_1;s−1), built from the left.
            let mut row = vec.transpose();
            for k in (0..n).rev() {
                let m = build_monodromy(roots[k], s - (k + 1) as f64, conv, p)?;
                row *= &m.c;
            }
            blocks.push(row.transpose() * (pref.exp() / omega_pow(beta, s)));
        }
    }
    Ok(DynamicalVector {
        blocks,
        n_sites: p.n_sites,
        l: p.l,
        s0: p.s0,
    })
}

fn check_compatible(a: &DynamicalVector, b: &DynamicalVector) -> Result<()> {
    if a.n_sites != b.n_sites || a.l != b.l || (a.s0 - b.s0).norm() > 1e-14 {
        return Err(CsosError::InvalidParams("dynamical vectors on different orbits".into()));
    }
    Ok(())
}

/// Bilinear pairing `(1/L)Σ_s bra(s)·ket(s)`.
pub fn pair(bra: &DynamicalVector, ket: &DynamicalVector) -> Result<C> {
    check_compatible(bra, ket)?;
    let sum: C = bra.blocks.iter().zip(&ket.blocks).map(|(a, b)| a.dot(b)).sum();
    Ok(sum / bra.l as f64)
}

/// `pair(bra, σ^z_m ket)` for site `m` in `1..=N`.
pub fn direct_sigma_z(bra: &DynamicalVector, ket: &DynamicalVector, m: usize) -> Result<C> {
    check_compatible(bra, ket)?;
    let n = ket.n_sites;
    if m == 0 || m > n {
        return Err(CsosError::InvalidParams(format!("site {m} outside 1..={n}")));
    }
    let mut sz = ket.clone();
    for b in sz.blocks.iter_mut() {
        for (st, x) in b.iter_mut().enumerate() {
            *x *= spin(st, m - 1, n) as f64;
        }
    }
    pair(bra, &sz)
}

/// Dynamical transfer matrix `t̂(u) = Â(u) + D̂(u)` with
/// `(Âf)(s) = A(u;s) f(s+1)` and `(D̂f)(s) = D(u;s) f(s−1)`.
pub struct TransferMatrix {
    a: Vec<DMatrix<C>>,
    d: Vec<DMatrix<C>>,
    l: usize,
}

impl TransferMatrix {
    pub fn new(u: C, conv: Convention, p: &ModelParams) -> Result<Self> {
        let mut a = Vec::new();
        let mut d = Vec::new();
        for i in 0..p.l {
            let m = build_monodromy(u, p.s0 + i as f64, conv, p)?;
            a.push(m.a);
            d.push(m.d);
        }
        Ok(TransferMatrix { a, d, l: p.l as usize })
    }

    pub fn apply(&self, f: &DynamicalVector) -> DynamicalVector {
        let l = self.l;
        let blocks = (0..l)
            .map(|i| &self.a[i] * &f.blocks[(i + 1) % l] + &self.d[i] * &f.blocks[(i + l - 1) % l])
            .collect();
        DynamicalVector { blocks, ..f.clone() }
    }

    /// Dense matrix on functions valued in the zero-weight subspace.
    pub fn zero_weight_matrix(&self, n_sites: usize) -> DMatrix<C> {
        let sts = zero_weight_states(n_sites);
        let m = sts.len();
        let l = self.l;
        let mut t = DMatrix::<C>::zeros(l * m, l * m);
        for i in 0..l {
            for (mx, j) in [(&self.a[i], (i + 1) % l), (&self.d[i], (i + l - 1) % l)] {
                for (r, &sr) in sts.iter().enumerate() {
                    for (c, &sc) in sts.iter().enumerate() {
                        t[(i * m + r, j * m + c)] += mx[(sr, sc)];
                    }
                }
            }
        }
        t
    }
}

/// Basis states with total σ^z equal to zero.
pub fn zero_weight_states(n_sites: usize) -> Vec<usize> {
    (0..1usize << n_sites)
        .filter(|&st| (0..n_sites).map(|j| spin(st, j, n_sites)).sum::<i32>() == 0)
        .collect()
}

/// Eigenstate check at spectral parameter `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenCheck {
    pub u_re: f64,
    pub u_im: f64,
    /// `‖t̂(u)v − τ(u)v‖/‖v‖`, τ from the closed eigenvalue formula.
    pub residual: f64,
    /// Rayleigh quotient `⟨v,t̂v⟩/⟨v,v⟩` minus τ(u), absolute.
    pub rayleigh_gap: f64,
}

pub fn eigen_check(u: C, roots: &[C], beta: f64, conv: Convention, p: &ModelParams) -> Result<EigenCheck> {
    let v = build_bethe_vector(roots, beta, false, conv, p)?;
    let tv = TransferMatrix::new(u, conv, p)?.apply(&v);
    let ev = eigenvalue_from_roots(u, roots, beta, p)?;
    let mut diff = 0.0;
    let mut num = C::new(0.0, 0.0);
    for (a, b) in tv.blocks.iter().zip(&v.blocks) {
        diff += (a - b * ev).norm_squared();
        num += b.dotc(a);
    }
    let vn = v.norm_sqr();
    if vn == 0.0 {
        return Err(CsosError::Degenerate("Bethe vector vanishes".into()));
    }
    Ok(EigenCheck {
        u_re: u.re,
        u_im: u.im,
        residual: (diff / vn).sqrt() / ev.norm().max(1.0),
        rayleigh_gap: (num / vn - ev).norm() / ev.norm().max(1.0),
    })
}

/// First candidate convention whose Bethe vector is an eigenvector of the
/// transfer matrix (relative residual below `tol` at `u`).
pub fn select_convention(u: C, roots: &[C], beta: f64, tol: f64, p: &ModelParams) -> Result<Convention> {
    for conv in Convention::CANDIDATES {
        let chk = eigen_check(u, roots, beta, conv, p)?;
        log::debug!("convention {conv:?}: eigen residual {:e}", chk.residual);
        if chk.residual < tol {
            return Ok(conv);
        }
    }
    Err(CsosError::Degenerate(
        "no monodromy convention passes the eigenstate test".into(),
    ))
}

/// `‖[t̂(u), t̂(u')]‖_max` on the zero-weight sector.
pub fn transfer_commutator(u: C, u2: C, conv: Convention, p: &ModelParams) -> Result<f64> {
    let t1 = TransferMatrix::new(u, conv, p)?.zero_weight_matrix(p.n_sites);
    let t2 = TransferMatrix::new(u2, conv, p)?.zero_weight_matrix(p.n_sites);
    let c = &t1 * &t2 - &t2 * &t1;
    Ok(c.iter().fold(0.0_f64, |m, x| m.max(x.norm())))
}

/// Bethe vector, its dual and their oracle norm, convenience bundle.
pub struct OracleState {
    pub ket: DynamicalVector,
    pub bra: DynamicalVector,
}

impl OracleState {
    pub fn new(roots: &[C], beta: f64, conv: Convention, p: &ModelParams) -> Result<Self> {
        Ok(OracleState {
            ket: build_bethe_vector(roots, beta, false, conv, p)?,
            bra: build_bethe_vector(roots, beta, true, conv, p)?,
        })
    }

    pub fn norm(&self) -> Result<C> {
        pair(&self.bra, &self.ket)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> ModelParams {
        ModelParams::imaginary(1, 3, 1.0, 2).unwrap()
    }

    #[test]
    fn single_site_monodromy_is_r_matrix() {
        let p = ModelParams::imaginary(1, 3, 1.0, 2).unwrap();
        let u = C::new(0.3, 0.1);
        let s = p.s0 + 1.0;
        let conv = Convention::CANDIDATES[1];
        let m = build_monodromy(u, s, conv, &p).unwrap();
        // Ice rule: A keeps weight, B lowers it (|↑↑⟩ → zero-weight states).
        let up = 0usize;
        assert!(m.b[(up, up)].norm() < 1e-15);
        assert!(m.b[(1, up)].norm() > 0.0 || m.b[(2, up)].norm() > 0.0);
        assert!(m.a[(1, up)].norm() < 1e-15);
    }

    #[test]
    fn empty_vector_is_twist() {
        let p = p2();
        let v = build_bethe_vector(&[], 0.4, false, Convention::CANDIDATES[1], &p).unwrap();
        for (i, b) in v.blocks.iter().enumerate() {
            let s = p.s0 + i as f64;
            assert!((b[0] - omega_pow(0.4, s)).norm() < 1e-14);
        }
    }

    #[test]
    fn pairing_is_bilinear() {
        let p = p2();
        let conv = Convention::CANDIDATES[1];
        let v = build_bethe_vector(&[C::new(0.2, 0.3)], 0.1, false, conv, &p).unwrap();
        let w = build_bethe_vector(&[C::new(-0.1, 0.4)], 0.3, true, conv, &p).unwrap();
        let a = C::new(0.7, -1.2);
        let lhs = pair(&w.scale(a), &v).unwrap();
        let rhs = pair(&w, &v).unwrap() * a;
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn rejects_large_lattice() {
        let p = ModelParams::imaginary(1, 3, 1.0, 8).unwrap();
        assert!(build_monodromy(C::new(0.1, 0.0), p.s0, Convention::CANDIDATES[0], &p).is_err());
    }
}
