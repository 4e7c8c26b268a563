//! Biorthogonal polynomials `p_k(x)`, `q_k(x^2)` under
//! `<f, g> = \int f(x) g(x^2) (1_{x>=0} + gamma 1_{x<0}) W(x) dx`,
//! the polyorthogonal pairs built from them, and their Cauchy transforms.
//!
//! Everything is driven by the bimoments `B[j][k] = <x^j, x^{2k}>`, which
//! reduce to one-sided integrals
//! `E_±(i) = \int_0^\infty x^{i+alpha} e^{±𝔞x - n V̂(x)} dx` with
//! `B[j][k] = E_+(j+2k) + gamma (-1)^j E_-(j+2k)` and `V̂ = x^4/2 - t x^2`.

mod cauchy;
pub mod poly;
mod polyorth;

pub use cauchy::{
    cauchy_p, cauchy_p_boundary, cauchy_poly_mp, cauchy_weights_mp, CauchyPoint,
};
pub use poly::Poly;
pub(crate) use polyorth::w1_w2;
pub use polyorth::{h1, h2, htilde, poly_pair, ratio_h1_htilde, ratio_h2_htilde, PolyPair};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::mp::{horner, mp_powf, mpf, solve_real};
use crate::numerics::quad::{mp_tanh_sinh, mp_tanh_sinh_raw, worst_component, MpTsOptions, PrecisionPolicy};
use rug::Float;
use std::f64::consts::LN_2;

/// Radius past which `u^beta e^{|𝔞| u - n V̂(u)}` has fallen `2^-(bits+20)`
/// below its maximum, for every `beta` listed.
pub(crate) fn tail_cutoff(p: &ModelParams, betas: &[f64], bits: u32) -> f64 {
    let n = p.n as f64;
    let fa = p.frak_a().abs();
    let drop = (bits as f64 + 20.0) * LN_2;
    let mut x_max = 1.0f64;
    for &beta in betas {
        let phi = |u: f64| beta * u.ln() + fa * u - n * (0.5 * u.powi(4) - p.t * u * u);
        let mut u = 1e-2;
        let mut best = phi(u);
        loop {
            u += 1e-2 * u.max(1.0);
            let v = phi(u);
            if v > best {
                best = v;
            } else if v < best - drop {
                break;
            }
        }
        x_max = x_max.max(u);
    }
    x_max
}

/// `(1_{x>=0} + gamma 1_{x<0}) |x|^alpha e^{-n V̂(x) + 𝔞 x}` in working precision.
pub(crate) fn weight_mp(p: &ModelParams, x: &Float) -> Float {
    let prec = x.prec();
    let x2 = Float::with_val(prec, x.square_ref());
    let mut e = Float::with_val(prec, x2.square_ref()) / 2u32;
    e -= Float::with_val(prec, &x2 * p.t);
    e *= -(p.n as f64);
    e += Float::with_val(prec, x * p.frak_a());
    let mut w = e.exp() * mp_powf(&Float::with_val(prec, x.abs_ref()), p.alpha);
    if x.is_sign_negative() && !x.is_zero() {
        w *= p.gamma;
    }
    w
}

/// One-sided bimoment integrals and the assembled table `B[j][k] = M(j + 2k)`.
#[derive(Clone, Debug)]
pub struct BimomentTable {
    pub params: ModelParams,
    pub policy: PrecisionPolicy,
    deg: usize,
    e_plus: Vec<Float>,
    e_minus: Vec<Float>,
    moments: Vec<Float>,
    errors: Vec<f64>,
}

impl BimomentTable {
    /// Degree cap: `B[j][k]` is available for `k <= deg + 1` and `j <= 2 deg + 2`.
    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn prec(&self) -> u32 {
        self.policy.bits
    }

    /// Largest `i` with `M(i)` stored.
    pub fn max_moment(&self) -> usize {
        self.moments.len() - 1
    }

    /// `M(i) = <x^i, 1>`; any `(j, k)` with `j + 2k = i` gives the same entry.
    pub fn moment(&self, i: usize) -> &Float {
        &self.moments[i]
    }

    /// `B[j][k] = <x^j, x^{2k}>`.
    pub fn entry(&self, j: usize, k: usize) -> &Float {
        &self.moments[j + 2 * k]
    }

    /// `(E_+(i), E_-(i))`.
    pub fn half_line(&self, i: usize) -> (&Float, &Float) {
        (&self.e_plus[i], &self.e_minus[i])
    }

    /// Error estimate of `M(i)` relative to `|M(i)|`.
    pub fn rel_error(&self, i: usize) -> f64 {
        let m = self.moments[i].to_f64().abs();
        if m > 0.0 {
            self.errors[i] / m
        } else {
            self.errors[i]
        }
    }

    pub fn max_rel_error(&self) -> f64 {
        (0..self.moments.len()).map(|i| self.rel_error(i)).fold(0.0, f64::max)
    }
}

/// Build all bimoments needed for biorthogonal systems up to degree `deg`
/// with one vector quadrature over the shared abscissae.
pub fn build_bimoments(p: ModelParams, deg: usize, policy: PrecisionPolicy) -> Result<BimomentTable> {
    p.validate_biorth()?;
    let prec = policy.bits;
    let imax = 4 * deg + 4;
    let x_max = tail_cutoff(&p, &[p.alpha, p.alpha + imax as f64], prec);
    let fa = mpf(prec, p.frak_a());
    let n = p.n as f64;
    let f = |x: &Float| -> Vec<Float> {
        let x2 = Float::with_val(prec, x.square_ref());
        let mut v = Float::with_val(prec, x2.square_ref()) / 2u32;
        v -= Float::with_val(prec, &x2 * p.t);
        let mut pw = Float::with_val(prec, -v * n).exp() * mp_powf(x, p.alpha);
        let ax = Float::with_val(prec, &fa * x);
        let ep = Float::with_val(prec, ax.exp_ref());
        let em = Float::with_val(prec, (-ax).exp_ref());
        let mut out = Vec::with_capacity(2 * imax + 2);
        for _ in 0..=imax {
            out.push(Float::with_val(prec, &pw * &ep));
            out.push(Float::with_val(prec, &pw * &em));
            pw *= x;
        }
        out
    };
    let opt = MpTsOptions {
        prec,
        tol_rel: policy.rel_tol(),
        tol_abs: 0.0,
        max_levels: policy.max_refinements,
        left_exp: (1.0 + p.alpha).min(1.0),
    };
    let (vals, errs, ok) = mp_tanh_sinh_raw(&f, &Float::new(prec), &mpf(prec, x_max), 2 * imax + 2, &opt);
    if !ok {
        let w = worst_component(&errs);
        let sign = if w % 2 == 0 { '+' } else { '-' };
        return Err(Error::Quadrature {
            context: format!("bimoment E{sign}({}) at degree cap {deg}", w / 2),
            best: vals[w].to_f64(),
            err: errs[w],
        });
    }
    let mut e_plus = Vec::with_capacity(imax + 1);
    let mut e_minus = Vec::with_capacity(imax + 1);
    let mut moments = Vec::with_capacity(imax + 1);
    let mut errors = Vec::with_capacity(imax + 1);
    for i in 0..=imax {
        let ep = vals[2 * i].clone();
        let em = vals[2 * i + 1].clone();
        let s = if i % 2 == 0 { p.gamma } else { -p.gamma };
        moments.push(Float::with_val(prec, &em * s) + &ep);
        errors.push(errs[2 * i] + p.gamma.abs() * errs[2 * i + 1]);
        e_plus.push(ep);
        e_minus.push(em);
    }
    Ok(BimomentTable { params: p, policy, deg, e_plus, e_minus, moments, errors })
}

/// Monic biorthogonal families and their norms.
#[derive(Clone, Debug)]
pub struct BiorthSystem {
    pub params: ModelParams,
    table: BimomentTable,
    p: Vec<Poly>,
    q: Vec<Poly>,
    h: Vec<Float>,
    /// `max_{j != k} |<p_j, q_k>| / max_k |h_k|` evaluated through the bimoments.
    pub residual_report: f64,
}

/// Largest algebraic residual accepted before the precision is escalated.
const ALGEBRAIC_TOL: f64 = 1e-14;

impl BiorthSystem {
    /// Bimoments at the default precision for `deg`, then the system up to `deg`.
    pub fn build(p: ModelParams, deg: usize) -> Result<Self> {
        let table = build_bimoments(p, deg, PrecisionPolicy::for_degree(deg))?;
        biorth_system(table, deg)
    }

    /// As [`BiorthSystem::build`], with the working precision overridden.
    pub fn build_with_bits(p: ModelParams, deg: usize, bits: Option<u32>) -> Result<Self> {
        let mut policy = PrecisionPolicy::for_degree(deg);
        if let Some(b) = bits {
            policy = PrecisionPolicy::new(b, policy.target_abs_err, policy.max_refinements)?;
        }
        biorth_system(build_bimoments(p, deg, policy)?, deg)
    }

    pub fn kmax(&self) -> usize {
        self.h.len() - 1
    }

    pub fn prec(&self) -> u32 {
        self.table.prec()
    }

    pub fn table(&self) -> &BimomentTable {
        &self.table
    }

    pub fn p(&self, k: usize) -> &Poly {
        &self.p[k]
    }

    pub fn q(&self, k: usize) -> &Poly {
        &self.q[k]
    }

    pub fn h(&self, k: usize) -> &Float {
        &self.h[k]
    }

    pub fn h_f64(&self) -> Vec<f64> {
        self.h.iter().map(|h| h.to_f64()).collect()
    }

    pub fn sign_pattern(&self) -> Vec<i8> {
        self.h.iter().map(|h| if h.is_sign_negative() { -1 } else { 1 }).collect()
    }

    pub fn p_coeffs_f64(&self, k: usize) -> Vec<f64> {
        self.p[k].iter().map(|c| c.to_f64()).collect()
    }

    pub fn q_coeffs_f64(&self, k: usize) -> Vec<f64> {
        self.q[k].iter().map(|c| c.to_f64()).collect()
    }

    /// `<p, q(x^2)>` for arbitrary coefficient vectors.
    pub fn inner(&self, p: &[Float], q: &[Float]) -> Float {
        let prec = self.prec();
        let mut s = Float::new(prec);
        for (i, pi) in p.iter().enumerate() {
            if pi.is_zero() {
                continue;
            }
            let mut row = Float::new(prec);
            for (l, ql) in q.iter().enumerate() {
                row += Float::with_val(prec, ql * self.table.entry(i, l));
            }
            s += row * pi;
        }
        s
    }

    /// `<x^j, q(x^2)>`.
    pub fn inner_xj(&self, j: usize, q: &[Float]) -> Float {
        let mut s = Float::new(self.prec());
        for (l, ql) in q.iter().enumerate() {
            s += Float::with_val(self.prec(), ql * self.table.entry(j, l));
        }
        s
    }

    /// `<p, x^{2k}>`.
    pub fn inner_x2k(&self, p: &[Float], k: usize) -> Float {
        let mut s = Float::new(self.prec());
        for (i, pi) in p.iter().enumerate() {
            s += Float::with_val(self.prec(), pi * self.table.entry(i, k));
        }
        s
    }

    /// `W(x)` including the gamma factor on the negative axis.
    pub fn weight(&self, x: &Float) -> Float {
        weight_mp(&self.params, x)
    }

    /// Off-diagonal biorthogonality residual from an independent quadrature
    /// of the assembled polynomials over the real line, relative to
    /// `max |h_k|`. Also returns the quadrature values of `h_k`.
    pub fn quadrature_residual(&self, kmax: usize) -> Result<(f64, Vec<f64>)> {
        let kmax = kmax.min(self.kmax());
        let prec = self.prec();
        let p = self.params;
        let d = kmax + 1;
        let x_max = tail_cutoff(&p, &[p.alpha + 3.0 * kmax as f64], prec);
        let fa = mpf(prec, p.frak_a());
        let f = |x: &Float| -> Vec<Float> {
            let x2 = Float::with_val(prec, x.square_ref());
            let mut v = Float::with_val(prec, x2.square_ref()) / 2u32;
            v -= Float::with_val(prec, &x2 * p.t);
            let base = Float::with_val(prec, -v * (p.n as f64)).exp() * mp_powf(x, p.alpha);
            let ax = Float::with_val(prec, &fa * x);
            let ep = Float::with_val(prec, ax.exp_ref()) * &base;
            let em = Float::with_val(prec, (-ax).exp_ref()) * &base * p.gamma;
            let mx = Float::with_val(prec, -x);
            let pj: Vec<Float> = (0..d)
                .map(|j| Float::with_val(prec, horner(&self.p[j], x) * &ep) + horner(&self.p[j], &mx) * &em)
                .collect();
            let qk: Vec<Float> = (0..d).map(|k| horner(&self.q[k], &x2)).collect();
            let mut out = Vec::with_capacity(d * d);
            for a in &pj {
                for b in &qk {
                    out.push(Float::with_val(prec, a * b));
                }
            }
            out
        };
        let opt = MpTsOptions {
            prec,
            tol_rel: 2f64.powi(-(prec.min(1000) as i32) / 2 - 20).max(1e-40),
            tol_abs: 0.0,
            max_levels: 12,
            left_exp: (1.0 + p.alpha).min(1.0),
        };
        let (vals, _) = mp_tanh_sinh(&f, &Float::new(prec), &mpf(prec, x_max), d * d, &opt)?;
        let diag: Vec<f64> = (0..d).map(|k| vals[k * d + k].to_f64()).collect();
        let hmax = diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut off = 0.0f64;
        for j in 0..d {
            for k in 0..d {
                if j != k {
                    off = off.max(vals[j * d + k].to_f64().abs());
                }
            }
        }
        Ok((off / hmax, diag))
    }
}

/// Linear system for the non-leading coefficients of `p_k`:
/// `sum_i c_i B[i][j] = -B[k][j]`, `j < k`.
pub(crate) fn p_system(t: &BimomentTable, k: usize) -> (Vec<Vec<Float>>, Vec<Float>) {
    let a = (0..k).map(|j| (0..k).map(|i| t.entry(i, j).clone()).collect()).collect();
    let b = (0..k).map(|j| -t.entry(k, j).clone()).collect();
    (a, b)
}

/// Same for `q_k`: `sum_l d_l B[j][l] = -B[j][k]`, `j < k`.
pub(crate) fn q_system(t: &BimomentTable, k: usize) -> (Vec<Vec<Float>>, Vec<Float>) {
    let a = (0..k).map(|j| (0..k).map(|l| t.entry(j, l).clone()).collect()).collect();
    let b = (0..k).map(|j| -t.entry(j, k).clone()).collect();
    (a, b)
}

fn monic_from(prec: u32, mut c: Vec<Float>) -> Poly {
    c.push(Float::with_val(prec, 1));
    c
}

fn assemble(table: BimomentTable, kmax: usize) -> Result<BiorthSystem> {
    let prec = table.prec();
    let mut p = Vec::with_capacity(kmax + 1);
    let mut q = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        let (a, b) = p_system(&table, k);
        let c = solve_real(a, b).ok_or_else(|| Error::Singular(format!("p_{k} system")))?;
        p.push(monic_from(prec, c));
        let (a, b) = q_system(&table, k);
        let d = solve_real(a, b).ok_or_else(|| Error::Singular(format!("q_{k} system")))?;
        q.push(monic_from(prec, d));
    }
    let mut sys = BiorthSystem { params: table.params, table, p, q, h: Vec::new(), residual_report: 0.0 };
    let h: Vec<Float> = (0..=kmax).map(|k| sys.inner(&sys.p[k], &sys.q[k])).collect();
    let floor = 2f64.powi(-(prec.min(1000) as i32) / 2);
    for (k, hk) in h.iter().enumerate() {
        let scale = sys.table.entry(k, k).to_f64().abs();
        if hk.is_zero() || hk.to_f64().abs() <= floor * scale {
            return Err(Error::Singular(format!("h_{k} vanishes at {prec} bits")));
        }
    }
    let hmax = h.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let mut res = 0.0f64;
    for j in 0..=kmax {
        for k in 0..=kmax {
            if j != k {
                res = res.max(sys.inner(&sys.p[j], &sys.q[k]).to_f64().abs() / hmax);
            }
        }
    }
    sys.h = h;
    sys.residual_report = res;
    if res > ALGEBRAIC_TOL {
        return Err(Error::Singular(format!("algebraic residual {res:e} at {prec} bits")));
    }
    Ok(sys)
}

/// Solve for `p_k, q_k, h_k`, `k <= kmax`. A singular or inaccurate solve
/// triggers one rebuild of the bimoments at twice the precision.
pub fn biorth_system(table: BimomentTable, kmax: usize) -> Result<BiorthSystem> {
    if kmax > table.deg() {
        return Err(Error::Domain(format!("kmax {kmax} exceeds the bimoment degree cap {}", table.deg())));
    }
    let (params, deg, policy) = (table.params, table.deg(), table.policy);
    match assemble(table, kmax) {
        Err(Error::Singular(_)) => {
            let wider = build_bimoments(params, deg, policy.with_bits(policy.bits * 2))?;
            assemble(wider, kmax)
        }
        r => r,
    }
}

/// Number of sign changes of `sum_j c_j w_j(xi)` on a uniform grid of
/// `(0, xi_max)`, where `w_{2i} = u_1 xi^i`, `w_{2i+1} = u_2 xi^i`,
/// `u_1 = e^{𝔞 sqrt xi} + gamma e^{-𝔞 sqrt xi}`, `u_2 = sqrt xi (e^{𝔞 sqrt xi} - gamma e^{-𝔞 sqrt xi})`.
/// The common factor `e^{𝔞 sqrt xi}` is divided out.
pub fn markov_sign_changes(p: &ModelParams, coeffs: &[f64], xi_max: f64, grid: usize) -> usize {
    let fa = p.frak_a();
    let mut changes = 0;
    let mut last = 0.0f64;
    for g in 1..grid {
        let xi = xi_max * g as f64 / grid as f64;
        let u = xi.sqrt();
        let r = p.gamma * (-2.0 * fa * u).exp();
        let (u1, u2) = (1.0 + r, u * (1.0 - r));
        let mut v = 0.0;
        let mut pw = 1.0;
        for (j, c) in coeffs.iter().enumerate() {
            v += c * pw * if j % 2 == 0 { u1 } else { u2 };
            if j % 2 == 1 {
                pw *= xi;
            }
        }
        if v != 0.0 {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                changes += 1;
            }
            last = v;
        }
    }
    changes
}
