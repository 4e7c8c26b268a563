//! Polyorthogonal pairs `(P_{k1,k2}, Q_{k1,k2})` against the weights
//! `W_1(ξ) = (e^{𝔞√ξ} + gamma e^{-𝔞√ξ}) ξ^{-1/2} Ŵ(√ξ)` and
//! `W_2(ξ) = (e^{𝔞√ξ} - gamma e^{-𝔞√ξ}) Ŵ(√ξ)`, for the four index
//! differences `k1 - k2 ∈ {-1, 0, 1, 2}`.

use super::poly::{even_odd, scale, sub, Poly};
use super::BiorthSystem;
use crate::error::{Error, Result};
use crate::numerics::mp::{horner, mp_powf};
use rug::Float;

#[derive(Clone, Debug)]
pub struct PolyPair {
    pub index: (usize, usize),
    /// `P` as a polynomial in `ξ`.
    pub p_coeffs: Poly,
    /// `Q(ξ) = q_norm (r(√ξ) e^{𝔞√ξ} + gamma r(-√ξ) e^{-𝔞√ξ}) ξ^{-1/2} Ŵ(√ξ)` with `r = q_poly`.
    pub q_poly: Poly,
    pub q_norm: Float,
    /// `Q = A W_1 + B W_2`.
    pub a_coeffs: Poly,
    pub b_coeffs: Poly,
}

impl PolyPair {
    pub fn eval_p(&self, xi: &Float) -> Float {
        horner(&self.p_coeffs, xi)
    }

    /// `Q(ξ)` for `ξ > 0`.
    pub fn eval_q(&self, sys: &BiorthSystem, xi: &Float) -> Float {
        let (w1, w2) = w1_w2(sys, xi);
        horner(&self.a_coeffs, xi) * w1 + horner(&self.b_coeffs, xi) * w2
    }

    pub fn lead_a(&self) -> &Float {
        self.a_coeffs.last().expect("nonempty")
    }

    pub fn lead_b(&self) -> &Float {
        self.b_coeffs.last().expect("nonempty")
    }
}

/// `(W_1(ξ), W_2(ξ))` for `ξ > 0`.
pub(crate) fn w1_w2(sys: &BiorthSystem, xi: &Float) -> (Float, Float) {
    let prec = sys.prec();
    let p = &sys.params;
    let u = Float::with_val(prec, xi.sqrt_ref());
    let mut v = Float::with_val(prec, xi.square_ref()) / 2u32;
    v -= Float::with_val(prec, xi * p.t);
    let what = Float::with_val(prec, -v * (p.n as f64)).exp() * mp_powf(&u, p.alpha);
    let au = Float::with_val(prec, &u * p.frak_a());
    let ep = Float::with_val(prec, au.exp_ref());
    let em = Float::with_val(prec, (-au).exp_ref()) * p.gamma;
    let w1 = Float::with_val(prec, &ep + &em) * &what / &u;
    let w2 = (ep - em) * what;
    (w1, w2)
}

/// `p_m - a_1 p_{m-1}` with `a_1` the `x^{m-1}` coefficient of `p_m`.
fn tilde_p(sys: &BiorthSystem, m: usize) -> Poly {
    if m == 0 {
        return sys.p(0).clone();
    }
    let a1 = &sys.p(m)[m - 1];
    sub(sys.p(m), &scale(sys.p(m - 1), a1))
}

fn with_q(index: (usize, usize), p_coeffs: Poly, q_poly: Poly, q_norm: Float) -> PolyPair {
    let (e, o) = even_odd(&q_poly);
    let a_coeffs = if e.is_empty() { vec![Float::new(q_norm.prec())] } else { scale(&e, &q_norm) };
    let b_coeffs = if o.is_empty() { vec![Float::new(q_norm.prec())] } else { scale(&o, &q_norm) };
    PolyPair { index, p_coeffs, q_poly, q_norm, a_coeffs, b_coeffs }
}

pub fn poly_pair(sys: &BiorthSystem, k1: usize, k2: usize) -> Result<PolyPair> {
    let m = k1 + k2;
    let d = k1 as i64 - k2 as i64;
    if !(-1..=2).contains(&d) {
        return Err(Error::Unsupported(format!(
            "polyorthogonal pair ({k1}, {k2}): only k1 - k2 in {{-1, 0, 1, 2}} is defined"
        )));
    }
    if m > sys.kmax() {
        return Err(Error::Domain(format!("pair ({k1}, {k2}) needs degree {m}, system has {}", sys.kmax())));
    }
    let prec = sys.prec();
    Ok(match d {
        0 | 1 => {
            if m == 0 {
                with_q((k1, k2), sys.q(0).clone(), vec![Float::new(prec)], Float::new(prec))
            } else {
                let norm = Float::with_val(prec, sys.h(m - 1) * 2u32).recip();
                with_q((k1, k2), sys.q(m).clone(), sys.p(m - 1).clone(), norm)
            }
        }
        -1 => {
            let k = k1;
            let c0 = sys.inner_xj(2 * k + 1, sys.q(2 * k));
            let c1 = sys.inner_xj(2 * k + 1, sys.q(2 * k + 1));
            let p = sub(&scale(sys.q(2 * k + 1), &c0), &scale(sys.q(2 * k), &c1));
            with_q((k1, k2), p, tilde_p(sys, 2 * k + 1), Float::with_val(prec, 1))
        }
        _ => {
            let k = k2;
            let c1 = sys.inner_xj(2 * k + 2, sys.q(2 * k + 1));
            let c2 = sys.inner_xj(2 * k + 2, sys.q(2 * k + 2));
            let p = sub(&scale(sys.q(2 * k + 2), &c1), &scale(sys.q(2 * k + 1), &c2));
            with_q((k1, k2), p, tilde_p(sys, 2 * k + 2), Float::with_val(prec, 1))
        }
    })
}

/// `h^{(1)}_{k1,k2} = \int P ξ^{k1} W_1 dξ = 2 <x^{2 k1}, P(x^2)>`.
pub fn h1(sys: &BiorthSystem, pair: &PolyPair) -> Float {
    sys.inner_xj(2 * pair.index.0, &pair.p_coeffs) * 2u32
}

/// `h^{(2)}_{k1,k2} = \int P ξ^{k2} W_2 dξ = 2 <x^{2 k2 + 1}, P(x^2)>`.
pub fn h2(sys: &BiorthSystem, pair: &PolyPair) -> Float {
    sys.inner_xj(2 * pair.index.1 + 1, &pair.p_coeffs) * 2u32
}

/// `\tilde h_{k1,k2} = \int Q ξ^{k1+k2-1} dξ = 2 q_norm <r, x^{2(k1+k2-1)}>`.
pub fn htilde(sys: &BiorthSystem, pair: &PolyPair) -> Result<Float> {
    let m = pair.index.0 + pair.index.1;
    if m == 0 {
        return Err(Error::Domain("tilde h needs k1 + k2 >= 1".into()));
    }
    Ok(sys.inner_x2k(&pair.q_poly, m - 1) * &pair.q_norm * 2u32)
}

fn ratio(num: Float, den: Float, what: &str) -> Result<Float> {
    if den.is_zero() {
        return Err(Error::Numerical(format!("{what}: vanishing denominator")));
    }
    Ok(num / den)
}

/// `h^{(1)}_{k+1,k} / \tilde h_{k+2,k}`.
pub fn ratio_h1_htilde(sys: &BiorthSystem, k: usize) -> Result<Float> {
    let num = h1(sys, &poly_pair(sys, k + 1, k)?);
    let den = htilde(sys, &poly_pair(sys, k + 2, k)?)?;
    ratio(num, den, "h1/tilde h")
}

/// `h^{(2)}_{k,k} / \tilde h_{k,k+1}`.
pub fn ratio_h2_htilde(sys: &BiorthSystem, k: usize) -> Result<Float> {
    let num = h2(sys, &poly_pair(sys, k, k)?);
    let den = htilde(sys, &poly_pair(sys, k, k + 1)?)?;
    ratio(num, den, "h2/tilde h")
}
