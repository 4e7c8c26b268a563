//! Cauchy transforms over `R_+` used by the RH constructions.
//!
//! Every transform here has the form `(1/2πi) \int_0^\infty g(u) / (u^2 - Z) du`
//! with `g` analytic near the positive axis. Off the axis the integral is
//! taken along `R_+` directly; boundary values at `Z = x > 0` come from
//! deforming the path around `u = sqrt x` by a half circle.

use super::{tail_cutoff, BiorthSystem};
use crate::error::{Error, Result};
use crate::numerics::mp::{horner_c, mp_pi, mpf, MpComplex};
use crate::numerics::quad::{mp_tanh_sinh, MpTsOptions};
use num_complex::Complex64;
use rug::Float;

/// Where a transform in the squared variable `Z` is evaluated.
#[derive(Clone, Debug)]
pub enum CauchyPoint {
    Off(MpComplex),
    /// Boundary value from the upper half plane at `Z = x > 0`.
    Plus(Float),
    /// Boundary value from the lower half plane.
    Minus(Float),
}

impl CauchyPoint {
    pub fn off(prec: u32, z: Complex64) -> Self {
        CauchyPoint::Off(MpComplex::from_c64(prec, z))
    }
}

fn to_pairs(v: Vec<Float>) -> Vec<MpComplex> {
    v.chunks(2).map(|c| MpComplex { re: c[0].clone(), im: c[1].clone() }).collect()
}

fn flatten(v: Vec<MpComplex>) -> Vec<Float> {
    v.into_iter().flat_map(|c| [c.re, c.im]).collect()
}

fn add_into(acc: &mut [MpComplex], v: &[MpComplex]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a = &*a + b;
    }
}

/// `(1/2πi) \int_0^{x_max} g(u) / (u^2 - Z) du`.
fn cauchy_u2<G>(g: &G, dim: usize, z: &CauchyPoint, x_max: f64, prec: u32, left_exp: f64) -> Result<Vec<MpComplex>>
where
    G: Fn(&MpComplex) -> Vec<MpComplex> + Sync,
{
    let opt = MpTsOptions { prec, tol_rel: 2f64.powi(-(prec.min(1000) as i32) + 24), tol_abs: 0.0, max_levels: 12, left_exp };
    let segment = |a: &Float, b: &Float, zz: &MpComplex, opt: &MpTsOptions| -> Result<Vec<MpComplex>> {
        let f = |u: &Float| {
            let uc = MpComplex::real(u.clone());
            let d = (&(&uc * &uc) - zz).recip();
            flatten(g(&uc).iter().map(|v| v * &d).collect())
        };
        let (v, _) = mp_tanh_sinh(&f, a, b, 2 * dim, opt)?;
        Ok(to_pairs(v))
    };
    let zero = Float::new(prec);
    // Points close to R_+ are handled like boundary values: the path bends
    // away from the pole, to the side opposite Im Z.
    let bend = match z {
        CauchyPoint::Off(zz) if zz.re.is_sign_positive() && Float::with_val(prec, zz.im.abs_ref()) < zz.re => {
            Some((zz.clone(), if zz.im.is_sign_negative() { -1.0 } else { 1.0 }, zz.re.clone()))
        }
        CauchyPoint::Off(_) => None,
        CauchyPoint::Plus(x) | CauchyPoint::Minus(x) => {
            if !x.is_sign_positive() || x.is_zero() {
                return Err(Error::Domain("boundary values exist only on the positive axis".into()));
            }
            let sign = if matches!(z, CauchyPoint::Plus(_)) { 1.0 } else { -1.0 };
            Some((MpComplex::real(x.clone()), sign, x.clone()))
        }
    };
    let mut total = match bend {
        None => {
            let CauchyPoint::Off(zz) = z else { unreachable!() };
            segment(&zero, &mpf(prec, x_max), zz, &opt)?
        }
        Some((zz, sign, x)) => {
            let u0 = Float::with_val(prec, x.sqrt_ref());
            let r = Float::with_val(prec, &u0 / 2u32).min(&mpf(prec, 0.5));
            let zz = &zz;
            let lo = Float::with_val(prec, &u0 - &r);
            let hi = Float::with_val(prec, &u0 + &r);
            let top = mpf(prec, x_max).max(&Float::with_val(prec, &hi + 1u32));
            let mut acc = segment(&zero, &lo, zz, &opt)?;
            let right_opt = MpTsOptions { left_exp: 1.0, ..opt };
            add_into(&mut acc, &segment(&hi, &top, zz, &right_opt)?);
            // Half circle u0 + r e^{iθ}, θ = π + sign·π s; plus passes below the pole.
            let pi = mp_pi(prec);
            let arc = |s: &Float| {
                let theta = Float::with_val(prec, s * sign) * &pi + &pi;
                let (sn, cs) = theta.sin_cos(Float::new(prec));
                let e = MpComplex { re: cs, im: sn };
                let u = &MpComplex::real(u0.clone()) + &e.scale(&r);
                let du = e.scale(&r).mul_i().scale(&Float::with_val(prec, &pi * sign));
                let d = du.div(&(&(&u * &u) - zz));
                flatten(g(&u).iter().map(|v| v * &d).collect())
            };
            let (v, _) = mp_tanh_sinh(&arc, &zero, &mpf(prec, 1.0), 2 * dim, &right_opt)?;
            add_into(&mut acc, &to_pairs(v));
            acc
        }
    };
    // 1/(2πi) = -i/(2π)
    let s = Float::with_val(prec, mp_pi(prec) * 2u32).recip();
    for v in total.iter_mut() {
        *v = -v.mul_i().scale(&s);
    }
    Ok(total)
}

/// `(u^alpha e^{-nV̂(u) + 𝔞u}, u^alpha e^{-nV̂(u) - 𝔞u})` at complex `u` near `R_+`.
fn weights_at(sys: &BiorthSystem, u: &MpComplex) -> (MpComplex, MpComplex) {
    let p = &sys.params;
    let prec = u.prec();
    let u2 = u * u;
    let u4 = &u2 * &u2;
    let half = Float::with_val(prec, 0.5);
    let v = &u4.scale(&half) - &u2.scale(&mpf(prec, p.t));
    let nv = v.scale(&mpf(prec, -(p.n as f64)));
    let au = u.scale(&mpf(prec, p.frak_a()));
    let pw = u.powf(p.alpha);
    (&pw * &(&nv + &au).exp(), &pw * &(&nv - &au).exp())
}

fn cutoff(sys: &BiorthSystem, max_deg_u: usize) -> f64 {
    tail_cutoff(&sys.params, &[sys.params.alpha + max_deg_u as f64 + 2.0], sys.prec())
}

/// `C̃p(Z)` in the squared variable for each polynomial:
/// `(1/2πi) \int_0^\infty (p(u)e^{𝔞u} + gamma p(-u)e^{-𝔞u}) u^alpha e^{-nV̂(u)} / (u^2 - Z) du`.
pub fn cauchy_poly_mp(sys: &BiorthSystem, polys: &[&[Float]], z: &CauchyPoint) -> Result<Vec<MpComplex>> {
    let prec = sys.prec();
    let gamma = mpf(prec, sys.params.gamma);
    let g = |u: &MpComplex| {
        let (ep, em) = weights_at(sys, u);
        let em = em.scale(&gamma);
        let mu = -u.clone();
        polys.iter().map(|p| &(&horner_c(p, u) * &ep) + &(&horner_c(p, &mu) * &em)).collect()
    };
    let deg = polys.iter().map(|p| p.len()).max().unwrap_or(1);
    cauchy_u2(&g, polys.len(), z, cutoff(sys, deg), prec, (1.0 + sys.params.alpha).min(1.0))
}

/// `(C̃_1 f, C̃_2 f)` for polynomials `f(ξ)`, where
/// `C̃_j f(Z) = (1/2πi) \int_0^\infty f(ξ) W_j(ξ) / (ξ - Z) dξ`. In `u = sqrt ξ`
/// the integrands are `2 f(u^2) (e^{𝔞u} + gamma e^{-𝔞u}) Ŵ(u)` and
/// `2u f(u^2) (e^{𝔞u} - gamma e^{-𝔞u}) Ŵ(u)`.
pub fn cauchy_weights_mp(sys: &BiorthSystem, polys: &[&[Float]], z: &CauchyPoint) -> Result<Vec<(MpComplex, MpComplex)>> {
    let prec = sys.prec();
    let gamma = mpf(prec, sys.params.gamma);
    let two = mpf(prec, 2.0);
    let g = |u: &MpComplex| {
        let (ep, em) = weights_at(sys, u);
        let em = em.scale(&gamma);
        let w1 = (&ep + &em).scale(&two);
        let w2 = &(&ep - &em).scale(&two) * u;
        let u2 = u * u;
        let mut out = Vec::with_capacity(2 * polys.len());
        for p in polys {
            let fv = horner_c(p, &u2);
            out.push(&fv * &w1);
            out.push(&fv * &w2);
        }
        out
    };
    let deg = polys.iter().map(|p| 2 * p.len()).max().unwrap_or(1);
    let v = cauchy_u2(&g, 2 * polys.len(), z, cutoff(sys, deg), prec, (1.0 + sys.params.alpha).min(1.0))?;
    Ok(v.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect())
}

/// `C̃p_k(z)` for `z` off the positive axis.
pub fn cauchy_p(sys: &BiorthSystem, k: usize, z: Complex64) -> Result<Complex64> {
    let dist = if z.re >= 0.0 { z.im.abs() } else { z.norm() };
    if !(dist >= 1e-8) {
        return Err(Error::Domain(format!("z = {z} lies within 1e-8 of R_+; use the boundary values")));
    }
    if k > sys.kmax() {
        return Err(Error::Domain(format!("k = {k} exceeds the system degree {}", sys.kmax())));
    }
    let zz = MpComplex::from_c64(sys.prec(), z);
    let z2 = &zz * &zz;
    let v = cauchy_poly_mp(sys, &[sys.p(k)], &CauchyPoint::Off(z2))?;
    Ok(v[0].to_c64())
}

/// Boundary value `C̃p_{k,±}(x)` at `x > 0`.
pub fn cauchy_p_boundary(sys: &BiorthSystem, k: usize, x: f64, plus: bool) -> Result<Complex64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("boundary point must be positive, got {x}")));
    }
    if k > sys.kmax() {
        return Err(Error::Domain(format!("k = {k} exceeds the system degree {}", sys.kmax())));
    }
    let x2 = mpf(sys.prec(), x * x);
    let pt = if plus { CauchyPoint::Plus(x2) } else { CauchyPoint::Minus(x2) };
    let v = cauchy_poly_mp(sys, &[sys.p(k)], &pt)?;
    Ok(v[0].to_c64())
}
