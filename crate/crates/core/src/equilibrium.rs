//! Explicit equilibrium density near the critical point at the origin.
//!
//! Everything is expressed through the map `J_c(s) = c (s+1)^{3/2} s^{-1/2}`.
//! With `w = s + 1` and `Z = (z/c)^2` the equation `J_c(s) = z` becomes the
//! depressed cubic `w^3 - Z w + Z = 0`, so the inverse branches are roots of
//! that cubic picked by continuation. The additive constants of the
//! g-functions are never needed: only `G = g'` and constant-free series
//! coefficients are exposed.

use crate::error::{Error, Result};
use crate::model::{multicrit_params, pearcey_params, solve_c};
use crate::numerics::quad::tanh_sinh;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

const OMEGA: Complex64 = Complex64::new(-0.5, 0.866_025_403_784_438_6);
const MAP_TOL: f64 = 1e-13;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `a / b` without forming `|b|^2`, which underflows for `|b| < 1e-154`.
fn sdiv(a: Complex64, b: Complex64) -> Complex64 {
    let s = b.norm();
    (a / s) / (b / s)
}

/// `J_c(s) = c (s+1)^{3/2} s^{-1/2}`, principal branches, cut on `[-1, 0]`.
#[allow(non_snake_case)]
pub fn map_J(s: Complex64, c: f64) -> Result<Complex64> {
    if s.im == 0.0 && (-1.0..=0.0).contains(&s.re) {
        return Err(Error::Domain(format!("s = {s} lies on the branch cut [-1, 0]")));
    }
    let w = s + 1.0;
    Ok(c * w.powf(1.5) * s.powf(-0.5))
}

/// Right endpoint `J_c(1/2) = 3^{3/2} c / 2`, where `J_c'` vanishes.
pub fn endpoint_b(c: f64) -> f64 {
    3f64.powf(1.5) * c / 2.0
}

/// Roots of `w^3 - Z w + Z` given `zeta` with `zeta^3 = Z`. With
/// `w = zeta v` this is `v^3 - zeta v + 1 = 0`, which stays well scaled as
/// `Z -> 0`.
fn cubic_roots_scaled(zeta: Complex64) -> [Complex64; 3] {
    if zeta == Complex64::new(0.0, 0.0) {
        return [zeta; 3];
    }
    // Cardano with p = -zeta, q = 1; take the larger |u^3| for stability.
    let disc = (c64(0.25, 0.0) - zeta * zeta * zeta / 27.0).sqrt();
    let (a1, a2) = (-0.5 + disc, -0.5 - disc);
    let u3 = if a1.norm() >= a2.norm() { a1 } else { a2 };
    let u = u3.powf(1.0 / 3.0);
    let v = zeta / (3.0 * u);
    let w2 = OMEGA * OMEGA;
    let mut roots = [u + v, OMEGA * u + w2 * v, w2 * u + OMEGA * v];
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let f = *r * *r * *r - zeta * *r + 1.0;
            let df = 3.0 * *r * *r - zeta;
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            *r -= step;
            if step.norm() <= 1e-17 * r.norm() {
                break;
            }
        }
    }
    roots.map(|r| r * zeta)
}

fn cubic_roots(zz: Complex64) -> [Complex64; 3] {
    cubic_roots_scaled(zz.powf(1.0 / 3.0))
}

/// `w = s + 1` roots whose `s` really maps to `z` (squaring admits `-z`).
fn preimages(z: Complex64, c: f64) -> Vec<Complex64> {
    let zz = (z / c) * (z / c);
    cubic_roots(zz)
        .into_iter()
        .filter(|w| match map_J(*w - 1.0, c) {
            Ok(j) => (j - z).norm() <= 1e-8 * (1.0 + z.norm()),
            Err(_) => false,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `I_1`: the exterior of the closed curve, with `I_1(z) ~ z/c` at infinity.
    Outer,
    /// `I_2`: the inside of the curve minus `[-1, 0]`, for `Re z > 0`.
    Inner,
}

/// Follow one root of the cubic along `path(u)`, `u` from 0 to 1, starting
/// from `w0`. Steps are halved until the nearest root is unambiguous.
fn track(c: f64, path: impl Fn(f64) -> Complex64, w0: Complex64) -> Result<Complex64> {
    let mut w = w0;
    let mut u = 0.0f64;
    let mut h = 1.0f64 / 256.0;
    while u < 1.0 {
        let un = (u + h).min(1.0);
        let z = path(un);
        let zz = (z / c) * (z / c);
        let mut roots = cubic_roots(zz);
        roots.sort_by(|a, b| (*a - w).norm().total_cmp(&(*b - w).norm()));
        let (d0, d1) = ((roots[0] - w).norm(), (roots[1] - w).norm());
        if d0 < 0.5 * d1 || d1 == 0.0 {
            w = roots[0];
            u = un;
            h = (h * 1.5).min(1.0 / 64.0);
        } else {
            h *= 0.5;
            if h < 1e-12 {
                return Err(Error::Numerical(format!("root continuation stalled at {z}")));
            }
        }
    }
    Ok(w)
}

fn series_seed(z: Complex64, c: f64, rot: Complex64) -> Complex64 {
    let r = (z / c).powf(2.0 / 3.0);
    -rot * r * (1.0 + rot * r / 3.0 - (z / c).powi(2) / 81.0)
}

/// Inverse branch of `J_c`, returned as `s`. Residual `|J_c(s) - z|` is
/// checked against `1e-13 (1 + |z|)`.
#[allow(non_snake_case)]
pub fn invert_J(z: Complex64, c: f64, branch: Branch) -> Result<Complex64> {
    let b = endpoint_b(c);
    if !(c > 0.0) {
        return Err(Error::Domain(format!("c must be positive, got {c}")));
    }
    if z.im == 0.0 && z.re >= 0.0 && z.re <= b {
        return Err(Error::Domain(format!("z = {z} lies on the cut [0, {b}]; use the boundary values")));
    }
    let w = match branch {
        Branch::Outer => {
            if z.im == 0.0 && z.re > b {
                // Two positive roots; the outer one has s > 1/2.
                real_root(z, c, |s| s > 0.5)?
            } else {
                let r_far = 20.0 * (b + z.norm());
                let dir = z / z.norm();
                let far = dir * r_far;
                let mut seeds = preimages(far, c);
                seeds.sort_by(|a, b| ((*a - 1.0) - far / c).norm().total_cmp(&((*b - 1.0) - far / c).norm()));
                let w0 = *seeds.first().ok_or_else(|| Error::Numerical(format!("no preimage of {far}")))?;
                let ln_ratio = (z.norm() / r_far).ln();
                track(c, |u| dir * r_far * (u * ln_ratio).exp(), w0)?
            }
        }
        Branch::Inner => {
            if !(z.re > 0.0) {
                return Err(Error::Domain(format!("inner branch needs Re z > 0, got {z}")));
            }
            if z.im == 0.0 {
                // Real z > b: the inner preimage is real in (0, 1/2).
                real_root(z, c, |s| s > 0.0 && s < 0.5)?
            } else {
                let rot = if z.im > 0.0 { OMEGA } else { OMEGA * OMEGA };
                let dir = z / z.norm();
                let r0 = (1e-4 * c).min(0.5 * z.norm());
                let z0 = dir * r0;
                let mut seeds = preimages(z0, c);
                let guess = series_seed(z0, c, rot);
                seeds.sort_by(|a, b| (*a - guess).norm().total_cmp(&(*b - guess).norm()));
                let w0 = *seeds.first().ok_or_else(|| Error::Numerical(format!("no preimage of {z0}")))?;
                let ln_ratio = (z.norm() / r0).ln();
                track(c, |u| dir * r0 * (u * ln_ratio).exp(), w0)?
            }
        }
    };
    let s = w - 1.0;
    let res = (map_J(s, c)? - z).norm();
    if res > MAP_TOL * (1.0 + z.norm()) {
        return Err(Error::Numerical(format!("inverse map residual {res:e} at z = {z}")));
    }
    Ok(s)
}

fn real_root(z: Complex64, c: f64, pick: impl Fn(f64) -> bool) -> Result<Complex64> {
    preimages(z, c)
        .into_iter()
        .find(|w| w.im.abs() <= 1e-12 * w.norm() && pick(w.re - 1.0))
        .map(|w| c64(w.re, 0.0))
        .ok_or_else(|| Error::Numerical(format!("no real preimage for z = {z}")))
}

/// Parameters entering the density: map constant `c` and `(t, a)` tied by
/// `10c^4 - 2tc^2 - ac = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquilibriumInputs {
    pub c: f64,
    pub t: f64,
    pub a: f64,
}

impl EquilibriumInputs {
    /// `t` from the `c` identity.
    pub fn from_c_a(c: f64, a: f64) -> Result<Self> {
        if !(c > 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("need c > 0 and finite a, got ({c}, {a})")));
        }
        Ok(EquilibriumInputs { c, t: (10.0 * c.powi(4) - a * c - 1.0) / (2.0 * c * c), a })
    }

    pub fn from_t_a(t: f64, a: f64) -> Result<Self> {
        Ok(EquilibriumInputs { c: solve_c(t, a)?, t, a })
    }

    pub fn pearcey(c: f64, tau: f64, n: u32) -> Result<Self> {
        let (t, a) = pearcey_params(c, tau, n)?;
        Ok(EquilibriumInputs { c, t, a })
    }

    pub fn multicritical(sigma: f64, tau: f64, n: u32) -> Result<Self> {
        let (t, a, c) = multicrit_params(sigma, tau, n)?;
        Ok(EquilibriumInputs { c, t, a })
    }

    pub fn b(&self) -> f64 {
        endpoint_b(self.c)
    }

    /// `G(z)` from `w = I_1(z) + 1`:
    /// `-2a + (z/w^2)[K0 + K1 w - 2c^2 w^2/(1-w)]`, with
    /// `K0 = -2c^2 - a/c + 1/c^2` and `K1 = 2a/c - 2c^2`. Written this way the
    /// cancellation at `w -> 0` happens in the constants, not in the sum.
    fn g_of_w(&self, z: Complex64, w: Complex64) -> Complex64 {
        let (c, a) = (self.c, self.a);
        let k0 = -2.0 * c * c - a / c + 1.0 / (c * c);
        let k1 = 2.0 * a / c - 2.0 * c * c;
        let br = k0 + k1 * w - 2.0 * c * c * w * w / (1.0 - w);
        -2.0 * a + sdiv(sdiv(z, w), w) * br
    }

    /// `G(z)` off the cut.
    pub fn g_resolvent(&self, z: Complex64) -> Result<Complex64> {
        let s = invert_J(z, self.c, Branch::Outer)?;
        Ok(self.g_of_w(z, s + 1.0))
    }

    /// Boundary value `G_±(x)` on `(0, b)`. From above the preimage is the
    /// cubic root with positive imaginary part.
    pub fn g_boundary(&self, x: f64, plus: bool) -> Result<Complex64> {
        let b = self.b();
        if !(x > 0.0 && x < b) {
            return Err(Error::Domain(format!("x = {x} outside (0, {b})")));
        }
        // At b the pair merges on the real axis and psi vanishes.
        let roots = cubic_roots_scaled(c64((x / self.c).powf(2.0 / 3.0), 0.0));
        let sgn = if plus { 1.0 } else { -1.0 };
        let w = roots.into_iter().max_by(|a, b| (sgn * a.im).total_cmp(&(sgn * b.im))).expect("three roots");
        Ok(self.g_of_w(c64(x, 0.0), w))
    }

    /// `psi(x) = (G_-(x) - G_+(x)) / 2πi = -Im G_+(x) / π`.
    pub fn density_psi(&self, x: f64) -> Result<f64> {
        Ok(-self.g_boundary(x, true)?.im / PI)
    }

    /// `∫_0^b psi`.
    pub fn mass(&self) -> Result<(f64, f64)> {
        let b = self.b();
        let (v, err, _) = tanh_sinh(|x| self.density_psi(x).unwrap_or(f64::NAN), 0.0, b, 1e-12, 12)?;
        if !v.is_finite() {
            return Err(Error::Numerical("density evaluation failed inside (0, b)".into()));
        }
        Ok((v, err))
    }
}

/// Coefficients of `(x/c)^{-1/3}, (x/c)^{1/3}, (x/c)^{5/3}` in the expansion
/// of `psi` at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PsiSeries {
    pub coef_m13: f64,
    pub coef_p13: f64,
    pub coef_p53: f64,
}

impl PsiSeries {
    pub fn eval(&self, x: f64, c: f64) -> f64 {
        let r = (x / c).cbrt();
        self.coef_m13 / r + self.coef_p13 * r + self.coef_p53 * r.powi(5)
    }
}

pub fn psi_series0(c: f64, _t: f64, a: f64) -> PsiSeries {
    let k = 3f64.sqrt() / (2.0 * PI);
    let c3 = c.powi(3);
    PsiSeries {
        coef_m13: k * (-2.0 * c3 - a + 1.0 / c),
        coef_p13: -k / 3.0 * (10.0 * c3 - 4.0 * a - 2.0 / c),
        coef_p53: k / 81.0 * (200.0 * c3 - 8.0 * a - 10.0 / c),
    }
}

/// Coefficients of `(z/c)^{2/3}, (z/c)^{4/3}, (z/c)^2, (z/c)^{8/3}` in one
/// sector, constants dropped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectorCoefs {
    pub k23: Complex64,
    pub k43: Complex64,
    pub k2: Complex64,
    pub k83: Complex64,
}

impl SectorCoefs {
    fn add(&self, o: &SectorCoefs) -> SectorCoefs {
        SectorCoefs { k23: self.k23 + o.k23, k43: self.k43 + o.k43, k2: self.k2 + o.k2, k83: self.k83 + o.k83 }
    }

    fn neg(&self) -> SectorCoefs {
        SectorCoefs { k23: -self.k23, k43: -self.k43, k2: -self.k2, k83: -self.k83 }
    }

    pub fn conj(&self) -> SectorCoefs {
        SectorCoefs { k23: self.k23.conj(), k43: self.k43.conj(), k2: self.k2.conj(), k83: self.k83.conj() }
    }
}

/// Small-z coefficient tables of `g`, `g̃` (without `V + 2az`) and
/// `phi = g + g̃ - V - ℓ`, per half plane (`upper`, `lower`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GSeries {
    pub g_upper: SectorCoefs,
    pub g_lower: SectorCoefs,
    pub gt_upper: SectorCoefs,
    pub gt_lower: SectorCoefs,
    pub phi_upper: SectorCoefs,
    pub phi_lower: SectorCoefs,
}

fn sector(c: f64, a: f64, rot: Complex64) -> SectorCoefs {
    let c4 = c.powi(4);
    let kk = -2.0 * c4 - a * c + 1.0;
    let ll = 10.0 * c4 - 4.0 * a * c - 2.0;
    let nn = -10.0 * c4 + a * c + 1.0;
    let mm = 200.0 * c4 - 8.0 * a * c - 10.0;
    let rot2 = rot * rot;
    SectorCoefs { k23: 1.5 * kk * rot2, k43: 0.25 * ll * rot, k2: c64(nn / 6.0, 0.0), k83: mm / 216.0 * rot2 }
}

pub fn g_series0(c: f64, _t: f64, a: f64) -> GSeries {
    let g_upper = sector(c, a, OMEGA);
    let g_lower = sector(c, a, OMEGA.conj());
    // g̃ carries the opposite rotation in each quadrant, with a minus sign.
    let gt_upper = sector(c, a, OMEGA.conj()).neg();
    let gt_lower = sector(c, a, OMEGA).neg();
    GSeries {
        g_upper,
        g_lower,
        gt_upper,
        gt_lower,
        phi_upper: g_upper.add(&gt_upper),
        phi_lower: g_lower.add(&gt_lower),
    }
}

/// Least-squares slope of `ln psi` against `ln x` on 41 log-spaced points.
pub fn exponent_fit(inp: &EquilibriumInputs, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi < inp.b()) {
        return Err(Error::Domain(format!("window ({lo}, {hi}) must sit inside (0, {})", inp.b())));
    }
    let m = 41;
    let mut pts = Vec::with_capacity(m);
    let mut sign = 0.0;
    for i in 0..m {
        let x = lo * (hi / lo).powf(i as f64 / (m - 1) as f64);
        let v = inp.density_psi(x)?;
        if v == 0.0 || (sign != 0.0 && v.signum() != sign) {
            return Err(Error::Domain(format!("psi changes sign inside the window near x = {x:e}")));
        }
        sign = v.signum();
        pts.push((x.ln(), v.abs().ln()));
    }
    let n = m as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2)));
    Ok(num / den)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRow {
    pub x: f64,
    pub psi: f64,
    pub series_truncation: f64,
    pub abs_diff: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumProfile {
    pub c: f64,
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub psi_samples: Vec<(f64, f64)>,
    pub mass: f64,
    pub series0: PsiSeries,
}

impl EquilibriumProfile {
    /// `samples` interior points, uniform in `(0, b)`.
    pub fn new(inp: &EquilibriumInputs, samples: usize) -> Result<Self> {
        let b = inp.b();
        let psi_samples = (1..=samples)
            .map(|i| {
                let x = b * i as f64 / (samples + 1) as f64;
                Ok((x, inp.density_psi(x)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EquilibriumProfile {
            c: inp.c,
            t: inp.t,
            a: inp.a,
            b,
            psi_samples,
            mass: inp.mass()?.0,
            series0: psi_series0(inp.c, inp.t, inp.a),
        })
    }

    pub fn rows(&self) -> Vec<ProfileRow> {
        self.psi_samples
            .iter()
            .map(|&(x, psi)| {
                let s = self.series0.eval(x, self.c);
                ProfileRow { x, psi, series_truncation: s, abs_diff: (psi - s).abs() }
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileSummary {
    pub c: f64,
    pub b: f64,
    pub mass: f64,
    pub exponent_fit: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dashed_curve;
    use proptest::prelude::*;

    fn dashed(c: f64) -> EquilibriumInputs {
        let (t, a) = dashed_curve(c).unwrap();
        EquilibriumInputs { c, t, a }
    }

    #[test]
    fn map_special_values() {
        let c = 0.7;
        let j = map_J(c64(0.5, 0.0), c).unwrap();
        assert!((j.re - endpoint_b(c)).abs() < 1e-15 && j.im == 0.0);
        assert!((endpoint_b(c) - c * 3f64.powf(1.5) / 2.0).abs() < 1e-15);
        let s = c64(1e3, 0.0);
        assert!((map_J(s, c).unwrap() / (c * s) - 1.0).norm() < 2e-3);
        assert!(map_J(c64(-0.5, 0.0), c).is_err());
        // J_c(-1) = 0 as a limit from off the cut.
        assert!(map_J(c64(-1.0, 1e-12), c).unwrap().norm() < 1e-15);
    }

    #[test]
    fn outer_round_trip() {
        let c = 0.5;
        let s = c64(2.0, 1.0);
        let z = map_J(s, c).unwrap();
        assert!((invert_J(z, c, Branch::Outer).unwrap() - s).norm() < 1e-12);
        for z in [c64(3.0, 0.0), c64(-0.4, 0.2), c64(0.2, -0.01), c64(-2.0, 0.0)] {
            let s = invert_J(z, c, Branch::Outer).unwrap();
            assert!((map_J(s, c).unwrap() - z).norm() <= 1e-13 * (1.0 + z.norm()));
        }
        assert!(invert_J(c64(0.3, 0.0), c, Branch::Outer).is_err());
    }

    #[test]
    fn outer_small_z_matches_series() {
        let c = 0.5;
        let z = Complex64::from_polar(1e-3, PI / 3.0);
        let s = invert_J(z, c, Branch::Outer).unwrap();
        let lead = -OMEGA * OMEGA * (z / c).powf(2.0 / 3.0);
        assert!(((s + 1.0) / lead - 1.0).norm() < 0.02);
        let z = Complex64::from_polar(1e-6, PI / 3.0);
        let s = invert_J(z, c, Branch::Outer).unwrap();
        let lead = -OMEGA * OMEGA * (z / c).powf(2.0 / 3.0);
        assert!(((s + 1.0) / lead - 1.0).norm() < 1e-3);
    }

    #[test]
    fn inner_branch_stays_inside_curve() {
        let inp = dashed(0.5);
        let b = inp.b();
        let gamma_max = (1..400)
            .map(|i| {
                let x = b * i as f64 / 400.0;
                let zz = c64((x / inp.c).powi(2), 0.0);
                cubic_roots(zz).into_iter().filter(|w| w.im > 0.0).map(|w| (w - 1.0).norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        for z in [c64(0.3, 0.2), c64(0.9, -0.5), c64(2.0, 1.0), c64(0.05, 0.01), c64(1.5, 0.0)] {
            let s2 = invert_J(z, inp.c, Branch::Inner).unwrap();
            assert!(s2.norm() <= gamma_max + 1e-12, "{z}: {s2}");
            let s1 = invert_J(z, inp.c, Branch::Outer).unwrap();
            assert!((s1 - s2).norm() > 1e-6, "branches coincide at {z}");
        }
        assert!(invert_J(c64(-0.3, 0.2), inp.c, Branch::Inner).is_err());
    }

    #[test]
    fn boundary_value_is_limit_of_resolvent() {
        let inp = dashed(0.5);
        for x in [0.1, 0.4, 0.6] {
            let gp = inp.g_boundary(x, true).unwrap();
            let gm = inp.g_boundary(x, false).unwrap();
            assert!((gm - gp.conj()).norm() < 1e-12);
            // Richardson on z = x ± iε.
            let at = |e: f64| inp.g_resolvent(c64(x, e)).unwrap();
            let r = 2.0 * at(1e-7) - at(2e-7);
            assert!((r - gp).norm() < 1e-6, "x={x}: {r} vs {gp}");
            let r = 2.0 * inp.g_resolvent(c64(x, -1e-7)).unwrap() - inp.g_resolvent(c64(x, -2e-7)).unwrap();
            assert!((r - gm).norm() < 1e-6);
        }
    }

    #[test]
    fn dashed_curve_mass_and_positivity() {
        let inp = dashed(0.5);
        let (m, _) = inp.mass().unwrap();
        assert!((m - 1.0).abs() < 1e-6, "mass {m}");
        let b = inp.b();
        for i in 1..200 {
            let x = 1e-3 * b + (1.0 - 2e-3) * b * i as f64 / 200.0;
            assert!(inp.density_psi(x).unwrap() > 0.0, "psi({x})");
        }
        assert!(inp.density_psi(b).is_err() && inp.density_psi(0.0).is_err());
    }

    #[test]
    fn mass_along_pearcey_regime() {
        // The c identity holds along the whole regime, so the total mass stays 1
        // even where psi is not a probability density.
        for tau in [-0.5, -0.1, 0.0, 0.4] {
            let m = EquilibriumInputs::pearcey(0.5, tau, 16).unwrap().mass().unwrap().0;
            assert!((m - 1.0).abs() < 1e-10, "tau={tau}: {m}");
        }
    }

    #[test]
    fn series_coefficients() {
        let inp = dashed(0.5);
        let s = psi_series0(inp.c, inp.t, inp.a);
        assert!(s.coef_m13.abs() < 1e-15);
        let lead = 3f64.sqrt() / PI * (1.0 - 3.0 * 0.5f64.powi(4)) / 0.5;
        assert!((s.coef_p13 - lead).abs() < 1e-14);
        let c = 3f64.powf(-0.25);
        let s = psi_series0(c, 3f64.sqrt(), 3f64.powf(-0.75));
        assert!(s.coef_m13.abs() < 1e-15 && s.coef_p13.abs() < 1e-15 && s.coef_p53.abs() > 0.1);
    }

    #[test]
    fn series_agrees_with_evaluation() {
        let inp = dashed(0.5);
        let x = 1e-4;
        let (v, s) = (inp.density_psi(x).unwrap(), psi_series0(inp.c, inp.t, inp.a).eval(x, inp.c));
        assert!((v / s - 1.0).abs() < 1e-2, "{v} vs {s}");
        let off = EquilibriumInputs::from_c_a(0.5, 1.75 - 0.02).unwrap();
        let s = psi_series0(off.c, off.t, off.a);
        assert!(s.coef_m13.abs() > 1e-3);
        let x = 1e-8;
        let lead = off.density_psi(x).unwrap() * (x / off.c).cbrt();
        assert!((lead / s.coef_m13 - 1.0).abs() < 0.05, "{lead} vs {}", s.coef_m13);
    }

    #[test]
    fn exponents() {
        let e = exponent_fit(&dashed(0.5), (1e-6, 1e-3)).unwrap();
        assert!((e - 1.0 / 3.0).abs() < 0.02, "{e}");
        let mc = EquilibriumInputs::from_c_a(3f64.powf(-0.25), 3f64.powf(-0.75)).unwrap();
        assert!((mc.t - 3f64.sqrt()).abs() < 1e-14);
        let e = exponent_fit(&mc, (1e-6, 1e-3)).unwrap();
        assert!((e - 5.0 / 3.0).abs() < 0.05, "{e}");
        let off = EquilibriumInputs::from_c_a(0.5, 1.25).unwrap();
        let e = exponent_fit(&off, (1e-9, 1e-6)).unwrap();
        assert!((e + 1.0 / 3.0).abs() < 0.02, "{e}");
    }

    #[test]
    fn exponent_fit_rejects_sign_change() {
        // Above the curve the leading coefficient is negative while the
        // x^{1/3} term is positive, so psi crosses zero near the origin.
        let off = EquilibriumInputs::from_c_a(0.5, 1.75 + 1e-3).unwrap();
        assert!(exponent_fit(&off, (1e-9, 1e-2)).is_err());
    }

    #[test]
    fn phi_coefficients_match_closed_forms() {
        let (c, a) = (0.55, 1.4);
        let g = g_series0(c, 0.0, a);
        let kk = -2.0 * c.powi(4) - a * c + 1.0;
        let ll = 10.0 * c.powi(4) - 4.0 * a * c - 2.0;
        let mm = 200.0 * c.powi(4) - 8.0 * a * c - 10.0;
        let r3 = 3f64.sqrt();
        assert!((g.phi_upper.k23 - c64(0.0, -1.5 * r3 * kk)).norm() < 1e-14);
        assert!((g.phi_upper.k43 - c64(0.0, r3 * ll / 4.0)).norm() < 1e-14);
        assert!(g.phi_upper.k2.norm() < 1e-15);
        assert!((g.phi_upper.k83 - c64(0.0, -r3 * mm / 216.0)).norm() < 1e-14);
        assert_eq!(g.g_lower, g.g_upper.conj());
        assert!((g.phi_lower.k23 - g.phi_upper.k23.conj()).norm() < 1e-15);
        let (t, a) = dashed_curve(0.5).unwrap();
        assert!(g_series0(0.5, t, a).phi_upper.k23.norm() < 1e-14);
        let mc = g_series0(3f64.powf(-0.25), 3f64.sqrt(), 3f64.powf(-0.75));
        assert!(mc.phi_upper.k23.norm() < 1e-14 && mc.phi_upper.k43.norm() < 1e-14);
    }

    #[test]
    fn profile_rows() {
        let p = EquilibriumProfile::new(&dashed(0.5), 20).unwrap();
        assert_eq!(p.psi_samples.len(), 20);
        assert!((p.mass - 1.0).abs() < 1e-6);
        assert!(p.rows()[0].abs_diff < 0.05 * p.rows()[0].psi);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn outer_inverse_round_trips(re in -3.0f64..3.0, im in 0.01f64..3.0, c in 0.3f64..0.75, lower in any::<bool>()) {
            let z = c64(re, if lower { -im } else { im });
            let s = invert_J(z, c, Branch::Outer).unwrap();
            prop_assert!((map_J(s, c).unwrap() - z).norm() <= 1e-13 * (1.0 + z.norm()));
        }
    }
}
