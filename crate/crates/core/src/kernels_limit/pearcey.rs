//! Pearcey integrals `p`, `q`, the Pearcey kernel and its folded forms.

use crate::error::{Error, Result};
use crate::numerics::contour::{integrate_ray, ContourRay, Orientation};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

/// Absolute quadrature target for the ray integrals.
const RAY_TOL: f64 = 1e-15;

/// Below this separation kernels switch to the derivative of the numerator.
pub const DIAGONAL_GAP: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    P,
    Q,
}

/// Value and quadrature error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Valued {
    pub value: f64,
    pub err: f64,
}

/// `p`, `q` and their first three derivatives at a fixed `tau`, memoized.
#[derive(Debug)]
pub struct PearceyEvaluator {
    pub tau: f64,
    cache: RwLock<HashMap<(u64, u8, Which), Valued>>,
}

impl PearceyEvaluator {
    pub fn new(tau: f64) -> Result<Self> {
        if !tau.is_finite() {
            return Err(Error::Domain(format!("tau must be finite, got {tau}")));
        }
        Ok(PearceyEvaluator { tau, cache: RwLock::new(HashMap::new()) })
    }

    /// Shared evaluator for `tau`; repeated queries hit the same cache.
    pub fn shared(tau: f64) -> Result<Arc<Self>> {
        static POOL: OnceLock<Mutex<HashMap<u64, Arc<PearceyEvaluator>>>> = OnceLock::new();
        let pool = POOL.get_or_init(|| Mutex::new(HashMap::new()));
        // -0.0 and 0.0 give the same integrals.
        let key = (tau + 0.0).to_bits();
        let mut g = pool.lock().expect("evaluator pool poisoned");
        if let Some(e) = g.get(&key) {
            return Ok(e.clone());
        }
        let e = Arc::new(PearceyEvaluator::new(tau)?);
        g.insert(key, e.clone());
        Ok(e)
    }

    /// `d`-th derivative of `p` or `q` at `x`, `d <= 3`. The third derivative
    /// is only there for the ODE checks.
    pub fn eval(&self, which: Which, x: f64, d: u8) -> Result<Valued> {
        if d > 3 {
            return Err(Error::Domain(format!("derivative order {d} > 3")));
        }
        if !x.is_finite() {
            return Err(Error::Domain(format!("x must be finite, got {x}")));
        }
        let key = ((x + 0.0).to_bits(), d, which);
        if let Some(v) = self.cache.read().expect("cache poisoned").get(&key) {
            return Ok(*v);
        }
        let v = match which {
            Which::P => self.integrate_p(x, d)?,
            Which::Q => self.integrate_q(x, d)?,
        };
        self.cache.write().expect("cache poisoned").insert(key, v);
        Ok(v)
    }

    pub fn p(&self, x: f64, d: u8) -> Result<f64> {
        Ok(self.eval(Which::P, x, d)?.value)
    }

    pub fn q(&self, x: f64, d: u8) -> Result<f64> {
        Ok(self.eval(Which::Q, x, d)?.value)
    }

    fn sum_rays(&self, rays: &[(f64, Orientation)], sign: f64, x: f64, d: u8) -> Result<Valued> {
        let tau = self.tau;
        let f = |s: Complex64| {
            let e = (sign * (s.powi(4) / 4.0 + tau * s * s / 2.0) + Complex64::i() * s * x).exp();
            (Complex64::i() * s).powi(d as i32) * e
        };
        let mut total = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for &(angle, orient) in rays {
            let ray = ContourRay::fitted(angle, orient, f, RAY_TOL)?;
            let (v, e) = integrate_ray(f, &ray, RAY_TOL)?;
            total += v;
            err += e;
        }
        let total = total / (2.0 * PI);
        let err = err / (2.0 * PI);
        if total.im.abs() > 10.0 * err.max(f64::EPSILON * total.re.abs()) {
            return Err(Error::Numerical(format!(
                "Pearcey integral at x = {x}, tau = {tau}, d = {d} has imaginary part {:e} against error {err:e}",
                total.im
            )));
        }
        Ok(Valued { value: total.re, err })
    }

    fn integrate_p(&self, x: f64, d: u8) -> Result<Valued> {
        self.sum_rays(&[(0.0, Orientation::AwayFromOrigin), (PI, Orientation::TowardOrigin)], -1.0, x, d)
    }

    fn integrate_q(&self, x: f64, d: u8) -> Result<Valued> {
        // q is odd and q'' is odd, so those vanish at the origin.
        if x == 0.0 && d % 2 == 0 {
            return Ok(Valued { value: 0.0, err: 0.0 });
        }
        let rays = [
            (PI / 4.0, Orientation::TowardOrigin),
            (3.0 * PI / 4.0, Orientation::AwayFromOrigin),
            (-3.0 * PI / 4.0, Orientation::TowardOrigin),
            (-PI / 4.0, Orientation::AwayFromOrigin),
        ];
        self.sum_rays(&rays, 1.0, x, d)
    }
}

fn check_order(d: u8) -> Result<()> {
    if d > 2 {
        return Err(Error::Domain(format!("derivative order must be 0, 1 or 2, got {d}")));
    }
    Ok(())
}

pub fn pearcey_p(x: f64, tau: f64, d: u8) -> Result<f64> {
    check_order(d)?;
    PearceyEvaluator::shared(tau)?.p(x, d)
}

pub fn pearcey_q(x: f64, tau: f64, d: u8) -> Result<f64> {
    check_order(d)?;
    PearceyEvaluator::shared(tau)?.q(x, d)
}

/// `p^{(i)}(a) q^{(j)}(b)` with first-order error propagation.
fn prod(ev: &PearceyEvaluator, i: u8, a: f64, j: u8, b: f64) -> Result<Valued> {
    let p = ev.eval(Which::P, a, i)?;
    let q = ev.eval(Which::Q, b, j)?;
    Ok(Valued { value: p.value * q.value, err: p.value.abs() * q.err + q.value.abs() * p.err })
}

/// `(p q'' + p'' q - tau p q, p' q')` with `p` at `a` and `q` at `b`.
fn parts(ev: &PearceyEvaluator, a: f64, b: f64) -> Result<(Valued, Valued)> {
    let t1 = prod(ev, 0, a, 2, b)?;
    let t2 = prod(ev, 2, a, 0, b)?;
    let t3 = prod(ev, 0, a, 0, b)?;
    let bb = prod(ev, 1, a, 1, b)?;
    let aa = Valued {
        value: t1.value + t2.value - ev.tau * t3.value,
        err: t1.err + t2.err + ev.tau.abs() * t3.err,
    };
    Ok((aa, bb))
}

/// Kernel value with an error estimate and a flag set when the diagonal
/// (L'Hôpital) form was used.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub err_estimate: f64,
    pub diagonal: bool,
}

/// `d/dξ` of the Pearcey numerator at `ξ = η`.
fn numerator_dxi(ev: &PearceyEvaluator, eta: f64) -> Result<Valued> {
    let terms = [prod(ev, 1, eta, 2, eta)?, prod(ev, 2, eta, 1, eta)?, prod(ev, 3, eta, 0, eta)?, prod(ev, 1, eta, 0, eta)?];
    let coef = [1.0, -1.0, 1.0, -ev.tau];
    let value = terms.iter().zip(coef).map(|(t, c)| c * t.value).sum();
    let err = terms.iter().zip(coef).map(|(t, c)| c.abs() * t.err).sum();
    Ok(Valued { value, err })
}

pub fn pearcey_kernel_ev(ev: &PearceyEvaluator, xi: f64, eta: f64) -> Result<KernelValue> {
    if (xi - eta).abs() < DIAGONAL_GAP {
        let d = numerator_dxi(ev, 0.5 * (xi + eta))?;
        return Ok(KernelValue { value: d.value, err_estimate: d.err, diagonal: true });
    }
    let (a, b) = parts(ev, xi, eta)?;
    let gap = xi - eta;
    Ok(KernelValue { value: (a.value - b.value) / gap, err_estimate: (a.err + b.err) / gap.abs(), diagonal: false })
}

/// Classical Pearcey kernel
/// `[p(ξ)q''(η) - p'(ξ)q'(η) + p''(ξ)q(η) - tau p(ξ)q(η)] / (ξ - η)`.
pub fn pearcey_kernel(xi: f64, eta: f64, tau: f64) -> Result<f64> {
    Ok(pearcey_kernel_ev(&*PearceyEvaluator::shared(tau)?, xi, eta)?.value)
}

fn check_folded(xi2: f64, eta2: f64) -> Result<()> {
    if !(xi2 > 0.0 && eta2 > 0.0) || !xi2.is_finite() || !eta2.is_finite() {
        return Err(Error::Domain(format!("folded kernels need positive arguments, got ({xi2}, {eta2})")));
    }
    Ok(())
}

/// Shared body of the folded kernels,
/// `[A - r B] / (η' - ξ')` with `A, B` at `(√η', √ξ')` and parameter `2 tau`.
/// `plus` selects `r = sqrt(η'/ξ')`, otherwise `r = sqrt(ξ'/η')`.
fn folded(xi2: f64, eta2: f64, tau: f64, plus: bool) -> Result<KernelValue> {
    check_folded(xi2, eta2)?;
    let ev = PearceyEvaluator::shared(2.0 * tau)?;
    let (a, b) = (eta2.sqrt(), xi2.sqrt());
    if (a - b).abs() < DIAGONAL_GAP {
        // Near the diagonal use the unfolded forms, whose own diagonal
        // branch handles the removable singularity.
        let k1 = pearcey_kernel_ev(&ev, a, b)?;
        let (k2, w) = if plus { (pearcey_kernel_ev(&ev, -a, b)?, b) } else { (pearcey_kernel_ev(&ev, a, -b)?, a) };
        let sgn = if plus { 1.0 } else { -1.0 };
        return Ok(KernelValue {
            value: (k1.value + sgn * k2.value) / (2.0 * w),
            err_estimate: (k1.err_estimate + k2.err_estimate) / (2.0 * w),
            diagonal: true,
        });
    }
    let (aa, bb) = parts(&ev, a, b)?;
    let r = if plus { a / b } else { b / a };
    let gap = eta2 - xi2;
    Ok(KernelValue {
        value: (aa.value - r * bb.value) / gap,
        err_estimate: (aa.err + r * bb.err) / gap.abs(),
        diagonal: false,
    })
}

/// Folded kernel for `(gamma, alpha) = (1, 0)`.
pub fn folded_plus(xi2: f64, eta2: f64, tau: f64) -> Result<f64> {
    Ok(folded(xi2, eta2, tau, true)?.value)
}

/// Folded kernel for `(gamma, alpha) = (-1, 1)`. Built from the explicit
/// rational formula; it equals `(1/2√η')(K(√η',√ξ') - K(√η',-√ξ'))`.
pub fn folded_minus(xi2: f64, eta2: f64, tau: f64) -> Result<f64> {
    Ok(folded(xi2, eta2, tau, false)?.value)
}

pub fn folded_plus_value(xi2: f64, eta2: f64, tau: f64) -> Result<KernelValue> {
    folded(xi2, eta2, tau, true)
}

pub fn folded_minus_value(xi2: f64, eta2: f64, tau: f64) -> Result<KernelValue> {
    folded(xi2, eta2, tau, false)
}

/// One CSV row of a kernel grid.
#[derive(Clone, Debug, Serialize)]
pub struct KernelGridRow {
    pub xi: f64,
    pub eta: f64,
    pub tau: f64,
    pub value: f64,
    pub err_estimate: f64,
}

/// Pearcey kernel on the tensor grid `xs × ys`.
pub fn pearcey_grid(xs: &[f64], ys: &[f64], tau: f64) -> Result<Vec<KernelGridRow>> {
    use rayon::prelude::*;
    let ev = PearceyEvaluator::shared(tau)?;
    let pts: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
    pts.par_iter()
        .map(|&(xi, eta)| {
            let k = pearcey_kernel_ev(&ev, xi, eta)?;
            Ok(KernelGridRow { xi, eta, tau, value: k.value, err_estimate: k.err_estimate })
        })
        .collect()
}
