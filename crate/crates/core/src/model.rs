//! Parameters of the quartic external-source model and the critical curves
//! of the (t, a) plane.
//!
//! Potential convention: `V(x) = x^4/2 - t x^2 - 2 a x` and
//! `W(x) = |x|^alpha e^{-n V(x)}`. The equivalent form
//! `e^{-2n (x^4/4 - t x^2/2 - a x)}` is available through [`v_intro`].

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: u32,
    pub alpha: f64,
    pub t: f64,
    pub a: f64,
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(n: u32, alpha: f64, t: f64, a: f64, gamma: f64) -> Result<Self> {
        let p = ModelParams { n, alpha, t, a, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("n must be positive".into()));
        }
        if !(self.alpha > -1.0) || !self.alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must exceed -1, got {}", self.alpha)));
        }
        if !(-1.0..=1.0).contains(&self.gamma) {
            return Err(Error::Domain(format!("gamma must lie in [-1, 1], got {}", self.gamma)));
        }
        if !self.t.is_finite() || !self.a.is_finite() {
            return Err(Error::Domain("t and a must be finite".into()));
        }
        Ok(())
    }

    /// Extra hypothesis of the biorthogonal construction. `a > 0` is the
    /// standing assumption; `a < 0` is admitted when `|gamma| = 1`, where it
    /// is the mirror image `x -> -x` of the `a > 0` system.
    pub fn validate_biorth(&self) -> Result<()> {
        self.validate()?;
        if self.a > 0.0 || (self.a < 0.0 && self.gamma.abs() == 1.0) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "biorthogonal construction needs a > 0 (or a < 0 with |gamma| = 1); got a = {}, gamma = {}",
                self.a, self.gamma
            )))
        }
    }

    /// `2 n a`, the exponential rate of the external source.
    pub fn frak_a(&self) -> f64 {
        2.0 * self.n as f64 * self.a
    }

    /// Parameters of the companion system with weight `|x| W(x)` and `gamma = -1`.
    pub fn odd(&self) -> ModelParams {
        ModelParams { alpha: self.alpha + 1.0, gamma: -1.0, ..*self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Pearcey,
    MultiCritical,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalPoint {
    pub c: f64,
    pub tau: f64,
    pub sigma: f64,
    pub regime: Regime,
}

impl CriticalPoint {
    pub fn pearcey(c: f64, tau: f64) -> Result<Self> {
        check_c(c)?;
        Ok(CriticalPoint { c, tau, sigma: 0.0, regime: Regime::Pearcey })
    }

    /// The n-dependent multi-critical point.
    pub fn multicritical(sigma: f64, tau: f64, n: u32) -> Result<Self> {
        let (_, _, c) = multicrit_params(sigma, tau, n)?;
        Ok(CriticalPoint { c, tau, sigma, regime: Regime::MultiCritical })
    }

    pub fn t_a(&self, n: u32) -> Result<(f64, f64)> {
        match self.regime {
            Regime::Pearcey => pearcey_params(self.c, self.tau, n),
            Regime::MultiCritical => multicrit_params(self.sigma, self.tau, n).map(|(t, a, _)| (t, a)),
        }
    }
}

/// `x^4/2 - t x^2 - 2 a x`.
pub fn v_quartic(x: f64, t: f64, a: f64) -> f64 {
    let x2 = x * x;
    0.5 * x2 * x2 - t * x2 - 2.0 * a * x
}

/// `x^4/4 - t x^2/2 - a x`, so that `n v_quartic = 2 n v_intro`.
pub fn v_intro(x: f64, t: f64, a: f64) -> f64 {
    let x2 = x * x;
    0.25 * x2 * x2 - 0.5 * t * x2 - a * x
}

/// `ln W(x)`; `-inf` at `x = 0` when `alpha > 0`.
pub fn log_weight_w(x: f64, p: &ModelParams) -> f64 {
    let e = -(p.n as f64) * v_quartic(x, p.t, p.a);
    if p.alpha == 0.0 {
        e
    } else {
        p.alpha * x.abs().ln() + e
    }
}

#[allow(non_snake_case)]
pub fn weight_W(x: f64, p: &ModelParams) -> f64 {
    weight_w_flagged(x, p).0
}

/// `W(x)` and an underflow flag, set when a nonzero true value rounds to 0.
pub fn weight_w_flagged(x: f64, p: &ModelParams) -> (f64, bool) {
    let l = log_weight_w(x, p);
    let v = l.exp();
    (v, v == 0.0 && l.is_finite())
}

#[allow(non_snake_case)]
pub fn weight_Wodd(x: f64, p: &ModelParams) -> f64 {
    x.abs() * weight_W(x, p)
}

fn check_c(c: f64) -> Result<()> {
    let cmax = 3f64.powf(-0.25);
    if c > 0.0 && c <= cmax * (1.0 + 1e-15) {
        Ok(())
    } else {
        Err(Error::Domain(format!("c must lie in (0, 3^(-1/4)], got {c}")))
    }
}

/// `(t, a) = (6c^2 - 1/c^2, -2c^3 + 1/c)`.
///
/// The endpoint `c = 3^{-1/4}` is admitted: it is the multi-critical point.
pub fn dashed_curve(c: f64) -> Result<(f64, f64)> {
    check_c(c)?;
    Ok((6.0 * c * c - 1.0 / (c * c), -2.0 * c * c * c + 1.0 / c))
}

/// Pearcey double-scaling parameters at `(c, tau, n)`.
pub fn pearcey_params(c: f64, tau: f64, n: u32) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let (t0, a0) = dashed_curve(c)?;
    let d = ((1.0 - 3.0 * c.powi(4)) / (2.0 * n as f64)).sqrt() * tau;
    Ok((t0 - 2.0 / (3.0 * c * c) * d, a0 + 4.0 / (3.0 * c) * d))
}

/// Multi-critical double-scaling parameters, returning `(t, a, c)` with
/// `c = 3^{-1/4} (1 - sigma/sqrt n)^{1/4}`.
pub fn multicrit_params(sigma: f64, tau: f64, n: u32) -> Result<(f64, f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let nf = n as f64;
    let base = 1.0 - sigma / nf.sqrt();
    if !(base > 0.0) {
        return Err(Error::Domain(format!("1 - sigma/sqrt(n) = {base} must be positive")));
    }
    let c = 3f64.powf(-0.25) * base.powf(0.25);
    let s = nf.powf(-0.75) * tau;
    let t = 6.0 * c * c - 1.0 / (c * c) - s / (3.0 * c * c);
    let a = -2.0 * c.powi(3) + 1.0 / c + 2.0 * s / (3.0 * c);
    Ok((t, a, c))
}

/// `10c^4 - 2tc^2 - ac - 1`.
pub fn c_identity_residual(c: f64, t: f64, a: f64) -> f64 {
    10.0 * c.powi(4) - 2.0 * t * c * c - a * c - 1.0
}

/// Root of `10c^4 - 2tc^2 - ac = 1` on (0, 1]: the first sign change on a
/// 1e-3 grid, refined by bracketed Newton.
pub fn solve_c(t: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("solve_c needs a > 0, got {a}")));
    }
    let f = |c: f64| c_identity_residual(c, t, a);
    let df = |c: f64| 40.0 * c.powi(3) - 4.0 * t * c - a;
    let mut lo = 0.0;
    let mut flo = f(lo);
    let mut bracket = None;
    for k in 1..=1000 {
        let hi = k as f64 * 1e-3;
        let fhi = f(hi);
        if fhi == 0.0 {
            return Ok(hi);
        }
        if flo.signum() != fhi.signum() {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        flo = fhi;
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| Error::Domain(format!("no root of the c-identity in (0, 1] for t = {t}, a = {a}")))?;
    let up = f(hi) > 0.0;
    let mut c = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fc = f(c);
        if fc.abs() <= 1e-15 {
            break;
        }
        if (fc > 0.0) == up {
            hi = c;
        } else {
            lo = c;
        }
        let step = c - fc / df(c);
        c = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-16 {
            break;
        }
    }
    if f(c).abs() > 1e-14 {
        return Err(Error::Numerical(format!("solve_c residual {:e} at c = {c}", f(c))));
    }
    Ok(c)
}

/// Parameter documents accepted on input. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ParamDoc {
    Explicit(ExplicitDoc),
    Pearcey(PearceyDoc),
    MultiCritical(MultiCriticalDoc),
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitDoc {
    pub n: u32,
    pub alpha: f64,
    pub t: f64,
    pub a: f64,
    pub gamma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PearceyTag {
    Pearcey,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiCriticalTag {
    Multicritical,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PearceyDoc {
    pub curve: PearceyTag,
    pub c: f64,
    pub tau: f64,
    pub n: u32,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MultiCriticalDoc {
    pub curve: MultiCriticalTag,
    pub sigma: f64,
    pub tau: f64,
    pub n: u32,
}

impl ParamDoc {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("parameter document: {e}")))
    }

    /// Model parameters. The critical-curve documents carry no alpha or
    /// gamma; they resolve to `alpha = 0, gamma = 1`, the case whose limit
    /// is available in closed form.
    pub fn resolve(&self) -> Result<ModelParams> {
        match self {
            ParamDoc::Explicit(d) => ModelParams::new(d.n, d.alpha, d.t, d.a, d.gamma),
            ParamDoc::Pearcey(d) => {
                let (t, a) = pearcey_params(d.c, d.tau, d.n)?;
                ModelParams::new(d.n, 0.0, t, a, 1.0)
            }
            ParamDoc::MultiCritical(d) => {
                let (t, a, _) = multicrit_params(d.sigma, d.tau, d.n)?;
                ModelParams::new(d.n, 0.0, t, a, 1.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn weight_examples() {
        let p = ModelParams::new(1, 0.0, 0.0, 0.0, 1.0).unwrap();
        assert!((weight_W(1.0, &p) - (-0.5f64).exp()).abs() < 1e-16);
        assert_eq!(weight_W(0.0, &p), 1.0);
        let q = ModelParams { alpha: 0.5, ..p };
        assert_eq!(weight_W(0.0, &q), 0.0);
        // Second path: split |x|^alpha from the exponential.
        let r = ModelParams::new(1, 1.0, 0.0, 1.0, 1.0).unwrap();
        let direct = weight_W(-1.0, &r);
        let split = 1f64.powf(1.0) * (-(0.5 + 2.0f64)).exp();
        assert!((direct - split).abs() < 1e-16);
        assert!((direct - (-2.5f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn wodd_examples() {
        let p = ModelParams::new(3, 0.2, 1.0, 0.5, 1.0).unwrap();
        assert_eq!(weight_Wodd(0.0, &p), 0.0);
        assert_eq!(weight_Wodd(2.0, &p), 2.0 * weight_W(2.0, &p));
    }

    #[test]
    fn underflow_flagged() {
        let p = ModelParams::new(50, 0.0, 0.0, 0.0, 1.0).unwrap();
        let (v, flag) = weight_w_flagged(10.0, &p);
        assert_eq!(v, 0.0);
        assert!(flag);
    }

    #[test]
    fn dashed_examples() {
        let c = 3f64.powf(-0.25);
        let (t, a) = dashed_curve(c).unwrap();
        assert!((t - 3f64.sqrt()).abs() < 1e-14);
        assert!((a - 3f64.powf(-0.75)).abs() < 1e-15);
        assert_eq!(dashed_curve(0.5).unwrap(), (-2.5, 1.75));
        assert_eq!(c_identity_residual(0.5, -2.5, 1.75), 0.0);
        assert!(dashed_curve(0.0).is_err());
        assert!(dashed_curve(0.8).is_err());
    }

    #[test]
    fn dashed_identity_exact_in_rationals() {
        // c = p/q: 10c^4 - 2tc^2 - ac - 1 with t, a from the curve, cleared by q^4.
        for (pn, qd) in [(1i128, 2i128), (1, 3), (2, 5), (3, 7), (7, 10)] {
            // t = (6p^4 - q^4)/(p^2 q^2), a = (-2p^4 + q^4)/(p q^3)
            let lhs = 10 * pn.pow(4);
            let two_t_c2 = 2 * (6 * pn.pow(4) - qd.pow(4));
            let a_c = -2 * pn.pow(4) + qd.pow(4);
            assert_eq!(lhs - two_t_c2 - a_c, qd.pow(4));
        }
    }

    #[test]
    fn a_positive_along_curve() {
        let cmax = 3f64.powf(-0.25);
        for k in 1..1000 {
            let c = cmax * k as f64 / 1000.0;
            assert!(dashed_curve(c).unwrap().1 > 0.0);
        }
    }

    #[test]
    fn pearcey_param_examples() {
        let (t, a) = pearcey_params(0.5, 0.0, 7).unwrap();
        assert_eq!((t, a), dashed_curve(0.5).unwrap());
        let (_, a) = pearcey_params(0.5, 1.0, 100).unwrap();
        let want = 4.0 / 1.5 * ((1.0 - 3.0 / 16.0) / 200.0f64).sqrt();
        assert!((a - 1.75 - want).abs() < 1e-15);
        let (_, _, c) = multicrit_params(0.0, 0.3, 11).unwrap();
        assert_eq!(c, 3f64.powf(-0.25));
        assert!(multicrit_params(4.0, 0.0, 16).is_err());
    }

    #[test]
    fn solve_c_examples() {
        assert!((solve_c(-2.5, 1.75).unwrap() - 0.5).abs() < 1e-14);
        let c = solve_c(3f64.sqrt(), 3f64.powf(-0.75)).unwrap();
        assert!((c - 3f64.powf(-0.25)).abs() < 1e-12);
        for c in [0.2, 0.4, 0.6, 0.75] {
            let (t, a) = dashed_curve(c).unwrap();
            assert!((solve_c(t, a).unwrap() - c).abs() < 1e-12);
        }
        assert!(solve_c(1.0, -1.0).is_err());
    }

    #[test]
    fn v_conventions_agree() {
        let p = ModelParams::new(3, 0.0, 0.7, 0.4, 1.0).unwrap();
        for x in [-1.3, -0.2, 0.4, 1.1] {
            let a = weight_W(x, &p);
            let b = (-2.0 * 3.0 * v_intro(x, p.t, p.a)).exp();
            assert!((a - b).abs() <= 1e-15 * a.max(1.0));
        }
    }

    #[test]
    fn json_documents() {
        let e = ParamDoc::from_json(r#"{"n":4,"alpha":0.3,"t":1,"a":0.5,"gamma":1}"#).unwrap();
        assert_eq!(e.resolve().unwrap().n, 4);
        let p = ParamDoc::from_json(r#"{"curve":"pearcey","c":0.5,"tau":0,"n":8}"#).unwrap();
        assert_eq!(p.resolve().unwrap().t, -2.5);
        let m = ParamDoc::from_json(r#"{"curve":"multicritical","sigma":0,"tau":0,"n":8}"#).unwrap();
        assert!((m.resolve().unwrap().t - 3f64.sqrt()).abs() < 1e-14);
        assert!(ParamDoc::from_json(r#"{"n":4,"alpha":0.3,"t":1,"a":0.5,"gamma":1,"extra":2}"#).is_err());
        assert!(ParamDoc::from_json(r#"{"curve":"pearcey","c":0.5,"tau":0,"n":8,"sigma":1}"#).is_err());
        assert!(ParamDoc::from_json(r#"{"curve":"other","c":0.5,"tau":0,"n":8}"#).is_err());
    }

    #[test]
    fn biorth_sign_rule() {
        let p = ModelParams::new(2, 0.0, 1.0, -0.5, 0.3).unwrap();
        assert!(p.validate_biorth().is_err());
        assert!(ModelParams { gamma: -1.0, ..p }.validate_biorth().is_ok());
        assert!(ModelParams { a: 0.0, gamma: 1.0, ..p }.validate_biorth().is_err());
    }

    proptest! {
        #[test]
        fn wodd_ratio(x in -3.0f64..3.0, alpha in -0.9f64..2.0, t in -2.0f64..2.0, a in 0.01f64..2.0) {
            prop_assume!(x.abs() > 1e-3);
            let p = ModelParams::new(2, alpha, t, a, 1.0).unwrap();
            let w = weight_W(x, &p);
            prop_assume!(w > 1e-300);
            prop_assert!((weight_Wodd(x, &p) / w - x.abs()).abs() <= 1e-15 * x.abs());
        }

        #[test]
        fn weight_positive_off_origin(x in -2.0f64..2.0, alpha in -0.9f64..2.0) {
            prop_assume!(x != 0.0);
            let p = ModelParams::new(1, alpha, 0.5, 0.5, 1.0).unwrap();
            prop_assert!(weight_W(x, &p) > 0.0);
        }

        #[test]
        fn dashed_round_trip(c in 0.05f64..0.75) {
            let (t, a) = dashed_curve(c).unwrap();
            prop_assert!(c_identity_residual(c, t, a).abs() < 1e-12);
            prop_assert!((solve_c(t, a).unwrap() - c).abs() < 1e-10);
        }
    }
}
