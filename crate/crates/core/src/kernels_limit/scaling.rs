//! Finite-n sides of the double scaling limits, compared against the
//! closed-form limits where those exist.

use super::pearcey::{folded_plus, pearcey_kernel};
use crate::biorth::BiorthSystem;
use crate::error::{Error, Result};
use crate::kernels_finite::{kernel_Khat, ExtKernel};
use crate::model::{multicrit_params, pearcey_params, ModelParams};
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Which finite kernel is rescaled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitSide {
    /// `K̂_n` with `gamma = 1, alpha = 0`, against `2ξ folded_plus(ξ², η², tau)`.
    Symmetrized,
    /// `K^ext_{2n}` with `alpha = 0`, against `K^Pe(η, ξ; 2 tau)`.
    External,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LimitRecord {
    pub finite_value: f64,
    pub limit_value: f64,
    pub abs_err: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DriftRecord {
    pub value_n: f64,
    pub value_2n: f64,
    pub drift: f64,
}

type Key = (u32, u64, u64, bool);

/// Biorthogonal systems keyed by `(n, t, a, external)`, built on first use.
#[derive(Default)]
pub struct SystemCache {
    sym: Mutex<HashMap<Key, Arc<BiorthSystem>>>,
    ext: Mutex<HashMap<Key, Arc<ExtKernel>>>,
    bits: Option<u32>,
}

impl SystemCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Cache whose systems are built at a fixed working precision.
    pub fn with_bits(bits: Option<u32>) -> Self {
        Self { bits, ..Self::default() }
    }

    fn key(p: &ModelParams, ext: bool) -> Key {
        (p.n, p.t.to_bits(), p.a.to_bits(), ext)
    }

    /// `K̂_n` system at `(t, a)` with `alpha = 0, gamma = 1`.
    pub fn symmetrized(&self, n: u32, t: f64, a: f64) -> Result<Arc<BiorthSystem>> {
        let p = ModelParams::new(n, 0.0, t, a, 1.0)?;
        let k = Self::key(&p, false);
        if let Some(s) = self.sym.lock().expect("cache poisoned").get(&k) {
            return Ok(s.clone());
        }
        // Built outside the lock so distinct keys can build concurrently.
        let s = Arc::new(BiorthSystem::build_with_bits(p, n as usize, self.bits)?);
        Ok(self.sym.lock().expect("cache poisoned").entry(k).or_insert(s).clone())
    }

    pub fn external(&self, n: u32, t: f64, a: f64) -> Result<Arc<ExtKernel>> {
        let p = ModelParams::new(n, 0.0, t, a, 1.0)?;
        let k = Self::key(&p, true);
        if let Some(s) = self.ext.lock().expect("cache poisoned").get(&k) {
            return Ok(s.clone());
        }
        let s = Arc::new(ExtKernel::with_bits(n as usize, p, self.bits)?);
        Ok(self.ext.lock().expect("cache poisoned").entry(k).or_insert(s).clone())
    }
}

/// `c_1 = 2 c^{-4/3} (1 - 3c^4)`.
pub fn c1_pearcey(c: f64) -> f64 {
    2.0 * c.powf(-4.0 / 3.0) * (1.0 - 3.0 * c.powi(4))
}

fn check_points(xi: f64, eta: f64) -> Result<()> {
    if xi == 0.0 || eta == 0.0 || !xi.is_finite() || !eta.is_finite() {
        return Err(Error::Domain(format!("scaling limits exclude the origin, got ({xi}, {eta})")));
    }
    Ok(())
}

/// Rescaled finite-n kernel near the Pearcey point against its limit.
pub fn limit_compare_pearcey(
    n: u32,
    c: f64,
    tau: f64,
    xi: f64,
    eta: f64,
    side: LimitSide,
    cache: &SystemCache,
) -> Result<LimitRecord> {
    check_points(xi, eta)?;
    let (t, a) = pearcey_params(c, tau, n)?;
    let c1 = c1_pearcey(c);
    if !(c1 > 0.0) {
        return Err(Error::Domain(format!("c = {c} is the multi-critical point; c_1 vanishes")));
    }
    let s = (c1 * n as f64).powf(0.75);
    let (finite_value, limit_value) = match side {
        LimitSide::Symmetrized => {
            let sys = cache.symmetrized(n, t, a)?;
            let f = kernel_Khat(&sys, n as usize, xi / s, eta / s)? / s;
            (f, 2.0 * xi * folded_plus(xi * xi, eta * eta, tau)?)
        }
        LimitSide::External => {
            let ext = cache.external(n, t, a)?;
            (ext.eval(xi / s, eta / s)? / s, pearcey_kernel(eta, xi, 2.0 * tau)?)
        }
    };
    Ok(LimitRecord { finite_value, limit_value, abs_err: (finite_value - limit_value).abs() })
}

/// Rescaled `K̂_n` near the multi-critical point, including the conjugation
/// factor `e^{(2/3) n^{1/4} (η² - ξ²)}`. `gamma = 1, alpha = 0`.
pub fn multicrit_value(n: u32, sigma: f64, tau: f64, xi: f64, eta: f64, cache: &SystemCache) -> Result<f64> {
    check_points(xi, eta)?;
    let (t, a, _) = multicrit_params(sigma, tau, n)?;
    let nf = n as f64;
    let s = (3f64.powf(2.0 / 3.0) * nf).powf(0.375);
    let conj = if xi == eta { 1.0 } else { (2.0 / 3.0 * nf.powf(0.25) * (eta * eta - xi * xi)).exp() };
    let sys = cache.symmetrized(n, t, a)?;
    Ok(conj * kernel_Khat(&sys, n as usize, xi / s, eta / s)? / s)
}

pub fn multicrit_selfconsistency(n: u32, sigma: f64, tau: f64, xi: f64, eta: f64, cache: &SystemCache) -> Result<DriftRecord> {
    let value_n = multicrit_value(n, sigma, tau, xi, eta, cache)?;
    let value_2n = multicrit_value(2 * n, sigma, tau, xi, eta, cache)?;
    Ok(DriftRecord { value_n, value_2n, drift: (value_n - value_2n).abs() })
}

/// JSON summary of a grid comparison.
#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub n: Vec<u32>,
    pub c1: f64,
    pub grid: Vec<(f64, f64)>,
    pub max_abs_err: Vec<f64>,
    /// True when `max_abs_err` strictly decreases along `n`.
    pub trend: bool,
}

pub fn limit_report(ns: &[u32], c: f64, tau: f64, grid: &[(f64, f64)], side: LimitSide, cache: &SystemCache) -> Result<LimitReport> {
    use rayon::prelude::*;
    let mut max_abs_err = Vec::with_capacity(ns.len());
    for &n in ns {
        let errs: Result<Vec<f64>> = grid
            .par_iter()
            .map(|&(x, y)| Ok(limit_compare_pearcey(n, c, tau, x, y, side, cache)?.abs_err))
            .collect();
        max_abs_err.push(errs?.into_iter().fold(0.0, f64::max));
    }
    let trend = max_abs_err.windows(2).all(|w| w[1] < w[0]);
    Ok(LimitReport { n: ns.to_vec(), c1: c1_pearcey(c), grid: grid.to_vec(), max_abs_err, trend })
}
