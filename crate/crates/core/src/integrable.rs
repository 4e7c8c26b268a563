//! Lax matrices and residual evaluators for the Boussinesq hierarchy, its
//! similarity reduction, the first integrals and the Chazy equations.
//!
//! Everything is driven by τ-jets of `u` and `v`. Derivatives of composite
//! expressions are taken with truncated jet arithmetic, so no identity here
//! relies on hand-expanded derivatives.

use crate::error::{Error, Result};
use nalgebra::{Matrix3, SVD};
use num_complex::Complex64;
use serde::Serialize;
use std::ops::{Add, Mul, Neg, Sub};

/// Length given to constant jets; anything longer than the deepest jet used.
const CONST_LEN: usize = 16;

/// Truncated τ-jet: `self.0[k]` is the k-th derivative at a point.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Jet(Vec<f64>);

impl Jet {
    pub(crate) fn constant(c: f64) -> Self {
        let mut d = vec![0.0; CONST_LEN];
        d[0] = c;
        Jet(d)
    }

    /// The independent variable itself.
    pub(crate) fn var(t: f64) -> Self {
        let mut d = vec![0.0; CONST_LEN];
        d[0] = t;
        d[1] = 1.0;
        Jet(d)
    }

    /// Jet of `Σ c_i t^i` of the given length.
    pub(crate) fn from_poly(coefs: &[f64], t: f64, len: usize) -> Self {
        let d = (0..len)
            .map(|k| {
                (k..coefs.len())
                    .map(|i| {
                        let falling: f64 = ((i - k + 1)..=i).map(|j| j as f64).product();
                        coefs[i] * falling * t.powi((i - k) as i32)
                    })
                    .sum()
            })
            .collect();
        Jet(d)
    }

    pub(crate) fn value(&self) -> f64 {
        self.0[0]
    }

    /// k-th τ-derivative.
    pub(crate) fn d(&self, k: usize) -> Jet {
        assert!(k < self.0.len(), "jet of length {} has no derivative of order {k}", self.0.len());
        Jet(self.0[k..].to_vec())
    }

    fn sq(&self) -> Jet {
        self.clone() * self.clone()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.into_iter().map(|a| -a).collect())
    }
}

// Leibniz rule.
impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let n = self.0.len().min(o.0.len());
        let mut out = vec![0.0; n];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut binom = 1.0;
            for j in 0..=k {
                *slot += binom * self.0[j] * o.0[k - j];
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
        }
        Jet(out)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        Jet(j.0.into_iter().map(|a| self * a).collect())
    }
}

/// Point data for the Lax matrices: `(ρ, σ, τ)` and the τ-jets of `u`, `v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LaxJet {
    pub tau: f64,
    pub sigma: f64,
    pub rho: f64,
    /// `u, u_τ, …, u_τ⁽⁵⁾`.
    pub u: [f64; 6],
    /// `v, v_τ, …, v_τ⁽⁴⁾`.
    pub v: [f64; 5],
}

impl LaxJet {
    pub fn new(tau: f64, sigma: f64, rho: f64, u: [f64; 6], v: [f64; 5]) -> Result<Self> {
        let all = [tau, sigma, rho].into_iter().chain(u).chain(v);
        if all.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("LaxJet entries must be finite".into()));
        }
        Ok(Self { tau, sigma, rho, u, v })
    }

    /// From slices, checking that the jets have exactly the required orders.
    pub fn from_slices(tau: f64, sigma: f64, rho: f64, u: &[f64], v: &[f64]) -> Result<Self> {
        let u: [f64; 6] = u
            .try_into()
            .map_err(|_| Error::Config(format!("u jet needs 6 entries (orders 0..=5), got {}", u.len())))?;
        let v: [f64; 5] = v
            .try_into()
            .map_err(|_| Error::Config(format!("v jet needs 5 entries (orders 0..=4), got {}", v.len())))?;
        Self::new(tau, sigma, rho, u, v)
    }

    /// Exact jets of polynomial `u`, `v` (ascending coefficients).
    pub fn from_polynomials(tau: f64, sigma: f64, rho: f64, u: &[f64], v: &[f64]) -> Result<Self> {
        let (ju, jv) = (Jet::from_poly(u, tau, 6), Jet::from_poly(v, tau, 5));
        Self::from_slices(tau, sigma, rho, &ju.0, &jv.0)
    }

    /// Jets of user-supplied functions by central differences, with step
    /// `eps^{1/(k+2)}` for the k-th derivative.
    pub fn from_functions(
        tau: f64,
        sigma: f64,
        rho: f64,
        u: impl Fn(f64) -> f64,
        v: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let mut ju = [0.0; 6];
        let mut jv = [0.0; 5];
        for (k, slot) in ju.iter_mut().enumerate() {
            *slot = central_difference(&u, tau, k);
        }
        for (k, slot) in jv.iter_mut().enumerate() {
            *slot = central_difference(&v, tau, k);
        }
        Self::new(tau, sigma, rho, ju, jv)
    }

    fn jets(&self) -> (Jet, Jet) {
        (Jet(self.u.to_vec()), Jet(self.v.to_vec()))
    }

    /// Largest jet entry in magnitude, at least 1.
    pub fn scale(&self) -> f64 {
        self.u.iter().chain(&self.v).fold(1.0, |m: f64, x| m.max(x.abs()))
    }
}

fn central_difference(f: &impl Fn(f64) -> f64, x: f64, k: usize) -> f64 {
    if k == 0 {
        return f(x);
    }
    let h = f64::EPSILON.powf(1.0 / (k as f64 + 2.0));
    let mut s = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * binom * f(x + (k as f64 / 2.0 - j as f64) * h);
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    s / h.powi(k as i32)
}

type JetMat = [[Jet; 3]; 3];

fn zero_mat() -> JetMat {
    std::array::from_fn(|_| std::array::from_fn(|_| Jet::constant(0.0)))
}

fn unit(i: usize, j: usize) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    m[(i, j)] = 1.0;
    m
}

/// k-th τ-derivative of every entry, evaluated.
fn eval_mat(m: &JetMat, k: usize) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[i][j].d(k).value())
}

/// Constant-in-ξ parts of Â, B̂, Ĉ as jet matrices; the ξ-dependent parts
/// are constant matrices.
struct LaxJets {
    a0: JetMat,
    b0: JetMat,
    c0: JetMat,
    c1: JetMat,
}

fn c_entries(u: &Jet, v: &Jet) -> [Jet; 6] {
    let n = 1.0 / 9.0;
    let uu = u.sq();
    let c11 = n * (2.0 * u.d(2) - 3.0 * v.d(1) + 2.0 * uu.clone());
    let c22 = n * (-u.d(2) - uu.clone());
    let c33 = n * (-u.d(2) + 3.0 * v.d(1) - uu.clone());
    let c21 = n * (-2.0 * u.d(3) + 3.0 * v.d(2) - 2.0 * uu.d(1) + 3.0 * (u.clone() * v.clone()));
    let c31 = n * (2.0 * u.d(4) - 3.0 * v.d(3) + 2.0 * uu.d(2) - 3.0 * (u.clone() * v.clone()).d(1) - 3.0 * v.sq());
    let c32 = n * (-u.d(3) - uu.d(1) + 3.0 * v.d(2) + 6.0 * (u.clone() * v.clone()));
    [c11, c22, c33, c21, c31, c32]
}

fn lax_jets(u: &Jet, v: &Jet) -> LaxJets {
    let third = 1.0 / 3.0;
    let mut a0 = zero_mat();
    a0[0][1] = Jet::constant(1.0);
    a0[1][2] = Jet::constant(1.0);
    a0[2][0] = v.clone();
    a0[2][1] = -u.clone();

    let mut b0 = zero_mat();
    b0[0][0] = (2.0 * third) * u.clone();
    b0[0][2] = Jet::constant(1.0);
    b0[1][0] = v.clone() - (2.0 * third) * u.d(1);
    b0[1][1] = -third * u.clone();
    b0[2][0] = -v.d(1) + (2.0 * third) * u.d(2);
    b0[2][1] = v.clone() - third * u.d(1);
    b0[2][2] = -third * u.clone();

    let mut c1 = zero_mat();
    c1[0][1] = Jet::constant(1.0);
    c1[1][0] = third * u.clone();
    c1[1][2] = Jet::constant(1.0);
    c1[2][0] = -third * u.d(1) + (2.0 * third) * v.clone();
    c1[2][1] = -(2.0 * third) * u.clone();

    let [c11, c22, c33, c21, c31, c32] = c_entries(u, v);
    let mut c0 = zero_mat();
    c0[0][0] = c11;
    c0[0][1] = -third * (v.clone() - u.d(1));
    c0[0][2] = third * u.clone();
    c0[1][0] = c21;
    c0[1][1] = c22;
    c0[1][2] = -third * v.clone();
    c0[2][0] = c31;
    c0[2][1] = c32;
    c0[2][2] = c33;
    LaxJets { a0, b0, c0, c1 }
}

/// Matrix polynomial in ξ, ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct MatPoly(pub Vec<Matrix3<f64>>);

impl MatPoly {
    pub fn eval(&self, xi: Complex64) -> Matrix3<Complex64> {
        self.0.iter().rev().fold(Matrix3::zeros(), |acc, c| acc * xi + c.map(Complex64::from))
    }

    fn mul(&self, o: &MatPoly) -> MatPoly {
        let mut out = vec![Matrix3::zeros(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        MatPoly(out)
    }

    fn sub(&self, o: &MatPoly) -> MatPoly {
        let n = self.0.len().max(o.0.len());
        MatPoly(
            (0..n)
                .map(|k| {
                    let z = Matrix3::zeros();
                    self.0.get(k).unwrap_or(&z) - o.0.get(k).unwrap_or(&z)
                })
                .collect(),
        )
    }

    /// Largest coefficient entry in magnitude.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flat_map(|m| m.iter()).fold(0.0, |a, x| a.max(x.abs()))
    }

    fn to_arrays(&self) -> Vec<[[f64; 3]; 3]> {
        self.0.iter().map(|m| std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))).collect()
    }
}

/// Â, B̂, Ĉ, L̂ as polynomials in ξ.
#[derive(Clone, Debug)]
pub struct LaxPolys {
    pub a: MatPoly,
    pub b: MatPoly,
    pub c: MatPoly,
    pub l: MatPoly,
}

impl LaxPolys {
    pub fn new(jet: &LaxJet) -> Self {
        let (u, v) = jet.jets();
        let lj = lax_jets(&u, &v);
        let a = MatPoly(vec![eval_mat(&lj.a0, 0), unit(2, 0)]);
        let b = MatPoly(vec![eval_mat(&lj.b0, 0), unit(1, 0) + unit(2, 1)]);
        let c = MatPoly(vec![eval_mat(&lj.c0, 0), eval_mat(&lj.c1, 0), unit(2, 0)]);
        let d = Matrix3::from_diagonal(&nalgebra::Vector3::new(0.0, 1.0, 2.0)) / -3.0;
        let mut l = vec![d, Matrix3::zeros(), Matrix3::zeros()];
        for (k, slot) in l.iter_mut().enumerate() {
            let z = Matrix3::zeros();
            *slot += jet.tau / 3.0 * a.0.get(k).unwrap_or(&z)
                + 2.0 * jet.sigma / 3.0 * b.0.get(k).unwrap_or(&z)
                + 4.0 * jet.rho / 3.0 * c.0[k];
        }
        Self { a, b, c, l: MatPoly(l) }
    }
}

/// Â, B̂, Ĉ, L̂ at one spectral point.
#[derive(Clone, Debug, PartialEq)]
pub struct LaxMatrices {
    pub a: Matrix3<Complex64>,
    pub b: Matrix3<Complex64>,
    pub c: Matrix3<Complex64>,
    pub l: Matrix3<Complex64>,
}

pub fn lax_matrices(xi: Complex64, jet: &LaxJet) -> LaxMatrices {
    let p = LaxPolys::new(jet);
    LaxMatrices { a: p.a.eval(xi), b: p.b.eval(xi), c: p.c.eval(xi), l: p.l.eval(xi) }
}

// First two flows of the hierarchy as jets.
fn u_sigma(u: &Jet, v: &Jet) -> Jet {
    u.d(2) - 2.0 * v.d(1)
}

fn v_sigma(u: &Jet, v: &Jet) -> Jet {
    -v.d(2) + (2.0 / 3.0) * u.d(3) + (2.0 / 3.0) * (u.clone() * u.d(1))
}

fn u_rho(u: &Jet, v: &Jet) -> Jet {
    (1.0 / 3.0) * (u.d(4) - 2.0 * v.d(3) + u.sq().d(2) - 4.0 * (u.clone() * v.clone()).d(1))
}

fn v_rho(u: &Jet, v: &Jet) -> Jet {
    (1.0 / 9.0)
        * (2.0 * u.d(5) - 3.0 * v.d(4) + 2.0 * u.sq().d(3) + 2.0 * (u.clone() * u.d(3))
            - 6.0 * (u.clone() * v.d(1)).d(1)
            - 6.0 * v.sq().d(1)
            + 4.0 * (u.sq() * u.d(1)))
}

/// Externally supplied flow derivatives at the jet point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Flows {
    pub u_sigma: f64,
    pub v_sigma: f64,
    pub u_rho: f64,
    pub v_rho: f64,
}

/// Residuals of the hierarchy equations at one jet.
#[derive(Clone, Debug, Serialize)]
pub struct HierarchyResidual {
    /// Supplied minus hierarchy value of `u_σ, v_σ, u_ρ, v_ρ`; absent when
    /// the flows were defined by the hierarchy.
    pub flows: Option<[f64; 4]>,
    /// `u_σσ + u_ττττ/3 + (4/3)(u u_τ)_τ` with `u_σσ` from the first flow.
    pub boussinesq: f64,
    /// ξ-coefficients of `∂_σÂ − ∂_τB̂ − [Â, B̂]`.
    pub zero_curvature_sigma: Vec<[[f64; 3]; 3]>,
    /// ξ-coefficients of `∂_ρÂ − ∂_τĈ − [Â, Ĉ]`.
    pub zero_curvature_rho: Vec<[[f64; 3]; 3]>,
    pub max_zero_curvature_sigma: f64,
    pub max_zero_curvature_rho: f64,
}

fn flow_matrix(du: f64, dv: f64) -> MatPoly {
    MatPoly(vec![dv * unit(2, 0) - du * unit(2, 1)])
}

/// `∂_t Â − ∂_τ M − [Â, M]` for a flow `t` with Lax matrix `M`.
fn zero_curvature(a: &MatPoly, m: &MatPoly, dm: &MatPoly, du: f64, dv: f64) -> MatPoly {
    let comm = a.mul(m).sub(&m.mul(a));
    flow_matrix(du, dv).sub(dm).sub(&comm)
}

pub fn residual_hierarchy(jet: &LaxJet, supplied: Option<Flows>) -> HierarchyResidual {
    let (u, v) = jet.jets();
    let defined = Flows {
        u_sigma: u_sigma(&u, &v).value(),
        v_sigma: v_sigma(&u, &v).value(),
        u_rho: u_rho(&u, &v).value(),
        v_rho: v_rho(&u, &v).value(),
    };
    let fl = supplied.unwrap_or(defined);

    let us = u_sigma(&u, &v);
    let vs = v_sigma(&u, &v);
    let uss = us.d(2) - 2.0 * vs.d(1);
    let boussinesq = (uss + (1.0 / 3.0) * u.d(4) + (4.0 / 3.0) * (u.clone() * u.d(1)).d(1)).value();

    let lj = lax_jets(&u, &v);
    let p = LaxPolys::new(jet);
    // ξ-parts of B̂ and Ĉ are τ-independent.
    let db = MatPoly(vec![eval_mat(&lj.b0, 1)]);
    let dc = MatPoly(vec![eval_mat(&lj.c0, 1), eval_mat(&lj.c1, 1)]);
    let zs = zero_curvature(&p.a, &p.b, &db, fl.u_sigma, fl.v_sigma);
    let zr = zero_curvature(&p.a, &p.c, &dc, fl.u_rho, fl.v_rho);

    HierarchyResidual {
        flows: supplied.map(|s| {
            [
                s.u_sigma - defined.u_sigma,
                s.v_sigma - defined.v_sigma,
                s.u_rho - defined.u_rho,
                s.v_rho - defined.v_rho,
            ]
        }),
        boussinesq,
        max_zero_curvature_sigma: zs.max_abs(),
        max_zero_curvature_rho: zr.max_abs(),
        zero_curvature_sigma: zs.to_arrays(),
        zero_curvature_rho: zr.to_arrays(),
    }
}

// Similarity reduction as jets, so its identities can be differentiated.
pub(crate) fn similarity_jets(u: &Jet, v: &Jet, tau: f64, sigma: f64, rho: f64) -> (Jet, Jet, Jet) {
    let t = Jet::var(tau);
    let uu = u.sq();
    let uv = u.clone() * v.clone();
    let r1 = (4.0 * rho / 3.0) * (-u.d(4) + 2.0 * v.d(3) - uu.d(2) + 4.0 * uv.d(1))
        + 2.0 * sigma * (2.0 * v.d(1) - u.d(2))
        - t.clone() * u.d(1)
        - 2.0 * u.clone();
    let r2 = (4.0 * rho / 9.0)
        * (-2.0 * u.d(5) + 3.0 * v.d(4) - 2.0 * uu.d(3) - 2.0 * (u.clone() * u.d(3))
            + 6.0 * (u.clone() * v.d(1)).d(1)
            + 6.0 * v.sq().d(1)
            - 4.0 * (uu.clone() * u.d(1)))
        + 2.0 * sigma * (v.d(2) - (2.0 / 3.0) * u.d(3) - (1.0 / 3.0) * uu.d(1))
        - t.clone() * v.d(1)
        - 3.0 * v.clone();
    let single = (4.0 * sigma * sigma) * (-u.d(4) - 2.0 * uu.d(2))
        - 3.0 * (t.sq() * u.d(2))
        - 21.0 * (t.clone() * u.d(1))
        - 24.0 * u.clone();
    (r1, r2, single)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimilarityResiduals {
    pub r1: f64,
    pub r2: f64,
    /// Only defined for `ρ = 0`.
    pub r_single: Option<f64>,
}

/// Residuals of the coupled reduction and, at `ρ = 0`, the single equation.
pub fn residual_similarity(jet: &LaxJet) -> SimilarityResiduals {
    let (u, v) = jet.jets();
    let (r1, r2, s) = similarity_jets(&u, &v, jet.tau, jet.sigma, jet.rho);
    SimilarityResiduals { r1: r1.value(), r2: r2.value(), r_single: (jet.rho == 0.0).then(|| s.value()) }
}

pub fn residual_single(jet: &LaxJet) -> Result<f64> {
    residual_similarity(jet)
        .r_single
        .ok_or_else(|| Error::Unsupported(format!("the single reduced equation needs rho = 0, got {}", jet.rho)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChazyResiduals {
    /// Third-order equation at τ.
    pub r3: f64,
    /// Second-order equation in ỹ at `x = τ/√2`, the point where ỹ samples
    /// the given jet of f.
    pub r2: f64,
}

/// Second-order Chazy residual from `(ỹ, ỹ', ỹ'')` at `x`.
pub fn chazy_second(yt: [f64; 3], x: f64, alpha: f64) -> f64 {
    let [y, y1, y2] = yt;
    y2 * y2 + 4.0 * y1.powi(3) - 4.0 * (x * y1 - y).powi(2) - (4.0 / 3.0) * (alpha * alpha - alpha + 1.0) * y1
        + (4.0 / 27.0) * (alpha + 1.0) * (2.0 * alpha - 1.0) * (alpha - 2.0)
}

/// `f` and its first three τ-derivatives at `tau`; `σ = 3/2` convention.
pub fn residual_chazy(f: [f64; 4], tau: f64, alpha: f64) -> ChazyResiduals {
    let y1 = f[1] + tau * tau / 36.0;
    let y3 = f[3] + 1.0 / 18.0;
    let y = f[0] + tau.powi(3) / 108.0;
    let r3 = y3 + 6.0 * y1 * y1 + tau * y - tau.powi(4) / 72.0 + (alpha - alpha * alpha) / 6.0;

    let s2 = std::f64::consts::SQRT_2;
    let x = tau / s2;
    let yt = [s2 * f[0] + 4.0 / 27.0 * x.powi(3), 2.0 * f[1] + 4.0 / 9.0 * x * x, 2.0 * s2 * f[2] + 8.0 / 9.0 * x];
    ChazyResiduals { r3, r2: chazy_second(yt, x, alpha) }
}

fn require_reduced(jet: &LaxJet) -> Result<()> {
    if jet.rho != 0.0 || jet.sigma != 1.5 {
        return Err(Error::Unsupported(format!(
            "first integrals are stated for rho = 0, sigma = 3/2, got ({}, {})",
            jet.rho, jet.sigma
        )));
    }
    Ok(())
}

/// Left-hand sides of the two first integrals.
pub fn first_integral_values(jet: &LaxJet) -> Result<(f64, f64)> {
    require_reduced(jet)?;
    let (t, u, v) = (jet.tau, &jet.u, &jet.v);
    let i1 = 3.0 * (-2.0 * u[2] + 3.0 * v[1] - t * v[0]) - t * (-3.0 * u[1] - t * u[0] + 6.0 * v[0])
        - 3.0 * u[0] * u[0]
        - 3.0 * u[0];
    let p = -2.0 * u[1] - 2.0 / 3.0 * t * u[0] + 3.0 * v[0];
    let q = -u[1] - 2.0 / 3.0 * t * u[0] + 3.0 * v[0] + 2.0 / 3.0 * t;
    let w = -u[0] - t * t / 3.0 - 1.0;
    let z = 2.0 * u[2] - 3.0 * v[1] + 2.0 / 3.0 * u[0] * u[0] + 4.0 / 3.0 * u[0] + t * v[0];
    Ok((i1, p * q - w * z))
}

/// Right-hand sides of the two first integrals.
pub fn first_integral_constants(alpha: f64) -> (f64, f64) {
    let a = alpha;
    ((1.0 + 3.0 * a - 3.0 * a * a) / 4.0, a.powi(3) / 12.0 + a * a / 8.0 - 3.0 * a / 8.0)
}

pub fn first_integrals(jet: &LaxJet, alpha: f64) -> Result<(f64, f64)> {
    let (i1, i2) = first_integral_values(jet)?;
    let (k1, k2) = first_integral_constants(alpha);
    Ok((i1 - k1, i2 - k2))
}

/// The two parameter cases with polynomial solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementaryCase {
    /// `alpha = 0, gamma = 1`.
    Plus,
    /// `alpha = 1, gamma = -1`.
    Minus,
}

impl ElementaryCase {
    pub const ALL: [ElementaryCase; 2] = [ElementaryCase::Plus, ElementaryCase::Minus];

    pub fn alpha(self) -> f64 {
        match self {
            Self::Plus => 0.0,
            Self::Minus => 1.0,
        }
    }

    pub fn gamma(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }

    pub fn sign(self) -> f64 {
        self.gamma()
    }

    pub fn from_params(alpha: f64, gamma: f64) -> Result<Self> {
        match (alpha, gamma) {
            (a, g) if a == 0.0 && g == 1.0 => Ok(Self::Plus),
            (a, g) if a == 1.0 && g == -1.0 => Ok(Self::Minus),
            _ => Err(Error::Unsupported(format!(
                "no elementary solution at alpha = {alpha}, gamma = {gamma}"
            ))),
        }
    }

    /// `λ` with `rank(L̂₀ + λ I) = 1`.
    pub fn rank_one_shift(self) -> f64 {
        match self {
            Self::Plus => 0.5,
            Self::Minus => 1.0 / 6.0,
        }
    }
}

/// Polynomial solution at one τ, with `σ = 3/2, ρ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ElementarySolution {
    pub case: ElementaryCase,
    pub tau: f64,
    /// `f, f', f'', f'''`.
    pub f: [f64; 4],
    pub u: [f64; 6],
    pub v: [f64; 5],
    pub y: f64,
    pub y_tilde: f64,
}

impl ElementarySolution {
    pub fn lax_jet(&self) -> LaxJet {
        LaxJet { tau: self.tau, sigma: 1.5, rho: 0.0, u: self.u, v: self.v }
    }
}

fn elementary_f(case: ElementaryCase) -> [f64; 4] {
    [0.0, case.sign() / 6.0, 0.0, -1.0 / 27.0]
}

/// `f` is the cubic, `u = 3 f_τ` and `v = ½(τf)_τ + (3/2) f_ττ`.
pub fn elementary_solution(case: ElementaryCase, tau: f64) -> ElementarySolution {
    let coefs = elementary_f(case);
    let f = Jet::from_poly(&coefs, tau, 8);
    let u = 3.0 * f.d(1);
    let v = 0.5 * (Jet::var(tau) * f.clone()).d(1) + 1.5 * f.d(2);
    let poly = |x: f64| coefs.iter().rev().fold(0.0, |a, c| a * x + c);
    let s2 = std::f64::consts::SQRT_2;
    ElementarySolution {
        case,
        tau,
        f: std::array::from_fn(|k| f.0[k]),
        u: std::array::from_fn(|k| u.0[k]),
        v: std::array::from_fn(|k| v.0[k]),
        y: f.value() + tau.powi(3) / 108.0,
        y_tilde: s2 * poly(s2 * tau) + 4.0 / 27.0 * tau.powi(3),
    }
}

/// Spectrum and rank data of `L̂₀ = L̂(ξ = 0)`.
#[derive(Clone, Debug, Serialize)]
pub struct L0Structure {
    pub tau: f64,
    /// Eigenvalues of `−L̂₀`, ascending by real part.
    pub eigenvalues: [Complex64; 3],
    /// `{1/2 − α/3, α/6, 1/2 + α/6}`, ascending.
    pub expected: [f64; 3],
    pub max_eigenvalue_err: f64,
    pub shift: f64,
    /// Singular values of `L̂₀ + shift·I`, descending.
    pub singular_values: [f64; 3],
}

impl L0Structure {
    /// Numerical rank at relative threshold `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        let s0 = self.singular_values[0];
        self.singular_values.iter().filter(|&&s| s > tol * s0.max(1.0)).count()
    }
}

pub fn l0_matrix(jet: &LaxJet) -> Matrix3<f64> {
    LaxPolys::new(jet).l.0[0]
}

pub fn l0_structure(case: ElementaryCase, tau: f64) -> Result<L0Structure> {
    let l0 = l0_matrix(&elementary_solution(case, tau).lax_jet());
    let mut ev: Vec<Complex64> = (-l0).complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re));
    let al = case.alpha();
    let mut expected = [0.5 - al / 3.0, al / 6.0, 0.5 + al / 6.0];
    expected.sort_by(f64::total_cmp);
    let max_eigenvalue_err = ev.iter().zip(expected).map(|(z, e)| (z - e).norm()).fold(0.0, f64::max);
    let shift = case.rank_one_shift();
    let svd = SVD::new(l0 + Matrix3::identity() * shift, false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    if ev.iter().any(|z| !z.re.is_finite()) {
        return Err(Error::Numerical(format!("eigenvalues of L0 at tau = {tau} are not finite")));
    }
    Ok(L0Structure {
        tau,
        eigenvalues: [ev[0], ev[1], ev[2]],
        expected,
        max_eigenvalue_err,
        shift,
        singular_values: [sv[0], sv[1], sv[2]],
    })
}

/// Machine-readable summary of one residual scan.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub equation_id: String,
    pub max_abs_residual: f64,
    pub grid: Vec<f64>,
}

impl ResidualReport {
    fn new(equation_id: impl Into<String>, grid: &[f64], res: impl Iterator<Item = f64>) -> Self {
        Self {
            equation_id: equation_id.into(),
            max_abs_residual: res.fold(0.0, |a, r| a.max(r.abs())),
            grid: grid.to_vec(),
        }
    }
}

/// Every residual the elementary solutions must satisfy, scanned over `grid`.
pub fn elementary_suite(case: ElementaryCase, grid: &[f64]) -> Result<Vec<ResidualReport>> {
    let sols: Vec<ElementarySolution> = grid.iter().map(|&t| elementary_solution(case, t)).collect();
    let al = case.alpha();
    let tag = match case {
        ElementaryCase::Plus => "plus",
        ElementaryCase::Minus => "minus",
    };
    let id = |name: &str| format!("{name}/{tag}");
    let chazy: Vec<ChazyResiduals> = sols.iter().map(|s| residual_chazy(s.f, s.tau, al)).collect();
    let sim: Vec<SimilarityResiduals> = sols.iter().map(|s| residual_similarity(&s.lax_jet())).collect();
    let fi: Vec<(f64, f64)> = sols.iter().map(|s| first_integrals(&s.lax_jet(), al)).collect::<Result<_>>()?;
    Ok(vec![
        ResidualReport::new(id("chazy_third_order"), grid, chazy.iter().map(|c| c.r3)),
        ResidualReport::new(id("chazy_second_order"), grid, chazy.iter().map(|c| c.r2)),
        ResidualReport::new(id("similarity_coupled_1"), grid, sim.iter().map(|s| s.r1)),
        ResidualReport::new(id("similarity_coupled_2"), grid, sim.iter().map(|s| s.r2)),
        ResidualReport::new(id("similarity_single"), grid, sim.iter().map(|s| s.r_single.unwrap_or(f64::NAN))),
        ResidualReport::new(id("first_integral_1"), grid, fi.iter().map(|r| r.0)),
        ResidualReport::new(id("first_integral_2"), grid, fi.iter().map(|r| r.1)),
    ])
}
