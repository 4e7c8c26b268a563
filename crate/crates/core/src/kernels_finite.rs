//! Finite-n correlation kernels and the two independent ways of rebuilding
//! the symmetrized kernel: the Christoffel-Darboux formula of the
//! polyorthogonal system and the 3x3 matrix RH solution.
//!
//! All public kernels take the physical variables `x, y`. The CD and matrix
//! forms live in the squared variables `X = x^2, Y = y^2`, where they produce
//! `F(X, Y) = K̂(sqrt X, sqrt Y) / (2 sqrt X)`; they are reported as `2|x| F`
//! so all three routes are directly comparable.

use crate::biorth::{
    cauchy_poly_mp, cauchy_weights_mp, h1, h2, htilde, poly_pair, BiorthSystem, CauchyPoint, PolyPair,
};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::mp::{horner, horner_c, mp_pi, mpf, solve_complex, MpComplex};
use crate::numerics::quad::{mp_tanh_sinh, MpTsOptions};
use num_complex::Complex64;
use rug::Float;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelVariant {
    Plain,
    Symmetrized,
    External,
}

#[derive(Clone, Debug)]
pub struct KernelRequest {
    pub m: usize,
    pub points: Vec<(f64, f64)>,
    pub variant: KernelVariant,
}

fn check_m(sys: &BiorthSystem, m: usize, extra: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("kernel order m must be at least 1".into()));
    }
    if m + extra > sys.kmax() + 1 {
        return Err(Error::Domain(format!("order {m} needs degree {} but the system stops at {}", m + extra - 1, sys.kmax())));
    }
    Ok(())
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!("{what} overflowed f64")))
    }
}

/// `sum_{k<m} p_k(x) q_k(y^2) / h_k` times `W(x)` with the gamma indicator.
pub(crate) fn k_mp(sys: &BiorthSystem, m: usize, x: &Float, y: &Float) -> Float {
    let prec = sys.prec();
    let y2 = Float::with_val(prec, y.square_ref());
    let mut s = Float::new(prec);
    for k in 0..m {
        s += horner(sys.p(k), x) * horner(sys.q(k), &y2) / sys.h(k);
    }
    s * sys.weight(x)
}

pub(crate) fn khat_mp(sys: &BiorthSystem, m: usize, x: &Float, y: &Float) -> Float {
    let mx = Float::with_val(sys.prec(), -x);
    k_mp(sys, m, x, y) + k_mp(sys, m, &mx, y)
}

#[allow(non_snake_case)]
pub fn kernel_K(sys: &BiorthSystem, m: usize, x: f64, y: f64) -> Result<f64> {
    check_m(sys, m, 0)?;
    let p = sys.prec();
    finite(k_mp(sys, m, &mpf(p, x), &mpf(p, y)).to_f64(), "K")
}

#[allow(non_snake_case)]
pub fn kernel_Khat(sys: &BiorthSystem, m: usize, x: f64, y: f64) -> Result<f64> {
    check_m(sys, m, 0)?;
    let p = sys.prec();
    finite(khat_mp(sys, m, &mpf(p, x), &mpf(p, y)).to_f64(), "K hat")
}

/// `(n1, n2) = (floor((m-1)/2) + 1, floor(m/2))`.
fn main_index(m: usize) -> (usize, usize) {
    ((m - 1) / 2 + 1, m / 2)
}

/// The five polyorthogonal pairs entering the CD formula.
struct CdPairs {
    main: PolyPair,
    down1: PolyPair,
    down2: Option<PolyPair>,
    up1: PolyPair,
    up2: PolyPair,
}

fn cd_pairs(sys: &BiorthSystem, m: usize) -> Result<CdPairs> {
    let (n1, n2) = main_index(m);
    Ok(CdPairs {
        main: poly_pair(sys, n1, n2)?,
        down1: poly_pair(sys, n1 - 1, n2)?,
        down2: if n2 >= 1 { Some(poly_pair(sys, n1, n2 - 1)?) } else { None },
        up1: poly_pair(sys, n1 + 1, n2)?,
        up2: poly_pair(sys, n1, n2 + 1)?,
    })
}

fn nonzero(v: Float, what: &str) -> Result<Float> {
    if v.is_zero() || !v.is_finite() {
        Err(Error::Numerical(format!("degenerate denominator {what}")))
    } else {
        Ok(v)
    }
}

/// Christoffel-Darboux evaluation of `F(X, Y)` for `X > 0`, `Y != X`.
fn cd_mp(sys: &BiorthSystem, m: usize, xx: &Float, yy: &Float) -> Result<Float> {
    let c = cd_pairs(sys, m)?;
    let mut rhs = c.main.eval_p(yy) * c.main.eval_q(sys, xx);
    let f1 = nonzero(h1(sys, &c.down1), "h1(n1-1, n2)")?;
    let g1 = h1(sys, &c.main) / nonzero(htilde(sys, &c.up1)?, "tilde h(n1+1, n2)")?;
    rhs -= c.down1.eval_p(yy) / f1 * g1 * c.up1.eval_q(sys, xx);
    if let Some(d2) = &c.down2 {
        let f2 = nonzero(h2(sys, d2), "h2(n1, n2-1)")?;
        let g2 = h2(sys, &c.main) / nonzero(htilde(sys, &c.up2)?, "tilde h(n1, n2+1)")?;
        rhs -= d2.eval_p(yy) / f2 * g2 * c.up2.eval_q(sys, xx);
    }
    Ok(rhs / Float::with_val(sys.prec(), yy - xx))
}

/// Symmetrized kernel rebuilt from the CD formula. Needs `p_{m+1}`.
/// Within `|y^2 - x^2| < 1e-6` the direct sum is returned instead.
pub fn kernel_cd(sys: &BiorthSystem, m: usize, x: f64, y: f64) -> Result<f64> {
    check_m(sys, m, 2)?;
    if x == 0.0 {
        return Err(Error::Domain("the CD form is singular at x = 0".into()));
    }
    let p = sys.prec();
    if (y * y - x * x).abs() < 1e-6 {
        return kernel_Khat(sys, m, x, y);
    }
    let f = cd_mp(sys, m, &mpf(p, x * x), &mpf(p, y * y))?;
    finite((f * (2.0 * x.abs())).to_f64(), "CD kernel")
}

type Mat3 = Vec<Vec<MpComplex>>;

fn two_pi_i(prec: u32) -> MpComplex {
    MpComplex { re: Float::new(prec), im: mp_pi(prec) * 2u32 }
}

/// `X̃^{(m)}` at a point of the squared plane; polynomials are evaluated at
/// `z` (the real part for boundary points).
pub fn xtilde_matrix(sys: &BiorthSystem, m: usize, pt: &CauchyPoint) -> Result<Mat3> {
    check_m(sys, m, 0)?;
    let prec = sys.prec();
    let (n1, n2) = main_index(m);
    let z = point_value(pt);
    let mut pairs = vec![poly_pair(sys, n1, n2)?, poly_pair(sys, n1 - 1, n2)?];
    if n2 >= 1 {
        pairs.push(poly_pair(sys, n1, n2 - 1)?);
    }
    let polys: Vec<&[Float]> = pairs.iter().map(|p| p.p_coeffs.as_slice()).collect();
    let cw = cauchy_weights_mp(sys, &polys, pt)?;
    let tpi = two_pi_i(prec);
    let mut diag = vec![MpComplex::real(Float::with_val(prec, 1))];
    diag.push(-MpComplex::real(h1(sys, &pairs[1])).div(&tpi));
    if n2 >= 1 {
        diag.push(-MpComplex::real(h2(sys, &pairs[2])).div(&tpi));
    }
    let mut out: Mat3 = Vec::with_capacity(3);
    for (i, pair) in pairs.iter().enumerate() {
        let inv = diag[i].recip();
        let row = [horner_c(&pair.p_coeffs, &z), cw[i].0.clone(), cw[i].1.clone()];
        out.push(row.iter().map(|v| v * &inv).collect());
    }
    if n2 == 0 {
        let mut last = vec![MpComplex::zero(prec); 3];
        last[2] = MpComplex::real(Float::with_val(prec, 1));
        out.push(last);
    }
    Ok(out)
}

/// `X^{(m)}` at a point off `R_+`.
pub fn x_matrix(sys: &BiorthSystem, m: usize, pt: &CauchyPoint) -> Result<Mat3> {
    check_m(sys, m, 2)?;
    let prec = sys.prec();
    let (n1, n2) = main_index(m);
    let z = point_value(pt);
    let pairs = [poly_pair(sys, n1, n2)?, poly_pair(sys, n1 + 1, n2)?, poly_pair(sys, n1, n2 + 1)?];
    let polys: Vec<&[Float]> = pairs.iter().map(|p| p.q_poly.as_slice()).collect();
    let c0 = cauchy_poly_mp(sys, &polys, pt)?;
    let diag = [
        two_pi_i(prec).recip(),
        MpComplex::real(pairs[1].lead_a().clone()),
        MpComplex::real(pairs[2].lead_b().clone()),
    ];
    let mut out: Mat3 = Vec::with_capacity(3);
    for (i, pair) in pairs.iter().enumerate() {
        let inv = diag[i].recip();
        // C_0 Q = 2 q_norm C̃r in the squared variable
        let cq = c0[i].scale(&Float::with_val(prec, &pair.q_norm * 2u32));
        let row = [-cq, horner_c(&pair.a_coeffs, &z), horner_c(&pair.b_coeffs, &z)];
        out.push(row.iter().map(|v| v * &inv).collect());
    }
    Ok(out)
}

fn point_value(pt: &CauchyPoint) -> MpComplex {
    match pt {
        CauchyPoint::Off(z) => z.clone(),
        CauchyPoint::Plus(x) | CauchyPoint::Minus(x) => MpComplex::real(x.clone()),
    }
}

/// `max |X^T X̃ - I|` at `z` in the squared plane.
pub fn relation_defect(sys: &BiorthSystem, m: usize, z: Complex64) -> Result<f64> {
    let pt = CauchyPoint::off(sys.prec(), z);
    let x = x_matrix(sys, m, &pt)?;
    let xt = xtilde_matrix(sys, m, &pt)?;
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let mut s = MpComplex::zero(sys.prec());
            for k in 0..3 {
                s = &s + &(&x[k][i] * &xt[k][j]);
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((s.to_c64() - target).norm());
        }
    }
    Ok(worst)
}

/// Symmetrized kernel from the matrix RH solution,
/// `e_1^T X̃^T(Y) (X̃^T(X))^{-1} (0, W_1(X), W_2(X))^T / (2πi (Y - X))`,
/// with `X̃(X)` taken as a boundary value from the upper side.
pub fn kernel_matrix_rhp(sys: &BiorthSystem, m: usize, x: f64, y: f64) -> Result<f64> {
    check_m(sys, m, 0)?;
    if x == 0.0 {
        return Err(Error::Domain("the matrix form is singular at x = 0".into()));
    }
    if (y * y - x * x).abs() < 1e-6 {
        return Err(Error::Domain("the matrix form needs y^2 != x^2".into()));
    }
    let prec = sys.prec();
    let xx = mpf(prec, x * x);
    let yy = MpComplex::real(mpf(prec, y * y));
    let at_x = xtilde_matrix(sys, m, &CauchyPoint::Plus(xx.clone()))?;
    let at_y = xtilde_first_column(sys, m, &yy)?;
    let (w1, w2) = crate::biorth::w1_w2(sys, &xx);
    let transposed: Mat3 = (0..3).map(|i| (0..3).map(|j| at_x[j][i].clone()).collect()).collect();
    let rhs = vec![MpComplex::zero(prec), MpComplex::real(w1), MpComplex::real(w2)];
    let w = solve_complex(transposed, rhs).ok_or_else(|| Error::Singular("X̃(x) is singular".into()))?;
    let mut s = MpComplex::zero(prec);
    for (a, b) in at_y.iter().zip(&w) {
        s = &s + &(a * b);
    }
    let den = two_pi_i(prec).scale(&Float::with_val(prec, &yy.re - &xx));
    let f = s.div(&den);
    finite((f.re * (2.0 * x.abs())).to_f64(), "matrix kernel")
}

/// First column of `X̃(Y)`: polynomial entries only.
fn xtilde_first_column(sys: &BiorthSystem, m: usize, yy: &MpComplex) -> Result<Vec<MpComplex>> {
    let prec = sys.prec();
    let (n1, n2) = main_index(m);
    let tpi = two_pi_i(prec);
    let main = poly_pair(sys, n1, n2)?;
    let d1 = poly_pair(sys, n1 - 1, n2)?;
    let mut col = vec![
        horner_c(&main.p_coeffs, yy),
        (&horner_c(&d1.p_coeffs, yy) * &tpi).div(&-MpComplex::real(h1(sys, &d1))),
    ];
    if n2 >= 1 {
        let d2 = poly_pair(sys, n1, n2 - 1)?;
        col.push((&horner_c(&d2.p_coeffs, yy) * &tpi).div(&-MpComplex::real(h2(sys, &d2))));
    } else {
        col.push(MpComplex::zero(prec));
    }
    Ok(col)
}

fn quad_opts(sys: &BiorthSystem) -> MpTsOptions {
    MpTsOptions {
        prec: sys.prec(),
        tol_rel: 1e-22,
        tol_abs: 0.0,
        max_levels: 12,
        left_exp: (1.0 + sys.params.alpha).min(1.0),
    }
}

fn cutoff(sys: &BiorthSystem, m: usize) -> f64 {
    crate::biorth::tail_cutoff(&sys.params, &[sys.params.alpha + 3.0 * m as f64], sys.prec())
}

/// `\int_R K(x, x) dx`.
pub fn trace_k(sys: &BiorthSystem, m: usize) -> Result<f64> {
    check_m(sys, m, 0)?;
    let prec = sys.prec();
    let f = |x: &Float| {
        let mx = Float::with_val(prec, -x);
        vec![k_mp(sys, m, x, x) + k_mp(sys, m, &mx, &mx)]
    };
    let (v, _) = mp_tanh_sinh(&f, &Float::new(prec), &mpf(prec, cutoff(sys, m)), 1, &quad_opts(sys))?;
    Ok(v[0].to_f64())
}

/// `(\int K(x, y) K(y, z) dy, K(x, z))`.
pub fn reproducing_pair(sys: &BiorthSystem, m: usize, x: f64, z: f64) -> Result<(f64, f64)> {
    check_m(sys, m, 0)?;
    let prec = sys.prec();
    let (xf, zf) = (mpf(prec, x), mpf(prec, z));
    let f = |y: &Float| {
        let my = Float::with_val(prec, -y);
        vec![k_mp(sys, m, &xf, y) * k_mp(sys, m, y, &zf) + k_mp(sys, m, &xf, &my) * k_mp(sys, m, &my, &zf)]
    };
    let (v, _) = mp_tanh_sinh(&f, &Float::new(prec), &mpf(prec, cutoff(sys, m)), 1, &quad_opts(sys))?;
    Ok((v[0].to_f64(), k_mp(sys, m, &xf, &zf).to_f64()))
}

/// External-source kernel `K^ext_{2n}` assembled from the even system
/// `(W, gamma = 1)` and the odd system `(|x| W, gamma = -1)`.
#[derive(Clone, Debug)]
pub struct ExtKernel {
    pub n: usize,
    pub even: BiorthSystem,
    pub odd: BiorthSystem,
}

impl ExtKernel {
    /// Both systems at the parameters of `base`; its `alpha, gamma` are
    /// overridden by the two weight choices.
    pub fn new(n: usize, base: ModelParams) -> Result<Self> {
        Self::with_bits(n, base, None)
    }

    pub fn with_bits(n: usize, base: ModelParams, bits: Option<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        let even_p = ModelParams { gamma: 1.0, ..base };
        let even = BiorthSystem::build_with_bits(even_p, n, bits)?;
        let odd = BiorthSystem::build_with_bits(even_p.odd(), n, bits)?;
        Ok(ExtKernel { n, even, odd })
    }

    fn eval_mp(&self, x: &Float, y: &Float) -> Float {
        let half = khat_mp(&self.even, self.n, x, y) / 2u32;
        let ratio = Float::with_val(self.even.prec(), y / x) / 2u32;
        let odd = khat_mp(&self.odd, self.n, &Float::with_val(self.odd.prec(), x), &Float::with_val(self.odd.prec(), y));
        half + Float::with_val(self.even.prec(), odd * ratio)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if x == 0.0 {
            return Err(Error::Domain("external-source kernel is singular at x = 0 (y/2x factor)".into()));
        }
        let p = self.even.prec().max(self.odd.prec());
        finite(self.eval_mp(&mpf(p, x), &mpf(p, y)).to_f64(), "external kernel")
    }

    /// `\int K^ext(x, x) dx` by direct quadrature of the diagonal.
    pub fn trace(&self) -> Result<f64> {
        let prec = self.even.prec().max(self.odd.prec());
        let f = |x: &Float| {
            let mx = Float::with_val(prec, -x);
            vec![self.eval_mp(x, x) + self.eval_mp(&mx, &mx)]
        };
        let top = cutoff(&self.even, self.n).max(cutoff(&self.odd, self.n));
        let opt = MpTsOptions { prec, ..quad_opts(&self.even) };
        let (v, _) = mp_tanh_sinh(&f, &Float::new(prec), &mpf(prec, top), 1, &opt)?;
        Ok(v[0].to_f64())
    }
}

pub fn kernel_ext(n: usize, x: f64, y: f64, base: ModelParams) -> Result<f64> {
    ExtKernel::new(n, base)?.eval(x, y)
}

/// One CSV row of the cross-check table.
#[derive(Clone, Debug, Serialize)]
#[allow(non_snake_case)]
pub struct KernelRow {
    pub x: f64,
    pub y: f64,
    pub K_direct: f64,
    pub K_cd: f64,
    pub K_matrix: f64,
    pub abs_diff_cd: f64,
    pub abs_diff_matrix: f64,
}

/// Evaluate the three routes at each point; `NaN` marks a route that does
/// not apply at that point (e.g. the matrix form on the diagonal).
pub fn cross_check(sys: &BiorthSystem, m: usize, points: &[(f64, f64)]) -> Result<Vec<KernelRow>> {
    use rayon::prelude::*;
    points
        .par_iter()
        .map(|&(x, y)| {
            let d = kernel_Khat(sys, m, x, y)?;
            let cd = kernel_cd(sys, m, x, y).unwrap_or(f64::NAN);
            let mat = kernel_matrix_rhp(sys, m, x, y).unwrap_or(f64::NAN);
            Ok(KernelRow { x, y, K_direct: d, K_cd: cd, K_matrix: mat, abs_diff_cd: (cd - d).abs(), abs_diff_matrix: (mat - d).abs() })
        })
        .collect()
}

/// Evaluate a request against prepared systems. `ext` is required for the
/// external variant.
pub fn evaluate(req: &KernelRequest, sys: &BiorthSystem, ext: Option<&ExtKernel>) -> Result<Vec<f64>> {
    req.points
        .iter()
        .map(|&(x, y)| match req.variant {
            KernelVariant::Plain => kernel_K(sys, req.m, x, y),
            KernelVariant::Symmetrized => kernel_Khat(sys, req.m, x, y),
            KernelVariant::External => ext
                .ok_or_else(|| Error::Config("external variant needs both weight systems".into()))?
                .eval(x, y),
        })
        .collect()
}
