//! Multiprecision scalars on top of MPFR.
//!
//! Real arithmetic is `rug::Float`. The system MPFR ships without MPC, so the
//! few places that need complex multiprecision use [`MpComplex`], a plain
//! (re, im) pair with just the operations this crate needs.

use num_complex::Complex64;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use std::ops::{Add, Mul, Neg, Sub};

/// Float from an f64 at the given precision.
pub fn mpf(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

pub fn mp_pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `x^alpha` for `x > 0`; returns 0 at `x = 0` when `alpha > 0` and 1 when `alpha == 0`.
pub fn mp_powf(x: &Float, alpha: f64) -> Float {
    let prec = x.prec();
    if alpha == 0.0 {
        return Float::with_val(prec, 1);
    }
    if x.is_zero() {
        return Float::with_val(prec, 0);
    }
    let a = Float::with_val(prec, alpha);
    Float::with_val(prec, x.pow(&a))
}

/// Horner evaluation of a real polynomial with coefficients in increasing degree.
pub fn horner(coeffs: &[Float], x: &Float) -> Float {
    let prec = x.prec();
    let mut acc = Float::with_val(prec, 0);
    for c in coeffs.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

/// Horner evaluation at a complex argument.
pub fn horner_c(coeffs: &[Float], z: &MpComplex) -> MpComplex {
    let prec = z.prec();
    let mut acc = MpComplex::zero(prec);
    for c in coeffs.iter().rev() {
        acc = &acc * z;
        acc.re += c;
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct MpComplex {
    pub re: Float,
    pub im: Float,
}

impl MpComplex {
    pub fn zero(prec: u32) -> Self {
        MpComplex { re: Float::new(prec), im: Float::new(prec) }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        MpComplex { re: mpf(prec, re), im: mpf(prec, im) }
    }

    pub fn from_c64(prec: u32, z: Complex64) -> Self {
        Self::from_f64(prec, z.re, z.im)
    }

    pub fn real(x: Float) -> Self {
        let prec = x.prec();
        MpComplex { re: x, im: Float::new(prec) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        let mut r = Float::with_val(p, self.re.square_ref());
        r += Float::with_val(p, self.im.square_ref());
        r
    }

    pub fn abs(&self) -> Float {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec();
        MpComplex { re: Float::with_val(p, &self.re * s), im: Float::with_val(p, &self.im * s) }
    }

    pub fn mul_i(&self) -> Self {
        MpComplex { re: -self.im.clone(), im: self.re.clone() }
    }

    pub fn conj(&self) -> Self {
        MpComplex { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        let p = self.prec();
        MpComplex { re: Float::with_val(p, &self.re / &d), im: -Float::with_val(p, &self.im / &d) }
    }

    pub fn div(&self, o: &MpComplex) -> Self {
        self * &o.recip()
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(Float::new(p));
        MpComplex { re: Float::with_val(p, &m * &c), im: Float::with_val(p, &m * &s) }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        let p = self.prec();
        let r = self.abs().ln();
        let arg = Float::with_val(p, self.im.atan2_ref(&self.re));
        MpComplex { re: r, im: arg }
    }

    /// Principal power `self^alpha` for real `alpha`.
    pub fn powf(&self, alpha: f64) -> Self {
        let p = self.prec();
        if alpha == 0.0 {
            return MpComplex::real(Float::with_val(p, 1));
        }
        if self.re.is_zero() && self.im.is_zero() {
            return MpComplex::zero(p);
        }
        self.ln().scale(&mpf(p, alpha)).exp()
    }
}

impl<'a> Add<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn add(self, o: &MpComplex) -> MpComplex {
        let p = self.prec();
        MpComplex { re: Float::with_val(p, &self.re + &o.re), im: Float::with_val(p, &self.im + &o.im) }
    }
}

impl<'a> Sub<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn sub(self, o: &MpComplex) -> MpComplex {
        let p = self.prec();
        MpComplex { re: Float::with_val(p, &self.re - &o.re), im: Float::with_val(p, &self.im - &o.im) }
    }
}

impl<'a> Mul<&'a MpComplex> for &'a MpComplex {
    type Output = MpComplex;
    fn mul(self, o: &MpComplex) -> MpComplex {
        let p = self.prec();
        let mut re = Float::with_val(p, &self.re * &o.re);
        re -= Float::with_val(p, &self.im * &o.im);
        let mut im = Float::with_val(p, &self.re * &o.im);
        im += Float::with_val(p, &self.im * &o.re);
        MpComplex { re, im }
    }
}

impl Neg for MpComplex {
    type Output = MpComplex;
    fn neg(self) -> MpComplex {
        MpComplex { re: -self.re, im: -self.im }
    }
}

/// Solve `a x = b` for a small dense complex system by Gaussian elimination
/// with partial pivoting. Returns `None` when a pivot vanishes.
pub fn solve_complex(mut a: Vec<Vec<MpComplex>>, mut b: Vec<MpComplex>) -> Option<Vec<MpComplex>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i][col].norm_sqr().partial_cmp(&a[j][col].norm_sqr()).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[piv][col].norm_sqr().is_zero() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for row in col + 1..n {
            let f = &a[row][col] * &inv;
            for k in col..n {
                let t = &f * &a[col][k];
                a[row][k] = &a[row][k] - &t;
            }
            let t = &f * &b[col];
            b[row] = &b[row] - &t;
        }
    }
    let mut x = vec![MpComplex::zero(b[0].prec()); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            let t = &a[row][k] * &x[k];
            acc = &acc - &t;
        }
        x[row] = acc.div(&a[row][row]);
    }
    Some(x)
}

/// Solve a real dense system in place by Gaussian elimination with partial
/// pivoting. `a` is row-major `n x n`. Returns `None` on an exactly zero pivot.
pub fn solve_real(mut a: Vec<Vec<Float>>, mut b: Vec<Float>) -> Option<Vec<Float>> {
    let n = b.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let prec = b[0].prec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].cmp_abs(&a[j][col]).unwrap_or(std::cmp::Ordering::Equal))?;
        if a[piv][col].is_zero() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for (r, row) in rest.iter_mut().enumerate() {
            let f = Float::with_val(prec, &row[col] / &pivot_row[col]);
            if f.is_zero() {
                continue;
            }
            for k in col..n {
                let t = Float::with_val(prec, &f * &pivot_row[k]);
                row[k] -= t;
            }
            let t = Float::with_val(prec, &f * &b[col]);
            b[col + 1 + r] -= t;
        }
    }
    let mut x: Vec<Float> = vec![Float::new(prec); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc -= Float::with_val(prec, &a[row][k] * &x[k]);
        }
        x[row] = Float::with_val(prec, &acc / &a[row][row]);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_exp_ln_round_trip() {
        let z = MpComplex::from_f64(200, 0.3, -1.7);
        let w = z.exp().ln();
        assert!((w.to_c64() - z.to_c64()).norm() < 1e-15);
    }

    #[test]
    fn powf_matches_f64() {
        let z = MpComplex::from_f64(128, 1.2, 0.4);
        let got = z.powf(0.37).to_c64();
        let want = Complex64::new(1.2, 0.4).powf(0.37);
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn real_solve_recovers_solution() {
        let p = 160;
        let a = vec![
            vec![mpf(p, 1e-3), mpf(p, 2.0), mpf(p, 3.0)],
            vec![mpf(p, 4.0), mpf(p, 5.0), mpf(p, 6.0)],
            vec![mpf(p, 7.0), mpf(p, 8.0), mpf(p, 10.0)],
        ];
        let x = [1.0, -2.0, 0.5];
        let b: Vec<Float> = a
            .iter()
            .map(|row| {
                let mut s = Float::new(p);
                for (c, xi) in row.iter().zip(x) {
                    s += Float::with_val(p, c * xi);
                }
                s
            })
            .collect();
        let sol = solve_real(a, b).unwrap();
        for (s, xi) in sol.iter().zip(x) {
            assert!((s.to_f64() - xi).abs() < 1e-30_f64.max(1e-15));
        }
    }

    #[test]
    fn complex_solve_small() {
        let p = 128;
        let c = |re, im| MpComplex::from_f64(p, re, im);
        let a = vec![vec![c(1.0, 1.0), c(0.0, 2.0)], vec![c(3.0, 0.0), c(1.0, -1.0)]];
        let x = [c(0.5, -0.25), c(-1.0, 2.0)];
        let b: Vec<MpComplex> = a.iter().map(|row| &(&row[0] * &x[0]) + &(&row[1] * &x[1])).collect();
        let sol = solve_complex(a, b).unwrap();
        for (s, xi) in sol.iter().zip(x.iter()) {
            assert!((s.to_c64() - xi.to_c64()).norm() < 1e-15);
        }
    }

    #[test]
    fn horner_evaluates() {
        let p = 100;
        let c = vec![mpf(p, 1.0), mpf(p, -2.0), mpf(p, 3.0)];
        assert_eq!(horner(&c, &mpf(p, 2.0)).to_f64(), 9.0);
        let z = horner_c(&c, &MpComplex::from_f64(p, 0.0, 1.0)).to_c64();
        assert!((z - Complex64::new(-2.0, -2.0)).norm() < 1e-15);
    }
}
