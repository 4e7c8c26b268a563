//! Airy function in multiprecision and the 2x2 Airy parametrix.

use crate::error::{Error, Result};
use crate::numerics::mp::{mpf, MpComplex};
use num_complex::Complex64;
use rug::ops::Pow;
use rug::Float;
use std::f64::consts::PI;

pub type Mat2 = [[Complex64; 2]; 2];

/// Working precision for the Maclaurin series at `|z|`: the terms peak near
/// `exp((2/3)|z|^{3/2})` and the result can be as small as its reciprocal.
fn series_bits(z: Complex64) -> u32 {
    let growth = (2.0 / 3.0) * z.norm().powf(1.5) / std::f64::consts::LN_2;
    (80.0 + 2.0 * growth) as u32
}

/// `(Ai(z), Ai'(z))` from the Maclaurin series, summed at a precision high
/// enough to absorb the cancellation at large `|z|`.
pub fn airy_ai(z: Complex64) -> (Complex64, Complex64) {
    let prec = series_bits(z);
    let zz = MpComplex::from_c64(prec, z);
    let z2 = &zz * &zz;
    let z3 = &z2 * &zz;
    let one = MpComplex::from_f64(prec, 1.0, 0.0);

    // Ai = c1 f - c2 g with f, g the two power series solutions.
    let mut f = one.clone();
    let mut g = zz.clone();
    let mut fp = MpComplex::zero(prec);
    let mut gp = one.clone();
    let mut a = one.clone();
    let mut b = zz.clone();
    let mut d = z2.scale(&mpf(prec, 0.5));
    fp = &fp + &d;
    let mut e = one;
    let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32) - 4));
    let big_k = (z.norm().powf(1.5) as usize) + 8;
    for k in 0..100_000usize {
        let kf = k as u32;
        let inv = |p: u32, q: u32| Float::with_val(prec, Float::with_val(prec, 1) / Float::with_val(prec, p as u64 * q as u64));
        a = (&a * &z3).scale(&inv(3 * kf + 2, 3 * kf + 3));
        b = (&b * &z3).scale(&inv(3 * kf + 3, 3 * kf + 4));
        e = (&e * &z3).scale(&inv(3 * kf + 1, 3 * kf + 3));
        f = &f + &a;
        g = &g + &b;
        gp = &gp + &e;
        if k >= 1 {
            d = (&d * &z3).scale(&inv(3 * kf, 3 * kf + 2));
            fp = &fp + &d;
        }
        if k > big_k {
            let m = a.abs() + b.abs() + e.abs() + d.abs();
            let s = f.abs() + g.abs() + gp.abs() + fp.abs();
            if m <= Float::with_val(prec, &s * &tiny) {
                break;
            }
        }
    }
    let two_thirds = Float::with_val(prec, 2) / 3u32;
    let one_third = Float::with_val(prec, 1) / 3u32;
    let three = mpf(prec, 3.0);
    let c1 = Float::with_val(prec, three.clone().pow(-two_thirds.clone())) / two_thirds.gamma();
    let c2 = Float::with_val(prec, three.pow(-one_third.clone())) / one_third.gamma();
    let ai = &f.scale(&c1) - &g.scale(&c2);
    let aip = &fp.scale(&c1) - &gp.scale(&c2);
    (ai.to_c64(), aip.to_c64())
}

/// Which value to return on the jump contour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Off the contour only; on the contour this is an error.
    Interior,
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sector {
    UpperRight,
    UpperLeft,
    LowerLeft,
    LowerRight,
}

const RAY_TOL: f64 = 1e-12;

fn classify(zeta: Complex64, side: Side) -> Result<Sector> {
    if zeta.norm() == 0.0 {
        return Err(Error::Domain("the Airy parametrix is not defined at the origin".into()));
    }
    let th = zeta.arg();
    let near = |r: f64| (th - r).abs() < RAY_TOL;
    let on = |plus: Sector, minus: Sector| match side {
        Side::Interior => Err(Error::Domain(format!("zeta = {zeta} lies on the jump contour; request the + or - side"))),
        Side::Plus => Ok(plus),
        Side::Minus => Ok(minus),
    };
    let t = 2.0 * PI / 3.0;
    if near(0.0) {
        return on(Sector::UpperRight, Sector::LowerRight);
    }
    if near(t) {
        return on(Sector::UpperRight, Sector::UpperLeft);
    }
    if near(PI) || near(-PI) {
        return on(Sector::UpperLeft, Sector::LowerLeft);
    }
    if near(-t) {
        return on(Sector::LowerLeft, Sector::LowerRight);
    }
    Ok(if th > 0.0 && th < t {
        Sector::UpperRight
    } else if th > t {
        Sector::UpperLeft
    } else if th < -t {
        Sector::LowerLeft
    } else {
        Sector::LowerRight
    })
}

/// The sector-wise Airy parametrix. Each sector formula is entire, so
/// boundary values are the adjacent sector's formula at the same point.
pub fn airy_parametrix(zeta: Complex64, side: Side) -> Result<Mat2> {
    let sector = classify(zeta, side)?;
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let w2 = w * w;
    let c = (2.0 * PI).sqrt() * Complex64::from_polar(1.0, -PI / 4.0);
    let y0 = || {
        let (a, ap) = airy_ai(zeta);
        (c * a, c * ap)
    };
    let y1 = || {
        let (a, ap) = airy_ai(w * zeta);
        (c * w * a, c * w2 * ap)
    };
    let y2 = || {
        let (a, ap) = airy_ai(w2 * zeta);
        (c * w2 * a, c * w * ap)
    };
    Ok(match sector {
        Sector::UpperRight => {
            let (a, ap) = y0();
            let (b, bp) = y2();
            [[a, -b], [ap, -bp]]
        }
        Sector::UpperLeft => {
            let (a, ap) = y1();
            let (b, bp) = y2();
            [[-a, -b], [-ap, -bp]]
        }
        Sector::LowerLeft => {
            let (a, ap) = y2();
            let (b, bp) = y1();
            [[-a, b], [-ap, bp]]
        }
        Sector::LowerRight => {
            let (a, ap) = y0();
            let (b, bp) = y1();
            [[a, b], [ap, bp]]
        }
    })
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut r = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

pub fn det(a: &Mat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn inverse(a: &Mat2) -> Mat2 {
    let d = det(a);
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

/// Max entrywise modulus of `a - b`.
pub fn max_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// The jump matrix on the ray with argument `arg` (one of 0, +-2pi/3, pi).
pub fn jump_matrix(arg: f64) -> Result<Mat2> {
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let near = |r: f64| (arg - r).abs() < RAY_TOL;
    if near(0.0) {
        Ok([[o, o], [z, o]])
    } else if near(2.0 * PI / 3.0) || near(-2.0 * PI / 3.0) {
        Ok([[o, z], [o, o]])
    } else if near(PI) {
        Ok([[z, o], [-o, z]])
    } else {
        Err(Error::Domain(format!("no jump ray at argument {arg}")))
    }
}

/// `Psi_inf(zeta) = zeta^{-sigma3/4} (1/sqrt 2) [[1,1],[-1,1]] e^{-i pi sigma3/4}`, principal branch.
pub fn psi_infinity(zeta: Complex64) -> Mat2 {
    let q = zeta.powf(-0.25);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let em = Complex64::from_polar(1.0, -PI / 4.0);
    let ep = Complex64::from_polar(1.0, PI / 4.0);
    [[q * s * em, q * s * ep], [-s * em / q, s * ep / q]]
}

/// Deviation of `Psi(zeta) e^{(2/3) zeta^{3/2} sigma3} Psi_inf(zeta)^{-1}` from the identity.
pub fn normalization_defect(zeta: Complex64) -> Result<f64> {
    let psi = airy_parametrix(zeta, Side::Interior)?;
    let th = (2.0 / 3.0) * zeta.powf(1.5);
    let e: Mat2 = [[th.exp(), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), (-th).exp()]];
    let m = mat_mul(&mat_mul(&psi, &e), &inverse(&psi_infinity(zeta)));
    let id = [[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]];
    Ok(max_diff(&m, &id))
}

/// Same quantity with the correction sandwiched the other way,
/// `Psi_inf^{-1} Psi e^{(2/3) zeta^{3/2} sigma3} - I = O(zeta^{-3/2})`.
pub fn normalization_defect_inner(zeta: Complex64) -> Result<f64> {
    let psi = airy_parametrix(zeta, Side::Interior)?;
    let th = (2.0 / 3.0) * zeta.powf(1.5);
    let e: Mat2 = [[th.exp(), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), (-th).exp()]];
    let m = mat_mul(&inverse(&psi_infinity(zeta)), &mat_mul(&psi, &e));
    let id = [[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]];
    Ok(max_diff(&m, &id))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airy_reference_values() {
        // Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3)
        let (a, ap) = airy_ai(Complex64::new(0.0, 0.0));
        assert!((a.re - 0.355_028_053_887_817_2).abs() < 1e-15);
        assert!((ap.re + 0.258_819_403_792_806_8).abs() < 1e-15);
        // Ai(1) and Ai(-2)
        let (a1, _) = airy_ai(Complex64::new(1.0, 0.0));
        assert!((a1.re - 0.135_292_416_312_881_4).abs() < 1e-15);
        let (am, _) = airy_ai(Complex64::new(-2.0, 0.0));
        assert!((am.re - 0.227_407_428_201_685_8).abs() < 1e-15);
    }

    #[test]
    fn airy_small_at_large_positive_argument() {
        // Ai(10) = 1.104753255289868e-10
        let (a, _) = airy_ai(Complex64::new(10.0, 0.0));
        assert!((a.re / 1.104_753_255_289_869e-10 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn airy_ode() {
        let z = Complex64::new(0.7, -1.3);
        let h = 1e-4;
        let (_, p1) = airy_ai(z + h);
        let (_, p0) = airy_ai(z - h);
        let (a, _) = airy_ai(z);
        let app = (p1 - p0) / (2.0 * h);
        assert!((app - z * a).norm() < 1e-7);
    }

    #[test]
    fn unit_determinant() {
        for z in [Complex64::new(1.0, 1.0), Complex64::new(-2.0, 0.5), Complex64::new(-0.3, -3.0), Complex64::new(2.0, -0.1)] {
            let d = det(&airy_parametrix(z, Side::Interior).unwrap());
            assert!((d - 1.0).norm() < 1e-12, "det at {z}: {d}");
        }
    }

    #[test]
    fn on_contour_needs_side() {
        assert!(airy_parametrix(Complex64::new(2.0, 0.0), Side::Interior).is_err());
        assert!(airy_parametrix(Complex64::new(2.0, 0.0), Side::Plus).is_ok());
    }

    #[test]
    fn jump_on_positive_axis() {
        let z = Complex64::new(2.0, 0.0);
        let p = airy_parametrix(z, Side::Plus).unwrap();
        let m = airy_parametrix(z, Side::Minus).unwrap();
        let j = jump_matrix(0.0).unwrap();
        assert!(max_diff(&p, &mat_mul(&m, &j)) < 1e-12);
    }
}
