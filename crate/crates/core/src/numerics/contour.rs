//! Integration along rays `s = e^{i angle} t` in the complex plane.

use crate::error::{Error, Result};
use crate::numerics::quad::{tanh_sinh, truncation_radius};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    TowardOrigin,
    AwayFromOrigin,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourRay {
    pub angle: f64,
    pub orientation: Orientation,
    pub truncation: f64,
}

impl ContourRay {
    pub fn new(angle: f64, orientation: Orientation, truncation: f64) -> Result<Self> {
        if !(angle > -PI && angle <= PI) {
            return Err(Error::Domain(format!("ray angle {angle} outside (-pi, pi]")));
        }
        if !(truncation > 0.0) {
            return Err(Error::Domain(format!("ray truncation must be positive, got {truncation}")));
        }
        Ok(ContourRay { angle, orientation, truncation })
    }

    /// Ray whose truncation is the radius where `|f|` has dropped below
    /// `tol * e^-10` and is still decreasing.
    pub fn fitted(angle: f64, orientation: Orientation, f: impl Fn(Complex64) -> Complex64, tol: f64) -> Result<Self> {
        let dir = Complex64::from_polar(1.0, angle);
        let t = truncation_radius(|t| f(dir * t).norm().ln(), 1.0, tol.ln() - 10.0)?;
        ContourRay::new(angle, orientation, t)
    }

    pub fn direction(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    fn sign(&self) -> f64 {
        match self.orientation {
            Orientation::AwayFromOrigin => 1.0,
            Orientation::TowardOrigin => -1.0,
        }
    }
}

/// Oriented integral of `f` along the ray, truncated at `ray.truncation`.
/// `tol` is the absolute target for the error estimate.
pub fn integrate_ray(f: impl Fn(Complex64) -> Complex64, ray: &ContourRay, tol: f64) -> Result<(Complex64, f64)> {
    let dir = ray.direction();
    let big_t = ray.truncation;
    let tail_far = f(dir * big_t).norm();
    let tail_mid = f(dir * (0.75 * big_t)).norm();
    if tail_far.is_nan() || (tail_far >= tail_mid && tail_far > tol) {
        return Err(Error::Numerical(format!(
            "integrand does not decay along arg s = {}: |f| = {tail_mid:e} at 0.75T, {tail_far:e} at T",
            ray.angle
        )));
    }
    let (v, err, _) = tanh_sinh(|t| f(dir * t) * dir, 0.0, big_t, tol, 12)?;
    Ok((v * ray.sign(), err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::gl_panels;
    use rug::Float;

    #[test]
    fn quartic_on_diagonal_ray() {
        let g = Float::with_val(128, 0.25).gamma().to_f64();
        let want = Complex64::from_polar(1.0, PI / 4.0) * (2f64.powf(-0.5) * g / 2.0);
        let f = |s: Complex64| (s.powi(4) / 4.0).exp();
        let ray = ContourRay::fitted(PI / 4.0, Orientation::AwayFromOrigin, f, 1e-15).unwrap();
        let (v, _) = integrate_ray(f, &ray, 1e-14).unwrap();
        assert!((v - want).norm() < 1e-13);
    }

    #[test]
    fn zero_integrand() {
        let ray = ContourRay::new(0.3, Orientation::TowardOrigin, 4.0).unwrap();
        let (v, _) = integrate_ray(|_| Complex64::new(0.0, 0.0), &ray, 1e-14).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn matches_gauss_legendre_panels() {
        let f = |s: Complex64| (s.powi(4) / 4.0 + Complex64::i() * s).exp();
        let ray = ContourRay::fitted(3.0 * PI / 4.0, Orientation::AwayFromOrigin, f, 1e-15).unwrap();
        let (v, err) = integrate_ray(f, &ray, 1e-14).unwrap();
        let dir = ray.direction();
        let gl = gl_panels(|t| f(dir * t) * dir, 0.0, ray.truncation, 24, 20);
        assert!((v - gl).norm() < 10.0 * err.max(1e-14), "{v} vs {gl}");
    }

    #[test]
    fn growth_is_flagged() {
        let ray = ContourRay::new(0.0, Orientation::AwayFromOrigin, 5.0).unwrap();
        assert!(integrate_ray(|s: Complex64| (s.powi(4) / 4.0).exp(), &ray, 1e-12).is_err());
    }

    #[test]
    fn orientation_flips_sign() {
        let f = |s: Complex64| (-s * s).exp();
        let out = ContourRay::new(0.0, Orientation::AwayFromOrigin, 8.0).unwrap();
        let inn = ContourRay::new(0.0, Orientation::TowardOrigin, 8.0).unwrap();
        let (a, _) = integrate_ray(f, &out, 1e-14).unwrap();
        let (b, _) = integrate_ray(f, &inn, 1e-14).unwrap();
        assert!((a + b).norm() < 1e-15);
        assert!((a.re - PI.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn angle_range_enforced() {
        assert!(ContourRay::new(-PI, Orientation::AwayFromOrigin, 1.0).is_err());
        assert!(ContourRay::new(PI, Orientation::AwayFromOrigin, 1.0).is_ok());
        assert!(ContourRay::new(0.0, Orientation::AwayFromOrigin, 0.0).is_err());
    }
}
