//! Scalars, quadrature, contour rays and the Airy parametrix.

pub mod airy;
pub mod contour;
pub mod mp;
pub mod quad;

pub use contour::{integrate_ray, ContourRay, Orientation};
pub use mp::MpComplex;
pub use quad::{integrate_halfline, PrecisionPolicy};
