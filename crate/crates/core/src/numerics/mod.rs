//! Special functions, quadrature, Fourier tools and tabulated complex functions.

mod fourier;
mod quad;
mod special;
mod table;

pub use fourier::{fourier_coeffs_periodic, fourier_transform_transient, PeriodicCoefficients};
pub use quad::{
    integrate, integrate_with_breaks, panel_breaks, quad_damped, quad_damped_with, QuadOptions,
    QuadResult,
};
pub use special::{bessel_i, laguerre};
pub use table::{ComplexTable, Extrapolation};
