//! Quadrature, series summation, least squares and interpolation.

pub mod fit;
pub mod quadrature;
pub mod series;
pub mod special;
pub mod spline;

pub use fit::{fit_small_k, least_squares, log_space, LinearFit, SmallKBasis, SmallKFit};
pub use quadrature::{
    fixed_gauss, gauss_legendre, geometric_breaks, integrate, integrate_adaptive, integrate_piecewise,
    integrate_semi_infinite, integrate_to_cutoff, QuadOptions, QuadratureResult,
};
pub use series::{matsubara_sum, sum_series, SeriesOptions, SeriesResult};
pub use spline::CubicSpline;

/// Symmetric numerical derivative with step `h`.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
