//! Casimir–Polder interaction of a polarizable particle with a perfectly
//! conducting surface, and its derivative-expansion curvature correction.
//!
//! Frequencies are imaginary, ω = iξ/a with the dimensionless ξ.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::numerics::{integrate_semi_infinite, QuadOptions, QuadratureResult};

/// Static curvature coefficient in the DE: U ∝ 3/8 − CURVATURE_COEFFICIENT·a(1/R₁ + 1/R₂).
pub const CURVATURE_COEFFICIENT: f64 = 13.0 / 60.0;

type AlphaFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Isotropic polarizability on the imaginary frequency axis, α(iω).
#[derive(Clone)]
pub enum PolarizabilityModel {
    Static { alpha0: f64 },
    /// α(iω) = α₀/(1 + ω²/ω₀²).
    SingleResonance { alpha0: f64, omega0: f64 },
    Custom { alpha0: f64, alpha: AlphaFn },
}

impl fmt::Debug for PolarizabilityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Static { alpha0 } => write!(f, "Static {{ alpha0: {alpha0} }}"),
            Self::SingleResonance { alpha0, omega0 } => {
                write!(f, "SingleResonance {{ alpha0: {alpha0}, omega0: {omega0} }}")
            }
            Self::Custom { alpha0, .. } => write!(f, "Custom {{ alpha0: {alpha0} }}"),
        }
    }
}

impl PolarizabilityModel {
    pub fn constant(alpha0: f64) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return invalid(format!("static polarizability must be positive, got {alpha0}"));
        }
        Ok(Self::Static { alpha0 })
    }

    pub fn single_resonance(alpha0: f64, omega0: f64) -> Result<Self> {
        Self::constant(alpha0)?;
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return invalid(format!("resonance frequency must be positive, got {omega0}"));
        }
        Ok(Self::SingleResonance { alpha0, omega0 })
    }

    /// `alpha` maps the imaginary frequency ω ≥ 0 to α(iω). α(0) is taken from it.
    pub fn custom(alpha: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let alpha0 = alpha(0.0);
        if !alpha0.is_finite() {
            return invalid("custom polarizability is not finite at zero frequency");
        }
        Ok(Self::Custom { alpha0, alpha: Arc::new(alpha) })
    }

    pub fn alpha_static(&self) -> f64 {
        match self {
            Self::Static { alpha0 } | Self::SingleResonance { alpha0, .. } | Self::Custom { alpha0, .. } => *alpha0,
        }
    }

    /// α(iω).
    pub fn alpha(&self, omega: f64) -> f64 {
        match self {
            Self::Static { alpha0 } => *alpha0,
            Self::SingleResonance { alpha0, omega0 } => alpha0 / (1.0 + (omega / omega0).powi(2)),
            Self::Custom { alpha, .. } => alpha(omega),
        }
    }

    /// α at the dimensionless frequency ξ for a particle at distance a.
    pub fn alpha_scaled(&self, xi: f64, a: f64) -> f64 {
        self.alpha(xi / a)
    }
}

/// β⁽⁰⁾(ξ) = e^(−2ξ)(1 + 2ξ + 2ξ²)/2.
pub fn beta0_kernel(xi: f64) -> f64 {
    0.5 * (-2.0 * xi).exp() * (1.0 + 2.0 * xi + 2.0 * xi * xi)
}

fn options() -> QuadOptions {
    QuadOptions::rel(1e-12)
}

fn check_gap(a: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) {
        return invalid(format!("distance must be positive, got {a}"));
    }
    Ok(())
}

fn xi_breaks() -> Vec<f64> {
    (0..8).map(|k| 0.5 * 2f64.powi(k)).collect()
}

/// U = −(1/a⁴)∫dξ/(2π) α(iξ/a) β⁽⁰⁾(ξ).
pub fn cp_plane(a: f64, model: &PolarizabilityModel) -> Result<f64> {
    Ok(cp_plane_with(a, model, &options())?.value)
}

pub fn cp_plane_with(a: f64, model: &PolarizabilityModel, opts: &QuadOptions) -> Result<QuadratureResult> {
    check_gap(a)?;
    let r = integrate_semi_infinite(|xi| model.alpha_scaled(xi, a) * beta0_kernel(xi), 0.0, &xi_breaks(), opts)?;
    Ok(r.scale(-1.0 / (2.0 * PI * a.powi(4))))
}

/// Static-polarizability DE: −(α₀/(πa⁴))[3/8 − (13/60)a(1/R₁ + 1/R₂)].
///
/// Radii are positive for a surface curving away from the particle; pass
/// infinity for a flat direction.
pub fn cp_de_static(a: f64, r1: f64, r2: f64, alpha_static: f64) -> Result<f64> {
    check_gap(a)?;
    if !(r1 > 0.0 && r2 > 0.0) {
        return invalid("curvature radii must be positive");
    }
    let curvature = 1.0 / r1 + 1.0 / r2;
    Ok(-alpha_static / (PI * a.powi(4)) * (0.375 - CURVATURE_COEFFICIENT * a * curvature))
}

/// U = −(1/a⁴)∫dξ/(2π) α(iξ/a)[β⁽⁰⁾(ξ) + β⁽¹⁾(ξ)a∇²ψ], with ∇²ψ = `curvature_sum`.
pub fn cp_de_general(
    a: f64,
    curvature_sum: f64,
    model: &PolarizabilityModel,
    beta1_kernel: impl Fn(f64) -> f64,
) -> Result<f64> {
    check_gap(a)?;
    if !curvature_sum.is_finite() {
        return invalid("curvature sum must be finite");
    }
    let leading = cp_plane(a, model)?;
    if curvature_sum == 0.0 {
        return Ok(leading);
    }
    let r = integrate_semi_infinite(|xi| model.alpha_scaled(xi, a) * beta1_kernel(xi), 0.0, &xi_breaks(), &options())?;
    Ok(leading - a * curvature_sum * r.value / (2.0 * PI * a.powi(4)))
}
