//! Derjaguin approximation, PFA surface integral, Jacobian-corrected force
//! and surface element integration.

use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Domain, HeightProfile, IntegrationPlan, TwoSurfaceConfig};
use crate::kernels::InteractionKernel;
use crate::numerics::{integrate_semi_infinite, QuadOptions, QuadratureResult};

/// Default tolerances for the proximity integrals.
pub fn default_options() -> QuadOptions {
    QuadOptions::rel(1e-10)
}

/// R₁R₂/(R₁ + R₂), the effective radius of two spheres.
pub fn effective_radius(r1: f64, r2: f64) -> Result<f64> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return invalid("radii must be positive");
    }
    Ok(if r2.is_infinite() {
        r1
    } else if r1.is_infinite() {
        r2
    } else {
        r1 * r2 / (r1 + r2)
    })
}

fn check_tail(kernel: &InteractionKernel) -> Result<()> {
    match kernel.homogeneity_exponent() {
        Some(p) if p <= 1.0 => Err(Error::NotIntegrable(format!(
            "kernel not DA-integrable: {} decays as h^-{p}, so its tail integral diverges",
            kernel.name()
        ))),
        _ => Ok(()),
    }
}

/// ∫ₐ^∞ E∥(h) dh by quadrature.
pub fn tail_integral(kernel: &InteractionKernel, a: f64, opts: &QuadOptions) -> Result<QuadratureResult> {
    if !(a > 0.0 && a.is_finite()) {
        return invalid(format!("gap must be positive, got {a}"));
    }
    check_tail(kernel)?;
    let breaks: Vec<f64> = (1..40).map(|k| a * 2f64.powi(k)).collect();
    integrate_semi_infinite(|h| kernel.energy_density(h), a, &breaks, opts)
}

/// U = 2πR_eff∫ₐ^∞ E∥(h) dh.
pub fn derjaguin_energy(a: f64, r_eff: f64, kernel: &InteractionKernel) -> Result<f64> {
    Ok(derjaguin_energy_with(a, r_eff, kernel, &default_options())?.value)
}

pub fn derjaguin_energy_with(
    a: f64,
    r_eff: f64,
    kernel: &InteractionKernel,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    if !(r_eff > 0.0 && r_eff.is_finite()) {
        return invalid(format!("effective radius must be positive, got {r_eff}"));
    }
    Ok(tail_integral(kernel, a, opts)?.scale(2.0 * PI * r_eff))
}

/// f = 2πR_eff E∥(a).
pub fn derjaguin_force(a: f64, r_eff: f64, kernel: &InteractionKernel) -> Result<f64> {
    if !(r_eff > 0.0) {
        return invalid(format!("effective radius must be positive, got {r_eff}"));
    }
    Ok(2.0 * PI * r_eff * kernel.try_energy_density(a)?)
}

/// U = ∫d²x E∥(ψ(x)) over the projected plane.
pub fn pfa_energy(profile: &HeightProfile, kernel: &InteractionKernel) -> Result<f64> {
    Ok(pfa_energy_with(profile, kernel, &default_options())?.value)
}

pub fn pfa_energy_with(
    profile: &HeightProfile,
    kernel: &InteractionKernel,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    // ψ grows like ρ² on the plane, so ∫ρ ψ^-p dρ needs p > 1.
    if profile.domain() == Domain::Plane {
        check_tail(kernel)?;
    }
    IntegrationPlan::for_profile(profile).integrate(|x| kernel.try_energy_density(profile.eval(x)), opts)
}

/// J(h) ≈ J₀ + J₁(h − a) for the area of the level set at height h.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianExpansion {
    pub j0: f64,
    pub j1: f64,
    pub a: f64,
}

impl JacobianExpansion {
    pub fn new(j0: f64, j1: f64, a: f64) -> Result<Self> {
        if !(j0 > 0.0 && j0.is_finite()) || !j1.is_finite() {
            return invalid("need J0 > 0 and finite J1");
        }
        if !(a > 0.0) {
            return invalid("reference gap must be positive");
        }
        Ok(Self { j0, j1, a })
    }

    /// The Derjaguin case J = 2πR_eff.
    pub fn derjaguin(r_eff: f64, a: f64) -> Result<Self> {
        Self::new(2.0 * PI * r_eff, 0.0, a)
    }
}

/// f = J₀E∥(a) − J₁∫ₐ^∞ E∥ dh.
pub fn jacobian_corrected_force(a: f64, jac: &JacobianExpansion, kernel: &InteractionKernel) -> Result<f64> {
    let leading = jac.j0 * kernel.try_energy_density(a)?;
    if jac.j1 == 0.0 {
        return Ok(leading);
    }
    Ok(leading - jac.j1 * tail_integral(kernel, a, &default_options())?.value)
}

/// Surface element integration for a body bounded by a near face ψ₁ and a
/// far face ψ₂ above a plane: U = ∫d²x [E∥(ψ₁) − E∥(ψ₂)].
///
/// Swapping the faces flips the sign. Faces that cross are rejected.
pub fn sei_energy(body: &TwoSurfaceConfig, kernel: &InteractionKernel) -> Result<f64> {
    Ok(sei_energy_with(body, kernel, &default_options())?.value)
}

pub fn sei_energy_with(
    body: &TwoSurfaceConfig,
    kernel: &InteractionKernel,
    opts: &QuadOptions,
) -> Result<QuadratureResult> {
    if body.psi1.domain() == Domain::Plane {
        check_tail(kernel)?;
    }
    // Orientation seen so far: +1 for ψ₂ above ψ₁, −1 below.
    let orientation = Cell::new(0i8);
    body.plan().integrate(
        |x| {
            let s = body.sample(x);
            let sign = match s.gap() {
                g if g > 0.0 => 1,
                g if g < 0.0 => -1,
                _ => 0,
            };
            if sign != 0 {
                if orientation.get() == -sign {
                    return invalid(format!("body faces cross near ({}, {})", x[0], x[1]));
                }
                orientation.set(sign);
            }
            Ok(kernel.try_energy_density(s.psi1)? - kernel.try_energy_density(s.psi2)?)
        },
        opts,
    )
}
