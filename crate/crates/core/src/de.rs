//! Derivative expansion for one and two surfaces, β extraction from exact
//! energies, and closed-form results for spheres and cylinders.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{HeightProfile, IntegrationPlan, TwoSurfaceConfig};
use crate::kernels::{DECoefficients, InteractionKernel};
use crate::numerics::{least_squares, log_space, LinearFit, QuadOptions};
use crate::proximity::{default_options, pfa_energy_with};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DEResult {
    pub pfa_term: f64,
    pub gradient_term: f64,
    pub total: f64,
    pub beta_used: DECoefficients,
    pub error_estimate: f64,
}

impl DEResult {
    fn new(pfa_term: f64, gradient_term: f64, beta_used: DECoefficients, error_estimate: f64) -> Self {
        Self {
            pfa_term,
            gradient_term,
            total: pfa_term + gradient_term,
            beta_used,
            error_estimate,
        }
    }
}

fn check_applicable(kernel: &InteractionKernel) -> Result<()> {
    if !kernel.validity().zero_temperature {
        return Err(Error::DeInapplicable(format!(
            "{}: the derivative expansion does not apply",
            kernel.name()
        )));
    }
    Ok(())
}

/// ∫E∥(ψ)|∇ψ|², the gradient term per unit β.
pub fn gradient_integral(profile: &HeightProfile, kernel: &InteractionKernel, opts: &QuadOptions) -> Result<(f64, f64)> {
    let r = IntegrationPlan::for_profile(profile).integrate(
        |x| {
            let (psi, g) = profile.eval_grad(x);
            let g2 = g[0] * g[0] + g[1] * g[1];
            if g2 == 0.0 {
                return Ok(0.0);
            }
            Ok(kernel.try_energy_density(psi)? * g2)
        },
        opts,
    )?;
    Ok((r.value, r.error_estimate))
}

/// U = ∫E∥(ψ)(1 + β|∇ψ|²) for a surface facing a plane.
pub fn de_energy(profile: &HeightProfile, kernel: &InteractionKernel, beta: f64) -> Result<DEResult> {
    de_energy_with(profile, kernel, beta, &default_options())
}

pub fn de_energy_with(
    profile: &HeightProfile,
    kernel: &InteractionKernel,
    beta: f64,
    opts: &QuadOptions,
) -> Result<DEResult> {
    check_applicable(kernel)?;
    if !beta.is_finite() {
        return invalid("beta must be finite");
    }
    let pfa = pfa_energy_with(profile, kernel, opts)?;
    let (g, g_err) = gradient_integral(profile, kernel, opts)?;
    let coeffs = match kernel.homogeneity_exponent() {
        Some(p) => DECoefficients::identical(beta, p),
        None => DECoefficients::new(beta, beta, 0.0),
    };
    Ok(DEResult::new(
        pfa.value,
        beta * g,
        coeffs,
        pfa.error_estimate + beta.abs() * g_err,
    ))
}

/// U = ∫E∥(ψ₂ − ψ₁)[1 + β₁|∇ψ₁|² + β₂|∇ψ₂|² + β_×∇ψ₁·∇ψ₂].
pub fn de_energy_two_surfaces(
    config: &TwoSurfaceConfig,
    kernel: &InteractionKernel,
    coeffs: &DECoefficients,
) -> Result<DEResult> {
    de_energy_two_surfaces_with(config, kernel, coeffs, &default_options())
}

pub fn de_energy_two_surfaces_with(
    config: &TwoSurfaceConfig,
    kernel: &InteractionKernel,
    coeffs: &DECoefficients,
    opts: &QuadOptions,
) -> Result<DEResult> {
    check_applicable(kernel)?;
    if coeffs.beta_minus != 0.0 {
        return invalid("only coefficient sets with beta_minus = 0 are supported");
    }
    let plan = config.plan();
    let pfa = plan.integrate(|x| kernel.try_energy_density(config.gap(x)), opts)?;
    let grad = plan.integrate(
        |x| {
            let s = config.sample(x);
            let (g1, g2) = (s.grad1, s.grad2);
            let w = coeffs.beta1 * (g1[0] * g1[0] + g1[1] * g1[1])
                + coeffs.beta2 * (g2[0] * g2[0] + g2[1] * g2[1])
                + coeffs.beta_cross * (g1[0] * g2[0] + g1[1] * g2[1]);
            if w == 0.0 {
                return Ok(0.0);
            }
            Ok(kernel.try_energy_density(s.gap())? * w)
        },
        opts,
    )?;
    Ok(DEResult::new(
        pfa.value,
        grad.value,
        *coeffs,
        pfa.error_estimate + grad.error_estimate,
    ))
}

/// A term ε^p or ε^p·ln ε in an asymptotic fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AsymptoticTerm {
    Pow(f64),
    PowLog(f64),
}

impl AsymptoticTerm {
    pub fn eval(&self, eps: f64) -> f64 {
        match *self {
            Self::Pow(p) => eps.powf(p),
            Self::PowLog(p) => eps.powf(p) * eps.ln(),
        }
    }
}

/// Least-squares fit of `ys` against the given terms, each divided by `weights`.
fn fit_terms(eps: &[f64], ys: &[f64], terms: &[AsymptoticTerm], weights: Option<&[f64]>) -> Result<LinearFit> {
    let n = eps.len();
    let design = DMatrix::from_fn(n, terms.len(), |i, j| {
        let w = weights.map_or(1.0, |w| w[i]);
        terms[j].eval(eps[i]) / w
    });
    least_squares(&design, &DVector::from_column_slice(ys))
}

/// Sampling of a one-parameter family in ε = a/R.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub eps_min: f64,
    pub eps_max: f64,
    pub samples: usize,
    /// Fits whose residual exceeds this fraction of the data norm fail.
    pub residual_threshold: f64,
    pub quad: QuadOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            eps_min: 1e-4,
            eps_max: 1e-2,
            samples: 8,
            residual_threshold: 1e-3,
            quad: QuadOptions::rel(1e-11),
        }
    }
}

impl FitOptions {
    fn grid(&self) -> Result<Vec<f64>> {
        if !(self.eps_min > 0.0 && self.eps_max > self.eps_min) {
            return invalid("need 0 < eps_min < eps_max");
        }
        Ok(log_space(self.eps_min, self.eps_max, self.samples))
    }

    fn check_residual(&self, estimate: f64, fit: &LinearFit, ys: &[f64]) -> Result<()> {
        let norm = ys.iter().map(|y| y * y).sum::<f64>().sqrt();
        let threshold = self.residual_threshold * norm;
        if fit.residual > threshold && fit.residual > 1e-300 {
            return Err(Error::PoorFit {
                estimate,
                residual: fit.residual,
                threshold,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub value: f64,
    pub std_error: f64,
    pub residual: f64,
    pub coefficients: Vec<f64>,
}

/// Fit energy(ε) over the sampling grid and return the part carried by
/// `leading`, evaluated at `eps0`. The `nuisance` terms absorb
/// contributions such as those of a truncated domain.
pub fn universal_part<F>(
    energy: F,
    eps0: f64,
    leading: &[AsymptoticTerm],
    nuisance: &[AsymptoticTerm],
    opts: &FitOptions,
) -> Result<AsymptoticFit>
where
    F: Fn(f64) -> Result<f64>,
{
    let eps = opts.grid()?;
    let ys = eps.iter().map(|&e| energy(e)).collect::<Result<Vec<_>>>()?;
    let terms: Vec<AsymptoticTerm> = leading.iter().chain(nuisance).copied().collect();
    let fit = fit_terms(&eps, &ys, &terms, None)?;
    let value: f64 = leading
        .iter()
        .zip(&fit.coefficients)
        .map(|(t, c)| c * t.eval(eps0))
        .sum();
    let std_error = leading
        .iter()
        .zip(&fit.std_errors)
        .map(|(t, s)| (s * t.eval(eps0)).powi(2))
        .sum::<f64>()
        .sqrt();
    opts.check_residual(value, &fit, &ys)?;
    Ok(AsymptoticFit {
        value,
        std_error,
        residual: fit.residual,
        coefficients: fit.coefficients,
    })
}

/// Terms of the cylinder–plane energy that survive an unbounded profile.
pub const CYLINDER_UNIVERSAL: [AsymptoticTerm; 3] = [
    AsymptoticTerm::Pow(-0.5),
    AsymptoticTerm::Pow(0.5),
    AsymptoticTerm::Pow(1.5),
];

/// Analytic-in-ε contributions from the ends of a truncated cylinder profile.
pub const CYLINDER_TRUNCATION: [AsymptoticTerm; 3] = [
    AsymptoticTerm::Pow(0.0),
    AsymptoticTerm::Pow(1.0),
    AsymptoticTerm::Pow(2.0),
];

/// Slope s of energy/leading = 1 + sε + … from a fit of (ratio − 1)/ε
/// against {1, ε, ε ln ε, ε² ln ε}.
pub fn ntlo_slope<F, G>(energy: F, leading: G, opts: &FitOptions) -> Result<AsymptoticFit>
where
    F: Fn(f64) -> Result<f64>,
    G: Fn(f64) -> f64,
{
    let eps = opts.grid()?;
    let ys = eps
        .iter()
        .map(|&e| Ok((energy(e)? / leading(e) - 1.0) / e))
        .collect::<Result<Vec<_>>>()?;
    let terms = [
        AsymptoticTerm::Pow(0.0),
        AsymptoticTerm::Pow(1.0),
        AsymptoticTerm::PowLog(1.0),
        AsymptoticTerm::PowLog(2.0),
    ];
    let fit = fit_terms(&eps, &ys, &terms, None)?;
    opts.check_residual(fit.coefficients[0], &fit, &ys)?;
    Ok(AsymptoticFit {
        value: fit.coefficients[0],
        std_error: fit.std_errors[0],
        residual: fit.residual,
        coefficients: fit.coefficients,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    pub beta: f64,
    pub std_error: f64,
    pub residual: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Extract β by matching (exact − PFA)/PFA against the DE gradient ratio
/// G/PFA across the sampled family.
///
/// `family(ε)` builds the profile at ε = a/R and `exact(ε)` the reference
/// energy. Terms ε^q/PFA for q in {0, 1, 2, 3/2} are fitted alongside β to
/// absorb truncation effects and the next order of the expansion.
pub fn extract_beta<E, P>(exact: E, kernel: &InteractionKernel, family: P, opts: &FitOptions) -> Result<BetaFit>
where
    E: Fn(f64) -> Result<f64>,
    P: Fn(f64) -> Result<HeightProfile>,
{
    check_applicable(kernel)?;
    let eps = opts.grid()?;
    let mut ys = Vec::with_capacity(eps.len());
    let mut pfas = Vec::with_capacity(eps.len());
    let mut gs = Vec::with_capacity(eps.len());
    for &e in &eps {
        let profile = family(e)?;
        let pfa = pfa_energy_with(&profile, kernel, &opts.quad)?.value;
        let (g, _) = gradient_integral(&profile, kernel, &opts.quad)?;
        ys.push((exact(e)? - pfa) / pfa);
        pfas.push(pfa);
        gs.push(g / pfa);
    }
    let nuisance = [
        AsymptoticTerm::Pow(0.0),
        AsymptoticTerm::Pow(1.0),
        AsymptoticTerm::Pow(2.0),
        AsymptoticTerm::Pow(1.5),
    ];
    let n = eps.len();
    let p = nuisance.len() + 1;
    let design = DMatrix::from_fn(n, p, |i, j| {
        if j == 0 {
            gs[i]
        } else {
            nuisance[j - 1].eval(eps[i]) / pfas[i]
        }
    });
    let fit = least_squares(&design, &DVector::from_column_slice(&ys))?;
    opts.check_residual(fit.coefficients[0], &fit, &ys)?;
    Ok(BetaFit {
        beta: fit.coefficients[0],
        std_error: fit.std_errors[0],
        residual: fit.residual,
        samples: eps.into_iter().zip(ys).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderPlaneExact {
    /// πLε₀V₀²/arccosh(1 + a/R).
    pub exact: f64,
    /// πLε₀V₀²√(R/(2a)).
    pub pfa_asymptote: f64,
    /// The asymptote times 1 + a/(12R).
    pub ntlo: f64,
}

/// Exact electrostatic energy of a cylinder at potential V₀ above a plane.
pub fn exact_cylinder_plane(a: f64, r: f64, l: f64, amplitude: f64) -> Result<CylinderPlaneExact> {
    if !(a > 0.0 && r > 0.0 && l > 0.0) {
        return invalid("a, R and L must be positive");
    }
    let eps = a / r;
    // arccosh(1 + ε) = ln(1 + ε + √(ε(2 + ε))), written to keep precision at small ε.
    let acosh = (eps + (eps * (2.0 + eps)).sqrt()).ln_1p();
    let pref = PI * l * amplitude;
    let asym = pref * (r / (2.0 * a)).sqrt();
    Ok(CylinderPlaneExact {
        exact: pref / acosh,
        pfa_asymptote: asym,
        ntlo: asym * (1.0 + eps / 12.0),
    })
}

fn check_positive(vals: &[(f64, &str)]) -> Result<()> {
    for (v, name) in vals {
        if !(*v > 0.0) {
            return invalid(format!("{name} must be positive, got {v}"));
        }
    }
    Ok(())
}

/// E = E_PFA[1 − a/(R₁+R₂) + (2β − 1)(a/R₁ + a/R₂)] with
/// E_PFA = −απ³R₁R₂/(1440a²(R₁+R₂)). R₂ may be infinite.
pub fn two_spheres_de(a: f64, r1: f64, r2: f64, alpha: f64, beta: f64) -> Result<f64> {
    check_positive(&[(a, "a"), (r1, "R1"), (r2, "R2")])?;
    let pi3 = PI * PI * PI;
    if r2.is_infinite() {
        return sphere_plane_de(a, r1, alpha, beta);
    }
    let e_pfa = -alpha * pi3 * r1 * r2 / (1440.0 * a * a * (r1 + r2));
    Ok(e_pfa * (1.0 - a / (r1 + r2) + (2.0 * beta - 1.0) * (a / r1 + a / r2)))
}

/// Sphere–plane limit: E = −απ³R/(1440a²)[1 + (2β − 1)a/R].
pub fn sphere_plane_de(a: f64, r: f64, alpha: f64, beta: f64) -> Result<f64> {
    check_positive(&[(a, "a"), (r, "R")])?;
    let e_pfa = -alpha * PI * PI * PI * r / (1440.0 * a * a);
    Ok(e_pfa * (1.0 + (2.0 * beta - 1.0) * a / r))
}

/// Sphere–plane DE for a kernel E∥ = c/hᵖ with p > 2, split into the
/// Derjaguin value, the sphere-versus-paraboloid correction −U_DA·ε/(p − 2)
/// and the gradient term 2βU_DA·ε/(p − 2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePlaneDE {
    pub derjaguin: f64,
    pub geometric_term: f64,
    pub gradient_term: f64,
    pub total: f64,
}

pub fn sphere_plane_de_kernel(a: f64, r: f64, kernel: &InteractionKernel, beta: f64) -> Result<SpherePlaneDE> {
    check_positive(&[(a, "a"), (r, "R")])?;
    check_applicable(kernel)?;
    let p = match kernel.homogeneity_exponent() {
        Some(p) if p > 2.0 => p,
        _ => {
            return invalid(format!(
                "{}: the sphere-plane closed form needs a power-law density decaying faster than h^-2",
                kernel.name()
            ))
        }
    };
    let da = crate::proximity::derjaguin_energy(a, r, kernel)?;
    let x = a / r / (p - 2.0);
    let geometric_term = -da * x;
    let gradient_term = 2.0 * beta * da * x;
    Ok(SpherePlaneDE {
        derjaguin: da,
        geometric_term,
        gradient_term,
        total: da + geometric_term + gradient_term,
    })
}

/// E = −απ³√(R₁R₂)/(1440a² sinθ)[1 + (β − 3/8)a/(R₁+R₂)].
pub fn inclined_cylinders_de(a: f64, r1: f64, r2: f64, theta: f64, alpha: f64, beta: f64) -> Result<f64> {
    check_positive(&[(a, "a"), (r1, "R1"), (r2, "R2")])?;
    let s = theta.sin();
    if !(theta > 0.0 && theta < PI) || s < 1e-12 {
        return invalid(format!("inclination must lie strictly between 0 and pi, got {theta}"));
    }
    let e = -alpha * PI * PI * PI * (r1 * r2).sqrt() / (1440.0 * a * a * s);
    Ok(e * (1.0 + (beta - 0.375) * a / (r1 + r2)))
}
