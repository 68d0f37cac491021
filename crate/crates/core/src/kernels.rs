//! Parallel-plate energy densities and their derivative-expansion coefficients.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::special::{factorial, radial_measure, zeta};

pub const BETA_ELECTROSTATIC: f64 = 1.0 / 3.0;
/// Cross coefficient of the electrostatic two-surface expansion.
pub const BETA_CROSS_ELECTROSTATIC: f64 = 1.0 / 3.0;
pub const BETA_DIRICHLET: f64 = 2.0 / 3.0;
pub const BETA_DN: f64 = 2.0 / 3.0;

pub fn beta_neumann() -> f64 {
    (2.0 / 3.0) * (1.0 - 30.0 / (PI * PI))
}

pub fn beta_nd() -> f64 {
    2.0 / 3.0 - 80.0 / (7.0 * PI * PI)
}

pub fn beta_em() -> f64 {
    (2.0 / 3.0) * (1.0 - 15.0 / (PI * PI))
}

/// Zero-temperature Dirichlet plate coefficient c_d with E(h) = c_d / h^d in d spatial dimensions:
/// `-(S_d/(2pi)^d) Γ(d) ζ(d+1) / 2^(d+1)`.
pub fn dirichlet_plate_coefficient(d: u32) -> f64 {
    -radial_measure(d) * factorial(d - 1) * zeta(d as f64 + 1.0) / 2f64.powi(d as i32 + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelKind {
    /// E = ε₀V₀²/(2h); the amplitude is the product ε₀V₀².
    Electrostatic,
    /// Scalar field with Dirichlet conditions in d spatial dimensions.
    DirichletScalar { d: u32 },
    NeumannScalar,
    EmPerfect,
    /// Dirichlet on the first surface, Neumann on the second.
    MixedDn,
    /// Neumann on the first surface, Dirichlet on the second.
    MixedNd,
    /// E = amplitude · h^(-p).
    PowerLaw { p: f64 },
    /// User-supplied density without homogeneity information.
    Custom,
}

impl KernelKind {
    pub fn name(&self) -> String {
        match self {
            KernelKind::Electrostatic => "electrostatic".into(),
            KernelKind::DirichletScalar { d } => format!("dirichlet_scalar(d={d})"),
            KernelKind::NeumannScalar => "neumann_scalar".into(),
            KernelKind::EmPerfect => "em_perfect".into(),
            KernelKind::MixedDn => "mixed_dn".into(),
            KernelKind::MixedNd => "mixed_nd".into(),
            KernelKind::PowerLaw { p } => format!("power_law(p={p})"),
            KernelKind::Custom => "custom".into(),
        }
    }

    /// Default amplitude: ε₀V₀² = 1 for electrostatics, α = 2 for the EM field, α = 1 otherwise.
    pub fn default_amplitude(&self) -> f64 {
        match self {
            KernelKind::EmPerfect => 2.0,
            _ => 1.0,
        }
    }
}

/// Regimes where the derivative expansion of a kernel is known to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeValidity {
    pub zero_temperature: bool,
    pub finite_temperature: bool,
}

/// The coefficient set {β₁, β₂, β_×, β₋} of the two-surface expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DECoefficients {
    pub beta1: f64,
    pub beta2: f64,
    pub beta_cross: f64,
    pub beta_minus: f64,
}

impl DECoefficients {
    pub fn new(beta1: f64, beta2: f64, beta_cross: f64) -> Self {
        Self {
            beta1,
            beta2,
            beta_cross,
            beta_minus: 0.0,
        }
    }

    /// Both surfaces of the same nature with cross term fixed by the homogeneity relation.
    pub fn identical(beta: f64, p: f64) -> Self {
        Self::new(beta, beta, cross_from_exponent(p, beta, beta))
    }

    /// Coefficients with the surfaces relabelled.
    pub fn swapped(&self) -> Self {
        Self {
            beta1: self.beta2,
            beta2: self.beta1,
            beta_cross: self.beta_cross,
            beta_minus: -self.beta_minus,
        }
    }
}

type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Energy per unit area between parallel plates, E∥(h).
#[derive(Clone)]
pub struct InteractionKernel {
    kind: KernelKind,
    amplitude: f64,
    custom: Option<Density>,
}

impl fmt::Debug for InteractionKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InteractionKernel")
            .field("kind", &self.kind)
            .field("amplitude", &self.amplitude)
            .finish()
    }
}

/// Serializable summary of a kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDescriptor {
    pub name: String,
    pub kind: KernelKind,
    pub amplitude: f64,
    pub homogeneity_exponent: Option<f64>,
}

impl InteractionKernel {
    pub fn new(kind: KernelKind, amplitude: f64) -> Result<Self> {
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return invalid(format!("amplitude must be positive, got {amplitude}"));
        }
        match kind {
            KernelKind::DirichletScalar { d } if !(1..=6).contains(&d) => {
                return invalid(format!("dirichlet_scalar needs 1 <= d <= 6, got {d}"));
            }
            KernelKind::PowerLaw { p } if !(p > 0.0) || !p.is_finite() => {
                return invalid("power-law exponent must be positive");
            }
            KernelKind::Custom => return invalid("use InteractionKernel::custom for custom densities"),
            _ => {}
        }
        Ok(Self {
            kind,
            amplitude,
            custom: None,
        })
    }

    /// E = ε₀V₀²/(2h).
    pub fn electrostatic(eps0_v0_sq: f64) -> Result<Self> {
        Self::new(KernelKind::Electrostatic, eps0_v0_sq)
    }

    pub fn dirichlet(d: u32) -> Result<Self> {
        Self::new(KernelKind::DirichletScalar { d }, 1.0)
    }

    /// E = amplitude · sign · h^(-p); `attractive` selects a negative density.
    pub fn power_law(amplitude: f64, p: f64, attractive: bool) -> Result<Self> {
        let mut k = Self::new(KernelKind::PowerLaw { p }, amplitude)?;
        if attractive {
            k.amplitude = -amplitude;
        }
        Ok(k)
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            kind: KernelKind::Custom,
            amplitude: 1.0,
            custom: Some(Arc::new(f)),
        }
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn name(&self) -> String {
        self.kind.name()
    }

    pub fn descriptor(&self) -> KernelDescriptor {
        KernelDescriptor {
            name: self.name(),
            kind: self.kind,
            amplitude: self.amplitude,
            homogeneity_exponent: self.homogeneity_exponent(),
        }
    }

    /// p such that E∥(λh) = λ^(-p) E∥(h), when the density is a pure power law.
    pub fn homogeneity_exponent(&self) -> Option<f64> {
        match self.kind {
            KernelKind::Electrostatic => Some(1.0),
            KernelKind::DirichletScalar { d } => Some(d as f64),
            KernelKind::NeumannScalar | KernelKind::EmPerfect | KernelKind::MixedDn | KernelKind::MixedNd => {
                Some(3.0)
            }
            KernelKind::PowerLaw { p } => Some(p),
            KernelKind::Custom => None,
        }
    }

    /// Coefficient c in E∥ = c·h^(-p) for power-law kernels.
    pub fn coefficient(&self) -> Option<f64> {
        let casimir = PI * PI / 1440.0;
        Some(match self.kind {
            KernelKind::Electrostatic => 0.5 * self.amplitude,
            KernelKind::DirichletScalar { d } => self.amplitude * dirichlet_plate_coefficient(d),
            KernelKind::NeumannScalar | KernelKind::EmPerfect => -self.amplitude * casimir,
            KernelKind::MixedDn | KernelKind::MixedNd => 7.0 / 8.0 * self.amplitude * casimir,
            KernelKind::PowerLaw { .. } => self.amplitude,
            KernelKind::Custom => return None,
        })
    }

    /// E∥(h).
    pub fn energy_density(&self, h: f64) -> f64 {
        if let Some(f) = &self.custom {
            return f(h);
        }
        let p = self.homogeneity_exponent().expect("non-custom kernels are homogeneous");
        let c = self.coefficient().expect("non-custom kernels have a coefficient");
        if p == 1.0 {
            c / h
        } else if p.fract() == 0.0 {
            c * h.powi(-(p as i32))
        } else {
            c * h.powf(-p)
        }
    }

    /// E∥(h), rejecting non-positive gaps.
    pub fn try_energy_density(&self, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return invalid(format!("surfaces touch or cross: gap {h}"));
        }
        Ok(self.energy_density(h))
    }

    /// Closed-form ∫ₕ^∞ E∥ for power-law kernels with p > 1.
    pub fn tail_integral_closed_form(&self, h: f64) -> Result<f64> {
        match (self.homogeneity_exponent(), self.coefficient()) {
            (Some(p), Some(c)) if p > 1.0 => Ok(c * h.powf(1.0 - p) / (p - 1.0)),
            (Some(p), _) => Err(Error::NotIntegrable(format!(
                "{}: E∥ ~ h^-{p} has a divergent tail",
                self.name()
            ))),
            _ => Err(Error::NotIntegrable(format!("{}: no closed form", self.name()))),
        }
    }

    /// Derivative-expansion validity flags.
    pub fn validity(&self) -> DeValidity {
        match self.kind {
            // Perfect Neumann conditions make the thermal zero mode nonanalytic.
            KernelKind::NeumannScalar => DeValidity {
                zero_temperature: true,
                finite_temperature: false,
            },
            _ => DeValidity {
                zero_temperature: true,
                finite_temperature: true,
            },
        }
    }

    /// Single-surface coefficient β of the stored table, when available.
    pub fn beta(&self) -> Option<f64> {
        match self.kind {
            KernelKind::Electrostatic => Some(BETA_ELECTROSTATIC),
            KernelKind::DirichletScalar { d } => crate::thermal::thermal_ratio_closed_form(d).ok(),
            KernelKind::NeumannScalar => Some(beta_neumann()),
            KernelKind::EmPerfect => Some(beta_em()),
            KernelKind::MixedDn => Some(BETA_DN),
            KernelKind::MixedNd => Some(beta_nd()),
            KernelKind::PowerLaw { .. } | KernelKind::Custom => None,
        }
    }

    /// Stored coefficient set: β₁ = β₂ = β, β₋ = 0, β_× from the homogeneity relation.
    pub fn de_coefficients(&self) -> Option<DECoefficients> {
        let beta = self.beta()?;
        let p = self.homogeneity_exponent()?;
        let mut c = DECoefficients::identical(beta, p);
        if self.kind == KernelKind::Electrostatic {
            c.beta_cross = BETA_CROSS_ELECTROSTATIC;
        }
        Some(c)
    }
}

/// Builtin kernel together with its coefficient set.
pub fn builtin_kernel(kind: KernelKind, amplitude: Option<f64>) -> Result<(InteractionKernel, DECoefficients)> {
    if matches!(kind, KernelKind::PowerLaw { .. } | KernelKind::Custom) {
        return invalid(format!("{} is not a builtin kernel", kind.name()));
    }
    let k = InteractionKernel::new(kind, amplitude.unwrap_or_else(|| kind.default_amplitude()))?;
    let c = k.de_coefficients().expect("builtin kernels carry coefficients");
    Ok((k, c))
}

/// Parse a kernel name as accepted on the command line.
pub fn parse_kind(name: &str, d: Option<u32>) -> Result<KernelKind> {
    Ok(match name.to_ascii_lowercase().replace('-', "_").as_str() {
        "electrostatic" => KernelKind::Electrostatic,
        "dirichlet" | "dirichlet_scalar" => KernelKind::DirichletScalar { d: d.unwrap_or(3) },
        "neumann" | "neumann_scalar" => KernelKind::NeumannScalar,
        "em" | "em_perfect" => KernelKind::EmPerfect,
        "dn" | "mixed_dn" => KernelKind::MixedDn,
        "nd" | "mixed_nd" => KernelKind::MixedNd,
        other => return invalid(format!("unknown kernel '{other}'")),
    })
}

fn cross_from_exponent(p: f64, beta1: f64, beta2: f64) -> f64 {
    0.5 * (1.0 + p - 2.0 * (beta1 + beta2))
}

/// β_× = (1 + p − 2(β₁ + β₂))/2 for a kernel with E∥ ∝ h^(−p).
pub fn beta_cross_from_relation(kernel: &InteractionKernel, beta1: f64, beta2: f64) -> Result<f64> {
    match kernel.homogeneity_exponent() {
        Some(p) => Ok(cross_from_exponent(p, beta1, beta2)),
        None => invalid(format!(
            "{}: the cross-coefficient relation needs a power-law density",
            kernel.name()
        )),
    }
}
