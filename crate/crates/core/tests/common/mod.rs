#![allow(dead_code)]

use casimir_de::de::de_energy_two_surfaces_with;
use casimir_de::geometry::{HeightProfile, TwoSurfaceConfig};
use casimir_de::kernels::{DECoefficients, InteractionKernel};
use casimir_de::QuadOptions;

// Gentle overlapping bumps of slope ~1e-3, flat at both ends of [-L, L].
// The first-order change under a rotation only cancels at leading derivative
// order, so the widths are kept large against the gap.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub base: f64,
    pub amp: f64,
    pub centre: f64,
    pub width: f64,
}

impl Bump {
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let u = (x - self.centre) / self.width;
        let g = (-u * u).exp();
        let psi = self.base + self.amp * g;
        let d1 = -2.0 * u / self.width * self.amp * g;
        let d2 = (4.0 * u * u - 2.0) / (self.width * self.width) * self.amp * g;
        (psi, d1, d2)
    }

    // ψ + ε(x + ψψ'), the first-order rotation of the graph.
    pub fn rotated(self, eps: f64, half: f64) -> HeightProfile {
        HeightProfile::custom_1d(
            move |x| {
                let (p, d1, d2) = self.eval(x);
                (p + eps * (x + p * d1), d1 + eps * (1.0 + d1 * d1 + p * d2))
            },
            -half,
            half,
        )
        .unwrap()
        .with_scales(vec![self.width])
    }
}

pub const HALF: f64 = 6.0;

pub fn bumps() -> (Bump, Bump) {
    (
        Bump {
            base: -0.025,
            amp: 1e-3,
            centre: -0.3,
            width: 0.8,
        },
        Bump {
            base: 0.025,
            amp: -8e-4,
            centre: 0.4,
            width: 0.6,
        },
    )
}

// |dU/dε|/|U| at ε = 0 by central difference with ε = 1e-4.
pub fn tilt_residual(coeffs: DECoefficients) -> f64 {
    let k = InteractionKernel::electrostatic(1.0).unwrap();
    let quad = QuadOptions::rel(1e-13);
    let (b1, b2) = bumps();
    let energy = |eps: f64| {
        let cfg = TwoSurfaceConfig::new(b1.rotated(eps, HALF), b2.rotated(eps, HALF)).unwrap();
        de_energy_two_surfaces_with(&cfg, &k, &coeffs, &quad).unwrap().total
    };
    let eps = 1e-4;
    let u0 = energy(0.0);
    ((energy(eps) - energy(-eps)) / (2.0 * eps) / u0).abs()
}

