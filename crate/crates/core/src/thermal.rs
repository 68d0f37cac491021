//! Finite-temperature Dirichlet coefficients b₀(ξ, d), b₂(ξ, d) and the thermal
//! derivative-expansion free energy.
//!
//! ξ = ψ/β is the local gap in units of the inverse temperature. Momenta are
//! measured in units of 1/ψ, so all coefficients are dimensionless.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{HeightProfile, IntegrationPlan};
use crate::numerics::special::{radial_measure, sphere_area, ZETA3, ZETA5, ZETA7};
use crate::numerics::{
    geometric_breaks, integrate_piecewise, integrate_semi_infinite, sum_series, CubicSpline, QuadOptions,
    SeriesOptions,
};

/// `r / (1 - e^{-2r})`.
pub fn kernel_a(r: f64) -> f64 {
    if r < 1e-8 {
        0.5 + 0.5 * r
    } else {
        r / -(-2.0 * r).exp_m1()
    }
}

/// `r / (e^{2r} - 1)`.
pub fn kernel_b(r: f64) -> f64 {
    if r < 1e-8 {
        0.5 - 0.5 * r
    } else {
        r / (2.0 * r).exp_m1()
    }
}

// Half the derivative of r·coth(r) and its distance from the large-r limit ½.
// A' = 1/2 + C and B' = -1/2 + C.
fn half_d_rcoth(r: f64) -> (f64, f64) {
    if r < 1e-2 {
        let r2 = r * r;
        let c = r * (1.0 / 3.0 - r2 * (2.0 / 45.0 - r2 * (6.0 / 945.0)));
        (c, c - 0.5)
    } else {
        let e = (-2.0 * r).exp();
        let one_minus = -(-2.0 * r).exp_m1();
        let excess = e / one_minus - 2.0 * r * e / (one_minus * one_minus);
        (0.5 + excess, excess)
    }
}

/// A'(r)·B'(r).
pub fn kernel_da_db(r: f64) -> f64 {
    let (c, excess) = half_d_rcoth(r);
    excess * (c + 0.5)
}

/// `log(1 - e^{-2r})`.
fn log_one_minus(r: f64) -> f64 {
    (-(-2.0 * r).exp()).ln_1p()
}

fn check_d(d: u32) -> Result<()> {
    if (1..=6).contains(&d) {
        Ok(())
    } else {
        invalid(format!("spatial dimension must satisfy 1 <= d <= 6, got {d}"))
    }
}

fn check_xi(xi: f64) -> Result<()> {
    if xi > 0.0 && xi.is_finite() {
        Ok(())
    } else {
        invalid(format!("xi must be positive and finite, got {xi}"))
    }
}

fn opts(rel: f64) -> QuadOptions {
    QuadOptions {
        rel_tol: rel,
        abs_tol: 0.0,
        max_subdivisions: 8000,
    }
}

const REL: f64 = 1e-11;

// Radial integral of p^m f(p) over [0, inf) with breakpoints around p ~ 1.
fn radial<F: Fn(f64) -> f64>(m: u32, f: F, rel: f64) -> Result<f64> {
    let mut br = geometric_breaks(1e-6, 1.0, 10.0);
    br.extend([2.0, 4.0, 8.0, 16.0]);
    let g = |p: f64| if m == 0 { f(p) } else { p.powi(m as i32) * f(p) };
    Ok(integrate_semi_infinite(g, 0.0, &br, &opts(rel))?.value)
}

/// b₀ at zero temperature: ½∫dᵈp/(2π)ᵈ log(1 - e^{-2|p|}).
pub fn b0_zero_temperature(d: u32) -> Result<f64> {
    check_d(d)?;
    Ok(0.5 * radial_measure(d) * radial(d - 1, log_one_minus, REL)?)
}

/// b₂ at zero temperature: S_d/(2d(2π)ᵈ)∫r^{d-1}A'(r)B'(r)dr.
pub fn b2_zero_temperature(d: u32) -> Result<f64> {
    check_d(d)?;
    Ok(radial_measure(d) / (2.0 * d as f64) * radial(d - 1, kernel_da_db, REL)?)
}

/// Closed forms of b₂/b₀ at ξ → 0.
pub fn thermal_ratio_closed_form(d: u32) -> Result<f64> {
    let pi2 = PI * PI;
    Ok(match d {
        1 => (1.0 + pi2 / 3.0) / pi2,
        2 => (1.0 + 6.0 * ZETA3) / (12.0 * ZETA3),
        3 => 2.0 / 3.0,
        4 => (-ZETA3 + 10.0 * ZETA5) / (12.0 * ZETA5),
        5 => (10.0 * pi2 - 21.0) / (10.0 * pi2),
        6 => (-2.0 * ZETA5 + 7.0 * ZETA7) / (6.0 * ZETA7),
        _ => return invalid(format!("closed forms exist for 1 <= d <= 6, got {d}")),
    })
}

/// A coefficient split into its n = 0 (dimensionally reduced) part and the
/// remaining Matsubara modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSplit {
    pub zero_mode: f64,
    pub nonzero_modes: f64,
}

impl ModeSplit {
    pub fn total(&self) -> f64 {
        self.zero_mode + self.nonzero_modes
    }
}

fn series_opts(xi: f64) -> SeriesOptions {
    SeriesOptions {
        rel_tol: 1e-12,
        max_terms: (8.0 / xi).ceil() as usize + 20,
        half_weight_n0: false,
    }
}

fn finite_t_d(d: u32) -> Result<()> {
    check_d(d)?;
    if d == 1 {
        return invalid(
            "d = 1 at finite temperature: the n = 0 Matsubara mode is divergent (no transverse momenta)",
        );
    }
    Ok(())
}

/// Sum over n ≥ 1 of `mode(ω_n)`, with ω_n = 2πnξ.
fn nonzero_sum<F: Fn(f64) -> Result<f64>>(xi: f64, mode: F) -> Result<f64> {
    let mut err = None;
    let s = sum_series(
        |j| {
            if err.is_some() {
                return 0.0;
            }
            let w = 2.0 * PI * (j + 1) as f64 * xi;
            match mode(w) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            }
        },
        &series_opts(xi),
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(s?.value)
}

/// b₀(ξ, d) split into modes. The zero mode is ξ·b₀(0, d−1).
pub fn b0_modes(xi: f64, d: u32) -> Result<ModeSplit> {
    check_xi(xi)?;
    finite_t_d(d)?;
    let m = d - 1;
    let zero_mode = xi * b0_zero_temperature(m)?;
    let meas = radial_measure(m);
    let rest = nonzero_sum(xi, |w| {
        let f = |p: f64| log_one_minus((w * w + p * p).sqrt());
        Ok(meas * radial(m - 1, f, REL)?)
    })?;
    Ok(ModeSplit {
        zero_mode,
        nonzero_modes: xi * rest,
    })
}

/// b₀(ξ, d) = (ξ/2)Σₙ∫d^{d-1}p/(2π)^{d-1} log(1 − e^{−2√((2πnξ)² + p²)}).
pub fn b0(xi: f64, d: u32) -> Result<f64> {
    Ok(b0_modes(xi, d)?.total())
}

/// b₂(ξ, d) split into modes. The zero mode is ξ·b₂(0, d−1).
pub fn b2_modes(xi: f64, d: u32) -> Result<ModeSplit> {
    check_xi(xi)?;
    finite_t_d(d)?;
    let m = d - 1;
    let zero_mode = xi * b2_zero_temperature(m)?;
    let meas = radial_measure(m);
    let rest = nonzero_sum(xi, |w| {
        let f = |p: f64| {
            let r2 = w * w + p * p;
            kernel_da_db(r2.sqrt()) * p * p / r2
        };
        Ok(meas * radial(m - 1, f, REL)?)
    })?;
    Ok(ModeSplit {
        zero_mode,
        nonzero_modes: xi * rest / m as f64,
    })
}

/// b₂(ξ, d): half the l² coefficient of F⁽²⁾(ξ, n = 0, l), written after an
/// integration by parts as (ξ/(2(d−1)))Σₘ∫d^{d−1}p/(2π)^{d−1} A'(r)B'(r)p²/r².
pub fn b2(xi: f64, d: u32) -> Result<f64> {
    Ok(b2_modes(xi, d)?.total())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalCoefficientPoint {
    pub xi: f64,
    pub d: u32,
    pub b0: f64,
    pub b2: f64,
}

impl ThermalCoefficientPoint {
    pub fn compute(xi: f64, d: u32) -> Result<Self> {
        Ok(Self {
            xi,
            d,
            b0: b0(xi, d)?,
            b2: b2(xi, d)?,
        })
    }
}

// ∫d^m p/(2π)^m g(p, |p + l|) for m ≥ 1 with p and l in m dimensions.
fn shifted_momentum_integral<G: Fn(f64, f64) -> f64>(m: u32, l: f64, g: G, rel: f64) -> Result<f64> {
    if m == 0 {
        return Ok(g(0.0, l.abs()));
    }
    if l == 0.0 {
        return Ok(radial_measure(m) * radial(m - 1, |p| g(p, p), rel)?);
    }
    let br = {
        let mut b = geometric_breaks(1e-3, 1.0, 4.0);
        b.extend([l, l + 1.0, 2.0, 4.0, 8.0, 16.0]);
        b
    };
    if m == 1 {
        // Whole line: fold p < 0 onto p > 0.
        let f = |p: f64| g(p, (p + l).abs()) + g(p, (p - l).abs());
        return Ok(integrate_semi_infinite(f, 0.0, &br, &opts(rel))?.value / (2.0 * PI));
    }
    let pref = sphere_area(m - 1) / (2.0 * PI).powi(m as i32);
    let inner_opts = opts(rel * 0.1);
    let mut err = None;
    let f = |p: f64| {
        let ang = |t: f64| {
            let q = (p * p + l * l + 2.0 * p * l * t.cos()).max(0.0).sqrt();
            t.sin().powi(m as i32 - 2) * g(p, q)
        };
        match integrate_piecewise(ang, &[0.0, 0.5 * PI, PI], &inner_opts) {
            Ok(r) => p.powi(m as i32 - 1) * r.value,
            Err(_) => f64::NAN,
        }
    };
    let out = integrate_semi_infinite(f, 0.0, &br, &opts(rel));
    if let Err(e) = &out {
        err = Some(e.clone());
    }
    match err {
        Some(e) => Err(e),
        None => Ok(pref * out?.value),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalF2Point {
    pub xi: f64,
    pub n: i64,
    pub l: f64,
    pub value: f64,
}

/// F⁽²⁾(ξ, n, l) = −2ξΣₘ∫d^{d−1}p/(2π)^{d−1} A(√(ωₘ² + p²)) B(√(ω_{m+n}² + |p + l|²)).
pub fn thermal_f2(xi: f64, n: i64, l: f64, d: u32) -> Result<ThermalF2Point> {
    check_xi(xi)?;
    check_d(d)?;
    let m = d - 1;
    let w = |k: i64| 2.0 * PI * k as f64 * xi;
    let mode = |k: i64| -> Result<f64> {
        let (w1, w2) = (w(k), w(k + n));
        shifted_momentum_integral(
            m,
            l,
            |p, q| kernel_a((w1 * w1 + p * p).sqrt()) * kernel_b((w2 * w2 + q * q).sqrt()),
            REL,
        )
    };
    let mut err = None;
    let mut run = |k: i64| match mode(k) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            0.0
        }
    };
    // Both signs of m; the sum starts well past the shift so terms decrease.
    let centre = -n / 2;
    let s = sum_series(
        |j| {
            let j = j as i64;
            if j == 0 {
                run(centre)
            } else {
                run(centre + j) + run(centre - j)
            }
        },
        &SeriesOptions {
            rel_tol: 1e-12,
            max_terms: (8.0 / xi).ceil() as usize + 20 + n.unsigned_abs() as usize,
            half_weight_n0: false,
        },
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(ThermalF2Point {
        xi,
        n,
        l,
        value: -2.0 * xi * s?.value,
    })
}

/// Zero-temperature limit of F⁽²⁾ at n = 0: −2∫dᵈP/(2π)ᵈ A(|P|)B(|P + l|).
pub fn zero_temperature_f2(l: f64, d: u32) -> Result<f64> {
    check_d(d)?;
    Ok(-2.0 * shifted_momentum_integral(d, l, |p, q| kernel_a(p) * kernel_b(q), REL)?)
}

/// b₂ from a finite-difference l² derivative of F⁽²⁾ with Richardson
/// extrapolation. `f2` evaluates F⁽²⁾(l) at n = 0; `orders` lists the
/// powers of l in the error of (F(l) − F(0))/l² to eliminate.
pub fn b2_by_finite_difference<F: Fn(f64) -> Result<f64>>(f2: F, l: f64, orders: &[i32]) -> Result<f64> {
    let f0 = f2(0.0)?;
    let levels = orders.len() + 1;
    let mut table: Vec<f64> = (0..levels)
        .map(|i| {
            let li = l / 2f64.powi(i as i32);
            Ok((f2(li)? - f0) / (li * li))
        })
        .collect::<Result<_>>()?;
    for &order in orders {
        let factor = 2f64.powi(order);
        table = table.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
    }
    Ok(0.5 * table[0])
}

/// (b₀(ξ,d)/ξ, b₀(0,d−1), relative gap).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub relative_gap: f64,
}

/// Compare b₀(ξ, d)/ξ with b₀(0, d−1) at high temperature.
///
/// The gap is formed from the non-static modes directly, so it stays
/// accurate far below double-precision rounding of lhs − rhs.
pub fn high_t_reduction_check(xi: f64, d: u32) -> Result<ReductionCheck> {
    if !(xi >= 5.0) {
        return invalid("the reduction check needs xi >= 5");
    }
    if d < 2 {
        return invalid("the reduction check needs d >= 2");
    }
    let modes = b0_modes(xi, d)?;
    let rhs = modes.zero_mode / xi;
    Ok(ReductionCheck {
        lhs: modes.total() / xi,
        rhs,
        relative_gap: (modes.nonzero_modes / xi).abs() / rhs.abs(),
    })
}

/// Interpolation table of b₀ and b₂ in ξ for a fixed dimension.
///
/// Only the non-static part is interpolated (cubic spline in log ξ); the
/// static part ξ·b(0, d−1) is exact. Beyond `xi_max` the non-static part is
/// below e^{−4π xi_max} and is dropped. Between 0 and `xi_min` it is blended
/// linearly towards the zero-temperature value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThermalTable {
    pub d: u32,
    pub xi_min: f64,
    pub xi_max: f64,
    b0_static: f64,
    b2_static: f64,
    b0_t0: f64,
    b2_t0: f64,
    nodes: Vec<ThermalCoefficientPoint>,
    spline_b0: CubicSpline,
    spline_b2: CubicSpline,
}

impl ThermalTable {
    pub const DEFAULT_XI_MIN: f64 = 0.01;
    pub const DEFAULT_XI_MAX: f64 = 4.0;
    pub const DEFAULT_NODES: usize = 96;

    pub fn new(d: u32) -> Result<Self> {
        Self::build(d, Self::DEFAULT_XI_MIN, Self::DEFAULT_XI_MAX, Self::DEFAULT_NODES)
    }

    /// Build the table; nodes are evaluated in parallel.
    pub fn build(d: u32, xi_min: f64, xi_max: f64, n: usize) -> Result<Self> {
        finite_t_d(d)?;
        if !(xi_min > 0.0 && xi_max > xi_min) || n < 4 {
            return invalid("need 0 < xi_min < xi_max and at least 4 nodes");
        }
        let xs = crate::numerics::log_space(xi_min, xi_max, n);
        let splits: Vec<(ModeSplit, ModeSplit)> = xs
            .par_iter()
            .map(|&xi| Ok((b0_modes(xi, d)?, b2_modes(xi, d)?)))
            .collect::<Result<_>>()?;
        let nodes = xs
            .iter()
            .zip(&splits)
            .map(|(&xi, (s0, s2))| ThermalCoefficientPoint {
                xi,
                d,
                b0: s0.total(),
                b2: s2.total(),
            })
            .collect();
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let spline_b0 = CubicSpline::new(lx.clone(), splits.iter().map(|s| s.0.nonzero_modes).collect())?;
        let spline_b2 = CubicSpline::new(lx, splits.iter().map(|s| s.1.nonzero_modes).collect())?;
        Ok(Self {
            d,
            xi_min,
            xi_max,
            b0_static: b0_zero_temperature(d - 1)?,
            b2_static: b2_zero_temperature(d - 1)?,
            b0_t0: b0_zero_temperature(d)?,
            b2_t0: b2_zero_temperature(d)?,
            nodes,
            spline_b0,
            spline_b2,
        })
    }

    pub fn nodes(&self) -> &[ThermalCoefficientPoint] {
        &self.nodes
    }

    fn nonstatic(&self, xi: f64, spline: &CubicSpline, t0: f64) -> f64 {
        if xi >= self.xi_max {
            0.0
        } else if xi <= self.xi_min {
            let end = spline.eval(self.xi_min.ln());
            let s = xi / self.xi_min;
            // At ξ → 0 the non-static part tends to b(0, d).
            (1.0 - s) * t0 + s * end
        } else {
            spline.eval(xi.ln())
        }
    }

    /// (b₀, b₂) at ξ ≥ 0; ξ = 0 is the zero-temperature limit.
    pub fn eval(&self, xi: f64) -> (f64, f64) {
        let n0 = self.nonstatic(xi, &self.spline_b0, self.b0_t0);
        let n2 = self.nonstatic(xi, &self.spline_b2, self.b2_t0);
        (xi * self.b0_static + n0, xi * self.b2_static + n2)
    }

    /// CSV with columns xi,d,b0,b2.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("xi,d,b0,b2\n");
        for p in &self.nodes {
            out.push_str(&format!("{:.12e},{},{:.12e},{:.12e}\n", p.xi, p.d, p.b0, p.b2));
        }
        out
    }
}

/// Local free-energy density b₀/ψᵈ + b₂|∇ψ|²/ψᵈ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalEnergy {
    pub pfa_term: f64,
    pub gradient_term: f64,
    pub total: f64,
    pub error_estimate: f64,
}

/// Thermal derivative-expansion free energy
/// F = ∫d^{d−1}x [b₀(ψ/β, d) + b₂(ψ/β, d)|∇ψ|²]/ψᵈ.
///
/// `inverse_temperature = f64::INFINITY` selects zero temperature.
pub fn thermal_de_free_energy(
    profile: &HeightProfile,
    inverse_temperature: f64,
    table: &ThermalTable,
    quad: &QuadOptions,
) -> Result<ThermalEnergy> {
    let d = table.d;
    if !(2..=3).contains(&d) {
        return invalid("thermal free energy is implemented for d = 2 and d = 3");
    }
    if profile.dimensionality() as u32 != d - 1 {
        return invalid(format!(
            "a d = {d} free energy needs a {}-dimensional profile",
            d - 1
        ));
    }
    if !(inverse_temperature > 0.0) {
        return invalid("inverse temperature must be positive (use infinity for T = 0)");
    }
    let plan = IntegrationPlan::for_profile(profile);
    let density = |x: [f64; 2], part: usize| -> Result<f64> {
        let (psi, g) = profile.eval_grad(x);
        if !(psi > 0.0) {
            return invalid(format!("non-positive gap {psi}"));
        }
        let xi = psi / inverse_temperature;
        let (c0, c2) = table.eval(xi);
        let inv = psi.powi(-(d as i32));
        Ok(match part {
            0 => c0 * inv,
            _ => c2 * (g[0] * g[0] + g[1] * g[1]) * inv,
        })
    };
    let a = plan.integrate(|x| density(x, 0), quad)?;
    let b = plan.integrate(|x| density(x, 1), quad)?;
    Ok(ThermalEnergy {
        pfa_term: a.value,
        gradient_term: b.value,
        total: a.value + b.value,
        error_estimate: a.error_estimate + b.error_estimate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HighTemperatureSpherePlane {
    pub free_energy: f64,
    /// 1 − (a/R)log(a/R)/(6ζ(3)).
    pub correction_factor: f64,
    /// a/R < 0.1.
    pub small_gap: bool,
    /// a/β > 1.
    pub high_temperature: bool,
}

/// F ≈ −ζ(3)R/(8βa)[1 − (a/R)log(a/R)/(6ζ(3))].
pub fn sphere_plane_high_t(a: f64, r: f64, inverse_temperature: f64) -> Result<HighTemperatureSpherePlane> {
    if !(a > 0.0 && r > 0.0 && inverse_temperature > 0.0) {
        return invalid("a, R and beta must be positive");
    }
    let eps = a / r;
    let factor = 1.0 - eps * eps.ln() / (6.0 * ZETA3);
    Ok(HighTemperatureSpherePlane {
        free_energy: -ZETA3 * r / (8.0 * inverse_temperature * a) * factor,
        correction_factor: factor,
        small_gap: eps < 0.1,
        high_temperature: a / inverse_temperature > 1.0,
    })
}
