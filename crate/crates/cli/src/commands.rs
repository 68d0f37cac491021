use std::f64::consts::PI;

use casimir_de::casimir_polder::{cp_de_static, cp_plane_with, PolarizabilityModel};
use casimir_de::de::{
    de_energy_with, exact_cylinder_plane, extract_beta, inclined_cylinders_de, sphere_plane_de_kernel,
    two_spheres_de, universal_part, AsymptoticTerm, FitOptions, CYLINDER_TRUNCATION,
};
use casimir_de::geometry::{
    make_cylinder_profile, make_paraboloid_profile, make_sphere_profile, Domain, HeightProfile,
};
use casimir_de::kernels::{
    beta_em, beta_neumann, beta_nd, builtin_kernel, parse_kind, InteractionKernel, KernelKind, BETA_DIRICHLET,
    BETA_DN,
};
use casimir_de::perturbative::{analyticity_probe, extract_chi_and_beta, FormFactorCurve, CHI_SAMPLES};
use casimir_de::proximity::{derjaguin_energy, derjaguin_force, effective_radius, pfa_energy_with};
use casimir_de::thermal::{
    b0_zero_temperature, b2_zero_temperature, sphere_plane_high_t, thermal_ratio_closed_form,
    thermal_de_free_energy, ThermalCoefficientPoint, ThermalTable,
};
use casimir_de::{Error, QuadOptions};
use serde_json::{json, Value};

use crate::params::{Format, Params};
use crate::report::{Report, Table, Tolerances, Validity};
use crate::CliError;

const REL_TOL: f64 = 1e-10;
const FRAC_DEFAULT: f64 = 0.95;
const LARGE_RATIO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Geometry {
    Plates,
    CylinderPlane,
    SpherePlane,
    TwoSpheres,
    Paraboloid,
    InclinedCylinders,
}

fn geometry(p: &Params) -> Result<Geometry, CliError> {
    let name = p.geometry.as_deref().ok_or_else(|| CliError::Usage("missing required flag --geometry".into()))?;
    Ok(match name {
        "plates" | "plane-plane" => Geometry::Plates,
        "cylinder-plane" => Geometry::CylinderPlane,
        "sphere-plane" => Geometry::SpherePlane,
        "two-spheres" | "sphere-sphere" => Geometry::TwoSpheres,
        "paraboloid" | "paraboloid-plane" => Geometry::Paraboloid,
        "inclined-cylinders" => Geometry::InclinedCylinders,
        other => return Err(CliError::Usage(format!("unknown geometry '{other}'"))),
    })
}

fn kernel(p: &Params) -> Result<InteractionKernel, CliError> {
    let name = p.kernel.as_deref().unwrap_or("dirichlet");
    if matches!(name, "power-law" | "power_law") {
        let exp = Params::require(p.p, "p")?;
        let amp = p.amplitude.unwrap_or(-1.0);
        return Ok(InteractionKernel::power_law(amp.abs(), exp, amp < 0.0)?);
    }
    let kind = parse_kind(name, p.d)?;
    Ok(builtin_kernel(kind, p.amplitude)?.0)
}

fn beta_for(p: &Params, k: &InteractionKernel) -> Result<f64, CliError> {
    p.beta_coefficient.or_else(|| k.beta()).ok_or_else(|| {
        CliError::Usage(format!("{} has no stored DE coefficient; pass --beta-coefficient", k.name()))
    })
}

fn quad() -> QuadOptions {
    QuadOptions::rel(REL_TOL)
}

/// |∇ψ| sampled over a bounded domain.
fn max_gradient(profile: &HeightProfile) -> Option<f64> {
    let pts: Vec<[f64; 2]> = match profile.domain() {
        Domain::Interval { lo, hi } => (0..=400).map(|i| [lo + (hi - lo) * i as f64 / 400.0, 0.0]).collect(),
        Domain::Disk { radius } => (0..=400).map(|i| [radius * i as f64 / 400.0, 0.0]).collect(),
        Domain::Rectangle { x0, x1, y0, y1 } => (0..=40)
            .flat_map(|i| {
                (0..=40).map(move |j| [x0 + (x1 - x0) * i as f64 / 40.0, y0 + (y1 - y0) * j as f64 / 40.0])
            })
            .collect(),
        Domain::Plane => return None,
    };
    let m = pts
        .into_iter()
        .map(|x| {
            let g = profile.grad(x);
            g[0].hypot(g[1])
        })
        .fold(0.0, f64::max);
    Some(m)
}

fn validity(a: f64, radii: &[f64], profile: Option<&HeightProfile>) -> Validity {
    let r = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let mut v = Validity {
        a_over_r: r.is_finite().then(|| a / r),
        max_gradient: profile.and_then(max_gradient),
        de_applicable: true,
        warnings: Vec::new(),
    };
    if let Some(e) = v.a_over_r {
        if e > LARGE_RATIO {
            v.warnings.push(format!("a/R = {e}: the expansion parameter is not small"));
        }
    }
    if let Some(g) = v.max_gradient {
        if g > 1.0 {
            v.warnings.push(format!(
                "max |grad psi| = {g:.3}: the truncated profile is steep near its edge"
            ));
        }
    }
    v
}

fn exponent_is(k: &InteractionKernel, p: f64) -> bool {
    k.homogeneity_exponent() == Some(p)
}

/// α in E∥ = −απ²/(1440h³).
fn casimir_alpha(k: &InteractionKernel) -> Result<f64, CliError> {
    if !exponent_is(k, 3.0) {
        return Err(CliError::Usage(format!("{}: this geometry needs a 1/h^3 kernel", k.name())));
    }
    Ok(-k.coefficient().expect("power-law kernels carry a coefficient") * 1440.0 / (PI * PI))
}

fn set_de(rep: &mut Report, pfa: f64, gradient: f64, total: f64, beta: f64) {
    rep.set("pfa", pfa);
    rep.set("de_total", total);
    rep.set("gradient_term", gradient);
    rep.set("ratio", total / pfa);
    rep.set("beta", beta);
}

pub fn energy(p: &Params) -> Result<Report, CliError> {
    let g = geometry(p)?;
    let k = kernel(p)?;
    if let Some(bt) = p.inverse_temperature {
        return thermal_energy(p, g, &k, bt);
    }
    let beta = beta_for(p, &k)?;
    let a = Params::require(p.a, "a")?;
    let frac = p.frac.unwrap_or(FRAC_DEFAULT);
    match g {
        Geometry::Plates => {
            let mut rep = Report::new("energy", p, validity(a, &[], None), Tolerances::closed_form());
            let e = k.try_energy_density(a)?;
            set_de(&mut rep, e, 0.0, e, beta);
            Ok(rep)
        }
        Geometry::SpherePlane => {
            let r = Params::require(p.r, "R")?;
            if k.homogeneity_exponent().is_some_and(|e| e > 2.0) {
                let s = sphere_plane_de_kernel(a, r, &k, beta)?;
                let mut rep = Report::new("energy", p, validity(a, &[r], None), Tolerances::closed_form());
                set_de(&mut rep, s.derjaguin, s.gradient_term, s.total, beta);
                rep.set("geometric_term", s.geometric_term);
                return Ok(rep);
            }
            let profile = make_sphere_profile(a, r, frac)?;
            quadrature_energy(p, &profile, &k, beta, a, &[r], "quadrature over the truncated sphere")
        }
        Geometry::Paraboloid => {
            let r1 = Params::require(p.r, "R")?;
            let r2 = p.r2.unwrap_or(r1);
            let profile = make_paraboloid_profile(a, r1, r2)?;
            let mut rep = quadrature_energy(p, &profile, &k, beta, a, &[r1, r2], "quadrature over the plane")?;
            rep.set("derjaguin", derjaguin_energy(a, (r1 * r2).sqrt(), &k)?);
            Ok(rep)
        }
        Geometry::TwoSpheres => {
            let r1 = Params::require(p.r, "R")?;
            let r2 = Params::require(p.r2, "R2")?;
            let alpha = casimir_alpha(&k)?;
            let pfa = derjaguin_energy(a, effective_radius(r1, r2)?, &k)?;
            let total = two_spheres_de(a, r1, r2, alpha, beta)?;
            let pure = two_spheres_de(a, r1, r2, alpha, 0.0)?;
            let mut rep = Report::new("energy", p, validity(a, &[r1, r2], None), Tolerances::closed_form());
            set_de(&mut rep, pfa, total - pure, total, beta);
            Ok(rep)
        }
        Geometry::InclinedCylinders => {
            let r1 = Params::require(p.r, "R")?;
            let r2 = Params::require(p.r2, "R2")?;
            let theta = Params::require(p.theta, "theta")?;
            let alpha = casimir_alpha(&k)?;
            let total = inclined_cylinders_de(a, r1, r2, theta, alpha, beta)?;
            // β = 3/8 cancels the bracket and leaves the leading term.
            let pfa = inclined_cylinders_de(a, r1, r2, theta, alpha, 0.375)?;
            let mut rep = Report::new("energy", p, validity(a, &[r1, r2], None), Tolerances::closed_form());
            set_de(&mut rep, pfa, total - pfa, total, beta);
            Ok(rep)
        }
        Geometry::CylinderPlane => cylinder_plane(p, &k, beta, a, frac),
    }
}

fn quadrature_energy(
    p: &Params,
    profile: &HeightProfile,
    k: &InteractionKernel,
    beta: f64,
    a: f64,
    radii: &[f64],
    method: &str,
) -> Result<Report, CliError> {
    let r = de_energy_with(profile, k, beta, &quad())?;
    let mut rep = Report::new(
        "energy",
        p,
        validity(a, radii, Some(profile)),
        Tolerances::quadrature(method, REL_TOL, Some(r.error_estimate)),
    );
    set_de(&mut rep, r.pfa_term, r.gradient_term, r.total, beta);
    Ok(rep)
}

/// Energy per unit length L of a cylinder above a plane. The part that
/// survives an untruncated profile is extracted from a fit in ε = a/R.
fn cylinder_plane(p: &Params, k: &InteractionKernel, beta: f64, a: f64, frac: f64) -> Result<Report, CliError> {
    let r = Params::require(p.r, "R")?;
    let l = p.l.unwrap_or(1.0);
    let eps = a / r;
    let profile = make_cylinder_profile(a, r, frac)?;
    let Some(pw) = k.homogeneity_exponent().filter(|_| eps <= 1e-2) else {
        let mut rep = quadrature_energy(p, &profile, k, beta, a, &[r], "quadrature over the truncated cylinder")?;
        rep.validity
            .warnings
            .push("result includes the truncated ends of the profile".into());
        return Ok(rep);
    };
    let opts = FitOptions {
        eps_min: eps / 10.0,
        eps_max: eps * 10.0,
        ..FitOptions::default()
    };
    let universal: Vec<AsymptoticTerm> = (0..3).map(|j| AsymptoticTerm::Pow(0.5 - pw + j as f64)).collect();
    let family = |e: f64| make_cylinder_profile(e * r, r, frac);
    let pfa = universal_part(
        |e| Ok(pfa_energy_with(&family(e)?, k, &opts.quad)?.value),
        eps,
        &universal,
        &CYLINDER_TRUNCATION,
        &opts,
    )?;
    let de = universal_part(
        |e| Ok(de_energy_with(&family(e)?, k, beta, &opts.quad)?.total),
        eps,
        &universal,
        &CYLINDER_TRUNCATION,
        &opts,
    )?;
    let mut rep = Report::new(
        "energy",
        p,
        validity(a, &[r], Some(&profile)),
        Tolerances {
            method: "universal part of truncated-cylinder quadratures".into(),
            rel_tol: Some(opts.quad.rel_tol),
            abs_tol: None,
            error_estimate: Some(l * (pfa.std_error + de.std_error)),
        },
    );
    // The paraboloid-order PFA, plus the full circular-profile value.
    let leading = l * pfa.coefficients[0] * universal[0].eval(eps);
    set_de(&mut rep, leading, l * (de.value - pfa.value), l * de.value, beta);
    rep.set("pfa_profile", l * pfa.value);
    if k.kind() == KernelKind::Electrostatic {
        let ex = exact_cylinder_plane(a, r, l, k.amplitude())?;
        rep.set("exact", ex.exact);
        rep.set("pfa_asymptote", ex.pfa_asymptote);
    }
    Ok(rep)
}

fn neumann_refusal() -> CliError {
    Error::DeInapplicable(
        "Neumann conditions at finite temperature: the static Matsubara mode makes the second-order \
         kernel nonanalytic (k^2 log k), so no local gradient expansion exists"
            .into(),
    )
    .into()
}

fn thermal_energy(p: &Params, g: Geometry, k: &InteractionKernel, bt: f64) -> Result<Report, CliError> {
    if k.kind() == KernelKind::NeumannScalar {
        return Err(neumann_refusal());
    }
    if k.kind() != (KernelKind::DirichletScalar { d: 3 }) {
        return Err(CliError::Usage(format!(
            "finite temperature is available for the d = 3 Dirichlet kernel, not {}",
            k.name()
        )));
    }
    let a = Params::require(p.a, "a")?;
    let (profile, radii) = match g {
        Geometry::SpherePlane => {
            let r = Params::require(p.r, "R")?;
            (make_sphere_profile(a, r, p.frac.unwrap_or(FRAC_DEFAULT))?, vec![r])
        }
        Geometry::Plates => (HeightProfile::flat(a, Domain::Rectangle { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 })?, vec![]),
        _ => {
            return Err(CliError::Usage(
                "finite-temperature energies are available for plates and sphere-plane".into(),
            ))
        }
    };
    let table = ThermalTable::new(3)?;
    let f = thermal_de_free_energy(&profile, bt, &table, &quad())?;
    let mut v = validity(a, &radii, Some(&profile));
    if g == Geometry::Plates {
        v.max_gradient = Some(0.0);
    }
    let mut rep = Report::new("energy", p, v, Tolerances::quadrature("thermal DE quadrature", REL_TOL, Some(f.error_estimate)));
    rep.set("pfa", f.pfa_term);
    rep.set("de_total", f.total);
    rep.set("gradient_term", f.gradient_term);
    rep.set("ratio", f.total / f.pfa_term);
    rep.set("xi", a / bt);
    if let (Geometry::SpherePlane, Some(&r)) = (g, radii.first()) {
        let hs = sphere_plane_high_t(a, r, bt)?;
        rep.set("high_temperature_formula", hs.free_energy);
        if !hs.high_temperature {
            rep.validity.warnings.push("a/beta < 1: the high-temperature formula does not apply".into());
        }
    }
    Ok(rep)
}

pub fn force(p: &Params) -> Result<Report, CliError> {
    let g = geometry(p)?;
    let k = kernel(p)?;
    let beta = beta_for(p, &k)?;
    let a = Params::require(p.a, "a")?;
    let (radii, r_eff): (Vec<f64>, Option<f64>) = match g {
        Geometry::Plates => (vec![], None),
        Geometry::SpherePlane => {
            let r = Params::require(p.r, "R")?;
            (vec![r], Some(r))
        }
        Geometry::TwoSpheres => {
            let (r1, r2) = (Params::require(p.r, "R")?, Params::require(p.r2, "R2")?);
            (vec![r1, r2], Some(effective_radius(r1, r2)?))
        }
        _ => {
            return Err(CliError::Usage(
                "force is available for plates, sphere-plane and two-spheres".into(),
            ))
        }
    };
    let energy = |x: f64| -> Result<f64, CliError> {
        Ok(match g {
            Geometry::Plates => k.try_energy_density(x)?,
            Geometry::SpherePlane => sphere_plane_de_kernel(x, radii[0], &k, beta)?.total,
            _ => two_spheres_de(x, radii[0], radii[1], casimir_alpha(&k)?, beta)?,
        })
    };
    let h = 1e-4 * a;
    let de_force = -(energy(a + h)? - energy(a - h)?) / (2.0 * h);
    let mut rep = Report::new(
        "force",
        p,
        validity(a, &radii, None),
        Tolerances {
            method: "central difference of the closed-form energy".into(),
            rel_tol: Some(1e-7),
            abs_tol: None,
            error_estimate: None,
        },
    );
    match r_eff {
        Some(r) => rep.set("derjaguin_force", derjaguin_force(a, r, &k)?),
        None => rep.set("pfa_pressure", de_force),
    }
    rep.set("de_force", de_force);
    rep.set("beta", beta);
    Ok(rep)
}

pub fn beta_extract(p: &Params) -> Result<Report, CliError> {
    let g = geometry(p)?;
    let k = kernel(p)?;
    if g != Geometry::CylinderPlane || k.kind() != KernelKind::Electrostatic {
        return Err(CliError::Usage(
            "an exact reference energy is available for the electrostatic cylinder-plane only".into(),
        ));
    }
    let frac = p.frac.unwrap_or(FRAC_DEFAULT);
    let opts = FitOptions::default();
    let amp = k.amplitude();
    let fit = extract_beta(
        |e| Ok(exact_cylinder_plane(e, 1.0, 1.0, amp)?.exact),
        &k,
        |e| make_cylinder_profile(e, 1.0, frac),
        &opts,
    )?;
    let v = Validity {
        a_over_r: None,
        max_gradient: max_gradient(&make_cylinder_profile(opts.eps_min, 1.0, frac)?),
        de_applicable: true,
        warnings: Vec::new(),
    };
    let mut rep = Report::new(
        "beta-extract",
        p,
        v,
        Tolerances::quadrature("fit against the exact energy", opts.quad.rel_tol, Some(fit.std_error)),
    );
    rep.set("beta", fit.beta);
    rep.set("std_error", fit.std_error);
    rep.set("residual", fit.residual);
    rep.set("stored_beta", k.beta());
    rep.set("eps_min", opts.eps_min);
    rep.set("eps_max", opts.eps_max);
    Ok(rep)
}

pub fn form_factor(p: &Params) -> Result<Report, CliError> {
    let k = kernel(p)?;
    if k.kind() != (KernelKind::DirichletScalar { d: 3 }) {
        return Err(CliError::Usage(format!(
            "the form factor is available for the d = 3 Dirichlet kernel, not {}",
            k.name()
        )));
    }
    let a = p.a.unwrap_or(1.0);
    let kmax = p.kmax.unwrap_or(0.1 / a);
    let n = p.samples.unwrap_or(16);
    if !(kmax > 0.0) || n < 2 {
        return Err(CliError::Usage("need --kmax > 0 and --samples >= 2".into()));
    }
    let ks: Vec<f64> = (1..=n).map(|i| kmax * i as f64 / n as f64).collect();
    let curve = FormFactorCurve::dirichlet(a, &ks, false)?;
    let chi = extract_chi_and_beta(a)?;
    let mut v = validity(a, &[], None);
    let probe = if ks[0] * 10.0 <= kmax && n >= 6 {
        Some(analyticity_probe(&FormFactorCurve::dirichlet(a, &ks, true)?)?)
    } else {
        v.warnings.push("scan too short for the analyticity probe".into());
        None
    };
    let mut rep = Report::new(
        "form-factor",
        p,
        v,
        Tolerances::quadrature("radial quadrature with closed-form angle", 1e-12, Some(chi.chi_std_error)),
    );
    rep.set("chi", chi.chi);
    rep.set("chi_std_error", chi.chi_std_error);
    rep.set("beta", chi.beta);
    rep.set("chi_samples_ka", json!(CHI_SAMPLES));
    if let Some(pr) = probe {
        rep.set("analyticity", serde_json::to_value(pr.classification).expect("enum serializes"));
    }
    rep.set(
        "samples",
        Value::Array(curve.samples.iter().map(|(k, f)| json!({"k": k, "f2": f})).collect()),
    );
    rep.table = Some(Table {
        header: vec!["k".into(), "f2".into(), "chi".into(), "beta".into()],
        rows: curve
            .samples
            .iter()
            .map(|(k, f)| vec![json!(k), json!(f), json!(chi.chi), json!(chi.beta)])
            .collect(),
    });
    Ok(rep)
}

pub fn thermal(p: &Params) -> Result<Report, CliError> {
    let k = kernel(p)?;
    if k.kind() == KernelKind::NeumannScalar {
        return Err(neumann_refusal());
    }
    if p.geometry.is_some() {
        let bt = Params::require(p.inverse_temperature, "inverse-temperature")?;
        let mut rep = thermal_energy(p, geometry(p)?, &k, bt)?;
        rep.inputs["command"] = "thermal".into();
        return Ok(rep);
    }
    let KernelKind::DirichletScalar { d } = k.kind() else {
        return Err(CliError::Usage(format!("thermal coefficients are available for Dirichlet kernels, not {}", k.name())));
    };
    let xi = match (p.xi, p.a, p.inverse_temperature) {
        (Some(x), _, _) => x,
        (None, Some(a), Some(bt)) => a / bt,
        _ => return Err(CliError::Usage("pass --xi, or --a with --inverse-temperature".into())),
    };
    let c = ThermalCoefficientPoint::compute(xi, d)?;
    let mut rep = Report::new(
        "thermal",
        p,
        Validity {
            de_applicable: true,
            ..Validity::default()
        },
        Tolerances::quadrature("Matsubara sum of momentum integrals", 1e-12, None),
    );
    rep.set("xi", xi);
    rep.set("d", d);
    rep.set("b0", c.b0);
    rep.set("b2", c.b2);
    rep.set("ratio", c.b2 / c.b0);
    rep.set("b0_zero_temperature", b0_zero_temperature(d)?);
    rep.set("b2_zero_temperature", b2_zero_temperature(d)?);
    Ok(rep)
}

pub fn cp(p: &Params) -> Result<Report, CliError> {
    let a = Params::require(p.a, "a")?;
    let r1 = p.r.unwrap_or(f64::INFINITY);
    let r2 = p.r2.unwrap_or(r1);
    let alpha0 = p.alpha0.unwrap_or(1.0);
    let model = match p.omega0 {
        Some(w) => PolarizabilityModel::single_resonance(alpha0, w)?,
        None => PolarizabilityModel::constant(alpha0)?,
    };
    let plane = cp_plane_with(a, &model, &QuadOptions::rel(1e-12))?;
    let de = cp_de_static(a, r1, r2, alpha0)?;
    let mut v = validity(a, &[r1, r2], None);
    if p.omega0.is_some() {
        v.warnings.push("the curvature term uses the static polarizability".into());
    }
    let mut rep = Report::new(
        "cp",
        p,
        v,
        Tolerances::quadrature("frequency quadrature", 1e-12, Some(plane.error_estimate)),
    );
    rep.set("de", de);
    rep.set("plane", plane.value);
    rep.set("plane_static", -3.0 * alpha0 / (8.0 * PI * a.powi(4)));
    rep.set("curvature_sum", 1.0 / r1 + 1.0 / r2);
    Ok(rep)
}

pub fn tables(p: &Params) -> Result<Report, CliError> {
    let which = p.which.as_deref().ok_or_else(|| CliError::Usage("missing required flag --which".into()))?;
    let mut rep = Report::new("tables", p, Validity::default(), Tolerances::closed_form());
    let table = match which {
        "beta" => {
            let rows = [
                ("D", "2/3", BETA_DIRICHLET),
                ("N", "2/3(1 - 30/pi^2)", beta_neumann()),
                ("DN", "2/3", BETA_DN),
                ("ND", "2/3 - 80/(7 pi^2)", beta_nd()),
                ("EM", "2/3(1 - 15/pi^2)", beta_em()),
            ];
            Table {
                header: vec!["case".into(), "expression".into(), "beta".into()],
                rows: rows.iter().map(|(c, e, b)| vec![json!(c), json!(e), json!(b)]).collect(),
            }
        }
        "thermal-ratio" => {
            let mut rows = Vec::new();
            let mut worst: f64 = 0.0;
            for d in 1..=6u32 {
                let computed = b2_zero_temperature(d)? / b0_zero_temperature(d)?;
                let closed = thermal_ratio_closed_form(d)?;
                let gap = (computed - closed).abs();
                worst = worst.max(gap);
                rows.push(vec![json!(d), json!(computed), json!(closed), json!(gap)]);
            }
            rep.tolerances = Tolerances::quadrature("zero-temperature momentum integrals", 1e-12, Some(worst));
            Table {
                header: vec!["d".into(), "computed".into(), "closed_form".into(), "gap".into()],
                rows,
            }
        }
        other => return Err(CliError::Usage(format!("unknown table '{other}' (expected beta or thermal-ratio)"))),
    };
    let json_rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| Value::Object(table.header.iter().cloned().zip(r.iter().cloned()).collect()))
        .collect();
    rep.set("rows", Value::Array(json_rows));
    rep.table = Some(table);
    Ok(rep)
}

/// Default output format of a command.
pub fn default_format(command: &str) -> Format {
    match command {
        "tables" | "form-factor" => Format::Csv,
        _ => Format::Json,
    }
}
